"""Command-line front end for the experiment harness.

Exit codes: 0 success, 2 input error, 3 capacity error.
"""

from __future__ import annotations

import argparse
import sys

from .annealing import AnnealSchedule, anneal
from .builder import LayerParams, ORDERINGS, parse_assignment
from .errors import CapacityError, InputError, ZenoptError
from .harness import (
    lagrange_sweep,
    ordering_study,
    run_family_sweep,
    sampled_metrics,
    state_visit_histogram,
    write_family_csv,
    write_histogram_csv,
    write_lagrange_csv,
    write_ordering_csv,
    write_sa_csv,
    write_trace_csv,
    write_zeno_csv,
    zeno_demo_rows,
)
from .optimizer import OptimizerConfig, optimize
from .problem import Multipliers, default_multipliers, load_problem


def _add_common(sub: argparse.ArgumentParser, with_assign: bool = True) -> None:
    sub.add_argument("--problem", required=True, help="problem JSON file")
    if with_assign:
        sub.add_argument(
            "--assign", required=True,
            help="comma list per constraint: QAOA, DEPHASE or ZENO",
        )
    sub.add_argument("--lambda", dest="lam", type=float, default=None,
                     help="uniform Lagrange multiplier (default: sum|objective|+1)")
    sub.add_argument("--alpha", type=float, default=None,
                     help="dephasing strength (default: same as lambda)")
    sub.add_argument("--p", type=int, default=1, help="number of layers")
    sub.add_argument("--q", type=int, default=1, help="Zeno measurements per layer")
    sub.add_argument("--ordering", choices=ORDERINGS, default="natural")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--iters", type=int, default=60, help="optimizer iterations")


def _multipliers(problem, args) -> Multipliers:
    if args.lam is None:
        mult = default_multipliers(problem)
        if args.alpha is not None:
            mult = Multipliers(mult.lambdas, args.alpha)
        return mult
    return Multipliers.uniform(problem.n_constraints, args.lam, args.alpha)


def _config(args) -> OptimizerConfig:
    init = LayerParams.initial(args.p, args.q)
    return OptimizerConfig(max_iters=args.iters, seed=args.seed, init_params=init)


def _cmd_solve(args) -> None:
    problem = load_problem(args.problem)
    assignment = parse_assignment(args.assign)
    mult = _multipliers(problem, args)
    trace = optimize(problem, assignment, mult, _config(args), args.ordering)
    if args.out:
        write_trace_csv(trace, args.out)
    final = trace.final
    if args.shots:
        final = sampled_metrics(
            problem, assignment, mult, trace.best_params, args.shots, args.seed, args.ordering
        )
    gammas = ",".join(f"{v:.6f}" for v in trace.best_params.gamma)
    betas = ",".join(f"{v:.6f}" for v in trace.best_params.beta)
    print(
        f"best gamma={gammas} beta={betas} "
        f"cost={final.expected_cost:.6f} p_feasible={final.p_feasible:.6f} "
        f"p_optimal={final.p_optimal:.6f} survival={final.survival_prob:.6f}"
    )


def _cmd_sweep_family(args) -> None:
    problem = load_problem(args.problem)
    mult = _multipliers(problem, args)
    config = OptimizerConfig(
        max_iters=args.iters, seed=args.seed, init_params=LayerParams.initial(args.p, args.q)
    )
    rows = run_family_sweep(problem, mult, config, args.ordering, workers=args.workers)
    write_family_csv(rows, args.out)
    failed = sum(1 for r in rows if r.error)
    print(f"{len(rows)} assignments swept, {failed} failed rows -> {args.out}")


def _cmd_sweep_lagrange(args) -> None:
    problem = load_problem(args.problem)
    assignment = parse_assignment(args.assign)
    lambdas = [float(v) for v in args.lambdas.split(",")]
    rows = lagrange_sweep(problem, assignment, lambdas, _config(args), args.ordering)
    write_lagrange_csv(rows, args.out)
    print(f"{len(rows)} multiplier values -> {args.out}")


def _cmd_ordering(args) -> None:
    problem = load_problem(args.problem)
    assignment = parse_assignment(args.assign)
    mult = _multipliers(problem, args)
    rows = ordering_study(problem, assignment, mult, _config(args), reoptimize=args.reoptimize)
    write_ordering_csv(rows, args.out)
    values = [res.p_feasible for res in rows.values()]
    print(f"p_feasible spread {max(values) - min(values):.6f} -> {args.out}")


def _cmd_histogram(args) -> None:
    problem = load_problem(args.problem)
    assignment = parse_assignment(args.assign)
    mult = _multipliers(problem, args)
    params = LayerParams((args.gamma,) * args.p, (args.beta,) * args.p, args.q)
    result = state_visit_histogram(problem, assignment, mult, params, args.ordering)
    write_histogram_csv(result, args.out)
    print(f"support {result.support_size} of {1 << problem.n_vars} states -> {args.out}")


def _cmd_zeno_demo(args) -> None:
    n_list = [int(v) for v in args.n_list.split(",")]
    rows = zeno_demo_rows(n_list, t=args.t)
    write_zeno_csv(rows, args.out)
    print(f"{len(rows)} measurement counts -> {args.out}")


def _cmd_baseline_sa(args) -> None:
    problem = load_problem(args.problem)
    mult = _multipliers(problem, args)
    schedule = AnnealSchedule(
        t_start=args.t_start, t_end=args.t_end, steps=args.steps, seed=args.seed
    )
    result = anneal(problem, mult, schedule)
    write_sa_csv(result.visit_trace, args.out)
    print(f"best state {result.best_state} cost {result.best_cost:.6f} -> {args.out}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zenopt",
        description="Hybrid QAOA / dephasing / Zeno experiments on constrained binary problems",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("solve", help="optimize one assignment, dump the trace")
    _add_common(sub)
    sub.add_argument("--out", default=None, help="trace CSV path")
    sub.add_argument("--shots", type=int, default=0,
                     help="re-estimate final metrics from sampled shots")
    sub.set_defaults(func=_cmd_solve)

    sub = subs.add_parser("sweep-family", help="optimize all 3^n assignments")
    _add_common(sub, with_assign=False)
    sub.set_defaults(iters=40)
    sub.add_argument("--out", required=True)
    sub.add_argument("--workers", type=int, default=None, help="process pool size")
    sub.set_defaults(func=_cmd_sweep_family)

    sub = subs.add_parser("sweep-lagrange", help="optimize across multiplier values")
    _add_common(sub)
    sub.add_argument("--lambdas", required=True, help="ascending comma list")
    sub.add_argument("--out", required=True)
    sub.set_defaults(func=_cmd_sweep_lagrange)

    sub = subs.add_parser("ordering", help="compare block orderings")
    _add_common(sub)
    sub.add_argument("--out", required=True)
    sub.add_argument("--reoptimize", action="store_true",
                     help="run a separate search per ordering")
    sub.set_defaults(func=_cmd_ordering)

    sub = subs.add_parser("histogram", help="decision-state visit probabilities")
    _add_common(sub)
    sub.add_argument("--gamma", type=float, default=0.1)
    sub.add_argument("--beta", type=float, default=0.1)
    sub.add_argument("--out", required=True)
    sub.set_defaults(func=_cmd_histogram)

    sub = subs.add_parser("zeno-demo", help="two-level repeated-measurement survival study")
    sub.add_argument("--n-list", required=True, help="comma list of measurement counts")
    sub.add_argument("--t", type=float, default=1.5707963267948966)
    sub.add_argument("--out", required=True)
    sub.set_defaults(func=_cmd_zeno_demo)

    sub = subs.add_parser("baseline-sa", help="simulated-annealing benchmark")
    sub.add_argument("--problem", required=True)
    sub.add_argument("--lambda", dest="lam", type=float, default=None)
    sub.add_argument("--alpha", type=float, default=None)
    sub.add_argument("--steps", type=int, default=5000)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--t-start", type=float, default=10.0)
    sub.add_argument("--t-end", type=float, default=0.05)
    sub.add_argument("--out", required=True)
    sub.set_defaults(func=_cmd_baseline_sa)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except (InputError, FileNotFoundError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except ZenoptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
