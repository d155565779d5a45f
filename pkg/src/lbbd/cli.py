"""Command-line front end: ``lbbd solve``, ``lbbd check``, ``lbbd bench``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from pathlib import Path

from . import cuts as cuts_module
from .driver import BRANCH_AND_CHECK, BUDGET_EXHAUSTED, ITERATIVE, SolverConfig, solve
from .generate import LCG, GeneratorParams, corpus, random_instance
from .model import INFEASIBLE, OBJECTIVES, OPTIMAL, InstanceFormatError, load_instance, save_instance
from .verify import check_instance

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE, EXIT_BUDGET, EXIT_DISAGREE = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        if v in (float("inf"), float("-inf")):
            return "inf" if v > 0 else "-inf"
        return str(round(v)) if abs(v - round(v)) < 1e-6 else f"{v:.6g}"
    return str(v)


def _config(args) -> SolverConfig:
    return SolverConfig(
        mode=BRANCH_AND_CHECK if args.mode == "bnc" else ITERATIVE,
        warm_start_count=args.warm_start,
        iteration_budget=args.iter_budget,
        time_budget=args.time_budget,
        analytic_cuts=not args.no_analytic,
        relaxations=not args.no_relax,
    )


def cmd_solve(args) -> int:
    try:
        if args.instance == "random":
            objective = args.objective or "makespan"
            instance = random_instance(LCG(args.seed or 0), objective)
        else:
            instance = load_instance(args.instance)
    except (OSError, InstanceFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.objective:
        instance = instance.with_objective(args.objective)
    try:
        config = _config(args)
        t0 = time.perf_counter()
        sol = solve(instance, config)
        ms = int((time.perf_counter() - t0) * 1000)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.trace:
        sol.trace.write(args.trace)
    report = {
        "instance": args.instance,
        "mode": args.mode,
        "objective": instance.objective,
        "relax": int(config.relaxations),
        "analytic": int(config.analytic_cuts),
        "warm_start": config.warm_start_count,
        "status": sol.status,
        "value": _fmt(sol.value) if sol.status == OPTIMAL else "-",
        "lower": _fmt(sol.lower),
        "upper": _fmt(sol.upper),
        "iterations": len(sol.trace.iterations),
        "ms": ms,
        "trace": args.trace or "-",
    }
    print(" ".join(f"{k}={v}" for k, v in report.items()))
    return {OPTIMAL: EXIT_OK, INFEASIBLE: EXIT_INFEASIBLE, BUDGET_EXHAUSTED: EXIT_BUDGET}[sol.status]


def _flipped_deadline_cut(instance, i, support, m_star):
    """Fault injection: the analytic deadline cut with the spread added."""
    cut = _original_deadline_cut(instance, i, support, m_star)
    dues = [instance.job(j).due for j in sorted(support)] or [0]
    spread = max(dues) - min(dues)
    return type(cut)(cut.coeffs, cut.rhs + 2 * spread, cut.tag, cut.facility)


_original_deadline_cut = cuts_module.analytic_makespan_cut_deadlines


def _params(args) -> GeneratorParams:
    return GeneratorParams(
        m_range=(1, args.m_max),
        n_range=(2, args.n_max),
        release=(0, args.max_release),
        max_horizon=args.max_horizon,
    )


def cmd_check(args) -> int:
    if args.inject_sign_flip:
        cuts_module.analytic_makespan_cut_deadlines = _flipped_deadline_cut
    try:
        instances = corpus(args.seed, args.count, "makespan", _params(args))
        # each objective cell reads oracle/iterative/bnc
        print("idx m n " + " ".join(OBJECTIVES) + " result")
        failed = 0
        for idx, base in enumerate(instances):
            cells, problems = [], []
            for objective in OBJECTIVES:
                res = check_instance(base.with_objective(objective))
                cells.append("/".join(_fmt(v) for v in (res.oracle, res.values.get(ITERATIVE), res.values.get(BRANCH_AND_CHECK))))
                problems += [f"{objective}: {p}" for p in res.problems]
            print(f"{idx} {base.m} {base.n} {' '.join(cells)} {'FAIL' if problems else 'pass'}")
            if problems:
                failed += 1
                dump = Path(args.dump_dir) / f"failed_seed{args.seed}_{idx}.json"
                dump.parent.mkdir(parents=True, exist_ok=True)
                save_instance(base, dump)
                for p in problems[:5]:
                    print(f"  {p}")
                print(f"  instance written to {dump}")
        print(f"checked={len(instances)} failed={failed}")
        return EXIT_DISAGREE if failed else EXIT_OK
    finally:
        cuts_module.analytic_makespan_cut_deadlines = _original_deadline_cut


ABLATIONS = {
    "relax": {"relaxations": False},
    "analytic": {"analytic_cuts": False},
    "nogood": {"strengthen": False},
}


def cmd_bench(args) -> int:
    if args.instance:
        try:
            instances = [("file:" + args.instance, load_instance(args.instance))]
        except (OSError, InstanceFormatError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_ERROR
    else:
        instances = [
            (f"seed{args.seed}#{k}", inst)
            for k, inst in enumerate(corpus(args.seed, args.count, args.objective or "makespan", _params(args)))
        ]
    configs = [("base", {})] + [(f"no-{a}", ABLATIONS[a]) for a in args.ablate]
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["instance", "config", "value", "iterations", "master_ms", "subproblem_ms", "total_ms"])
    for name, inst in instances:
        if args.objective:
            inst = inst.with_objective(args.objective)
        for label, overrides in configs:
            cfg = SolverConfig(mode=BRANCH_AND_CHECK if args.mode == "bnc" else ITERATIVE, **overrides)
            t0 = time.perf_counter()
            sol = solve(inst, cfg)
            total = int((time.perf_counter() - t0) * 1000)
            writer.writerow([name, label, _fmt(sol.value), len(sol.trace.iterations),
                             round(sol.trace.master_ms), round(sol.trace.subproblem_ms), total])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lbbd", description="Logic-based Benders solver for job assignment and scheduling.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("solve", help="solve one instance")
    p.add_argument("--instance", required=True, help="instance JSON path, or 'random' to draw one from --seed")
    p.add_argument("--mode", choices=["iterative", "bnc"], default="iterative")
    p.add_argument("--objective", choices=OBJECTIVES)
    p.add_argument("--no-relax", action="store_true")
    p.add_argument("--no-analytic", action="store_true")
    p.add_argument("--warm-start", type=int, default=0, metavar="K")
    p.add_argument("--iter-budget", type=int, metavar="K")
    p.add_argument("--time-budget", type=float, metavar="SEC")
    p.add_argument("--trace", metavar="PATH")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_solve)

    def sizes(q):
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--count", type=int, default=25)
        q.add_argument("--m-max", type=int, default=2)
        q.add_argument("--n-max", type=int, default=5)
        q.add_argument("--max-release", type=int, default=4)
        q.add_argument("--max-horizon", type=int, default=12)

    p = sub.add_parser("check", help="cross-check random instances against the oracle")
    sizes(p)
    p.add_argument("--dump-dir", default=".", help="where failing instances are written")
    p.add_argument("--inject-sign-flip", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench", help="effort metrics with and without cut/relaxation families")
    sizes(p)
    p.add_argument("--instance")
    p.add_argument("--objective", choices=OBJECTIVES)
    p.add_argument("--mode", choices=["iterative", "bnc"], default="iterative")
    p.add_argument("--ablate", action="append", choices=sorted(ABLATIONS), default=[])
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if getattr(args, "count", 0) is not None and getattr(args, "count", 0) < 0:
        parser.error("--count must be >= 0")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
