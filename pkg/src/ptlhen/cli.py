"""Command line entry point: ``ptlhen``."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from .case_data import CaseError, load_case, reference_case_path
from .milp import SolveOptions
from .milp.backends import SolverConfigError
from .pareto import SweepError, build_problem, epsilon_sweep, filter_nondominated, solve_point, TIE_BREAK
from .pwl_fit import DomainError
from .report import export_stream_plot, pareto_csv, solver_time_report, summary_text

log = logging.getLogger("ptlhen")


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ptlhen",
                                description="Joint PtL process / heat exchanger network multi-objective optimization")
    p.add_argument("--case", default=None, help="case JSON (default: packaged reference case)")
    p.add_argument("--mode", default="coupled", help="coupled | fixed:U | empirical:FIXTURE.json")
    p.add_argument("--points", type=int, default=10, help="number of Pareto points (>= 2)")
    p.add_argument("--mip-gap", type=float, default=0.01)
    p.add_argument("--time-limit", type=float, default=600.0, help="seconds per MILP")
    p.add_argument("--workers", type=int, default=1, help="parallel epsilon windows")
    p.add_argument("--threads", type=int, default=1, help="solver threads per MILP")
    p.add_argument("--backend", default="highs", choices=["highs", "cbc"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="results", help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _write_outputs(out: Path, case, points, front, header: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "pareto.csv").write_text(pareto_csv(points, front))
    (out / "times.csv").write_text(solver_time_report(points))
    for n, p in enumerate([q for q in points if q.accepted]):
        (out / f"design_{n}.dot").write_text(export_stream_plot(p.design, case))
    (out / "summary.txt").write_text(summary_text(points, front, case, header))


def run(args: argparse.Namespace) -> int:
    case_path = Path(args.case) if args.case else reference_case_path()
    if not case_path.exists():
        print(f"error: case file not found: {case_path}", file=sys.stderr)
        return 2
    try:
        case = load_case(case_path)
    except (CaseError, DomainError) as exc:
        print(f"error: invalid case {case_path}: {exc}", file=sys.stderr)
        return 2
    opts = SolveOptions(mip_gap_target=args.mip_gap, time_limit_s=args.time_limit, threads=args.threads,
                        backend=args.backend, seed=args.seed, verbose=args.verbose)
    out = Path(args.out)
    t0 = time.perf_counter()
    try:
        if args.mode.startswith("empirical:"):
            from .empirical import evaluate_fixture, load_fixture

            fx_path = Path(args.mode.split(":", 1)[1])
            if not fx_path.exists():
                print(f"error: fixture file not found: {fx_path}", file=sys.stderr)
                return 2
            points = [evaluate_fixture(case, load_fixture(fx_path), opts)]
        elif args.mode.startswith("fixed:"):
            prob = build_problem(case, args.mode, opts)
            points = [solve_point(prob, prob.f2 + TIE_BREAK * prob.f1, opts)]
        elif args.mode == "coupled":
            if args.points < 2:
                print("error: --points must be at least 2", file=sys.stderr)
                return 2
            prob = build_problem(case, "coupled", opts)
            points = epsilon_sweep(prob, args.points, opts, workers=args.workers)
        else:
            print(f"error: unknown mode {args.mode!r}", file=sys.stderr)
            return 2
    except (SolverConfigError, SweepError, CaseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    front = filter_nondominated(points)
    header = f"mode: {args.mode}; backend: {args.backend}; mip gap target: {args.mip_gap}; " \
             f"wall time: {time.perf_counter() - t0:.1f} s"
    _write_outputs(out, case, points, front, header)
    print(summary_text(points, front, case, header))
    return 0 if any(p.accepted for p in points) else 1


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return run(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
