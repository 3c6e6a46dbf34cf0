"""Command-line entry point: ``hjfd solve | study | verify``."""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .grid import build_grid
from .harness import StudyPlan, emit, run_study
from .problems import PROBLEM_NAMES, registry, verify_manufactured
from .schemes import SchemeConfig, SchemeKind, build_band, check_monotonicity, cutoff_report, default_gamma
from .solver import SolverConfig, solve

OUTPUT_DIR_ENV = "HJFD_OUTPUT_DIR"
DEFECT_TOL = 1e-12


def _levels(text: str) -> tuple[int, ...]:
    try:
        levels = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}") from None
    if not levels:
        raise argparse.ArgumentTypeError("empty level list")
    return levels


def _scheme_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", required=True, choices=PROBLEM_NAMES)
    p.add_argument("--scheme", default="ho", choices=[k.value for k in SchemeKind])
    p.add_argument("--bc", default="lin", choices=["lin", "quad"])
    p.add_argument("--gamma", type=float, help="moment/viscosity weight (default 10 in 1D, 5 in 2D)")
    p.add_argument("--p", type=float, default=1.0, help="exponent of h in the moment weight")
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--c", type=float, default=10.0, help="band radius multiplier for the modified scheme")
    p.add_argument("--tol", type=float, default=1e-10, help="max-norm residual tolerance")
    p.add_argument("--out", type=Path, help=f"output file; relative paths resolve against ${OUTPUT_DIR_ENV}")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hjfd", description="Finite-difference solvers for stationary Hamilton-Jacobi equations.")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve on a single mesh")
    _scheme_args(ps)
    ps.add_argument("--n", type=int, required=True, help="nodes per axis")

    pt = sub.add_parser("study", help="mesh-refinement study")
    _scheme_args(pt)
    pt.add_argument("--levels", type=_levels, required=True, help="comma-separated nodes per axis, increasing")
    pt.add_argument("--format", choices=["csv", "text"], default="csv")
    pt.add_argument("--parallel", type=int, default=0, metavar="WORKERS", help="solve levels in worker processes")

    pv = sub.add_parser("verify", help="check manufactured-solution defects of every registry problem")
    pv.add_argument("--samples", type=int, default=1000)
    pv.add_argument("--seed", type=int, default=0)
    return parser


def _configs(args, dim: int, parser: argparse.ArgumentParser) -> tuple[SchemeConfig, SolverConfig]:
    gamma = default_gamma(dim) if args.gamma is None else args.gamma
    try:
        scheme = SchemeConfig(beta=args.beta, gamma=gamma, p=args.p, bc=args.bc, cutoff_c=args.c)
        if args.tol <= 0:
            raise ValueError(f"--tol must be positive, got {args.tol}")
    except ValueError as exc:
        parser.error(str(exc))
    return scheme, SolverConfig(tol=args.tol)


def _resolve(path: Path | None) -> Path | None:
    if path is None:
        return None
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_solution(path: Path, grid, U: np.ndarray, exact: np.ndarray | None) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"x{i + 1}" for i in range(grid.dim)] + ["U"] + (["exact"] if exact is not None else []))
        coords = grid.mesh.reshape(grid.dim, -1, order="F")
        u = U.ravel(order="F")
        ex = exact.ravel(order="F") if exact is not None else None
        for k in range(u.size):
            row = [f"{c:.17g}" for c in coords[:, k]] + [f"{u[k]:.17g}"]
            if ex is not None:
                row.append(f"{ex[k]:.17g}")
            w.writerow(row)


def cmd_solve(args, parser) -> int:
    problem = registry(args.problem)
    scheme, solver = _configs(args, problem.dim, parser)
    if args.n < 5:
        parser.error(f"--n must be at least 5, got {args.n}")
    grid = build_grid(problem.domain, args.n)
    check_monotonicity(problem, grid, scheme)
    kind = SchemeKind(args.scheme)
    guess = bounds = None
    if kind is not SchemeKind.LAX_FRIEDRICHS:
        lf = solve(problem, grid, scheme, SchemeKind.LAX_FRIEDRICHS, solver)
        if not lf.converged:
            print(f"Lax-Friedrichs initial solve did not converge (residual {lf.residual_norm:.3e})", file=sys.stderr)
            return 1
        guess = lf.solution
        if kind is SchemeKind.MODIFIED:
            bounds = build_band(lf.solution, scheme.cutoff_c, grid.h)
    out = solve(problem, grid, scheme, kind, solver, guess=guess, bounds=bounds)
    exact = problem.exact(grid.mesh) if problem.exact is not None else None
    print(f"problem={problem.name} scheme={kind.value} bc={scheme.bc.value} n={args.n} h={grid.h:.6e}")
    print(f"converged={'yes' if out.converged else 'no'} method={out.method} iterations={out.iterations} "
          f"residual={out.residual_norm:.3e}")
    if exact is not None:
        print(f"error={np.max(np.abs(out.solution - exact)[grid.interior]):.6e}")
    if bounds is not None:
        print(f"cutoff={cutoff_report(problem, grid, scheme, bounds, out.solution).label}")
    path = _resolve(args.out)
    if path is not None:
        _write_solution(path, grid, out.solution, exact)
    return 0 if out.converged else 1


def cmd_study(args, parser) -> int:
    problem = registry(args.problem)
    scheme, solver = _configs(args, problem.dim, parser)
    try:
        plan = StudyPlan(args.problem, SchemeKind(args.scheme), args.levels, scheme, solver, _resolve(args.out))
    except ValueError as exc:
        parser.error(str(exc))
    if min(plan.levels) < 5:
        parser.error("every level needs at least 5 nodes per axis")
    report = run_study(plan, parallel=args.parallel)
    text = emit(report, args.format, plan.output)
    if plan.output is None:
        sys.stdout.write(text)
    if report.aborted:
        print(f"level J={report.levels[-1].J} did not converge", file=sys.stderr)
        return 1
    return 0


def cmd_verify(args, parser) -> int:
    worst = 0.0
    for name in PROBLEM_NAMES:
        defect = verify_manufactured(registry(name), samples=args.samples, seed=args.seed)
        worst = max(worst, defect)
        print(f"{name:8s} defect={defect:.3e} {'ok' if defect <= DEFECT_TOL else 'FAIL'}")
    return 0 if worst <= DEFECT_TOL else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"solve": cmd_solve, "study": cmd_study, "verify": cmd_verify}[args.command]
    return handler(args, parser)


if __name__ == "__main__":
    sys.exit(main())
