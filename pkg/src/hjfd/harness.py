"""Mesh-refinement studies: solve on a sequence of grids and tabulate errors."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .grid import build_grid
from .problems import registry
from .schemes import SchemeConfig, SchemeKind, build_band, cutoff_report
from .solver import SolverConfig, solve

CSV_COLUMNS = ("level", "J", "h", "error", "order", "cutoff", "iterations", "seconds")


@dataclass(frozen=True)
class StudyPlan:
    problem: str
    kind: SchemeKind
    levels: tuple[int, ...]
    scheme: SchemeConfig = SchemeConfig()
    solver: SolverConfig = SolverConfig()
    output: Path | None = None

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", SchemeKind(self.kind))
        object.__setattr__(self, "levels", tuple(int(n) for n in self.levels))
        if not self.levels:
            raise ValueError("a study needs at least one level")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise ValueError(f"node counts must be strictly increasing, got {self.levels}")


@dataclass
class LevelResult:
    J: int
    h: float
    error: float | None
    residual: float
    converged: bool
    iterations: int
    seconds: float
    cutoff: bool | None = None
    worst_node: tuple[int, ...] | None = None
    solution: np.ndarray | None = field(default=None, repr=False)


@dataclass
class StudyReport:
    plan: StudyPlan
    levels: list[LevelResult] = field(default_factory=list)
    aborted: bool = False

    @property
    def errors(self) -> list[float]:
        return [lv.error for lv in self.levels]

    @property
    def hs(self) -> list[float]:
        return [lv.h for lv in self.levels]

    @property
    def orders(self) -> list[float | None]:
        if any(e is None for e in self.errors):
            return [None] * len(self.levels)
        return [None] + observed_order(self.errors, self.hs)

    @property
    def cutoff_labels(self) -> list[str]:
        if self.plan.kind is not SchemeKind.MODIFIED:
            return [""] * len(self.levels)
        return ["yes" if lv.cutoff else "no" for lv in self.levels]


def observed_order(errors: Sequence[float], hs: Sequence[float]) -> list[float]:
    """``ln(e_{k-1}/e_k) / ln(h_{k-1}/h_k)`` for each consecutive pair.

    A zero error on the finer level makes the order infinite.
    """
    if len(errors) != len(hs):
        raise ValueError("errors and hs differ in length")
    if any(h <= 0 for h in hs) or any(e < 0 for e in errors):
        raise ValueError("mesh sizes must be positive and errors nonnegative")
    out = []
    for (e0, h0), (e1, h1) in zip(zip(errors, hs), zip(errors[1:], hs[1:])):
        if e1 == 0.0:
            out.append(math.inf)
        elif e0 == 0.0:
            out.append(-math.inf)
        else:
            out.append(math.log(e0 / e1) / math.log(h0 / h1))
    return out


def run_level(plan: StudyPlan, J: int, keep_solution: bool = False) -> LevelResult:
    start = time.perf_counter()
    problem = registry(plan.problem)
    grid = build_grid(problem.domain, J)
    guess = bounds = None
    if plan.kind is not SchemeKind.LAX_FRIEDRICHS:
        lf = solve(problem, grid, plan.scheme, SchemeKind.LAX_FRIEDRICHS, plan.solver)
        if not lf.converged:
            return LevelResult(J, grid.h, None, lf.residual_norm, False, lf.iterations,
                               time.perf_counter() - start)
        guess = lf.solution
        if plan.kind is SchemeKind.MODIFIED:
            bounds = build_band(lf.solution, plan.scheme.cutoff_c, grid.h)
    out = solve(problem, grid, plan.scheme, plan.kind, plan.solver, guess=guess, bounds=bounds)
    error = worst = None
    if problem.exact is not None:
        diff = np.abs(out.solution - problem.exact(grid.mesh))[grid.interior]
        flat = int(np.argmax(diff))
        worst = tuple(int(k) + 1 for k in np.unravel_index(flat, diff.shape))
        error = float(diff.flat[flat])
    cutoff = None
    if bounds is not None:
        cutoff = cutoff_report(problem, grid, plan.scheme, bounds, out.solution).active
    return LevelResult(J, grid.h, error, out.residual_norm, out.converged, out.iterations,
                       time.perf_counter() - start, cutoff, worst,
                       out.solution if keep_solution else None)


def run_study(plan: StudyPlan, parallel: int = 0, keep_solutions: bool = False) -> StudyReport:
    """Run every level of ``plan``.

    A level whose solve fails to converge ends the study; the report then
    holds the levels up to and including the failed one with ``aborted`` set.
    ``parallel > 1`` solves levels in worker processes.
    """
    report = StudyReport(plan)
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            results = list(pool.map(run_level, [plan] * len(plan.levels), plan.levels,
                                    [keep_solutions] * len(plan.levels)))
    else:
        results = (run_level(plan, J, keep_solutions) for J in plan.levels)
    for level in results:
        report.levels.append(level)
        if not level.converged:
            report.aborted = True
            break
    return report


def _fmt_order(order: float | None) -> str:
    if order is None:
        return ""
    if math.isinf(order):
        return "exact"
    return f"{order:.2f}"


def to_csv(report: StudyReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for k, (lv, order, cut) in enumerate(zip(report.levels, report.orders, report.cutoff_labels), 1):
        writer.writerow([k, lv.J, f"{lv.h:.6e}", "" if lv.error is None else f"{lv.error:.6e}",
                         "" if order is None else (_fmt_order(order) if math.isinf(order) else f"{order:.4f}"),
                         cut, lv.iterations, f"{lv.seconds:.3f}"])
    return buf.getvalue()


def to_text(report: StudyReport) -> str:
    plan = report.plan
    cutoff = plan.kind is SchemeKind.MODIFIED
    head = ["h"] + (["Cutoff"] if cutoff else []) + ["Error", "Order"]
    rows = []
    for lv, order, cut in zip(report.levels, report.orders, report.cutoff_labels):
        err = "n/a" if lv.error is None else f"{lv.error:.2e}"
        rows.append([f"{lv.h:.2e}"] + ([cut] if cutoff else []) + [err, _fmt_order(order)])
    widths = [max(len(r[i]) for r in [head] + rows) for i in range(len(head))]
    line = "+" + "+".join("-" * (w + 2) for w in widths) + "+"
    title = f"{plan.problem}  scheme={plan.kind.value}  bc={plan.scheme.bc.value}"
    if cutoff:
        title += f"  c={plan.scheme.cutoff_c:g}"
    out = [title, line, "| " + " | ".join(c.center(w) for c, w in zip(head, widths)) + " |", line]
    for r in rows:
        out.append("| " + " | ".join(c.rjust(w) for c, w in zip(r, widths)) + " |")
    out.append(line)
    if report.aborted:
        out.append(f"study aborted: level J={report.levels[-1].J} did not converge")
    return "\n".join(out) + "\n"


def emit(report: StudyReport, fmt: str = "csv", path: Path | str | None = None) -> str:
    """Render the report; write it to ``path`` when given."""
    if fmt not in ("csv", "text"):
        raise ValueError(f"unknown format {fmt!r}")
    text = to_csv(report) if fmt == "csv" else to_text(report)
    if path is not None:
        Path(path).write_text(text)
    return text
