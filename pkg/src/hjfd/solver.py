"""Root finding for the scheme residuals.

Newton's method with a finite-difference Jacobian is the workhorse.  The
explicit pseudo-time map ``V -> V - tau * residual(V)`` is kept both as a
fallback when Newton stalls and as an independent way to reach the same
root.
"""

from __future__ import annotations

import logging
import time
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .grid import Grid
from .operators import CutoffBounds
from .problems import Problem
from .schemes import SchemeConfig, SchemeKind, build_band, residual

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-10
    max_newton: int = 50
    fd_scale: float = 1e-9  # wider windows blur nearly active cutoff clamps
    backtrack: float = 0.5
    max_halvings: int = 30
    tau: float | None = None  # None: use tau_max
    max_sweeps: int = 200_000
    stall_window: int = 5
    hybrid_sweeps: int = 100


@dataclass
class SolveOutcome:
    solution: np.ndarray
    converged: bool
    residual_norm: float
    iterations: int
    method: str
    sweeps: int = 0
    seconds: float = 0.0
    bounds: CutoffBounds | None = field(default=None, repr=False)


class SingularJacobian(RuntimeError):
    pass


class SchemeSystem:
    """Residual of one scheme as a function of the interior unknowns.

    Unknown and residual vectors use the flat order restricted to interior
    nodes (axis 1 fastest).
    """

    def __init__(self, problem: Problem, grid: Grid, cfg: SchemeConfig, kind: SchemeKind,
                 bounds: CutoffBounds | None = None):
        self.problem = problem
        self.grid = grid
        self.cfg = cfg
        self.kind = kind
        self.bounds = bounds
        self.boundary = problem.boundary_values(grid.mesh)

    def full(self, v: np.ndarray) -> np.ndarray:
        V = self.boundary.copy()
        V[self.grid.interior] = v.reshape(self.grid.interior_shape, order="F")
        return V

    def interior(self, V: np.ndarray) -> np.ndarray:
        return V[self.grid.interior].ravel(order="F")

    def __call__(self, v: np.ndarray) -> np.ndarray:
        r = residual(self.problem, self.grid, self.cfg, self.kind, self.full(v), self.bounds)
        return r.ravel(order="F")

    def jacobian(self, v: np.ndarray, scale: float = 1e-9) -> sp.csc_matrix:
        return fd_jacobian(self, v, self.grid.interior_shape, scale)


@lru_cache(maxsize=16)
def stencil_pattern(interior_shape: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rows, columns and column colours of the 5-point-per-axis cross stencil.

    Colour ``sum_i (a_i mod 5) 5^i`` separates any two columns that share a
    row, so one perturbation per colour recovers the whole Jacobian.
    """
    n = int(np.prod(interior_shape))
    ids = np.arange(n).reshape(interior_shape, order="F")
    rows = [ids.ravel()]
    cols = [ids.ravel()]
    for axis in range(len(interior_shape)):
        for k in (1, 2):
            a = [slice(None)] * len(interior_shape)
            b = [slice(None)] * len(interior_shape)
            a[axis] = slice(k, None)
            b[axis] = slice(None, -k)
            lo, hi = ids[tuple(b)].ravel(), ids[tuple(a)].ravel()
            rows += [lo, hi]
            cols += [hi, lo]
    multi = np.unravel_index(np.arange(n), interior_shape, order="F")
    colors = sum((m % 5) * 5**i for i, m in enumerate(multi))
    return np.concatenate(rows), np.concatenate(cols), np.asarray(colors)


def fd_jacobian(F: Callable[[np.ndarray], np.ndarray], v: np.ndarray, interior_shape: tuple[int, ...],
                scale: float = 1e-9) -> sp.csc_matrix:
    """Central-difference Jacobian on the stencil sparsity, grouped by colour.

    Central differences give a zero generalized derivative of ``|q|`` and
    ``sqrt(q1^2 + q2^2)`` at the kink.
    """
    rows, cols, colors = stencil_pattern(tuple(interior_shape))
    n = v.size
    eps = scale * (1.0 + np.abs(v))
    vals = np.empty(rows.size)
    col_color = colors[cols]
    for c in np.unique(colors):
        mask = colors == c
        step = np.where(mask, eps, 0.0)
        diff = F(v + step) - F(v - step)
        sel = col_color == c
        vals[sel] = diff[rows[sel]] / (2.0 * eps[cols[sel]])
    return sp.csc_matrix((vals, (rows, cols)), shape=(n, n))


@dataclass
class NewtonStep:
    v: np.ndarray
    residual: np.ndarray
    norm: float
    decreased: bool


def newton_direction(jacobian: Callable[[np.ndarray], sp.spmatrix], v: np.ndarray,
                     r: np.ndarray) -> np.ndarray:
    """Solve ``J(v) dv = r``; the Newton update is ``v - dv``."""
    J = jacobian(v)
    try:
        with np.errstate(all="raise"), warnings.catch_warnings():
            warnings.simplefilter("error", spla.MatrixRankWarning)
            dv = spla.spsolve(J.tocsc(), r)
    except (RuntimeError, FloatingPointError, spla.MatrixRankWarning) as exc:
        raise SingularJacobian(str(exc)) from exc
    if not np.all(np.isfinite(dv)):
        raise SingularJacobian("Newton direction is not finite")
    return dv


def newton_step(F: Callable[[np.ndarray], np.ndarray], v: np.ndarray,
                jacobian: Callable[[np.ndarray], sp.spmatrix], r: np.ndarray | None = None,
                config: SolverConfig = SolverConfig()) -> NewtonStep:
    """One damped Newton step with backtracking on the max-norm residual."""
    if r is None:
        r = F(v)
    norm = _norm(r)
    if norm <= config.tol:
        return NewtonStep(v, r, norm, False)
    dv = newton_direction(jacobian, v, r)
    t = 1.0
    for _ in range(config.max_halvings + 1):
        w = v - t * dv
        rw = F(w)
        nw = _norm(rw)
        if nw < norm:
            return NewtonStep(w, rw, nw, True)
        t *= config.backtrack
    return NewtonStep(v, r, norm, False)


def _norm(r: np.ndarray) -> float:
    return float(np.max(np.abs(r))) if r.size else 0.0


def tau_max(problem: Problem, grid: Grid, cfg: SchemeConfig) -> float:
    """Largest pseudo-time step keeping each update nondecreasing in its own node."""
    inv = sum(1.0 / h**2 for h in grid.spacing)
    lip_q = problem.lip_q or (0.0,) * grid.dim
    denom = (problem.lip_u
             + 2.0 * cfg.beta * grid.h**2 * inv
             + 1.5 * cfg.gamma * grid.h**cfg.p * inv
             + sum(L / h for L, h in zip(lip_q, grid.spacing)))
    return 0.9 / denom


def pseudo_sweep(problem: Problem, grid: Grid, cfg: SchemeConfig, kind: SchemeKind, V: np.ndarray,
                 tau: float, bounds: CutoffBounds | None = None) -> np.ndarray:
    """One explicit update of every interior node from the frozen ``V``.

    Ghost values are functions of the stored nodes, so the auxiliary boundary
    condition carries over to the new iterate without extra work.
    """
    out = problem.boundary_values(grid.mesh).copy()
    out[grid.interior] = V[grid.interior] - tau * residual(problem, grid, cfg, kind, V, bounds)
    return out


def pseudo_time_solve(problem: Problem, grid: Grid, cfg: SchemeConfig, kind: SchemeKind,
                      guess: np.ndarray, bounds: CutoffBounds | None = None, tau: float | None = None,
                      tol: float = 1e-10, max_sweeps: int = 200_000) -> SolveOutcome:
    start = time.perf_counter()
    tau = tau_max(problem, grid, cfg) if tau is None else tau
    V = guess.copy()
    V[grid.boundary_mask] = problem.boundary_values(grid.mesh)[grid.boundary_mask]
    norm = np.inf
    for k in range(max_sweeps + 1):
        r = residual(problem, grid, cfg, kind, V, bounds)
        norm = float(np.max(np.abs(r)))
        if norm <= tol or k == max_sweeps:
            break
        V[grid.interior] -= tau * r
    return SolveOutcome(V, norm <= tol, norm, 0, "pseudo-time", sweeps=k,
                        seconds=time.perf_counter() - start, bounds=bounds)


def solve(problem: Problem, grid: Grid, cfg: SchemeConfig, kind: SchemeKind,
          solver: SolverConfig = SolverConfig(), guess: np.ndarray | None = None,
          bounds: CutoffBounds | None = None) -> SolveOutcome:
    """Solve one scheme on one grid.

    Without a guess, Lax-Friedrichs starts from zero and the other schemes
    start from the Lax-Friedrichs solution.  The modified scheme builds its
    band ``U_LF +- c h`` from that solution when ``bounds`` is omitted.
    """
    start = time.perf_counter()
    extra_sweeps = 0
    if kind is not SchemeKind.LAX_FRIEDRICHS and (guess is None or
                                                  (kind is SchemeKind.MODIFIED and bounds is None)):
        lf = solve(problem, grid, cfg, SchemeKind.LAX_FRIEDRICHS, solver)
        if not lf.converged:
            lf.seconds = time.perf_counter() - start
            return lf
        guess = lf.solution if guess is None else guess
        if kind is SchemeKind.MODIFIED and bounds is None:
            bounds = build_band(lf.solution, cfg.cutoff_c, grid.h)
    system = SchemeSystem(problem, grid, cfg, kind, bounds)
    jacobian = lambda w: system.jacobian(w, solver.fd_scale)  # noqa: E731
    v = np.zeros(grid.interior_shape).ravel() if guess is None else system.interior(guess)
    r = system(v)
    norm = _norm(r)
    best = (v, r, norm)
    watch = 0
    method = "newton"
    tau = solver.tau or tau_max(problem, grid, cfg)
    iterations = 0
    while norm > solver.tol and iterations < solver.max_newton:
        iterations += 1
        if watch < solver.stall_window:
            # watchdog phase: full steps may raise the residual for a while,
            # which lets Newton move between pieces of a piecewise-smooth residual
            try:
                w = v - newton_direction(jacobian, v, r)
                rw = system(w)
                nw = _norm(rw)
            except SingularJacobian as exc:
                log.debug("singular Jacobian at iteration %d: %s", iterations, exc)
                nw = np.inf
            if np.isfinite(nw):
                v, r, norm = w, rw, nw
                if norm < best[2]:
                    best, watch = (v, r, norm), 0
                else:
                    watch += 1
                log.debug("%s %s iter %d residual %.3e", problem.name, kind.value, iterations, norm)
                continue
        # stalled: restart from the best iterate with a monotone step
        v, r, norm = best
        try:
            step = newton_step(system, v, jacobian, r, solver)
        except SingularJacobian as exc:
            log.debug("singular Jacobian at iteration %d: %s", iterations, exc)
            step = None
        if step is not None and step.decreased:
            v, r, norm = step.v, step.residual, step.norm
        else:
            method = "hybrid"
            V = system.full(v)
            for _ in range(solver.hybrid_sweeps):
                V = pseudo_sweep(problem, grid, cfg, kind, V, tau, bounds)
            extra_sweeps += solver.hybrid_sweeps
            v = system.interior(V)
            r = system(v)
            norm = _norm(r)
        if norm < best[2]:
            best = (v, r, norm)
        v, r, norm = best
        watch = 0
        log.debug("%s %s iter %d residual %.3e (monotone)", problem.name, kind.value, iterations, norm)
    if norm > best[2]:
        v, r, norm = best
    return SolveOutcome(system.full(v), bool(norm <= solver.tol), norm, iterations, method,
                        sweeps=extra_sweeps, seconds=time.perf_counter() - start, bounds=bounds)
