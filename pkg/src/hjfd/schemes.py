"""Residuals of the Lax-Friedrichs, high-order and cutoff-modified schemes.

All three share ``H_h[V] = -beta h^2 Delta_h V + H(grad_h V, V, x)`` and add
a scheme-specific stencil term:

* Lax-Friedrichs: ``-(gamma/2) h^p Delta_h V``
* high order:     ``gamma h^p (Delta_2h - Delta_h) V``
* modified:       the high-order term regrouped around the extrapolations
  ``L+- V = 2 V(+-1) - V(+-2)``, each clamped to the band ``[lower, upper]``.

Residuals are returned on interior nodes only; boundary entries of ``V``
are read as the Dirichlet data.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import stencil
from .grid import Grid
from .operators import BoundaryKind, CutoffBounds, _axis_view_shape
from .problems import Problem


class SchemeKind(enum.Enum):
    LAX_FRIEDRICHS = "lf"
    HIGH_ORDER = "ho"
    MODIFIED = "mod"

    @property
    def code(self) -> int:
        return {"lf": stencil.LAX_FRIEDRICHS, "ho": stencil.HIGH_ORDER, "mod": stencil.MODIFIED}[self.value]


def default_gamma(dim: int) -> float:
    return 10.0 if dim == 1 else 5.0


@dataclass(frozen=True)
class SchemeConfig:
    beta: float = 0.0
    gamma: float = 10.0
    p: float = 1.0
    bc: BoundaryKind = BoundaryKind.LINEAR
    cutoff_c: float = 10.0

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.cutoff_c <= 0:
            raise ValueError(f"cutoff_c must be > 0, got {self.cutoff_c}")
        if isinstance(self.bc, str):
            object.__setattr__(self, "bc", BoundaryKind(self.bc))

    @classmethod
    def for_dimension(cls, dim: int, **kwargs) -> "SchemeConfig":
        kwargs.setdefault("gamma", default_gamma(dim))
        return cls(**kwargs)

    def with_(self, **kwargs) -> "SchemeConfig":
        return replace(self, **kwargs)


@dataclass
class Evaluation:
    residual: np.ndarray
    # bit 1: L- clamped, bit 2: L+ clamped; one uint8 per (axis, interior node)
    clamped: np.ndarray | None = field(default=None, repr=False)


def evaluate(problem: Problem, grid: Grid, cfg: SchemeConfig, kind: SchemeKind, V: np.ndarray,
             bounds: CutoffBounds | None = None, backend: str | None = None) -> Evaluation:
    """Residual on the interior nodes (shape ``grid.interior_shape``)."""
    if kind is SchemeKind.MODIFIED and bounds is None:
        raise ValueError("the modified scheme needs cutoff bounds")
    kernel = stencil.BACKENDS[backend or stencil.BACKEND]
    V = np.ascontiguousarray(V, dtype=float)
    if V.shape != grid.shape:
        raise ValueError(f"grid function has shape {V.shape}, grid is {grid.shape}")
    h = grid.h
    visc = cfg.beta * h * h
    moment = cfg.gamma * h**cfg.p
    lin = np.zeros(grid.shape)
    grad = np.zeros((grid.dim, *grid.shape))
    if kind is SchemeKind.MODIFIED:
        lower = np.ascontiguousarray(bounds.lower, dtype=float)
        upper = np.ascontiguousarray(bounds.upper, dtype=float)
        flags = np.zeros((grid.dim, *grid.shape), dtype=np.uint8)
    else:
        lower = upper = V
        flags = np.zeros((1, *grid.shape), dtype=np.uint8)
    for i, hi in enumerate(grid.spacing):
        s3 = _axis_view_shape(grid.shape, i)
        kernel(V.reshape(s3), hi, cfg.bc.code, kind.code, visc, moment,
               lower.reshape(s3), upper.reshape(s3), grad[i].reshape(s3), lin.reshape(s3),
               flags[min(i, len(flags) - 1)].reshape(s3))
    inner = grid.interior
    every = (slice(None),) + inner
    r = problem.hamiltonian(grad[every], V[inner], grid.mesh[every]) + lin[inner]
    clamped = flags[every] if kind is SchemeKind.MODIFIED else None
    return Evaluation(np.asarray(r, dtype=float), clamped)


def residual(problem: Problem, grid: Grid, cfg: SchemeConfig, kind: SchemeKind, V: np.ndarray,
             bounds: CutoffBounds | None = None, backend: str | None = None) -> np.ndarray:
    return evaluate(problem, grid, cfg, kind, V, bounds, backend).residual


def _at(r: np.ndarray, idx) -> float:
    return float(r[tuple(k - 1 for k in idx)])


def residual_lf(problem: Problem, grid: Grid, cfg: SchemeConfig, V: np.ndarray, idx) -> float:
    return _at(residual(problem, grid, cfg, SchemeKind.LAX_FRIEDRICHS, V), idx)


def residual_ho(problem: Problem, grid: Grid, cfg: SchemeConfig, V: np.ndarray, idx) -> float:
    return _at(residual(problem, grid, cfg, SchemeKind.HIGH_ORDER, V), idx)


def residual_modified(problem: Problem, grid: Grid, cfg: SchemeConfig, bounds: CutoffBounds,
                      V: np.ndarray, idx) -> float:
    return _at(residual(problem, grid, cfg, SchemeKind.MODIFIED, V, bounds), idx)


def build_band(U_lf: np.ndarray, c: float, h: float) -> CutoffBounds:
    if c <= 0:
        raise ValueError(f"band radius multiplier must be positive, got {c}")
    return CutoffBounds(U_lf - c * h, U_lf + c * h)


@dataclass
class CutoffReport:
    active: bool
    # (0-based node index, axis, side) with side -1 for L-, +1 for L+
    activations: list[tuple[tuple[int, ...], int, int]]

    @property
    def label(self) -> str:
        return "yes" if self.active else "no"


def cutoff_report(problem: Problem, grid: Grid, cfg: SchemeConfig, bounds: CutoffBounds,
                  V: np.ndarray) -> CutoffReport:
    ev = evaluate(problem, grid, cfg, SchemeKind.MODIFIED, V, bounds)
    hits = []
    for axis, flags in enumerate(ev.clamped):
        for pos in zip(*np.nonzero(flags)):
            node = tuple(int(k) + 1 for k in pos)
            f = flags[pos]
            if f & 1:
                hits.append((node, axis, -1))
            if f & 2:
                hits.append((node, axis, 1))
    return CutoffReport(bool(hits), hits)


def sample_lip_q(problem: Problem, grid: Grid, q_range: float = 2.0, u_range: float = 2.0,
                 points: int = 5, delta: float = 1e-6) -> np.ndarray:
    """Sampled sup |dH/dq_i| on a coarse (q, u, x) lattice."""
    d = grid.dim
    xs = [ax[np.linspace(0, len(ax) - 1, min(points, len(ax))).astype(int)] for ax in grid.axes]
    qs = [np.linspace(-q_range, q_range, points)] * d
    us = np.linspace(-u_range, u_range, 3)
    mesh = np.meshgrid(*qs, us, *xs, indexing="ij")
    q = np.stack(mesh[:d]).reshape(d, -1)
    u = mesh[d].ravel()
    x = np.stack(mesh[d + 1:]).reshape(d, -1)
    out = np.zeros(d)
    for i in range(d):
        e = np.zeros((d, 1))
        e[i] = delta
        slope = (problem.hamiltonian(q + e, u, x) - problem.hamiltonian(q - e, u, x)) / (2 * delta)
        out[i] = np.max(np.abs(slope))
    return out


def check_monotonicity(problem: Problem, grid: Grid, cfg: SchemeConfig) -> bool:
    """Warn when ``gamma`` looks too small for a monotone Lax-Friedrichs part.

    Monotonicity of ``H_h - (gamma/2) h^p Delta_h`` in the neighbours needs
    ``gamma h^p >= |dH/dq_i| h_i`` on every axis.
    """
    lip = np.maximum(np.asarray(problem.lip_q or np.zeros(grid.dim), dtype=float),
                     sample_lip_q(problem, grid))
    need = lip * np.asarray(grid.spacing)
    have = cfg.gamma * grid.h**cfg.p + 2 * cfg.beta * grid.h**2
    ok = bool(np.all(have >= need * (1 - 1e-12)))
    if not ok:
        warnings.warn(
            f"gamma={cfg.gamma} may be too small for a monotone Lax-Friedrichs part on {problem.name}: "
            f"sampled |dH/dq| up to {lip.max():.3g}",
            RuntimeWarning,
            stacklevel=2,
        )
    return ok
