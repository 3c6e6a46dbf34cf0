"""Pointwise difference operators with ghost elimination.

These are the node-by-node definitions.  The residual assembly in
:mod:`hjfd.schemes` goes through the vectorized kernel in
:mod:`hjfd.stencil` instead; the test-suite cross-checks the two.

``g`` arguments are callables taking a coordinate tuple.  Ghost values are
never stored: every reference to a node one step outside the closed domain
is replaced by its expression under the auxiliary boundary condition.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .grid import Grid, NodeClass, OutOfGrid
from . import stencil

BoundaryData = Callable[[tuple], float]


class BoundaryKind(enum.Enum):
    """Auxiliary boundary condition closing the 5-point stencil.

    ``LINEAR`` sets the second difference to zero at the boundary node,
    ``QUADRATIC`` makes it equal to the one at the adjacent interior node.
    """

    LINEAR = "lin"
    QUADRATIC = "quad"

    @property
    def code(self) -> int:
        return stencil.LINEAR if self is BoundaryKind.LINEAR else stencil.QUADRATIC


@dataclass(frozen=True)
class CutoffBounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        if self.lower.shape != self.upper.shape:
            raise ValueError("bounds must share a shape")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")

    def contains(self, V: np.ndarray, atol: float = 0.0) -> bool:
        return bool(np.all(V >= self.lower - atol) and np.all(V <= self.upper + atol))


def _require_interior(grid: Grid, idx) -> None:
    if grid.classify(idx).kind is NodeClass.BOUNDARY:
        raise ValueError(f"node {tuple(idx)} is a boundary node")


def _neighbor(grid: Grid, idx, axis: int, steps: int) -> tuple[int, ...]:
    out = grid.shift(idx, axis, steps)
    if isinstance(out, OutOfGrid):
        raise IndexError(f"node {tuple(idx)} shifted by {steps} along axis {axis} leaves the grid")
    return out


def diff_sided(V: np.ndarray, grid: Grid, idx, axis: int, sign: int) -> float:
    h = grid.spacing[axis]
    idx = tuple(idx)
    if sign > 0:
        return (V[_neighbor(grid, idx, axis, 1)] - V[idx]) / h
    return (V[idx] - V[_neighbor(grid, idx, axis, -1)]) / h


def gradient_central(V: np.ndarray, grid: Grid, idx) -> np.ndarray:
    return np.array([0.5 * (diff_sided(V, grid, idx, i, 1) + diff_sided(V, grid, idx, i, -1))
                     for i in range(grid.dim)])


def laplacian_h(V: np.ndarray, grid: Grid, idx) -> float:
    idx = tuple(idx)
    total = 0.0
    for i, h in enumerate(grid.spacing):
        total += (V[_neighbor(grid, idx, i, 1)] - 2.0 * V[idx] + V[_neighbor(grid, idx, i, -1)]) / h**2
    return total


def ghost_value(V: np.ndarray, grid: Grid, boundary_idx, axis: int, g: BoundaryData,
                bc: BoundaryKind) -> float:
    """Value at the ghost node one step outward from ``boundary_idx``."""
    info = grid.classify(boundary_idx)
    if info.ghost_axis != axis:
        raise ValueError(f"node {tuple(boundary_idx)} carries no ghost along axis {axis}")
    s = info.inward
    gb = g(grid.coords(boundary_idx))
    v1 = V[grid.shift(boundary_idx, axis, s)]
    if bc is BoundaryKind.LINEAR:
        return 2.0 * gb - v1
    return 3.0 * gb - 3.0 * v1 + V[grid.shift(boundary_idx, axis, 2 * s)]


def node_value(V: np.ndarray, grid: Grid, idx, axis: int, steps: int, g: BoundaryData,
               bc: BoundaryKind) -> float:
    """``V`` at ``idx + steps*e_axis`` with boundary data and ghost closure applied."""
    target = grid.shift(idx, axis, steps)
    if isinstance(target, OutOfGrid):
        if not target.is_ghost:
            raise IndexError("stencil reaches beyond the ghost layer")
        boundary = grid.shift(idx, axis, steps - int(np.sign(steps)))
        return ghost_value(V, grid, boundary, axis, g, bc)
    if grid.classify(target).kind is NodeClass.BOUNDARY:
        return g(grid.coords(target))
    return V[target]


def moment(V: np.ndarray, grid: Grid, idx, g: BoundaryData, bc: BoundaryKind) -> float:
    """``(Delta_2h - Delta_h) V`` at an interior node."""
    _require_interior(grid, idx)
    idx = tuple(idx)
    total = 0.0
    for i, h in enumerate(grid.spacing):
        vals = [node_value(V, grid, idx, i, k, g, bc) if k else V[idx] for k in (-2, -1, 0, 1, 2)]
        total += (vals[4] - 4.0 * vals[3] + 6.0 * vals[2] - 4.0 * vals[1] + vals[0]) / (4.0 * h * h)
    return total


def extrapolation_L(V: np.ndarray, grid: Grid, idx, axis: int, sign: int, g: BoundaryData,
                    bc: BoundaryKind) -> float:
    _require_interior(grid, idx)
    s = 1 if sign > 0 else -1
    return 2.0 * node_value(V, grid, idx, axis, s, g, bc) - node_value(V, grid, idx, axis, 2 * s, g, bc)


def clamp_L(value: float, idx, bounds: CutoffBounds) -> tuple[float, bool]:
    idx = tuple(idx)
    hi = bounds.upper[idx]
    lo = bounds.lower[idx]
    if value > hi:
        return float(hi), True
    if value < lo:
        return float(lo), True
    return float(value), False


def _node_combo(grid: Grid, idx, axis: int, steps: int, bc: BoundaryKind) -> dict[int, float]:
    """Linear combination of stored nodes (flat indices) giving a stencil value."""
    target = grid.shift(idx, axis, steps)
    if not isinstance(target, OutOfGrid):
        return {grid.flat_index(target): 1.0}
    boundary = grid.shift(idx, axis, steps - int(np.sign(steps)))
    s = grid.classify(boundary).inward
    b0 = grid.flat_index(boundary)
    b1 = grid.flat_index(grid.shift(boundary, axis, s))
    if bc is BoundaryKind.LINEAR:
        return {b0: 2.0, b1: -1.0}
    return {b0: 3.0, b1: -3.0, grid.flat_index(grid.shift(boundary, axis, 2 * s)): 1.0}


def staggered_laplacian_row(grid: Grid, idx, bc: BoundaryKind) -> dict[int, float]:
    """Coefficients of ``-Delta_2h`` at an interior node after ghost elimination.

    Keys are flat node indices over the whole grid; entries on boundary nodes
    multiply the Dirichlet data there.
    """
    _require_interior(grid, idx)
    idx = tuple(idx)
    row: dict[int, float] = {}

    def add(combo, w):
        for k, c in combo.items():
            row[k] = row.get(k, 0.0) + w * c

    for i, h in enumerate(grid.spacing):
        w = 1.0 / (4.0 * h * h)
        add({grid.flat_index(idx): 1.0}, 2.0 * w)
        add(_node_combo(grid, idx, i, 2, bc), -w)
        add(_node_combo(grid, idx, i, -2, bc), -w)
    return {k: v for k, v in row.items() if v != 0.0}


def staggered_laplacian_matrix(grid: Grid, bc: BoundaryKind) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """``-Delta_2h`` split into (interior x interior, interior x boundary) blocks.

    Rows and interior columns follow the flat order restricted to interior nodes.
    """
    interior = list(grid.interior_nodes())
    col_of = {grid.flat_index(idx): k for k, idx in enumerate(interior)}
    boundary = [f for f in range(grid.size) if f not in col_of]
    bcol_of = {f: k for k, f in enumerate(boundary)}
    A = sp.lil_matrix((len(interior), len(interior)))
    B = sp.lil_matrix((len(interior), len(boundary)))
    for r, idx in enumerate(interior):
        for f, c in staggered_laplacian_row(grid, idx, bc).items():
            if f in col_of:
                A[r, col_of[f]] = c
            else:
                B[r, bcol_of[f]] = c
    return A.tocsr(), B.tocsr()


def moment_field(V: np.ndarray, grid: Grid, bc: BoundaryKind, backend: str | None = None) -> np.ndarray:
    """Vectorized ``(Delta_2h - Delta_h) V`` at all interior nodes.

    Boundary entries of ``V`` are taken as the Dirichlet data.
    """
    kernel = stencil.BACKENDS[backend or stencil.BACKEND]
    V = np.ascontiguousarray(V, dtype=float)
    lin = np.zeros(grid.shape)
    grad = np.zeros(grid.shape)
    flags = np.zeros(grid.shape, dtype=np.uint8)
    for i, h in enumerate(grid.spacing):
        shape3 = _axis_view_shape(grid.shape, i)
        kernel(V.reshape(shape3), h, bc.code, stencil.HIGH_ORDER, 0.0, 1.0,
               V.reshape(shape3), V.reshape(shape3), grad.reshape(shape3), lin.reshape(shape3),
               flags.reshape(shape3))
    return lin[grid.interior]


def _axis_view_shape(shape: Sequence[int], axis: int) -> tuple[int, int, int]:
    return (int(np.prod(shape[:axis], dtype=int)), shape[axis], int(np.prod(shape[axis + 1:], dtype=int)))
