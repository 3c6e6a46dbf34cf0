"""Uniform tensor-product grids on a d-rectangle.

Nodes are addressed by 0-based multi-indices ``(a_1, ..., a_d)``; grid
functions are ``numpy`` arrays of shape ``grid.shape``.  The flat node
ordering runs with axis 1 fastest (Fortran order on ``grid.shape``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

MIN_NODES = 5


@dataclass(frozen=True)
class DomainBox:
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        lower = tuple(float(a) for a in self.lower)
        upper = tuple(float(b) for b in self.upper)
        if len(lower) != len(upper) or not lower:
            raise ValueError("lower and upper bounds must have the same positive length")
        for i, (a, b) in enumerate(zip(lower, upper)):
            if not a < b:
                raise ValueError(f"axis {i}: need lower < upper, got {a} >= {b}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @classmethod
    def cube(cls, a: float, b: float, dim: int) -> "DomainBox":
        return cls((a,) * dim, (b,) * dim)


class NodeClass(enum.Enum):
    BOUNDARY = "boundary"
    RING = "ring"
    DEEP_INTERIOR = "deep_interior"


@dataclass(frozen=True)
class NodeInfo:
    """Classification of a node.

    ``ghost_axis``/``inward`` are set only for boundary nodes that belong to
    the ghost-carrying set of exactly one axis (corners carry no ghost).
    """

    kind: NodeClass
    ghost_axis: int | None = None
    inward: int = 0


@dataclass(frozen=True)
class Ghost:
    node: tuple[int, ...]
    axis: int
    inward: int
    coord: tuple[float, ...]


@dataclass(frozen=True)
class OutOfGrid:
    """Result of a shift that leaves the node set.

    ``distance`` counts the steps beyond the boundary layer along ``axis``
    (1 means the ghost layer).
    """

    axis: int
    distance: int

    @property
    def is_ghost(self) -> bool:
        return self.distance == 1


class Grid:
    def __init__(self, domain: DomainBox, counts: Sequence[int]):
        counts = tuple(int(n) for n in counts)
        if len(counts) != domain.dim:
            raise ValueError(f"expected {domain.dim} node counts, got {len(counts)}")
        for i, n in enumerate(counts):
            if n < MIN_NODES:
                raise ValueError(f"axis {i}: need at least {MIN_NODES} nodes, got {n}")
        self.domain = domain
        self.shape = counts
        self.spacing = tuple((b - a) / (n - 1) for a, b, n in zip(domain.lower, domain.upper, counts))
        self.h = max(self.spacing)

    def __repr__(self):
        return f"Grid(shape={self.shape}, spacing={self.spacing})"

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def interior_shape(self) -> tuple[int, ...]:
        return tuple(n - 2 for n in self.shape)

    @property
    def interior(self) -> tuple[slice, ...]:
        return (slice(1, -1),) * self.dim

    @cached_property
    def axes(self) -> tuple[np.ndarray, ...]:
        # affine formula, not cumulative sums, so boundary coordinates are exact
        out = []
        for a, b, n, h in zip(self.domain.lower, self.domain.upper, self.shape, self.spacing):
            x = a + np.arange(n) * h
            x[-1] = b
            x.setflags(write=False)
            out.append(x)
        return tuple(out)

    @cached_property
    def mesh(self) -> np.ndarray:
        """Node coordinates, shape ``(d, *shape)``."""
        mesh = np.stack(np.meshgrid(*self.axes, indexing="ij"))
        mesh.setflags(write=False)
        return mesh

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        mask = np.ones(self.shape, dtype=bool)
        mask[self.interior] = False
        mask.setflags(write=False)
        return mask

    def coords(self, idx: Sequence[int]) -> tuple[float, ...]:
        self._check(idx)
        return tuple(float(self.mesh[(i, *idx)]) for i in range(self.dim))

    def flat_index(self, idx: Sequence[int]) -> int:
        self._check(idx)
        return int(np.ravel_multi_index(tuple(idx), self.shape, order="F"))

    def multi_index(self, flat: int) -> tuple[int, ...]:
        if not 0 <= flat < self.size:
            raise IndexError(f"flat index {flat} out of range for {self.size} nodes")
        return tuple(int(k) for k in np.unravel_index(flat, self.shape, order="F"))

    def shift(self, idx: Sequence[int], axis: int, steps: int) -> tuple[int, ...] | OutOfGrid:
        self._check(idx)
        k = idx[axis] + steps
        n = self.shape[axis]
        if k < 0:
            return OutOfGrid(axis, -k)
        if k >= n:
            return OutOfGrid(axis, k - n + 1)
        out = list(idx)
        out[axis] = k
        return tuple(out)

    def classify(self, idx: Sequence[int]) -> NodeInfo:
        self._check(idx)
        on_boundary = [i for i, (k, n) in enumerate(zip(idx, self.shape)) if k in (0, n - 1)]
        if on_boundary:
            if len(on_boundary) == 1:
                i = on_boundary[0]
                return NodeInfo(NodeClass.BOUNDARY, ghost_axis=i, inward=1 if idx[i] == 0 else -1)
            return NodeInfo(NodeClass.BOUNDARY)
        if any(k in (1, n - 2) for k, n in zip(idx, self.shape)):
            return NodeInfo(NodeClass.RING)
        return NodeInfo(NodeClass.DEEP_INTERIOR)

    def nodes(self) -> Iterator[tuple[int, ...]]:
        """All multi-indices in flat (axis 1 fastest) order."""
        for flat in range(self.size):
            yield self.multi_index(flat)

    def interior_nodes(self) -> Iterator[tuple[int, ...]]:
        for idx in self.nodes():
            if self.classify(idx).kind is not NodeClass.BOUNDARY:
                yield idx

    def ghosts(self) -> list[Ghost]:
        out = []
        for idx in self.nodes():
            info = self.classify(idx)
            if info.ghost_axis is None:
                continue
            i = info.ghost_axis
            x = list(self.coords(idx))
            x[i] -= info.inward * self.spacing[i]
            out.append(Ghost(idx, i, info.inward, tuple(x)))
        return out

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)

    def ones(self) -> np.ndarray:
        return np.ones(self.shape)

    def _check(self, idx: Sequence[int]) -> None:
        if len(idx) != self.dim or any(not 0 <= k < n for k, n in zip(idx, self.shape)):
            raise IndexError(f"index {tuple(idx)} out of range for grid of shape {self.shape}")


def build_grid(domain: DomainBox, counts: Sequence[int] | int) -> Grid:
    if isinstance(counts, (int, np.integer)):
        counts = (int(counts),) * domain.dim
    return Grid(domain, counts)
