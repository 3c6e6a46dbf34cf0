"""Benchmark problems with manufactured solutions.

A Hamiltonian is called as ``H(q, u, x)`` with ``q`` and ``x`` of shape
``(d, ...)`` and ``u`` of shape ``(...)``.  Every zeroth-order term
(including the ``theta u`` part) is folded into ``H``; the schemes add none.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .grid import DomainBox

Hamiltonian = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
PointFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Problem:
    name: str
    domain: DomainBox
    hamiltonian: Hamiltonian
    dirichlet: PointFunction
    exact: PointFunction | None = None
    exact_gradient: PointFunction | None = None
    lip_q: tuple[float, ...] = ()
    lip_u: float = 1.0
    theta_min: float = 1.0
    # points where the exact solution is not differentiable; |kink_distance| < tol excluded
    kink_distance: PointFunction | None = None
    notes: str = field(default="", compare=False)

    @property
    def dim(self) -> int:
        return self.domain.dim

    def __call__(self, q, u, x):
        return self.hamiltonian(q, u, x)

    def boundary_values(self, mesh: np.ndarray) -> np.ndarray:
        return np.asarray(self.dirichlet(mesh), dtype=float)


_UNIT_1D = DomainBox((-1.0,), (1.0,))
_UNIT_2D = DomainBox((-1.0, -1.0), (1.0, 1.0))


def _ex1_1d() -> Problem:
    def u(x):
        return x[0] ** 3 + np.cos(4 * x[0])

    def du(x):
        return np.stack([3 * x[0] ** 2 - 4 * np.sin(4 * x[0])])

    def f(x):
        return (3 * x[0] ** 2 - x[0] + 4) * du(x)[0] + (x[0] ** 2 + 1) * u(x)

    def H(q, v, x):
        return (3 * x[0] ** 2 - x[0] + 4) * q[0] + (x[0] ** 2 + 1) * v - f(x)

    return Problem("1d-ex1", _UNIT_1D, H, u, u, du, lip_q=(8.0,), lip_u=2.0, theta_min=1.0)


def _ex2_1d() -> Problem:
    def u(x):
        return 1 - np.abs(x[0])

    def du(x):
        return np.stack([-np.sign(x[0])])

    # |u_x| + u evaluated on the exact solution away from x = 0
    def f(x):
        return 2 - np.abs(x[0])

    def H(q, v, x):
        return np.abs(q[0]) + v - f(x)

    return Problem("1d-ex2", _UNIT_1D, H, u, u, du, lip_q=(1.0,), lip_u=1.0, theta_min=1.0,
                   kink_distance=lambda x: x[0])


def _exy(x):
    return np.exp(x[0] * x[1])


def _grad_exy(x):
    e = _exy(x)
    return np.stack([x[1] * e, x[0] * e])


def _ex1_2d() -> Problem:
    def f(x):
        e = _exy(x)
        return (x[0] + x[1] + 1) * e

    def H(q, v, x):
        return q[0] + q[1] + v - f(x)

    return Problem("2d-ex1", _UNIT_2D, H, _exy, _exy, _grad_exy, lip_q=(1.0, 1.0))


def _ex2_2d() -> Problem:
    def f(x):
        e = _exy(x)
        return e * np.sqrt(x[0] ** 2 + x[1] ** 2) + e

    def H(q, v, x):
        return np.sqrt(q[0] ** 2 + q[1] ** 2) + v - f(x)

    return Problem("2d-ex2", _UNIT_2D, H, _exy, _exy, _grad_exy, lip_q=(1.0, 1.0))


def _ex3_2d() -> Problem:
    pi = np.pi

    def u(x):
        return np.cos(pi * x[0]) * np.cos(pi * x[1]) - 0.5

    def du(x):
        return np.stack([-pi * np.sin(pi * x[0]) * np.cos(pi * x[1]),
                         -pi * np.cos(pi * x[0]) * np.sin(pi * x[1])])

    def f(x):
        g = du(x)
        w = u(x)
        return np.abs(g[0]) + np.abs(g[1]) + np.abs(w) + 2 * w

    def H(q, v, x):
        return np.abs(q[0]) + np.abs(q[1]) + np.abs(v) + 2 * v - f(x)

    return Problem("2d-ex3", _UNIT_2D, H, u, u, du, lip_q=(1.0, 1.0), lip_u=3.0, theta_min=1.0)


def _ex4_2d() -> Problem:
    def u(x):
        return np.abs(x[0] - 0.2)

    def slope(x):
        # left value at the kink keeps the exact solution a viscosity supersolution
        return np.where(x[0] > 0.2, 1.0, -1.0)

    def du(x):
        return np.stack([slope(x), np.zeros_like(x[1])])

    def f(x):
        s = slope(x)
        return np.abs(s) + 2 * s + u(x)

    def H(q, v, x):
        return np.abs(q[0]) + 2 * q[0] + v - f(x)

    return Problem("2d-ex4", _UNIT_2D, H, u, u, du, lip_q=(3.0, 0.0), lip_u=1.0, theta_min=1.0,
                   kink_distance=lambda x: x[0] - 0.2)


_REGISTRY: dict[str, Callable[[], Problem]] = {
    "1d-ex1": _ex1_1d,
    "1d-ex2": _ex2_1d,
    "2d-ex1": _ex1_2d,
    "2d-ex2": _ex2_2d,
    "2d-ex3": _ex3_2d,
    "2d-ex4": _ex4_2d,
}

PROBLEM_NAMES = tuple(_REGISTRY)


def registry(name: str) -> Problem:
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; choose from {', '.join(PROBLEM_NAMES)}") from None


def verify_manufactured(problem: Problem, samples: int = 1000, seed: int = 0,
                        kink_tol: float = 1e-6) -> float:
    """Max |H(grad u, u, x)| over random interior points for the exact solution."""
    if problem.exact is None or problem.exact_gradient is None:
        raise ValueError(f"{problem.name} has no exact solution to verify")
    rng = np.random.default_rng(seed)
    lo = np.array(problem.domain.lower)[:, None]
    hi = np.array(problem.domain.upper)[:, None]
    x = lo + (hi - lo) * rng.random((problem.dim, samples))
    if problem.kink_distance is not None:
        x = x[:, np.abs(problem.kink_distance(x)) >= kink_tol]
    defect = problem.hamiltonian(problem.exact_gradient(x), problem.exact(x), x)
    return float(np.max(np.abs(defect)))
