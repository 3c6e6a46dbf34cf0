"""Pure-numpy stencil kernel (fallback for the compiled ``_cstencil``).

Both implementations expose the same ``axis_terms`` entry point and must
agree to round-off; ``tests/test_kernels.py`` checks this.
"""

import numpy as np

LAX_FRIEDRICHS, HIGH_ORDER, MODIFIED = 0, 1, 2
LINEAR, QUADRATIC = 0, 1


def _extend(V, bc):
    # ghost layer on both ends of the middle axis, eliminated through the
    # auxiliary boundary condition
    if bc == LINEAR:
        left = 2.0 * V[:, 0] - V[:, 1]
        right = 2.0 * V[:, -1] - V[:, -2]
    else:
        left = 3.0 * V[:, 0] - 3.0 * V[:, 1] + V[:, 2]
        right = 3.0 * V[:, -1] - 3.0 * V[:, -2] + V[:, -3]
    return np.concatenate([left[:, None], V, right[:, None]], axis=1)


def axis_terms(V, h, bc, kind, visc, moment, lower, upper, grad, lin, clamped):
    """Accumulate the linear stencil part of a scheme along the middle axis.

    All arrays are C-contiguous with shape ``(A, N, B)``; the operating axis
    is the middle one.  Only positions ``1..N-2`` along it are written.

    ``visc`` is the ``beta h^2`` viscosity coefficient and
    ``moment`` is ``gamma h^p``.  ``grad`` receives the central difference,
    ``lin`` is accumulated into, and ``clamped`` gets bit 1 (minus side) /
    bit 2 (plus side) set where the cutoff activated.
    """
    n = V.shape[1]
    E = _extend(V, bc)
    m2 = E[:, : n - 2]
    p2 = E[:, 4:]
    c = V[:, 1:-1]
    m1 = V[:, :-2]
    p1 = V[:, 2:]
    inv = 1.0 / (h * h)
    grad[:, 1:-1] = (p1 - m1) / (2.0 * h)
    d2 = (p1 - 2.0 * c + m1) * inv
    out = lin[:, 1:-1]
    out -= visc * d2
    if kind == LAX_FRIEDRICHS:
        out -= 0.5 * moment * d2
    elif kind == HIGH_ORDER:
        out += moment * (0.25 * inv) * (p2 - 4.0 * p1 + 6.0 * c - 4.0 * m1 + m2)
    else:
        lo = lower[:, 1:-1]
        hi = upper[:, 1:-1]
        lp = 2.0 * p1 - p2
        lm = 2.0 * m1 - m2
        flag = clamped[:, 1:-1]
        flag |= ((lm > hi) | (lm < lo)).astype(np.uint8)
        flag |= (((lp > hi) | (lp < lo)).astype(np.uint8) << 1)
        lp = np.minimum(np.maximum(lp, lo), hi)
        lm = np.minimum(np.maximum(lm, lo), hi)
        out -= 0.5 * moment * d2
        out += moment * (0.5 * inv) * c
        out -= moment * (0.25 * inv) * (lp + lm)
