# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled stencil kernel; mirrors ``hjfd._pystencil.axis_terms``."""

cdef inline double _clip(double v, double lo, double hi) nogil:
    if v > hi:
        return hi
    if v < lo:
        return lo
    return v


def axis_terms(const double[:, :, ::1] V, double h, int bc, int kind,
               double visc, double moment,
               const double[:, :, ::1] lower, const double[:, :, ::1] upper,
               double[:, :, ::1] grad, double[:, :, ::1] lin,
               unsigned char[:, :, ::1] clamped):
    cdef Py_ssize_t A = V.shape[0], N = V.shape[1], B = V.shape[2]
    cdef Py_ssize_t a, k, b
    cdef double inv = 1.0 / (h * h)
    cdef double half_m = 0.5 * moment
    cdef double quarter = moment * (0.25 * inv)
    cdef double half = moment * (0.5 * inv)
    cdef double m2, m1, c, p1, p2, d2, lp, lm, lo, hi, acc
    cdef unsigned char flag
    with nogil:
        for a in range(A):
            for k in range(1, N - 1):
                for b in range(B):
                    c = V[a, k, b]
                    m1 = V[a, k - 1, b]
                    p1 = V[a, k + 1, b]
                    if k >= 2:
                        m2 = V[a, k - 2, b]
                    elif bc == 0:
                        m2 = 2.0 * V[a, 0, b] - V[a, 1, b]
                    else:
                        m2 = 3.0 * V[a, 0, b] - 3.0 * V[a, 1, b] + V[a, 2, b]
                    if k <= N - 3:
                        p2 = V[a, k + 2, b]
                    elif bc == 0:
                        p2 = 2.0 * V[a, N - 1, b] - V[a, N - 2, b]
                    else:
                        p2 = 3.0 * V[a, N - 1, b] - 3.0 * V[a, N - 2, b] + V[a, N - 3, b]
                    grad[a, k, b] = (p1 - m1) / (2.0 * h)
                    d2 = (p1 - 2.0 * c + m1) * inv
                    acc = lin[a, k, b]
                    acc = acc - visc * d2
                    if kind == 0:
                        acc = acc - half_m * d2
                    elif kind == 1:
                        acc = acc + quarter * (p2 - 4.0 * p1 + 6.0 * c - 4.0 * m1 + m2)
                    else:
                        lo = lower[a, k, b]
                        hi = upper[a, k, b]
                        lp = 2.0 * p1 - p2
                        lm = 2.0 * m1 - m2
                        flag = clamped[a, k, b]
                        if lm > hi or lm < lo:
                            flag = flag | 1
                        if lp > hi or lp < lo:
                            flag = flag | 2
                        clamped[a, k, b] = flag
                        acc = acc - half_m * d2
                        acc = acc + half * c
                        acc = acc - quarter * (_clip(lp, lo, hi) + _clip(lm, lo, hi))
                    lin[a, k, b] = acc
