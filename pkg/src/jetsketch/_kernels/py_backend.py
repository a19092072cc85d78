"""Pure-numpy implementations of the hot jet kernels.

Every function operates on C-contiguous complex128 arrays of shape
(batch, s+1), where row b holds the coefficients of one truncated power
series and column r the coefficient on z^r.  The compiled backend
(`_jetcore`) implements the same signatures with the same accumulation
order, so the two backends agree to the last rounding of each primitive
operation.

Constant-term values of the transcendental gates (exp, log, ... of the
order-0 coefficient) are computed by the caller and passed in, keeping the
recurrences here purely rational.
"""

import numpy as np

NAME = "python"


def mul_trunc(a, b):
    """Truncated product: out[:, r] = sum_{j<=r} a[:, j] * b[:, r-j]."""
    batch, width = a.shape
    out = np.zeros((batch, width), dtype=np.complex128)
    for r in range(width):
        acc = out[:, r]
        for j in range(r + 1):
            acc += a[:, j] * b[:, r - j]
    return out


def reciprocal_series(u, v0):
    """Series of 1/u given v0 = 1/u[:, 0]."""
    batch, width = u.shape
    v = np.empty((batch, width), dtype=np.complex128)
    v[:, 0] = v0
    for r in range(1, width):
        acc = np.zeros(batch, dtype=np.complex128)
        for j in range(1, r + 1):
            acc += u[:, j] * v[:, r - j]
        v[:, r] = -acc * v[:, 0]
    return v


def sqrt_series(u, v0):
    """Series of sqrt(u) given v0 = sqrt(u[:, 0]) (principal branch)."""
    batch, width = u.shape
    v = np.empty((batch, width), dtype=np.complex128)
    v[:, 0] = v0
    for r in range(1, width):
        acc = np.zeros(batch, dtype=np.complex128)
        for j in range(1, r):
            acc += v[:, j] * v[:, r - j]
        v[:, r] = (u[:, r] - acc) / (2.0 * v[:, 0])
    return v


def exp_series(u, v0):
    """Series of exp(u) given v0 = exp(u[:, 0]).

    From v' = v u': r v_r = sum_{j=1..r} j u_j v_{r-j}.
    """
    batch, width = u.shape
    v = np.empty((batch, width), dtype=np.complex128)
    v[:, 0] = v0
    for r in range(1, width):
        acc = np.zeros(batch, dtype=np.complex128)
        for j in range(1, r + 1):
            acc += float(j) * u[:, j] * v[:, r - j]
        v[:, r] = acc / float(r)
    return v


def log_series(u, v0):
    """Series of log(u) given v0 = log(u[:, 0]) (principal branch).

    From u v' = u': r u_r = sum_{j=0..r-1} (r-j) u_j v_{r-j}.
    """
    batch, width = u.shape
    v = np.empty((batch, width), dtype=np.complex128)
    v[:, 0] = v0
    for r in range(1, width):
        acc = np.zeros(batch, dtype=np.complex128)
        for j in range(1, r):
            acc += float(r - j) * u[:, j] * v[:, r - j]
        v[:, r] = (float(r) * u[:, r] - acc) / (float(r) * u[:, 0])
    return v


def tanh_series(u, v0):
    """Series of tanh(u) given v0 = tanh(u[:, 0]).

    Propagates w = 1 - v^2 alongside v: r v_r = sum_{j=1..r} j u_j w_{r-j}.
    """
    batch, width = u.shape
    v = np.empty((batch, width), dtype=np.complex128)
    w = np.empty((batch, width), dtype=np.complex128)
    v[:, 0] = v0
    w[:, 0] = 1.0 - v[:, 0] * v[:, 0]
    for r in range(1, width):
        acc = np.zeros(batch, dtype=np.complex128)
        for j in range(1, r + 1):
            acc += float(j) * u[:, j] * w[:, r - j]
        v[:, r] = acc / float(r)
        acc2 = np.zeros(batch, dtype=np.complex128)
        for j in range(r + 1):
            acc2 += v[:, j] * v[:, r - j]
        w[:, r] = -acc2
    return v


_TWO_OVER_SQRT_PI = 1.1283791670955126


def erf_series(u, v0, g0):
    """Series of erf(u) given v0 = erf(u[:, 0]) and g0 = exp(-u[:, 0]^2).

    Uses v' = (2/sqrt(pi)) exp(-u^2) u': the squared series is formed by
    truncated convolution and exp(-u^2) by the exp recurrence.
    """
    t = mul_trunc(u, u)
    np.negative(t, out=t)
    g = exp_series(t, g0)
    batch, width = u.shape
    v = np.empty((batch, width), dtype=np.complex128)
    v[:, 0] = v0
    for r in range(1, width):
        acc = np.zeros(batch, dtype=np.complex128)
        for j in range(1, r + 1):
            acc += float(j) * u[:, j] * g[:, r - j]
        v[:, r] = _TWO_OVER_SQRT_PI * acc / float(r)
    return v
