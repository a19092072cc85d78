"""Symmetric-subspace combinatorics and robust aggregation.

sym_dim(n, r) is the dimension of the symmetric subspace of (C^n)^{x r},
computed in floating point via the product form n(n+1)...(n+r-1)/r! so
that training-set-sized n cannot overflow integers; the value is exact as
long as it is below 2^53.

median_of_means partitions samples in sample order into m blocks (the
first k mod m blocks get the extra element), averages within blocks, and
takes the coordinatewise median of the real and imaginary parts
separately, averaging the two middle order statistics for even m.
"""

from typing import NamedTuple

import numpy as np

from .errors import UsageError


class SymDim(NamedTuple):
    n: int
    r: int
    value: float


def sym_dim(n, r):
    """binom(n+r-1, r) as a float, exact below 2^53."""
    if n < 1 or r < 0:
        raise UsageError(f"sym_dim needs n >= 1 and r >= 0, got n={n}, r={r}")
    value = 1.0
    for t in range(1, r + 1):
        value *= (n + t - 1) / t
    if not np.isfinite(value):
        raise UsageError(
            f"sym_dim({n}, {r}) overflows float64; work in the log domain"
        )
    return SymDim(n, r, value)


def _block_means(samples, m):
    k = samples.shape[0]
    if k == 0:
        raise UsageError("empty sample batch")
    if not 1 <= m <= k:
        raise UsageError(f"block count m={m} outside [1, {k}]")
    q, rem = divmod(k, m)
    if rem == 0:
        return samples.reshape((m, q) + samples.shape[1:]).mean(axis=1)
    sizes = np.array([q + 1] * rem + [q] * (m - rem), dtype=np.float64)
    starts = np.zeros(m, dtype=np.intp)
    np.cumsum(sizes[:-1], out=starts[1:])
    sums = np.add.reduceat(samples, starts, axis=0)
    return sums / sizes.reshape((m,) + (1,) * (samples.ndim - 1))


def median_of_means(samples, m):
    """Coordinatewise complex median of m block means."""
    samples = np.asarray(samples, dtype=np.complex128)
    means = _block_means(samples, m)
    return np.median(means.real, axis=0) + 1j * np.median(means.imag, axis=0)


def aggregate(samples, m, method="mom"):
    """MOM by default; plain mean available for experimentation."""
    if method == "mom":
        return median_of_means(samples, m)
    if method == "mean":
        samples = np.asarray(samples, dtype=np.complex128)
        if samples.shape[0] == 0:
            raise UsageError("empty sample batch")
        return samples.mean(axis=0)
    raise UsageError(f"unknown aggregator '{method}'")


def rank1_projection_estimate(coeff, psi, x, xstar, r, n):
    """n[r] * coeff * <psi, x - xstar>^r  (conjugate-linear first slot).

    With coeff = (1/r!) f^(r)(x*)[psi^{x r}] for Haar psi this is unbiased
    for (1/r!) f^(r)(x*)[(x - x*)^{x r}].
    """
    psi = np.asarray(psi, dtype=np.complex128)
    diff = np.asarray(x, dtype=np.complex128) - np.asarray(
        xstar, dtype=np.complex128
    )
    t = np.conj(psi) @ diff if psi.ndim == 1 else psi.conj() @ diff
    scale = sym_dim(n, r).value * t**r
    coeff = np.asarray(coeff, dtype=np.complex128)
    if coeff.ndim > np.ndim(scale):
        return coeff * np.reshape(scale, np.shape(scale) + (1,))
    return coeff * scale
