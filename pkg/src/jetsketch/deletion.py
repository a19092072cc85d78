"""Deletion-prediction scheme: precompute on the trainer, predict per
measurement, and the closed-form parameter selection.

Precomputation sketches the learning algorithm at the all-zero downweight
vector and never sees the measurement.  Prediction pushes a measurement
circuit through the stored per-direction Taylor vectors over the jet ring,
which reproduces, bit for bit, the sketch that would have been built from
the composed circuit, and then evaluates that sketch at the deletion
indicator.
"""

import math
from dataclasses import dataclass

import numpy as np

from .circuits import JetRing, evaluate
from .errors import GateDomainError, UsageError
from .jets import Jet
from .sketching import SketchData, combine_orders, sketch, support_inner_products


@dataclass(frozen=True)
class DeletionSet:
    """Sorted, deduplicated 1-based training-example indices."""

    indices: tuple

    @classmethod
    def of(cls, values, n):
        idx = sorted(set(int(v) for v in values))
        for v in idx:
            if not 1 <= v <= n:
                raise UsageError(f"deletion index {v} outside [1, {n}]")
        return cls(indices=tuple(idx))

    @property
    def d(self):
        return len(self.indices)

    def indicator(self, n, weight=1.0):
        w = np.zeros(n, dtype=np.complex128)
        for v in self.indices:
            w[v - 1] = weight
        return w

    def zero_based(self):
        return np.array([v - 1 for v in self.indices], dtype=np.intp)


@dataclass(frozen=True)
class ParameterChoice:
    epsilon: float
    delta: float
    s: int
    m: int
    k: int


def select_parameters(epsilon, delta):
    """s = ceil(log4(2/eps)), m = ceil(8 ln(2s/delta)), k = ceil(16 m/eps^2)."""
    if not 0 < epsilon < 1:
        raise UsageError(f"epsilon must be in (0, 1), got {epsilon}")
    if not 0 < delta < 1:
        raise UsageError(f"delta must be in (0, 1), got {delta}")
    target = 2.0 / epsilon
    s = 0
    while 4.0**s < target:
        s += 1
    s = max(s, 1)
    m = math.ceil(8.0 * math.log(2.0 * s / delta))
    k = math.ceil(16.0 * m / epsilon**2)
    return ParameterChoice(epsilon=epsilon, delta=delta, s=s, m=m, k=k)


def error_envelope(s, m, k, alpha_value):
    """(4^-s + sqrt(4m/k)) * alpha: the high-probability error bound."""
    return (4.0 ** (-s) + math.sqrt(4.0 * m / k)) * alpha_value


def precompute(trainer, s, k, seed=None, directions=None, mode="seeded",
               workers=1):
    """Sketch the trainer at the all-zero downweight vector."""
    zeros = np.zeros(trainer.num_inputs, dtype=np.complex128)
    return sketch(
        zeros, trainer, s, k, seed=seed, directions=directions, mode=mode,
        workers=workers,
    )


def predict(sk, deletion, phi, m, downweight=1.0, aggregator="mom"):
    """Estimate phi(trainer(downweight * 1_D)) from precomputed data.

    Returns the complex estimate; its real part is the measurement
    prediction and |imag| is a noise diagnostic (the ground truth is real
    for real training pipelines).
    """
    if phi.num_inputs != sk.p:
        raise UsageError(
            f"measurement takes {phi.num_inputs} inputs, sketch has p={sk.p}"
        )
    if phi.num_outputs != 1:
        raise UsageError("measurement must have exactly 1 output")
    if not isinstance(deletion, DeletionSet):
        deletion = DeletionSet.of(deletion, sk.n)

    ring = JetRing(sk.s, batch_shape=(sk.k,))
    params = [Jet(np.ascontiguousarray(sk.taylor[:, :, j])) for j in range(sk.p)]
    try:
        out = evaluate(phi, ring, params)[0]
    except GateDomainError as err:
        raise err.with_context() from None
    q = out.coeffs
    if q.shape != (sk.k, sk.s + 1):
        q = np.broadcast_to(q, (sk.k, sk.s + 1))
    q = q[:, :, None]

    ones = np.ones(sk.n, dtype=np.complex128)
    t = support_inner_products(sk.directions, ones, deletion.zero_based())
    t = t * downweight
    nu = combine_orders(q, t, sk.n, m, aggregator)
    return complex(nu[0])
