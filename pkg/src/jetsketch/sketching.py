"""Local sketching of a circuit and evaluation of the sketch.

sketch() evaluates the circuit on x* + z*psi_i over the order-s jet ring
for k random unit directions psi_i, batched so the whole direction
ensemble advances through the circuit in one pass per chunk.  The result
stores, per direction, the s+1 Taylor vectors of the circuit along that
direction; the order-0 row is the circuit value at x* and is bit-identical
across directions by construction.

sketch_eval() recombines the stored projections into an estimate at a
nearby point: the order-r term is sym_dim(n, r) times the aggregated
(median-of-means by default) product <psi_i, x-x*>^r * P[i][r].  The
order-0 term is returned directly from the (validated) constant row, which
is the same value the aggregation would produce in exact arithmetic.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .circuits import JetRing, evaluate
from .errors import GateDomainError, UsageError
from .estimator import aggregate, sym_dim
from .jets import Jet
from .sampling import ExplicitDirections, SeededDirections, normalize_key


@dataclass(frozen=True)
class SketchData:
    """Base point, direction source, and per-direction Taylor vectors."""

    base_point: np.ndarray       # (n,) complex
    directions: object           # SeededDirections | ExplicitDirections
    taylor: np.ndarray           # (k, s+1, p) complex

    @property
    def n(self):
        return self.base_point.shape[0]

    @property
    def k(self):
        return self.taylor.shape[0]

    @property
    def s(self):
        return self.taylor.shape[1] - 1

    @property
    def p(self):
        return self.taylor.shape[2]


def _output_rows(outs, rows, width):
    """Stack output jets to (rows, width, p), broadcasting constants."""
    cols = []
    for jet in outs:
        c = jet.coeffs
        if c.shape != (rows, width):
            c = np.broadcast_to(c, (rows, width))
        cols.append(c)
    return np.stack(cols, axis=-1)


def _sketch_chunk(fn, xstar, order, block, out, start):
    rows = block.shape[0]
    ring = JetRing(order, batch_shape=(rows,))
    inputs = ring.seed_inputs(
        np.broadcast_to(xstar, (rows, xstar.shape[0])), block
    )
    try:
        outs = evaluate(fn, ring, inputs)
    except GateDomainError as err:
        raise err.with_context(
            direction=None if err.direction is None else start + err.direction
        ) from None
    out[start : start + rows] = _output_rows(outs, rows, order + 1)


def sketch(xstar, fn, s, k, seed=None, directions=None, mode="seeded", workers=1):
    """Sketch `fn` at base point x*: k jet evaluations of order s.

    Directions come from `seed` (a 256-bit key) unless an explicit
    DirectionSource is supplied; mode="explicit" materializes seeded
    directions so they persist verbatim.  Output is deterministic given
    the seed, independent of `workers` (chunks write disjoint rows and
    every operation is elementwise along the direction axis).
    """
    if s < 0:
        raise UsageError("jet order s must be >= 0")
    if k < 1:
        raise UsageError("direction count k must be >= 1")
    xstar = np.asarray(xstar, dtype=np.complex128)
    n = fn.num_inputs
    if xstar.shape != (n,):
        raise UsageError(f"base point shape {xstar.shape} != ({n},)")

    if directions is None:
        if seed is None:
            raise UsageError("need a seed or an explicit direction source")
        directions = SeededDirections(normalize_key(seed), k, n)
        if mode == "explicit":
            directions = ExplicitDirections(directions.matrix())
        elif mode != "seeded":
            raise UsageError(f"unknown direction mode '{mode}'")
    else:
        if directions.k != k or directions.n != n:
            raise UsageError(
                f"direction source is ({directions.k}, {directions.n}),"
                f" expected ({k}, {n})"
            )

    taylor = np.empty((k, s + 1, fn.num_outputs), dtype=np.complex128)

    workers = max(1, int(workers))
    chunk = -(-k // workers)
    bounds = [(lo, min(lo + chunk, k)) for lo in range(0, k, chunk)]
    if len(bounds) == 1:
        lo, hi = bounds[0]
        _sketch_chunk(fn, xstar, s, directions.block(lo, hi), taylor, lo)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(
                    _sketch_chunk, fn, xstar, s, directions.block(lo, hi),
                    taylor, lo,
                )
                for lo, hi in bounds
            ]
            for f in futures:
                f.result()

    bad = ~np.isfinite(taylor.real) | ~np.isfinite(taylor.imag)
    if np.any(bad):
        row = int(np.nonzero(bad.reshape(k, -1).any(axis=1))[0][0])
        raise GateDomainError(
            "<arithmetic>", "non-finite sketch coefficients", direction=row
        )
    if k > 1 and not np.array_equal(taylor[1:, 0, :], np.broadcast_to(
            taylor[0, 0, :], (k - 1, taylor.shape[2]))):
        raise UsageError(
            "sketch invariant violated: order-0 rows differ across directions"
        )
    return SketchData(base_point=xstar, directions=directions, taylor=taylor)


def support_inner_products(directions, diff, support):
    """t_i = sum over `support` (ascending) of conj(psi_ij) * diff_j.

    Accumulated column by column so the floating-point result does not
    depend on how many zero coordinates surround the support.
    """
    if support.size == 0:
        return np.zeros(directions.k, dtype=np.complex128)
    cols = directions.unit_components(support)
    t = np.zeros(directions.k, dtype=np.complex128)
    for idx in range(support.size):
        t += np.conj(cols[:, idx]) * diff[support[idx]]
    return t


def combine_orders(taylor, t, n, m, aggregator="mom"):
    """nu = sum_r n[r] * MOM_m({t_i^r * P[i][r]}); order-0 from the constant
    row when it is constant (it is, by construction)."""
    k, width, p = taylor.shape
    if not 1 <= m <= k:
        raise UsageError(f"block count m={m} outside [1, {k}]")
    constant_row = taylor[:, 0, :]
    if np.array_equal(
        constant_row[1:], np.broadcast_to(constant_row[0], (k - 1, p))
    ):
        nu = constant_row[0].copy()
    else:
        nu = np.asarray(aggregate(constant_row, m, aggregator))
    power = np.ones(k, dtype=np.complex128)
    for r in range(1, width):
        power = power * t
        samples = power[:, None] * taylor[:, r, :]
        nu = nu + sym_dim(n, r).value * np.asarray(
            aggregate(samples, m, aggregator)
        )
    return nu


def sketch_eval(sk, x, m, aggregator="mom"):
    """Estimate f(x) from a sketch of f at x* (Algorithm: EVAL)."""
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (sk.n,):
        raise UsageError(f"point shape {x.shape} != ({sk.n},)")
    diff = x - sk.base_point
    support = np.nonzero(diff)[0]
    t = support_inner_products(sk.directions, diff, support)
    return combine_orders(sk.taylor, t, sk.n, m, aggregator)
