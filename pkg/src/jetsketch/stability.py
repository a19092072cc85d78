"""Stability probing: Monte Carlo estimates of the Taylor-coefficient
Frobenius norms (1/r!) ||f^(r)(0)||_F via random complex directions.

One jet evaluation of order r_max per trial direction yields all orders at
once; the per-trial estimate at order r is sqrt(sym_dim(n, r)) times the
magnitude of the order-r coefficient, whose square is unbiased for the
squared norm.  Trials aggregate by root-mean-square (the unbiased quantity
is the square).  For polynomial circuits the estimates vanish identically
beyond the degree; no Monte Carlo noise there.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .estimator import sym_dim
from .sampling import SeededDirections, normalize_key
from .sketching import sketch


@dataclass(frozen=True)
class StabilityProfile:
    n: int
    r_max: int
    key: bytes
    estimates: np.ndarray  # (r_max, trials), order r at row r-1

    @property
    def trials(self):
        return self.estimates.shape[1]

    def rms(self):
        """Per-order root-mean-square estimate of (1/r!) ||f^(r)(0)||_F."""
        return np.sqrt(np.mean(self.estimates**2, axis=1))

    def log_estimates(self):
        with np.errstate(divide="ignore"):
            return np.log(self.estimates)


def probe(fn, r_max, trials, seed):
    """Estimate the Taylor-norm profile of a 1-output circuit at 0."""
    if fn.num_outputs != 1:
        raise UsageError("stability probe needs a single-output function")
    if r_max < 1:
        raise UsageError("r_max must be >= 1")
    if trials < 1:
        raise UsageError("trials must be >= 1")
    key = normalize_key(seed)
    n = fn.num_inputs
    directions = SeededDirections(key, trials, n)
    zeros = np.zeros(n, dtype=np.complex128)
    sk = sketch(zeros, fn, r_max, trials, directions=directions)
    coeffs = sk.taylor[:, :, 0]  # (trials, r_max+1)
    rows = []
    for r in range(1, r_max + 1):
        scale = math.sqrt(sym_dim(n, r).value)
        rows.append(scale * np.abs(coeffs[:, r]))
    return StabilityProfile(
        n=n, r_max=r_max, key=key, estimates=np.array(rows)
    )


@dataclass(frozen=True)
class AlphaFit:
    value: float
    argmax_order: int
    still_decaying: bool
    note: str


def fit_alpha(profile, gamma):
    """max_r gamma^r * rms_r over the probed orders, with a tail caveat."""
    if gamma < 0:
        raise UsageError("gamma must be >= 0")
    rms = profile.rms()
    best, best_r = 0.0, 1
    for r in range(1, profile.r_max + 1):
        term = gamma**r * rms[r - 1]
        if term > best:
            best, best_r = float(term), r
    if profile.r_max >= 2:
        still_decaying = rms[-1] < rms[-2]
    else:
        still_decaying = False
    if best_r == profile.r_max and best > 0:
        note = (
            f"maximum attained at the probe boundary r={best_r};"
            " orders beyond r_max may dominate"
        )
    elif still_decaying:
        note = "profile still decaying at r_max; tail extrapolation unverified"
    else:
        note = "profile no longer decaying at r_max"
    return AlphaFit(
        value=best, argmax_order=best_r, still_decaying=bool(still_decaying),
        note=note,
    )


def write_profile_csv(profile, path):
    """Columns: r, trial, estimate, log_estimate (natural log)."""
    logs = profile.log_estimates()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r", "trial", "estimate", "log_estimate"])
        for r in range(1, profile.r_max + 1):
            for t in range(profile.trials):
                writer.writerow(
                    [r, t,
                     repr(float(profile.estimates[r - 1, t])),
                     repr(float(logs[r - 1, t]))]
                )
