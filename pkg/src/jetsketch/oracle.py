"""Brute-force ground truth at tiny scale.

Exact derivative tensors come from evaluating a circuit over the dense
multivariate truncated ring C[z_1..z_n]/(total degree > s) at
x* + (z_1, ..., z_n) and unpacking coefficients; no FFT, no sketching, no
jet recurrences are involved, so this path is independent of the fast one
it checks.  Analytic gates are composed through Taylor coefficients of the
scalar gate computed by mpmath central finite differences in extended
precision, which also backs the univariate derivative oracle used by the
jet tests.

Multi-indices are packed 8 bits per variable into a Python int, so adding
exponent vectors is integer addition; coefficients live in per-total-degree
dict buckets.  Hard guards keep the dense cost in check; callers that know
what they are doing may pass explicit OracleLimits.
"""

import math
from dataclasses import dataclass
from itertools import permutations

import mpmath
import numpy as np

from .circuits import evaluate, polynomial_degree_bound
from .errors import GateDomainError, UsageError

_SHIFT = 8
_MASK = (1 << _SHIFT) - 1


@dataclass(frozen=True)
class OracleLimits:
    max_vars: int = 4
    max_degree: int = 4


DEFAULT_LIMITS = OracleLimits()


def _unpack(key, n):
    return tuple((key >> (_SHIFT * j)) & _MASK for j in range(n))


class MultiPoly:
    """Truncated multivariate polynomial; buckets[d] maps packed multi-index
    of total degree d to its complex coefficient."""

    __slots__ = ("n", "max_degree", "buckets")

    def __init__(self, n, max_degree, buckets=None):
        self.n = n
        self.max_degree = max_degree
        self.buckets = (
            [dict() for _ in range(max_degree + 1)] if buckets is None else buckets
        )

    @classmethod
    def constant(cls, n, max_degree, value):
        p = cls(n, max_degree)
        v = complex(value)
        if v != 0:
            p.buckets[0][0] = v
        return p

    @classmethod
    def variable(cls, n, max_degree, j, center):
        """center + z_j."""
        p = cls.constant(n, max_degree, center)
        if max_degree >= 1:
            p.buckets[1][1 << (_SHIFT * j)] = 1.0 + 0j
        return p

    def _like(self):
        return MultiPoly(self.n, self.max_degree)

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.n, self.max_degree, other)
        out = self._like()
        for d in range(self.max_degree + 1):
            merged = dict(self.buckets[d])
            for key, c in other.buckets[d].items():
                merged[key] = merged.get(key, 0j) + c
            out.buckets[d] = merged
        return out

    __radd__ = __add__

    def __neg__(self):
        out = self._like()
        for d in range(self.max_degree + 1):
            out.buckets[d] = {k: -c for k, c in self.buckets[d].items()}
        return out

    def __sub__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.n, self.max_degree, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return self.scaled(other)
        out = self._like()
        obuckets = out.buckets
        for d1 in range(self.max_degree + 1):
            b1 = self.buckets[d1]
            if not b1:
                continue
            for d2 in range(self.max_degree + 1 - d1):
                b2 = other.buckets[d2]
                if not b2:
                    continue
                target = obuckets[d1 + d2]
                for k1, c1 in b1.items():
                    for k2, c2 in b2.items():
                        key = k1 + k2
                        target[key] = target.get(key, 0j) + c1 * c2
        return out

    __rmul__ = __mul__

    def scaled(self, scalar):
        s = complex(scalar)
        out = self._like()
        for d in range(self.max_degree + 1):
            out.buckets[d] = {k: c * s for k, c in self.buckets[d].items()}
        return out

    def constant_term(self):
        return self.buckets[0].get(0, 0j)

    def coefficient(self, beta):
        d = sum(beta)
        if d > self.max_degree:
            return 0j
        key = 0
        for j, b in enumerate(beta):
            key |= int(b) << (_SHIFT * j)
        return self.buckets[d].get(key, 0j)

    def compose_gate(self, kind):
        """Taylor-compose an analytic gate around the constant term."""
        u0 = self.constant_term()
        coeffs = gate_taylor_coefficients(kind, u0, self.max_degree)
        tail = self._like()
        for d in range(1, self.max_degree + 1):
            tail.buckets[d] = dict(self.buckets[d])
        acc = MultiPoly.constant(self.n, self.max_degree, coeffs[self.max_degree])
        for t in range(self.max_degree - 1, -1, -1):
            acc = acc * tail + coeffs[t]
        return acc


class MultiRing:
    """Ring adapter so circuits and programs evaluate over MultiPoly."""

    name = "multipoly"

    def __init__(self, n, max_degree):
        self.n = n
        self.max_degree = max_degree

    def constant(self, value):
        return MultiPoly.constant(self.n, self.max_degree, value)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def scale(a, c):
        return a.scaled(c)

    @staticmethod
    def unary(kind, a):
        return a.compose_gate(kind)


_GATE_FUNCS = {
    "reciprocal": lambda x: 1 / x,
    "sqrt": mpmath.sqrt,
    "exp": mpmath.exp,
    "log": mpmath.log,
    "tanh": mpmath.tanh,
    "gelu": lambda x: mpmath.mpf("0.5")
    * x
    * (1 + mpmath.erf(x / mpmath.sqrt(2))),
}

_SINGULAR_AT_ZERO = ("reciprocal", "sqrt", "log")


def gate_taylor_coefficients(kind, center, count, dps=40):
    """Taylor coefficients of a gate around `center`, orders 0..count.

    Computed by mpmath finite differences at `dps` decimal digits; serves
    as the recurrence-free reference for gate composition.
    """
    if kind not in _GATE_FUNCS:
        raise UsageError(f"unknown gate kind '{kind}'")
    if kind in _SINGULAR_AT_ZERO and center == 0:
        raise GateDomainError(kind, "singular at constant term 0")
    fn = _GATE_FUNCS[kind]
    with mpmath.workdps(dps):
        z0 = mpmath.mpc(center)
        coeffs = mpmath.taylor(fn, z0, count)
    return np.array([complex(c) for c in coeffs], dtype=np.complex128)


def scalar_derivatives(fn, x0, max_order, dps=40):
    """Derivatives f^(0..max_order)(x0) of a scalar callable or gate kind.

    Central finite differences in extended precision; `fn` may be one of
    the gate names or any mpmath-evaluable callable.
    """
    if isinstance(fn, str):
        coeffs = gate_taylor_coefficients(fn, x0, max_order, dps=dps)
        return np.array(
            [coeffs[r] * math.factorial(r) for r in range(max_order + 1)],
            dtype=np.complex128,
        )
    with mpmath.workdps(dps):
        z0 = mpmath.mpc(x0)
        coeffs = mpmath.taylor(fn, z0, max_order)
    return np.array(
        [complex(coeffs[r]) * math.factorial(r) for r in range(max_order + 1)],
        dtype=np.complex128,
    )


@dataclass(frozen=True)
class TaylorTensors:
    """f^(r)(x*) for r = 0..order; tensors[r] has shape (p,) + (n,)*r."""

    n: int
    num_outputs: int
    order: int
    tensors: tuple
    complete: bool  # degree bound <= order, so nothing exists beyond


def exact_taylor_tensors(f, xstar, order, limits=DEFAULT_LIMITS):
    """Exact derivative tensors of a circuit at x*, orders 0..order."""
    n = f.num_inputs
    if n > limits.max_vars or order > limits.max_degree:
        raise UsageError(
            f"oracle refuses n={n}, order={order}: limits are"
            f" max_vars={limits.max_vars}, max_degree={limits.max_degree}"
            " (pass explicit OracleLimits to override)"
        )
    xstar = np.asarray(xstar, dtype=np.complex128)
    if xstar.shape != (n,):
        raise UsageError(f"base point must have shape ({n},)")
    ring = MultiRing(n, order)
    inputs = [MultiPoly.variable(n, order, j, xstar[j]) for j in range(n)]
    outs = evaluate(f, ring, inputs)
    p = len(outs)

    tensors = []
    for r in range(order + 1):
        shape = (p,) + (n,) * r
        tensor = np.zeros(shape, dtype=np.complex128)
        for idx in np.ndindex(*((n,) * r)):
            beta = [0] * n
            for j in idx:
                beta[j] += 1
            beta_fact = 1.0
            for b in beta:
                beta_fact *= math.factorial(b)
            for out_i in range(p):
                c = outs[out_i].coefficient(beta)
                if c != 0:
                    tensor[(out_i,) + idx] = beta_fact * c
        tensors.append(tensor)

    bound = polynomial_degree_bound(f)
    complete = bound is not None and bound <= order
    return TaylorTensors(
        n=n, num_outputs=p, order=order, tensors=tuple(tensors), complete=complete
    )


def frobenius_profile(tt):
    """(1/r!) ||f^(r)(x*)||_F for r = 0..order."""
    return np.array(
        [
            np.linalg.norm(tt.tensors[r].ravel()) / math.factorial(r)
            for r in range(tt.order + 1)
        ]
    )


@dataclass(frozen=True)
class AlphaBound:
    value: float
    argmax_order: int
    is_lower_bound: bool  # true when tensors beyond `order` may exist


def alpha_exact(tt, gamma):
    """Tightest stability bound over available orders: max_r gamma^r prof_r."""
    if gamma < 0:
        raise UsageError("gamma must be >= 0")
    prof = frobenius_profile(tt)
    best, best_r = 0.0, 1
    for r in range(1, tt.order + 1):
        term = gamma**r * prof[r]
        if term > best:
            best, best_r = term, r
    return AlphaBound(
        value=float(best), argmax_order=best_r, is_lower_bound=not tt.complete
    )


def contract(tensor, vectors):
    """tensor[v_1 x ... x v_r]: plain contraction of the trailing axes."""
    out = tensor
    for v in vectors:
        out = np.tensordot(out, v, axes=([out.ndim - 1], [0]))
    return out


def symmetrize(tensor):
    """Average over all permutations of the axes (small r only)."""
    r = tensor.ndim
    acc = np.zeros_like(tensor)
    perms = list(permutations(range(r)))
    for perm in perms:
        acc += np.transpose(tensor, perm)
    return acc / len(perms)


def symmetric_projector(n, r):
    """Dense projector onto the symmetric subspace of (C^n)^{x r}."""
    dim = n**r
    proj = np.zeros((dim, dim))
    for perm in permutations(range(r)):
        op = np.zeros((dim, dim))
        for idx in np.ndindex(*((n,) * r)):
            src = int(np.ravel_multi_index(idx, (n,) * r))
            dst = int(
                np.ravel_multi_index(tuple(idx[perm[t]] for t in range(r)), (n,) * r)
            )
            op[dst, src] = 1.0
        proj += op
    return proj / math.factorial(r)
