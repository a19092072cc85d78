"""Truncated complex power series ("jets") and their analytic gates.

A jet of order s is an element of C[z]/(z^{s+1}), stored as a complex128
coefficient array whose last axis has length s+1.  Leading axes are an
elementwise batch: a (k, s+1) array holds k independent ring elements that
all operations advance in lockstep.  Arithmetic on jets of order s is
order-s forward-mode automatic differentiation.

Multiplication uses direct truncated convolution below FFT_THRESHOLD and
an FFT product (next power-of-two padding, complex-to-complex) at or above
it; the FFT path agrees with the convolution to ~1e-15 relative and the
threshold keeps the convolution's exact-zero and bit-reproducibility
properties for the small orders used everywhere outside stress tests.

Unary gates (reciprocal, sqrt, exp, log, tanh, gelu) act by composing the
gate's Taylor expansion around the constant term of the input; constant
terms are evaluated with numpy/scipy scalar functions and the higher
coefficients by the rational recurrences in the kernel backend.
"""

import numpy as np
import scipy.special

from ._kernels import backend
from .errors import GateDomainError, UsageError

FFT_THRESHOLD = 32

GATE_KINDS = ("reciprocal", "sqrt", "exp", "log", "tanh", "gelu")

_INV_SQRT2 = 2.0 ** -0.5


class Jet:
    """One truncated power series, or a batch of them sharing an order.

    coeffs[..., r] is the coefficient on z^r.  Instances are treated as
    immutable; operations return fresh jets.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        arr = np.asarray(coeffs, dtype=np.complex128)
        if arr.ndim == 0:
            raise UsageError("jet coefficients need at least the z^0 axis")
        self.coeffs = arr

    @property
    def order(self):
        return self.coeffs.shape[-1] - 1

    @property
    def batch_shape(self):
        return self.coeffs.shape[:-1]

    @classmethod
    def constant(cls, value, order, batch_shape=()):
        c = np.zeros(batch_shape + (order + 1,), dtype=np.complex128)
        c[..., 0] = value
        return cls(c)

    @classmethod
    def variable(cls, value, direction, order, batch_shape=()):
        """Jet value + direction*z (the forward-mode seed)."""
        c = np.zeros(batch_shape + (order + 1,), dtype=np.complex128)
        c[..., 0] = value
        if order >= 1:
            c[..., 1] = direction
        return cls(c)

    def truncated(self, order):
        if order > self.order:
            raise UsageError(f"cannot truncate order {self.order} jet to {order}")
        return Jet(self.coeffs[..., : order + 1].copy())

    def constant_term(self):
        return self.coeffs[..., 0].copy()

    def __repr__(self):
        return f"Jet(order={self.order}, batch={self.batch_shape})"

    # Operator sugar used by ring-generic programs.  Scalars (python
    # numbers, 0-d arrays) lift to constants; adding touches only the z^0
    # coefficient and scaling avoids the convolution entirely.
    def __add__(self, other):
        if isinstance(other, Jet):
            return jet_add(self, other)
        return _shift(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            return jet_sub(self, other)
        return _shift(self, -np.asarray(other, dtype=np.complex128))

    def __rsub__(self, other):
        return _shift(-self, other)

    def __mul__(self, other):
        if isinstance(other, Jet):
            return jet_mul(self, other)
        return jet_scale(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return Jet(-self.coeffs)


def _shift(a, scalar):
    c = a.coeffs.copy()
    c[..., 0] += scalar
    return Jet(c)


def _check_orders(a, b, op):
    if a.order != b.order:
        raise UsageError(
            f"{op}: mismatched jet orders {a.order} and {b.order}"
        )


def jet_add(a, b):
    _check_orders(a, b, "jet_add")
    return Jet(a.coeffs + b.coeffs)


def jet_sub(a, b):
    _check_orders(a, b, "jet_sub")
    return Jet(a.coeffs - b.coeffs)


def jet_scale(a, scalar):
    """Multiply by a ring constant (no convolution)."""
    return Jet(a.coeffs * np.asarray(scalar, dtype=np.complex128))


def _as_kernel_operands(a, b):
    """Broadcast two coefficient arrays and flatten to (batch, s+1)."""
    width = a.shape[-1]
    shape = np.broadcast_shapes(a.shape[:-1], b.shape[:-1])
    af = np.ascontiguousarray(
        np.broadcast_to(a, shape + (width,)), dtype=np.complex128
    ).reshape(-1, width)
    bf = np.ascontiguousarray(
        np.broadcast_to(b, shape + (width,)), dtype=np.complex128
    ).reshape(-1, width)
    return af, bf, shape


def jet_mul(a, b):
    _check_orders(a, b, "jet_mul")
    if a.order < FFT_THRESHOLD:
        af, bf, shape = _as_kernel_operands(a.coeffs, b.coeffs)
        out = backend.mul_trunc(af, bf)
        return Jet(out.reshape(shape + (a.order + 1,)))
    return Jet(_mul_fft(a.coeffs, b.coeffs))


def _mul_fft(ac, bc):
    width = ac.shape[-1]
    size = 1
    while size < 2 * width - 1:
        size *= 2
    fa = np.fft.fft(ac, n=size, axis=-1)
    fb = np.fft.fft(bc, n=size, axis=-1)
    prod = np.fft.ifft(fa * fb, axis=-1)
    return np.ascontiguousarray(prod[..., :width])


def jet_mul_naive(a, b):
    """Direct truncated convolution regardless of order (test oracle path)."""
    _check_orders(a, b, "jet_mul")
    af, bf, shape = _as_kernel_operands(a.coeffs, b.coeffs)
    out = backend.mul_trunc(af, bf)
    return Jet(out.reshape(shape + (a.order + 1,)))


def jet_pow(a, exponent):
    """Integer power by repeated squaring."""
    if exponent < 0:
        return jet_pow(jet_compose_unary("reciprocal", a), -exponent)
    result = Jet.constant(1.0, a.order, a.batch_shape)
    base = a
    e = exponent
    while e:
        if e & 1:
            result = jet_mul(result, base)
        e >>= 1
        if e:
            base = jet_mul(base, base)
    return result


def _first_bad(mask):
    idx = np.nonzero(np.atleast_1d(mask))
    return int(idx[0][0]) if idx[0].size else None


def _check_gate_value(kind, values, what="constant term"):
    bad = ~np.isfinite(values.real) | ~np.isfinite(values.imag)
    if np.any(bad):
        raise GateDomainError(
            kind,
            f"non-finite {what}",
            direction=_first_bad(bad),
        )


def _check_nonzero(kind, u0):
    bad = u0 == 0
    if np.any(bad):
        raise GateDomainError(
            kind,
            "singular at constant term 0",
            direction=_first_bad(bad),
        )


def apply_gate_scalar(kind, x):
    """Evaluate a gate on plain complex values (the order-0 semantics)."""
    x = np.asarray(x, dtype=np.complex128)
    with np.errstate(all="ignore"):  # non-finite results raise below
        if kind == "reciprocal":
            _check_nonzero(kind, x)
            out = 1.0 / x
        elif kind == "sqrt":
            _check_nonzero(kind, x)
            out = np.sqrt(x)
        elif kind == "exp":
            out = np.exp(x)
        elif kind == "log":
            _check_nonzero(kind, x)
            out = np.log(x)
        elif kind == "tanh":
            out = np.tanh(x)
        elif kind == "gelu":
            out = 0.5 * x * (1.0 + scipy.special.erf(x * _INV_SQRT2))
        else:
            raise UsageError(f"unknown gate kind '{kind}'")
    _check_gate_value(kind, out, what="gate value")
    return out


def _flat(coeffs):
    width = coeffs.shape[-1]
    return (
        np.ascontiguousarray(coeffs, dtype=np.complex128).reshape(-1, width),
        coeffs.shape[:-1],
    )


def jet_compose_unary(kind, a):
    """Apply an analytic gate to a jet by Taylor composition.

    The result equals the degree-s truncation of the gate applied to the
    power series a; singularities at the constant term raise
    GateDomainError identifying the gate (callers add node/direction).
    """
    if kind not in GATE_KINDS:
        raise UsageError(f"unknown gate kind '{kind}'")
    uf, shape = _flat(a.coeffs)
    u0 = uf[:, 0]
    width = a.order + 1

    if kind == "gelu":
        # gelu(x) = 0.5 x (1 + erf(x/sqrt(2))): erf series composed with
        # polynomial pre/post factors, exact to the truncation order.
        sf = uf * _INV_SQRT2
        s0 = sf[:, 0]
        v0 = scipy.special.erf(s0)
        _check_gate_value(kind, v0)
        g0 = np.exp(-(s0 * s0))
        erf_part = backend.erf_series(np.ascontiguousarray(sf), v0, g0)
        erf_part[:, 0] += 1.0
        out = backend.mul_trunc(uf, np.ascontiguousarray(erf_part))
        out *= 0.5
        return Jet(out.reshape(shape + (width,)))

    if kind == "reciprocal":
        _check_nonzero(kind, u0)
        v0 = 1.0 / u0
        series = backend.reciprocal_series
    elif kind == "sqrt":
        _check_nonzero(kind, u0)
        v0 = np.sqrt(u0)
        series = backend.sqrt_series
    elif kind == "exp":
        v0 = np.exp(u0)
        series = backend.exp_series
    elif kind == "log":
        _check_nonzero(kind, u0)
        v0 = np.log(u0)
        series = backend.log_series
    else:  # tanh
        v0 = np.tanh(u0)
        series = backend.tanh_series
    _check_gate_value(kind, v0)
    out = series(uf, np.ascontiguousarray(v0))
    return Jet(out.reshape(shape + (width,)))
