"""Haar-random complex unit directions with reproducible, seekable streams.

Direction components are produced by a keyed counter construction so that
any component (i, j) can be regenerated bit-identically on demand, with no
sequential RNG state shared between directions.  The exact construction,
fixed for reproducibility:

* The 256-bit key is parsed little-endian into four 64-bit words
  K0, K1, K2, K3.
* ``mix`` is the splitmix64 finalizer
  (x ^= x>>30; x *= 0xBF58476D1CE4E5B9; x ^= x>>27;
  x *= 0x94D049BB133111EB; x ^= x>>31).
* The 64-bit word for direction i, coordinate j, lane t is
  ``mix(mix(mix(K0 ^ mix(K1 + i*A)) ^ (K2 + j*B)) ^ (K3 + t*C))`` with
  A = 0x9E3779B97F4A7C15, B = 0xC2B2AE3D27D4EB4F, C = 0x165667B19E3779F9,
  all arithmetic mod 2^64.
* Lanes t=0,1 are turned into uniforms u1 = ((w0>>11)+1) * 2^-53 in (0,1]
  and u2 = (w1>>11) * 2^-53 in [0,1), then Box-Muller gives the
  pre-normalization component  sqrt(-2 ln u1) * exp(2*pi*1j*u2).

A direction is such a raw complex Gaussian row normalized to unit 2-norm;
the i.i.d. standard complex Gaussian entries make the distribution
invariant under every fixed unitary, i.e. Haar on the unit sphere.  Lane
t=2 feeds the auxiliary real-sphere sampler (used to demonstrate that no
real direction distribution reproduces the complex identities).
"""

import numpy as np

from .errors import UsageError

_A = np.uint64(0x9E3779B97F4A7C15)
_B = np.uint64(0xC2B2AE3D27D4EB4F)
_C = np.uint64(0x165667B19E3779F9)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_TWO53 = 2.0 ** -53

KEY_BYTES = 32


def _mix(x):
    x = x ^ (x >> _S30)
    x = x * _M1
    x = x ^ (x >> _S27)
    x = x * _M2
    return x ^ (x >> _S31)


def normalize_key(seed):
    """Coerce a seed (32 bytes, 64-hex string, or int) to the 32-byte key."""
    if isinstance(seed, bytes):
        if len(seed) != KEY_BYTES:
            raise UsageError(f"seed must be {KEY_BYTES} bytes, got {len(seed)}")
        return seed
    if isinstance(seed, str):
        s = seed.strip().lower()
        if len(s) != 2 * KEY_BYTES or any(c not in "0123456789abcdef" for c in s):
            raise UsageError("seed string must be 64 hex characters")
        return bytes.fromhex(s)
    if isinstance(seed, (int, np.integer)):
        if seed < 0:
            raise UsageError("integer seed must be non-negative")
        return int(seed).to_bytes(KEY_BYTES, "little")
    raise UsageError(f"unsupported seed type {type(seed).__name__}")


def key_words(key):
    return np.frombuffer(key, dtype="<u8").astype(np.uint64)


def _word(words, i, j, t):
    i = np.asarray(i, dtype=np.uint64)
    j = np.asarray(j, dtype=np.uint64)
    with np.errstate(over="ignore"):  # mod-2^64 wraparound is the point
        x = words[0] ^ _mix(words[1] + i * _A)
        x = _mix(x ^ (words[2] + j * _B))
        x = _mix(x ^ (words[3] + np.uint64(t) * _C))
        return _mix(x)


def _gauss_pair(words, i, j, t_re=0, t_im=1):
    w0 = _word(words, i, j, t_re)
    w1 = _word(words, i, j, t_im)
    u1 = ((w0 >> _S11).astype(np.float64) + 1.0) * _TWO53
    u2 = (w1 >> _S11).astype(np.float64) * _TWO53
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    return radius * np.cos(angle), radius * np.sin(angle)


def raw_components(key, i, j):
    """Pre-normalization complex Gaussian values for index arrays i, j."""
    re, im = _gauss_pair(key_words(key), i, j)
    return re + 1j * im


def derive_component(key, i, j):
    """Deterministic pre-normalization Gaussian for direction i, coord j."""
    return complex(raw_components(key, np.uint64(i), np.uint64(j)))


def _normalize_rows(raw):
    norms = np.sqrt(np.sum(raw.real**2 + raw.imag**2, axis=-1, keepdims=True))
    # A zero row has probability 0; keep the map total anyway.
    degenerate = norms == 0.0
    if np.any(degenerate):
        raw = raw.copy()
        raw[degenerate[..., 0], 0] = 1.0
        norms = np.where(degenerate, 1.0, norms)
    return raw / norms


class DirectionStream:
    """Per-direction RNG state: the key plus the direction's index."""

    __slots__ = ("key", "index")

    def __init__(self, key, index):
        self.key = key
        self.index = index


def sample_direction(n, stream):
    """One Haar-random unit vector in C^n from a per-direction stream."""
    if n < 1:
        raise UsageError("dimension must be >= 1")
    raw = raw_components(stream.key, np.uint64(stream.index), np.arange(n))
    return _normalize_rows(raw[None, :])[0]


class SeededDirections:
    """k Haar directions in C^n addressed by (key, row); nothing stored."""

    mode = "seeded"

    def __init__(self, key, k, n):
        if k < 1 or n < 1:
            raise UsageError("need k >= 1 and n >= 1")
        self.key = key
        self.k = k
        self.n = n
        self._words = key_words(key)

    def block(self, start, stop):
        """Rows start..stop-1 as a dense (stop-start, n) unit matrix."""
        i = np.arange(start, stop, dtype=np.uint64)[:, None]
        j = np.arange(self.n, dtype=np.uint64)[None, :]
        re, im = _gauss_pair(self._words, i, j)
        return _normalize_rows(re + 1j * im)

    def row(self, i):
        return self.block(i, i + 1)[0]

    def matrix(self):
        return self.block(0, self.k)

    def unit_components(self, cols):
        """Columns `cols` of the normalized direction matrix, shape (k, d).

        Normalization needs the full-row norm, so rows are re-derived and
        reduced; only the requested columns are returned.
        """
        cols = np.asarray(cols, dtype=np.intp)
        return self.matrix()[:, cols]


class ExplicitDirections:
    """Directions held as an explicit (k, n) matrix (audit mode)."""

    mode = "explicit"

    def __init__(self, matrix):
        m = np.ascontiguousarray(matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
            raise UsageError("direction matrix must be (k, n) with k, n >= 1")
        norms = np.linalg.norm(m, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            worst = int(np.argmax(np.abs(norms - 1.0)))
            raise UsageError(
                f"direction row {worst} has norm {norms[worst]!r}, not unit"
            )
        self._matrix = m
        self.k, self.n = m.shape

    def block(self, start, stop):
        return self._matrix[start:stop]

    def row(self, i):
        return self._matrix[i]

    def matrix(self):
        return self._matrix

    def unit_components(self, cols):
        cols = np.asarray(cols, dtype=np.intp)
        return self._matrix[:, cols]


def real_haar_block(key, k, n):
    """k Haar-random unit rows in R^n (lane-separated from the complex use)."""
    words = key_words(key)
    i = np.arange(k, dtype=np.uint64)[:, None]
    j = np.arange(n, dtype=np.uint64)[None, :]
    re, _ = _gauss_pair(words, i, j, t_re=2, t_im=3)
    return _normalize_rows(re.astype(np.float64))
