"""Bit-exact binary persistence for sketches.

File layout (all multi-byte values little-endian, complex values stored as
interleaved f64 re, im):

    magic            4 bytes  b"TSKD"
    format_version   u32      1
    mode             u8       0 = explicit directions, 1 = seeded
    n                u64
    p                u64
    s                u32
    k                u32
    master_seed      32 bytes (mode 1 only)
    base_point       n complex
    directions       k*n complex (mode 0 only)
    taylor data P    k*(s+1)*p complex

Every structural defect (bad magic, unknown version, size mismatch) raises
SketchFormatError; sizes are validated against the actual file length
before any array is allocated.  Writes go to a temp file that is fsynced
and atomically renamed into place.
"""

import os
import struct
import tempfile

import numpy as np

from .errors import SketchFormatError, UsageError
from .sampling import ExplicitDirections, SeededDirections
from .sketching import SketchData

MAGIC = b"TSKD"
FORMAT_VERSION = 1
_FIXED = struct.Struct("<4sIBQQII")
MODE_EXPLICIT = 0
MODE_SEEDED = 1


def _c16(arr):
    return np.ascontiguousarray(arr, dtype=np.complex128).astype("<c16")


def save_sketch(sk, path):
    """Persist a sketch; round-trips bit-identically."""
    mode = MODE_SEEDED if sk.directions.mode == "seeded" else MODE_EXPLICIT
    head = _FIXED.pack(
        MAGIC, FORMAT_VERSION, mode, sk.n, sk.p, sk.s, sk.k
    )
    blobs = [head]
    if mode == MODE_SEEDED:
        blobs.append(sk.directions.key)
    blobs.append(_c16(sk.base_point).tobytes())
    if mode == MODE_EXPLICIT:
        blobs.append(_c16(sk.directions.matrix()).tobytes())
    blobs.append(_c16(sk.taylor).tobytes())

    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".tskd-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            for blob in blobs:
                fh.write(blob)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except OSError as err:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise UsageError(f"cannot write sketch to {path}: {err}") from None


def expected_file_size(mode, n, p, s, k):
    size = _FIXED.size + 16 * n + 16 * k * (s + 1) * p
    if mode == MODE_SEEDED:
        size += 32
    else:
        size += 16 * k * n
    return size


def load_sketch(path):
    """Load and validate a sketch file."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as err:
        raise UsageError(f"cannot read sketch from {path}: {err}") from None

    if len(raw) < _FIXED.size:
        raise SketchFormatError(f"{path}: file shorter than the fixed header")
    magic, version, mode, n, p, s, k = _FIXED.unpack_from(raw, 0)
    if magic != MAGIC:
        raise SketchFormatError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise SketchFormatError(
            f"{path}: unsupported format version {version}"
        )
    if mode not in (MODE_EXPLICIT, MODE_SEEDED):
        raise SketchFormatError(f"{path}: unknown direction mode {mode}")
    if n < 1 or p < 1 or k < 1:
        raise SketchFormatError(
            f"{path}: degenerate dimensions n={n}, p={p}, k={k}"
        )
    expected = expected_file_size(mode, n, p, s, k)
    if len(raw) != expected:
        raise SketchFormatError(
            f"{path}: size {len(raw)} != {expected} required by header dims"
        )

    off = _FIXED.size
    if mode == MODE_SEEDED:
        key = raw[off : off + 32]
        off += 32
    base = np.frombuffer(raw, dtype="<c16", count=n, offset=off).astype(
        np.complex128
    )
    off += 16 * n
    if mode == MODE_EXPLICIT:
        mat = (
            np.frombuffer(raw, dtype="<c16", count=k * n, offset=off)
            .astype(np.complex128)
            .reshape(k, n)
        )
        off += 16 * k * n
        try:
            directions = ExplicitDirections(mat)
        except UsageError as err:
            raise SketchFormatError(f"{path}: {err}") from None
    else:
        directions = SeededDirections(key, k, n)
    taylor = (
        np.frombuffer(raw, dtype="<c16", count=k * (s + 1) * p, offset=off)
        .astype(np.complex128)
        .reshape(k, s + 1, p)
    )
    if not np.all(np.isfinite(base.real) & np.isfinite(base.imag)):
        raise SketchFormatError(f"{path}: non-finite base point")
    if not np.all(np.isfinite(taylor.real) & np.isfinite(taylor.imag)):
        raise SketchFormatError(f"{path}: non-finite Taylor data")
    return SketchData(base_point=base, directions=directions, taylor=taylor)
