"""Token tensor container, similarity primitives, and STT file I/O.

The STT container is a little-endian binary layout:

    bytes 0..3    magic ``STTK`` (53 54 54 4B)
    bytes 4..7    u32 format version (currently 1)
    bytes 8..23   u32 V, T, P, C (view, frame, patch, channel counts)
    bytes 24..    V*T*P*C IEEE-754 binary32 values, (v, t, p, c) row-major

No padding, no footer. Round-trips are bit-exact.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, FormatError, PreconditionError
from .fileio import write_bytes_atomic

STT_MAGIC = b"STTK"
STT_VERSION = 1
_HEADER = struct.Struct("<4sIIIII")

# Vectors with L2 norm below this are treated as zero vectors: cosine
# similarity against them is 0 (no information, no preference).
EPS_NORM = 1e-12

# Sanity cap on the element count a header may declare (16 GiB of f32).
_MAX_ELEMENTS = 1 << 32


@dataclass(frozen=True)
class TokenTensor:
    """Immutable V x T x P x C volume of finite 32-bit float tokens."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float32)
        if arr.ndim != 4:
            raise DimensionError(f"token tensor must be 4-D (V,T,P,C), got {arr.ndim}-D")
        if min(arr.shape) < 1:
            raise DimensionError(f"all dims must be >= 1, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise DimensionError("token tensor contains non-finite values")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return self.data.shape

    def view(self, v: int) -> np.ndarray:
        """The (T, P, C) slab of view v."""
        return self.data[v]


@dataclass(frozen=True)
class TokenRef:
    """Provenance of one retained token: (view, frame, patch) plus the per-view
    flattened index flat = frame * P + patch."""

    view: int
    frame: int
    patch: int
    flat: int

    def __post_init__(self):
        if self.flat < 0 or self.frame < 0 or self.patch < 0 or self.view < 0:
            raise PreconditionError(f"negative field in {self!r}")

    @classmethod
    def from_flat(cls, view: int, flat: int, patches_per_frame: int) -> "TokenRef":
        frame, patch = divmod(flat, patches_per_frame)
        return cls(view=view, frame=frame, patch=patch, flat=flat)


def l2_norm(x) -> float:
    """Euclidean norm, accumulated in 64-bit floats."""
    return float(np.linalg.norm(np.asarray(x, dtype=np.float64)))


def cosine_sim(x, y) -> float:
    """Cosine similarity of two equal-length vectors.

    Returns 0 if either vector has norm below EPS_NORM. The result is not
    clamped; values may fall slightly outside [-1, 1] at float precision.
    """
    xv = np.asarray(x, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64)
    if xv.ndim != 1 or yv.ndim != 1 or xv.shape[0] != yv.shape[0]:
        raise DimensionError(f"cosine_sim needs equal-length vectors, got {xv.shape} and {yv.shape}")
    if xv.shape[0] < 1:
        raise DimensionError("cosine_sim needs vectors of length >= 1")
    nx = np.linalg.norm(xv)
    ny = np.linalg.norm(yv)
    if nx < EPS_NORM or ny < EPS_NORM:
        return 0.0
    return float(np.dot(xv, yv) / (nx * ny))


def minmax_normalize(scores) -> np.ndarray:
    """Affine map of scores onto [0, 1]; a degenerate range maps to all 0.5."""
    s = np.asarray(scores, dtype=np.float64)
    if s.size < 1:
        raise DimensionError("minmax_normalize needs at least one value")
    if not np.all(np.isfinite(s)):
        raise DimensionError("minmax_normalize needs finite values")
    lo = s.min()
    hi = s.max()
    if hi == lo:
        return np.full_like(s, 0.5)
    return (s - lo) / (hi - lo)


def max_sim_to_set(x, members) -> float:
    """Maximum cosine similarity of x against a non-empty list of vectors."""
    if len(members) == 0:
        raise PreconditionError("max_sim_to_set needs a non-empty member set")
    return max(cosine_sim(x, m) for m in members)


def unit_rows(mat: np.ndarray) -> np.ndarray:
    """Rows scaled to unit L2 norm, in float64; rows below EPS_NORM become zero.

    Dot products of these rows reproduce cosine_sim up to last-bit rounding,
    which is what the selection engine and the score kernels build on.
    """
    m = np.asarray(mat, dtype=np.float64)
    norms = np.linalg.norm(m, axis=-1, keepdims=True)
    safe = np.where(norms < EPS_NORM, 1.0, norms)
    out = m / safe
    out[np.broadcast_to(norms < EPS_NORM, out.shape)] = 0.0
    return out


def save_stt(tensor: TokenTensor, path) -> None:
    """Write an STT file atomically (temp file + rename)."""
    v, t, p, c = tensor.dims
    header = _HEADER.pack(STT_MAGIC, STT_VERSION, v, t, p, c)
    payload = np.ascontiguousarray(tensor.data, dtype="<f4").tobytes()
    write_bytes_atomic(path, header + payload)


def load_stt(path) -> TokenTensor:
    """Read an STT file, validating layout and values; errors carry byte offsets."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 4 or blob[:4] != STT_MAGIC:
        raise FormatError("bad magic, expected STTK", offset=0)
    if len(blob) < _HEADER.size:
        raise FormatError("truncated header", offset=len(blob))
    _, version, v, t, p, c = _HEADER.unpack_from(blob, 0)
    if version != STT_VERSION:
        raise FormatError(f"unsupported version {version}", offset=4)
    for i, dim in enumerate((v, t, p, c)):
        if dim == 0:
            raise FormatError(f"dimension {'VTPC'[i]} is zero", offset=8 + 4 * i)
    count = v * t * p * c
    if count > _MAX_ELEMENTS:
        raise FormatError(f"declared element count {count} exceeds cap", offset=8)
    expected = _HEADER.size + 4 * count
    if len(blob) < expected:
        raise FormatError(
            f"truncated payload: header declares {count} values, "
            f"{(len(blob) - _HEADER.size) // 4} present",
            offset=len(blob),
        )
    if len(blob) > expected:
        raise FormatError("trailing bytes after payload", offset=expected)
    flat = np.frombuffer(blob, dtype="<f4", count=count, offset=_HEADER.size)
    finite = np.isfinite(flat)
    if not finite.all():
        bad = int(np.argmin(finite))
        raise FormatError(f"non-finite value at element {bad}", offset=_HEADER.size + 4 * bad)
    return TokenTensor(flat.reshape(v, t, p, c).copy())
