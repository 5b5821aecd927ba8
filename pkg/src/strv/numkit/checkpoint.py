"""Binary parameter checkpoints.

Layout (all integers little-endian):

    magic   4 bytes  b"STRV"
    version u32      currently 1
    count   u32      number of entries
    entry   repeated count times:
        name_len u32
        name     name_len bytes, utf-8
        rank     u32
        dims     rank x u64
        payload  prod(dims) x f64, little-endian, C order

Round-trips are bit-exact.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import FormatError, UnsupportedVersion

MAGIC = b"STRV"
VERSION = 1


def save_params(path: str | Path, named: dict[str, np.ndarray]) -> None:
    """Write named f64 arrays to `path` in declaration order."""
    chunks = [MAGIC, struct.pack("<II", VERSION, len(named))]
    for name, arr in named.items():
        arr = np.asarray(arr, dtype="<f8")
        encoded = name.encode("utf-8")
        chunks.append(struct.pack("<I", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<I", arr.ndim))
        chunks.append(struct.pack(f"<{arr.ndim}Q" if arr.ndim else "<0Q", *arr.shape))
        chunks.append(arr.tobytes(order="C"))
    Path(path).write_bytes(b"".join(chunks))


def load_params(path: str | Path) -> dict[str, np.ndarray]:
    """Read a checkpoint back into {name: ndarray}, validating the layout."""
    raw = Path(path).read_bytes()
    view = memoryview(raw)
    if len(raw) < 12:
        raise FormatError(f"{path}: truncated header")
    if bytes(view[:4]) != MAGIC:
        raise FormatError(f"{path}: bad magic {bytes(view[:4])!r}")
    version, count = struct.unpack_from("<II", raw, 4)
    if version > VERSION:
        raise UnsupportedVersion(f"{path}: version {version} is newer than supported {VERSION}")
    offset = 12
    out: dict[str, np.ndarray] = {}
    for _ in range(count):
        try:
            (name_len,) = struct.unpack_from("<I", raw, offset)
            offset += 4
            name = bytes(view[offset : offset + name_len]).decode("utf-8")
            offset += name_len
            (rank,) = struct.unpack_from("<I", raw, offset)
            offset += 4
            dims = struct.unpack_from(f"<{rank}Q", raw, offset) if rank else ()
            offset += 8 * rank
            n_values = 1
            for d in dims:
                n_values *= d
            n_bytes = 8 * n_values
            if offset + n_bytes > len(raw):
                raise FormatError(f"{path}: truncated payload for {name!r}")
            arr = np.frombuffer(view[offset : offset + n_bytes], dtype="<f8").reshape(dims)
            offset += n_bytes
        except struct.error as exc:
            raise FormatError(f"{path}: truncated entry table") from exc
        out[name] = arr.astype(np.float64).copy()
    if offset != len(raw):
        raise FormatError(f"{path}: {len(raw) - offset} trailing bytes")
    return out
