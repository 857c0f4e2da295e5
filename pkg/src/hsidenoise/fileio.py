"""Binary cube files.

Layout: one ASCII header line ``HSIC1 <M> <N> <p> f32le\\n`` followed by
``4*M*N*p`` bytes of little-endian float32, band-sequential (band 0 first),
row-major inside each band.
"""
from __future__ import annotations

import os

import numpy as np

from .cube import as_cube

__all__ = ["MAGIC", "CubeFormatError", "write_cube", "read_cube", "encode_cube", "decode_cube"]

MAGIC = "HSIC1"
VALUE_TAG = "f32le"
_DTYPE = np.dtype("<f4")
_MAX_HEADER = 256


class CubeFormatError(ValueError):
    pass


def encode_cube(cube) -> bytes:
    cube = as_cube(cube)
    M, N, p = cube.shape
    header = f"{MAGIC} {M} {N} {p} {VALUE_TAG}\n".encode("ascii")
    payload = np.ascontiguousarray(cube.transpose(2, 0, 1), dtype=_DTYPE).tobytes()
    return header + payload


def decode_cube(data: bytes) -> np.ndarray:
    """Parse bytes produced by :func:`encode_cube` into an ``(M, N, p)``
    float64 array."""
    end = data.find(b"\n", 0, _MAX_HEADER)
    if end < 0:
        raise CubeFormatError("missing header line")
    fields = data[:end].decode("ascii", errors="replace").split()
    if len(fields) != 5 or fields[0] != MAGIC:
        raise CubeFormatError(f"bad header {data[:end]!r}")
    if fields[4] != VALUE_TAG:
        raise CubeFormatError(f"unsupported value type {fields[4]!r}")
    try:
        M, N, p = (int(f) for f in fields[1:4])
    except ValueError:
        raise CubeFormatError(f"bad dimensions in header {data[:end]!r}") from None
    if min(M, N, p) < 1:
        raise CubeFormatError("dimensions must be positive")
    payload = data[end + 1:]
    if len(payload) != 4 * M * N * p:
        raise CubeFormatError(f"payload has {len(payload)} bytes, expected {4 * M * N * p}")
    bands = np.frombuffer(payload, dtype=_DTYPE).reshape(p, M, N)
    return bands.transpose(1, 2, 0).astype(np.float64)


def write_cube(path, cube) -> None:
    data = encode_cube(cube)
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def read_cube(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_cube(fh.read())
