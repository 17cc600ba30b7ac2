"""Binary spectra dump of a simulation state.

Layout (all little-endian)::

    offset 0   8 bytes   magic b"BQSNAP01"
    offset 8   uint32    header length H in bytes
    offset 12  H bytes   UTF-8 JSON header (sorted keys)
    then       nx*ny complex128 omega coefficients, row-major (k index first)
    then       nx*ny complex128 theta coefficients

The header holds ``schema_version``, ``nx``, ``ny``, ``grid_k``, ``grid_xi``,
``dxi``, ``frame_time`` and ``params``.  Coefficients use the numpy FFT index
order and the mean-square normalisation of :class:`SpectralField`.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .core import Params, SpectralField

__all__ = ["MAGIC", "SCHEMA_VERSION", "write_snapshot", "read_snapshot", "dumps", "loads"]

MAGIC = b"BQSNAP01"
SCHEMA_VERSION = 1
_DTYPE = np.dtype("<c16")


def dumps(omega: SpectralField, theta: SpectralField, params: Params) -> bytes:
    if omega.shape != theta.shape:
        raise ValueError("omega and theta grids differ")
    nx, ny = omega.shape
    header = {
        "schema_version": SCHEMA_VERSION,
        "nx": nx, "ny": ny,
        "grid_k": omega.grid_k, "grid_xi": omega.grid_xi,
        "dxi": omega.dxi, "frame_time": omega.frame_time,
        "params": params.as_dict(),
    }
    hb = json.dumps(header, sort_keys=True).encode("utf-8")
    parts = [MAGIC, struct.pack("<I", len(hb)), hb,
             np.ascontiguousarray(omega.data, dtype=_DTYPE).tobytes(),
             np.ascontiguousarray(theta.data, dtype=_DTYPE).tobytes()]
    return b"".join(parts)


def loads(blob: bytes):
    """Return ``(omega, theta, params)`` from :func:`dumps` output."""
    if blob[:8] != MAGIC:
        raise ValueError("not a snapshot: bad magic")
    (hlen,) = struct.unpack("<I", blob[8:12])
    header = json.loads(blob[12:12 + hlen].decode("utf-8"))
    if header.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported snapshot schema {header.get('schema_version')!r}")
    nx, ny = header["nx"], header["ny"]
    n = nx * ny * _DTYPE.itemsize
    off = 12 + hlen
    if len(blob) != off + 2 * n:
        raise ValueError("snapshot payload has the wrong length")
    arrs = [np.frombuffer(blob, dtype=_DTYPE, count=nx * ny, offset=off + i * n)
            .reshape(nx, ny).astype(complex) for i in range(2)]
    fields = [SpectralField(a, header["grid_k"], header["grid_xi"], header["dxi"],
                            header["frame_time"]) for a in arrs]
    return fields[0], fields[1], Params(**header["params"])


def write_snapshot(path, omega: SpectralField, theta: SpectralField, params: Params):
    Path(path).write_bytes(dumps(omega, theta, params))


def read_snapshot(path):
    return loads(Path(path).read_bytes())
