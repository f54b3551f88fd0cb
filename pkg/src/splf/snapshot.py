"""Binary field snapshots.

Layout (all little-endian): magic bytes b"SPLF", format version (uint32),
d and n (uint32 each), mode count (uint32), then per mode d int32 wave
vector components followed by d complex coefficients stored as 2d float64
values (real, imag interleaved).  Modes appear in lexicographic order and
only the canonical half-space representatives are stored; the conjugate
partners are implicit.
"""

from __future__ import annotations

import struct

import numpy as np

from .spectral import SpectralField

MAGIC = b"SPLF"
VERSION = 1

__all__ = ["write_snapshot", "read_snapshot", "SnapshotError", "MAGIC", "VERSION"]


class SnapshotError(ValueError):
    """Malformed snapshot bytes."""


def field_to_bytes(field: SpectralField) -> bytes:
    head = MAGIC + struct.pack("<IIII", VERSION, field.d, field.n,
                               field.modes.shape[0])
    z = field.modes.astype("<i4")
    c = np.empty((field.modes.shape[0], 2 * field.d), dtype="<f8")
    c[:, 0::2] = field.coeffs.real
    c[:, 1::2] = field.coeffs.imag
    body = b"".join(zr.tobytes() + cr.tobytes() for zr, cr in zip(z, c))
    return head + body


def bytes_to_field(blob: bytes) -> SpectralField:
    if blob[:4] != MAGIC:
        raise SnapshotError("bad magic bytes, not a field snapshot")
    version, d, n, count = struct.unpack_from("<IIII", blob, 4)
    if version != VERSION:
        raise SnapshotError(f"unsupported snapshot version {version}")
    rec = 4 * d + 16 * d
    expected = 20 + count * rec
    if len(blob) != expected:
        raise SnapshotError(
            f"snapshot length {len(blob)} != expected {expected}")
    modes = np.empty((count, d), dtype=np.int64)
    coeffs = np.empty((count, d), dtype=np.complex128)
    off = 20
    for k in range(count):
        z = np.frombuffer(blob, dtype="<i4", count=d, offset=off)
        off += 4 * d
        c = np.frombuffer(blob, dtype="<f8", count=2 * d, offset=off)
        off += 16 * d
        modes[k] = z
        coeffs[k] = c[0::2] + 1j * c[1::2]
    return SpectralField(d=int(d), n=int(n), modes=modes, coeffs=coeffs)


def write_snapshot(field: SpectralField, path) -> None:
    with open(path, "wb") as fh:
        fh.write(field_to_bytes(field))


def read_snapshot(path) -> SpectralField:
    with open(path, "rb") as fh:
        return bytes_to_field(fh.read())
