"""Binary field snapshot format."""

import struct

import numpy as np
import pytest

from splf import snapshot as sn
from splf import spectral as sp

from test_spectral import random_field


class TestRoundTrip:
    @pytest.mark.parametrize("seed,d,n", [(0, 2, 3), (1, 2, 1), (2, 3, 2)])
    def test_exact_round_trip(self, tmp_path, seed, d, n):
        f = random_field(seed, d=d, n=n)
        path = tmp_path / "field.splf"
        sn.write_snapshot(f, path)
        g = sn.read_snapshot(path)
        assert g.d == f.d and g.n == f.n
        assert np.array_equal(g.modes, f.modes)
        assert np.array_equal(g.coeffs, f.coeffs)

    def test_bytes_round_trip(self):
        f = random_field(3, d=2, n=2)
        assert np.array_equal(sn.bytes_to_field(sn.field_to_bytes(f)).coeffs,
                              f.coeffs)


class TestLayout:
    def test_header_layout(self):
        f = sp.SpectralField.zero(2, 1)
        blob = sn.field_to_bytes(f)
        assert blob[:4] == b"SPLF"
        version, d, n, count = struct.unpack_from("<IIII", blob, 4)
        assert (version, d, n) == (sn.VERSION, 2, 1)
        assert count == 4  # half-space of [-1,1]^2 minus origin
        # record: d int32 + 2d float64 per mode
        assert len(blob) == 20 + count * (4 * 2 + 16 * 2)

    def test_mode_order_lexicographic(self):
        f = random_field(0, d=2, n=2)
        blob = sn.field_to_bytes(f)
        zs = []
        off = 20
        for _ in range(f.modes.shape[0]):
            zs.append(tuple(np.frombuffer(blob, dtype="<i4", count=2, offset=off)))
            off += 8 + 32
        assert zs == sorted(zs)

    def test_known_coefficient_bytes(self):
        # one mode with a hand-placed coefficient survives byte-level checks
        idx = sp.make_basis(1, 2)[0]
        f = sp.basis_function(idx, n=1)
        blob = sn.field_to_bytes(f)
        g = sn.bytes_to_field(blob)
        assert np.array_equal(g.coeff(idx.z), f.coeff(idx.z))


class TestErrors:
    def test_bad_magic(self):
        with pytest.raises(sn.SnapshotError, match="magic"):
            sn.bytes_to_field(b"XXXX" + b"\0" * 32)

    def test_bad_version(self):
        f = sp.SpectralField.zero(2, 1)
        blob = bytearray(sn.field_to_bytes(f))
        blob[4:8] = struct.pack("<I", 99)
        with pytest.raises(sn.SnapshotError, match="version"):
            sn.bytes_to_field(bytes(blob))

    def test_truncated_body(self):
        f = sp.SpectralField.zero(2, 1)
        blob = sn.field_to_bytes(f)[:-8]
        with pytest.raises(sn.SnapshotError, match="length"):
            sn.bytes_to_field(blob)
