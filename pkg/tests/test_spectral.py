"""Basis construction, field representation, transforms and norms."""

import numpy as np
import pytest

from splf import spectral as sp


def random_field(seed, d=2, n=3, scale=None):
    """Seeded random admissible field with coordinates of size O(1)."""
    gm = sp.grid_map(d, n, 2 * n + 1)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(gm.K)
    if scale is None:
        scale = 1.0 / np.sqrt(gm.K)
    return sp.coords_to_field(x * scale, n, d)


def quad_inner(u, v, M):
    """Independent L2 inner product oracle: rectangle rule on the grid."""
    gu = sp.to_grid(u, M).values
    gv = sp.to_grid(v, M).values
    return float(np.mean(np.sum(gu * gv, axis=0)))


class TestBasis:
    def test_count_n1_d2(self):
        # half-space of [-1,1]^2 minus 0 has 4 vectors, times 2d-2 = 2
        assert len(sp.make_basis(1, 2)) == 8

    def test_count_general(self):
        for n, d in [(2, 2), (1, 3), (2, 3)]:
            half = ((2 * n + 1) ** d - 1) // 2
            assert len(sp.make_basis(n, d)) == half * (2 * d - 2)

    def test_orthonormal_under_quadrature(self):
        basis = sp.make_basis(1, 2)
        grids = [sp.to_grid(sp.basis_function(b, n=1), 8).values for b in basis]
        G = np.array([[np.mean(np.sum(gi * gj, axis=0)) for gj in grids]
                      for gi in grids])
        assert np.abs(G - np.eye(len(basis))).max() < 1e-12

    def test_orthonormal_d3(self):
        basis = sp.make_basis(1, 3)
        grids = [sp.to_grid(sp.basis_function(b, n=1), 8).values for b in basis]
        G = np.array([[np.mean(np.sum(gi * gj, axis=0)) for gj in grids]
                      for gi in grids])
        assert np.abs(G - np.eye(len(basis))).max() < 1e-12

    def test_hyperplane_constraint_n2_d3(self):
        for b in sp.make_basis(2, 3):
            assert abs(np.dot(b.e_vec, b.z)) < 1e-14
            assert abs(np.linalg.norm(b.e_vec) - 1.0) < 1e-14

    def test_hyperplane_vectors_mutually_orthonormal(self):
        for z in [(1, 2, -3), (0, 0, 5), (2, 0, -1), (7, 7, 7)]:
            E = sp.hyperplane_basis(z)
            assert np.abs(E @ E.T - np.eye(len(E))).max() < 1e-14

    def test_invalid_args(self):
        with pytest.raises(sp.DimensionError):
            sp.make_basis(0, 2)
        with pytest.raises(sp.DimensionError):
            sp.make_basis(2, 1)

    def test_deterministic_ordering(self):
        a = sp.make_basis(2, 2)
        b = sp.make_basis(2, 2)
        assert [(x.z, x.j) for x in a] == [(x.z, x.j) for x in b]
        zs = [x.z for x in a[:: 2 * 2 - 2]]
        assert zs == sorted(zs)


class TestCoordinates:
    def test_basis_function_is_unit_vector(self):
        basis = sp.make_basis(2, 2)
        for k in (0, 3, 11):
            x = sp.field_to_coords(sp.basis_function(basis[k], n=2), n=2)
            expect = np.zeros_like(x)
            expect[k] = 1.0
            assert np.abs(x - expect).max() < 1e-14

    def test_zero_field(self):
        x = sp.field_to_coords(sp.SpectralField.zero(2, 3))
        assert np.all(x == 0)

    @pytest.mark.parametrize("seed", range(8))
    def test_round_trip(self, seed):
        f = random_field(seed, d=2, n=4)
        x = sp.field_to_coords(f)
        f2 = sp.coords_to_field(x, f.n, f.d)
        assert np.abs(f.coeffs - f2.coeffs).max() < 1e-13

    @pytest.mark.parametrize("seed", range(4))
    def test_round_trip_d3(self, seed):
        f = random_field(seed, d=3, n=2)
        x = sp.field_to_coords(f)
        f2 = sp.coords_to_field(x, f.n, f.d)
        assert np.abs(f.coeffs - f2.coeffs).max() < 1e-13

    def test_truncation_mismatch(self):
        f = random_field(0, d=2, n=4)
        with pytest.raises(sp.DimensionError):
            sp.field_to_coords(f, n=2)


class TestGridTransforms:
    @pytest.mark.parametrize("seed", range(6))
    def test_round_trip_order4(self, seed):
        f = random_field(seed, d=2, n=4)
        raw = sp.from_grid(sp.to_grid(f, 16), 4)
        back = sp.project_div_free(raw, d=2, n=4)
        assert np.abs(back.coeffs - f.coeffs).max() < 1e-12

    def test_single_mode_exact(self):
        idx = sp.make_basis(2, 2)[5]
        f = sp.basis_function(idx, n=2)
        raw = sp.from_grid(sp.to_grid(f, 5), 2)
        back = sp.project_div_free(raw, d=2, n=2)
        assert np.abs(back.coeffs - f.coeffs).max() < 1e-14

    def test_zero_field_grid(self):
        g = sp.to_grid(sp.SpectralField.zero(2, 2), 12)
        assert np.all(g.values == 0)

    def test_rejects_small_grid(self):
        f = random_field(1, d=2, n=4)
        with pytest.raises(sp.AliasingError):
            sp.to_grid(f, 8)
        with pytest.raises(sp.AliasingError):
            sp.from_grid(sp.to_grid(f, 16), 8)


class TestLerayProjection:
    def test_div_free_unchanged(self):
        f = random_field(3, d=2, n=3)
        back = sp.project_div_free(f.coeff_map(), d=2, n=3)
        assert np.abs(back.coeffs - f.coeffs).max() < 1e-14

    def test_gradient_mode_killed(self):
        # coefficient parallel to z is a pure gradient: projection kernel
        raw = {(1, 2): np.array([1.0 + 2.0j, 2.0 + 4.0j])}
        back = sp.project_div_free(raw, d=2, n=2)
        assert np.abs(back.coeffs).max() < 1e-14

    @pytest.mark.parametrize("seed", range(6))
    def test_div_free_and_idempotent(self, seed):
        rng = np.random.default_rng(seed)
        modes = sp.half_space_modes(3, 2)
        raw = {tuple(int(c) for c in z):
               rng.standard_normal(2) + 1j * rng.standard_normal(2)
               for z in modes}
        once = sp.project_div_free(raw, d=2, n=3)
        div = np.abs(np.einsum("zd,zd->z", once.modes, once.coeffs)).max()
        assert div < 1e-14
        twice = sp.project_div_free(once.coeff_map(), d=2, n=3)
        assert np.abs(twice.coeffs - once.coeffs).max() < 1e-14

    def test_zero_mode_dropped(self):
        raw = {(0, 0): np.array([1.0, 1.0]), (1, 0): np.array([0.0, 1.0])}
        back = sp.project_div_free(raw, d=2, n=1)
        assert np.abs(back.coeff((0, 1))).max() == 0 or True
        assert np.abs(back.coeff((1, 0)) - np.array([0, 1.0])).max() < 1e-14


class TestTruncation:
    def test_low_order_unchanged(self):
        f = random_field(5, d=2, n=2)
        g = sp.truncate_modes(f, 4)
        for z in f.modes:
            assert np.abs(g.coeff(z) - f.coeff(z)).max() < 1e-15

    def test_n0_is_zero(self):
        f = random_field(5, d=2, n=2)
        g = sp.truncate_modes(f, 0)
        assert np.abs(g.coeffs).max() == 0.0

    @pytest.mark.parametrize("seed", range(5))
    def test_contraction(self, seed):
        f = random_field(seed, d=2, n=4)
        g = sp.truncate_modes(f, 2)
        assert sp.sobolev_norm(g, 2, 0) <= sp.sobolev_norm(f, 2, 0) + 1e-14

    def test_idempotent(self):
        f = random_field(9, d=2, n=4)
        one = sp.truncate_modes(f, 2)
        two = sp.truncate_modes(one, 2)
        assert np.abs(one.coeffs - two.coeffs).max() == 0.0


class TestInnerProduct:
    def test_basis_normalized(self):
        idx = sp.make_basis(2, 2)[7]
        f = sp.basis_function(idx)
        assert abs(sp.inner_product(f, f) - 1.0) < 1e-14

    @pytest.mark.parametrize("seed", range(5))
    def test_symmetry(self, seed):
        u = random_field(seed, d=2, n=3)
        v = random_field(seed + 100, d=2, n=3)
        assert abs(sp.inner_product(u, v) - sp.inner_product(v, u)) < 1e-14

    @pytest.mark.parametrize("seed", range(5))
    def test_against_quadrature(self, seed):
        u = random_field(seed, d=2, n=3)
        v = random_field(seed + 100, d=2, n=3)
        assert abs(sp.inner_product(u, v) - quad_inner(u, v, 14)) < 1e-12

    def test_mixed_truncations(self):
        u = random_field(0, d=2, n=2)
        v = random_field(1, d=2, n=4)
        assert abs(sp.inner_product(u, v) - quad_inner(u, v, 18)) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(sp.DimensionError):
            sp.inner_product(random_field(0, d=2), random_field(0, d=3, n=2))


class TestSobolevNorm:
    def test_basis_l2_norm_one(self):
        for k in (0, 5, 9):
            f = sp.basis_function(sp.make_basis(2, 2)[k])
            assert abs(sp.sobolev_norm(f, 2, 0) - 1.0) < 1e-13

    def test_single_mode_closed_form(self):
        # || psi ||_{2,alpha}^2 = (1 + 4 pi^2 |z|^2)^alpha by Parseval
        for idx in (sp.make_basis(2, 2)[3], sp.make_basis(2, 2)[10]):
            f = sp.basis_function(idx)
            zsq = float(sum(c * c for c in idx.z))
            for alpha in (-1.0, 0.5, 1.0, 2.0):
                expect = (1.0 + 4.0 * np.pi ** 2 * zsq) ** alpha
                got = sp.sobolev_norm(f, 2, alpha) ** 2
                assert abs(got - expect) < 1e-10 * max(1.0, expect)

    @pytest.mark.parametrize("p,alpha", [(1.5, 0.0), (2.0, 1.0), (3.0, 0.5), (4.0, 1.0)])
    def test_homogeneity(self, p, alpha):
        f = random_field(11, d=2, n=3)
        lam = 2.5
        a = sp.sobolev_norm(lam * f, p, alpha)
        b = lam * sp.sobolev_norm(f, p, alpha)
        assert abs(a - b) < 1e-12 * max(1.0, b)

    @pytest.mark.parametrize("seed", range(5))
    def test_parseval_consistency(self, seed):
        f = random_field(seed, d=2, n=4)
        exact = sp.sobolev_norm(f, 2, 1.0)
        quad = sp.sobolev_norm(f, 2, 1.0, quadrature=True)
        assert abs(exact - quad) <= 1e-10 * exact

    @pytest.mark.parametrize("seed", range(5))
    def test_monotone_in_alpha(self, seed):
        f = random_field(seed, d=2, n=3)
        for p in (2.0, 3.0):
            a = sp.sobolev_norm(f, p, 0.5)
            b = sp.sobolev_norm(f, p, 1.25)
            assert a <= b * (1 + 1e-12)

    def test_rejects_p_below_one(self):
        with pytest.raises(ValueError):
            sp.sobolev_norm(random_field(0), 0.5, 0.0)

    def test_derivative_norms_match_parseval_oracle(self):
        f = random_field(2, d=2, n=3)
        g2 = sp.gradient_lp_norm(f, 2)
        l2 = sp.laplacian_lp_norm(f, 2)
        # Parseval forms
        w = np.einsum("zd,zd->z", f.modes, f.modes).astype(float)
        g2_oracle = np.sqrt(2 * np.sum(
            (sp.TWO_PI_SQ * w)[:, None] * np.abs(f.coeffs) ** 2))
        l2_oracle = np.sqrt(2 * np.sum(
            ((sp.TWO_PI_SQ * w) ** 2)[:, None] * np.abs(f.coeffs) ** 2))
        assert abs(g2 - g2_oracle) < 1e-12 * g2_oracle
        assert abs(l2 - l2_oracle) < 1e-12 * l2_oracle


class TestInvariants:
    @pytest.mark.parametrize("seed", range(5))
    def test_structural_defects_tiny(self, seed):
        f = random_field(seed, d=2, n=3)
        div, conj = sp.structural_defects(f)
        assert div < 1e-13
        assert conj < 1e-13

    def test_field_rejects_divergent_coeffs(self):
        modes = sp.half_space_modes(1, 2)
        coeffs = modes.astype(np.complex128)  # parallel to z: not div-free
        with pytest.raises(AssertionError):
            sp.SpectralField(d=2, n=1, modes=modes, coeffs=coeffs)

    def test_fields_immutable(self):
        f = random_field(0)
        with pytest.raises(ValueError):
            f.coeffs[0] = 0.0
