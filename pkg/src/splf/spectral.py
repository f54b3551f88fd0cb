"""Divergence-free Fourier fields on the torus [0,1)^d.

Real, mean-zero, divergence-free vector fields are stored through their
complex Fourier coefficients on a canonical half of the integer lattice;
the conjugate partner of every stored mode is implicit, so reality of the
field is structural.  On top of the coefficient representation this module
provides the real orthonormal cos/sin basis of the divergence-free subspace,
round trips to uniform physical-space grids, Bessel-potential Sobolev norms,
and the Leray and truncation projections.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

TWO_PI_SQ = 4.0 * np.pi ** 2

__all__ = [
    "BasisIndex",
    "SpectralField",
    "GridVectorField",
    "GridTensorField",
    "half_space_modes",
    "hyperplane_basis",
    "make_basis",
    "basis_function",
    "field_to_coords",
    "coords_to_field",
    "to_grid",
    "from_grid",
    "project_div_free",
    "truncate_modes",
    "inner_product",
    "sobolev_norm",
    "gradient_lp_norm",
    "laplacian_lp_norm",
    "structural_defects",
    "pairing_grid_size",
    "norm_grid_size",
]


class DimensionError(ValueError):
    """Incompatible dimensions or truncation orders."""


class AliasingError(ValueError):
    """Grid too coarse to represent the requested modes."""


def pairing_grid_size(n: int) -> int:
    """Grid resolution used for nonlinear pairings at truncation n.

    Twice the one-sided mode count per axis, which makes the uniform
    rectangle rule exact for cubic products of order-n fields.
    """
    return 2 * (2 * n + 1)


def norm_grid_size(n: int) -> int:
    """Grid resolution used for L_p quadrature of norms (floor of 32)."""
    return max(pairing_grid_size(n), 32)


def _is_canonical(z) -> bool:
    """True when the first nonzero component of z is positive."""
    for c in z:
        if c != 0:
            return c > 0
    return False


def canonical_rep(z):
    """Canonical half-space representative of {z, -z} with its sign."""
    z = tuple(int(c) for c in z)
    if _is_canonical(z):
        return z, 1
    return tuple(-c for c in z), -1


def half_space_modes(n: int, d: int) -> np.ndarray:
    """All canonical half-space wave vectors of [-n,n]^d \\ {0}, lex sorted."""
    if n < 1 or d < 2:
        raise DimensionError(f"need n >= 1 and d >= 2, got n={n}, d={d}")
    modes = [z for z in itertools.product(range(-n, n + 1), repeat=d)
             if _is_canonical(z)]
    modes.sort()
    return np.array(modes, dtype=np.int64)


def hyperplane_basis(z) -> np.ndarray:
    """Orthonormal basis of the hyperplane orthogonal to z, shape (d-1, d).

    Deterministic construction: drop the canonical unit vector with the
    largest |component along z| (ties to the lowest index), then run
    modified Gram-Schmidt on the remaining canonical vectors against z.
    """
    z = np.asarray(z, dtype=float)
    d = z.size
    nz = np.linalg.norm(z)
    if nz == 0.0:
        raise DimensionError("zero wave vector has no hyperplane basis")
    zhat = z / nz
    drop = int(np.argmax(np.abs(z)))
    vecs = []
    for i in range(d):
        if i == drop:
            continue
        v = np.zeros(d)
        v[i] = 1.0
        v -= (v @ zhat) * zhat
        for e in vecs:
            v -= (v @ e) * e
        v /= np.linalg.norm(v)
        vecs.append(v)
    return np.array(vecs)


@dataclass(frozen=True)
class BasisIndex:
    """One element of the real divergence-free basis.

    j in 1..d-1 tags the cosine branch, j in d..2d-2 the sine branch; both
    use the hyperplane vector e_vec = e_{z, 1 + (j-1) mod (d-1)}.
    """

    z: tuple
    j: int
    e_vec: np.ndarray

    @property
    def is_sine(self) -> bool:
        d = len(self.z)
        return self.j >= d

    def __post_init__(self):
        self.e_vec.setflags(write=False)


@lru_cache(maxsize=None)
def _basis_cached(n: int, d: int):
    modes = half_space_modes(n, d)
    out = []
    for z in modes:
        E = hyperplane_basis(z)
        zt = tuple(int(c) for c in z)
        for j in range(1, 2 * d - 1):
            out.append(BasisIndex(z=zt, j=j, e_vec=E[(j - 1) % (d - 1)]))
    return tuple(out)


def make_basis(n: int, d: int):
    """Ordered real orthonormal basis of the order-n divergence-free space.

    Ordering is lexicographic in the canonical half-space wave vector, then
    increasing j, so coordinate vectors are reproducible across runs.
    """
    return list(_basis_cached(n, d))


@lru_cache(maxsize=None)
def _hyperplane_stack(n: int, d: int) -> np.ndarray:
    """Stacked hyperplane bases for half_space_modes(n, d), shape (Z, d-1, d)."""
    modes = half_space_modes(n, d)
    E = np.array([hyperplane_basis(z) for z in modes])
    E.setflags(write=False)
    return E


@dataclass(frozen=True)
class SpectralField:
    """Mean-zero, divergence-free real vector field in coefficient form.

    coeffs[k] is the complex coefficient vector of mode modes[k]; the
    coefficient of -modes[k] is its conjugate and is not stored.
    """

    d: int
    n: int
    modes: np.ndarray   # (Z, d) int64, canonical half-space, lex sorted
    coeffs: np.ndarray  # (Z, d) complex128

    def __post_init__(self):
        modes = np.ascontiguousarray(self.modes, dtype=np.int64)
        coeffs = np.ascontiguousarray(self.coeffs, dtype=np.complex128)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "coeffs", coeffs)
        if modes.shape != coeffs.shape or modes.ndim != 2 or modes.shape[1] != self.d:
            raise DimensionError("modes and coeffs must both have shape (Z, d)")
        if modes.size:
            assert np.abs(modes).max() <= self.n, "mode outside truncation box"
            assert all(_is_canonical(z) for z in modes), "non-canonical mode stored"
            assert np.max(np.abs(np.einsum("zd,zd->z", modes, coeffs))) < 1e-13 * max(
                1.0, self.n * np.abs(coeffs).max()
            ), "field is not divergence free"
        modes.setflags(write=False)
        coeffs.setflags(write=False)

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(d: int, n: int) -> "SpectralField":
        modes = half_space_modes(n, d)
        return SpectralField(d=d, n=n, modes=modes,
                             coeffs=np.zeros_like(modes, dtype=np.complex128))

    @staticmethod
    def from_coeff_map(coeff_map: dict, d: int, n: int) -> "SpectralField":
        """Build a field from {wave vector: complex d-vector}.

        Entries at non-canonical z are folded onto the canonical partner by
        conjugation; inconsistent duplicates are averaged.
        """
        modes = half_space_modes(n, d)
        index = {tuple(int(c) for c in z): k for k, z in enumerate(modes)}
        coeffs = np.zeros((len(modes), d), dtype=np.complex128)
        counts = np.zeros(len(modes))
        for z, v in coeff_map.items():
            zc, sign = canonical_rep(z)
            if zc not in index:
                raise DimensionError(f"mode {z} outside truncation n={n}")
            v = np.asarray(v, dtype=np.complex128)
            coeffs[index[zc]] += v if sign == 1 else np.conj(v)
            counts[index[zc]] += 1
        coeffs[counts > 1] /= counts[counts > 1, None]
        return SpectralField(d=d, n=n, modes=modes, coeffs=coeffs)

    # -- lookups and algebra ------------------------------------------

    def coeff(self, z) -> np.ndarray:
        """Coefficient vector of an arbitrary wave vector (zero if absent)."""
        zc, sign = canonical_rep(z)
        hits = np.nonzero((self.modes == np.array(zc)).all(axis=1))[0]
        if hits.size == 0:
            return np.zeros(self.d, dtype=np.complex128)
        v = self.coeffs[hits[0]]
        return v if sign == 1 else np.conj(v)

    def coeff_map(self) -> dict:
        return {tuple(int(c) for c in z): self.coeffs[k].copy()
                for k, z in enumerate(self.modes)}

    def __mul__(self, scalar: float) -> "SpectralField":
        return SpectralField(self.d, self.n, self.modes, self.coeffs * scalar)

    __rmul__ = __mul__

    def __add__(self, other: "SpectralField") -> "SpectralField":
        if other.d != self.d:
            raise DimensionError("dimension mismatch in field addition")
        n = max(self.n, other.n)
        out = {}
        for f in (self, other):
            for k, z in enumerate(f.modes):
                zt = tuple(int(c) for c in z)
                out[zt] = out.get(zt, 0) + f.coeffs[k]
        modes = half_space_modes(n, self.d)
        coeffs = np.zeros((len(modes), self.d), dtype=np.complex128)
        index = {tuple(int(c) for c in z): k for k, z in enumerate(modes)}
        for zt, v in out.items():
            coeffs[index[zt]] = v
        return SpectralField(self.d, n, modes, coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        return self + (-1.0) * other


@dataclass(frozen=True)
class GridVectorField:
    """Real d-vector samples on the uniform M^d grid of [0,1)^d."""

    d: int
    M: int
    values: np.ndarray  # (d, M, ..., M)

    def __post_init__(self):
        self.values.setflags(write=False)


@dataclass(frozen=True)
class GridTensorField:
    """Real symmetric d x d tensor samples on the uniform M^d grid."""

    d: int
    M: int
    values: np.ndarray  # (d, d, M, ..., M)

    def __post_init__(self):
        self.values.setflags(write=False)
        assert np.allclose(self.values, np.swapaxes(self.values, 0, 1),
                           atol=1e-12 * max(1.0, np.abs(self.values).max()))


def basis_function(idx: BasisIndex, n: int | None = None) -> SpectralField:
    """The basis element as a SpectralField of order n (default: its own)."""
    d = len(idx.z)
    if n is None:
        n = int(max(abs(c) for c in idx.z))
    v = idx.e_vec / np.sqrt(2.0)
    if idx.is_sine:
        v = -1j * v
    return SpectralField.from_coeff_map({idx.z: v}, d=d, n=n)


# ---------------------------------------------------------------------------
# grid transform machinery
# ---------------------------------------------------------------------------


class _GridMap:
    """Precomputed scatter/gather tables between half-space modes and an
    M^d FFT grid, plus the coordinate maps for the real basis."""

    def __init__(self, d: int, n: int, M: int):
        if M < 2 * n + 1:
            raise AliasingError(f"grid M={M} cannot hold modes of order n={n}")
        self.d, self.n, self.M = d, n, M
        self.modes = half_space_modes(n, d)           # (Z, d)
        self.E = _hyperplane_stack(n, d)              # (Z, d-1, d)
        self.K = self.modes.shape[0] * (2 * d - 2)
        shape = (M,) * d
        strides = np.array([M ** (d - 1 - a) for a in range(d)], dtype=np.int64)
        self.pos_flat = (np.mod(self.modes, M) @ strides).astype(np.int64)
        self.neg_flat = (np.mod(-self.modes, M) @ strides).astype(np.int64)
        k1 = np.fft.fftfreq(M, d=1.0 / M)             # integer wavenumbers
        kaxes = np.meshgrid(*([k1] * d), indexing="ij")
        self.kvec = np.stack(kaxes)                   # (d, M, ..., M)
        self.ikvec = 2j * np.pi * self.kvec
        self.shape = shape
        self.vol = M ** d
        # |z|^2 per basis coordinate, flattened in basis order
        zsq = np.einsum("zd,zd->z", self.modes, self.modes).astype(float)
        self.lam_coord = np.repeat(TWO_PI_SQ * zsq, 2 * d - 2)
        self.zsq = zsq

    # coords <-> half-space mode coefficients

    def coords_to_modes(self, x: np.ndarray) -> np.ndarray:
        d = self.d
        c = x.reshape(-1, 2 * d - 2)
        cplx = c[:, : d - 1] - 1j * c[:, d - 1:]
        return np.einsum("zj,zjd->zd", cplx, self.E) / np.sqrt(2.0)

    def modes_to_coords(self, vhat: np.ndarray) -> np.ndarray:
        proj = np.einsum("zd,zjd->zj", vhat, self.E) * np.sqrt(2.0)
        return np.concatenate([proj.real, -proj.imag], axis=1).reshape(-1)

    # mode coefficients <-> spectral FFT array

    def scatter(self, vhat: np.ndarray) -> np.ndarray:
        """Half-space coefficients to a full conjugate-symmetric FFT array."""
        comp = vhat.shape[1] if vhat.ndim == 2 else 1
        A = np.zeros((comp, self.vol), dtype=np.complex128)
        A[:, self.pos_flat] = vhat.T
        A[:, self.neg_flat] = np.conj(vhat.T)
        return A.reshape((comp,) + self.shape)

    def gather(self, A: np.ndarray) -> np.ndarray:
        flat = A.reshape(A.shape[0], self.vol)
        return flat[:, self.pos_flat].T.copy()

    # physical-space evaluation

    def modes_to_grid(self, vhat: np.ndarray) -> np.ndarray:
        A = self.scatter(vhat)
        axes = tuple(range(1, self.d + 1))
        return np.fft.ifftn(A, axes=axes).real * self.vol

    def grid_to_modes(self, values: np.ndarray) -> np.ndarray:
        axes = tuple(range(1, self.d + 1))
        A = np.fft.fftn(values, axes=axes) / self.vol
        return self.gather(A)

    def quad_mean(self, samples: np.ndarray) -> float:
        """Rectangle rule on the unit torus: plain mean over grid points."""
        return float(np.mean(samples))


@lru_cache(maxsize=None)
def grid_map(d: int, n: int, M: int) -> _GridMap:
    return _GridMap(d, n, M)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def field_to_coords(field: SpectralField, n: int | None = None) -> np.ndarray:
    """Real coordinate vector of the field over make_basis(n, d)."""
    if n is None:
        n = field.n
    if field.modes.size:
        active = np.abs(field.coeffs).max(axis=1) > 0
        if active.any() and np.abs(field.modes[active]).max() > n:
            raise DimensionError(
                f"field carries modes beyond basis truncation {n}")
    gm = grid_map(field.d, n, 2 * n + 1)
    vhat = np.zeros((gm.modes.shape[0], field.d), dtype=np.complex128)
    index = {tuple(int(c) for c in z): k for k, z in enumerate(gm.modes)}
    for k, z in enumerate(field.modes):
        zt = tuple(int(c) for c in z)
        if zt in index:
            vhat[index[zt]] = field.coeffs[k]
    return gm.modes_to_coords(vhat)


def coords_to_field(coords: np.ndarray, n: int, d: int) -> SpectralField:
    """Inverse of field_to_coords."""
    gm = grid_map(d, n, 2 * n + 1)
    coords = np.asarray(coords, dtype=float)
    if coords.size != gm.K:
        raise DimensionError(
            f"coordinate vector has length {coords.size}, basis has {gm.K}")
    vhat = gm.coords_to_modes(coords)
    return SpectralField(d=d, n=n, modes=gm.modes, coeffs=vhat)


def to_grid(field: SpectralField, M: int | None = None) -> GridVectorField:
    """Sample the field on the uniform M^d grid (exact for M >= 2n+1)."""
    if M is None:
        M = pairing_grid_size(field.n)
    if M < 2 * field.n + 1:
        raise AliasingError(
            f"M={M} below lossless threshold {2 * field.n + 1} for n={field.n}")
    gm = grid_map(field.d, field.n, M)
    vhat = _aligned_modes(field, gm)
    return GridVectorField(d=field.d, M=M, values=gm.modes_to_grid(vhat))


def from_grid(grid: GridVectorField, n: int) -> dict:
    """Raw half-space mode coefficients of grid samples, order n.

    The output carries no divergence-free constraint; feed it through
    project_div_free to obtain a SpectralField.
    """
    if grid.M < 2 * n + 1:
        raise AliasingError(f"M={grid.M} cannot resolve modes of order {n}")
    gm = grid_map(grid.d, n, grid.M)
    vhat = gm.grid_to_modes(grid.values)
    return {tuple(int(c) for c in z): vhat[k] for k, z in enumerate(gm.modes)}


def project_div_free(raw: dict, d: int, n: int) -> SpectralField:
    """Leray projection of raw mode data onto the divergence-free space.

    Each coefficient is replaced by v - (z.v) z / |z|^2; z = 0 entries are
    dropped.  Idempotent, and the identity on already divergence-free data.
    """
    cleaned = {}
    for z, v in raw.items():
        zt = tuple(int(c) for c in z)
        if all(c == 0 for c in zt):
            continue
        za = np.asarray(zt, dtype=float)
        v = np.asarray(v, dtype=np.complex128)
        cleaned[zt] = v - (za @ v) / (za @ za) * za
    return SpectralField.from_coeff_map(cleaned, d=d, n=n)


def truncate_modes(field: SpectralField, n: int) -> SpectralField:
    """Orthogonal projection onto modes with z in [-n,n]^d (sup-norm box).

    n = 0 lands in the mean-zero space, hence returns the zero field.
    """
    if n <= 0:
        return SpectralField.zero(field.d, 1)
    keep = np.abs(field.modes).max(axis=1) <= n
    return SpectralField(field.d, n, field.modes[keep].copy(),
                         field.coeffs[keep].copy())


def _aligned_modes(field: SpectralField, gm: _GridMap) -> np.ndarray:
    """Field coefficients re-indexed onto gm's mode table."""
    if field.n == gm.n and field.modes.shape == gm.modes.shape:
        return field.coeffs
    vhat = np.zeros((gm.modes.shape[0], field.d), dtype=np.complex128)
    index = {tuple(int(c) for c in z): k for k, z in enumerate(gm.modes)}
    for k, z in enumerate(field.modes):
        zt = tuple(int(c) for c in z)
        if zt not in index:
            raise DimensionError("field mode outside target truncation")
        vhat[index[zt]] = field.coeffs[k]
    return vhat


def inner_product(u: SpectralField, v: SpectralField) -> float:
    """L2 inner product by Parseval: 2 Re sum over stored modes."""
    if u.d != v.d:
        raise DimensionError("dimension mismatch in inner product")
    if u.n == v.n and u.modes.shape == v.modes.shape:
        return float(2.0 * np.real(np.einsum("zd,zd->", u.coeffs, np.conj(v.coeffs))))
    vmap = v.coeff_map()
    acc = 0.0
    for k, z in enumerate(u.modes):
        zt = tuple(int(c) for c in z)
        if zt in vmap:
            acc += 2.0 * float(np.real(u.coeffs[k] @ np.conj(vmap[zt])))
    return acc


def _bessel_weights(field: SpectralField, alpha: float) -> np.ndarray:
    zsq = np.einsum("zd,zd->z", field.modes, field.modes).astype(float)
    return (1.0 + TWO_PI_SQ * zsq) ** (alpha / 2.0)


def sobolev_norm(field: SpectralField, p: float, alpha: float,
                 M: int | None = None, quadrature: bool = False) -> float:
    """Bessel-potential Sobolev norm || (1-Laplacian)^{alpha/2} v ||_{L_p}.

    The multiplier (1 + 4 pi^2 |z|^2)^{alpha/2} is applied mode by mode.
    For p = 2 the exact Parseval sum is returned unless quadrature=True;
    other p use the uniform-grid rectangle rule at resolution M
    (default max(2(2n+1), 32) per axis).
    """
    if p < 1:
        raise ValueError(f"L_p norm needs p >= 1, got p={p}")
    w = _bessel_weights(field, alpha)
    if p == 2 and not quadrature:
        return float(np.sqrt(
            2.0 * np.sum(w[:, None] ** 2 * np.abs(field.coeffs) ** 2)))
    if M is None:
        M = norm_grid_size(field.n)
    weighted = SpectralField(field.d, field.n, field.modes,
                             field.coeffs * w[:, None])
    g = to_grid(weighted, M)
    mag = np.sqrt(np.sum(g.values ** 2, axis=0))
    return float(np.mean(mag ** p) ** (1.0 / p))


def _derivative_lp_norm(field: SpectralField, p: float, order: int,
                        M: int | None) -> float:
    """L_p norm of the gradient (order 1, Frobenius) or Laplacian (order 2)."""
    if p < 1:
        raise ValueError(f"L_p norm needs p >= 1, got p={p}")
    zsq = np.einsum("zd,zd->z", field.modes, field.modes).astype(float)
    if p == 2:
        fac = (TWO_PI_SQ * zsq) ** order
        return float(np.sqrt(
            2.0 * np.sum(fac[:, None] * np.abs(field.coeffs) ** 2)))
    if M is None:
        M = norm_grid_size(field.n)
    gm = grid_map(field.d, field.n, M)
    vhat = _aligned_modes(field, gm)
    A = gm.scatter(vhat)
    axes = tuple(range(1, field.d + 1))
    if order == 1:
        Gh = A[:, None] * gm.ikvec[None, :]
        G = np.fft.ifftn(Gh, axes=tuple(range(2, field.d + 2))).real * gm.vol
        mag = np.sqrt(np.sum(G ** 2, axis=(0, 1)))
    else:
        ksq = np.sum(gm.kvec ** 2, axis=0)
        Lh = -TWO_PI_SQ * ksq * A
        L = np.fft.ifftn(Lh, axes=axes).real * gm.vol
        mag = np.sqrt(np.sum(L ** 2, axis=0))
    return float(np.mean(mag ** p) ** (1.0 / p))


def gradient_lp_norm(field: SpectralField, p: float, M: int | None = None) -> float:
    """|| |grad v|_F ||_{L_p}; exact Parseval sum for p = 2."""
    return _derivative_lp_norm(field, p, 1, M)


def laplacian_lp_norm(field: SpectralField, p: float, M: int | None = None) -> float:
    """|| Laplacian v ||_{L_p}; exact Parseval sum for p = 2."""
    return _derivative_lp_norm(field, p, 2, M)


def structural_defects(field: SpectralField, M: int | None = None):
    """Measured (divergence, conjugate-symmetry) defects of a field.

    Divergence defect is max_z |z . v_z| over stored modes.  The conjugate
    defect is measured on the full DFT of the sampled field, so it reflects
    the actual realness of the physical samples rather than the storage
    convention.
    """
    if field.modes.size == 0:
        return 0.0, 0.0
    div = float(np.max(np.abs(np.einsum("zd,zd->z", field.modes, field.coeffs))))
    if M is None:
        M = pairing_grid_size(field.n)
    g = to_grid(field, M)
    axes = tuple(range(1, field.d + 1))
    A = np.fft.fftn(g.values, axes=axes) / (M ** field.d)
    flip = (slice(None),) + (slice(None, None, -1),) * field.d
    Aneg = np.roll(np.conj(A[flip]), 1, axis=axes)
    conj_defect = float(np.max(np.abs(A - Aneg)))
    return div, conj_defect
