"""Covariance spectra and increment sampling for the driving Wiener process.

The covariance operator is diagonal in the divergence-free basis: each basis
element (z, j) carries a nonnegative eigenvalue gamma.  Diagonality makes the
operator commute with the Laplacian automatically, keeps truncated traces
finite sums, and lets increments be sampled coordinatewise as independent
Gaussians of variance gamma * dt.  Mapping sampled coordinates back to a
field yields divergence-free noise by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .spectral import TWO_PI_SQ, half_space_modes

__all__ = [
    "SpectrumError",
    "PowerLawSpectrum",
    "ExplicitSpectrum",
    "validate_spectrum",
    "gamma_vector",
    "trace_truncated",
    "operator_norm",
    "sample_increment",
]


class SpectrumError(ValueError):
    """Covariance descriptor fails nonnegativity or trace-class conditions."""


@dataclass(frozen=True)
class PowerLawSpectrum:
    """Parametric family gamma_(z,j) = c (1 + 4 pi^2 |z|^2)^(-s).

    Trace class on the full lattice needs s > d/2; the strengthened
    condition s > (d+2)/2 keeps the Laplacian-weighted trace finite as well
    and is what validate_spectrum enforces.
    """

    c: float
    s: float


@dataclass(frozen=True)
class ExplicitSpectrum:
    """Finite list of (z, j, gamma) eigenvalue assignments.

    Wave vectors are canonicalized to the stored half-space; all unlisted
    basis elements carry gamma = 0.
    """

    entries: Tuple[Tuple[tuple, int, float], ...]

    @staticmethod
    def from_items(items) -> "ExplicitSpectrum":
        from .spectral import canonical_rep

        canon = []
        for z, j, g in items:
            zc, _ = canonical_rep(z)
            canon.append((zc, int(j), float(g)))
        return ExplicitSpectrum(entries=tuple(canon))


def validate_spectrum(spectrum, d: int):
    """Check nonnegativity and (strengthened) trace-class conditions.

    Returns the spectrum unchanged on success; raises SpectrumError naming
    the divergent sum otherwise.
    """
    if isinstance(spectrum, PowerLawSpectrum):
        if spectrum.c < 0:
            raise SpectrumError(f"power spectrum amplitude c={spectrum.c} is negative")
        if spectrum.c > 0 and not spectrum.s > (d + 2) / 2:
            raise SpectrumError(
                f"sum over Z^{d} of |z|^2 (1 + 4 pi^2 |z|^2)^(-s) diverges for "
                f"s={spectrum.s} <= (d+2)/2 = {(d + 2) / 2}")
        return spectrum
    if isinstance(spectrum, ExplicitSpectrum):
        for z, j, g in spectrum.entries:
            if len(z) != d:
                raise SpectrumError(f"entry {z} has wrong dimension (d={d})")
            if not np.isfinite(g) or g < 0:
                raise SpectrumError(f"eigenvalue at (z={z}, j={j}) is {g}, must be >= 0")
            if not 1 <= j <= 2 * d - 2:
                raise SpectrumError(f"branch index j={j} outside 1..{2 * d - 2}")
        return spectrum
    raise SpectrumError(f"unknown covariance descriptor {type(spectrum).__name__}")


def gamma_vector(spectrum, n: int, d: int) -> np.ndarray:
    """Eigenvalues over make_basis(n, d) in basis order (length Z*(2d-2))."""
    modes = half_space_modes(n, d)
    nj = 2 * d - 2
    if isinstance(spectrum, PowerLawSpectrum):
        zsq = np.einsum("zd,zd->z", modes, modes).astype(float)
        per_mode = spectrum.c * (1.0 + TWO_PI_SQ * zsq) ** (-spectrum.s)
        return np.repeat(per_mode, nj)
    if isinstance(spectrum, ExplicitSpectrum):
        index = {tuple(int(c) for c in z): k for k, z in enumerate(modes)}
        out = np.zeros(len(modes) * nj)
        for z, j, g in spectrum.entries:
            if z in index:
                out[index[z] * nj + (j - 1)] = g
        return out
    raise SpectrumError(f"unknown covariance descriptor {type(spectrum).__name__}")


def trace_truncated(spectrum, n: int, d: int) -> float:
    """Trace of the covariance restricted to the order-n basis."""
    return float(gamma_vector(spectrum, n, d).sum())


def operator_norm(spectrum, n: int, d: int) -> float:
    """Largest eigenvalue on the order-n basis (diagonal operator)."""
    g = gamma_vector(spectrum, n, d)
    return float(g.max()) if g.size else 0.0


def sample_increment(spectrum, n: int, d: int, dt: float,
                     rng: np.random.Generator,
                     gamma: np.ndarray | None = None) -> np.ndarray:
    """One Wiener increment over dt in basis coordinates.

    Components are independent Normal(0, gamma * dt) draws in basis order.
    Pass a precomputed gamma_vector to skip recomputation in tight loops.
    """
    if dt <= 0:
        raise ValueError(f"time step must be positive, got dt={dt}")
    if gamma is None:
        gamma = gamma_vector(spectrum, n, d)
    return rng.standard_normal(gamma.size) * np.sqrt(gamma * dt)
