"""Nonlinear operators of the power-law fluid and their weak-form pairings.

The stress law is tau(v) = 2 nu (1 + |e(v)|^2)^((p-2)/2) e(v) with e(v) the
symmetrized velocity gradient and |.| the Frobenius norm.  Nonlinearities
are evaluated pseudo-spectrally: derivatives in coefficient space, products
pointwise on a grid oversampled to twice the one-sided mode count per axis,
which keeps quadratic products and all cubic pairings alias-free.  The
non-polynomial stress for p != 2 is evaluated on the same grid; its residual
aliasing is part of the quadrature error budget at small truncations.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .spectral import (
    BasisIndex,
    GridTensorField,
    GridVectorField,
    SpectralField,
    _GridMap,
    basis_function,
    field_to_coords,
    grid_map,
    pairing_grid_size,
)

__all__ = [
    "FluidParams",
    "rate_of_strain",
    "rate_of_strain_modes",
    "stress",
    "pairing_stress",
    "convection",
    "pairing_convection",
    "drift_coord",
    "drift",
    "drift_coords",
    "drift_and_dissipation",
    "dissipation_pairing",
]


@dataclass(frozen=True)
class FluidParams:
    """Power-law exponent p > 1 and kinematic viscosity nu > 0."""

    p: float
    nu: float

    def __post_init__(self):
        if not self.p > 1:
            raise ValueError(f"power-law exponent must exceed 1, got p={self.p}")
        if not self.nu > 0:
            raise ValueError(f"viscosity must be positive, got nu={self.nu}")


@lru_cache(maxsize=None)
def _workspace(d: int, n: int) -> _GridMap:
    return grid_map(d, n, pairing_grid_size(n))


def _common_map(*fields: SpectralField, M: int | None = None) -> _GridMap:
    d = fields[0].d
    for f in fields:
        if f.d != d:
            raise ValueError("fields live in different dimensions")
    n = max(f.n for f in fields)
    if M is None:
        return _workspace(d, n)
    return grid_map(d, n, M)


def _grid_and_gradient(field: SpectralField, gm: _GridMap):
    """Physical samples V[i] and gradient G[i, j] = d_j v_i on gm's grid."""
    from .spectral import _aligned_modes

    vhat = _aligned_modes(field, gm)
    A = gm.scatter(vhat)
    axes = tuple(range(1, gm.d + 1))
    V = np.fft.ifftn(A, axes=axes).real * gm.vol
    Gh = A[:, None] * gm.ikvec[None, :]
    G = np.fft.ifftn(Gh, axes=tuple(range(2, gm.d + 2))).real * gm.vol
    return V, G


def _strain_from_gradient(G: np.ndarray) -> np.ndarray:
    return 0.5 * (G + np.swapaxes(G, 0, 1))


def _stress_from_strain(e: np.ndarray, params: FluidParams) -> np.ndarray:
    esq = np.sum(e ** 2, axis=(0, 1))
    return 2.0 * params.nu * (1.0 + esq) ** ((params.p - 2.0) / 2.0) * e


def rate_of_strain(v: SpectralField, M: int | None = None) -> GridTensorField:
    """Symmetrized velocity gradient (d_i v_j + d_j v_i) / 2 on the grid.

    Derivatives are exact (spectral); the trace vanishes identically for
    divergence-free input.
    """
    gm = _common_map(v, M=M)
    _, G = _grid_and_gradient(v, gm)
    return GridTensorField(d=v.d, M=gm.M, values=_strain_from_gradient(G))


def rate_of_strain_modes(v: SpectralField):
    """Spectral form of the strain: (modes, tensor coefficients (Z, d, d))."""
    z = v.modes.astype(float)
    strain = 1j * np.pi * (z[:, :, None] * v.coeffs[:, None, :] +
                           z[:, None, :] * v.coeffs[:, :, None])
    return v.modes, strain


def stress(v: SpectralField, params: FluidParams, M: int | None = None) -> GridTensorField:
    """Power-law extra stress 2 nu (1 + |e|^2)^((p-2)/2) e on the grid."""
    gm = _common_map(v, M=M)
    _, G = _grid_and_gradient(v, gm)
    e = _strain_from_gradient(G)
    return GridTensorField(d=v.d, M=gm.M, values=_stress_from_strain(e, params))


def pairing_stress(phi: SpectralField, v: SpectralField, params: FluidParams,
                   M: int | None = None) -> float:
    """< e(phi), tau(v) > by grid quadrature of the tensor contraction.

    Equals minus the weak divergence pairing < phi, div tau(v) >.
    """
    gm = _common_map(phi, v, M=M)
    _, Gv = _grid_and_gradient(v, gm)
    _, Gp = _grid_and_gradient(phi, gm)
    tau = _stress_from_strain(_strain_from_gradient(Gv), params)
    ephi = _strain_from_gradient(Gp)
    return gm.quad_mean(np.sum(tau * ephi, axis=(0, 1)))


def convection(v: SpectralField, w: SpectralField, M: int | None = None) -> GridVectorField:
    """Advection (v . grad) w sampled on the oversampled grid."""
    gm = _common_map(v, w, M=M)
    Vv, _ = _grid_and_gradient(v, gm)
    _, Gw = _grid_and_gradient(w, gm)
    vals = np.einsum("j...,ij...->i...", Vv, Gw)
    return GridVectorField(d=v.d, M=gm.M, values=vals)


def pairing_convection(w: SpectralField, v: SpectralField, phi: SpectralField,
                       M: int | None = None) -> float:
    """Trilinear pairing < w, (v . grad) phi > by alias-free quadrature.

    Antisymmetric under swapping w and phi for divergence-free v, with the
    self-pairing < w, (v . grad) w > vanishing.
    """
    gm = _common_map(w, v, phi, M=M)
    Vw, _ = _grid_and_gradient(w, gm)
    Vv, _ = _grid_and_gradient(v, gm)
    _, Gp = _grid_and_gradient(phi, gm)
    adv = np.einsum("j...,ij...->i...", Vv, Gp)
    return gm.quad_mean(np.sum(Vw * adv, axis=0))


def dissipation_pairing(v: SpectralField, params: FluidParams,
                        M: int | None = None) -> float:
    """< e(v), tau(v) >, the (nonnegative) viscous dissipation rate."""
    return pairing_stress(v, v, params, M=M)


# ---------------------------------------------------------------------------
# Galerkin drift
# ---------------------------------------------------------------------------


def _drift_core(x: np.ndarray, gm: _GridMap, params: FluidParams):
    """Drift coordinates and dissipation < e, tau > in one grid pass.

    Field values and the full gradient go through one batched inverse
    transform, the advection and stress go back through one batched
    forward transform; this keeps the per-step cost transform-bound.
    """
    d = gm.d
    axes = tuple(range(1, d + 1))
    vhat = gm.coords_to_modes(x)
    A = gm.scatter(vhat)
    Gh = (A[:, None] * gm.ikvec[None, :]).reshape((d * d,) + gm.shape)
    down = np.fft.ifftn(np.concatenate([A, Gh]), axes=axes).real * gm.vol
    V = down[:d]
    G = down[d:].reshape((d, d) + gm.shape)
    e = _strain_from_gradient(G)
    tau = _stress_from_strain(e, params)
    conv = np.einsum("j...,ij...->i...", V, G)
    diss = gm.quad_mean(np.sum(e * tau, axis=(0, 1)))
    up = np.fft.fftn(
        np.concatenate([conv, tau.reshape((d * d,) + gm.shape)]),
        axes=axes) / gm.vol
    conv_hat = up[:d]
    tau_hat = up[d:].reshape((d, d) + gm.shape)
    div_tau_hat = np.einsum("j...,ij...->i...", gm.ikvec, tau_hat)
    bhat = gm.gather(div_tau_hat - conv_hat)
    return gm.modes_to_coords(bhat), diss


def drift_coords(x: np.ndarray, d: int, n: int, params: FluidParams) -> np.ndarray:
    """Projected drift of the Galerkin system in basis coordinates."""
    return _drift_core(x, _workspace(d, n), params)[0]


def drift_and_dissipation(x: np.ndarray, d: int, n: int, params: FluidParams):
    """Drift coordinates together with < e(X), tau(X) > (shared grid pass)."""
    return _drift_core(x, _workspace(d, n), params)


def drift(X: SpectralField, n: int, params: FluidParams) -> np.ndarray:
    """Drift coordinate vector over make_basis(n, d) for a state of order <= n."""
    x = field_to_coords(X, n=n)
    return drift_coords(x, X.d, n, params)


def drift_coord(X: SpectralField, idx: BasisIndex, params: FluidParams) -> float:
    """Single drift coordinate < X, (X . grad) psi > - < tau(X), e(psi) >.

    Quadrature grid matches the vectorized drift at the covering truncation,
    so the two routes agree to roundoff.
    """
    n = max(X.n, max(abs(c) for c in idx.z))
    psi = basis_function(idx, n=n)
    M = pairing_grid_size(n)
    return (pairing_convection(X, X, psi, M=M)
            - pairing_stress(psi, X, params, M=M))
