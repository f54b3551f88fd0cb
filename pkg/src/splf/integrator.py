"""Time discretization of the Galerkin system and trajectory simulation.

The truncated dynamics form a finite-dimensional SDE with additive noise in
the real basis coordinates.  Fixed-step explicit schemes are provided:
plain Euler-Maruyama, a tamed variant whose drift increment is bounded
(the drift grows like degree p-1, so plain Euler can explode for p > 2),
and a semi-implicit scheme where the linear Stokes part is inverted exactly
mode by mode.  All random draws are counter-based, so a trajectory is a
pure function of (config, path_index).
"""

from __future__ import annotations

import math
import numbers
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import rng
from .constitutive import FluidParams, drift_and_dissipation
from .noise import (ExplicitSpectrum, PowerLawSpectrum, gamma_vector,
                    validate_spectrum)
from .spectral import TWO_PI_SQ, canonical_rep, grid_map, norm_grid_size

__all__ = [
    "ConfigError",
    "StepFailure",
    "SingleModeInit",
    "GaussianInit",
    "SimConfig",
    "TrajectoryRecord",
    "step",
    "simulate",
    "simulate_paired",
    "simulate_ensemble",
    "initial_coords",
    "expected_initial_energy",
]

STEPPERS = ("euler_maruyama", "tamed", "semi_implicit")


class ConfigError(ValueError):
    """A simulation parameter violates its contract (message names the field)."""


class StepFailure(RuntimeError):
    def __init__(self, step_index: int, norm: float):
        self.step_index = step_index
        self.norm = norm
        super().__init__(
            f"non-finite state or drift at step {step_index} (|X|_2 = {norm})")


@dataclass(frozen=True)
class SingleModeInit:
    """Deterministic initial state: amplitude times one basis element."""

    z: tuple
    j: int
    amplitude: float


@dataclass(frozen=True)
class GaussianInit:
    """Random initial state with independent Gaussian basis coordinates of
    variance sigma^2 (1 + 4 pi^2 |z|^2)^(-decay)."""

    sigma: float
    decay: float


InitDescriptor = Union[SingleModeInit, GaussianInit]
SpectrumDescriptor = Union[PowerLawSpectrum, ExplicitSpectrum]


@dataclass(frozen=True)
class SimConfig:
    d: int
    p: float
    nu: float
    n: int
    dt: float
    T: float
    n_paths: int
    seed: int
    init: InitDescriptor
    gamma: SpectrumDescriptor
    stepper: str = "tamed"
    record_every: int = 1
    norm_ceiling: float = 1e6

    def __post_init__(self):
        if not isinstance(self.d, numbers.Integral) or self.d < 2:
            raise ConfigError(f"d: must be an integer >= 2, got {self.d}")
        if not self.p > 1:
            raise ConfigError(f"p: must exceed 1, got {self.p}")
        if not self.nu > 0:
            raise ConfigError(f"nu: must be positive, got {self.nu}")
        if not isinstance(self.n, numbers.Integral) or self.n < 1:
            raise ConfigError(f"n: must be an integer >= 1, got {self.n}")
        if not self.dt > 0:
            raise ConfigError(f"dt: must be positive, got {self.dt}")
        if not self.T >= self.dt:
            raise ConfigError(f"T: must be at least dt, got T={self.T}, dt={self.dt}")
        if not (isinstance(self.n_paths, numbers.Integral) and self.n_paths >= 1):
            raise ConfigError(f"n_paths: must be an integer >= 1, got {self.n_paths}")
        if not (isinstance(self.seed, numbers.Integral) and self.seed >= 0):
            raise ConfigError(f"seed: must be a nonnegative integer, got {self.seed}")
        if self.stepper not in STEPPERS:
            raise ConfigError(
                f"stepper: unknown scheme {self.stepper!r}, choose from {STEPPERS}")
        if not (isinstance(self.record_every, numbers.Integral) and self.record_every >= 1):
            raise ConfigError(f"record_every: must be an integer >= 1")
        if not self.norm_ceiling > 0:
            raise ConfigError(f"norm_ceiling: must be positive")
        if isinstance(self.init, SingleModeInit):
            if len(self.init.z) != self.d:
                raise ConfigError(f"init.z: wrong dimension for d={self.d}")
            if all(c == 0 for c in self.init.z):
                raise ConfigError("init.z: must be nonzero (mean-zero space)")
            if max(abs(c) for c in self.init.z) > self.n:
                raise ConfigError(f"init.z: outside truncation n={self.n}")
            if not 1 <= self.init.j <= 2 * self.d - 2:
                raise ConfigError(f"init.j: outside 1..{2 * self.d - 2}")
        elif isinstance(self.init, GaussianInit):
            if self.init.sigma < 0:
                raise ConfigError("init.sigma: must be nonnegative")
        else:
            raise ConfigError(f"init: unknown descriptor {type(self.init).__name__}")
        validate_spectrum(self.gamma, self.d)

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.T / self.dt - 1e-9))

    @property
    def dt_eff(self) -> float:
        """Step actually used: T snapped to an integer number of steps."""
        return self.T / self.n_steps

    @property
    def params(self) -> FluidParams:
        return FluidParams(p=self.p, nu=self.nu)


@dataclass
class TrajectoryRecord:
    """Diagnostics of one path at the recorded times.

    Running integrals use the left-endpoint rule matching the discrete Ito
    identity of the explicit schemes, so they are nondecreasing and the
    discrete energy balance closes up to the stepper's own bias.
    """

    path_index: int
    dt: float
    times: np.ndarray       # (R,)
    coords: np.ndarray      # (R, K)
    norm_l2_sq: np.ndarray  # (R,)  ||X||_2^2
    norm_p1_p: np.ndarray   # (R,)  ||X||_{p,1}^p
    int_diss: np.ndarray    # (R,)  int_0^t < e(X), tau(X) > ds
    int_gamma: np.ndarray   # (R,)  int_0^t < Gamma X, X > ds
    diverged: bool = False
    diverged_step: Optional[int] = None

    @property
    def final_coords(self) -> np.ndarray:
        return self.coords[-1]


def _basis_position(d: int, n: int, z: tuple, j: int) -> int:
    from .spectral import half_space_modes

    modes = half_space_modes(n, d)
    index = {tuple(int(c) for c in m): k for k, m in enumerate(modes)}
    return index[z] * (2 * d - 2) + (j - 1)


def initial_coords(config: SimConfig, path_index: int) -> np.ndarray:
    """Initial basis coordinates for one path (pure in (seed, path))."""
    gm = grid_map(config.d, config.n, 2 * config.n + 1)
    if isinstance(config.init, SingleModeInit):
        x = np.zeros(gm.K)
        zc, sign = canonical_rep(config.init.z)
        amp = config.init.amplitude
        if config.init.j >= config.d and sign < 0:
            amp = -amp  # sine branch is odd under z -> -z
        x[_basis_position(config.d, config.n, zc, config.init.j)] = amp
        return x
    g = rng.stream(config.seed, path_index, 0, rng.PURPOSE_INIT)
    std = config.init.sigma * (1.0 + gm.lam_coord) ** (-config.init.decay / 2.0)
    return g.standard_normal(gm.K) * std


def expected_initial_energy(config: SimConfig) -> float:
    """Exact E ||X_0||_2^2 for either initial-condition family."""
    if isinstance(config.init, SingleModeInit):
        return config.init.amplitude ** 2
    gm = grid_map(config.d, config.n, 2 * config.n + 1)
    var = config.init.sigma ** 2 * (1.0 + gm.lam_coord) ** (-config.init.decay)
    return float(var.sum())


def _advance(x: np.ndarray, dt: float, dW: np.ndarray, b: np.ndarray,
             stepper: str, nu: float, lam: np.ndarray) -> np.ndarray:
    if stepper == "euler_maruyama":
        return x + dt * b + dW
    if stepper == "tamed":
        return x + dt * b / (1.0 + dt * np.linalg.norm(b)) + dW
    # semi-implicit: exact per-mode solve of the Stokes part
    return (x + dt * (b + nu * lam * x) + dW) / (1.0 + dt * nu * lam)


def step(x: np.ndarray, dt: float, dW: np.ndarray, d: int, n: int,
         params: FluidParams, stepper: str = "tamed") -> np.ndarray:
    """One time step of the chosen scheme from state x with increment dW."""
    if dt <= 0:
        raise ConfigError(f"dt: must be positive, got {dt}")
    if stepper not in STEPPERS:
        raise ConfigError(f"stepper: unknown scheme {stepper!r}")
    b, _ = drift_and_dissipation(x, d, n, params)
    if not np.all(np.isfinite(b)):
        raise StepFailure(0, float(np.linalg.norm(x)))
    lam = grid_map(d, n, 2 * n + 1).lam_coord
    return _advance(x, dt, dW, b, stepper, params.nu, lam)


class _NormP1:
    """Evaluator of ||X||_{p,1}^p from coordinates (quadrature for p != 2)."""

    def __init__(self, d: int, n: int, p: float):
        self.p = p
        self.gm = grid_map(d, n, norm_grid_size(n))
        zsq = self.gm.zsq
        self.w_mode = np.sqrt(1.0 + TWO_PI_SQ * zsq)      # per half-space mode
        self.w_coord_sq = (1.0 + self.gm.lam_coord)       # per coordinate

    def __call__(self, x: np.ndarray) -> float:
        if self.p == 2:
            return float(np.sum(self.w_coord_sq * x * x))
        vhat = self.gm.coords_to_modes(x) * self.w_mode[:, None]
        g = self.gm.modes_to_grid(vhat)
        mag = np.sqrt(np.sum(g ** 2, axis=0))
        return float(np.mean(mag ** self.p))


class _PathLoop:
    """Shared machinery for single and paired path integration."""

    def __init__(self, config: SimConfig):
        self.config = config
        self.gamma = gamma_vector(config.gamma, config.n, config.d)
        self.lam = grid_map(config.d, config.n, 2 * config.n + 1).lam_coord
        self.norm_p1 = _NormP1(config.d, config.n, config.p)
        self.params = config.params
        self.dt = config.dt_eff
        self.n_steps = config.n_steps
        self.sqrt_gdt = np.sqrt(self.gamma * self.dt)

    def increment(self, path_index: int, k: int) -> np.ndarray:
        g = rng.stream(self.config.seed, path_index, k, rng.PURPOSE_INCREMENT)
        return g.standard_normal(self.gamma.size) * self.sqrt_gdt

    def run(self, path_index: int, x0: np.ndarray,
            shared_noise_path: Optional[int] = None) -> TrajectoryRecord:
        c = self.config
        noise_path = path_index if shared_noise_path is None else shared_noise_path
        x = x0.copy()
        times, coords, l2, p1, i_diss, i_gam = [], [], [], [], [], []
        int_diss = 0.0
        int_gamma = 0.0
        diverged = False
        diverged_step = None

        def record(t):
            times.append(t)
            coords.append(x.copy())
            l2.append(float(x @ x))
            p1.append(self.norm_p1(x))
            i_diss.append(int_diss)
            i_gam.append(int_gamma)

        for k in range(self.n_steps):
            if k % c.record_every == 0:
                record(k * self.dt)
            b, diss = drift_and_dissipation(x, c.d, c.n, self.params)
            if not np.all(np.isfinite(b)):
                diverged, diverged_step = True, k
                break
            int_diss += self.dt * diss
            int_gamma += self.dt * float(self.gamma @ (x * x))
            x = _advance(x, self.dt, self.increment(noise_path, k), b,
                         c.stepper, c.nu, self.lam)
            nrm = float(np.linalg.norm(x))
            if not np.isfinite(nrm) or nrm > c.norm_ceiling:
                diverged, diverged_step = True, k + 1
                break
        if not diverged:
            record(self.n_steps * self.dt)
        return TrajectoryRecord(
            path_index=path_index, dt=self.dt,
            times=np.array(times), coords=np.array(coords),
            norm_l2_sq=np.array(l2), norm_p1_p=np.array(p1),
            int_diss=np.array(i_diss), int_gamma=np.array(i_gam),
            diverged=diverged, diverged_step=diverged_step)


def simulate(config: SimConfig, path_index: int) -> TrajectoryRecord:
    """Integrate one path from its configured initial condition to T."""
    loop = _PathLoop(config)
    return loop.run(path_index, initial_coords(config, path_index))


def simulate_paired(config: SimConfig, path_index: int,
                    init_a: np.ndarray, init_b: np.ndarray):
    """Two trajectories driven by the identical noise stream.

    Initial conditions are basis coordinate vectors; the same increments
    (keyed by this path_index) feed both runs step for step.
    """
    loop = _PathLoop(config)
    rec_a = loop.run(path_index, np.asarray(init_a, dtype=float),
                     shared_noise_path=path_index)
    rec_b = loop.run(path_index, np.asarray(init_b, dtype=float),
                     shared_noise_path=path_index)
    return rec_a, rec_b


def _worker(payload):
    config, indices = payload
    loop = _PathLoop(config)
    return [loop.run(i, initial_coords(config, i)) for i in indices]


def max_workers() -> int:
    """Worker cap from SPLF_THREADS (default 1 = sequential)."""
    try:
        return max(1, int(os.environ.get("SPLF_THREADS", "1")))
    except ValueError:
        return 1


def simulate_ensemble(config: SimConfig,
                      path_indices: Optional[Sequence[int]] = None):
    """All paths of the ensemble, in path order.

    Paths are independent; with SPLF_THREADS > 1 they are farmed out to
    worker processes.  Results are always assembled in path-index order so
    downstream reductions are scheduling-independent.
    """
    if path_indices is None:
        path_indices = range(config.n_paths)
    indices = list(path_indices)
    workers = max_workers()
    if workers == 1 or len(indices) < 2 * workers:
        loop = _PathLoop(config)
        return [loop.run(i, initial_coords(config, i)) for i in indices]
    chunks = [indices[i::workers] for i in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        results = list(ex.map(_worker, [(config, ch) for ch in chunks]))
    by_index = {}
    for chunk, recs in zip(chunks, results):
        for i, r in zip(chunk, recs):
            by_index[i] = r
    return [by_index[i] for i in indices]
