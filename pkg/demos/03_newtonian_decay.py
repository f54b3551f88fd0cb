"""Sanity anchor: the Newtonian special case has a closed form.

At p = 2 a single divergence-free mode feels no self-advection and decays
under pure Stokes friction like exp(-nu 4 pi^2 |z|^2 t).  The explicit
scheme tracks that to first order in dt, and the defect halves on cue.
"""

import dataclasses

import numpy as np

from splf import integrator as it
from splf import noise

LAM = 4.0 * np.pi ** 2  # Stokes rate of the |z|^2 = 1 modes

base = it.SimConfig(
    d=2, p=2.0, nu=1.0, n=2, dt=1e-3, T=0.1, n_paths=1, seed=0,
    init=it.SingleModeInit(z=(1, 0), j=1, amplitude=1.0),
    gamma=noise.ExplicitSpectrum(entries=()),
    stepper="euler_maruyama", record_every=10)

rec = it.simulate(base, 0)
print("      t     simulated    exact       error")
for t, e2 in zip(rec.times, rec.norm_l2_sq):
    exact = np.exp(-LAM * t)
    print(f"  {t:.3f}  {np.sqrt(e2):.6f}  {exact:.6f}  {np.sqrt(e2) - exact:+.2e}")

print("\nfirst-order convergence of the terminal error:")
prev = None
for dt in (2e-3, 1e-3, 5e-4, 2.5e-4):
    cfg = dataclasses.replace(base, dt=dt)
    r = it.simulate(cfg, 0)
    err = abs(np.sqrt(r.norm_l2_sq[-1]) - np.exp(-LAM * cfg.T))
    note = f"  ratio vs previous: {prev / err:.2f}" if prev else ""
    print(f"  dt = {dt:.1e}: |error| = {err:.3e}{note}")
    prev = err

print("\nsteppers on the same problem (dt = 1e-3):")
for stepper in ("euler_maruyama", "tamed", "semi_implicit"):
    cfg = dataclasses.replace(base, stepper=stepper)
    r = it.simulate(cfg, 0)
    err = abs(np.sqrt(r.norm_l2_sq[-1]) - np.exp(-LAM * cfg.T))
    print(f"  {stepper:>15}: terminal error {err:.3e}")
