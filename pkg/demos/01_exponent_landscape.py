"""Where does the power-law fluid theory live?

Walks the exponent landscape: the three critical exponents p1, p2, p3 as
the dimension grows, the existence range they carve out (with the famous
gap at d = 9), and the uniqueness threshold 1 + d/2.
"""

import numpy as np

from splf import exponents as ex

print("critical exponents by dimension")
print(f"{'d':>3} {'p1':>10} {'p2':>10} {'p3':>10}  existence range")
for d in range(2, 13):
    c = ex.critical_exponents(d)
    if d <= 8:
        rng = f"({c.p1}, inf)"
    elif d == 9:
        rng = f"({c.p1}, {c.p2}) u ({c.p3:.4f}, inf)"
    else:
        rng = f"({c.p3:.4f}, inf)"
    p2 = "inf" if c.p2 == float("inf") else f"{float(c.p2):.4f}"
    print(f"{d:>3} {float(c.p1):>10.4f} {p2:>10} {c.p3:>10.4f}  {rng}")

print()
print("the d = 9 curiosity: p2(9) < p3(9), so the range splits")
c9 = ex.critical_exponents(9)
for p in (2.50, 2.56, 2.58, 2.61, 2.65):
    tag = "admissible" if ex.admissible_existence(p, 9) else "gap"
    print(f"  p = {p:.2f}: {tag}")

print()
print("uniqueness thresholds 1 + d/2 and the Newtonian case p = 2")
for d in (2, 3, 4):
    t = ex.uniqueness_threshold(d)
    ok = "p=2 unique" if 2 >= t else "p=2 not covered"
    print(f"  d = {d}: threshold {t} ({ok})")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ds = np.arange(2, 25)
    p1 = [float(ex.critical_exponents(d).p1) for d in ds]
    p2 = [min(float(ex.critical_exponents(d).p2), 6.0) for d in ds]
    p3 = [ex.critical_exponents(d).p3 for d in ds]
    fig, axs = plt.subplots(1, 2, figsize=(10, 4))
    axs[0].plot(ds, p1, "o-", label="p1")
    axs[0].plot(ds, p2, "s-", label="p2 (clipped at 6)")
    axs[0].plot(ds, p3, "^-", label="p3")
    axs[0].axvline(9, color="gray", ls=":", label="d = 9 gap")
    axs[0].set_xlabel("dimension d")
    axs[0].set_ylabel("exponent")
    axs[0].legend()
    axs[0].set_title("critical exponents")

    ps = np.linspace(1.8, 3.2, 300)
    lam3 = [ex.regularity_weight(p, 3) for p in ps]
    axs[1].plot(ps, lam3, label="regularity weight, d = 3")
    axs[1].axvline(3.0, color="gray", ls=":")
    axs[1].set_xlabel("p")
    axs[1].legend()
    axs[1].set_title("dissipation weight vanishes for p >= 3")
    fig.tight_layout()
    fig.savefig("demo01_exponents.png", dpi=120)
    print("\nwrote demo01_exponents.png")
except ImportError:
    print("\n(matplotlib not installed; skipping the figure)")
