"""Feynman-Kac decay on the torus and the 2-sphere.

For constant potentials the estimator is exact path by path.  For
f = 1 + x/2 on the sphere the estimate sits between the decays for the
smallest and largest values of f, and the fitted rate gives a lower bound
on the bottom of the spectrum of Δ + f.
"""

from math import exp

from bochner import stochastic as sto

res = sto.feynman_kac("torus2", 1.0, T=10.0, N=1000, seed=0)
print(f"torus, f=1: {res.mean:.12f} vs exp(-5) = {exp(-5):.12f}, stderr {res.stderr}")

f = {"affine": {"const": 1.0, "coef": [0.5]}}
res = sto.feynman_kac("sphere2", f, T=4.0, dt=1e-2, N=4000, seed=1)
lo, hi = sto.sandwich_bounds(0.5, 1.5, 4.0)
print(f"sphere, f=1+x/2: {res.mean:.4f} +/- {res.stderr:.4f}, bounds [{lo:.4f}, {hi:.4f}]")

est = sto.ssp_rate("sphere2", f, T=6.0, dt=1e-2, N=4000, seed=1)
bound, se = sto.lambda0_lower_bound(est)
print(f"rate {est.rate:.4f} ({est.ssp_verdict}); bottom of spectrum >= {bound:.3f} +/- {se:.3f}")

print("integral of the decay curve:", sto.r_underline_q("torus1", 1.0, dt=1e-2, N=8, seed=0).value)
