"""Non-existence thresholds for 1 < p < 5 across the three coupling regimes.

Run: python demos/thresholds.py
"""

import numpy as np

from csgs import Params
from csgs.nonexistence import g_pointwise, monotonicity_sweep, mu_free_bound, sharp_threshold

base = Params(p=3.0, q=0.1, mu=1.0, lam=1.0)
r = sharp_threshold(base)
print(f"p=3, q=0.1: regime {r.regime}, omega* = {r.omega_sharp:.6f}, t*^2 = {r.t_star**2:.6f}, "
      f"omega_bar = {r.omega_sufficient:.6f}")

# g touches zero at t* exactly when omega = omega*
t = np.linspace(0.5, 3.0, 6)
print("g(t) at omega*:     ", np.array2string(g_pointwise(t, r.omega_sharp, base), precision=4))
print("g(t*) at omega*:    ", f"{g_pointwise(r.t_star, r.omega_sharp, base):.1e}")

print("\nregimes at p = 3.5, mu = lambda = 1")
for q in (0.1, 0.5, 1.0, 3.0):
    res = sharp_threshold(Params(p=3.5, q=q))
    tag = " (constant by analogy)" if res.derived_by_analogy else ""
    print(f"  q = {q:<4}  {res.regime:<10s} omega* = {res.omega_sharp:9.5f}  "
          f"omega_bar = {res.omega_sufficient:11.5f}{tag}")

print("\nomega* against mu at p = 4 (nonincreasing)")
tab = monotonicity_sweep("mu", Params(p=4.0, q=0.1), np.geomspace(0.1, 10, 5))
for mu, s, b, ts in tab.rows():
    print(f"  mu = {mu:7.3f}  omega* = {s:10.4f}  omega_bar = {b:12.4f}  t* = {ts:.4f}")
print("  checks:", {k: v["passed"] for k, v in tab.checks.items()})

print("\nfor p < 3 omega* stays below a mu-free bound")
p2 = monotonicity_sweep("mu", Params(p=2.0, q=0.1), np.geomspace(1e-3, 1e3, 7))
print(f"  max omega* = {max(p2.omega_sharp):.6f}  bound = {mu_free_bound(Params(p=2.0, q=0.1)):.6f}")

print("\nnear p = 5 the explicit certificate leaves the double range")
for p in (4.5, 4.9, 4.99):
    res = sharp_threshold(Params(p=p, q=0.1, mu=0.1, lam=5.0))
    print(f"  p = {p}: omega* = {res.omega_sharp:.4e}  omega_bar = {res.omega_sufficient:.4e}  "
          f"overflow = {res.sufficient_overflow}")
