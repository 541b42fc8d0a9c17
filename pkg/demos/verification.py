"""Randomised checks of the functional inequalities and exact identities.

Run: python demos/verification.py [count]
"""

import sys
import time

from csgs.verify import SampleSpec, check_identities, check_inequalities

count = int(sys.argv[1]) if len(sys.argv) > 1 else 300
spec = SampleSpec(seed=42, count=count)

s = spec.sample(0)
print("sample 0:", ", ".join(f"{c[0]}(a={c[1]:+.2f}, w={c[2]:.2f})" for c in s.components))

t0 = time.perf_counter()
for name, rep in check_inequalities(spec).items():
    print(f"{name:<7s} violations {rep.violations}  worst margin {rep.worst_margin:.4f} "
          f"(sample {rep.worst_seed_index})")
print(f"  {time.perf_counter() - t0:.1f} s")

t0 = time.perf_counter()
ident = check_identities(SampleSpec(seed=7, count=min(count, 100)))
for name, c in ident.checks.items():
    print(f"{name:<16s} worst residual {c['worst_residual']:.1e}")
print(f"  {time.perf_counter() - t0:.1f} s")
