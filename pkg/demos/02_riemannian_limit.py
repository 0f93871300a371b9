"""Horizontal curvatures as limits of Riemannian ones.

g_eps makes {X, Y, eps T} orthonormal.  As eps -> 0 the Riemannian mean
curvature H^eps and the Gaussian curvature K^eps of a surface converge to
H_h and K_h; the table shows the rate on the Koranyi sphere.
"""

import math

from contactcurv import builtin_model
from contactcurv.approx import DEFAULT_EPS, lemma_limit_orders, limit_table
from contactcurv.groups import HEISENBERG, sectional_curvatures_eps
from contactcurv.revolution import model_surface

print("Sectional curvatures of g_eps in the Heisenberg group (XY, XT, YT):")
for eps in (1.0, 0.5, 0.1):
    print(f"  eps = {eps:<4}  ", tuple(round(v, 10) for v in sectional_curvatures_eps(HEISENBERG, eps)))

heis = builtin_model("heisenberg")
ko = model_surface("koranyi", {"R": 1.0}).implicit
r = 1 / math.sqrt(2)
point = (r, 0.0, math.sqrt(1 - r**4))
t = limit_table(heis, ko, point, DEFAULT_EPS)
H_h, K_h = t.limits
print(f"\nKoranyi sphere R = 1 at r = 1/sqrt(2): H_h = {H_h:.12f} (3/sqrt 2 = {3 / math.sqrt(2):.12f}), K_h = {K_h:.12f}")
print(f"{'eps':>8}{'H_eps - H_h':>16}{'K_eps - K_h':>16}{'A1 - H_h':>16}{'A3':>16}")
for row in t.rows:
    eps, H, K, A1, A3 = row[:5]
    print(f"{eps:8.0e}{H - H_h:16.3e}{K - K_h:16.3e}{A1 - H_h:16.3e}{A3:16.3e}")
print("log-log slopes:", {k: round(v, 3) for k, v in t.slopes.items()})

print("\nMeasured orders of the frame-data limits (expected in parentheses):")
for name, (measured, expected) in lemma_limit_orders(heis, ko, point).items():
    print(f"  {name:<38} {measured:6.3f} ({expected})")
