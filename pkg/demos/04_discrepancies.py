"""Two published closed forms that the engine does not reproduce.

1. The flask surface in the affine-additive group is foliated by hyperbolic
   circles of radius R.  Its horizontal mean curvature measures 2 coth R,
   twice the commonly quoted coth R.  The factor is the same one that makes a
   circle cylinder of radius R about l0 have H = 2 l0 / R.
2. The Heisenberg CC-sphere: the curvature K in terms of the geodesic
   parameter k is reproduced, the quoted H(k) is not.  The operator gives
   H = |k| (sin kR - kR cos kR) / (kR sin kR + 2 cos kR - 2).
"""

import math

from contactcurv.acceptance import flask_sample_points
from contactcurv.revolution import (cc_sphere_heis_closed_H, cc_sphere_heis_closed_K, cc_sphere_heis_H,
                                    cc_sphere_heis_jets, flask_mean_curvature_fd, heis_rev_curvatures)

print("Flask: measured H against coth R and 2 coth R")
for R in (0.5, 1.0, 2.0):
    H = [flask_mean_curvature_fd(R, s, phi) for s, phi in flask_sample_points(R, 20)]
    print(f"  R = {R}: H in [{min(H):.6f}, {max(H):.6f}], coth R = {1 / math.tanh(R):.6f}, "
          f"2 coth R = {2 / math.tanh(R):.6f}")

print("\nCC-sphere R = 1: operator vs closed forms")
print(f"{'k':>7}{'K op':>12}{'K closed':>12}{'H op':>12}{'H quoted':>12}{'H re-derived':>14}")
for k in (-5.0, -2.0, -0.5, 0.5, 2.0, 5.0):
    r, f1, f2 = cc_sphere_heis_jets(1.0, k)
    K, H, _ = heis_rev_curvatures(r, f1, f2)
    print(f"{k:7.2f}{K:12.6f}{cc_sphere_heis_closed_K(1.0, k):12.6f}{H:12.6f}"
          f"{cc_sphere_heis_closed_H(1.0, k):12.6f}{cc_sphere_heis_H(1.0, k):14.6f}")
