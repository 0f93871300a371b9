"""Horizontal curvatures of the classical model surfaces.

The generic engine only sees a defining function u and the group frame.
Here it is run on surfaces whose curvatures are known in closed form.
"""

import math

import numpy as np

from contactcurv import builtin_model, curvatures
from contactcurv.revolution import model_surface

heis = builtin_model("heisenberg")
aa = builtin_model("affine_additive")

print("Heisenberg group, frame X = dx + 2y dt, Y = dy - 2x dt, [X, Y] = -4T\n")
print(f"{'surface':<22}{'point':<28}{'K_h':>12}{'H_h':>12}{'Q_h':>12}   closed form (K, H, Q)")
for family, params, s, phi in [
    ("heis_plane_nonvertical", {}, 1.3, 0.4),
    ("heis_quadric_2xy", {}, 0.7, 1.1),
    ("heis_cylinder", {"R": 1.5}, 0.3, 2.0),
    ("koranyi", {"R": 1.0}, 0.5, 0.9),
    ("bubble", {"R": 1.0}, 0.6, 1.7),
]:
    ms = model_surface(family, params)
    (s0, s1), _ = ms.patch_domain
    q = ms.point(s0 + s * (s1 - s0) / 2, phi)
    rep = curvatures(heis, ms.implicit, q)
    cf = ms.closed_forms(q)
    cf_txt = ", ".join("-" if v is None else f"{v:.6g}" for v in cf)
    print(f"{family:<22}{np.array2string(q, precision=3):<28}{rep.K_h:12.6g}{rep.H_h:12.6g}{rep.Q_h:12.6g}   ({cf_txt})")

print("\nAffine-additive group, chart (a, l, t), l > 0\n")
for family, params, s, phi in [
    ("aa_hyperbolic_plane", {}, 0.7, 0.3),
    ("aa_plane", {"A": 1.0, "B": -0.5, "C": 2.0, "D": 0.3}, 0.4, 0.8),
    ("aa_cylinder_circle", {"R": 0.5, "l0": 1.5, "t0": 0.0}, 0.6, 1.2),
    ("aa_cylinder_line", {"A": 1.0, "B": 2.0, "D": -1.0}, 0.5, 0.5),
]:
    ms = model_surface(family, params)
    (s0, s1), (p0, p1) = ms.patch_domain
    q = ms.point(s0 + s * (s1 - s0), p0 + phi * (p1 - p0) / 2)
    rep = curvatures(aa, ms.implicit, q)
    cf = ", ".join("-" if v is None else f"{v:.6g}" for v in ms.closed_forms(q))
    print(f"{family:<22}{np.array2string(q, precision=3):<28}{rep.K_h:12.6g}{rep.H_h:12.6g}{rep.Q_h:12.6g}   ({cf})")

print("\nThe circle cylinder of radius R about l0 has H = 2 l0 / R:", 2 * 1.5 / 0.5)
print("The bubble has constant H = 1/R, the Koranyi sphere H = 3r/R^2 with r = sqrt(x^2 + y^2).")
print("Horizontal curvatures are undefined where Xu = Yu = 0; e.g. the plane t = 0 at the origin:")
try:
    from contactcurv.jets import ScalarField

    curvatures(heis, ScalarField.from_expr("t", ("x", "y", "t")), (0, 0, 0))
except Exception as exc:
    print("   ", type(exc).__name__, "-", exc)
print("\nDone; r = 1 on the plane gives K = -2, Q = -1:", math.isclose(curvatures(
    heis, model_surface("heis_plane_nonvertical", {}).implicit, (1, 0, 0)).K_h, -2))
