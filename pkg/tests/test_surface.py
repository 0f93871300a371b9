import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contactcurv.errors import CharacteristicPointError, OffSurfaceError, PreconditionError
from contactcurv.groups import builtin_model
from contactcurv.revolution import model_surface
from contactcurv.surface import (
    Isometry,
    curvatures,
    egregium_residual,
    horizontal_data,
    pushforward_isometry,
    scaling_exponent,
    tu1_relation_residual,
    zero_distortion_terms,
)

from conftest import afield, hfield

KORANYI_PT = np.array([1 / math.sqrt(2), 0.0, math.sqrt(1 - 0.25)])


def test_horizontal_data_examples(heis, aa):
    hd = horizontal_data(heis, hfield("t"), (1, 0, 0))
    assert (hd.p, hd.q, hd.l, hd.pbar, hd.qbar, hd.tu, hd.characteristic) == (0, -2, 2, 0, -1, 1, False)
    hd = horizontal_data(aa, afield("a"), (0, 1, 0))
    assert (hd.p, hd.q, hd.l, hd.tu) == (0, 1, 1, -1)


def test_characteristic_point(heis):
    assert horizontal_data(heis, hfield("t"), (0, 0, 0)).characteristic
    with pytest.raises(CharacteristicPointError, match=r"characteristic point at \(0,0,0\)"):
        curvatures(heis, hfield("t"), (0, 0, 0))


def test_off_surface(heis):
    with pytest.raises(OffSurfaceError):
        curvatures(heis, hfield("t"), (1, 0, 0.5))
    rep = curvatures(heis, hfield("t"), (1, 0, 0.5), on_surface=False)
    assert rep.K_h == pytest.approx(-2)


def test_curvature_examples(heis, aa):
    r = curvatures(heis, hfield("x"), (0, 2, 5))
    assert (r.K_h, r.H_h, r.Q_h) == (0, 0, 0)
    r = curvatures(heis, hfield("t"), (1, 0, 0))
    assert (r.H_h, r.K_h, r.Q_h) == pytest.approx((0, -2, -1), abs=1e-14)
    r = curvatures(aa, afield("a"), (0, 3, 1))
    assert (r.K_h, r.H_h, r.Q_h) == pytest.approx((-4, 0, -2), abs=1e-14)


def test_orientation_reversal(heis):
    # u -> -u flips H and Q and keeps K
    ko = model_surface("koranyi", {"R": 1.0}).implicit
    a = curvatures(heis, ko, KORANYI_PT)
    b = curvatures(heis, -ko, KORANYI_PT)
    assert b.K_h == pytest.approx(a.K_h) and b.H_h == pytest.approx(-a.H_h) and b.Q_h == pytest.approx(-a.Q_h)


def test_egregium_examples(heis, aa):
    assert egregium_residual(heis, hfield("t"), (1, 0, 0)) < 1e-5
    assert egregium_residual(heis, model_surface("koranyi", {"R": 1.0}).implicit, KORANYI_PT) < 1e-5
    assert egregium_residual(aa, afield("a"), (0, 1, 0)) < 1e-5


def test_tu1_examples(heis):
    assert tu1_relation_residual(heis, hfield("t"), (1, 0, 0)) < 1e-10
    assert tu1_relation_residual(heis, hfield("t - 2*x*y"), (1, 1, 2)) < 1e-10
    with pytest.raises(PreconditionError):
        tu1_relation_residual(heis, hfield("2*t"), (1, 0, 0))


def test_zero_distortion_on_k0_family(heis):
    C = 1.0
    u = hfield("t - (x^2 + y^2 - 4)^1.5/3")
    r = 2.5
    q = (r, 0.0, (C * r * r - 4) ** 1.5 / (3 * C))
    K, Q, e1l = zero_distortion_terms(heis, u, q)
    assert max(abs(K), abs(Q), abs(e1l)) < 1e-10


def test_rotation_fixes_plane(heis):
    iso = Isometry.heis_rotation(math.pi / 3)
    v = pushforward_isometry(hfield("t"), iso)
    for p in [(1, 2, 3), (-0.4, 0.2, 1)]:
        assert v.value(p) == pytest.approx(p[2])


def test_rotation_invariance_koranyi(heis):
    ko = model_surface("koranyi", {"R": 1.0}).implicit
    base = curvatures(heis, ko, KORANYI_PT)
    for th in (0.3, 1.0, 2.5):
        iso = Isometry.heis_rotation(th)
        img = curvatures(heis, pushforward_isometry(ko, iso), iso(KORANYI_PT))
        assert (img.K_h, img.H_h, img.Q_h) == pytest.approx((base.K_h, base.H_h, base.Q_h), rel=1e-12)


def test_aa_conjugation(aa):
    iso = Isometry.aa_conjugation()
    v = pushforward_isometry(afield("a"), iso)
    assert v.value((0.7, 1, 2)) == pytest.approx(-0.7)
    a = curvatures(aa, afield("a"), (0, 3, 1))
    b = curvatures(aa, v, iso((0, 3, 1)))
    assert b.K_h == pytest.approx(a.K_h) and abs(b.H_h) == pytest.approx(abs(a.H_h), abs=1e-14)
    assert b.Q_h == pytest.approx(-a.Q_h)


@pytest.mark.parametrize("quantity,expected", [("H", 1.0), ("Q", 1.0), ("K", 2.0)])
def test_dilation_exponents(quantity, expected):
    ko = model_surface("koranyi", {"R": 1.0}).implicit
    assert scaling_exponent(ko, quantity, KORANYI_PT, (2, 4, 8)) == pytest.approx(expected, abs=1e-6)


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(0, 6.3),
       st.floats(-1.2, 1.2), st.floats(-1.2, 1.2))
def test_heisenberg_isometry_invariance(x0, y0, t0, _unused, th, x, y):
    heis = builtin_model("heisenberg")
    f = "x^2*y - 0.5*sin(x) + y^3/3"
    u = hfield(f"t - ({f})")
    q = np.array([x, y, hfield(f).value((x, y, 0))])
    try:
        base = curvatures(heis, u, q)
    except CharacteristicPointError:
        return
    v, p = u, q
    for g in (Isometry.heis_rotation(th), Isometry.heis_translation(x0, y0, t0)):
        v, p = pushforward_isometry(v, g), g(p)
    img = curvatures(heis, v, p)
    scale = 1 + abs(base.K_h) + abs(base.H_h) + abs(base.Q_h)
    assert abs(img.K_h - base.K_h) < 1e-8 * scale
    assert abs(img.H_h - base.H_h) < 1e-8 * scale
    assert abs(img.Q_h - base.Q_h) < 1e-8 * scale


@settings(max_examples=40, deadline=None)
@given(st.floats(0.3, 2.0), st.floats(-1.5, 1.5))
def test_aa_tu1_relation_property(lam, t):
    aa = builtin_model("affine_additive")
    f = afield("0.3*l^2 - sin(t)*l")
    u = afield("0.3*l^2 - sin(t)*l - a")
    q = (f.value((0, lam, t)), lam, t)
    try:
        assert tu1_relation_residual(aa, u, q) < 1e-10
    except CharacteristicPointError:
        pass
