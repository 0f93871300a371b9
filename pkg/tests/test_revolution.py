import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contactcurv.acceptance import classification_cases, flask_sample_points
from contactcurv.errors import (
    CharacteristicPointError,
    DegeneratePointError,
    DomainError,
    PreconditionError,
    ValidityError,
)
from contactcurv.groups import builtin_model
from contactcurv.revolution import (
    MODEL_FAMILIES,
    aa_rev_curvatures,
    cc_sphere_heis_closed_H,
    cc_sphere_heis_closed_K,
    cc_sphere_heis_H,
    cc_sphere_heis_jets,
    const_curvature_profile,
    flask_mean_curvature_fd,
    heis_rev_curvatures,
    model_surface,
    profile_curvatures,
    profile_residual,
    sharp_inequality_terms,
)
from contactcurv.surface import curvatures


def test_heis_operator_plane():
    assert heis_rev_curvatures(1, 0, 0) == pytest.approx((-2, 0, -1))


def test_heis_operator_bubble():
    K, H, Q = heis_rev_curvatures(1, -2 / math.sqrt(3), -14 / (3 * math.sqrt(3)))
    assert H == pytest.approx(1, rel=1e-14)
    assert K == pytest.approx(1 - 2, rel=1e-14)


def test_heis_operator_koranyi():
    # f = sqrt(1 - r^4): f' = -2r^3/f, f'' = -(6r^2 f^2 + 4r^6)/f^3
    r = 1 / math.sqrt(2)
    f = math.sqrt(1 - r**4)
    f1 = -2 * r**3 / f
    f2 = -(6 * r * r * f * f + 4 * r**6) / f**3
    K, H, Q = heis_rev_curvatures(r, f1, f2)
    assert K == pytest.approx(-1, rel=1e-13)
    assert H == pytest.approx(3 / math.sqrt(2), rel=1e-13)
    assert Q == pytest.approx((3 * r**4 - 1) / (r * math.sqrt(1 - r**4)), rel=1e-13)


def test_heis_operator_domain():
    with pytest.raises(DomainError):
        heis_rev_curvatures(0.0, 1, 1)


def test_aa_operator_examples():
    K, H, Q = aa_rev_curvatures(1, 0.25, -0.25)
    assert K == pytest.approx(-4) and abs(H) < 1e-15
    assert aa_rev_curvatures(1, 0, 0) == pytest.approx((-4, 0, -2))
    with pytest.raises(CharacteristicPointError):
        aa_rev_curvatures(0.0, 0.5, 3.0)


@settings(max_examples=300, deadline=None)
@given(st.floats(1e-2, 10), st.floats(-20, 20), st.floats(-50, 50))
def test_sharp_inequality(r, f1, f2):
    diff, sos = sharp_inequality_terms(r, f1, f2)
    assert diff > 0
    assert abs(diff - sos) <= 1e-10 * diff


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_aa_operator_matches_engine(rho, f1, f2):
    # surface a = f(t/l) in AA, jet of f from a local quadratic model
    from contactcurv.jets import ScalarField

    aa = builtin_model("affine_additive")
    den = 4 * (rho * rho + 1) * f1 * f1 - 4 * f1 + 1
    if den < 1e-3:
        return
    u = ScalarField.from_expr(f"a - {f1!r}*(t/l - {rho!r}) - 0.5*{f2!r}*(t/l - {rho!r})^2", ("a", "l", "t"))
    rep = curvatures(aa, u, (0.0, 1.0, rho))
    K, H, Q = aa_rev_curvatures(rho, f1, f2)
    scale = 1 + abs(K) + abs(H) + abs(Q)
    assert abs(rep.K_h - K) < 1e-9 * scale
    assert abs(rep.H_h - H) < 1e-9 * scale
    assert abs(rep.Q_h - Q) < 1e-9 * scale


def test_0sor_value():
    p = const_curvature_profile("heis", "K", 0, {"C": 1, "Cprime": 0, "branch": "+"}, (3, 5, 3))
    assert p.f[0] == pytest.approx(5**1.5 / 3, rel=1e-14)
    assert p.closed_form


def test_arctan_profile_value():
    p = const_curvature_profile("aa", "K", -4, {"branch": "partial"}, (-2, 2, 5))
    assert p.f[3] == pytest.approx(math.pi / 8, rel=1e-14)
    assert profile_residual(p) < 1e-10
    assert profile_residual(p, "H", 0) < 1e-10


@pytest.mark.parametrize("R", [0.5, 1.0, 2.0])
def test_bubble_identity(R):
    # the C = 0 constant-H branch is the bubble when the additive constant is pi R^2
    from contactcurv.revolution import _bubble_f

    p = const_curvature_profile("heis", "H", 1 / R, {"C": 0, "Cprime": math.pi * R * R, "branch": "-"},
                                (1e-3 * R, 2 * R - 1e-3 * R, 101))
    f = _bubble_f(R)
    assert max(abs(fv - f(s)) for s, fv in zip(p.s, p.f)) < 1e-8 * max(1, R * R)


def test_heis_q_profile_validity():
    with pytest.raises(ValidityError):
        const_curvature_profile("heis", "Q", 1, {"c1": 0.1, "branch": "+"}, (0.1, 1.0, 51))
    p = const_curvature_profile("heis", "Q", 1, {"c1": -0.1, "branch": "+"}, (0.12, 0.4, 51))
    assert profile_residual(p) < 1e-6


def test_quadrature_branch():
    p = const_curvature_profile("heis", "K", 1, {"C": 2, "branch": "+"}, (0.8, 1.15, 41))
    assert not p.closed_form
    assert profile_residual(p) < 1e-6


def test_profile_too_short():
    p = const_curvature_profile("heis", "K", 0, {"C": 1, "branch": "+"}, (3, 4, 2))
    with pytest.raises(PreconditionError):
        profile_residual(p)


def test_validity_reported_with_location():
    with pytest.raises(ValidityError) as err:
        const_curvature_profile("heis", "K", 0, {"C": 1, "branch": "+"}, (1.0, 3.0, 11))
    assert err.value.where == pytest.approx(1.0)


@pytest.mark.parametrize("case", classification_cases(), ids=lambda c: c[0])
def test_classification_round_trip(case):
    label, group, kind, target, params, grid = case
    p = const_curvature_profile(group, kind, target, params, grid)
    assert profile_residual(p) < (1e-10 if p.closed_form else 1e-6)


def test_aa_h0_iff_k_minus4():
    for params in ({"branch": "partial"}, {"c": 0.5, "branch": "-"}, {"c": 0.5, "branch": "+"}):
        p = const_curvature_profile("aa", "H", 0, params, (-2, 2, 81))
        K, H, Q = profile_curvatures(p)
        ok = ~np.isnan(K)
        assert np.max(np.abs(K[ok] + 4)) < 1e-8


@pytest.mark.parametrize("family", sorted(MODEL_FAMILIES))
def test_model_surfaces_build(family):
    ms = model_surface(family, {"A": 1.0} if family == "aa_plane" else {})
    assert ms.family == family
    (s0, s1), (p0, p1) = ms.patch_domain if ms.patch_domain else ((0, 1), (0, 1))
    if ms.patch is not None and family != "flask_patch":
        q = ms.point(0.5 * (s0 + s1) + 0.01, 0.5 * (p0 + p1))
        assert np.all(np.isfinite(q))


def test_koranyi_closed_forms():
    ms = model_surface("koranyi", {"R": 1.0})
    r = 0.8
    q = np.array([r, 0.0, math.sqrt(1 - r**4)])
    K, H, Q = ms.closed_forms(q)
    assert K == pytest.approx((6 * r**4 - 2) / r**2) and H == pytest.approx(3 * r)


def test_bubble_constant_h():
    ms = model_surface("bubble", {"R": 1.0})
    heis = builtin_model("heisenberg")
    for s in (0.2, 0.7, 1.3, 1.8):
        for phi in (0.3, 2.0):
            q = ms.point(s, phi)
            if ms.valid(q):
                assert curvatures(heis, ms.implicit, q).H_h == pytest.approx(1, rel=1e-10)


@pytest.mark.parametrize("R", [0.5, 1.0, 2.0])
def test_cc_sphere_identity(R):
    for k in np.linspace(0.1, 2 * math.pi / R - 0.1, 25):
        for kk in (k, -k):
            r, f1, f2 = cc_sphere_heis_jets(R, kk)
            assert f1 * f1 + 4 * r * r == pytest.approx(16 / kk**2, rel=1e-12)
            K, H, _ = heis_rev_curvatures(r, f1, f2)
            assert K == pytest.approx(cc_sphere_heis_closed_K(R, kk), rel=1e-9)
            assert H == pytest.approx(cc_sphere_heis_H(R, kk), rel=1e-9)


def test_cc_sphere_stated_h_differs():
    # the commonly stated closed form for H does not match the operator
    r, f1, f2 = cc_sphere_heis_jets(1.0, 2.0)
    _, H, _ = heis_rev_curvatures(r, f1, f2)
    assert abs(H - cc_sphere_heis_closed_H(1.0, 2.0)) > 1e-3


def test_cc_sphere_k_range():
    with pytest.raises(PreconditionError):
        cc_sphere_heis_jets(1.0, 0.0)
    with pytest.raises(PreconditionError):
        cc_sphere_heis_jets(1.0, 2 * math.pi)


@pytest.mark.parametrize("R,s,phi", [(1.0, 0.3, 1.0), (2.0, -0.5, 2.0)])
def test_flask_examples(R, s, phi):
    # measured value: 2 coth R (the circle cylinder normalisation H = 2 l0/R)
    assert flask_mean_curvature_fd(R, s, phi) == pytest.approx(2 / math.tanh(R), abs=1e-4)


@pytest.mark.parametrize("R", [0.5, 1.0, 2.0])
def test_flask_constant_h(R):
    vals = [flask_mean_curvature_fd(R, s, phi) for s, phi in flask_sample_points(R, 10, seed=4)]
    assert np.ptp(vals) < 2e-4


def test_flask_degenerate():
    with pytest.raises(DegeneratePointError):
        flask_mean_curvature_fd(1.0, math.pi, 1.0)
    with pytest.raises(DegeneratePointError):
        flask_mean_curvature_fd(1.0, math.pi / 4, 1.0)


def test_aa_cylinder_matches_engine():
    ms = model_surface("aa_cylinder_circle", {"R": 0.5, "l0": 1.5, "t0": 0.2})
    aa = builtin_model("affine_additive")
    q = ms.point(0.3, 1.0)
    rep = curvatures(aa, ms.implicit, q)
    K, H, Q = ms.closed_forms(q)
    assert rep.H_h == pytest.approx(2 * 1.5 / 0.5, rel=1e-10) and rep.H_h == pytest.approx(H, rel=1e-10)
    assert rep.Q_h == pytest.approx(Q, rel=1e-10)
