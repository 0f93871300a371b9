import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contactcurv.errors import ChartMismatchError, DomainError
from contactcurv.jets import Jet2, ScalarField, fd_directional, frame_derivative_1, frame_derivatives_2

from conftest import afield, hfield


def test_frame_derivative_1_examples(heis, aa):
    assert frame_derivative_1(heis, "X", hfield("t"), (1, 2, 3)) == 4.0
    assert frame_derivative_1(heis, "Y", hfield("x"), (0.3, -2, 7)) == 0.0
    assert frame_derivative_1(aa, "U", afield("t"), (0, 3, 1)) == 6.0


def test_frame_derivatives_2_quadric(heis):
    tab = frame_derivatives_2(heis, hfield("t - 2*x*y"), (1, 1, 2))
    assert (tab.Xu, tab.Yu, tab.Tu, tab.XYu) == (0.0, -4.0, 1.0, -4.0)


def test_frame_derivatives_2_plane(heis):
    # Xu = 2y, Yu = -2x, so XYu = X(-2x) = -2 and YXu = Y(2y) = 2
    tab = frame_derivatives_2(heis, hfield("t"), (1, 0, 0))
    assert (tab.Xu, tab.Yu, tab.Tu, tab.XXu, tab.YYu) == (0.0, -2.0, 1.0, 0.0, 0.0)
    assert (tab.XYu, tab.YXu) == (-2.0, 2.0)
    assert tab.XYu - tab.YXu == -4.0 * tab.Tu


def test_frame_derivatives_2_aa_plane(aa):
    tab = frame_derivatives_2(aa, afield("a"), (0, 1, 0))
    assert (tab.Xu, tab.Yu, tab.Tu) == (0.0, 1.0, -1.0)
    assert np.all(tab.second == 0.0)


def test_fd_directional_examples(heis, aa):
    assert abs(fd_directional(heis, lambda p: p[0] ** 2, "X", (3, 0, 0), 1e-5) - 6) < 1e-9
    # F = Xu = 2y for u = t; Y(2y) = 2
    assert abs(fd_directional(heis, lambda p: 2 * p[1], "Y", (1, 0, 0), 1e-5) - 2) < 1e-8
    assert abs(fd_directional(aa, lambda p: p[1], "V", (0, 2, 0), 1e-5) - 4) < 1e-8


def test_fd_leaves_domain(aa):
    with pytest.raises(DomainError):
        fd_directional(aa, lambda p: p[1], (0.0, 1.0, 0.0), (0, 1e-7, 0), 1e-5)


def test_chart_mismatch(heis):
    with pytest.raises(ChartMismatchError):
        frame_derivative_1(heis, "X", afield("a"), (0, 1, 0))


def test_jet_arithmetic():
    x = Jet2.variable(0, 2.0)
    y = Jet2.variable(1, 3.0)
    f = x * y / (x + 1.0)
    assert np.isclose(f.value, 2.0)
    assert np.allclose(f.gradient, [3 / 9, 2 / 3, 0])


@settings(max_examples=60, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_bracket_identity_on_jets(x, y, t):
    # XYu - YXu = c Tu for any C^2 field, in both groups
    from contactcurv.groups import builtin_model

    heis = builtin_model("heisenberg")
    u = hfield("sin(x*y) + t^2*x - exp(0.3*y)")
    tab = frame_derivatives_2(heis, u, (x, y, t))
    assert abs(tab.XYu - tab.YXu + 4 * tab.Tu) < 1e-10 * (1 + abs(tab.XYu) + abs(tab.YXu))
    aa = builtin_model("affine_additive")
    v = afield("sin(a*l) + t^2*a - exp(0.3*t)")
    p = (x, abs(y) + 0.1, t)
    tab = frame_derivatives_2(aa, v, p)
    # [V, U] = 2(U + W) in the (X, Y, T) = (V, U, W) labelling
    assert abs(tab.XYu - tab.YXu - 2 * tab.Yu - 2 * tab.Tu) < 1e-9 * (1 + abs(tab.XYu) + abs(tab.YXu))


def test_scalar_field_algebra():
    u = hfield("x") * hfield("y") + 1.0
    assert u.value((2, 3, 0)) == 7.0
    assert isinstance(u - hfield("t"), ScalarField)
