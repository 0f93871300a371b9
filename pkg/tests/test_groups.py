import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contactcurv.errors import DomainError
from contactcurv.groups import (
    AFFINE_ADDITIVE,
    HEISENBERG,
    StructureConstants,
    bracket_residual,
    builtin_model,
    sectional_curvature_eps,
    sectional_curvatures_eps,
    validate_structure_constants,
)


def test_builtin_constants_are_valid():
    assert validate_structure_constants(StructureConstants(c=-4.0)).ok
    assert validate_structure_constants(StructureConstants(b3=2.0, c=2.0)).ok


def test_violation_reported_with_residual():
    res = validate_structure_constants(StructureConstants(a1=1.0, c=1.0))
    assert not res.ok
    assert any(v.equation == "a1+b2=0" and v.residual == 1.0 for v in res.violations)


def test_builtin_models():
    assert builtin_model("heisenberg").constants == StructureConstants(c=-4.0)
    assert builtin_model("affine_additive").constants == StructureConstants(b3=2.0, c=2.0)
    rho = builtin_model("affine_additive_rho")
    # chart (a, rho, l): V = -2 rho d_rho + 2 l d_l at rho = 0.5, l = 3
    frame = rho.frame((0.0, 0.5, 3.0))
    assert np.allclose(frame[rho.field_index("V")], [0.0, -1.0, 6.0])


def test_unknown_model():
    with pytest.raises(ValueError):
        builtin_model("sol")


@pytest.mark.parametrize("name,point", [("heisenberg", (1, 2, 3)), ("affine_additive", (0, 1, 0))])
def test_bracket_residual_small(name, point):
    assert bracket_residual(builtin_model(name), point) < 1e-8


def test_bracket_residual_outside_domain():
    with pytest.raises(DomainError):
        bracket_residual(builtin_model("affine_additive"), (0, -1, 0))


@pytest.mark.parametrize(
    "sc,eps,expected",
    [
        (HEISENBERG, 1.0, (-12, 4, 4)),
        (AFFINE_ADDITIVE, 1.0, (-7, 1, 1)),
        (HEISENBERG, 0.5, (-48, 16, 16)),
    ],
)
def test_sectional_curvatures_examples(sc, eps, expected):
    assert np.allclose(sectional_curvatures_eps(sc, eps), expected, rtol=1e-14, atol=0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 5.0))
def test_sectional_closed_form_matches_tensor(eps):
    # two routes: closed form vs the curvature tensor of the Koszul connection
    e = np.eye(3)
    for sc in (HEISENBERG, AFFINE_ADDITIVE):
        closed = sectional_curvatures_eps(sc, eps)
        tensor = [sectional_curvature_eps(sc, eps, e[i], e[j]) for i, j in ((0, 1), (0, 2), (1, 2))]
        assert np.allclose(closed, tensor, rtol=1e-12, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(0.1, 3), st.floats(-3, 3))
def test_bracket_residual_property(a, lam, t):
    assert bracket_residual(builtin_model("heisenberg"), (a, lam, t)) < 1e-8
    assert bracket_residual(builtin_model("affine_additive"), (a, lam, t)) < 1e-8


def test_sectional_heisenberg_scaling():
    for eps in (1.0, 0.5, 0.1):
        kxy, kxt, kyt = sectional_curvatures_eps(HEISENBERG, eps)
        assert math.isclose(kxy, -12 / eps**2) and math.isclose(kxt, 4 / eps**2) and math.isclose(kyt, 4 / eps**2)
