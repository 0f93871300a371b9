import math

import numpy as np
import pytest

from contactcurv.approx import (
    DEFAULT_EPS,
    direct_gauss,
    epsilon_geometry,
    frame_bracket_residual,
    lemma_limit_orders,
    lemma_limits_residuals,
    limit_table,
)
from contactcurv.revolution import model_surface

from conftest import afield, hfield

KORANYI_PT = np.array([1 / math.sqrt(2), 0.0, math.sqrt(0.75)])
EPS4 = (1e-1, 1e-2, 1e-3, 1e-4)


def test_plane_limits(heis):
    g = epsilon_geometry(heis, hfield("t"), (1, 0, 0), 1e-3)
    assert abs(g.H_eps) < 1e-5
    assert abs(g.K_eps_sigma + 2) < 1e-3
    assert g.rbar_eps / (1e-3 * g.l_eps) == pytest.approx(0.25, abs=1e-6)


def test_prop_proxies_on_plane(heis):
    for eps in (1e-2, 1e-3, 1e-4):
        g = epsilon_geometry(heis, hfield("t"), (1, 0, 0), eps)
        assert abs(g.A1) < 1e-10 and abs(g.A3) < 1e-10


def test_l_eps_exact(heis):
    # l_eps = sqrt(4 + eps^2) for u = t at (1, 0, 0)
    for eps in (0.5, 0.1, 1e-2):
        g = epsilon_geometry(heis, hfield("t"), (1, 0, 0), eps)
        assert g.l_eps == pytest.approx(math.sqrt(4 + eps * eps), rel=1e-14)


def test_limit_table_plane(heis):
    t = limit_table(heis, hfield("t"), (1, 0, 0), EPS4)
    err = np.abs(t.column("K_eps_sigma") - t.limits[1])
    assert np.all(np.diff(err) < 0)
    assert t.slopes["K"] >= 1


def test_limit_table_aa(aa):
    t = limit_table(aa, afield("a"), (0, 1, 0), EPS4)
    assert t.column("K_eps_sigma")[-1] == pytest.approx(-4, abs=1e-6)
    assert abs(t.column("H_eps")[-1]) < 1e-8


def test_limit_table_koranyi(heis):
    ko = model_surface("koranyi", {"R": 1.0}).implicit
    t = limit_table(heis, ko, KORANYI_PT, EPS4)
    assert t.limits[0] == pytest.approx(3 / math.sqrt(2), rel=1e-12)
    assert t.column("H_eps")[-1] == pytest.approx(3 / math.sqrt(2), rel=1e-6)
    assert t.slopes["H"] >= 1 and t.slopes["K"] >= 1 and t.slopes["A1"] >= 1


def test_lemma_residuals(heis, aa):
    res = {n: r for n, r, _ in lemma_limits_residuals(heis, hfield("t"), (1, 0, 0), 1e-2)}
    assert res["rbar_eps / (eps l_eps) - Tu / l^2"] < 1e-4
    assert res["l_eps - l"] < 1e-4
    orders = lemma_limit_orders(heis, hfield("t"), (1, 0, 0))
    assert orders["l_eps - l"][0] == pytest.approx(2, abs=0.01)
    res = {n: r for n, r, _ in lemma_limits_residuals(aa, afield("a"), (0, 1, 0), 1e-2)}
    assert res["(rbar_eps / eps)^2 - (Tu / l)^2"] < 1e-3


def test_lemma_orders_koranyi(heis):
    ko = model_surface("koranyi", {"R": 1.0}).implicit
    for name, (measured, expected) in lemma_limit_orders(heis, ko, KORANYI_PT).items():
        assert measured >= expected - 0.05, name


def test_gauss_two_routes(heis):
    # Gauss equation from the coframe coefficients vs the second fundamental form
    ko = model_surface("koranyi", {"R": 1.0}).implicit
    for eps in (0.5, 0.1):
        g = epsilon_geometry(heis, ko, KORANYI_PT, eps)
        _, H, K = direct_gauss(heis, ko, KORANYI_PT, eps)
        assert K == pytest.approx(g.K_eps_sigma, rel=1e-6)
        assert H == pytest.approx(g.H_eps, rel=1e-6)


def test_frame_bracket(heis):
    ko = model_surface("koranyi", {"R": 1.0}).implicit
    assert frame_bracket_residual(heis, ko, KORANYI_PT) < 1e-6


def test_default_eps_decreasing():
    assert list(DEFAULT_EPS) == sorted(DEFAULT_EPS, reverse=True)
