"""Horizontal curvature invariants of implicit surfaces u = 0.

All formulas are written in frame units: p = Xu, q = Yu, Tu and the
second-order table M[a, b] = F_a(F_b u).  A derivative of (p, q, Tu) along
a vector with frame coefficients v is simply v @ M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CharacteristicPointError, OffSurfaceError, PreconditionError
from .groups import GroupModel, builtin_model
from .jets import (
    FrameDerivTable,
    Jet2,
    ScalarField,
    fd_directional,
    frame_derivatives_2,
)

__all__ = [
    "HorizontalFrameData",
    "AdaptedFrame",
    "CurvatureReport",
    "SURFACE_TOL",
    "char_tol",
    "horizontal_data",
    "adapted_frame",
    "frame_orthonormality_defect",
    "curvatures",
    "egregium_residual",
    "tu1_relation_residual",
    "zero_distortion_terms",
    "Isometry",
    "pushforward_isometry",
    "scaling_exponent",
]

SURFACE_TOL = 1e-9


def char_tol(tu: float) -> float:
    return 1e-9 * (1.0 + abs(tu))


@dataclass(frozen=True)
class HorizontalFrameData:
    p: float
    q: float
    tu: float
    l: float
    pbar: float
    qbar: float
    characteristic: bool


@dataclass(frozen=True)
class AdaptedFrame:
    """E1, E2, n as coordinate vectors, plus their frame coefficients."""

    E1: np.ndarray
    E2: np.ndarray
    n: np.ndarray
    eps: float
    coeffs: np.ndarray  # rows: E1, E2, n in the (X, Y, T) frame


@dataclass(frozen=True)
class CurvatureReport:
    K_h: float
    H_h: float
    Q_h: float
    HH: float
    QH: float
    horizontal: HorizontalFrameData


def _check_surface(u: ScalarField, point, on_surface: bool):
    if on_surface:
        val = u.value(point)
        if not abs(val) < SURFACE_TOL:
            raise OffSurfaceError(f"|u| = {abs(val):.3g} at {tuple(point)} exceeds {SURFACE_TOL:g}")


def _hdata(table: FrameDerivTable) -> HorizontalFrameData:
    p, q, tu = table.Xu, table.Yu, table.Tu
    l = math.hypot(p, q)
    char = l < char_tol(tu)
    if char:
        return HorizontalFrameData(p, q, tu, l, 0.0, 0.0, True)
    return HorizontalFrameData(p, q, tu, l, p / l, q / l, False)


def horizontal_data(model: GroupModel, u: ScalarField, point, on_surface=True) -> HorizontalFrameData:
    _check_surface(u, point, on_surface)
    return _hdata(frame_derivatives_2(model, u, point))


def _table(model, u, point, on_surface):
    _check_surface(u, point, on_surface)
    table = frame_derivatives_2(model, u, point)
    hd = _hdata(table)
    if hd.characteristic:
        raise CharacteristicPointError(point, hd.l)
    return table, hd


class _Derivs:
    """Derivatives of p, q, Tu, l, pbar, qbar along a frame-coefficient vector."""

    def __init__(self, table: FrameDerivTable, hd: HorizontalFrameData):
        self.M = table.second
        self.hd = hd

    def along(self, v):
        hd = self.hd
        dp, dq, dtu = np.asarray(v, dtype=float) @ self.M
        dl = (hd.p * dp + hd.q * dq) / hd.l
        dpbar = dp / hd.l - hd.p * dl / hd.l**2
        dqbar = dq / hd.l - hd.q * dl / hd.l**2
        return dict(p=dp, q=dq, tu=dtu, l=dl, pbar=dpbar, qbar=dqbar)


_X, _Y, _T = np.eye(3)


def _report(model: GroupModel, table: FrameDerivTable, hd: HorizontalFrameData) -> CurvatureReport:
    sc = model.constants
    d = _Derivs(table, hd)
    dX, dY = d.along(_X), d.along(_Y)
    e1 = d.along((-hd.qbar, hd.pbar, 0.0))
    HH = dX["pbar"] + dY["qbar"]
    QH = dX["qbar"] - dY["pbar"]
    H = HH + sc.a3 * hd.qbar - sc.b3 * hd.pbar
    Q = QH - sc.a3 * hd.pbar - sc.b3 * hd.qbar
    c, l, tu = sc.c, hd.l, hd.tu
    K = c * (e1["tu"] * l - tu * e1["l"]) / l**2 - c**2 * (tu / l) ** 2
    return CurvatureReport(float(K), float(H), float(Q), float(HH), float(QH), hd)


def curvatures(model: GroupModel, u: ScalarField, point, on_surface=True) -> CurvatureReport:
    """K_h, H_h, Q_h at a non-characteristic point of u = 0."""
    table, hd = _table(model, u, point, on_surface)
    return _report(model, table, hd)


def adapted_frame(model: GroupModel, u: ScalarField, point, eps: float = 1.0, on_surface=True) -> AdaptedFrame:
    """Orthonormal frame {E1, E2, n} of the metric making X, Y, eps*T orthonormal."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    table, hd = _table(model, u, point, on_surface)
    F = model.frame_jet(model.check_domain(point))[0]
    r = eps * hd.tu
    l_eps = math.sqrt(hd.l**2 + r**2)
    rbar = r / hd.l
    k = hd.l / l_eps
    coeffs = np.array(
        [
            [-hd.qbar, hd.pbar, 0.0],
            [k * rbar * hd.pbar, k * rbar * hd.qbar, -k * eps],
            [hd.p / l_eps, hd.q / l_eps, eps * r / l_eps],
        ]
    )
    E1, E2, n = coeffs @ F
    return AdaptedFrame(E1, E2, n, float(eps), coeffs)


def frame_orthonormality_defect(frame: AdaptedFrame) -> float:
    """max |G - I| with G the g_eps Gram matrix of {E1, E2, n}."""
    metric = np.diag([1.0, 1.0, 1.0 / frame.eps**2])
    G = frame.coeffs @ metric @ frame.coeffs.T
    return float(np.max(np.abs(G - np.eye(3))))


def _point_functional(model, u, fn):
    # evaluate a report quantity on the level set through a nearby point
    def f(q):
        table = frame_derivatives_2(model, u, q)
        hd = _hdata(table)
        if hd.characteristic:
            raise CharacteristicPointError(q, hd.l)
        return fn(table, hd)

    return f


def egregium_residual(model: GroupModel, u: ScalarField, point, on_surface=True, step=None) -> float:
    """|K_h - [E1(Q) - E1E1(log l) - (Q - E1 log l)^2]| with FD outer derivatives."""
    table, hd = _table(model, u, point, on_surface)
    rep = _report(model, table, hd)
    p = model.check_domain(point)
    F = model.frame_jet(p)[0]
    e1_dir = -hd.qbar * F[0] + hd.pbar * F[1]

    def e1_log_l(table, hd):
        return _Derivs(table, hd).along((-hd.qbar, hd.pbar, 0.0))["l"] / hd.l

    def q_of(table, hd):
        return _report(model, table, hd).Q_h

    E1Q = fd_directional(model, _point_functional(model, u, q_of), e1_dir, p, step=step, order=4)
    E1E1logl = fd_directional(model, _point_functional(model, u, e1_log_l), e1_dir, p, step=step, order=4)
    e1logl = e1_log_l(table, hd)
    rhs = E1Q - E1E1logl - (rep.Q_h - e1logl) ** 2
    return abs(rep.K_h - rhs)


def tu1_relation_residual(model: GroupModel, u: ScalarField, point, on_surface=True) -> float:
    """|K_h + (c/l) Q_h| for a surface normalised so that Tu = 1."""
    table, hd = _table(model, u, point, on_surface)
    if not abs(hd.tu - 1.0) < 1e-12:
        raise PreconditionError(f"Tu = {hd.tu:.17g}, expected 1 (normalise u first)")
    rep = _report(model, table, hd)
    return abs(rep.K_h + model.constants.c / hd.l * rep.Q_h)


def zero_distortion_terms(model: GroupModel, u: ScalarField, point, on_surface=True):
    """(K_h, Q_h, E1(l) + c): for Tu = 1 all three vanish together."""
    table, hd = _table(model, u, point, on_surface)
    rep = _report(model, table, hd)
    e1l = _Derivs(table, hd).along((-hd.qbar, hd.pbar, 0.0))["l"]
    return rep.K_h, rep.Q_h, float(e1l + model.constants.c)


@dataclass(frozen=True)
class Isometry:
    """An affine map p -> A p + b on a chart.

    ``flips_q`` marks maps that reverse the contact orientation (conjugations),
    under which Q_h changes sign; ``scale`` is the dilation factor (1 for
    isometries).
    """

    chart: tuple
    A: np.ndarray
    b: np.ndarray
    kind: str
    flips_q: bool = False
    scale: float = 1.0

    def __call__(self, point) -> np.ndarray:
        return self.A @ np.asarray(point, dtype=float) + self.b

    def inverse(self, point) -> np.ndarray:
        return np.linalg.solve(self.A, np.asarray(point, dtype=float) - self.b)

    @classmethod
    def heis_translation(cls, x0, y0, t0):
        # L_g(x, y, t) = (x0 + x, y0 + y, t0 + t + 2(y0 x - x0 y))
        A = np.array([[1.0, 0, 0], [0, 1.0, 0], [2.0 * y0, -2.0 * x0, 1.0]])
        return cls(("x", "y", "t"), A, np.array([x0, y0, t0], dtype=float), "translation")

    @classmethod
    def heis_rotation(cls, theta):
        c, s = math.cos(theta), math.sin(theta)
        A = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1.0]])
        return cls(("x", "y", "t"), A, np.zeros(3), "rotation")

    @classmethod
    def heis_conjugation(cls):
        return cls(("x", "y", "t"), np.diag([1.0, -1.0, -1.0]), np.zeros(3), "conjugation", flips_q=True)

    @classmethod
    def heis_dilation(cls, delta):
        if not delta > 0:
            raise ValueError(f"dilation factor must be positive, got {delta}")
        return cls(("x", "y", "t"), np.diag([delta, delta, delta**2]), np.zeros(3), "dilation", scale=delta)

    @classmethod
    def aa_translation(cls, a0, l0, t0):
        if not l0 > 0:
            raise ValueError(f"lambda0 must be positive, got {l0}")
        # L_g(a, l, t) = (a0 + a, l0 l, l0 t + t0)
        A = np.diag([1.0, l0, l0])
        return cls(("a", "l", "t"), A, np.array([a0, 0.0, t0], dtype=float), "translation")

    @classmethod
    def aa_conjugation(cls):
        return cls(("a", "l", "t"), np.diag([-1.0, 1.0, -1.0]), np.zeros(3), "conjugation", flips_q=True)


def pushforward_isometry(u: ScalarField, iso: Isometry) -> ScalarField:
    """u' = u o iso^{-1}, with the jet transported through the affine inverse."""
    if tuple(u.chart) != tuple(iso.chart):
        from .errors import ChartMismatchError

        raise ChartMismatchError(f"isometry acts on {iso.chart}, field is on {u.chart}")
    Ainv = np.linalg.inv(iso.A)

    def evaluator(p):
        jet = u(iso.inverse(p))
        g = Ainv.T @ jet.gradient
        H = Ainv.T @ jet.hessian @ Ainv
        return Jet2.from_hessian(jet.value, g, H)

    return ScalarField(evaluator, tuple(u.chart), label=f"{iso.kind}*({u.label})")


def scaling_exponent(u: ScalarField, quantity: str, point, deltas, model: GroupModel | None = None) -> float:
    """Least-squares slope of log|quantity| on D_delta(Sigma) against log(1/delta)."""
    model = model or builtin_model("heisenberg")
    if model.name != "heisenberg":
        raise ValueError("scaling_exponent is defined for the Heisenberg group only")
    key = {"K": "K_h", "H": "H_h", "Q": "Q_h"}[quantity]
    xs, ys = [], []
    for delta in deltas:
        iso = Isometry.heis_dilation(delta)
        val = getattr(curvatures(model, pushforward_isometry(u, iso), iso(point)), key)
        if val == 0.0:
            raise ValueError(f"{quantity} vanishes at the point; exponent undefined")
        xs.append(math.log(1.0 / delta))
        ys.append(math.log(abs(val)))
    if len(xs) < 2:
        raise ValueError("need at least two dilation factors")
    return float(np.polyfit(xs, ys, 1)[0])
