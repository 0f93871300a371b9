"""Riemannian approximation g_eps (X, Y, eps*T orthonormal) of a contact group.

For a surface u = 0 the connection coefficients of the adapted frame
{E1, E2, n} give the second fundamental form II, the mean curvature
H_eps = A1 + B2 and the intrinsic Gauss curvature K_eps.  As eps -> 0 these
tend to the horizontal invariants H_h and K_h.

An independent route computes II straight from the Levi-Civita connection
of g_eps (constant Christoffel symbols in the orthonormal frame), with no
finite differences; ``direct_gauss`` exposes it for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CharacteristicPointError
from .groups import GroupModel, frame_bracket_fd, levi_civita_eps, riemann_eps
from .jets import ScalarField, default_fd_step, fd_directional, frame_derivatives_2
from .surface import _check_surface, _hdata, _report, curvatures

__all__ = [
    "DEFAULT_EPS",
    "EpsilonGeometry",
    "ConvergenceTable",
    "epsilon_geometry",
    "direct_gauss",
    "limit_table",
    "loglog_slope",
    "lemma_limits_residuals",
    "lemma_limit_orders",
    "frame_bracket_residual",
]

DEFAULT_EPS = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4)


@dataclass(frozen=True)
class EpsilonGeometry:
    eps: float
    l_eps: float
    rbar_eps: float
    A1: float
    A2: float
    A3: float
    B1: float
    B2: float
    B3: float
    C1: float
    C2: float
    II: np.ndarray
    H_eps: float
    K_eps_sigma: float
    sec_E1E2: float
    sec_E1n: float
    sec_E2n: float


class _Local:
    """Everything at one point and one eps that needs only second-order data."""

    def __init__(self, model: GroupModel, u: ScalarField, point, eps: float):
        self.model = model
        self.point = model.check_domain(point)
        table = frame_derivatives_2(model, u, self.point)
        hd = _hdata(table)
        if hd.characteristic:
            raise CharacteristicPointError(point, hd.l)
        self.table, self.hd, self.eps = table, hd, eps
        self.M = table.second
        self.l = hd.l
        self.r = eps * hd.tu
        self.l_eps = math.sqrt(hd.l**2 + self.r**2)
        self.rbar = self.r / hd.l
        k = hd.l / self.l_eps
        self.k = k
        # frame coefficients (X, Y, T) of E1, E2, n
        self.e1 = np.array([-hd.qbar, hd.pbar, 0.0])
        self.e2 = np.array([k * self.rbar * hd.pbar, k * self.rbar * hd.qbar, -k * eps])
        self.n = np.array([hd.p, hd.q, eps * self.r]) / self.l_eps

    def d(self, v):
        hd, eps = self.hd, self.eps
        dp, dq, dtu = v @ self.M
        dl = (hd.p * dp + hd.q * dq) / hd.l
        dleps = (hd.p * dp + hd.q * dq + eps**2 * hd.tu * dtu) / self.l_eps
        return dict(
            pbar=dp / hd.l - hd.p * dl / hd.l**2,
            qbar=dq / hd.l - hd.q * dl / hd.l**2,
            log_l=dl / hd.l,
            log_leps=dleps / self.l_eps,
            rbar=eps * (dtu / hd.l - hd.tu * dl / hd.l**2),
        )

    def coefficients(self):
        sc = self.model.constants
        hd, eps, rbar, k = self.hd, self.eps, self.rbar, self.k
        pb, qb = hd.pbar, hd.qbar
        HH = _report(self.model, self.table, hd).HH
        dT = self.d(np.array([0.0, 0.0, eps]))
        d1, d2, dn = self.d(self.e1), self.d(self.e2), self.d(self.n)
        quad1 = sc.b2 * pb**2 + sc.a1 * qb**2 - (sc.a2 + sc.b1) * pb * qb
        Hh = HH + sc.a3 * qb - sc.b3 * pb
        A1 = k * (Hh + eps * rbar * quad1)
        A2 = qb * dT["pbar"] - pb * dT["qbar"] + eps * ((sc.b2 - sc.a1) * pb * qb + sc.b1 * pb**2 - sc.a2 * qb**2)
        A3 = k * (-rbar * Hh + eps * rbar * quad1)
        ratio = lambda d: d["log_leps"] - d["log_l"]  # derivative of log(l_eps / l)
        # B1 = -g([n, E1], E2) and B2 = -g([n, E2], E2) from the torsion-free
        # connection; the Lie-algebra terms come from the frozen brackets.
        k2 = k * k
        B1 = (
            -k2 * d1["rbar"]
            - k * rbar * (qb * dn["pbar"] - pb * dn["qbar"])
            + k2 * sc.c / eps
            - k2 * rbar * (sc.a3 * pb + sc.b3 * qb)
            + eps * k2 * rbar**2 * (sc.a2 * pb**2 + (sc.b2 - sc.a1) * pb * qb - sc.b1 * qb**2)
        )
        B2 = -k2 * d2["rbar"] + eps * k * rbar * (sc.a1 * pb**2 + (sc.a2 + sc.b1) * pb * qb + sc.b2 * qb**2)
        B3 = ratio(d1) - rbar * sc.c / eps
        C1 = d1["log_leps"]
        C2 = d2["log_leps"]
        return A1, A2, A3, B1, B2, B3, C1, C2

    def ortho(self, v):
        """Frame coefficients -> coefficients in the g_eps orthonormal frame."""
        return np.array([v[0], v[1], v[2] / self.eps])

    def coord(self, v):
        return v @ self.model.frame_jet(self.point)[0]


def _sectional(R, v, w):
    num = np.einsum("ijkm,i,j,k,m->", R, v, w, w, v)
    den = (v @ v) * (w @ w) - (v @ w) ** 2
    return float(num / den)


def direct_gauss(model: GroupModel, u: ScalarField, point, eps: float):
    """(II, H, K) from the Levi-Civita connection of g_eps; analytic, no FD.

    II[i, j] = g(nabla_{E_i} E_j, n) = -g(nabla_{E_i} N, E_j)/|N| with
    N = grad_eps u, and K = K_bar(E1, E2) + det II.
    """
    loc = _Local(model, u, point, eps)
    G = levi_civita_eps(model.constants, eps)
    R = riemann_eps(model.constants, eps)
    hd = loc.hd
    N = np.array([hd.p, hd.q, loc.r])  # orthonormal-frame components
    E = [loc.ortho(loc.e1), loc.ortho(loc.e2)]
    II = np.empty((2, 2))
    for i, v in enumerate((loc.e1, loc.e2)):
        dp, dq, dtu = v @ loc.M
        dN = np.array([dp, dq, eps * dtu]) + np.einsum("a,b,abk->k", E[i], N, G)
        for j in range(2):
            II[i, j] = -(dN @ E[j]) / loc.l_eps
    H = -float(np.trace(II))
    K = _sectional(R, E[0], E[1]) + float(np.linalg.det(II))
    return II, H, K


def epsilon_geometry(model: GroupModel, u: ScalarField, point, eps: float, on_surface=True, step=None) -> EpsilonGeometry:
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    _check_surface(u, point, on_surface)
    loc = _Local(model, u, point, eps)
    A1, A2, A3, B1, B2, B3, C1, C2 = loc.coefficients()
    off = -(A2 + B1) / 2.0
    II = np.array([[-A1, off], [off, -B2]])
    H_eps = A1 + B2

    # third-order terms: one FD layer over the analytic coefficients
    def coef(idx):
        def f(q):
            return _Local(model, u, q, eps).coefficients()[idx]

        return f

    h = default_fd_step(loc.point) if step is None else step
    E1B3 = fd_directional(model, coef(5), loc.coord(loc.e1), loc.point, step=h, order=4)
    E2A3 = fd_directional(model, coef(2), loc.coord(loc.e2), loc.point, step=h, order=4)
    K_eps = -E1B3 + E2A3 - A3**2 - B3**2

    R = riemann_eps(model.constants, eps)
    e1, e2, n = loc.ortho(loc.e1), loc.ortho(loc.e2), loc.ortho(loc.n)
    return EpsilonGeometry(
        eps=float(eps),
        l_eps=loc.l_eps,
        rbar_eps=loc.r / loc.l_eps,
        A1=float(A1), A2=float(A2), A3=float(A3),
        B1=float(B1), B2=float(B2), B3=float(B3),
        C1=float(C1), C2=float(C2),
        II=II,
        H_eps=float(H_eps),
        K_eps_sigma=float(K_eps),
        sec_E1E2=_sectional(R, e1, e2),
        sec_E1n=_sectional(R, e1, n),
        sec_E2n=_sectional(R, e2, n),
    )


def loglog_slope(eps_list, errors, floor=1e-13) -> float:
    """Least-squares slope of log(error) against log(eps).

    Rows whose error is below ``floor`` are rounding noise and are dropped;
    if fewer than two remain the convergence is exact and inf is returned.
    """
    pts = [(math.log(e), math.log(abs(err))) for e, err in zip(eps_list, errors) if abs(err) > floor]
    if len(pts) < 2:
        return math.inf
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0])


@dataclass(frozen=True)
class ConvergenceTable:
    rows: tuple  # (eps, H_eps, K_eps_sigma, A1, A3, l_eps, rbar_eps, rbar_over_eps_leps)
    limits: tuple  # (H_h, K_h)
    slopes: dict

    COLUMNS = ("eps", "H_eps", "K_eps_sigma", "A1", "A3", "l_eps", "rbar_eps", "rbar_over_eps_leps")

    def column(self, name) -> np.ndarray:
        return np.array([row[self.COLUMNS.index(name)] for row in self.rows])


def limit_table(model: GroupModel, u: ScalarField, point, eps_list=DEFAULT_EPS, on_surface=True) -> ConvergenceTable:
    eps_list = sorted((float(e) for e in eps_list), reverse=True)
    rep = curvatures(model, u, point, on_surface=on_surface)
    rows = []
    for eps in eps_list:
        g = epsilon_geometry(model, u, point, eps, on_surface=False)
        rows.append((eps, g.H_eps, g.K_eps_sigma, g.A1, g.A3, g.l_eps, g.rbar_eps, g.rbar_eps / (eps * g.l_eps)))
    table = ConvergenceTable(tuple(rows), (rep.H_h, rep.K_h), {})
    eps_arr = table.column("eps")
    slopes = {
        "H": loglog_slope(eps_arr, table.column("H_eps") - rep.H_h),
        "K": loglog_slope(eps_arr, table.column("K_eps_sigma") - rep.K_h, floor=1e-9),
        "A1": loglog_slope(eps_arr, table.column("A1") - rep.H_h),
        "A3": loglog_slope(eps_arr, table.column("A3")),
    }
    slopes_fixed = ConvergenceTable(table.rows, table.limits, slopes)
    return slopes_fixed


# leading order in eps of each lemma residual
LEMMA_ORDERS = {
    "l_eps - l": 2,
    "rbar_eps": 1,
    "rbar_eps / l_eps": 1,
    "rbar_eps / (eps l_eps) - Tu / l^2": 2,
    "(rbar_eps / eps)^2 - (Tu / l)^2": 2,
}


def lemma_limits_residuals(model: GroupModel, u: ScalarField, point, eps: float, on_surface=True):
    """[(name, residual, expected order)] for the eps -> 0 limits of the frame data."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    _check_surface(u, point, on_surface)
    loc = _Local(model, u, point, eps)
    tu, l, le = loc.hd.tu, loc.l, loc.l_eps
    rb = loc.r / le
    values = {
        "l_eps - l": abs(le - l),
        "rbar_eps": abs(rb),
        "rbar_eps / l_eps": abs(rb / le),
        "rbar_eps / (eps l_eps) - Tu / l^2": abs(rb / (eps * le) - tu / l**2),
        "(rbar_eps / eps)^2 - (Tu / l)^2": abs((rb / eps) ** 2 - (tu / l) ** 2),
    }
    return [(name, float(values[name]), order) for name, order in LEMMA_ORDERS.items()]


def lemma_limit_orders(model: GroupModel, u: ScalarField, point, eps: float = 1e-2):
    """Measured orders log2(res(eps)/res(eps/2)) per lemma residual; inf when both vanish."""
    a = lemma_limits_residuals(model, u, point, eps)
    b = lemma_limits_residuals(model, u, point, eps / 2)
    out = {}
    for (name, ra, order), (_, rb, _) in zip(a, b):
        out[name] = (math.log2(ra / rb) if ra > 0 and rb > 0 else math.inf, order)
    return out


def frame_bracket_residual(model: GroupModel, u: ScalarField, point, eps: float = 1e-2) -> float:
    """max-norm of [E1, E2] + A3 E1 + B3 E2 with the bracket taken by finite differences."""
    loc = _Local(model, u, point, eps)
    A1, A2, A3, B1, B2, B3, C1, C2 = loc.coefficients()

    def field(which):
        def vec(q):
            lq = _Local(model, u, q, eps)
            return lq.coord(lq.e1 if which == 1 else lq.e2)

        return vec

    steps = 1e-5 * (1.0 + np.abs(loc.point))
    bracket = frame_bracket_fd(field(1), field(2), loc.point, steps)
    resid = bracket + A3 * loc.coord(loc.e1) + B3 * loc.coord(loc.e2)
    return float(np.max(np.abs(resid)))
