"""Surfaces of revolution, constant-curvature profiles and model surfaces.

Heisenberg surfaces of revolution are graphs ``t = f(r)``; in the
affine-additive group they are ``a = f(rho)`` with ``rho = t / lambda``,
invariant under the scaling ``(a, l, t) -> (a, d l, d t)``.

Every classification branch is described by its slope ``g(s) = f'(s)`` as
an expression in the single variable ``s`` (and, when available, a closed
form for ``f``).  Expressions are parsed by :mod:`contactcurv.expr`, so
``f''`` comes from the jet of ``g`` rather than from differencing samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import (
    CharacteristicPointError,
    ConvergenceError,
    DegeneratePointError,
    DomainError,
    EvalDomainError,
    PreconditionError,
    ValidityError,
)
from .expr import compile_value, eval_jet2, parse
from .jets import Jet2, ScalarField

__all__ = [
    "heis_rev_curvatures",
    "aa_rev_curvatures",
    "sharp_inequality_terms",
    "ProfileCurve",
    "const_curvature_profile",
    "profile_curvatures",
    "profile_residuals",
    "profile_residual",
    "ModelSurface",
    "MODEL_FAMILIES",
    "model_surface",
    "cc_sphere_heis_jets",
    "cc_sphere_heis_closed_K",
    "cc_sphere_heis_closed_H",
    "cc_sphere_heis_H",
    "flask_point",
    "flask_mean_curvature_fd",
]

_S_CHART = ("s", "_s2", "_s3")
AA_CHAR_TOL = 1e-12


# ---------------------------------------------------------------- operators

def heis_rev_curvatures(r, fprime, fsecond):
    """(K, H, Q) of the Heisenberg surface t = f(r) from the jet of f at r."""
    r, f1, f2 = float(r), float(fprime), float(fsecond)
    if not r > 0:
        raise DomainError(f"revolution curvatures need r > 0, got r={r!r}")
    G = 4 * r * r + f1 * f1
    dG = 8 * r + 2 * f1 * f2
    K = (4 * r * dG - 16 * G) / G**2
    H = -(4 * r**3 * f2 + f1**3) / (r * G**1.5)
    Q = (r * dG - 4 * G) / G**1.5
    return K, H, Q


def _aa_den(rho, f1):
    return 4 * (rho * rho + 1) * f1 * f1 - 4 * f1 + 1


def aa_rev_curvatures(rho, fprime, fsecond):
    """(K, H, Q) of the affine-additive surface a = f(t / lambda)."""
    rho, f1, f2 = float(rho), float(fprime), float(fsecond)
    den = _aa_den(rho, f1)
    if not den > AA_CHAR_TOL:
        raise CharacteristicPointError((rho, f1, f2), math.sqrt(max(den, 0.0)))
    w = 2 * (rho * rho + 1) * f1 - 1
    num = 2 * rho * f2 * w - 4 * f1 * f1 + 4 * f1 - 1
    K = 4 * num / den**2
    Q = 2 * num / den**1.5
    H = -4 * rho * (rho * f2 + 4 * (rho * rho + 1) * f1**3 - 6 * f1 * f1 + 2 * f1) / den**1.5
    return K, H, Q


def sharp_inequality_terms(r, fprime, fsecond):
    """Return (H^2 - K, sum-of-squares form) for a Heisenberg revolution jet.

    With G = 4r^2 + f'^2 the difference H^2 - K equals
    (16 r^6 (f'' - f'/r)^2 + 16 r^2 (f'^4 + 5 f'^2 r^2 + 8 r^4) + f'^6) / (r^2 G^3),
    which is manifestly positive.
    """
    K, H, _ = heis_rev_curvatures(r, fprime, fsecond)
    r, f1, f2 = float(r), float(fprime), float(fsecond)
    G = 4 * r * r + f1 * f1
    num = 16 * r**6 * (f2 - f1 / r) ** 2 + 16 * r * r * (f1**4 + 5 * f1 * f1 * r * r + 8 * r**4) + f1**6
    sos = num / (r * r * G**3)
    return H * H - K, sos


# ---------------------------------------------------------------- branches

def _n(x) -> str:
    return f"({float(x)!r})"


@dataclass
class _Branch:
    name: str
    g: str
    f: str | None
    validity: list  # (label, expr that must be > 0, or ("sign", expr) that may not change sign)
    constant_checks: list = field(default_factory=list)  # (label, bool)


def _sign(params, key="branch"):
    b = str(params.get(key, "+")).strip()
    if b in ("+", "plus", "1", "+1"):
        return 1.0
    if b in ("-", "minus", "-1"):
        return -1.0
    raise PreconditionError(f"branch must be '+' or '-', got {b!r}")


def _get(params, *names, default=None):
    for n in names:
        if n in params:
            return float(params[n])
    if default is None:
        raise PreconditionError(f"missing parameter {names[0]!r}")
    return float(default)


def _is_partial(params):
    return str(params.get("branch", "")).strip() == "partial"


def _heis_k0(sg, C, Cp):
    return _Branch(
        "0SOR",
        g=f"{_n(sg)}*s*sqrt({_n(C)}*s^2 - 4)",
        f=f"{_n(sg)}*({_n(C)}*s^2 - 4)^1.5/(3*{_n(C)}) + {_n(Cp)}",
        validity=[("C*r^2 - 4 > 0", f"{_n(C)}*s^2 - 4")],
    )


def _heis_branch(kind, target, params):
    Cp = _get(params, "Cprime", default=0.0)
    if kind == "K":
        k = target
        sg = _sign(params)
        if k == 0:
            return _heis_k0(sg, _get(params, "C"), Cp)
        C = _get(params, "C")
        if k < 0 and C == 0:
            a = math.sqrt(-k)
            rad = f"(4 - {_n(a * a)}*s^2)"
            f = (
                f"{_n(sg)}*((s/{_n(a)})*sqrt({rad}) + {_n(4 / (a * a))}*atan({_n(a)}*s/sqrt({rad}))) + {_n(Cp)}"
            )
            return _Branch(
                "Kneg-c0",
                g=f"{_n(sg)}*2*sqrt({rad}/{_n(a * a)})",
                f=f,
                validity=[("4 + k*r^2 > 0", rad)],
            )
        return _Branch(
            "K-quadrature",
            g=f"{_n(sg)}*2*s*sqrt(({_n(k)}*s^4 + 4*s^2 - {_n(C)})/({_n(C)} - {_n(k)}*s^4))",
            f=None,
            validity=[
                ("C - k*r^4 > 0", f"{_n(C)} - {_n(k)}*s^4"),
                ("k*r^4 + 4*r^2 - C > 0", f"{_n(k)}*s^4 + 4*s^2 - {_n(C)}"),
            ],
        )
    if kind == "H":
        h = target
        sg = _sign(params)
        C = _get(params, "C", default=0.0)
        if h == 0:
            rad = f"(16*s^2 - {_n(C * C)})"
            return _Branch(
                "HMC0-SOR",
                g=f"{_n(sg)}*2*{_n(C)}*s/sqrt({rad})",
                f=f"{_n(sg)}*{_n(C / 8)}*sqrt({rad}) + {_n(Cp)}",
                validity=[("16*r^2 - C^2 > 0", rad)],
            )
        if sg > 0:
            raise PreconditionError(
                "for h != 0 the '+' sign of the slope yields H = -h with the graph orientation "
                "u = t - f(r); use branch='-' (or negate the target)"
            )
        S = f"(2*{_n(h)}*s^2 + {_n(C)})"
        rad = f"(16*s^2 - {S}^2)"
        disc = 16 / h**2 - 8 * C / h
        checks = [("16/h^2 - 8*C/h > 0", disc > 0)]
        root = math.sqrt(disc) if disc > 0 else 1.0
        f = (
            f"{_n(1 / (2 * h))}*sqrt({rad}) - {_n(2 / h**2)}*asin(({S} - {_n(4 / h)})/{_n(root)}) + {_n(Cp)}"
        )
        return _Branch(
            "const-H",
            g=f"-2*s*{S}/sqrt({rad})",
            f=f,
            validity=[("16*r^2 - (2*h*r^2 + C)^2 > 0", rad)],
            constant_checks=checks,
        )
    if kind == "Q":
        q = target
        sg = _sign(params)
        if q == 0:
            if "C" in params:
                C = _get(params, "C")
            else:
                c1 = _get(params, "c1")
                if c1 == 0:
                    raise PreconditionError("c1 must be non-zero for q = 0")
                C = 4.0 / c1**2
            return _heis_k0(sg, C, Cp)
        c1 = _get(params, "c1")
        x = f"(-{_n(q / 2)}*s - {_n(c1)}/s)"
        return _Branch(
            "Q-quadrature",
            g=f"{_n(sg)}*2*s*sqrt(1 - {x}^2)/{x}",
            f=None,
            validity=[
                ("1 - (q*r/2 + c1/r)^2 > 0", f"1 - {x}^2"),
                # the slope angle's cosine must be positive, otherwise Q = -q
                ("-q*r/2 - c1/r > 0", x),
            ],
        )
    raise PreconditionError(f"kind must be K, H or Q, got {kind!r}")


def _aa_k0(sg, c, Cp):
    phi = f"({_n(c)}*(s^2 + 1) - 1)"
    return _Branch(
        "K0-revAA",
        g=f"({_n(sg)}*s*sqrt({phi}) + 1)/(2*(s^2 + 1))",
        f=f"0.5*({_n(sg)}*sqrt({phi}) - {_n(sg)}*atan(sqrt({phi})) + atan(s)) + {_n(Cp)}",
        validity=[("c*(rho^2 + 1) - 1 > 0", phi)],
        constant_checks=[("c > 0", c > 0)],
    )


def _aa_minus4(params, Cp):
    if _is_partial(params):
        return _Branch("K-4b", g="1/(2*(s^2 + 1))", f=f"0.5*atan(s) + {_n(Cp)}", validity=[])
    sg = _sign(params)
    c = _get(params, "c")
    return _Branch(
        "K-4a",
        g=f"{_n(sg)}*s/(2*(s^2 + 1))*sqrt({_n(1 - c)}/(s^2 + {_n(c)})) + 1/(2*(s^2 + 1))",
        f=f"0.5*({_n(sg)}*atan(sqrt((s^2 + {_n(c)})/{_n(1 - c)})) + atan(s)) + {_n(Cp)}",
        validity=[("rho^2 + c > 0", f"s^2 + {_n(c)}")],
        constant_checks=[("c > 0", c > 0), ("1 - c > 0", 1 - c > 0)],
    )


def _aa_branch(kind, target, params):
    Cp = _get(params, "Cprime", "C", default=0.0)
    if kind == "K":
        k = target
        if k == 0:
            return _aa_k0(_sign(params), _get(params, "c"), _get(params, "Cprime", default=0.0))
        if k == -4:
            return _aa_minus4(params, Cp)
        sg = _sign(params)
        c1 = (k + 4) / k
        if "c" not in params:
            # only the k-part needs no c
            c = -k / 4
        else:
            c = _get(params, "c")
        Cp = _get(params, "Cprime", default=0.0)
        if abs(c + k / 4) <= 1e-14 * max(1.0, abs(k)):
            return _Branch(
                "k-part",
                g=f"({_n(sg)}*s*sqrt({_n(-c1)}) + 1)/(2*(s^2 + 1))",
                f=f"{_n(sg * math.sqrt(-c1) / 4 if c1 < 0 else 0.0)}*ln(s^2 + 1) + 0.5*atan(s) + {_n(Cp)}",
                validity=[],
                constant_checks=[("(k + 4)/k < 0", c1 < 0)],
            )
        num = f"({_n(1 + k / 4)}*s^2 + {_n(1 - c)})"
        den = f"({_n(c)} - {_n(k / 4)}*s^2)"
        w = f"sqrt({num}/{den})"
        if c1 > 0:
            a = math.sqrt(c1)
            I1 = f"{_n(a / 2)}*atan({w}/{_n(a)})"
        else:
            a = math.sqrt(-c1)
            I1 = f"{_n(c1 / (4 * a))}*ln(abs(({w} - {_n(a)})/({w} + {_n(a)})))"
        return _Branch(
            "K-0-4a",
            g=f"{_n(sg)}*s/(2*(s^2 + 1))*{w} + 1/(2*(s^2 + 1))",
            f=f"0.5*atan(s) - {_n(sg)}*0.5*atan({w}) + {_n(sg)}*{I1} + {_n(Cp)}",
            validity=[("c - (k/4)*rho^2 > 0", den), ("(1 + k/4)*rho^2 + 1 - c > 0", num)],
        )
    if kind == "H":
        h = target
        if h == 0:
            return _aa_minus4(params, Cp)
        Cp = _get(params, "Cprime", default=0.0)
        sg = _sign(params)
        c1 = _get(params, "c1")
        A = f"({_n(-h / 2)}*s + {_n(c1)})"
        D = f"(s^2 + 1 - {A}^2)"
        validity = [
            ("rho^2 + 1 - (c1 - h*rho/2)^2 > 0", D),
            ("branch*rho > 0", f"{_n(sg)}*s"),
        ]
        alpha = 1 - h * h / 4
        checks = []
        if abs(alpha) <= 1e-14:
            checks.append(("c1 != 0", c1 != 0))
            J = f"{_n(2 / (h * c1) if c1 != 0 else 0.0)}*sqrt({D})"
            case = "alpha=0"
        else:
            beta = c1 * h
            Delta = (1 - c1 * c1) - beta * beta / (4 * alpha)
            if abs(Delta) <= 1e-12:
                Delta = 0.0
            sig = f"(s + {_n(beta / (2 * alpha))})"
            ra = math.sqrt(abs(alpha))
            if alpha > 0 and Delta > 0:
                J = f"{_n(1 / ra)}*asinh_({sig}*{_n(math.sqrt(alpha / Delta))})"
                case = "alpha>0,Delta>0"
            elif alpha > 0 and Delta < 0:
                sgn = _get(params, "sigma_sign", default=1.0)
                sgn = 1.0 if sgn >= 0 else -1.0
                J = f"{_n(sgn / ra)}*acosh_(abs({sig})*{_n(math.sqrt(alpha / -Delta))})"
                validity.append(("sigma keeps its sign", f"{_n(sgn)}*{sig}"))
                case = "alpha>0,Delta<0"
            elif alpha > 0:
                sgn = _get(params, "sigma_sign", default=1.0)
                sgn = 1.0 if sgn >= 0 else -1.0
                J = f"{_n(sgn / ra)}*ln(abs({sig}))"
                validity.append(("sigma keeps its sign", f"{_n(sgn)}*{sig}"))
                case = "alpha>0,Delta=0"
            else:
                checks.append(("Delta > 0", Delta > 0))
                rd = math.sqrt(-alpha / Delta) if Delta > 0 else 1.0
                J = f"{_n(1 / ra)}*asin({sig}*{_n(rd)})"
                case = "alpha<0,Delta>0"
        f = (
            f"0.5*atan(s) + {_n(sg)}*0.5*acos({A}/sqrt(s^2 + 1)) - {_n(sg * h / 4)}*{J} + {_n(Cp)}"
        )
        return _Branch(
            f"H=const ({case})",
            g=f"({_n(sg)}*{A}*s/sqrt({D}) + 1)/(2*(s^2 + 1))",
            f=_expand_inverse_hyperbolic(f),
            validity=validity,
            constant_checks=checks,
        )
    if kind == "Q":
        q = target
        if q == 0:
            return _aa_k0(_sign(params), _get(params, "c"), _get(params, "Cprime", default=0.0))
        sg = _sign(params)
        c1 = _get(params, "c1")
        v = f"({_n(-q / 2)} + {_n(c1)}/s)"
        rad = f"(s^2*(1 - {v}^2) + 1)"
        return _Branch(
            "Q-quadrature",
            g=f"({v} + {_n(sg)}*sqrt({rad}))/(2*{v}*(s^2 + 1))",
            f=None,
            validity=[
                ("c1/rho - q/2 > 0", v),
                ("rho^2*(1 - v^2) + 1 > 0", rad),
                ("rho keeps its sign", ("sign", "s")),
            ],
        )
    raise PreconditionError(f"kind must be K, H or Q, got {kind!r}")


def _expand_inverse_hyperbolic(text):
    # the expression language has no asinh/acosh; write them with ln and sqrt
    out = text
    for name, tmpl in (("asinh_(", "ln({0} + sqrt(({0})^2 + 1))"), ("acosh_(", "ln({0} + sqrt(({0})^2 - 1))")):
        while name in out:
            i = out.index(name)
            j = i + len(name)
            depth = 1
            while depth:
                depth += {"(": 1, ")": -1}.get(out[j], 0)
                j += 1
            arg = out[i + len(name): j - 1]
            out = out[:i] + "(" + tmpl.format(f"({arg})") + ")" + out[j:]
    return out


# ---------------------------------------------------------------- profiles

@dataclass
class ProfileCurve:
    """Samples (s, f(s), f'(s)) of one classification branch."""

    group: str
    kind: str
    target: float
    params: dict
    samples: np.ndarray
    domain: tuple
    validity: tuple
    branch: str
    closed_form: bool
    slope_text: str
    profile_text: str | None
    characteristic: np.ndarray

    @property
    def s(self):
        return self.samples[:, 0]

    @property
    def f(self):
        return self.samples[:, 1]

    @property
    def fprime(self):
        return self.samples[:, 2]


def _normalize_group(group):
    g = str(group).lower()
    if g in ("heisenberg", "heis", "h"):
        return "heisenberg"
    if g in ("affine_additive", "aa", "affine-additive"):
        return "affine_additive"
    raise PreconditionError(f"unknown group {group!r}")


def _check_validity(branch: _Branch, s_nodes):
    for label, ok in branch.constant_checks:
        if not ok:
            raise ValidityError(label)
    for label, entry in branch.validity:
        if isinstance(entry, tuple):
            fn = compile_value(parse(entry[1], _S_CHART))
            vals = [fn((s, 0.0, 0.0)) for s in s_nodes]
            ref = math.copysign(1.0, vals[0]) if vals[0] != 0 else 0.0
            for s, v in zip(s_nodes, vals):
                if ref == 0 or v * ref <= 0:
                    raise ValidityError(label, s)
            continue
        fn = compile_value(parse(entry, _S_CHART))
        for s in s_nodes:
            try:
                v = fn((s, 0.0, 0.0))
            except EvalDomainError:
                raise ValidityError(label, s) from None
            if not v > 0:
                raise ValidityError(label, s)


def const_curvature_profile(group, kind, target, params=None, grid=(0.0, 1.0, 101), inset=0.0) -> ProfileCurve:
    """Sample a surface of revolution with constant K, H or Q.

    ``params`` selects the branch: ``branch`` ('+', '-' or 'partial'), the
    theorem's constants (``C``, ``c``, ``c1``) and the additive constant
    ``Cprime``.  Closed forms are used for f where they exist; otherwise f is
    integrated from ``s_min``, where it equals ``Cprime``.  ``inset`` pulls
    both grid ends inwards by that fraction of the interval.
    """
    params = dict(params or {})
    grp = _normalize_group(group)
    kind = str(kind).upper()
    target = float(target)
    s0, s1, n = float(grid[0]), float(grid[1]), int(grid[2])
    if not (math.isfinite(s0) and math.isfinite(s1)) or not s1 > s0:
        raise PreconditionError(f"grid must satisfy s_min < s_max, got {grid!r}")
    if n < 2:
        raise PreconditionError("grid needs at least 2 nodes")
    if inset:
        d = inset * (s1 - s0)
        s0, s1 = s0 + d, s1 - d
    nodes = np.linspace(s0, s1, n)
    if grp == "heisenberg" and s0 <= 0:
        raise ValidityError("r > 0", s0)
    branch = (_heis_branch if grp == "heisenberg" else _aa_branch)(kind, target, params)
    _check_validity(branch, nodes)

    g_ast = parse(branch.g, _S_CHART)
    g_fn = compile_value(g_ast)
    gvals = np.array([g_fn((s, 0.0, 0.0)) for s in nodes])
    Cp = float(params.get("Cprime", params.get("C", 0.0) if grp == "affine_additive" else 0.0))
    if branch.f is not None:
        f_fn = compile_value(parse(branch.f, _S_CHART))
        fvals = np.array([f_fn((s, 0.0, 0.0)) for s in nodes])
    else:
        fvals = np.empty(n)
        fvals[0] = Cp
        total = Cp
        for i in range(1, n):
            piece, _ = integrate.quad(lambda s: g_fn((s, 0.0, 0.0)), nodes[i - 1], nodes[i],
                                      epsabs=1e-13, epsrel=1e-12, limit=200)
            total += piece
            fvals[i] = total
    if grp == "affine_additive":
        char = np.array([_aa_den(s, g) <= AA_CHAR_TOL for s, g in zip(nodes, gvals)])
    else:
        char = np.zeros(n, dtype=bool)
    return ProfileCurve(
        group=grp,
        kind=kind,
        target=target,
        params=params,
        samples=np.column_stack([nodes, fvals, gvals]),
        domain=(s0, s1),
        validity=tuple(label for label, _ in branch.validity) + tuple(label for label, _ in branch.constant_checks),
        branch=branch.name,
        closed_form=branch.f is not None,
        slope_text=branch.g,
        profile_text=branch.f,
        characteristic=char,
    )


def _fsecond(profile: ProfileCurve, g_ast, s):
    return eval_jet2(g_ast, (s, 0.0, 0.0)).gradient[0]


def profile_curvatures(profile: ProfileCurve):
    """Arrays (K, H, Q) at every sample; NaN at characteristic samples."""
    g_ast = parse(profile.slope_text, _S_CHART)
    op = heis_rev_curvatures if profile.group == "heisenberg" else aa_rev_curvatures
    out = np.full((len(profile.samples), 3), np.nan)
    for i, (s, _, g) in enumerate(profile.samples):
        if profile.characteristic[i]:
            continue
        out[i] = op(s, g, _fsecond(profile, g_ast, s))
    return out[:, 0], out[:, 1], out[:, 2]


def profile_residuals(profile: ProfileCurve, kind=None, target=None):
    """Per-sample |curvature - target| (NaN at characteristic samples)."""
    kind = profile.kind if kind is None else str(kind).upper()
    target = profile.target if target is None else float(target)
    K, H, Q = profile_curvatures(profile)
    return np.abs({"K": K, "H": H, "Q": Q}[kind] - target)


def profile_residual(profile: ProfileCurve, kind=None, target=None) -> float:
    """Max residual over interior, non-characteristic samples."""
    if len(profile.samples) < 3:
        raise PreconditionError("profile_residual needs at least 3 samples")
    res = profile_residuals(profile, kind, target)[1:-1]
    res = res[~np.isnan(res)]
    if res.size == 0:
        raise PreconditionError("no non-characteristic interior samples")
    return float(np.max(res))


# ---------------------------------------------------------------- model surfaces

@dataclass
class ModelSurface:
    """A named surface with an implicit field and/or a parametric patch.

    ``closed_forms`` maps a point of the group to a triple (K, H, Q), any of
    which may be None where no closed form is known.
    """

    family: str
    group: str
    params: dict
    implicit: ScalarField | None
    patch: Callable | None
    patch_domain: tuple | None
    closed_forms: Callable | None
    valid: Callable | None = None  # points where closed_forms apply

    def point(self, s, phi):
        if self.patch is None:
            raise PreconditionError(f"{self.family} has no parametric patch")
        return np.asarray(self.patch(s, phi), dtype=float)


HEIS_CHART = ("x", "y", "t")
AA_CHART = ("a", "l", "t")


def _field(text, chart, **subs):
    for k, v in subs.items():
        text = text.replace("{" + k + "}", _n(v))
    return ScalarField.from_expr(text, chart)


def _r(p):
    return math.hypot(p[0], p[1])


def _rev_patch(f):
    return lambda r, phi: (r * math.cos(phi), r * math.sin(phi), f(r))


def _positive(params, name):
    v = float(params.get(name, 1.0))
    if not v > 0:
        raise PreconditionError(f"{name} must be positive, got {v!r}")
    return v


def _bubble_f(R):
    return lambda r: r * math.sqrt(4 * R * R - r * r) - 4 * R * R * math.asin(r / (2 * R)) + 2 * math.pi * R * R


def cc_sphere_heis_jets(R, k):
    """(r, f', f'') of the Heisenberg CC-sphere of radius R at geodesic parameter k.

    f'' is the true second derivative d f'/d r, i.e. (d f'/d k)/(d r/d k).
    """
    R, k = float(R), float(k)
    if k == 0 or abs(k) >= 2 * math.pi / R:
        raise PreconditionError("k must lie in (-2 pi/R, 2 pi/R) without 0")
    h = k * R / 2
    r = 2 * math.sin(h) / k
    f1 = 4 * math.cos(h) / k
    df1 = -2 * (k * R * math.sin(h) + 2 * math.cos(h)) / k**2
    dr = (k * R * math.cos(h) - 2 * math.sin(h)) / k**2
    return r, f1, df1 / dr


def cc_sphere_heis_closed_K(R, k):
    kR = k * R
    return -k * k * (kR * math.cos(kR / 2) - math.sin(kR / 2)) / (kR * math.cos(kR / 2) - 2 * math.sin(kR / 2))


def cc_sphere_heis_closed_H(R, k):
    """Mean curvature of the CC-sphere as the closed form in k is commonly stated."""
    kR = k * R
    num = (3 * kR + 6 * math.sin(kR) + math.sin(2 * kR) + kR * (math.cos(2 * kR) - 12 * math.cos(kR)))
    num /= math.sin(kR / 2) ** 2
    return num / (16 / abs(k) * (kR / math.tan(kR / 2) - 2))


def cc_sphere_heis_H(R, k):
    """Mean curvature of the CC-sphere re-derived from the revolution operator."""
    kR = k * R
    return abs(k) * (math.sin(kR) - kR * math.cos(kR)) / (kR * math.sin(kR) + 2 * math.cos(kR) - 2)


def flask_point(R, s, phi):
    R = float(R)
    ch, sh = math.cosh(R), math.sinh(R)
    a = s - ch * math.atan2(math.exp(-R) * math.sin(s), math.cos(s))
    P = ch + math.cos(phi) * sh
    lam = P * (ch + math.cos(2 * s) * sh)
    t = sh * (math.sin(phi) + P * math.sin(2 * s))
    return np.array([a, lam, t])


def _flask_a(R, s):
    return s - math.cosh(R) * math.atan2(math.exp(-R) * math.sin(s), math.cos(s))


def _flask_da(R, s):
    em = math.exp(-R)
    return 1 - math.cosh(R) * em / (math.cos(s) ** 2 + em * em * math.sin(s) ** 2)


def _invert_flask_a(R, a, s_guess, width):
    """Solve _flask_a(R, s) = a near s_guess by Newton, falling back to bisection."""
    lo, hi = s_guess - width, s_guess + width
    flo, fhi = _flask_a(R, lo) - a, _flask_a(R, hi) - a
    s = s_guess
    for _ in range(50):
        fs = _flask_a(R, s) - a
        d = _flask_da(R, s)
        step = fs / d if d != 0 else math.inf
        s_new = s - step
        if not lo <= s_new <= hi or not math.isfinite(s_new):
            if flo * fhi > 0:
                raise ConvergenceError("flask inversion left its bracket")
            s_new = 0.5 * (lo + hi)
        fn = _flask_a(R, s_new) - a
        if flo * fn <= 0:
            hi, fhi = s_new, fn
        else:
            lo, flo = s_new, fn
        if abs(s_new - s) < 1e-12:
            # one polishing step keeps round-off well below the difference step
            d = _flask_da(R, s_new)
            return s_new - (_flask_a(R, s_new) - a) / d
        s = s_new
    raise ConvergenceError("flask inversion did not converge in 50 iterations")


def _flask_u(R, s0, width):
    """Value and gradient of u = 1 - cos^2(phi) - sin^2(phi) near the patch point.

    cos(phi) and sin(phi) are recovered from (a, l, t) once s(a) is known;
    d s/d a = 1 / a'(s) by the implicit function theorem.
    """
    ch, sh = math.cosh(R), math.sinh(R)

    def u(p):
        a, lam, t = p
        s = _invert_flask_a(R, a, s0, width)
        c2, s2 = math.cos(2 * s), math.sin(2 * s)
        D = ch + c2 * sh
        dD = -2 * s2 * sh
        P = lam / D
        c = (P - ch) / sh
        sn = t / sh - P * s2
        dP_ds = -lam * dD / D**2
        dc_ds = dP_ds / sh
        dsn_ds = -(dP_ds * s2 + 2 * P * c2)
        ds_da = 1.0 / _flask_da(R, s)
        grad = -2 * np.array([
            (c * dc_ds + sn * dsn_ds) * ds_da,
            c / (D * sh) - sn * s2 / D,
            sn / sh,
        ])
        return 1.0 - (c * c + sn * sn), grad

    return u


def _fd_jet(fn, p, h):
    """Jet from an exact value and gradient, with one layer of central differences for the Hessian."""
    p = np.asarray(p, dtype=float)
    f0, g = fn(p)
    H = np.empty((3, 3))
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        H[i] = (fn(p + e)[1] - fn(p - e)[1]) / (2 * h)
    return Jet2.from_hessian(f0, g, 0.5 * (H + H.T))


def flask_mean_curvature_fd(R, s, phi, step=1e-5):
    """Horizontal mean curvature of the flask at patch point (s, phi), via an implicit u.

    The normal is oriented away from the centre of the hyperbolic circle
    through the point, the same convention under which the circle cylinders
    have H = 2 l0 / R.
    """
    from .groups import builtin_model
    from .surface import curvatures, horizontal_data

    R, s, phi = float(R), float(s), float(phi)
    if not R > 0:
        raise PreconditionError("R must be positive")
    if not (-math.pi < s < math.pi) or not (0 < phi < 2 * math.pi):
        raise DegeneratePointError(f"({s:g}, {phi:g}) is outside the open flask patch")
    da = _flask_da(R, s)
    if abs(da) < 1e-2:
        # a'(s) = 0 where cos^2 s = 1/2; the patch is not a graph over a there
        raise DegeneratePointError(f"a'(s) = {da:.3g} is too close to zero at s={s:g}")
    # stay on the monotone piece of a(s) around s
    width = 0.5 * min(math.pi - abs(s), 0.5)
    for ss in np.linspace(s - width, s + width, 9):
        if _flask_da(R, ss) * da <= 0:
            width = 0.5 * abs(ss - s)
            break
    p = flask_point(R, s, phi)
    ufn = _flask_u(R, s, width)
    u = ScalarField(lambda q: _fd_jet(ufn, q, step), AA_CHART, label=f"flask(R={R:g})")
    model = builtin_model("affine_additive")
    hd = horizontal_data(model, u, p, on_surface=False)
    P = math.cosh(R) + math.cos(phi) * math.sinh(R)
    centre = np.array([P * math.cosh(R), math.sinh(R) * math.sin(phi)])
    H = curvatures(model, u, p, on_surface=False).H_h
    # the horizontal normal projects to (l, t) along (pbar, qbar)
    if np.dot([hd.pbar, hd.qbar], centre - p[1:]) > 0:
        H = -H
    return H


def _cc_aa_patch(R):
    def patch(k, phi):
        if k == 0:
            raise DegeneratePointError("k = 0 is a removable singularity of the patch")
        q = math.sqrt(k * k + 1)
        a = k * R - q / k * math.atan(k / (q + 1) * math.tan(k * R))
        P = q + math.cos(phi)
        lam = P * (q + math.cos(2 * k * R)) / k**2
        t = math.sin(phi) / k + P * math.sin(2 * k * R) / k**2
        return (a, lam, t)

    return patch


def model_surface(family: str, params=None) -> ModelSurface:
    """Build one of the named model surfaces (see MODEL_FAMILIES)."""
    params = dict(params or {})
    fam = str(family).lower()
    if fam not in MODEL_FAMILIES:
        raise PreconditionError(f"unknown family {family!r}; choose from {', '.join(MODEL_FAMILIES)}")
    return MODEL_FAMILIES[fam](params)


def _heis_plane_nonvertical(p):
    return ModelSurface(
        "heis_plane_nonvertical", "heisenberg", p,
        implicit=_field("t", HEIS_CHART),
        patch=_rev_patch(lambda r: 0.0),
        patch_domain=((0.0, 2.0), (0.0, 2 * math.pi)),
        closed_forms=lambda q: (-2 / _r(q) ** 2, 0.0, -1 / _r(q)),
        valid=lambda q: _r(q) > 0,
    )


def _heis_plane_vertical(p):
    return ModelSurface(
        "heis_plane_vertical", "heisenberg", p,
        implicit=_field("x", HEIS_CHART),
        patch=lambda y, t: (0.0, y, t),
        patch_domain=((-2.0, 2.0), (-2.0, 2.0)),
        closed_forms=lambda q: (0.0, 0.0, 0.0),
    )


def _heis_quadric(p):
    return ModelSurface(
        "heis_quadric_2xy", "heisenberg", p,
        implicit=_field("t - 2*x*y", HEIS_CHART),
        patch=lambda x, y: (x, y, 2 * x * y),
        patch_domain=((-2.0, 2.0), (-2.0, 2.0)),
        closed_forms=lambda q: (0.0, 0.0, 0.0),
        valid=lambda q: abs(q[0]) > 0,
    )


def _heis_cylinder(p):
    R = _positive(p, "R")
    return ModelSurface(
        "heis_cylinder", "heisenberg", p,
        implicit=_field("x^2 + y^2 - {R}^2", HEIS_CHART, R=R),
        patch=lambda phi, t: (R * math.cos(phi), R * math.sin(phi), t),
        patch_domain=((0.0, 2 * math.pi), (-2.0, 2.0)),
        closed_forms=lambda q: (0.0, 1 / R, None),
    )


def _koranyi(p):
    R = _positive(p, "R")

    def closed(q):
        r = _r(q)
        return (
            (6 * r**4 - 2 * R**4) / (r * r * R**4),
            3 * r / R**2,
            (3 * r**4 - R**4) / (r * R * R * math.sqrt(R**4 - r**4)),
        )

    # the upper half as a graph t = f(r); the quartic level set has the same
    # K and H but a differently scaled Q, since Q depends on the defining function
    return ModelSurface(
        "koranyi", "heisenberg", p,
        implicit=_field("t - sqrt({R4} - (x^2 + y^2)^2)", HEIS_CHART, R4=R**4),
        patch=_rev_patch(lambda r: math.sqrt(R**4 - r**4)),
        patch_domain=((0.0, R), (0.0, 2 * math.pi)),
        closed_forms=closed,
        valid=lambda q: 0 < _r(q) < R and q[2] > 0,
    )


def _bubble(p):
    R = _positive(p, "R")
    f = _bubble_f(R)
    text = "t - (sqrt(x^2 + y^2)*sqrt({R2} - x^2 - y^2) - {R24}*asin(sqrt(x^2 + y^2)/{R2x}) + {top})"

    def patch(s, phi):
        r = 2 * R * math.sin(s / (2 * R))
        return (r * math.cos(phi), r * math.sin(phi), 2 * R * (R * math.sin(s / R) - s + math.pi * R))

    def closed(q):
        r = _r(q)
        base = 1 / R**2 - 2 / r**2
        return (base, 1 / R, R * r / math.sqrt(4 * R * R - r * r) * base)

    subs = dict(R2=4 * R * R, R24=4 * R * R, R2x=2 * R, top=2 * math.pi * R * R)
    upper = _field(text, HEIS_CHART, **subs)
    # the lower half is the mirror image t -> -t, oriented outwards as well
    lower = _field("-" + text, HEIS_CHART, **subs)
    both = ScalarField(lambda q: upper(q) if q[2] >= 0 else lower(q), HEIS_CHART, label=f"bubble(R={R:g})")
    return ModelSurface(
        "bubble", "heisenberg", p,
        implicit=both,
        patch=patch,
        patch_domain=((0.0, 2 * math.pi * R), (0.0, 2 * math.pi)),
        closed_forms=closed,
        valid=lambda q: 0 < _r(q) < 2 * R and abs(q[2] - f(_r(q))) < 1e-9,
    )


def _cc_sphere_heis(p):
    R = _positive(p, "R")

    def patch(k, phi):
        if k == 0:
            return (R * math.cos(phi), R * math.sin(phi), 0.0)
        r = 2 * math.sin(k * R / 2) / k
        return (r * math.cos(phi), r * math.sin(phi), 2 / k**2 * (math.sin(k * R) - k * R))

    return ModelSurface(
        "cc_sphere_heis", "heisenberg", p,
        implicit=None,
        patch=patch,
        patch_domain=((-2 * math.pi / R, 2 * math.pi / R), (0.0, 2 * math.pi)),
        # closed forms are functions of the geodesic parameter k here
        closed_forms=lambda k: (cc_sphere_heis_closed_K(R, k), cc_sphere_heis_closed_H(R, k), None),
    )


def _aa_plane(p):
    A, B, C, D = (float(p.get(n, 0.0)) for n in "ABCD")
    if A == B == C == 0:
        raise PreconditionError("plane coefficients A, B, C may not all vanish")

    def closed(q):
        lam = q[1]
        poly = A**3 + 6 * A * A * C * lam + 4 * A * lam * lam * (2 * B * B + 3 * C * C) + 8 * C * lam**3 * (B * B + C * C)
        base = (A + 2 * C * lam) ** 2 + 4 * B * B * lam * lam
        K = -4 * A * poly / base**2
        H = -8 * B * lam * lam * (A * C + 2 * lam * (B * B + C * C)) / base**1.5
        Q = -2 * poly / base**1.5
        return K, H, Q

    def patch(l, t):
        if A == 0:
            raise PreconditionError("vertical planes are parametrized over (a, l) or (a, t); no default patch")
        return (-(B * l + C * t + D) / A, l, t)

    return ModelSurface(
        "aa_plane", "affine_additive", p,
        implicit=_field("{A}*a + {B}*l + {C}*t + {D}", AA_CHART, A=A, B=B, C=C, D=D),
        patch=patch if A != 0 else None,
        patch_domain=((0.2, 3.0), (-2.0, 2.0)),
        closed_forms=closed,
    )


def _aa_hyperbolic_plane(p):
    return ModelSurface(
        "aa_hyperbolic_plane", "affine_additive", p,
        implicit=_field("a", AA_CHART),
        patch=lambda l, t: (0.0, l, t),
        patch_domain=((0.2, 3.0), (-2.0, 2.0)),
        closed_forms=lambda q: (-4.0, 0.0, -2.0),
    )


def _aa_cylinder_circle(p):
    R = _positive(p, "R")
    l0 = float(p.get("l0", p.get("lambda0", 2.0 * R)))
    t0 = float(p.get("t0", 0.0))
    if not l0 > R:
        raise PreconditionError("the circle must lie in l > 0: need l0 > R")
    return ModelSurface(
        "aa_cylinder_circle", "affine_additive", p,
        implicit=_field("(l - {l0})^2 + (t - {t0})^2 - {R2}", AA_CHART, l0=l0, t0=t0, R2=R * R),
        patch=lambda a, th: (a, l0 + R * math.cos(th), t0 + R * math.sin(th)),
        patch_domain=((-2.0, 2.0), (0.0, 2 * math.pi)),
        closed_forms=lambda q: (0.0, 2 * l0 / R, -2 * (q[2] - t0) / R),
    )


def _aa_cylinder_line(p):
    A, B = float(p.get("A", 1.0)), float(p.get("B", 1.0))
    D = float(p.get("D", 0.0))
    if A == 0 and B == 0:
        raise PreconditionError("A and B may not both vanish")
    nrm = math.hypot(A, B)

    def patch(a, s):
        # points on A l + B t + D = 0 along its direction (-B, A)
        l0, t0 = (-A * D / nrm**2, -B * D / nrm**2) if D else (A / nrm, B / nrm)
        return (a, l0 - B / nrm * s, t0 + A / nrm * s)

    return ModelSurface(
        "aa_cylinder_line", "affine_additive", p,
        implicit=_field("{A}*l + {B}*t + {D}", AA_CHART, A=A, B=B, D=D),
        patch=patch,
        patch_domain=((-2.0, 2.0), (-0.5, 0.5)),
        closed_forms=lambda q: (0.0, -2 * A / nrm, -2 * B / nrm),
        valid=lambda q: q[1] > 0,
    )


def _flask(p):
    R = _positive(p, "R")
    return ModelSurface(
        "flask_patch", "affine_additive", p,
        implicit=None,
        patch=lambda s, phi: tuple(flask_point(R, s, phi)),
        patch_domain=((-math.pi, math.pi), (0.0, 2 * math.pi)),
        closed_forms=None,
    )


def _cc_sphere_aa(p):
    R = _positive(p, "R")
    kmax = math.pi / math.sinh(R)
    return ModelSurface(
        "cc_sphere_aa_patch", "affine_additive", p,
        implicit=None,
        patch=_cc_aa_patch(R),
        patch_domain=((-kmax, kmax), (0.0, 2 * math.pi)),
        closed_forms=None,
    )


MODEL_FAMILIES = {
    "heis_plane_nonvertical": _heis_plane_nonvertical,
    "heis_plane_vertical": _heis_plane_vertical,
    "heis_quadric_2xy": _heis_quadric,
    "heis_cylinder": _heis_cylinder,
    "koranyi": _koranyi,
    "bubble": _bubble,
    "cc_sphere_heis": _cc_sphere_heis,
    "aa_plane": _aa_plane,
    "aa_hyperbolic_plane": _aa_hyperbolic_plane,
    "aa_cylinder_circle": _aa_cylinder_circle,
    "aa_cylinder_line": _aa_cylinder_line,
    "flask_patch": _flask,
    "cc_sphere_aa_patch": _cc_sphere_aa,
}
