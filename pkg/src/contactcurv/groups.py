"""Contact sub-Riemannian Lie groups in dimension three.

A group is described twice: abstractly by its seven bracket constants and
concretely by a coordinate model carrying the left-invariant frame
``{X, Y, T}``.  The frame coefficients come with exact first partials so
that second-order frame derivatives never need nested differencing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError

__all__ = [
    "StructureConstants",
    "Violation",
    "ValidationResult",
    "GroupModel",
    "validate_structure_constants",
    "builtin_model",
    "bracket_residual",
    "frame_bracket_fd",
    "sectional_curvatures_eps",
    "levi_civita_eps",
    "riemann_eps",
    "sectional_curvature_eps",
    "HEISENBERG",
    "AFFINE_ADDITIVE",
]


@dataclass(frozen=True)
class StructureConstants:
    """Bracket constants of the frame {X, Y, T}.

    [X,T] = a1 X + b1 Y,  [Y,T] = a2 X + b2 Y,  [X,Y] = a3 X + b3 Y + c T.
    """

    a1: float = 0.0
    b1: float = 0.0
    a2: float = 0.0
    b2: float = 0.0
    a3: float = 0.0
    b3: float = 0.0
    c: float = 1.0

    def bracket_table(self) -> np.ndarray:
        """C[i, j] = coefficients of [F_i, F_j] in the frame (X, Y, T)."""
        C = np.zeros((3, 3, 3))
        C[0, 2] = (self.a1, self.b1, 0.0)
        C[1, 2] = (self.a2, self.b2, 0.0)
        C[0, 1] = (self.a3, self.b3, self.c)
        C[2, 0] = -C[0, 2]
        C[2, 1] = -C[1, 2]
        C[1, 0] = -C[0, 1]
        return C


@dataclass(frozen=True)
class Violation:
    equation: str
    residual: float


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_structure_constants(sc: StructureConstants, tol: float = 0.0) -> ValidationResult:
    """Check the Jacobi constraints and c != 0.

    Each violated equation is reported with its residual.
    """
    checks = [
        ("a1*b3-a3*b1=0", sc.a1 * sc.b3 - sc.a3 * sc.b1),
        ("a2*b3-a3*b2=0", sc.a2 * sc.b3 - sc.a3 * sc.b2),
        ("a1+b2=0", sc.a1 + sc.b2),
    ]
    out = [Violation(eq, float(res)) for eq, res in checks if abs(res) > tol]
    if sc.c == 0:
        out.append(Violation("c!=0", 0.0))
    return ValidationResult(tuple(out))


# Frame callables return (F, dF) with F[a, j] the coefficient of d/dx_j in
# field a and dF[a, j, i] = d F[a, j] / d x_i.
FrameJet = Callable[[np.ndarray], "tuple[np.ndarray, np.ndarray]"]


@dataclass(frozen=True)
class GroupModel:
    """A coordinate chart on a 3D contact group with its left-invariant frame."""

    name: str
    chart: tuple[str, str, str]
    field_names: tuple[str, str, str]
    frame_jet: FrameJet = field(repr=False)
    coframe: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    constants: StructureConstants
    domain: Callable[[np.ndarray], bool] = field(repr=False, default=lambda p: True)
    domain_text: str = "all of R^3"

    def check_domain(self, point) -> np.ndarray:
        p = np.asarray(point, dtype=float)
        if p.shape != (3,) or not np.all(np.isfinite(p)):
            raise DomainError(f"point must be a finite 3-vector, got {point!r}")
        if not self.domain(p):
            raise DomainError(f"point {tuple(p)} outside chart domain of {self.name} ({self.domain_text})")
        return p

    def frame(self, point) -> np.ndarray:
        """Rows are the coordinate components of X, Y, T at the point."""
        return self.frame_jet(self.check_domain(point))[0]

    def field_index(self, name: str) -> int:
        if name in self.field_names:
            return self.field_names.index(name)
        generic = ("X", "Y", "T")
        if name in generic:
            return generic.index(name)
        raise KeyError(f"unknown frame field {name!r} for {self.name}; use one of {self.field_names}")


def _heis_frame(p):
    x, y, _ = p
    F = np.array([[1.0, 0.0, 2.0 * y], [0.0, 1.0, -2.0 * x], [0.0, 0.0, 1.0]])
    dF = np.zeros((3, 3, 3))
    dF[0, 2, 1] = 2.0
    dF[1, 2, 0] = -2.0
    return F, dF


def _heis_coframe(p):
    x, y, _ = p
    return np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-2.0 * y, 2.0 * x, 1.0]])


def _aa_frame(p):
    _, lam, _ = p
    F = np.array([[0.0, 2.0 * lam, 0.0], [1.0, 0.0, 2.0 * lam], [-1.0, 0.0, 0.0]])
    dF = np.zeros((3, 3, 3))
    dF[0, 1, 1] = 2.0
    dF[1, 2, 1] = 2.0
    return F, dF


def _aa_coframe(p):
    _, lam, _ = p
    return np.array(
        [[0.0, 1.0 / (2 * lam), 0.0], [0.0, 0.0, 1.0 / (2 * lam)], [-1.0, 0.0, 1.0 / (2 * lam)]]
    )


# chart (a, rho, l) with t = rho * l
def _aa_rho_frame(p):
    _, rho, lam = p
    F = np.array([[0.0, -2.0 * rho, 2.0 * lam], [1.0, 2.0, 0.0], [-1.0, 0.0, 0.0]])
    dF = np.zeros((3, 3, 3))
    dF[0, 1, 1] = -2.0
    dF[0, 2, 2] = 2.0
    return F, dF


def _aa_rho_coframe(p):
    _, rho, lam = p
    # omega1 = dl/(2l), omega2 = dt/(2l) = (l drho + rho dl)/(2l), theta = omega2 - da
    return np.array(
        [
            [0.0, 0.0, 1.0 / (2 * lam)],
            [0.0, 0.5, rho / (2 * lam)],
            [-1.0, 0.5, rho / (2 * lam)],
        ]
    )


HEISENBERG = StructureConstants(c=-4.0)
AFFINE_ADDITIVE = StructureConstants(b3=2.0, c=2.0)

_BUILTINS = {
    "heisenberg": lambda: GroupModel(
        name="heisenberg",
        chart=("x", "y", "t"),
        field_names=("X", "Y", "T"),
        frame_jet=_heis_frame,
        coframe=_heis_coframe,
        constants=HEISENBERG,
    ),
    "affine_additive": lambda: GroupModel(
        name="affine_additive",
        chart=("a", "l", "t"),
        field_names=("V", "U", "W"),
        frame_jet=_aa_frame,
        coframe=_aa_coframe,
        constants=AFFINE_ADDITIVE,
        domain=lambda p: p[1] > 0,
        domain_text="l > 0",
    ),
    "affine_additive_rho": lambda: GroupModel(
        name="affine_additive_rho",
        chart=("a", "rho", "l"),
        field_names=("V", "U", "W"),
        frame_jet=_aa_rho_frame,
        coframe=_aa_rho_coframe,
        constants=AFFINE_ADDITIVE,
        domain=lambda p: p[2] > 0,
        domain_text="l > 0",
    ),
}

_ALIASES = {"heis": "heisenberg", "h": "heisenberg", "aa": "affine_additive", "aa_rho": "affine_additive_rho"}


def builtin_model(name: str) -> GroupModel:
    """Return one of ``heisenberg``, ``affine_additive``, ``affine_additive_rho``."""
    key = _ALIASES.get(name, name)
    try:
        return _BUILTINS[key]()
    except KeyError:
        raise ValueError(f"unknown group model {name!r}; expected one of {sorted(_BUILTINS)}") from None


def frame_bracket_fd(vec_a, vec_b, point, steps) -> np.ndarray:
    """Coordinate components of [A, B] at ``point`` by central differences.

    ``vec_a``/``vec_b`` map a point to a coordinate 3-vector.
    """
    p = np.asarray(point, dtype=float)
    JA = np.empty((3, 3))
    JB = np.empty((3, 3))
    for i in range(3):
        e = np.zeros(3)
        e[i] = steps[i]
        JA[:, i] = (vec_a(p + e) - vec_a(p - e)) / (2 * steps[i])
        JB[:, i] = (vec_b(p + e) - vec_b(p - e)) / (2 * steps[i])
    return JB @ vec_a(p) - JA @ vec_b(p)


def bracket_residual(model: GroupModel, point) -> float:
    """Max deviation of finite-difference brackets from the structure constants."""
    p = model.check_domain(point)
    steps = 1e-5 * (1.0 + np.abs(p))
    for s in (-1, 1):
        for i in range(3):
            q = p.copy()
            q[i] += s * steps[i]
            model.check_domain(q)
    fields = [lambda x, a=a: model.frame_jet(x)[0][a] for a in range(3)]
    F = model.frame_jet(p)[0]
    C = model.constants.bracket_table()
    worst = 0.0
    for i, j in ((0, 2), (1, 2), (0, 1)):
        fd = frame_bracket_fd(fields[i], fields[j], p, steps)
        exact = C[i, j] @ F
        worst = max(worst, float(np.max(np.abs(fd - exact))))
    return worst


def sectional_curvatures_eps(sc: StructureConstants, eps: float) -> tuple[float, float, float]:
    """Closed-form sectional curvatures K(X,Y), K(X,T_eps), K(Y,T_eps) of g_eps."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    a1, b1, a2, b2, a3, b3, c = sc.a1, sc.b1, sc.a2, sc.b2, sc.a3, sc.b3, sc.c
    e2 = eps * eps
    kxy = -(a3**2) - b3**2 + c / 2 * (a2 - b1) + e2 * ((a2 + b1) ** 2 / 4 + a1**2) - 3 * c**2 / (4 * e2)
    kxt = c**2 / (4 * e2) + e2 / 4 * ((a2 + b1) * (a2 - 3 * b1) - 4 * a1**2) - c / 2 * (a2 + b1)
    kyt = c**2 / (4 * e2) - e2 / 4 * ((a2 + b1) * (3 * a2 - b1) + 4 * a1**2) + c / 2 * (a2 + b1)
    return kxy, kxt, kyt


def _eps_brackets(sc: StructureConstants, eps: float) -> np.ndarray:
    """Bracket table of the g_eps-orthonormal frame (X, Y, eps*T)."""
    C = sc.bracket_table()
    S = np.diag([1.0, 1.0, eps])  # e_i = S_ii F_i
    Sinv = np.diag([1.0, 1.0, 1.0 / eps])
    return np.einsum("i,j,ijk,k->ijk", np.diag(S), np.diag(S), C, np.diag(Sinv))


def levi_civita_eps(sc: StructureConstants, eps: float) -> np.ndarray:
    """Gamma[i, j, k] = g_eps(nabla_{e_i} e_j, e_k) for e = (X, Y, eps*T).

    Koszul formula for a left-invariant orthonormal frame.
    """
    C = _eps_brackets(sc, eps)
    return 0.5 * (C - np.einsum("jki->ijk", C) + np.einsum("kij->ijk", C))


def riemann_eps(sc: StructureConstants, eps: float) -> np.ndarray:
    """R[i, j, k, m] = g_eps(R(e_i, e_j) e_k, e_m) with R(A,B) = [nabla_A, nabla_B] - nabla_[A,B]."""
    G = levi_civita_eps(sc, eps)
    C = _eps_brackets(sc, eps)
    # nabla_i nabla_j e_k = sum_n G[j,k,n] G[i,n,m] e_m  (constant coefficients)
    nn = np.einsum("jkn,inm->ijkm", G, G)
    return nn - np.einsum("jikm->ijkm", nn) - np.einsum("ijl,lkm->ijkm", C, G)


def sectional_curvature_eps(sc: StructureConstants, eps: float, v, w) -> float:
    """Sectional curvature of span{v, w}, vectors given in the (X, Y, eps*T) basis."""
    R = riemann_eps(sc, eps)
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    num = np.einsum("ijkm,i,j,k,m->", R, v, w, w, v)
    den = (v @ v) * (w @ w) - (v @ w) ** 2
    return float(num / den)
