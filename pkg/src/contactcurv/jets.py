"""Second-order jets of scalar fields and their frame derivatives.

Naming convention for the table: ``XYu`` means X(Y u), i.e. the outer
field is written first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ChartMismatchError, DomainError
from .groups import GroupModel

__all__ = [
    "Jet2",
    "ScalarField",
    "FrameDerivTable",
    "frame_derivative_1",
    "frame_derivatives_2",
    "fd_directional",
    "default_fd_step",
]

# storage order of the upper triangle
_IDX = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
_FULL = np.array([[0, 1, 2], [1, 3, 4], [2, 4, 5]])


def _sym(a, b):
    """Upper triangle of (a b^T + b a^T) / 2."""
    return np.array([(a[i] * b[j] + a[j] * b[i]) * 0.5 for i, j in _IDX])


@dataclass(frozen=True, eq=False)
class Jet2:
    """Value, gradient and Hessian of a scalar field at a point.

    The Hessian is kept as its six independent entries, so it is symmetric
    by construction.
    """

    value: float
    gradient: np.ndarray
    h6: np.ndarray

    @classmethod
    def constant(cls, c):
        return cls(float(c), np.zeros(3), np.zeros(6))

    @classmethod
    def variable(cls, index, x):
        g = np.zeros(3)
        g[index] = 1.0
        return cls(float(x), g, np.zeros(6))

    @classmethod
    def from_hessian(cls, value, gradient, hessian):
        H = np.asarray(hessian, dtype=float)
        return cls(float(value), np.asarray(gradient, dtype=float), np.array([H[i, j] for i, j in _IDX]))

    @property
    def hessian(self) -> np.ndarray:
        return self.h6[_FULL]

    def compose(self, f0, f1, f2) -> "Jet2":
        """Apply a scalar function given its value and first two derivatives."""
        g = self.gradient
        return Jet2(f0, f1 * g, f1 * self.h6 + f2 * _sym(g, g))

    def __add__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.value + other, self.gradient, self.h6)
        return Jet2(self.value + other.value, self.gradient + other.gradient, self.h6 + other.h6)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, -self.gradient, -self.h6)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.value * other, self.gradient * other, self.h6 * other)
        u, v = self, other
        return Jet2(
            u.value * v.value,
            u.value * v.gradient + v.value * u.gradient,
            u.value * v.h6 + v.value * u.h6 + 2.0 * _sym(u.gradient, v.gradient),
        )

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        r = 1.0 / self.value
        return self.compose(r, -r * r, 2.0 * r * r * r)

    def __truediv__(self, other):
        if not isinstance(other, Jet2):
            return self * (1.0 / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __repr__(self):
        return f"Jet2(value={self.value!r}, gradient={self.gradient.tolist()!r}, h6={self.h6.tolist()!r})"


@dataclass(frozen=True)
class ScalarField:
    """A C^2 function on a chart, evaluated to Jet2."""

    evaluator: Callable[[np.ndarray], Jet2] = field(repr=False)
    chart: tuple[str, str, str]
    label: str = "u"

    def __call__(self, point) -> Jet2:
        return self.evaluator(np.asarray(point, dtype=float))

    def value(self, point) -> float:
        return self(point).value

    @classmethod
    def from_expr(cls, text: str, chart) -> "ScalarField":
        from .expr import eval_jet2, parse

        ast = parse(text, chart)
        return cls(lambda p: eval_jet2(ast, p), tuple(chart), label=text)

    def _lift(self, other):
        if isinstance(other, ScalarField):
            if other.chart != self.chart:
                raise ChartMismatchError(f"cannot combine fields on {self.chart} and {other.chart}")
            return other
        c = float(other)
        return ScalarField(lambda p: Jet2.constant(c), self.chart, label=repr(c))

    def __add__(self, other):
        o = self._lift(other)
        return ScalarField(lambda p: self(p) + o(p), self.chart, f"({self.label})+({o.label})")

    __radd__ = __add__

    def __mul__(self, other):
        o = self._lift(other)
        return ScalarField(lambda p: self(p) * o(p), self.chart, f"({self.label})*({o.label})")

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(lambda p: -self(p), self.chart, f"-({self.label})")

    def __sub__(self, other):
        return self + (-self._lift(other))


@dataclass(frozen=True)
class FrameDerivTable:
    """First and second frame derivatives of u at a point (frame units)."""

    Xu: float
    Yu: float
    Tu: float
    XXu: float
    XYu: float
    YXu: float
    YYu: float
    XTu: float
    YTu: float
    TTu: float
    TXu: float
    TYu: float

    @classmethod
    def from_arrays(cls, first, second):
        f, M = first, second
        return cls(
            Xu=float(f[0]), Yu=float(f[1]), Tu=float(f[2]),
            XXu=float(M[0, 0]), XYu=float(M[0, 1]), YXu=float(M[1, 0]), YYu=float(M[1, 1]),
            XTu=float(M[0, 2]), YTu=float(M[1, 2]), TTu=float(M[2, 2]), TXu=float(M[2, 0]), TYu=float(M[2, 1]),
        )

    @property
    def first(self) -> np.ndarray:
        return np.array([self.Xu, self.Yu, self.Tu])

    @property
    def second(self) -> np.ndarray:
        """M[a, b] = F_a(F_b u)."""
        return np.array(
            [
                [self.XXu, self.XYu, self.XTu],
                [self.YXu, self.YYu, self.YTu],
                [self.TXu, self.TYu, self.TTu],
            ]
        )

    def bracket_defect(self, sc) -> float:
        """XYu - YXu - (a3 Xu + b3 Yu + c Tu); zero up to rounding."""
        return self.XYu - self.YXu - (sc.a3 * self.Xu + sc.b3 * self.Yu + sc.c * self.Tu)


def _checked(model: GroupModel, u: ScalarField, point) -> np.ndarray:
    if tuple(u.chart) != tuple(model.chart):
        raise ChartMismatchError(f"field chart {u.chart} does not match model chart {model.chart}")
    return model.check_domain(point)


def frame_derivative_1(model: GroupModel, field_name: str, u: ScalarField, point) -> float:
    """Apply one frame field (``X``/``Y``/``T`` or the model's own names) to u."""
    p = _checked(model, u, point)
    F = model.frame_jet(p)[0]
    return float(F[model.field_index(field_name)] @ u(p).gradient)


def frame_derivatives_2(model: GroupModel, u: ScalarField, point) -> FrameDerivTable:
    p = _checked(model, u, point)
    jet = u(p)
    F, dF = model.frame_jet(p)
    g, H = jet.gradient, jet.hessian
    first = F @ g
    # F_a(F_b u) = F_a^i (d_i F_b^j) d_j u + F_a^i F_b^j d_i d_j u
    second = np.einsum("ai,bji,j->ab", F, dF, g) + F @ H @ F.T
    return FrameDerivTable.from_arrays(first, second)


def default_fd_step(point, scale=1e-4) -> float:
    return scale * (1.0 + float(np.max(np.abs(point))))


_STENCILS = {
    2: ((1.0, 1.0), (-1.0, -1.0)),
    4: ((8.0 / 12, 1.0), (-8.0 / 12, -1.0), (-1.0 / 12, 2.0), (1.0 / 12, -2.0)),
}


def fd_directional(model: GroupModel, functional, direction, point, step=None, order=2) -> float:
    """Central-difference derivative of ``functional`` along ``direction`` at ``point``.

    ``direction`` is a frame field name, a coordinate 3-vector, or a callable
    returning one; it is frozen at the base point.  ``order`` selects the
    2nd-order (default) or 4th-order central stencil.
    """
    p = model.check_domain(point)
    if isinstance(direction, str):
        d = model.frame_jet(p)[0][model.field_index(direction)]
    elif callable(direction):
        d = np.asarray(direction(p), dtype=float)
    else:
        d = np.asarray(direction, dtype=float)
    h = default_fd_step(p) if step is None else float(step)
    if not h > 0:
        raise ValueError("step must be positive")
    try:
        stencil = _STENCILS[order]
    except KeyError:
        raise ValueError(f"order must be 2 or 4, got {order}") from None
    total = 0.0
    for weight, k in stencil:
        q = p + k * h * d
        if not model.domain(q):
            raise DomainError(f"finite-difference neighbourhood of {tuple(p)} leaves the chart domain")
        total += weight * functional(q)
    return total / (2.0 * h) if order == 2 else total / h
