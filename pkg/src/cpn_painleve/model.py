"""
Residuals of the CP^{N-1} field equations in affine coordinates.

For ``i = 1..N-1``::

    (a)  (1 + sum_l w̄_l w_l) d dbar w_i  - sum_l w̄_l (dbar w_l d w_i + d w_l dbar w_i)
    (b)  (1 + sum_l w_l w̄_l) d dbar w̄_i - sum_l w_l (dbar w̄_l d w̄_i + d w̄_l dbar w̄_i)

Equation (b) is the exact image of (a) under the exchange ``w <-> w̄``.
Residuals are always returned as a flat list: all (a) components, then all
(b) components.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigurationError
from .laurent import LaurentSeries, SingularityFunction, apply_d, apply_dbar


@dataclass(frozen=True)
class FieldTuple:
    N: int
    w: tuple[LaurentSeries, ...]
    wbar: tuple[LaurentSeries, ...]

    def __post_init__(self):
        if self.N < 2:
            raise ConfigurationError("N must be at least 2")
        if len(self.w) != self.N - 1 or len(self.wbar) != self.N - 1:
            raise ConfigurationError("need N-1 series for both w and w̄")
        ref = self.w[0]
        for s in (*self.w, *self.wbar):
            if s.base_point != ref.base_point or s.jet_order != ref.jet_order:
                raise ConfigurationError("all fields must share jet base point and order")

    def swapped(self) -> "FieldTuple":
        return FieldTuple(self.N, self.wbar, self.w)


def _half_terms(u: Sequence[LaurentSeries], v: Sequence[LaurentSeries],
                phi: SingularityFunction):
    """The three pieces of equation (a) for fields ``u`` with partners ``v``.

    Returns per component ``(1 + sum v u) d dbar u_i``,
    ``-(sum v dbar u) d u_i`` and ``-(sum v d u) dbar u_i``.
    """
    dbar_u = [apply_dbar(s) for s in u]
    d_u = [apply_d(s, phi) for s in u]
    dd_u = [apply_d(s, phi) for s in dbar_u]
    norm = 1 + sum((vl * ul for vl, ul in zip(v[1:], u[1:])), v[0] * u[0])
    p = sum((vl * s for vl, s in zip(v[1:], dbar_u[1:])), v[0] * dbar_u[0])
    q = sum((vl * s for vl, s in zip(v[1:], d_u[1:])), v[0] * d_u[0])
    return [(norm * dd_u[i], -(p * d_u[i]), -(q * dbar_u[i])) for i in range(len(u))]


def residual_terms(fields: FieldTuple, phi: SingularityFunction):
    """Per-equation triples of the separate terms; their sum is the residual."""
    return (_half_terms(fields.w, fields.wbar, phi)
            + _half_terms(fields.wbar, fields.w, phi))


def residual_series(fields: FieldTuple, phi: SingularityFunction) -> list[LaurentSeries]:
    """Residuals of both equation families as Laurent series in ``Phi``."""
    return [t0 + t1 + t2 for t0, t1, t2 in residual_terms(fields, phi)]


@dataclass(frozen=True)
class PointState:
    """Values and derivatives of every field at one point of C^2.

    ``d_*`` is the derivative in ``xi``, ``dbar_*`` in ``xibar``, ``ddbar_*``
    the mixed second derivative.
    """

    w: Sequence[complex]
    wbar: Sequence[complex]
    d_w: Sequence[complex]
    dbar_w: Sequence[complex]
    d_wbar: Sequence[complex]
    dbar_wbar: Sequence[complex]
    ddbar_w: Sequence[complex]
    ddbar_wbar: Sequence[complex]

    @property
    def N(self) -> int:
        return len(self.w) + 1

    def swapped(self) -> "PointState":
        return PointState(self.wbar, self.w, self.d_wbar, self.dbar_wbar,
                          self.d_w, self.dbar_w, self.ddbar_wbar, self.ddbar_w)


def _half_point(u, v, du, dbu, dv, dbv, ddu):
    n = len(u)
    norm = 1 + sum(v[l] * u[l] for l in range(n))
    p = sum(v[l] * dbu[l] for l in range(n))
    q = sum(v[l] * du[l] for l in range(n))
    return [norm * ddu[i] - p * du[i] - q * dbu[i] for i in range(n)]


def residual_point(state: PointState) -> list:
    """Literal evaluation of both equation families at one point."""
    s = state
    return (_half_point(s.w, s.wbar, s.d_w, s.dbar_w, s.d_wbar, s.dbar_wbar, s.ddbar_w)
            + _half_point(s.wbar, s.w, s.d_wbar, s.dbar_wbar, s.d_w, s.dbar_w, s.ddbar_wbar))


def point_state_from_series(fields: FieldTuple, phi: SingularityFunction,
                            xi, Phi) -> PointState:
    """Evaluate fields and their derivatives at ``(xi, xibar = phi(xi) + Phi)``."""
    vals = {}
    for name, group in (("w", fields.w), ("wbar", fields.wbar)):
        vals[name] = [s(xi, Phi) for s in group]
        vals["d_" + name] = [apply_d(s, phi)(xi, Phi) for s in group]
        dbar = [apply_dbar(s) for s in group]
        vals["dbar_" + name] = [s(xi, Phi) for s in dbar]
        vals["ddbar_" + name] = [apply_d(s, phi)(xi, Phi) for s in dbar]
    return PointState(**vals)
