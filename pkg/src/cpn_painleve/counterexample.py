"""
Explicit CP^1 envelope solitary wave and its analytic continuation.

    chi = xi/a - xibar/b,     g = (p+1)(chi - chi0) / (2(p-1))
    R^2 = ((p-1) cosh g + p + 1) / ((p-1) cosh g - p - 1)
    f   = arctan(c tanh g) + ((p + 2 sqrt(-p) - 1) chi - 2 sqrt(-p) chi0) / (2(p-1)) + d
    w   = R exp(i(xi/a - f)),   w̄ = R exp(-i(xi/a - f)),   c = (p+1) / (2 sqrt(-p))

``R`` and ``arctan`` are multivalued.  Both are tracked by continuing
``log R^2`` and ``log q`` with ``q = (cosh g + i c sinh g)/(cosh g - i c sinh g)``
(so ``arctan = log(q) / 2i``) along a path from the base point
``chi0 + 1``, where principal branches and ``R > 0`` are used.

Singular loci of the pieces:

* ``tanh g`` has poles at ``g = (m + 1/2) i pi``.  ``q`` stays finite there,
  and continuation across them is smooth.
* ``q`` has zeros/poles where ``c tanh g = ±i``.  Going around one of these
  shifts ``f`` by ``pi``, i.e. multiplies ``exp(-if)`` by -1.
* ``R^2`` vanishes or blows up where ``cosh g = ∓(p+1)/(p-1)``.  These are
  the same points, and ``R`` changes sign around each of them.

:func:`monodromy_probe` reports the change of ``w`` and of the separate
pieces around a loop.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, RefineStepsError, SingularityError
from .model import PointState

JUMP_LIMIT = 0.5          # max allowed phase change of a tracked quantity per step
SINGULAR_TOL = 1e-12


@dataclass(frozen=True)
class SolitonParams:
    p: float = -4.0
    a: complex = 1.0
    b: complex = 2.0
    chi0: complex = 0.0
    d: complex = 0.0

    def __post_init__(self):
        if self.a == 0 or self.b == 0:
            raise ConfigurationError("a and b must be nonzero")
        if self.p in (0, 1, -1):
            raise ConfigurationError(f"p = {self.p} is degenerate (need p not in {{-1, 0, 1}})")

    @property
    def sqrt_minus_p(self) -> complex:
        return cmath.sqrt(-self.p)

    @property
    def c(self) -> complex:
        return (self.p + 1) / (2 * self.sqrt_minus_p)

    @property
    def gamma(self) -> float:
        """dg/dchi."""
        return (self.p + 1) / (2 * (self.p - 1))

    @property
    def linear_rate(self) -> complex:
        """Coefficient of chi in the non-arctan part of f."""
        return (self.p + 2 * self.sqrt_minus_p - 1) / (2 * (self.p - 1))

    def chi(self, xi, xibar):
        return xi / self.a - xibar / self.b

    def g(self, chi):
        return self.gamma * (chi - self.chi0)

    @property
    def base_chi(self) -> complex:
        return complex(self.chi0) + 1.0


# -- single-valued building blocks ---------------------------------------------

def _pieces(params: SolitonParams, chi):
    """R^2, q and the linear part of f at ``chi`` (numpy-vectorised)."""
    p, c = params.p, params.c
    g = params.g(np.asarray(chi, dtype=complex))
    C, S = np.cosh(g), np.sinh(g)
    R2 = ((p - 1) * C + p + 1) / ((p - 1) * C - p - 1)
    q = (C + 1j * c * S) / (C - 1j * c * S)
    lin = (params.linear_rate * np.asarray(chi)
           - 2 * params.sqrt_minus_p * params.chi0 / (2 * (p - 1)) + params.d)
    return R2, q, lin


def singular_distance(params: SolitonParams, chi) -> float:
    """Smallest relative size of the quantities that vanish at singular points."""
    p, c = params.p, params.c
    g = params.g(complex(chi))
    C, S = cmath.cosh(g), cmath.sinh(g)
    scale = abs(p - 1) * abs(C) + abs(p + 1)
    sc = abs(C) + abs(c * S)
    return min(abs((p - 1) * C - p - 1) / scale, abs((p - 1) * C + p + 1) / scale,
               abs(C + 1j * c * S) / sc, abs(C - 1j * c * S) / sc,
               abs(C) / max(abs(S), 1.0))


def _check_regular(params: SolitonParams, chi):
    if singular_distance(params, chi) < SINGULAR_TOL:
        window = (complex(chi).real - 10, complex(chi).real + 10,
                  complex(chi).imag - 10, complex(chi).imag + 10)
        pts = locate_branch_points(params, window) + phase_branch_points(params, window)
        nearest = min(pts, key=lambda z: abs(z - chi)) if pts else None
        raise SingularityError(f"chi = {chi} is a singular point of the solution", nearest)


# -- continuation ---------------------------------------------------------------

@dataclass(frozen=True)
class Branches:
    """Continued ``log R^2`` and ``log q`` at the end of a path."""

    log_R2: complex
    log_q: complex

    @property
    def R(self) -> complex:
        return cmath.exp(0.5 * self.log_R2)

    @property
    def arctan(self) -> complex:
        return self.log_q / 2j


def _continue_logs(values: np.ndarray, start_log: complex) -> np.ndarray:
    steps = np.angle(values[1:] / values[:-1])
    if steps.size and np.max(np.abs(steps)) > JUMP_LIMIT:
        raise RefineStepsError(
            f"tracked phase jumped by {np.max(np.abs(steps)):.3f} rad in one step")
    arg = start_log.imag + np.concatenate([[0.0], np.cumsum(steps)])
    return np.log(np.abs(values)) + 1j * arg


def continue_along(params: SolitonParams, path: np.ndarray, start: Branches | None = None):
    """Continue both logarithms along ``path`` (array of chi values).

    Without ``start`` the path must begin at the base point, where principal
    branches are taken.  Returns arrays of ``log R^2`` and ``log q``.
    """
    R2, q, _ = _pieces(params, path)
    if start is None:
        start = Branches(cmath.log(R2[0]), cmath.log(q[0]))
    return _continue_logs(R2, start.log_R2), _continue_logs(q, start.log_q)


def branches_at(params: SolitonParams, chi, steps: int = 256, max_steps: int = 1 << 16) -> Branches:
    """Branches at ``chi`` reached along the straight segment from the base point."""
    chi = complex(chi)
    _check_regular(params, chi)
    while True:
        path = np.linspace(params.base_chi, chi, steps + 1)
        try:
            lr, lq = continue_along(params, path)
            return Branches(complex(lr[-1]), complex(lq[-1]))
        except RefineStepsError:
            if steps >= max_steps:
                raise
            steps *= 4


def _fields_from(params: SolitonParams, xi, chi, br: Branches):
    _, _, lin = _pieces(params, chi)
    f = br.arctan + complex(lin)
    phase = xi / params.a - f
    R = br.R
    return R * cmath.exp(1j * phase), R * cmath.exp(-1j * phase)


def eval_solution(params: SolitonParams, xi, xibar, steps: int = 256):
    """``(w, w̄)`` at ``(xi, xibar)``, branches continued from the base point."""
    chi = params.chi(complex(xi), complex(xibar))
    return _fields_from(params, complex(xi), chi, branches_at(params, chi, steps))


def phase_function(params: SolitonParams, chi, steps: int = 256) -> complex:
    """``f(chi)`` on the branch reached from the base point."""
    _, _, lin = _pieces(params, complex(chi))
    return branches_at(params, chi, steps).arctan + complex(lin)


# -- closed-form derivatives -------------------------------------------------

def log_derivatives(params: SolitonParams, chi):
    """``(log R)'``, ``(log R)''``, ``f'``, ``f''`` with respect to chi."""
    p, c, gam = params.p, params.c, params.gamma
    g = params.g(complex(chi))
    C, S = cmath.cosh(g), cmath.sinh(g)
    num = (p - 1) * C + p + 1
    den = (p - 1) * C - p - 1
    k1 = (p - 1) * gam
    dlogR = 0.5 * k1 * S * (1 / num - 1 / den)
    d2logR = 0.5 * (k1 * gam * C * (1 / num - 1 / den) - (k1 * S) ** 2 * (1 / num ** 2 - 1 / den ** 2))
    E = C * C + c * c * S * S
    df = c * gam / E + params.linear_rate
    d2f = -2 * c * gam ** 2 * (1 + c * c) * S * C / E ** 2
    return dlogR, d2logR, df, d2f


def eval_derivatives(params: SolitonParams, xi, xibar, steps: int = 256) -> PointState:
    """Values and closed-form derivatives of ``w`` and ``w̄`` (N = 2).

    With ``h = (log R)' - i f'`` (chi-derivatives) and ``d chi = 1/a``,
    ``dbar chi = -1/b``::

        d w = w (h + i)/a,    dbar w = -w h/b,    d dbar w = -w (h^2 + i h + h')/(ab)

    and the same for ``w̄`` with ``i -> -i``.
    """
    xi, xibar = complex(xi), complex(xibar)
    a, b = params.a, params.b
    w, wb = eval_solution(params, xi, xibar, steps)
    dlogR, d2logR, df, d2f = log_derivatives(params, params.chi(xi, xibar))
    h, hb = dlogR - 1j * df, dlogR + 1j * df
    dh, dhb = d2logR - 1j * d2f, d2logR + 1j * d2f
    return PointState(
        w=[w], wbar=[wb],
        d_w=[w * (h + 1j) / a], dbar_w=[-w * h / b],
        d_wbar=[wb * (hb - 1j) / a], dbar_wbar=[-wb * hb / b],
        ddbar_w=[-w * (h * h + 1j * h + dh) / (a * b)],
        ddbar_wbar=[-wb * (hb * hb - 1j * hb + dhb) / (a * b)],
    )


def finite_difference_state(params: SolitonParams, xi, xibar, h: float = 1e-5) -> PointState:
    """Central differences: first derivatives from values, the mixed one from
    the closed-form ``dbar`` derivative differenced in ``xi``."""
    xi, xibar = complex(xi), complex(xibar)
    ev = lambda x, y: eval_solution(params, x, y)
    wp, wbp = ev(xi + h, xibar)
    wm, wbm = ev(xi - h, xibar)
    vp, vbp = ev(xi, xibar + h)
    vm, vbm = ev(xi, xibar - h)
    sp = eval_derivatives(params, xi + h, xibar)
    sm = eval_derivatives(params, xi - h, xibar)
    w, wb = ev(xi, xibar)
    return PointState(
        w=[w], wbar=[wb],
        d_w=[(wp - wm) / (2 * h)], dbar_w=[(vp - vm) / (2 * h)],
        d_wbar=[(wbp - wbm) / (2 * h)], dbar_wbar=[(vbp - vbm) / (2 * h)],
        ddbar_w=[(sp.dbar_w[0] - sm.dbar_w[0]) / (2 * h)],
        ddbar_wbar=[(sp.dbar_wbar[0] - sm.dbar_wbar[0]) / (2 * h)],
    )


# -- singular points ------------------------------------------------------------

def _in_window(z: complex, window) -> bool:
    x0, x1, y0, y1 = window
    return x0 <= z.real <= x1 and y0 <= z.imag <= y1


def _lattice(params: SolitonParams, g_base: complex, window, period: complex = 1j * math.pi):
    """Points chi with g = g_base + m * period inside the window."""
    if params.p in (-1,):
        raise ConfigurationError("p = -1 makes g identically zero")
    chi_base = params.chi0 + g_base / params.gamma
    step = period / params.gamma
    x0, x1, y0, y1 = window
    if x0 > x1 or y0 > y1:
        return []
    # step is along a line; bound m by projecting the window's corners
    corners = [complex(x, y) for x in (x0, x1) for y in (y0, y1)]
    ts = [((z - chi_base) * step.conjugate()).real / abs(step) ** 2 for z in corners]
    out = []
    for m in range(math.floor(min(ts)) - 1, math.ceil(max(ts)) + 2):
        z = complex(chi_base + m * step)
        if _in_window(z, window):
            out.append(z)
    return sorted(out, key=lambda z: (z.imag, z.real))


def locate_branch_points(params: SolitonParams, window) -> list[complex]:
    """Poles of ``tanh g``, where the arctan argument becomes infinite.

    ``chi_m = chi0 + 2(p-1)/(p+1) (m + 1/2) i pi``.  ``window`` is
    ``(re_min, re_max, im_min, im_max)``.
    """
    if params.p == -1:
        raise ConfigurationError("p = -1 makes g identically zero")
    return _lattice(params, 0.5j * math.pi, window)


def printed_branch_points(params: SolitonParams, window) -> list[complex]:
    """The commonly quoted locations ``chi0 + (m + 1/2) i pi`` (they coincide
    with :func:`locate_branch_points` only for p = 3)."""
    out = []
    x0, x1, y0, y1 = window
    base = complex(params.chi0)
    for m in range(math.floor((y0 - base.imag) / math.pi) - 1, math.ceil((y1 - base.imag) / math.pi) + 1):
        z = base + (m + 0.5) * 1j * math.pi
        if _in_window(z, window):
            out.append(z)
    return out


def phase_branch_points(params: SolitonParams, window) -> list[complex]:
    """Points where ``c tanh g = ±i``: logarithmic points of the arctan.

    ``R^2`` has a simple zero or pole at each of them as well.
    """
    if params.p == -1:
        raise ConfigurationError("p = -1 makes g identically zero")
    out = []
    for s in (1, -1):
        g0 = cmath.atanh(s * 1j / params.c)
        out.extend(_lattice(params, g0, window))
    return sorted(set(out), key=lambda z: (z.imag, z.real))


def first_branch_point(params: SolitonParams) -> complex:
    """The tanh pole with the smallest positive imaginary offset from chi0."""
    kappa = abs(2 * (params.p - 1) / (params.p + 1))
    span = kappa * math.pi * 2
    base = complex(params.chi0)
    window = (base.real - span, base.real + span, base.imag + 1e-12, base.imag + span)
    pts = locate_branch_points(params, window)
    if not pts:
        raise ConfigurationError("no branch point found above chi0")
    return min(pts, key=lambda z: (z.imag - base.imag, abs(z.real - base.real)))


# -- monodromy ----------------------------------------------------------------

@dataclass(frozen=True)
class MonodromyProbe:
    center: complex
    radius: float
    steps: int
    start_value: complex
    end_value: complex
    discrepancy: float
    phase_jump: complex        # change of f around the loop
    R_ratio: complex           # R_end / R_start
    enclosed: tuple = ()       # special points strictly inside the loop


def monodromy_probe(params: SolitonParams, center, radius: float, steps: int = 512,
                    xi: complex = 0j) -> MonodromyProbe:
    """Continue ``w`` once around ``chi = center + radius e^{2 pi i t}``.

    ``xi`` is held fixed and the loop is traced by ``xibar``, so the path is
    transverse to both characteristic directions.
    """
    center = complex(center)
    if steps < 64:
        raise ConfigurationError("use at least 64 steps")
    if radius <= 0:
        raise ConfigurationError("radius must be positive")
    span = 2 * radius
    window = (center.real - span, center.real + span, center.imag - span, center.imag + span)
    special = locate_branch_points(params, window) + phase_branch_points(params, window)
    near = [z for z in special if abs(z - center) < 2 * radius]
    others = [z for z in near if abs(z - center) > 1e-9 * max(1.0, abs(center))]
    if others and len(near) > 1:
        raise ConfigurationError(
            f"another singular point lies within 2*radius of the center: {others}")
    enclosed = tuple(z for z in special if abs(z - center) < radius)

    t = np.linspace(0.0, 1.0, steps + 1)
    loop = center + radius * np.exp(2j * np.pi * t)
    for z in loop:
        _check_regular(params, z)
    start = branches_at(params, loop[0])
    lr, lq = continue_along(params, loop, start)
    xi = complex(xi)
    vals = []
    for idx in (0, -1):
        br = Branches(complex(lr[idx]), complex(lq[idx]))
        vals.append((_fields_from(params, xi, complex(loop[idx]), br)[0], br))
    (w0, b0), (w1, b1) = vals
    return MonodromyProbe(
        center, float(radius), int(steps), w0, w1,
        discrepancy=float(abs(w1 - w0) / (1 + abs(w0))),
        phase_jump=complex(b1.arctan - b0.arctan),
        R_ratio=complex(b1.R / b0.R),
        enclosed=enclosed,
    )
