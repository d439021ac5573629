"""
Laurent series in the singularity variable ``Phi = xibar - phi(xi)``.

A series stores rows ``c^n`` (jets in ``xi``) for the powers
``Phi**(n + base_exponent)``, ``n = 0..K``.  Two kinds exist:

* truncated: powers above ``base_exponent + K`` are unknown.  Products keep
  only the relative orders both factors determine, and asking for anything
  above the window raises :class:`OutOfWindowError`.
* exact: the rows are a complete Laurent polynomial; missing rows are zero.
  Constants such as the ``1`` in ``1 + sum w̄ w`` and fully specified
  truncated ansätze are exact.

Both derivations use the reduced manifold: coefficients depend on ``xi`` only,
``dbar Phi = 1`` and ``d Phi = -phi'``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d

from .errors import ConfigurationError, OutOfWindowError
from .jets import Jet, array_precision, jet_derive, jet_eval, zeros_like_precision


def _index_array(values, like: np.ndarray) -> np.ndarray:
    # gmpy2 scalars do not mix with numpy integer scalars; use Python ints.
    arr = np.asarray(values)
    if like.dtype == object:
        return np.array([int(v) for v in arr.ravel()], dtype=object).reshape(arr.shape)
    return arr


def _conv2(a: np.ndarray, b: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """First ``rows x cols`` block of the full 2-d convolution of ``a`` and ``b``."""
    if a.dtype != object and b.dtype != object:
        return convolve2d(a, b)[:rows, :cols]
    prec = array_precision(a) if a.dtype == object else array_precision(b)
    out = zeros_like_precision((rows, cols), prec)
    for i in range(min(rows, a.shape[0])):
        for j in range(min(rows - i, b.shape[0])):
            out[i + j] += np.convolve(a[i], b[j])[:cols]
    return out


@dataclass(frozen=True)
class SingularityFunction:
    """The manifold ``xibar = phi(xi)`` together with ``phi'``."""

    phi: Jet
    phi_prime: Jet

    @classmethod
    def from_jet(cls, phi: Jet) -> "SingularityFunction":
        prime = jet_derive(phi)
        if abs(complex(prime.coeffs[0])) == 0:
            raise ConfigurationError("characteristic manifold: phi'(xi0) = 0")
        return cls(phi, prime)

    @property
    def base_point(self) -> complex:
        return self.phi.base_point


@dataclass(frozen=True, eq=False)
class LaurentSeries:
    base_exponent: int
    coeffs: np.ndarray          # shape (K + 1, M + 1)
    base_point: complex = 0j
    exact: bool = False

    def __post_init__(self):
        c = self.coeffs
        if c.ndim != 2 or c.shape[0] == 0:
            raise ConfigurationError("Laurent coefficients must have shape (K+1, M+1)")
        c.setflags(write=False)

    # -- bookkeeping ------------------------------------------------------
    @property
    def truncation(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def jet_order(self) -> int:
        return self.coeffs.shape[1] - 1

    @property
    def precision(self):
        return array_precision(self.coeffs)

    @property
    def top(self) -> float:
        """Highest trusted exponent (``inf`` for exact series)."""
        return math.inf if self.exact else self.base_exponent + self.truncation

    def coeff(self, n: int) -> Jet:
        """Row ``n``, i.e. the jet multiplying ``Phi**(n + base_exponent)``."""
        return Jet(self.coeffs[n].copy(), self.base_point)

    @property
    def jets(self) -> list[Jet]:
        return [self.coeff(n) for n in range(self.coeffs.shape[0])]

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_jets(cls, base_exponent: int, jets, exact: bool = False) -> "LaurentSeries":
        jets = list(jets)
        if not jets:
            raise ConfigurationError("need at least one coefficient")
        base = jets[0].base_point
        order = jets[0].order
        for j in jets:
            if j.base_point != base or j.order != order:
                raise ConfigurationError("all coefficients must share base point and order")
        return cls(int(base_exponent), np.stack([j.coeffs for j in jets]), base, exact)

    @classmethod
    def constant(cls, value, jet_order: int, base_point: complex = 0j,
                 precision: int | None = None) -> "LaurentSeries":
        return cls.from_jets(0, [Jet.constant(value, jet_order, base_point, precision)],
                             exact=True)

    def as_exact(self) -> "LaurentSeries":
        """Reinterpret the stored rows as a complete Laurent polynomial."""
        return LaurentSeries(self.base_exponent, self.coeffs.copy(), self.base_point, True)

    def truncate(self, top_exponent: int) -> "LaurentSeries":
        """Truncated copy whose trusted window ends at ``top_exponent``."""
        if top_exponent > self.top:
            raise OutOfWindowError(f"cannot extend window from {self.top} to {top_exponent}")
        rows = top_exponent - self.base_exponent + 1
        if rows < 1:
            raise ConfigurationError("truncation below the base exponent")
        return LaurentSeries(self.base_exponent, self._rows(rows), self.base_point, False)

    def _rows(self, count: int) -> np.ndarray:
        c = self.coeffs
        if count <= c.shape[0]:
            return c[:count].copy()
        if not self.exact:
            raise OutOfWindowError("rows requested beyond the trusted window")
        pad = zeros_like_precision((count - c.shape[0], c.shape[1]), self.precision)
        return np.concatenate([c, pad])

    def _check(self, other: "LaurentSeries"):
        if self.base_point != other.base_point or self.jet_order != other.jet_order:
            raise ConfigurationError("series mismatch in jet base point or order")

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, LaurentSeries):
            other = LaurentSeries.constant(other, self.jet_order, self.base_point, self.precision)
        self._check(other)
        e = min(self.base_exponent, other.base_exponent)
        top = min(self.top, other.top)
        if math.isinf(top):
            top = max(self.base_exponent + self.truncation,
                      other.base_exponent + other.truncation)
        rows = int(top) - e + 1
        if rows < 1:
            raise OutOfWindowError("sum has an empty trusted window")
        out = zeros_like_precision((rows, self.jet_order + 1), self.precision or other.precision)
        for s in (self, other):
            shift = s.base_exponent - e
            n = max(0, min(s.coeffs.shape[0], rows - shift))
            if n:
                out[shift:shift + n] += s.coeffs[:n]
        return LaurentSeries(e, out, self.base_point, self.exact and other.exact)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.base_exponent, -self.coeffs, self.base_point, self.exact)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LaurentSeries):
            return series_mul(self, other)
        if isinstance(other, Jet):
            if other.base_point != self.base_point or other.order != self.jet_order:
                raise ConfigurationError("jet/series mismatch")
            c = _conv2(self.coeffs, other.coeffs[None, :], *self.coeffs.shape)
            return LaurentSeries(self.base_exponent, c, self.base_point, self.exact)
        return LaurentSeries(self.base_exponent, self.coeffs * other, self.base_point, self.exact)

    __rmul__ = __mul__

    def __call__(self, xi, Phi):
        return series_eval(self, xi, Phi)

    def __repr__(self):
        kind = "exact" if self.exact else f"K={self.truncation}"
        return (f"LaurentSeries(e={self.base_exponent}, {kind}, M={self.jet_order}, "
                f"base_point={self.base_point})")


def series_mul(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    """Product; the window is limited by the shorter truncated factor."""
    a._check(b)
    if a.exact and b.exact:
        rows = a.coeffs.shape[0] + b.coeffs.shape[0] - 1
    else:
        rows = min(s.truncation for s in (a, b) if not s.exact) + 1
    c = _conv2(a.coeffs, b.coeffs, rows, a.jet_order + 1)
    if c.shape[0] < rows:  # exact factor shorter than the window: pad with zeros
        pad = zeros_like_precision((rows - c.shape[0], c.shape[1]), array_precision(c))
        c = np.concatenate([c, pad])
    return LaurentSeries(a.base_exponent + b.base_exponent, c, a.base_point,
                         a.exact and b.exact)


def apply_dbar(s: LaurentSeries) -> LaurentSeries:
    """Derivative with respect to ``xibar``: ``c Phi^m -> m c Phi^(m-1)``."""
    n = s.coeffs.shape[0]
    powers = _index_array(np.arange(n) + s.base_exponent, s.coeffs)
    return LaurentSeries(s.base_exponent - 1, s.coeffs * powers[:, None],
                         s.base_point, s.exact)


def apply_d(s: LaurentSeries, phi: SingularityFunction) -> LaurentSeries:
    """Derivative with respect to ``xi`` at fixed ``xibar``.

    ``c Phi^m -> c' Phi^m - m phi' c Phi^(m-1)``.
    """
    if phi.base_point != s.base_point or phi.phi.order != s.jet_order:
        raise ConfigurationError("singularity function does not match the series jets")
    c = s.coeffs
    n, cols = c.shape
    rows = n + 1 if s.exact else n
    out = zeros_like_precision((rows, cols), s.precision)
    powers = _index_array(np.arange(n) + s.base_exponent, c)
    scaled = _conv2(c * powers[:, None], phi.phi_prime.coeffs[None, :], n, cols)
    out[:n] -= scaled
    m = _index_array(np.arange(1, cols), c)
    deriv = zeros_like_precision((n, cols), s.precision)
    deriv[:, :-1] = c[:, 1:] * m[None, :]
    k = min(n, rows - 1)
    out[1:k + 1] += deriv[:k]
    return LaurentSeries(s.base_exponent - 1, out, s.base_point, s.exact)


def extract_order(s: LaurentSeries, exponent: int) -> Jet:
    """Jet coefficient of ``Phi**exponent``."""
    if exponent > s.top:
        raise OutOfWindowError(
            f"exponent {exponent} outside trusted window [{s.base_exponent}, {s.top}]")
    n = exponent - s.base_exponent
    if n < 0 or n >= s.coeffs.shape[0]:
        return Jet.zero(s.jet_order, s.base_point, s.precision)
    return s.coeff(n)


def series_eval(s: LaurentSeries, xi, Phi):
    """Sum of ``c^n(xi) * Phi**(n + e)`` over the stored rows."""
    acc = 0
    for n in range(s.coeffs.shape[0] - 1, -1, -1):
        acc = acc * Phi + jet_eval(s.coeff(n), xi)
    return acc * Phi ** s.base_exponent
