"""
Truncated Taylor expansions ("jets") in a single complex variable.

A jet of order ``M`` about ``base_point`` stores the coefficients of
``(xi - base_point)**m`` for ``m = 0..M``.  Terms above ``M`` are unknown,
not zero: products are truncated, and a derivative leaves its top
coefficient untrusted.  Whoever chains ``d`` derivatives must keep ``M`` above
``d``.

Coefficients are ``complex128`` by default.  Passing ``precision=bits`` to the
constructors stores ``gmpy2.mpc`` objects in an object array instead; every
operation here is written so that both storage types go through the same
code.  gmpy2 rounds results to the *context* precision, so extended-precision
arithmetic has to run inside :func:`precision_context`.
"""
from __future__ import annotations

import contextlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigurationError

try:
    import gmpy2
except ImportError:  # pragma: no cover - gmpy2 is a hard dependency in practice
    gmpy2 = None


def precision_context(precision: int | None):
    """Context in which gmpy2 arithmetic runs at ``precision`` bits (no-op for None)."""
    if precision is None or gmpy2 is None:
        return contextlib.nullcontext()
    return gmpy2.context(gmpy2.get_context(), precision=precision)


def working_scalar(z, precision: int | None = None):
    """Convert ``z`` to the scalar type used at ``precision`` bits (None = double)."""
    if precision is None:
        return complex(z)
    if gmpy2 is None:  # pragma: no cover
        raise ConfigurationError("extended precision requires gmpy2")
    if isinstance(z, gmpy2.mpc):
        return gmpy2.mpc(z, precision=precision)
    z = complex(z)
    return gmpy2.mpc(z.real, z.imag, precision=precision)


def working_array(values, precision: int | None = None) -> np.ndarray:
    """Array of working scalars with the dtype matching ``precision``."""
    if precision is None:
        return np.array(values, dtype=np.complex128)
    arr = np.asarray(values, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = working_scalar(v, precision)
    return out


def zeros_like_precision(shape, precision: int | None = None) -> np.ndarray:
    if precision is None:
        return np.zeros(shape, dtype=np.complex128)
    out = np.empty(shape, dtype=object)
    zero = working_scalar(0, precision)
    out.fill(zero)
    return out


def array_precision(arr: np.ndarray) -> int | None:
    """Precision in bits of an object array of ``mpc`` (None for complex128)."""
    if arr.dtype != object:
        return None
    first = arr.flat[0]
    return first.precision[0]


@dataclass(frozen=True, eq=False)
class Jet:
    coeffs: np.ndarray
    base_point: complex = 0j

    def __post_init__(self):
        c = self.coeffs
        if not isinstance(c, np.ndarray) or c.ndim != 1 or c.size == 0:
            raise ConfigurationError("jet coefficients must be a non-empty 1-d array")
        c.setflags(write=False)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @property
    def precision(self) -> int | None:
        return array_precision(self.coeffs)

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_coeffs(cls, coeffs: Sequence, base_point: complex = 0j,
                    order: int | None = None, precision: int | None = None) -> "Jet":
        arr = working_array(list(coeffs), precision)
        if order is not None:
            if arr.size > order + 1:
                arr = arr[: order + 1].copy()
            elif arr.size < order + 1:
                pad = zeros_like_precision(order + 1 - arr.size, precision)
                arr = np.concatenate([arr, pad])
        return cls(arr, complex(base_point))

    @classmethod
    def constant(cls, value, order: int, base_point: complex = 0j,
                 precision: int | None = None) -> "Jet":
        return cls.from_coeffs([value], base_point, order, precision)

    @classmethod
    def zero(cls, order: int, base_point: complex = 0j,
             precision: int | None = None) -> "Jet":
        return cls(zeros_like_precision(order + 1, precision), complex(base_point))

    @classmethod
    def variable(cls, order: int, base_point: complex = 0j,
                 precision: int | None = None) -> "Jet":
        """The jet of the function ``xi`` itself."""
        return cls.from_coeffs([base_point, 1], base_point, order, precision)

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "Jet"):
        if self.base_point != other.base_point or self.order != other.order:
            raise ConfigurationError(
                f"jet mismatch: base {self.base_point} order {self.order} vs "
                f"base {other.base_point} order {other.order}")

    def _wrap(self, coeffs) -> "Jet":
        return Jet(coeffs, self.base_point)

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return self._wrap(self.coeffs + other.coeffs)
        out = self.coeffs.copy()
        out[0] = out[0] + other
        return self._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            return jet_mul(self, other)
        return self._wrap(self.coeffs * other)

    __rmul__ = __mul__

    def __call__(self, xi):
        return jet_eval(self, xi)

    def __repr__(self):
        return f"Jet(order={self.order}, base_point={self.base_point}, coeffs={self.coeffs!r})"


def jet_mul(a: Jet, b: Jet) -> Jet:
    """Cauchy product truncated at the common order."""
    a._check(b)
    m = a.order
    return Jet(np.convolve(a.coeffs, b.coeffs)[: m + 1], a.base_point)


def jet_derive(a: Jet) -> Jet:
    """d/dxi; the returned top coefficient is set to zero (unknown)."""
    c = a.coeffs
    out = zeros_like_precision(c.size, a.precision)
    m = np.arange(1, c.size)
    if c.dtype == object:
        m = np.array([int(v) for v in m], dtype=object)
    out[:-1] = c[1:] * m
    return Jet(out, a.base_point)


def jet_eval(a: Jet, xi):
    """Horner evaluation at ``xi``."""
    x = xi - a.base_point
    acc = a.coeffs[-1]
    for c in a.coeffs[-2::-1]:
        acc = acc * x + c
    return acc
