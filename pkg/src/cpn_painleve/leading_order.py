"""
Leading exponents of the pole expansion and the uniqueness matrix.

With ``s_l = w̄_l^0 w_l^0`` and ``S = sum_l s_l`` the lowest-order balance for
the exponents ``alpha_i`` reads ``sum_j (2 s_j - delta_ij S) alpha_j = S``.
The matrix has constant off-diagonal columns, and row reduction gives
``det B = (-1)^N S^(N-1)``.  The barred system is the same with the roles
of ``w`` and ``w̄`` swapped, so it has the same matrix.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import TOL
from .errors import ConfigurationError, DegeneracyError


@dataclass(frozen=True)
class LeadingData:
    N: int
    w0: np.ndarray
    wbar0: np.ndarray

    def __post_init__(self):
        w0 = np.asarray(self.w0, dtype=complex)
        wb = np.asarray(self.wbar0, dtype=complex)
        if self.N < 2 or w0.shape != (self.N - 1,) or wb.shape != (self.N - 1,):
            raise ConfigurationError("need N >= 2 and N-1 leading values for w and w̄")
        if np.any(w0 == 0) or np.any(wb == 0):
            raise ConfigurationError("leading coefficients must all be nonzero")
        object.__setattr__(self, "w0", w0)
        object.__setattr__(self, "wbar0", wb)

    @property
    def products(self) -> np.ndarray:
        return self.wbar0 * self.w0

    @property
    def S(self) -> complex:
        return complex(self.products.sum())

    def swapped(self) -> "LeadingData":
        return LeadingData(self.N, self.wbar0, self.w0)

    def is_degenerate(self) -> bool:
        scale = np.abs(self.products).sum()
        return abs(self.S) < TOL.degeneracy * scale


def random_leading_data(N: int, rng: np.random.Generator, real_slice: bool = False) -> LeadingData:
    """Generic data: moduli in [0.2, 1], uniform phases.

    With ``real_slice`` the barred values are the complex conjugates, so
    ``S`` is real and positive.
    """
    def draw():
        return rng.uniform(0.2, 1.0, N - 1) * np.exp(2j * np.pi * rng.uniform(size=N - 1))
    w0 = draw()
    wb = np.conj(w0) if real_slice else draw()
    return LeadingData(N, w0, wb)


def build_exponent_system(data: LeadingData):
    """Matrix ``B`` and right-hand side ``c`` with ``B @ alpha = c``."""
    s = data.products
    S = data.S
    n = data.N - 1
    B = 2.0 * np.tile(s, (n, 1)) - S * np.eye(n)
    c = np.full(n, S, dtype=complex)
    return B, c


@dataclass(frozen=True)
class ExponentSolution:
    alpha: np.ndarray
    beta: np.ndarray
    unique: bool
    det: complex
    residual: float     # max relative linear-solve residual over both systems


def solve_exponents(data: LeadingData) -> ExponentSolution:
    if data.is_degenerate():
        raise DegeneracyError(f"sum of w̄w vanishes (S = {data.S}); uniqueness argument fails")
    out = []
    residual = 0.0
    det = None
    for d in (data, data.swapped()):
        B, c = build_exponent_system(d)
        x = np.linalg.solve(B, c)
        residual = max(residual, np.linalg.norm(B @ x - c) / np.linalg.norm(c))
        out.append(x.real if np.allclose(x.imag, 0, atol=1e-12) else x)
        if det is None:
            det = complex(np.linalg.det(B))
    scale = np.abs(data.products).sum()
    unique = abs(det) > TOL.degeneracy * scale ** (data.N - 1)
    return ExponentSolution(out[0], out[1], bool(unique), det, float(residual))


@dataclass(frozen=True)
class DeterminantCheck:
    det_generic: complex
    det_formula: complex       # (-1)^N S^(N-1), what elimination gives
    det_printed: complex       # -S^(N-1), the commonly quoted form
    match: bool
    printed_sign_matches: bool


def det_closed_form_check(data: LeadingData, rtol: float = TOL.det_match) -> DeterminantCheck:
    B, _ = build_exponent_system(data)
    generic = complex(np.linalg.det(B))
    S = data.S
    formula = (-1) ** data.N * S ** (data.N - 1)
    printed = -(S ** (data.N - 1))
    ref = abs(formula)
    return DeterminantCheck(
        generic, formula, printed,
        match=abs(generic - formula) <= rtol * ref,
        printed_sign_matches=abs(generic - printed) <= rtol * ref,
    )


def column_sum_reduction(data: LeadingData) -> np.ndarray:
    """First step of the elimination: add every column of ``B`` to the first."""
    B, _ = build_exponent_system(data)
    R = B.copy()
    R[:, 0] = B.sum(axis=1)
    return R
