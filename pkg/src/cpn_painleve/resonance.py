"""
Resonances (Fuchs indices) of the pole expansion.

At order ``k`` the unknowns ``w^k`` and ``w̄^k`` enter the lowest surviving
residual coefficient only through

    L_ij(k)  = phi' k [(k-1) delta_ij S + 2 w_i^0 w̄_j^0]
    L̄_ij(k) = phi' k [(k-1) delta_ij S + 2 w̄_i^0 w_j^0]

acting block-diagonally.  By the matrix determinant lemma

    det(L ⊕ L̄) = [phi'^(N-1) S^(N-1) k^(N-1) (k-1)^(N-2) (k+1)]^2,

so the resonances are -1 (twice), 0 (2(N-1) times) and 1 (2(N-2) times).
The sign of the rank-one term matters: with -2 the root at -1 moves to 3.
:func:`perturbation_matrix` re-derives ``L`` by finite variation of the
residual series, so the sign is checked rather than assumed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import mpmath
import numpy as np

from .config import TOL
from .errors import ConfigurationError, NumericalConditioningError
from .jets import Jet, jet_mul, zeros_like_precision
from .laurent import LaurentSeries, SingularityFunction, extract_order
from .leading_order import LeadingData
from .model import FieldTuple, residual_series

SIGN_NOTE = ("rank-one term of the order-k operator taken with +2; "
             "a -2 sign would move the k=-1 resonance to k=3")


def expected_resonances(N: int) -> dict[int, int]:
    out = {-1: 2, 0: 2 * (N - 1)}
    if N > 2:
        out[1] = 2 * (N - 2)
    return out


def build_resonance_matrix(k, data: LeadingData, phi_prime: complex) -> np.ndarray:
    """Direct sum ``L(k) ⊕ L̄(k)`` at the base point, size 2(N-1)."""
    if phi_prime == 0:
        raise ConfigurationError("phi' must be nonzero")
    n = data.N - 1
    S = data.S
    eye = np.eye(n)
    L = phi_prime * k * ((k - 1) * S * eye + 2 * np.outer(data.w0, data.wbar0))
    Lb = phi_prime * k * ((k - 1) * S * eye + 2 * np.outer(data.wbar0, data.w0))
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    out[:n, :n] = L
    out[n:, n:] = Lb
    return out


def resonance_matrix_jets(k: int, w0: list[Jet], wbar0: list[Jet], phi_prime: Jet) -> np.ndarray:
    """Same operator with jet entries; shape (2(N-1), 2(N-1), M+1)."""
    n = len(w0)
    S = w0[0] * wbar0[0]
    for i in range(1, n):
        S = S + w0[i] * wbar0[i]
    prec = phi_prime.precision
    order = phi_prime.order
    out = zeros_like_precision((2 * n, 2 * n, order + 1), prec)
    for off, (u, v) in ((0, (w0, wbar0)), (n, (wbar0, w0))):
        for i in range(n):
            for j in range(n):
                entry = 2 * jet_mul(u[i], v[j])
                if i == j:
                    entry = entry + (k - 1) * S
                out[off + i, off + j] = jet_mul(phi_prime, entry * k).coeffs
    return out


def perturbation_matrix(k: int, w0: list[Jet], wbar0: list[Jet], phi: SingularityFunction,
                        eps: float = 1e-6) -> np.ndarray:
    """Order-k operator recovered from the residual series by central differences.

    Each unknown ``u_j`` is switched on as ``eps * Phi**(k-1)`` on top of the
    pure pole ``w^0 / Phi``; the change of the ``Phi**(k-5)`` coefficient,
    with the sign flipped so that ``L x = rhs``, is column ``j``.
    """
    n = len(w0)
    N = n + 1
    base = min(-1, k - 1)
    order = phi.phi.order
    prec = phi.phi.precision
    bp = phi.base_point

    def pole(c: Jet, shift: Jet | None):
        rows = [Jet.zero(order, bp, prec) for _ in range(max(k - 1, -1) - base + 1)]
        rows[-1 - base] = c
        if shift is not None:
            rows[k - 1 - base] = rows[k - 1 - base] + shift
        return LaurentSeries.from_jets(base, rows, exact=True)

    def residual_at(j, sign):
        bump = Jet.constant(sign * eps, order, bp, prec)
        w = tuple(pole(w0[i], bump if j == i else None) for i in range(n))
        wb = tuple(pole(wbar0[i], bump if j == n + i else None) for i in range(n))
        res = residual_series(FieldTuple(N, w, wb), phi)
        return [extract_order(r, k - 5).coeffs for r in res]

    out = zeros_like_precision((2 * n, 2 * n, order + 1), prec)
    for j in range(2 * n):
        plus = residual_at(j, 1)
        minus = residual_at(j, -1)
        for i in range(2 * n):
            out[i, j] = -(plus[i] - minus[i]) / (2 * eps)
    return out


# -- determinant polynomial ------------------------------------------------

@dataclass(frozen=True)
class ResonancePolynomial:
    N: int
    nodes: list[int]
    det_samples: list[complex]
    coeffs: np.ndarray          # ascending powers of k, un-normalised
    leading: complex
    holdout_node: int
    holdout_error: float

    @property
    def monic(self) -> np.ndarray:
        return self.coeffs / self.leading

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def _mp_det(k: int, data: LeadingData, phi_prime: complex):
    n = data.N - 1
    w = [mpmath.mpc(z) for z in data.w0]
    wb = [mpmath.mpc(z) for z in data.wbar0]
    S = mpmath.fsum(a * b for a, b in zip(w, wb))
    q = mpmath.mpc(phi_prime)
    M = mpmath.matrix(2 * n, 2 * n)
    for i in range(n):
        for j in range(n):
            d = (k - 1) * S if i == j else 0
            M[i, j] = q * k * (d + 2 * w[i] * wb[j])
            M[n + i, n + j] = q * k * (d + 2 * wb[i] * w[j])
    return mpmath.det(M)


def resonance_polynomial(data: LeadingData, phi_prime: complex, dps: int = 50,
                         rtol: float = TOL.interpolation_holdout) -> ResonancePolynomial:
    """Interpolate ``det(L ⊕ L̄)(k)`` through integer nodes -2 .. 4N-6.

    Sampling and the Newton divided differences run at ``dps`` digits so
    that the coefficients (and the hold-out comparison) are limited by the
    double-precision input data only.
    """
    N = data.N
    degree = 4 * (N - 1)
    nodes = list(range(-2, -2 + degree + 1))
    holdout = 4 * N - 5
    with mpmath.workdps(dps):
        vals = [_mp_det(k, data, phi_prime) for k in nodes]
        # Newton divided differences
        dd = list(vals)
        for level in range(1, len(nodes)):
            for i in range(len(nodes) - 1, level - 1, -1):
                dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - level])
        # expand Newton form into monomials, ascending
        poly = [mpmath.mpc(0)] * (degree + 1)
        for i in range(len(nodes) - 1, -1, -1):
            # poly = poly * (k - nodes[i]) + dd[i]
            new = [mpmath.mpc(0)] * (degree + 1)
            for p in range(degree):
                new[p + 1] += poly[p]
                new[p] -= nodes[i] * poly[p]
            new[0] += dd[i]
            poly = new
        direct = _mp_det(holdout, data, phi_prime)
        interp = mpmath.polyval(poly[::-1], holdout)
        err = float(abs(interp - direct) / max(abs(direct), mpmath.mpf(10) ** (-dps)))
        coeffs = np.array([complex(c) for c in poly])
        samples = [complex(v) for v in vals]
    if err > rtol:
        raise NumericalConditioningError(
            f"interpolated determinant misses the hold-out node k={holdout}: rel. error {err:.2e}")
    return ResonancePolynomial(N, nodes, samples, coeffs, complex(coeffs[-1]), holdout, err)


def resonance_closed_form(data: LeadingData, phi_prime: complex) -> np.ndarray:
    """Ascending coefficients of [phi'^n S^n k^n (k-1)^(n-1) (k+1)]^2, n = N-1."""
    P = np.polynomial.polynomial
    n = data.N - 1
    base = P.polymul(P.polypow([0, 1], n), P.polypow([-1, 1], n - 1))
    base = P.polymul(base, [1, 1])
    sq = P.polypow(base, 2)
    return sq * (phi_prime * data.S) ** (2 * n)


def coefficient_mismatch(a: np.ndarray, b: np.ndarray) -> float:
    """Largest coefficient difference relative to the largest coefficient."""
    size = max(len(a), len(b))
    a = np.pad(a, (0, size - len(a)))
    b = np.pad(b, (0, size - len(b)))
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


# -- roots -----------------------------------------------------------------

@dataclass
class ResonanceReport:
    N: int
    sample_nodes: list[int]
    det_samples: list[complex]
    poly_coeffs: np.ndarray
    leading_coefficient: complex
    roots: list[tuple[int, int]]                 # (integer value, multiplicity)
    cluster_residuals: dict[int, float]          # |centroid - integer|
    cluster_spread: dict[int, float]             # max |root - integer|
    unclustered: list[complex]
    expected: dict[int, int]
    total_multiplicity: int
    match: bool
    notes: list[str] = field(default_factory=list)

    @property
    def roots_dict(self) -> dict[int, int]:
        return dict(self.roots)


def find_resonances(poly: ResonancePolynomial, N: int | None = None,
                    cluster_tol: float = TOL.root_cluster,
                    grouping: float = TOL.root_grouping) -> ResonanceReport:
    """Companion-matrix roots, grouped around integers.

    Individual eigenvalues of a root of multiplicity ``m`` scatter like
    ``eps**(1/m)``, but the centroid of the group is well conditioned, so
    ``cluster_tol`` applies to ``|centroid - integer|``.  Eigenvalues farther
    than ``grouping`` from every integer are reported as unclustered.
    """
    N = poly.N if N is None else N
    if poly.degree != 4 * (N - 1):
        raise ConfigurationError(f"expected degree {4 * (N - 1)}, got {poly.degree}")
    comp = np.polynomial.polynomial.polycompanion(poly.monic)
    eig = np.linalg.eigvals(comp)
    groups: dict[int, list[complex]] = {}
    unclustered = []
    for z in eig:
        r = int(np.round(z.real))
        if abs(z - r) < grouping:
            groups.setdefault(r, []).append(z)
        else:
            unclustered.append(complex(z))
    roots, resid, spread = [], {}, {}
    for r in sorted(groups):
        g = np.array(groups[r])
        roots.append((r, len(g)))
        resid[r] = float(abs(g.mean() - r))
        spread[r] = float(np.max(np.abs(g - r)))
    expected = expected_resonances(N)
    found = dict(roots)
    total = sum(found.values())
    match = (found == expected and not unclustered
             and all(v < cluster_tol for v in resid.values())
             and total == 4 * N - 4)
    return ResonanceReport(N, poly.nodes, poly.det_samples, poly.coeffs, poly.leading,
                           roots, resid, spread, unclustered, expected, total, bool(match),
                           notes=[SIGN_NOTE])


def analyze_resonances(data: LeadingData, phi_prime: complex) -> ResonanceReport:
    return find_resonances(resonance_polynomial(data, phi_prime), data.N)
