"""
Order-by-order construction of the pole expansion

    w_i = sum_{n=0..K} w_i^n(xi) Phi^(n-1),   w̄_i = sum_n w̄_i^n(xi) Phi^(n-1)

about ``Phi = xibar - phi(xi)``.

Nothing about the recurrence is transcribed by hand.  At order ``k`` the
fields are truncated just above ``Phi^(k-1)``, the residual series is formed,
and its top trusted coefficient ``Phi^(k-5)`` is split into a constant part
(the right-hand side) and a part linear in the new unknowns (the order-k
operator, probed one unknown at a time).  The operator is then compared
against the closed form in :mod:`cpn_painleve.resonance`.

Jet bookkeeping: ``w^n`` involves ``n`` chained ``xi``-derivatives, so its
coefficients are trusted up to degree ``M - n``.  Consistency at a resonance
is only measured on those trusted degrees.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .config import TOL
from .errors import (CompatibilityError, ConfigurationError, InternalConsistencyError)
from .jets import Jet, precision_context, working_array, working_scalar, zeros_like_precision
from .laurent import LaurentSeries, SingularityFunction, extract_order
from .leading_order import LeadingData
from .model import (FieldTuple, point_state_from_series, residual_point, residual_series,
                    residual_terms)
from .resonance import resonance_matrix_jets

log = logging.getLogger(__name__)

FIRST_INTEGRAL_NOTE = ("free functions: 2(N-1) at k=0, 2(N-2) at k=1, plus phi; "
                       "total 4N-5 (one short of the order 4N-4 of the system)")


@dataclass(frozen=True)
class ModelConfig:
    N: int
    K: int = 6
    M: int | None = None       # jet order; defaults to K + 2
    xi0: complex = 0j
    seed: int = 0
    tolerance: float = TOL.relative
    precision: int | None = None   # bits; None = complex double

    def __post_init__(self):
        if self.N < 2:
            raise ConfigurationError("N must be at least 2")
        if self.K < 0:
            raise ConfigurationError("truncation order K must be non-negative")
        if self.M is None:
            object.__setattr__(self, "M", max(self.K + 2, 2))
        if self.M < self.K + 2:
            raise ConfigurationError(f"jet order M={self.M} must be at least K+2={self.K + 2}")
        if self.precision is not None and self.precision < 64:
            raise ConfigurationError("extended precision must be at least 64 bits")

    @property
    def n(self) -> int:
        return self.N - 1


@dataclass
class OrderReport:
    k: int
    size: int
    rank: int
    rank_deficiency: int
    consistency_residual: float
    matrix_error: float
    injected: list[tuple[int, int, bool]] = field(default_factory=list)
    determined: list[int] = field(default_factory=list)


@dataclass
class CompatibilityReport:
    N: int
    k0_rhs_max: float            # relative size of the Phi^-5 coefficient
    orders: list[OrderReport]
    first_integrals: int
    notes: list[str] = field(default_factory=lambda: [FIRST_INTEGRAL_NOTE])

    @property
    def rank_profile(self) -> dict[int, int]:
        return {o.k: o.rank_deficiency for o in self.orders}

    def order(self, k: int) -> OrderReport:
        return next(o for o in self.orders if o.k == k)


@dataclass(frozen=True)
class SeriesSolution:
    """Coefficients ``w^n``, ``w̄^n`` stored as one array.

    ``coeffs[v, n]`` is the jet (length ``M+1``) of variable ``v`` at order
    ``n``; ``v < N-1`` are the ``w_i``, the rest the ``w̄_i``.  Orders above
    ``filled`` are not yet determined.
    """

    config: ModelConfig
    coeffs: np.ndarray
    phi: SingularityFunction
    filled: int
    free_slots: tuple = ()

    @property
    def N(self) -> int:
        return self.config.N

    @property
    def alpha(self) -> np.ndarray:
        return np.ones(self.config.n)

    @property
    def beta(self) -> np.ndarray:
        return np.ones(self.config.n)

    def jet(self, v: int, n: int) -> Jet:
        return Jet(self.coeffs[v, n].copy(), self.config.xi0)

    def leading_jets(self):
        n = self.config.n
        return ([self.jet(i, 0) for i in range(n)], [self.jet(n + i, 0) for i in range(n)])

    def leading_data(self) -> LeadingData:
        w, wb = self.leading_jets()
        return LeadingData(self.N, [complex(j.coeffs[0]) for j in w],
                           [complex(j.coeffs[0]) for j in wb])

    def fields(self, upto: int | None = None, exact: bool = False) -> FieldTuple:
        """Fields through order ``upto`` (default: ``filled``).

        Truncated fields trust ``Phi`` powers up to ``upto - 1``; with
        ``exact`` the stored rows are taken as a complete Laurent polynomial.
        """
        upto = self.filled if upto is None else upto
        n = self.config.n
        series = [LaurentSeries(-1, self.coeffs[v, :upto + 1].copy(), self.config.xi0, exact)
                  for v in range(2 * n)]
        return FieldTuple(self.N, tuple(series[:n]), tuple(series[n:]))


# -- random data -------------------------------------------------------------

def _rng(seed: int, *tags: int) -> np.random.Generator:
    return np.random.default_rng([seed, *tags])


def _disc(rng: np.random.Generator, size: int, rmin: float = 0.0) -> np.ndarray:
    r = np.sqrt(rng.uniform(rmin ** 2, 1.0, size))
    return r * np.exp(2j * np.pi * rng.uniform(size=size))


def random_jet_coeffs(rng: np.random.Generator, M: int, rmin0: float = 0.0) -> np.ndarray:
    """Coefficients uniform in the unit disc; the constant term has modulus >= rmin0."""
    c = _disc(rng, M + 1)
    c[0] = _disc(rng, 1, rmin0)[0]
    return c


def init_leading(config: ModelConfig) -> SeriesSolution:
    n, K, M = config.n, config.K, config.M
    rng = _rng(config.seed, 0)
    raw = np.zeros((2 * n, K + 1, M + 1), dtype=complex)
    for v in range(2 * n):
        raw[v, 0] = random_jet_coeffs(rng, M, 0.2)
    phi_c = _disc(rng, M + 1)
    phi_c[1] = _disc(rng, 1, 0.5)[0]
    coeffs = working_array(raw, config.precision)
    phi = SingularityFunction.from_jet(Jet(working_array(phi_c, config.precision), config.xi0))
    slots = tuple([("phi", None, None)] + [(0, i, False) for i in range(n)]
                  + [(0, i, True) for i in range(n)])
    return SeriesSolution(config, coeffs, phi, 0, slots)


# -- one order -----------------------------------------------------------------

def _top_coefficients(sol: SeriesSolution, coeffs: np.ndarray, k: int) -> np.ndarray:
    """``Phi^(k-5)`` coefficients of all residuals for the given trial data."""
    trial = replace(sol, coeffs=coeffs)
    res = residual_series(trial.fields(k), sol.phi)
    return np.stack([extract_order(r, k - 5).coeffs for r in res])


def assemble_order_system(sol: SeriesSolution, k: int):
    """Operator (jet entries) and right-hand side for the order-k unknowns.

    Residual coefficient = rhs - L x.  It is linear in the unknowns ``x``
    because their xi-derivatives only reach the next order, and ``L`` only
    involves ``w^0``, ``w̄^0`` and ``phi'``: any higher-order factor next to
    ``x`` lands above ``Phi^(k-5)``.  The columns are therefore probed on
    leading-only fields, which avoids differencing two large residuals.
    """
    cfg = sol.config
    size = 2 * cfg.n
    base = sol.coeffs.copy()
    base[:, k] = zeros_like_precision((size, cfg.M + 1), cfg.precision)
    rhs = _top_coefficients(sol, base, k)
    lead = zeros_like_precision(sol.coeffs.shape, cfg.precision)
    lead[:, 0] = sol.coeffs[:, 0]
    ref = _top_coefficients(sol, lead, k)
    L = zeros_like_precision((size, size, cfg.M + 1), cfg.precision)
    one = working_scalar(1, cfg.precision)
    for j in range(size):
        probe = lead.copy()
        probe[j, k, 0] = one
        L[:, j] = ref - _top_coefficients(sol, probe, k)
    return L, rhs


def _as_complex(a: np.ndarray) -> np.ndarray:
    if a.dtype == object:
        return np.vectorize(complex, otypes=[complex])(a)
    return a


def _norm(v) -> float:
    return float(np.sqrt(sum(abs(complex(x)) ** 2 for x in np.ravel(v))))


def _gauss_solve(A, b):
    """Partial-pivoting elimination for small object-dtype systems."""
    n = len(b)
    rows = [list(A[i]) + [b[i]] for i in range(n)]
    for c in range(n):
        p = max(range(c, n), key=lambda r: abs(rows[r][c]))
        rows[c], rows[p] = rows[p], rows[c]
        for r in range(c + 1, n):
            f = rows[r][c] / rows[c][c]
            for j in range(c, n + 1):
                rows[r][j] = rows[r][j] - f * rows[c][j]
    x = [None] * n
    for i in range(n - 1, -1, -1):
        acc = rows[i][n]
        for j in range(i + 1, n):
            acc = acc - rows[i][j] * x[j]
        x[i] = acc / rows[i][i]
    return np.array(x, dtype=object)


def _solve_columns(A: np.ndarray, b: np.ndarray):
    """Least-squares solve of a small dense system in working precision."""
    if A.dtype != object and b.dtype != object:
        x, *_ = np.linalg.lstsq(A, b, rcond=None)
        return x
    # normal equations are adequate: the determined columns are well conditioned
    AH = np.array([[z.conjugate() for z in row] for row in A.T], dtype=object)
    return _gauss_solve(AH.dot(A), AH.dot(b))


def _choose_free_columns(A0: np.ndarray, n: int, deficiency: int):
    """Free unknowns at a resonance.

    Preferred choice: components 2..N-1 of each block (those beyond the
    first).  Falls back to column-pivoted QR if that leaves the determined
    columns rank deficient.
    """
    size = A0.shape[0]
    preferred_free = [i for i in range(size) if i % n != 0]
    determined = [i for i in range(size) if i % n == 0]
    rank = size - deficiency
    if len(preferred_free) == deficiency:
        sv = np.linalg.svd(A0[:, determined], compute_uv=False)
        if sv.size and sv[-1] > TOL.rank * max(sv[0], 1e-300) and len(determined) == rank:
            return preferred_free, determined
    _, _, piv = scipy.linalg.qr(A0, pivoting=True)
    determined = sorted(piv[:rank].tolist())
    free = sorted(piv[rank:].tolist())
    return free, determined


def step_order(sol: SeriesSolution, k: int):
    with precision_context(sol.config.precision):
        return _step_order(sol, k)


def _step_order(sol: SeriesSolution, k: int):
    cfg = sol.config
    if not 1 <= k <= cfg.K:
        raise ConfigurationError(f"order {k} outside 1..{cfg.K}")
    if sol.filled != k - 1:
        raise ConfigurationError(f"orders below {k} must be filled first (filled={sol.filled})")
    n, M, size = cfg.n, cfg.M, 2 * cfg.n
    L, rhs = assemble_order_system(sol, k)

    w0, wb0 = sol.leading_jets()
    ref = resonance_matrix_jets(k, w0, wb0, sol.phi.phi_prime)
    Lc, refc = _as_complex(L), _as_complex(ref)
    matrix_error = float(np.max(np.abs(Lc - refc)) / np.max(np.abs(refc)))
    if matrix_error > TOL.matrix_identity:
        raise InternalConsistencyError(
            f"order {k}: extracted operator differs from closed form by {matrix_error:.2e}")
    if np.any(Lc[:n, n:] != 0) or np.any(Lc[n:, :n] != 0):
        log.debug("order %d: cross blocks nonzero at roundoff level", k)

    A0 = Lc[:, :, 0]
    sv = np.linalg.svd(A0, compute_uv=False)
    rank = int(np.sum(sv > TOL.rank * sv[0]))
    deficiency = size - rank
    if deficiency:
        free, det_cols = _choose_free_columns(A0, n, deficiency)
    else:
        free, det_cols = [], list(range(size))

    x = zeros_like_precision((size, M + 1), cfg.precision)
    rng = _rng(cfg.seed, 1, k)
    injected = []
    for j in free:
        x[j] = working_array(random_jet_coeffs(rng, M), cfg.precision)
        injected.append((k, j % n, j >= n))

    trusted = M - k
    scale = max(_norm(rhs[:, : trusted + 1]), _norm(Lc[:, :, 0]) * max(
        _norm(x[free]) if free else 0.0, 1.0))
    consistency = 0.0
    A_det = L[:, det_cols, 0]
    for m in range(M + 1):
        r = rhs[:, m].copy()
        for j in range(1, m + 1):
            r = r - L[:, :, j].dot(x[:, m - j])
        if free:
            r = r - L[:, free, 0].dot(x[free, m])
        sol_m = _solve_columns(A_det, r)
        x[det_cols, m] = sol_m
        if m <= trusted:
            res = _norm(A_det.dot(sol_m) - r) / scale
            consistency = max(consistency, res)
    if deficiency == 0 and consistency > cfg.tolerance:
        raise InternalConsistencyError(f"order {k}: regular system solved with residual {consistency:.2e}")
    if deficiency and consistency > cfg.tolerance:
        raise CompatibilityError(
            f"order {k}: right-hand side leaves the column space (residual {consistency:.2e})")

    coeffs = sol.coeffs.copy()
    coeffs[:, k] = x
    new = SeriesSolution(cfg, coeffs, sol.phi, k, sol.free_slots + tuple(injected))
    report = OrderReport(k, size, rank, deficiency, consistency, matrix_error, injected, det_cols)
    return new, report


def leading_rhs_check(sol: SeriesSolution) -> float:
    """Size of the ``Phi^-5`` residual coefficient relative to its separate terms.

    This is the order-0 right-hand side; it must vanish identically.
    """
    res = residual_terms(sol.fields(0), sol.phi)
    worst = 0.0
    for terms in res:
        total = extract_order(terms[0] + terms[1] + terms[2], -5).coeffs
        scale = max(_norm(extract_order(t, -5).coeffs) for t in terms)
        worst = max(worst, _norm(total) / scale)
    return worst


def build_series(config: ModelConfig):
    with precision_context(config.precision):
        return _build_series(config)


def _build_series(config: ModelConfig):
    sol = init_leading(config)
    k0 = leading_rhs_check(sol)
    if k0 > config.tolerance:
        raise CompatibilityError(f"lowest-order right-hand side does not vanish ({k0:.2e})")
    orders = []
    for k in range(1, config.K + 1):
        sol, rep = step_order(sol, k)
        orders.append(rep)
        log.debug("order %d: rank %d/%d, consistency %.2e", k, rep.rank, rep.size,
                  rep.consistency_residual)
    report = CompatibilityReport(config.N, k0, orders, len(sol.free_slots))
    # with K = 0 the k=1 resonance has not been reached yet
    if config.K >= 1 and report.first_integrals != 4 * config.N - 5:
        raise InternalConsistencyError(
            f"counted {report.first_integrals} free functions, expected {4 * config.N - 5}")
    return sol, report


# -- certificate -------------------------------------------------------------

@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    radii: tuple
    residuals: tuple
    expected_slope: int
    saturated: bool


def residual_at_radius(sol: SeriesSolution, r: float, angles: int = 8) -> float:
    """Max residual over all equations at ``xi = xi0`` and ``|Phi| = r``.

    The truncated series is treated as an exact Laurent polynomial, and all
    values and derivatives are evaluated in the solution's working precision.
    """
    fields = sol.fields(exact=True)
    xi = sol.config.xi0
    prec = sol.config.precision
    worst = 0.0
    for t in range(angles):
        Phi = working_scalar(r * np.exp(2j * np.pi * (t + 0.5) / angles), prec)
        state = point_state_from_series(fields, sol.phi, xi, Phi)
        worst = max(worst, max(abs(complex(v)) for v in residual_point(state)))
    return worst


def verify_residual_scaling(sol: SeriesSolution, radii=(1e-1, 5e-2, 2e-2, 1e-2),
                            angles: int = 8) -> ScalingFit:
    radii = tuple(float(r) for r in radii)
    if len(radii) < 4 or min(radii) < 1e-3 or max(radii) > 1e-1:
        raise ConfigurationError("need at least 4 radii inside [1e-3, 1e-1]")
    with precision_context(sol.config.precision):
        res = tuple(residual_at_radius(sol, r, angles) for r in radii)
    floor = TOL.saturation if sol.config.precision is None else 2.0 ** (-sol.config.precision + 16)
    saturated = all(v < floor for v in res)
    logs = np.log(np.maximum(np.array(res), 1e-300))
    slope, intercept = np.polyfit(np.log(radii), logs, 1)
    return ScalingFit(float(slope), float(intercept), radii, res, sol.config.K - 4, saturated)
