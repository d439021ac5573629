import numpy as np
import pytest

from cpn_painleve.errors import ConfigurationError
from cpn_painleve.jets import Jet
from cpn_painleve.laurent import LaurentSeries, SingularityFunction, extract_order
from cpn_painleve.model import (FieldTuple, PointState, point_state_from_series, residual_point,
                                residual_series)

M = 6


def pole(a, exact=True):
    return LaurentSeries.from_jets(-1, [Jet.constant(a, M)], exact=exact)


def zero():
    return LaurentSeries.from_jets(0, [Jet.zero(M)], exact=True)


def test_pure_pole_against_vanishing_partner():
    # w = a/Phi, w̄ = 0: only d dbar w survives, giving -2 a phi' Phi^-3
    a, slope = 1.5 - 0.5j, 2.0
    phi = SingularityFunction.from_jet(Jet.from_coeffs([0, slope], order=M))
    res = residual_series(FieldTuple(2, (pole(a),), (zero(),)), phi)
    c = extract_order(res[0], -3)
    assert complex(c.coeffs[0]) == pytest.approx(-2 * a * slope)
    assert np.allclose(np.asarray(c.coeffs[1:], dtype=complex), 0)
    assert np.allclose(np.asarray(res[1].coeffs, dtype=complex), 0)


def test_field_count_is_checked():
    with pytest.raises(ConfigurationError):
        FieldTuple(3, (pole(1.0),), (pole(1.0),))


def test_swap_symmetry_of_the_residuals():
    rng = np.random.default_rng(3)
    phi = SingularityFunction.from_jet(Jet.from_coeffs(rng.normal(size=M + 1) + 1j, order=M))

    def rand_series():
        jets = [Jet.from_coeffs(rng.normal(size=M + 1) + 1j * rng.normal(size=M + 1)) for _ in range(3)]
        return LaurentSeries.from_jets(-1, jets)
    f = FieldTuple(3, (rand_series(), rand_series()), (rand_series(), rand_series()))
    a = residual_series(f, phi)
    b = residual_series(f.swapped(), phi)
    for x, y in zip(a, b[2:] + b[:2]):
        assert np.allclose(np.asarray(x.coeffs, dtype=complex), np.asarray(y.coeffs, dtype=complex))


def test_point_residual_agrees_with_series():
    rng = np.random.default_rng(5)
    phi = SingularityFunction.from_jet(Jet.from_coeffs([0.1, 1.2, 0.3], order=M))

    def rand_series():
        jets = [Jet.from_coeffs(rng.normal(size=3) + 1j * rng.normal(size=3), order=M) for _ in range(2)]
        return LaurentSeries.from_jets(-1, jets, exact=True)
    f = FieldTuple(2, (rand_series(),), (rand_series(),))
    xi, Phi = 0.01, 0.2 + 0.1j
    direct = residual_point(point_state_from_series(f, phi, xi, Phi))
    via_series = [r(xi, Phi) for r in residual_series(f, phi)]
    # the quadratic phi is represented exactly, so only jet truncation in xi matters
    assert np.allclose(direct, via_series, rtol=1e-9, atol=1e-9)


def test_point_state_swap():
    s = PointState([1], [2], [3], [4], [5], [6], [7], [8])
    r = residual_point(s)
    t = residual_point(s.swapped())
    assert r == [t[1], t[0]]


def test_two_pure_poles_leave_only_the_phi_minus_three_term():
    a, b, slope = 0.8 + 0.1j, -0.4 + 0.6j, 1.7
    phi = SingularityFunction.from_jet(Jet.from_coeffs([0, slope], order=M))
    res = residual_series(FieldTuple(2, (pole(a),), (pole(b),)), phi)
    assert complex(extract_order(res[0], -5).coeffs[0]) == pytest.approx(0, abs=1e-14)
    assert complex(extract_order(res[0], -3).coeffs[0]) == pytest.approx(-2 * a * slope)


def test_constant_fields_have_zero_residual():
    phi = SingularityFunction.from_jet(Jet.from_coeffs([0, 1.0], order=M))
    c = LaurentSeries.constant(0.3 + 0.2j, M)
    for r in residual_series(FieldTuple(2, (c,), (c,)), phi):
        assert np.allclose(np.asarray(r.coeffs, dtype=complex), 0)
