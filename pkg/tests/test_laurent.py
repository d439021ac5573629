import numpy as np
import pytest

from cpn_painleve.errors import ConfigurationError, OutOfWindowError
from cpn_painleve.jets import Jet
from cpn_painleve.laurent import (LaurentSeries, SingularityFunction, apply_d, apply_dbar,
                                  extract_order, series_eval, series_mul)

M = 5


def const_series(base, values, exact=False):
    return LaurentSeries.from_jets(base, [Jet.constant(v, M) for v in values], exact=exact)


def line_phi(slope=2.0):
    return SingularityFunction.from_jet(Jet.from_coeffs([0.1, slope], order=M))


def test_dbar_lowers_the_power():
    s = const_series(-1, [3.0, 0.0, 5.0])
    out = apply_dbar(s)
    assert out.base_exponent == -2
    assert complex(extract_order(out, -2).coeffs[0]) == pytest.approx(-3.0)
    assert complex(extract_order(out, 0).coeffs[0]) == pytest.approx(5.0)


def test_d_of_pure_pole_on_a_line():
    # d (a/Phi) = a phi' / Phi^2 when the coefficient is constant
    s = const_series(-1, [2.0], exact=True)
    out = apply_d(s, line_phi(3.0))
    assert complex(extract_order(out, -2).coeffs[0]) == pytest.approx(6.0)


def test_product_keeps_only_trusted_orders():
    a = const_series(-1, [1.0, 1.0])      # trusted through Phi^0
    b = const_series(-1, [1.0, 2.0, 3.0])  # through Phi^1
    p = series_mul(a, b)
    assert p.base_exponent == -2
    assert p.top == -1
    with pytest.raises(OutOfWindowError):
        extract_order(p, 0)


def test_exact_series_multiply_fully():
    a = const_series(-1, [1.0, 1.0], exact=True)
    p = a * a
    assert [complex(j.coeffs[0]) for j in p.jets] == pytest.approx([1, 2, 1])


def test_evaluation_matches_direct_sum():
    s = LaurentSeries.from_jets(-1, [Jet.from_coeffs([1, 2], order=M),
                                     Jet.from_coeffs([0.5j], order=M)])
    xi, Phi = 0.2, 0.1 + 0.05j
    direct = (1 + 2 * xi) / Phi + 0.5j
    assert series_eval(s, xi, Phi) == pytest.approx(direct)


def test_flat_manifold_rejected():
    with pytest.raises(ConfigurationError):
        SingularityFunction.from_jet(Jet.from_coeffs([1.0, 0.0, 1.0], order=M))


def test_addition_aligns_exponents():
    a = const_series(-2, [1.0])
    b = const_series(0, [4.0, 1.0])
    s = a + b
    assert s.base_exponent == -2
    assert complex(extract_order(s, -2).coeffs[0]) == pytest.approx(1.0)


def test_chain_rule_against_numeric_derivative():
    # u(xi, xibar) = c(xi) / Phi with Phi = xibar - phi(xi)
    c = Jet.from_coeffs([1.0, 0.5, -0.25, 0.1], order=M)
    phi = SingularityFunction.from_jet(Jet.from_coeffs([0.0, 1.5, 0.3], order=M))
    s = LaurentSeries.from_jets(-1, [c], exact=True)
    ds = apply_d(s, phi)
    xi, xibar, h = 0.05, 0.4, 1e-6

    def u(x, y):
        return c(x) / (y - phi.phi(x))
    numeric = (u(xi + h, xibar) - u(xi - h, xibar)) / (2 * h)
    Phi = xibar - phi.phi(xi)
    assert series_eval(ds, xi, Phi) == pytest.approx(numeric, rel=1e-6)
