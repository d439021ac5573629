import numpy as np
import pytest

from cpn_painleve.errors import ConfigurationError, DegeneracyError
from cpn_painleve.leading_order import (LeadingData, build_exponent_system, column_sum_reduction,
                                        det_closed_form_check, random_leading_data,
                                        solve_exponents)


@pytest.mark.parametrize("N", range(2, 9))
def test_all_exponents_equal_one(N):
    rng = np.random.default_rng(N)
    sol = solve_exponents(random_leading_data(N, rng))
    assert np.allclose(sol.alpha, 1) and np.allclose(sol.beta, 1)
    assert sol.unique


def test_real_slice_data_has_positive_sum():
    d = random_leading_data(4, np.random.default_rng(0), real_slice=True)
    assert abs(d.S.imag) < 1e-15 and d.S.real > 0


def test_vanishing_sum_is_degenerate():
    d = LeadingData(3, [1.0, 1.0], [1.0, -1.0])
    assert d.is_degenerate()
    with pytest.raises(DegeneracyError):
        solve_exponents(d)


def test_zero_leading_value_rejected():
    with pytest.raises(ConfigurationError):
        LeadingData(2, [0.0], [1.0])


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_determinant_sign_alternates(N):
    d = random_leading_data(N, np.random.default_rng(10 + N))
    chk = det_closed_form_check(d)
    assert chk.match
    assert chk.printed_sign_matches == (N % 2 == 1)


def test_column_reduction_makes_first_column_constant():
    d = random_leading_data(5, np.random.default_rng(1))
    R = column_sum_reduction(d)
    assert np.allclose(R[:, 0], d.S)


def test_system_shape():
    d = random_leading_data(4, np.random.default_rng(2))
    B, c = build_exponent_system(d)
    assert B.shape == (3, 3) and np.allclose(c, d.S)
    assert np.allclose(B - np.diag(np.diag(B)), 2 * np.tile(d.products, (3, 1)) * (1 - np.eye(3)))
