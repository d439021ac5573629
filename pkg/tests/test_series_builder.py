import numpy as np
import pytest

from cpn_painleve.errors import ConfigurationError
from cpn_painleve.jets import Jet
from cpn_painleve.laurent import LaurentSeries, SingularityFunction
from cpn_painleve.model import FieldTuple
from cpn_painleve.series_builder import (ModelConfig, SeriesSolution, build_series,
                                         init_leading, residual_at_radius, step_order,
                                         verify_residual_scaling)


def test_jet_order_must_cover_truncation():
    with pytest.raises(ConfigurationError):
        ModelConfig(N=2, K=6, M=7)
    assert ModelConfig(N=2, K=6).M == 8


def test_n_below_two_rejected():
    with pytest.raises(ConfigurationError):
        ModelConfig(N=1)


def test_orders_must_be_filled_in_sequence():
    sol = init_leading(ModelConfig(N=2, K=4))
    with pytest.raises(ConfigurationError):
        step_order(sol, 2)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_rank_profile(N):
    _, rep = build_series(ModelConfig(N=N, K=5, seed=1))
    expected = {k: 0 for k in range(1, 6)}
    if N > 2:
        expected[1] = 2 * (N - 2)
    assert rep.rank_profile == expected
    assert rep.first_integrals == 4 * N - 5
    assert rep.k0_rhs_max < 1e-12
    assert all(o.matrix_error < 1e-10 for o in rep.orders)


def test_same_seed_same_series():
    a, _ = build_series(ModelConfig(N=3, K=4, seed=11))
    b, _ = build_series(ModelConfig(N=3, K=4, seed=11))
    c, _ = build_series(ModelConfig(N=3, K=4, seed=12))
    assert np.array_equal(a.coeffs, b.coeffs)
    assert not np.array_equal(a.coeffs, c.coeffs)


def test_k_zero_with_constant_data_scales_like_phi_minus_three():
    # w = w0/Phi with constant w0 and a straight manifold
    cfg = ModelConfig(N=2, K=0)
    M = cfg.M
    coeffs = np.zeros((2, 1, M + 1), dtype=complex)
    coeffs[0, 0, 0], coeffs[1, 0, 0] = 0.7 + 0.2j, 0.4 - 0.5j
    phi = SingularityFunction.from_jet(Jet.from_coeffs([0, 1.1], order=M))
    sol = SeriesSolution(cfg, coeffs, phi, 0)
    fit = verify_residual_scaling(sol)
    assert fit.slope == pytest.approx(-3, abs=0.05)


def test_k_zero_generic_data_scales_like_phi_minus_four():
    sol, _ = build_series(ModelConfig(N=2, K=0, seed=4))
    assert verify_residual_scaling(sol).slope == pytest.approx(-4, abs=0.1)


def test_residual_shrinks_with_radius():
    sol, _ = build_series(ModelConfig(N=3, K=6, seed=2, precision=128))
    big, small = residual_at_radius(sol, 0.1), residual_at_radius(sol, 0.01)
    assert small < big * 1e-1


def test_radii_window_enforced():
    sol, _ = build_series(ModelConfig(N=2, K=4))
    with pytest.raises(ConfigurationError):
        verify_residual_scaling(sol, radii=(0.5, 0.1, 0.05, 0.01))


def test_extended_precision_reaches_far_below_double():
    _, rep = build_series(ModelConfig(N=2, K=4, seed=3, precision=200))
    assert rep.order(1).consistency_residual < 1e-40
