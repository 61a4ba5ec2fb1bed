import math

import numpy as np
import pytest

from ic_rates import (
    Constellation,
    EstimatorConfig,
    Method,
    ReceiverModel,
    make_qam,
    mi_cross,
    mi_joint,
    mi_joint_direct,
    mi_single,
)

from _oracles import cross_mi_bits, single_mi_bits

# Reference values from tests/_oracles.py (midpoint-rule integration of the
# mixture densities, step 0.01; steps 0.02 and 0.01 agree to below 1e-7).
# All three use 4-QAM at P = 10**0.5 (5 dB), interferer gain |h| = 1.
P5 = 10 ** 0.5
GAIN5 = math.sqrt(P5)
SINGLE_4QAM_5DB = 1.718388167
CROSS_4QAM_RHO0 = 0.887039886
CROSS_4QAM_RHO45 = 1.037852222


def _cross_model(rho, h_abs=1.0):
    q4 = make_qam(4)
    return ReceiverModel(GAIN5, q4, h_abs * GAIN5 * np.exp(1j * rho), q4)


def test_quadrature_matches_reference_values(q4):
    order24 = EstimatorConfig(method="quad")
    order40 = EstimatorConfig(method="quad", quadrature_order=40)
    cases = [
        (lambda cfg: mi_single(q4, GAIN5, cfg), SINGLE_4QAM_5DB),
        (lambda cfg: mi_cross(_cross_model(0.0), cfg), CROSS_4QAM_RHO0),
        (lambda cfg: mi_cross(_cross_model(math.pi / 4), cfg), CROSS_4QAM_RHO45),
    ]
    for fn, ref in cases:
        assert fn(order24).bits == pytest.approx(ref, abs=3e-4)
        assert fn(order40).bits == pytest.approx(ref, abs=2e-5)


@pytest.mark.parametrize("seed", [7, 19])
def test_monte_carlo_matches_reference_values(q4, seed):
    cfg = EstimatorConfig(method="mc", samples=20000, seed=seed)
    est = mi_single(q4, GAIN5, cfg)
    assert est.std_error > 0
    assert abs(est.bits - SINGLE_4QAM_5DB) <= 4 * est.std_error
    for rho, ref in ((0.0, CROSS_4QAM_RHO0), (math.pi / 4, CROSS_4QAM_RHO45)):
        est = mi_cross(_cross_model(rho), cfg)
        assert abs(est.bits - ref) <= 4 * est.std_error


def test_live_oracle_small_models():
    """Direct numerical integration and the quadrature engine must agree."""
    bpsk = Constellation.from_points([1.0, -1.0])
    cfg = EstimatorConfig(method="quad", quadrature_order=40)
    got = mi_single(bpsk, 1.0, cfg).bits
    want = single_mi_bits(bpsk.points, 1.0)
    assert got == pytest.approx(want, abs=1e-5)

    got = mi_cross(ReceiverModel(1.0, bpsk, 0.8j, bpsk), cfg).bits
    want = cross_mi_bits(bpsk.points, 1.0, bpsk.points, 0.8j)
    assert got == pytest.approx(want, abs=1e-5)


def test_monte_carlo_is_deterministic(q4):
    cfg = EstimatorConfig(method="mc", samples=5000, seed=123)
    a = mi_cross(_cross_model(0.3), cfg)
    b = mi_cross(_cross_model(0.3), cfg)
    assert a.bits == b.bits
    assert a.std_error == b.std_error
    c = mi_cross(_cross_model(0.3), EstimatorConfig(method="mc", samples=5000, seed=124))
    assert c.bits != a.bits


def test_phase_conjugation_and_period_symmetry():
    cfg = EstimatorConfig(method="quad")
    rho = 0.37
    base = mi_cross(_cross_model(rho, 1.4), cfg).bits
    conj = mi_cross(_cross_model(-rho, 1.4), cfg).bits
    shifted = mi_cross(_cross_model(rho + math.pi / 2, 1.4), cfg).bits
    assert abs(base - conj) <= 1e-9
    assert abs(base - shifted) <= 1e-9


def test_single_mi_monotone_in_power(q4, quad_cfg):
    values = [mi_single(q4, math.sqrt(p), quad_cfg).bits for p in (0.5, 1.0, 2.0, 4.0, 8.0)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_single_mi_bounds(q4, quad_cfg):
    hi = mi_single(q4, math.sqrt(1e4), quad_cfg).bits
    assert hi == pytest.approx(2.0, abs=1e-9)
    lo = mi_single(q4, math.sqrt(1e-6), quad_cfg).bits
    assert 0.0 <= lo < 2e-6


def test_joint_chain_rule_matches_direct_quad(quad_cfg):
    model = _cross_model(0.3, 1.3)
    chain = mi_joint(model, quad_cfg)
    direct = mi_joint_direct(model, quad_cfg)
    assert chain.bits == pytest.approx(direct.bits, abs=1e-9)


def test_joint_chain_rule_matches_direct_mc():
    model = _cross_model(0.3, 1.3)
    cfg = EstimatorConfig(method="mc", samples=20000, seed=5)
    chain = mi_joint(model, cfg)
    direct = mi_joint_direct(model, cfg)
    tol = 4 * max(chain.std_error, direct.std_error)
    assert abs(chain.bits - direct.bits) <= tol


def test_joint_direct_hypothesis_limit(quad_cfg):
    psk96 = Constellation.from_points(np.exp(2j * np.pi * np.arange(96) / 96))
    q64 = make_qam(64)
    with pytest.raises(ValueError):
        mi_joint_direct(ReceiverModel(1.0, psk96, 1.0, q64), quad_cfg)


def test_std_error_shrinks_with_samples():
    model = _cross_model(0.3, 1.3)
    wide = mi_cross(model, EstimatorConfig(method="mc", samples=2000, seed=3))
    narrow = mi_cross(model, EstimatorConfig(method="mc", samples=8000, seed=3))
    assert narrow.std_error < wide.std_error
    assert wide.samples_used == 2000
    assert narrow.samples_used == 8000


def test_quadrature_reports_node_count(q4):
    est = mi_single(q4, 1.0, EstimatorConfig(method="quad", quadrature_order=24))
    assert est.samples_used == 24 * 24
    assert est.std_error == 0.0
    assert est.method is Method.GAUSS_HERMITE


def test_estimator_config_validation():
    assert EstimatorConfig(method="mc").method is Method.MONTE_CARLO
    assert EstimatorConfig(method="quad").method is Method.GAUSS_HERMITE
    with pytest.raises(ValueError):
        EstimatorConfig(method="bogus")
    with pytest.raises(ValueError):
        EstimatorConfig(method="mc", samples=0)
    with pytest.raises(ValueError):
        EstimatorConfig(method="quad", quadrature_order=1)


def test_receiver_model_validation(q4):
    with pytest.raises(ValueError):
        ReceiverModel(0.0, q4)  # desired gain must be nonzero
    with pytest.raises(ValueError):
        ReceiverModel(float("inf"), q4)
    with pytest.raises(ValueError):
        ReceiverModel(1.0, q4, 1.0, None)  # interferer gain without alphabet
    with pytest.raises(ValueError):
        mi_cross(ReceiverModel(1.0, q4), EstimatorConfig())  # no interferer at all


def test_gh_grid_is_normalized_and_symmetric():
    from ic_rates.mi import _gh_grid

    nodes, weights = _gh_grid(24)
    assert weights.sum() == pytest.approx(1.0, abs=1e-12)
    # closed under negation and conjugation so phase symmetries hold exactly
    assert np.allclose(np.sort_complex(nodes), np.sort_complex(-nodes))
    assert np.allclose(np.sort_complex(nodes), np.sort_complex(np.conj(nodes)))
