import math
from fractions import Fraction

import numpy as np
import pytest

import sledyson


def test_drift_and_potential():
    d = sledyson.drift([0.0, math.pi / 2])
    assert d == pytest.approx([-1.0, 1.0])
    assert sledyson.potential([0.0, math.pi / 3]) == pytest.approx(2 * math.log(2))


def test_simulate_is_reproducible():
    t1, a1 = sledyson.simulate([0.0, 2.0, 4.0], kappa=2.0, t_end=0.1, seed=3)
    t2, a2 = sledyson.simulate([0.0, 2.0, 4.0], kappa=2.0, t_end=0.1, seed=3)
    assert a1.shape == (101, 3)
    assert np.array_equal(a1, a2)
    assert t1[-1] == pytest.approx(0.1)


def test_stationary_gaps_follow_beta_law():
    x = sledyson.sample_stationary(2, kappa=2.0, n_samples=4000, seed=5)
    gaps = np.mod(x[:, 1] - x[:, 0], 2 * math.pi)
    assert sledyson.ks_gap(gaps.tolist(), beta=2.0) < 0.04


def test_matrix_ensemble_and_quadrature():
    assert sledyson.gap_normalization(2.0) == pytest.approx(math.pi)
    s = [0.5, 1.0, math.pi]
    assert sledyson.gap_cdf(2.0, s) == pytest.approx([(v - math.sin(v)) / (2 * math.pi) for v in s])
    cue = sledyson.sample_matrix_ensemble("CUE", 2, 100, seed=2)
    assert cue.shape == (100, 2)


def test_spectral():
    assert sledyson.one_arm_eigenvalue(6.0, grid=1024) == pytest.approx(5 / 48, rel=1e-5)
    assert sledyson.one_arm_lambda_exact(6.0, "DYSON") == pytest.approx(5 / 24)
    levels = sledyson.cs_spectrum(2.0, grid=1024, levels=2)
    assert levels[0] == pytest.approx(0.0, abs=1e-8)
    assert levels[1] == pytest.approx(1.5, rel=1e-4)


def test_loewner_derivative():
    assert sledyson.derivative_at_origin([0.0, 2.0, 4.0], 0.2) == pytest.approx(math.exp(0.6), rel=1e-10)


def test_exponents_are_exact():
    assert sledyson.beta_from_kappa("8/3") == Fraction(3, 2)
    assert sledyson.fusion_exponent(2, 6) == Fraction(1, 3)
    assert sledyson.ansatz_exponent(3, Fraction(1, 3)) == Fraction(1)
    assert sledyson.h21(Fraction(8, 3)) == Fraction(5, 8)
    assert sledyson.kac_h_1_s(3, 1) == Fraction(1, 2)


def test_domain_errors():
    with pytest.raises(ValueError):
        sledyson.drift([1.0, 1.0])


def test_validate_quick_subset():
    rows = sledyson.validate([7, 9], quick=True)
    assert rows
    assert all(r["pass"] for r in rows)
    assert {"criterion_id", "value", "threshold", "pass"} <= set(rows[0])
