import numpy as np
import pytest

from depol_entanglement.channels import DepolarizingSpec
from depol_entanglement.estimator import (MeasurementRecord, classical_fisher,
                                          decay_probability,
                                          estimate_epsilon,
                                          estimation_summary, povm_fisher,
                                          qcrb_gap, replicate_estimates,
                                          simulate_povm)
from depol_entanglement.exceptions import (DimensionError, EpsilonRangeError,
                                           SupportError)
from depol_entanglement.qfi import qfi_at
from depol_entanglement.states import named_state, random_density_state

GHZ = named_state("ghz", 3, 0.5)
SHOTS = 100000


def exact_variance(state, epsilon, shots):
    p1 = decay_probability(state, epsilon)
    return p1 * (1 - p1) / (shots * 4.5 ** 2)


def test_decay_probability():
    assert decay_probability(GHZ, 1e-9) < 1e-7
    p1 = decay_probability(GHZ, 0.01)
    assert abs(p1 - 0.045) < 1e-3
    assert p1 < 0.045


def test_simulation_is_seeded():
    a = simulate_povm(GHZ, 0.01, SHOTS, 42)
    b = simulate_povm(GHZ, 0.01, SHOTS, 42)
    assert a.count_one == b.count_one
    assert a.trace_rho_rhoprime == pytest.approx(4.5)
    assert 0 <= a.count_one <= SHOTS


def test_simulation_rejections():
    with pytest.raises(EpsilonRangeError):
        simulate_povm(GHZ, 0.0, SHOTS, 1)
    with pytest.raises(EpsilonRangeError):
        simulate_povm(GHZ, 0.7, SHOTS, 1)
    with pytest.raises(TypeError):
        simulate_povm(random_density_state([2, 2], 2, 0), 0.01, SHOTS, 1)


def test_estimator_edge_cases():
    report = estimate_epsilon(MeasurementRecord(SHOTS, 0, 0.01, 4.5))
    assert report.epsilon_hat == 0.0
    with pytest.raises(DimensionError):
        estimate_epsilon(MeasurementRecord(SHOTS, 10, 0.01, 0.0))
    with pytest.raises(ValueError):
        MeasurementRecord(10, 11, 0.01, 4.5)


def test_single_record_efficiency():
    report = estimate_epsilon(simulate_povm(GHZ, 0.01, SHOTS, 3))
    assert report.qcrb_bound == pytest.approx(0.01 / (4.5 * SHOTS))
    assert 0.85 <= report.ratio <= 1.05
    leading = 0.01 / (4.5 * SHOTS)
    assert exact_variance(GHZ, 0.01, SHOTS) / leading == pytest.approx(1.0, abs=0.1)


def test_classical_fisher():
    eps = 0.2
    assert classical_fisher([1 - eps, eps], [-1, 1]) == pytest.approx(1 / (eps * (1 - eps)))
    assert classical_fisher([0.25] * 4, [0.0] * 4) == 0.0
    assert classical_fisher([1.0, 0.0], [0.0, 0.0]) == 0.0
    with pytest.raises(SupportError):
        classical_fisher([1.0, 0.0], [-0.5, 0.5])
    with pytest.raises(ValueError):
        classical_fisher([0.5, 0.6], [0.0, 0.0])


def test_povm_fisher_is_bounded_by_qfi():
    states = [GHZ, named_state("w", 3, 1 / np.sqrt(3)), named_state("product", 3)]
    for state in states:
        for eps in np.linspace(0.01, 0.4, 10):
            cfi = povm_fisher(state, eps)
            assert cfi <= qfi_at(state, DepolarizingSpec(epsilon=eps)).qfi * (1 + 1e-9) + 1e-10
    for state in states:
        assert povm_fisher(state, 1e-3) == pytest.approx(qfi_at(state, DepolarizingSpec(epsilon=1e-3)).qfi, rel=1e-2)


def test_unbiased_to_leading_order():
    runs = 2000
    for eps in [1e-2, 1e-3]:
        estimates = replicate_estimates(GHZ, eps, SHOTS, runs, seed=17)
        standard_error = np.std(estimates, ddof=1) / np.sqrt(runs)
        assert abs(np.mean(estimates) - eps) <= 2 * eps ** 2 + 3 * standard_error


def test_variance_matches_binomial_and_leading_order():
    runs = 20000
    estimates = replicate_estimates(GHZ, 0.01, SHOTS, runs, seed=5)
    variance = np.var(estimates, ddof=1)
    assert variance == pytest.approx(exact_variance(GHZ, 0.01, SHOTS), rel=0.1)
    assert variance == pytest.approx(0.01 / (4.5 * SHOTS), rel=0.1)


def test_qcrb_product_window():
    runs = 40000
    product = qcrb_gap(GHZ, 0.01, SHOTS, runs, seed=9)
    assert 0.9 <= product <= 1.15
    # the estimator is biased at O(eps^2): the bound is its squared slope
    h = 1e-6
    slope = (decay_probability(GHZ, 0.01 + h) - decay_probability(GHZ, 0.01 - h)) / (2 * h * 4.5)
    assert product >= slope ** 2 * (1 - 4 * np.sqrt(2.0 / (runs - 1)))


def test_variance_scales_with_shots():
    runs = 5000
    single = np.var(replicate_estimates(GHZ, 0.01, SHOTS, runs, seed=1), ddof=1)
    double = np.var(replicate_estimates(GHZ, 0.01, 2 * SHOTS, runs, seed=2), ddof=1)
    assert single / double == pytest.approx(2.0, rel=0.15)


def test_replicates_are_deterministic():
    serial = replicate_estimates(GHZ, 0.01, SHOTS, 50, seed=8)
    again = replicate_estimates(GHZ, 0.01, SHOTS, 50, seed=8)
    threaded = replicate_estimates(GHZ, 0.01, SHOTS, 50, seed=8, n_jobs=4)
    np.testing.assert_array_equal(serial, again)
    np.testing.assert_array_equal(serial, threaded)


def test_summary_fields():
    summary = estimation_summary(GHZ, 0.01, SHOTS, 200, seed=4)
    assert summary["trace_rho_rhoprime"] == pytest.approx(4.5)
    assert summary["qcrb_bound"] == pytest.approx(0.01 / (4.5 * SHOTS))
    assert summary["qfi"] == pytest.approx(qfi_at(GHZ, DepolarizingSpec(epsilon=0.01)).qfi)
    with pytest.raises(ValueError):
        estimation_summary(GHZ, 0.01, SHOTS, 1, seed=4)
