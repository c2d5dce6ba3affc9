import numpy as np
import pytest
from scipy.stats import unitary_group

from depol_entanglement.convex_roof import (CallableRoofMeasure, RoofConfig,
                                            as_roof_measure,
                                            convex_roof_minimize,
                                            wootters_concurrence)
from depol_entanglement.ensemble import (Ensemble, ensemble_from_isometry,
                                         local_measurement_ensemble,
                                         roof_objective)
from depol_entanglement.exceptions import DimensionError
from depol_entanglement.measures import LinearEntropyMeasure, meyer_wallach
from depol_entanglement.states import (PartitionedPureState, mixture,
                                       named_state, random_density_state,
                                       random_pure_state, werner_state)

BELL = PartitionedPureState([2, 2], np.array([1, 0, 0, 1]) / np.sqrt(2))
ZERO_ZERO = PartitionedPureState([2, 2], [1, 0, 0, 0])

FAST = RoofConfig(restarts=6, max_iters=1500, seed=3)


def random_isometry(rows, cols, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, _ = np.linalg.qr(g)
    return q


def test_identity_mixing_gives_eigen_ensemble():
    rho = random_density_state([2, 2], 3, 0)
    ensemble = ensemble_from_isometry(rho, np.eye(3))
    assert len(ensemble) == 3
    np.testing.assert_allclose(ensemble.weights, np.sort(np.linalg.eigvalsh(rho.matrix))[::-1][:3], atol=1e-12)
    assert ensemble.reconstruction_error(rho) <= 1e-8


def test_any_isometry_reconstructs():
    for seed in range(20):
        rho = random_density_state([2, 3], 1 + seed % 4, seed)
        rank = rho.rank()
        ensemble = ensemble_from_isometry(rho, random_isometry(rank + seed % 3, rank, seed))
        assert ensemble.reconstruction_error(rho) <= 1e-8


def test_pure_input_members_match():
    psi = random_pure_state([2, 2], 4)
    ensemble = ensemble_from_isometry(psi, random_isometry(3, 1, 5))
    for member in ensemble.members:
        assert abs(np.vdot(psi.amplitudes, member.amplitudes)) == pytest.approx(1.0, abs=1e-12)


def test_non_isometric_mixing_rejected():
    rho = random_density_state([2, 2], 2, 1)
    with pytest.raises(ValueError):
        ensemble_from_isometry(rho, 2 * np.eye(2))
    with pytest.raises(DimensionError):
        ensemble_from_isometry(rho, np.eye(3))


def test_roof_objective_examples():
    product = Ensemble([0.3, 0.7], [ZERO_ZERO, PartitionedPureState([2, 2], [0, 0, 0, 1])])
    assert roof_objective(product, meyer_wallach) == pytest.approx(0.0, abs=1e-14)
    assert roof_objective(Ensemble([1.0], [BELL]), meyer_wallach) == pytest.approx(1.0)
    assert roof_objective(Ensemble([0.5, 0.5], [BELL, ZERO_ZERO]), meyer_wallach) == pytest.approx(0.5)


def test_wootters_examples():
    assert wootters_concurrence(BELL) == pytest.approx(1.0, abs=1e-10)
    assert wootters_concurrence(ZERO_ZERO) == pytest.approx(0.0, abs=1e-10)
    assert wootters_concurrence(werner_state(0.9)) == pytest.approx(0.85, abs=1e-10)
    for w in [0.0, 0.2, 1 / 3]:
        assert wootters_concurrence(werner_state(w)) == pytest.approx(0.0, abs=1e-10)
    with pytest.raises(DimensionError):
        wootters_concurrence(named_state("ghz", 3))


def test_pure_tangle_identity():
    for seed in range(100):
        psi = random_pure_state([2, 2], seed)
        assert meyer_wallach(psi).value == pytest.approx(wootters_concurrence(psi) ** 2, abs=1e-10)


def test_roof_werner():
    for w in [0.4, 0.7, 0.9, 1.0]:
        result = convex_roof_minimize(werner_state(w), meyer_wallach, FAST)
        tangle = max(0.0, (3 * w - 1) / 2) ** 2
        assert abs(result["value"] - tangle) <= 1e-3
    assert convex_roof_minimize(werner_state(0.9), meyer_wallach, FAST)["value"] == pytest.approx(0.7225, abs=1e-3)


def test_roof_against_wootters_on_random_states():
    for seed in range(50):
        rho = random_density_state([2, 2], 1 + seed % 4, seed)
        result = convex_roof_minimize(rho, meyer_wallach, FAST)
        tangle = wootters_concurrence(rho) ** 2
        assert result["value"] >= tangle - 1e-3
        assert abs(result["value"] - tangle) <= 1e-3


def test_roof_never_exceeds_eigen_ensemble():
    for seed in range(10):
        rho = random_density_state([2, 3], 3, seed)
        eigen = roof_objective(ensemble_from_isometry(rho, np.eye(3)), meyer_wallach)
        result = convex_roof_minimize(rho, meyer_wallach, RoofConfig(restarts=2, max_iters=300, seed=seed))
        assert result["value"] <= eigen + 1e-12
        assert roof_objective(result["ensemble"], meyer_wallach) == pytest.approx(result["value"], abs=1e-8)
        assert result["ensemble"].reconstruction_error(rho) <= 1e-8


def test_separable_mixture_is_zero():
    states = [random_pure_state([2], s) for s in range(6)]
    products = [PartitionedPureState([2, 2], np.kron(states[2 * k].amplitudes, states[2 * k + 1].amplitudes))
                for k in range(3)]
    rho = mixture([0.5, 0.3, 0.2], products)
    assert convex_roof_minimize(rho, meyer_wallach, FAST)["value"] <= 1e-6


def test_pure_input_is_exact():
    psi = random_pure_state([2, 2, 2], 2)
    result = convex_roof_minimize(psi.density(), meyer_wallach)
    assert result["value"] == pytest.approx(meyer_wallach(psi).value, abs=1e-12)
    assert result["converged"] and not result["upper_bound"]


def test_roof_convexity():
    for seed in range(5):
        a = random_density_state([2, 2], 2, seed)
        b = random_density_state([2, 2], 2, seed + 50)
        lam = 0.3 + 0.1 * seed
        mixed = mixture([lam, 1 - lam], [a, b])
        values = [convex_roof_minimize(rho, meyer_wallach, FAST)["value"] for rho in (mixed, a, b)]
        assert values[0] <= lam * values[1] + (1 - lam) * values[2] + 2e-3


def test_seed_determinism():
    rho = random_density_state([2, 2], 3, 7)
    config = RoofConfig(restarts=4, max_iters=400, seed=11)
    first = convex_roof_minimize(rho, meyer_wallach, config)
    second = convex_roof_minimize(rho, meyer_wallach, config)
    threaded = convex_roof_minimize(rho, meyer_wallach, RoofConfig(restarts=4, max_iters=400, seed=11, n_jobs=2))
    assert first["value"] == second["value"] == threaded["value"]
    np.testing.assert_array_equal(first["ensemble"].weights, second["ensemble"].weights)
    assert first["best_restart"] == threaded["best_restart"]


def test_metadata_notes_truncation():
    result = convex_roof_minimize(werner_state(0.7), meyer_wallach, RoofConfig(restarts=2, max_iters=200))
    assert result["ensemble_size"] == 16
    assert result["upper_bound"]
    assert "16" in result["note"]
    with pytest.raises(ValueError):
        RoofConfig(ensemble_size=2).size_for(4)


def test_strong_monotonicity_under_local_measurements():
    for seed in range(100):
        psi = random_pure_state([2, 2, 2], seed)
        party = seed % 3
        basis = unitary_group.rvs(2, random_state=np.random.default_rng(seed))
        ensemble = local_measurement_ensemble(psi, party, basis)
        assert ensemble.weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert meyer_wallach(psi).value >= roof_objective(ensemble, meyer_wallach) - 1e-12


def test_callable_measure_gradient():
    analytic = as_roof_measure(meyer_wallach)
    assert isinstance(analytic, LinearEntropyMeasure)
    numeric = CallableRoofMeasure(lambda state: meyer_wallach(state).value)
    assert as_roof_measure(numeric) is numeric
    rng = np.random.default_rng(0)
    vectors = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
    value_a, grad_a = analytic.weighted_value_and_gradient(vectors, [2, 2])
    value_n, grad_n = numeric.weighted_value_and_gradient(vectors, [2, 2])
    assert value_n == pytest.approx(value_a, abs=1e-12)
    np.testing.assert_allclose(grad_n, grad_a, atol=1e-6)
