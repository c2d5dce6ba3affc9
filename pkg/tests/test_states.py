import numpy as np
import pytest
from scipy.stats import unitary_group

from depol_entanglement.exceptions import (DimensionError, HermiticityError,
                                           NormalizationError,
                                           PositivityError, TraceError)
from depol_entanglement.states import (DensityState, PartitionedPureState,
                                       PartyDims, apply_unitary,
                                       embed_identity, fidelity, mixture,
                                       named_state, partial_trace,
                                       proper_subsets, ptrace_matrix, purity,
                                       random_density_state,
                                       random_local_unitary, random_pure_state,
                                       reduced_state, tensor_product,
                                       werner_state)


def test_named_states():
    ghz = named_state("ghz", 3, 0.5)
    expected = np.zeros(8)
    expected[0] = expected[7] = np.sqrt(0.5)
    np.testing.assert_allclose(ghz.amplitudes, expected)

    w = named_state("w", 3, 1 / np.sqrt(3))
    np.testing.assert_allclose(np.abs(w.amplitudes[[4, 2, 1]]), [1 / np.sqrt(3)] * 3)
    assert abs(np.linalg.norm(w.amplitudes) - 1.0) < 1e-12

    product = named_state("product", 4, 0.3)
    assert product.amplitudes[0] == 1.0
    assert product.dims == [2, 2, 2, 2]

    with pytest.raises(ValueError):
        named_state("cluster", 3)


def test_ghz_marginals():
    ghz = named_state("ghz", 3, 0.5)
    for j in range(3):
        np.testing.assert_allclose(reduced_state(ghz, [j]).matrix, np.eye(2) / 2, atol=1e-14)
    assert partial_trace(ghz, [0, 1, 2]) == pytest.approx(1.0)


def test_partial_trace_of_product_keeps_factor():
    for seed in range(10):
        a = random_density_state([2], 2, seed)
        b = random_density_state([3], 3, seed + 100)
        joint = tensor_product(a, b)
        np.testing.assert_allclose(ptrace_matrix(joint.matrix, [2, 3], [0]), a.matrix, atol=1e-13)
        np.testing.assert_allclose(partial_trace(joint, [0]).matrix, b.matrix, atol=1e-13)


def test_embed_identity_party_major():
    b = random_density_state([2], 2, 3).matrix
    np.testing.assert_allclose(embed_identity(b, [2, 2], [0]), np.kron(np.eye(2), b))
    np.testing.assert_allclose(embed_identity(b, [2, 2], [1]), np.kron(b, np.eye(2)))


def test_amplitude_norm_is_enforced():
    with pytest.raises(NormalizationError):
        PartitionedPureState([2, 2], [0.9, 0, 0, 0])
    with pytest.raises(DimensionError):
        PartitionedPureState([2, 2], [1, 0, 0])


def test_density_validation():
    DensityState([2, 2, 2], np.eye(8) / 8)
    with pytest.raises(HermiticityError):
        DensityState([2], [[0.5, 0.1], [0.0, 0.5]])
    with pytest.raises(TraceError):
        DensityState([2], np.eye(2))
    with pytest.raises(PositivityError):
        DensityState([2], [[1.5, 0.0], [0.0, -0.5]])
    with pytest.raises(DimensionError):
        PartyDims([2, 1])


def test_tensor_product_with_trivial_factor():
    rho = random_density_state([2], 2, 0)
    assert tensor_product(rho, 1.0) is rho
    with pytest.raises(TraceError):
        tensor_product(rho, 2.0)


def test_fidelity():
    psi = random_pure_state([2, 2], 1)
    assert fidelity(psi, psi) == pytest.approx(1.0, abs=1e-10)
    zero = PartitionedPureState([2], [1, 0])
    one = PartitionedPureState([2], [0, 1])
    assert fidelity(zero, one) == pytest.approx(0.0, abs=1e-10)
    assert fidelity(zero, DensityState([2], np.eye(2) / 2)) == pytest.approx(np.sqrt(0.5))


def test_random_states_are_seeded():
    a = random_pure_state([2, 3], 5)
    b = random_pure_state([2, 3], 5)
    np.testing.assert_array_equal(a.amplitudes, b.amplitudes)
    rho = random_density_state([2, 2], 2, 9)
    assert rho.rank() == 2


def test_random_local_unitary():
    for seed in range(20):
        u = random_local_unitary([2, 3], seed)
        np.testing.assert_allclose(u @ u.conj().T, np.eye(6), atol=1e-12)
    psi = random_pure_state([2, 2], 0)
    moved = apply_unitary(psi, random_local_unitary([2, 2], 1))
    assert abs(np.linalg.norm(moved.amplitudes) - 1.0) < 1e-12


def test_proper_subsets_order():
    subsets = [list(alpha.indices) for alpha in proper_subsets([2, 2, 2])]
    assert subsets == [[0], [1], [2], [0, 1], [0, 2], [1, 2]]


def test_werner_and_mixture():
    rho = werner_state(0.9)
    assert purity(rho) == pytest.approx(0.81 + 0.19 / 4)
    mixed = mixture([0.5, 0.5], [PartitionedPureState([2], [1, 0]), PartitionedPureState([2], [0, 1])])
    np.testing.assert_allclose(mixed.matrix, np.eye(2) / 2)
    with pytest.raises(ValueError):
        werner_state(1.5)


def test_fidelity_is_unitarily_invariant():
    rng = np.random.default_rng(11)
    for seed in range(5):
        rho = random_density_state([2, 2], 4, seed)
        sigma = random_density_state([2, 2], 4, seed + 50)
        for unitary in (unitary_group.rvs(4, random_state=rng), random_local_unitary([2, 2], seed)):
            rotated = fidelity(apply_unitary(rho, unitary), apply_unitary(sigma, unitary))
            assert rotated == pytest.approx(fidelity(rho, sigma), abs=1e-10)


def test_haar_mean_marginal_purity():
    # (d_A + d_B) / (d_A d_B + 1) for two qubits
    purities = [purity(reduced_state(random_pure_state([2, 2], seed), [0])) for seed in range(10000)]
    assert np.mean(purities) == pytest.approx(0.8, abs=0.02)
