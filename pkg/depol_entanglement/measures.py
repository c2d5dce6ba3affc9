"""Entanglement measures from the regularized QFI of depolarizing channels.

For a pure state the eps -> 0 limit of eps J(rho_eps) is tr[rho rho'], and
E = K + tr[rho rho'] = sum_alpha (1 - tr[rho_alpha^2]) with
K = sum_alpha (1 - d_alpha). Values are unnormalized; the usual
Meyer-Wallach Q is ``mw_normalization(n) * value``.
"""

import numpy as np

from depol_entanglement.channels import channel_derivative
from depol_entanglement.exceptions import DimensionError
from depol_entanglement.states import (PartitionedPureState, PartyDims,
                                       as_subset, proper_subsets, purity,
                                       reduced_state, single_subsets)

SINGLES = "singles"
ALL_PROPER = "all-proper"


def mw_normalization(n_parties):
    """Factor 2/n turning the sum of local linear entropies into Q."""
    return 2.0 / n_parties


class MeasureResult():
    def __init__(self, value, per_party_terms, constant_K, subsets):
        self.value = float(value)
        self.per_party_terms = np.asarray(per_party_terms, dtype=float)
        self.constant_K = float(constant_K)
        self.subsets = list(subsets)

    def normalized(self):
        return mw_normalization(self.subsets[0].dims.n_parties) * self.value

    def as_dict(self):
        return {
            "value": self.value,
            "constant_K": self.constant_K,
            "subsets": [list(alpha.indices) for alpha in self.subsets],
            "per_party_terms": [float(t) for t in self.per_party_terms],
        }

    def __repr__(self):
        return "MeasureResult(value={0}, constant_K={1})".format(self.value, self.constant_K)


def resolve_family(dims, subsets):
    """Subsets for a family name ("singles", "all-proper") or an explicit list."""
    dims = PartyDims(dims)
    if subsets is None or (isinstance(subsets, str) and subsets == SINGLES):
        return single_subsets(dims)
    if isinstance(subsets, str):
        if subsets == ALL_PROPER:
            return proper_subsets(dims)
        raise ValueError("Unknown subset family {0}".format(subsets))
    resolved = [as_subset(alpha, dims) for alpha in subsets]
    if len(resolved) == 0:
        raise DimensionError("Subset family must not be empty")
    for alpha in resolved:
        if not alpha.is_proper():
            raise DimensionError("Subset {0} covers every party; only proper subsets are allowed".format(alpha))
    return resolved


def _require_pure(state):
    if not isinstance(state, PartitionedPureState):
        raise TypeError("Pure-state measure called with {0}; use the convex roof for mixed states".format(
            type(state).__name__))
    return state


def _group_order(alpha, rest):
    return [0] + [1 + j for j in alpha] + [1 + j for j in rest]


def _grouped(tensor, alpha, rest):
    """Reshape a (batch, *dims) tensor to (batch, d_alpha, d_rest)."""
    batch = tensor.shape[0]
    dims = tensor.shape[1:]
    d_alpha = int(np.prod([dims[j] for j in alpha]))
    d_rest = int(np.prod([dims[j] for j in rest])) if rest else 1
    return tensor.transpose(_group_order(alpha, rest)).reshape(batch, d_alpha, d_rest)


def _marginal_purities(vectors, dims, alpha):
    dims = tuple(dims)
    rest = [j for j in range(len(dims)) if j not in alpha]
    grouped = _grouped(vectors.reshape((vectors.shape[0],) + dims), list(alpha), rest)
    sigma = grouped @ grouped.conj().transpose(0, 2, 1)
    return np.real(np.sum(np.abs(sigma) ** 2, axis=(1, 2))), sigma, grouped


class LinearEntropyMeasure():
    """sum_alpha (1 - tr[rho_alpha^2]) for pure states, over a subset family.

    Besides evaluating normalized states it evaluates the ensemble-weighted
    form p E(psi / sqrt(p)) on batches of unnormalized vectors, with the
    Wirtinger gradient with respect to conj(psi).
    """

    def __init__(self, subsets=SINGLES):
        self.subsets = subsets

    def resolve(self, dims):
        return resolve_family(dims, self.subsets)

    def __call__(self, state):
        return partition_measure(_require_pure(state), self.subsets).value

    def weighted_value_and_gradient(self, vectors, dims):
        dims = PartyDims(dims)
        vectors = np.asarray(vectors, dtype=complex)
        batch = vectors.shape[0]
        norms = np.real(np.sum(np.abs(vectors) ** 2, axis=1))
        live = norms > 1e-300
        safe = np.where(live, norms, 1.0)
        value = np.zeros(batch)
        gradient = np.zeros((batch,) + dims.dims, dtype=complex)
        for alpha in self.resolve(dims):
            rest = list(alpha.complement)
            purities, sigma, grouped = _marginal_purities(vectors, dims.dims, alpha.indices)
            value += np.where(live, norms - purities / safe, 0.0)
            coefficient = np.where(live, 1.0 + purities / safe ** 2, 0.0)[:, None, None]
            grouped_gradient = coefficient * grouped - np.where(live, 2.0 / safe, 0.0)[:, None, None] * (sigma @ grouped)
            order = _group_order(alpha.indices, rest)
            shape = [batch] + [dims.dims[j - 1] for j in order[1:]]
            gradient += grouped_gradient.reshape(shape).transpose(np.argsort(order))
        return float(np.sum(value)), gradient.reshape(batch, dims.total_dim)

    def __repr__(self):
        return "LinearEntropyMeasure({0!r})".format(self.subsets)


def linear_entropy(rho, alpha):
    """1 - tr[rho_alpha^2] of the marginal on the parties ``alpha``."""
    alpha = as_subset(alpha, rho.dims)
    if isinstance(rho, PartitionedPureState):
        purities, _, _ = _marginal_purities(rho.amplitudes[None, :], rho.dims.dims, alpha.indices)
        return float(1.0 - purities[0])
    return 1.0 - purity(reduced_state(rho, alpha))


def partition_measure(state, subsets=ALL_PROPER):
    """E_p = sum over the subset family of local linear entropies."""
    state = _require_pure(state)
    family = resolve_family(state.dims, subsets)
    terms = [linear_entropy(state, alpha) for alpha in family]
    constant = sum(1 - alpha.d_alpha for alpha in family)
    return MeasureResult(float(np.sum(terms)), terms, constant, family)


def meyer_wallach(state):
    return partition_measure(state, SINGLES)


def inverter_form(state):
    """K - tr[rho dE/deps(rho)] at eps = 0, the same value as ``meyer_wallach``."""
    state = _require_pure(state)
    rho = state.density()
    derivative = channel_derivative(rho, 0.0)
    constant = sum(1 - d for d in state.dims)
    return constant - float(np.real(np.vdot(rho.matrix, derivative)))


def two_copy_tensor(state):
    """|psi>|psi> with the two copies interleaved party by party.

    Axis 2j holds copy A of party j and axis 2j + 1 copy B.
    """
    state = _require_pure(state)
    psi = state.tensor()
    n = state.n_parties
    doubled = np.multiply.outer(psi, psi)
    order = [axis for j in range(n) for axis in (j, n + j)]
    return doubled.transpose(order)


def antisymmetric_projection(tensor, party):
    """Apply P^-_j = (1 - SWAP_j) / 2 to the two copies of ``party``."""
    swapped = np.swapaxes(tensor, 2 * party, 2 * party + 1)
    return 0.5 * (tensor - swapped)


def two_copy_expectation(state):
    """sum_j 2 <psi|<psi| P^-_j |psi>|psi>, one term per party."""
    doubled = two_copy_tensor(state)
    terms = []
    for j in range(state.n_parties):
        projected = antisymmetric_projection(doubled, j)
        terms.append(2.0 * float(np.real(np.vdot(doubled, projected))))
    family = single_subsets(state.dims)
    constant = sum(1 - d for d in state.dims)
    return MeasureResult(float(np.sum(terms)), terms, constant, family)
