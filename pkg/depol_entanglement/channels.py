"""Depolarizing channels on party subsets.

A subset channel acts as
    E^alpha_eps(rho) = (1 - eps d_alpha) rho + eps 1_alpha (x) tr_alpha rho
and is affine in eps, E^alpha_eps = I + eps G^alpha with the generator
    G^alpha(X) = -d_alpha X + 1_alpha (x) tr_alpha X.
Compositions are applied exactly, in list order (first subset first). The
factors commute: replacing alpha and then beta by the identity equals
replacing alpha | beta, up to the factor d_{alpha & beta}.
"""

import logging

import numpy as np

from depol_entanglement.exceptions import DimensionError, EpsilonRangeError
from depol_entanglement.states import (DensityState, PartyDims, as_subset,
                                       embed_identity, ptrace_matrix,
                                       single_subsets, to_density)
from depol_entanglement.util import cp_bound, hermitize

ALL_LOCAL = "all-local"

logger = logging.getLogger('channels')


def check_epsilon(epsilon, d, open_range=False):
    """Reject eps outside [0, d/(d^2-1)] (or the open interval)."""
    bound = cp_bound(d)
    epsilon = float(epsilon)
    if open_range:
        if not 0.0 < epsilon < bound:
            raise EpsilonRangeError(
                "epsilon = {0} must lie strictly inside (0, {1:.12g}) for d = {2}".format(epsilon, bound, d))
    elif epsilon < 0.0 or epsilon > bound * (1.0 + 1e-12):
        raise EpsilonRangeError(
            "epsilon = {0} outside the completely positive range [0, {1:.12g}] for d = {2}".format(
                epsilon, bound, d))
    return epsilon


def _depolarize(matrix, dims, alpha, epsilon):
    d_alpha = int(np.prod([dims[j] for j in alpha]))
    rest = [j for j in range(len(dims)) if j not in alpha]
    reduced = ptrace_matrix(matrix, dims, rest)
    return (1.0 - epsilon * d_alpha) * matrix + epsilon * embed_identity(reduced, dims, alpha)


def _generator(matrix, dims, alpha):
    d_alpha = int(np.prod([dims[j] for j in alpha]))
    rest = [j for j in range(len(dims)) if j not in alpha]
    reduced = ptrace_matrix(matrix, dims, rest)
    return -d_alpha * matrix + embed_identity(reduced, dims, alpha)


def _resolve_subsets(dims, subsets):
    if subsets is None or subsets == ALL_LOCAL:
        return single_subsets(dims)
    resolved = [as_subset(alpha, dims) for alpha in subsets]
    if len(resolved) == 0:
        raise DimensionError("At least one party subset is required")
    return resolved


def depolarize_subset(rho, alpha, epsilon):
    rho = to_density(rho)
    alpha = as_subset(alpha, rho.dims)
    epsilon = check_epsilon(epsilon, alpha.d_alpha)
    matrix = _depolarize(rho.matrix, rho.dims.dims, alpha.indices, epsilon)
    return DensityState(rho.dims, hermitize(matrix), validate=False)


def partition_channel(rho, subsets, epsilon):
    """Exact composition of subset depolarizers, ``subsets[0]`` applied first."""
    rho = to_density(rho)
    subsets = _resolve_subsets(rho.dims, subsets)
    for alpha in subsets:
        check_epsilon(epsilon, alpha.d_alpha)
    matrix = rho.matrix
    for alpha in subsets:
        matrix = _depolarize(matrix, rho.dims.dims, alpha.indices, epsilon)
    return DensityState(rho.dims, hermitize(matrix), validate=False)


def local_product_channel(rho, epsilon):
    """E_eps applied to every party; single-party factors commute exactly."""
    return partition_channel(rho, ALL_LOCAL, epsilon)


def partition_derivative(rho, subsets, epsilon):
    """d/d eps of ``partition_channel`` by the product rule."""
    rho = to_density(rho)
    subsets = _resolve_subsets(rho.dims, subsets)
    for alpha in subsets:
        check_epsilon(epsilon, alpha.d_alpha)
    dims = rho.dims.dims
    total = np.zeros_like(rho.matrix)
    for i, alpha in enumerate(subsets):
        matrix = rho.matrix
        for beta in subsets[:i]:
            matrix = _depolarize(matrix, dims, beta.indices, epsilon)
        matrix = _generator(matrix, dims, alpha.indices)
        for beta in subsets[i + 1:]:
            matrix = _depolarize(matrix, dims, beta.indices, epsilon)
        total = total + matrix
    return hermitize(total)


def channel_derivative(rho, epsilon):
    return partition_derivative(rho, ALL_LOCAL, epsilon)


def rho_prime(rho, subsets=None):
    """rho' = sum_alpha (d_alpha rho - 1_alpha (x) tr_alpha rho) = -d/d eps at eps = 0."""
    rho = to_density(rho)
    subsets = _resolve_subsets(rho.dims, subsets)
    total = np.zeros_like(rho.matrix)
    for alpha in subsets:
        total = total - _generator(rho.matrix, rho.dims.dims, alpha.indices)
    return hermitize(total)


def first_order_channel(rho, epsilon, subsets=None):
    """rho - eps rho', the first-order truncation of the composed channel."""
    rho = to_density(rho)
    return rho.matrix - epsilon * rho_prime(rho, subsets)


class DepolarizingSpec():
    """Target parties and strength of a depolarizing channel.

    ``target`` is "all-local" (every party depolarized locally), a single
    subset, or an ordered list of subsets composed first to last.
    """

    def __init__(self, target=ALL_LOCAL, epsilon=0.0):
        self.target = target
        self.epsilon = float(epsilon)

    def subsets(self, dims):
        if self.target is None or (isinstance(self.target, str) and self.target == ALL_LOCAL):
            return single_subsets(dims)
        if isinstance(self.target, str):
            raise ValueError("Unknown channel target {0}".format(self.target))
        if _is_flat_indices(self.target):
            return [as_subset(self.target, dims)]
        return _resolve_subsets(dims, self.target)

    def bound(self, dims):
        return min(cp_bound(alpha.d_alpha) for alpha in self.subsets(dims))

    def check(self, dims, open_range=False):
        for alpha in self.subsets(dims):
            check_epsilon(self.epsilon, alpha.d_alpha, open_range=open_range)

    def at(self, epsilon):
        return DepolarizingSpec(self.target, epsilon)

    def apply(self, rho):
        rho = to_density(rho)
        return partition_channel(rho, self.subsets(rho.dims), self.epsilon)

    def derivative(self, rho):
        rho = to_density(rho)
        return partition_derivative(rho, self.subsets(rho.dims), self.epsilon)

    def __repr__(self):
        return "DepolarizingSpec(target={0!r}, epsilon={1})".format(self.target, self.epsilon)


def _is_flat_indices(target):
    if hasattr(target, "indices"):
        return True
    try:
        return all(isinstance(i, (int, np.integer)) for i in target)
    except TypeError:
        return isinstance(target, (int, np.integer))


class ChoiMatrix():
    """(E (x) I) applied to the normalized maximally entangled state; trace 1."""

    def __init__(self, matrix, dim):
        self.matrix = matrix
        self.dim = dim

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)

    @property
    def min_eigenvalue(self):
        return float(self.eigenvalues()[0])


def choi_matrix(d, epsilon):
    """Choi matrix of the d-dimensional depolarizer, for any eps (CP or not)."""
    d = int(d)
    if d < 2:
        raise DimensionError("Choi test needs d >= 2, got {0}".format(d))
    omega = np.eye(d, dtype=complex).ravel() / np.sqrt(d)
    dims = PartyDims([d, d]).dims
    matrix = _depolarize(np.outer(omega, omega.conj()), dims, [0], float(epsilon))
    return ChoiMatrix(hermitize(matrix), d)


def choi_cp_check(d, epsilon):
    choi = choi_matrix(d, epsilon)
    lowest = choi.min_eigenvalue
    logger.debug("Choi d={0} eps={1}: min eigenvalue {2:.3e}".format(d, epsilon, lowest))
    return {"min_eigenvalue": lowest, "is_cp": lowest >= -1e-12}
