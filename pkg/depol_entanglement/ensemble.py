"""Pure-state ensembles of a density matrix.

Every ensemble {p_j, Psi_j} realizing rho comes from an isometric mixing of
the eigen-ensemble: sqrt(p_j) Psi_j = sum_k U_jk sqrt(l_k) e_k.
"""

import numpy as np
from scipy.linalg import eigh

from depol_entanglement.exceptions import DimensionError
from depol_entanglement.measures import MeasureResult
from depol_entanglement.states import (PartitionedPureState, PartyDims,
                                       to_density)
from depol_entanglement.util import ISOMETRY_TOL, SUPPORT_TOL, frobenius, hermitize

WEIGHT_TOL = 1e-10


class Ensemble():
    def __init__(self, weights, members):
        weights = np.asarray(weights, dtype=float)
        if len(weights) != len(members) or len(members) == 0:
            raise ValueError("Need one weight per member, got {0} weights and {1} members".format(
                len(weights), len(members)))
        if np.any(weights < 0):
            raise ValueError("Ensemble weights must be nonnegative")
        if abs(weights.sum() - 1.0) > WEIGHT_TOL:
            raise ValueError("Ensemble weights sum to {0:.15g}, not 1".format(weights.sum()))
        dims = members[0].dims
        for member in members:
            if member.dims != dims:
                raise DimensionError("Ensemble members with dims {0} and {1}".format(dims, member.dims))
        self.weights = weights
        self.members = list(members)
        self.dims = dims

    @classmethod
    def from_vectors(cls, vectors, dims):
        """Build from unnormalized rows sqrt(p_j) Psi_j; rows of zero norm are dropped."""
        dims = PartyDims(dims)
        vectors = np.asarray(vectors, dtype=complex)
        norms = np.real(np.sum(np.abs(vectors) ** 2, axis=1))
        keep = norms > 1e-30
        weights = norms[keep]
        members = [PartitionedPureState(dims, v / np.sqrt(p), validate=False)
                   for v, p in zip(vectors[keep], weights)]
        return cls(weights / weights.sum(), members)

    def density(self):
        D = self.dims.total_dim
        matrix = np.zeros((D, D), dtype=complex)
        for p, member in zip(self.weights, self.members):
            matrix += p * member.projector()
        return hermitize(matrix)

    def reconstruction_error(self, rho):
        return frobenius(self.density() - to_density(rho).matrix)

    def __len__(self):
        return len(self.members)

    def __repr__(self):
        return "Ensemble(size={0}, dims={1})".format(len(self), list(self.dims))


def eigen_frame(rho, support_tol=SUPPORT_TOL):
    """Columns sqrt(l_k) e_k over the support of rho, largest weight first."""
    rho = to_density(rho)
    eigenvalues, eigenvectors = eigh(hermitize(rho.matrix))
    eigenvalues, eigenvectors = eigenvalues[::-1], eigenvectors[:, ::-1]
    support = eigenvalues > support_tol * max(eigenvalues[0], 0.0)
    return eigenvectors[:, support] * np.sqrt(eigenvalues[support])


def check_isometry(mixing, rank):
    mixing = np.asarray(mixing, dtype=complex)
    if mixing.ndim != 2 or mixing.shape[1] != rank:
        raise DimensionError("Mixing matrix must have {0} columns (the rank of rho), got shape {1}".format(
            rank, mixing.shape))
    if mixing.shape[0] < rank:
        raise DimensionError("Mixing matrix needs at least {0} rows, got {1}".format(rank, mixing.shape[0]))
    deviation = float(np.max(np.abs(mixing.conj().T @ mixing - np.eye(rank))))
    if deviation > ISOMETRY_TOL:
        raise ValueError("Mixing matrix is not an isometry: max |U^dagger U - 1| = {0:.3g} > {1}".format(
            deviation, ISOMETRY_TOL))
    return mixing


def ensemble_from_isometry(rho, mixing, support_tol=SUPPORT_TOL):
    rho = to_density(rho)
    frame = eigen_frame(rho, support_tol)
    mixing = check_isometry(mixing, frame.shape[1])
    return Ensemble.from_vectors(mixing @ frame.T, rho.dims)


def measure_value(result):
    if isinstance(result, MeasureResult):
        return result.value
    return float(result)


def roof_objective(ensemble, measure):
    """sum_j p_j E(Psi_j)."""
    return float(sum(p * measure_value(measure(member))
                     for p, member in zip(ensemble.weights, ensemble.members)))


def local_measurement_ensemble(state, party, basis=None):
    """Outcome ensemble of a rank-1 projective measurement on one party.

    ``basis`` holds the measurement vectors as columns (computational basis by
    default). Members are the normalized post-measurement states; outcomes of
    zero probability are left out.
    """
    if not isinstance(state, PartitionedPureState):
        raise TypeError("Local measurement ensembles are built from pure states")
    party = int(party)
    if not 0 <= party < state.n_parties:
        raise DimensionError("Party index {0} out of range for {1} parties".format(party, state.n_parties))
    d = state.dims[party]
    basis = np.eye(d, dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
    check_isometry(basis, d)
    psi = state.tensor()
    vectors = []
    for m in range(d):
        projector = np.outer(basis[:, m], basis[:, m].conj())
        projected = np.moveaxis(np.tensordot(projector, psi, axes=([1], [party])), 0, party)
        vectors.append(projected.ravel())
    return Ensemble.from_vectors(np.array(vectors), state.dims)
