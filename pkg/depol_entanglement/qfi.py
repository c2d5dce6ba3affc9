"""Symmetric logarithmic derivative and quantum Fisher information.

Everything is computed in the eigenbasis of rho_eps = sum_k l_k |e_k><e_k|:
    Lambda_kl = 2 (d rho)_kl / (l_k + l_l),   J = sum_kl 2 |(d rho)_kl|^2 / (l_k + l_l)
over the pairs with l_k + l_l above the support tolerance. Degenerate
eigenvalues need no special treatment in this form.
"""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.linalg import eigh

from depol_entanglement.channels import ALL_LOCAL, DepolarizingSpec, rho_prime
from depol_entanglement.exceptions import EpsilonRangeError, SupportError
from depol_entanglement.states import (DensityState, PartitionedPureState,
                                       fidelity, to_density)
from depol_entanglement.util import SUPPORT_TOL, hermitize

logger = logging.getLogger('qfi')


class SpectralDecomposition():
    """Eigen-decomposition of a density matrix with its numerical support.

    :param rho: DensityState or Hermitian matrix
    :param support_tol: support threshold relative to the largest eigenvalue
    """

    def __init__(self, rho, support_tol=SUPPORT_TOL):
        matrix = rho.matrix if isinstance(rho, DensityState) else np.asarray(rho)
        eigenvalues, eigenvectors = eigh(hermitize(matrix))
        self.eigenvalues = eigenvalues
        self.eigenvectors = eigenvectors
        self.tolerance = support_tol * max(eigenvalues[-1], 0.0)
        self.support_mask = eigenvalues > self.tolerance

    @property
    def rank(self):
        return int(np.sum(self.support_mask))

    def to_eigenbasis(self, matrix):
        return self.eigenvectors.conj().T @ matrix @ self.eigenvectors

    def from_eigenbasis(self, matrix):
        return self.eigenvectors @ matrix @ self.eigenvectors.conj().T

    def pair_sums(self):
        return self.eigenvalues[:, None] + self.eigenvalues[None, :]

    def reconstruct(self):
        return self.from_eigenbasis(np.diag(self.eigenvalues))


class QfiPoint():
    def __init__(self, epsilon, qfi):
        self.epsilon = float(epsilon)
        self.qfi = float(qfi)
        self.regularized = self.epsilon * self.qfi

    def as_row(self):
        return {"epsilon": self.epsilon, "qfi": self.qfi, "regularized_qfi": self.regularized}

    def __repr__(self):
        return "QfiPoint(epsilon={0}, qfi={1}, regularized={2})".format(
            self.epsilon, self.qfi, self.regularized)


def _sld_in_eigenbasis(decomposition, drho_eig):
    sums = decomposition.pair_sums()
    mask = sums > decomposition.tolerance
    safe = np.where(mask, sums, 1.0)
    return np.where(mask, 2.0 * drho_eig / safe, 0.0), mask


def sld(rho, drho, support_tol=SUPPORT_TOL, strict=True):
    """Solve Lambda rho + rho Lambda = 2 drho on the support of rho.

    Lambda is set to zero on the kernel block. With ``strict`` the call fails
    when drho has weight on that block, which is what happens for a pure
    rho at eps = 0.
    """
    decomposition = SpectralDecomposition(rho, support_tol)
    drho_eig = decomposition.to_eigenbasis(hermitize(drho))
    kernel = ~decomposition.support_mask
    if strict and np.any(kernel):
        outside = np.linalg.norm(drho_eig[np.ix_(kernel, kernel)])
        if outside >= 1e-8:
            raise SupportError(
                "Derivative has weight {0:.3g} outside the support of rho; "
                "regularize (eps > 0) before solving for the SLD".format(outside))
    lam, _ = _sld_in_eigenbasis(decomposition, drho_eig)
    return hermitize(decomposition.from_eigenbasis(lam))


def sld_residual(rho, drho, lam):
    """Frobenius norm of Lambda rho + rho Lambda - 2 drho."""
    matrix = rho.matrix if isinstance(rho, DensityState) else np.asarray(rho)
    return float(np.linalg.norm(lam @ matrix + matrix @ lam - 2.0 * drho))


def qfi_from_derivative(rho, drho, support_tol=SUPPORT_TOL):
    """QFI of the family through rho with tangent drho; returns (J, tr[rho L^2], tr[drho L])."""
    decomposition = SpectralDecomposition(rho, support_tol)
    drho_eig = decomposition.to_eigenbasis(hermitize(drho))
    lam, mask = _sld_in_eigenbasis(decomposition, drho_eig)
    sums = np.where(mask, decomposition.pair_sums(), 1.0)
    qfi = float(np.sum(np.where(mask, 2.0 * np.abs(drho_eig) ** 2 / sums, 0.0)))
    second_moment = float(np.real(np.sum(decomposition.eigenvalues[:, None] * np.abs(lam) ** 2)))
    overlap = float(np.real(np.sum(drho_eig.T * lam)))
    return qfi, second_moment, overlap


def _as_spec(channel, epsilon=None):
    if channel is None:
        channel = DepolarizingSpec(ALL_LOCAL, 0.0 if epsilon is None else epsilon)
    elif epsilon is not None:
        channel = channel.at(epsilon)
    return channel


def qfi_at(state, channel, support_tol=SUPPORT_TOL):
    """QFI of rho_eps = channel(state) with respect to eps, for eps inside (0, bound)."""
    rho = to_density(state)
    channel.check(rho.dims, open_range=True)
    rho_eps = channel.apply(rho)
    drho = channel.derivative(rho)
    qfi, second_moment, overlap = qfi_from_derivative(rho_eps, drho, support_tol)
    scale = max(abs(qfi), 1.0)
    if abs(second_moment - overlap) / scale > 1e-8:
        logger.warning("SLD forms disagree at eps={0}: tr[rho L^2]={1:.12g}, tr[drho L]={2:.12g}".format(
            channel.epsilon, second_moment, overlap))
    logger.debug("eps={0:.6g} qfi={1:.12g}".format(channel.epsilon, qfi))
    return QfiPoint(channel.epsilon, qfi)


def _pure_projector(state):
    if isinstance(state, PartitionedPureState):
        return state.density()
    rho = to_density(state)
    if abs(np.real(np.vdot(rho.matrix, rho.matrix)) - 1.0) > 1e-10:
        raise ValueError("The eps -> 0 limit formula needs a pure input state")
    return rho


def qfi_limit_pure(state, subsets=None):
    """lim eps->0 of eps J(rho_eps) = tr[rho rho'] for a pure input."""
    rho = _pure_projector(state)
    return float(np.real(np.vdot(rho.matrix, rho_prime(rho, subsets))))


def regularized_qfi_curve(state, eps_grid, channel=None, n_jobs=1):
    """qfi_at over a grid of eps values, grid order preserved."""
    rho = to_density(state)
    channel = _as_spec(channel)
    eps_grid = [float(e) for e in eps_grid]
    for index, epsilon in enumerate(eps_grid):
        try:
            channel.at(epsilon).check(rho.dims, open_range=True)
        except EpsilonRangeError as e:
            raise EpsilonRangeError("Grid point {0}: {1}".format(index, e))

    def evaluate(epsilon):
        return qfi_at(rho, channel.at(epsilon))

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            return list(pool.map(evaluate, eps_grid))
    return [evaluate(epsilon) for epsilon in eps_grid]


def fidelity_rate_check(state, eps_small, channel=None):
    """-(F(rho, rho_eps)^2 - 1) / eps by a forward difference.

    Backward differences are not available: the channel is unphysical for
    eps < 0.
    """
    eps_small = float(eps_small)
    if not 0.0 < eps_small <= 1e-3:
        raise EpsilonRangeError("eps_small must lie in (0, 1e-3], got {0}".format(eps_small))
    rho = _pure_projector(state)
    rho_eps = _as_spec(channel, eps_small).apply(rho)
    fidelity_squared = float(np.real(np.vdot(rho.matrix, rho_eps.matrix)))
    return -(fidelity_squared - 1.0) / eps_small


def fidelity_qfi_estimate(state, channel, deltas=(1e-3, 1e-4)):
    """QFI from the fidelity Hessian, 8 (1 - F(rho_eps, rho_eps+delta)) / delta^2.

    The finite-delta values carry an O(delta) error, removed here by one
    Richardson step between the two deltas.
    """
    rho = to_density(state)
    rho_eps = channel.apply(rho)
    values = []
    for delta in deltas:
        shifted = channel.at(channel.epsilon + delta).apply(rho)
        values.append(8.0 * (1.0 - fidelity(rho_eps, shifted)) / delta ** 2)
    ratio = deltas[0] / deltas[1]
    return (ratio * values[1] - values[0]) / (ratio - 1.0)
