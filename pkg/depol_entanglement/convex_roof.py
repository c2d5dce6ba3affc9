"""Convex-roof extension of pure-state measures.

E(rho) = min over ensembles of sum_j p_j E(Psi_j). Ensembles are
parametrized by N x r isometries U (N members, r = rank rho) acting on the
eigen-ensemble, and the objective is minimized by Riemannian descent on the
complex Stiefel manifold from several starts. The result is an upper bound
on the roof; for two qubits it is checked against the Wootters concurrence.
"""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.linalg import qr

from depol_entanglement.ensemble import (Ensemble, eigen_frame,
                                         measure_value, roof_objective)
from depol_entanglement.exceptions import DimensionError
from depol_entanglement.measures import (ALL_PROPER, SINGLES,
                                         LinearEntropyMeasure, meyer_wallach,
                                         partition_measure)
from depol_entanglement.states import (PartitionedPureState, psd_sqrt,
                                       to_density)
from depol_entanglement.util import SUPPORT_TOL, spawn_seeds

logger = logging.getLogger('roof')

SIGMA_YY = np.array([[0, 0, 0, -1],
                     [0, 0, 1, 0],
                     [0, 1, 0, 0],
                     [-1, 0, 0, 0]], dtype=complex)


class RoofConfig():
    """Hyperparameters of the roof minimization.

    :param ensemble_size: number of ensemble members N, rank^2 when None
    :param restarts: number of starts; start 0 is the eigen-ensemble
    :param max_iters: descent iterations per start
    :param tol: Riemannian gradient norm at which a start counts as converged
    :param seed: seed of the random isometric starts
    :param n_jobs: starts evaluated concurrently
    """

    def __init__(self, ensemble_size=None, restarts=20, max_iters=2000, tol=1e-7, seed=0, n_jobs=1):
        if restarts < 1:
            raise ValueError("restarts must be >= 1, got {0}".format(restarts))
        if max_iters < 1:
            raise ValueError("max_iters must be >= 1, got {0}".format(max_iters))
        if tol <= 0:
            raise ValueError("tol must be positive, got {0}".format(tol))
        self.ensemble_size = ensemble_size
        self.restarts = int(restarts)
        self.max_iters = int(max_iters)
        self.tol = float(tol)
        self.seed = int(seed)
        self.n_jobs = max(int(n_jobs), 1)

    def size_for(self, rank):
        size = rank * rank if self.ensemble_size is None else int(self.ensemble_size)
        if size < rank:
            raise ValueError("ensemble_size {0} is below the rank {1} of rho".format(size, rank))
        return size

    def __repr__(self):
        return ("RoofConfig(ensemble_size={0}, restarts={1}, max_iters={2}, tol={3}, seed={4}, "
                "n_jobs={5})").format(self.ensemble_size, self.restarts, self.max_iters, self.tol,
                                      self.seed, self.n_jobs)


class CallableRoofMeasure():
    """Roof interface for an arbitrary pure-state measure.

    The weighted objective p E(psi / sqrt(p)) is differentiated by central
    differences, one real and one imaginary shift per amplitude.
    """

    def __init__(self, measure, step=1e-6):
        self.measure = measure
        self.step = step

    def __call__(self, state):
        return measure_value(self.measure(state))

    def _weighted(self, vector, dims):
        p = float(np.real(np.vdot(vector, vector)))
        if p <= 1e-300:
            return 0.0
        return p * self(PartitionedPureState(dims, vector / np.sqrt(p), validate=False))

    def weighted_value_and_gradient(self, vectors, dims):
        vectors = np.asarray(vectors, dtype=complex)
        value = 0.0
        gradient = np.zeros_like(vectors)
        for j, vector in enumerate(vectors):
            value += self._weighted(vector, dims)
            for i in range(vector.size):
                partial = []
                for shift in (self.step, 1j * self.step):
                    up, down = vector.copy(), vector.copy()
                    up[i] += shift
                    down[i] -= shift
                    partial.append((self._weighted(up, dims) - self._weighted(down, dims)) / (2 * self.step))
                gradient[j, i] = 0.5 * (partial[0] + 1j * partial[1])
        return value, gradient


def as_roof_measure(measure):
    """Map a pure-state measure to an object with ``weighted_value_and_gradient``."""
    if measure is None or measure is meyer_wallach:
        return LinearEntropyMeasure(SINGLES)
    if measure is partition_measure:
        return LinearEntropyMeasure(ALL_PROPER)
    if hasattr(measure, "weighted_value_and_gradient"):
        return measure
    if callable(measure):
        return CallableRoofMeasure(measure)
    raise TypeError("Cannot use {0!r} as a pure-state measure".format(measure))


def _inner(a, b):
    return float(np.real(np.vdot(a, b)))


def _project(mixing, direction):
    """Tangent projection Z - U sym(U^dagger Z) on the Stiefel manifold."""
    product = mixing.conj().T @ direction
    return direction - mixing @ (0.5 * (product + product.conj().T))


def _retract(point):
    q, r = qr(point, mode='economic')
    diagonal = np.diag(r)
    phases = np.where(np.abs(diagonal) > 0, diagonal / np.maximum(np.abs(diagonal), 1e-300), 1.0)
    return q * phases[None, :]


class _StiefelDescent():
    def __init__(self, frame, measure, dims, config):
        self.frame = frame
        self.measure = measure
        self.dims = dims
        self.config = config

    def objective(self, mixing):
        value, gradient = self.measure.weighted_value_and_gradient(mixing @ self.frame.T, self.dims)
        euclidean = 2.0 * gradient @ self.frame.conj()
        return value, _project(mixing, euclidean)

    def run(self, mixing):
        value, direction = self.objective(mixing)
        step = 1.0
        converged = False
        iteration = 0
        for iteration in range(self.config.max_iters):
            gnorm = np.sqrt(_inner(direction, direction))
            if gnorm <= self.config.tol:
                converged = True
                break
            t = step
            while True:
                candidate = _retract(mixing - t * direction)
                candidate_value, candidate_direction = self.objective(candidate)
                if candidate_value <= value - 1e-4 * t * gnorm ** 2 or t < 1e-14:
                    break
                t *= 0.5
            if candidate_value > value or t < 1e-14:
                converged = gnorm <= 1e3 * self.config.tol
                break
            s = candidate - mixing
            y = candidate_direction - direction
            sy = _inner(s, y)
            step = float(np.clip(abs(_inner(s, s) / sy), 1e-6, 1e3)) if abs(sy) > 1e-300 else 1.0
            mixing, value, direction = candidate, candidate_value, candidate_direction
        return {"value": value, "mixing": mixing, "converged": converged, "iterations": iteration + 1}


def _start(index, size, rank, seed):
    if index == 0:
        start = np.zeros((size, rank), dtype=complex)
        start[:rank, :rank] = np.eye(rank)
        return start
    rng = np.random.default_rng(seed)
    gaussian = rng.standard_normal((size, rank)) + 1j * rng.standard_normal((size, rank))
    return _retract(gaussian)


def convex_roof_minimize(rho, measure=meyer_wallach, config=None):
    """Best roof objective over multi-start descent.

    Returns a dict with the value, the ensemble reaching it, the convergence
    flag of the winning start and run metadata. The ensemble size is a cap on
    the number of members, so the value is an upper bound unless rho is pure.
    """
    config = RoofConfig() if config is None else config
    roof_measure = as_roof_measure(measure)
    rho = to_density(rho)
    frame = eigen_frame(rho, SUPPORT_TOL)
    rank = frame.shape[1]

    if rank == 1:
        member = PartitionedPureState(rho.dims, frame[:, 0] / np.linalg.norm(frame[:, 0]), validate=False)
        ensemble = Ensemble([1.0], [member])
        value = roof_objective(ensemble, roof_measure)
        logger.info("Pure input, roof value {0:.12g}".format(value))
        return {"value": value, "ensemble": ensemble, "converged": True, "rank": 1,
                "ensemble_size": 1, "restarts": 0, "best_restart": 0, "upper_bound": False,
                "note": "pure input; value is exact"}

    size = config.size_for(rank)
    descent = _StiefelDescent(frame, roof_measure, rho.dims, config)
    seeds = spawn_seeds(config.seed, config.restarts)

    def run(index):
        result = descent.run(_start(index, size, rank, seeds[index]))
        logger.debug("restart {0}: value={1:.12g} converged={2} iterations={3}".format(
            index, result["value"], result["converged"], result["iterations"]))
        return result

    if config.n_jobs > 1:
        with ThreadPoolExecutor(max_workers=config.n_jobs) as pool:
            results = list(pool.map(run, range(config.restarts)))
    else:
        results = [run(index) for index in range(config.restarts)]

    best_index = 0
    for index, result in enumerate(results):
        if result["value"] < results[best_index]["value"]:
            best_index = index
    best = results[best_index]
    ensemble = Ensemble.from_vectors(best["mixing"] @ frame.T, rho.dims)
    if not best["converged"]:
        logger.warning("Best roof start {0} did not converge within {1} iterations; value {2:.12g} is best so far".format(
            best_index, config.max_iters, best["value"]))
    logger.info("Roof value {0:.12g} from start {1} of {2} (rank {3}, {4} members)".format(
        best["value"], best_index, config.restarts, rank, size))
    return {"value": float(best["value"]), "ensemble": ensemble, "converged": bool(best["converged"]),
            "rank": rank, "ensemble_size": size, "restarts": config.restarts, "best_restart": best_index,
            "upper_bound": True,
            "note": "ensembles capped at {0} members; value is an upper bound on the roof".format(size)}


def wootters_concurrence(rho):
    """C = max(0, l1 - l2 - l3 - l4) for a two-qubit state."""
    rho = to_density(rho)
    if tuple(rho.dims) != (2, 2):
        raise DimensionError("Wootters concurrence needs two qubits, got dims {0}".format(list(rho.dims)))
    flipped = SIGMA_YY @ rho.matrix.conj() @ SIGMA_YY
    # singular values of sqrt(rho) sqrt(rho~) are the square roots of the eigenvalues of rho rho~
    values = np.linalg.svd(psd_sqrt(rho.matrix) @ psd_sqrt(flipped), compute_uv=False)
    values = np.sort(values)[::-1]
    return float(max(0.0, values[0] - values[1] - values[2] - values[3]))
