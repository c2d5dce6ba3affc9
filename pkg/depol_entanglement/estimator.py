"""Monte-Carlo estimation of eps with the projective measurement {rho, 1 - rho}.

For a pure probe rho the outcome x = 1 has probability
p1 = 1 - tr[rho_eps rho] = eps tr[rho rho'] + O(eps^2), so
eps_hat = count_one / (shots tr[rho rho']) is unbiased to leading order with
variance eps / (shots tr[rho rho']), the quantum Cramer-Rao bound.
"""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from depol_entanglement.channels import ALL_LOCAL, DepolarizingSpec
from depol_entanglement.exceptions import DimensionError, SupportError
from depol_entanglement.qfi import qfi_at, qfi_limit_pure
from depol_entanglement.states import PartitionedPureState
from depol_entanglement.util import spawn_seeds

logger = logging.getLogger('estimator')


class MeasurementRecord():
    def __init__(self, shots, count_one, epsilon_true, trace_rho_rhoprime):
        shots, count_one = int(shots), int(count_one)
        if shots < 1:
            raise ValueError("shots must be >= 1, got {0}".format(shots))
        if not 0 <= count_one <= shots:
            raise ValueError("count_one = {0} outside [0, {1}]".format(count_one, shots))
        self.shots = shots
        self.count_one = count_one
        self.epsilon_true = float(epsilon_true)
        self.trace_rho_rhoprime = float(trace_rho_rhoprime)

    def as_dict(self):
        return {"shots": self.shots, "count_one": self.count_one,
                "epsilon_true": self.epsilon_true, "trace_rho_rhoprime": self.trace_rho_rhoprime}

    def __repr__(self):
        return "MeasurementRecord(shots={0}, count_one={1}, epsilon_true={2})".format(
            self.shots, self.count_one, self.epsilon_true)


class EstimationReport():
    def __init__(self, epsilon_hat, sample_variance, qcrb_bound):
        self.epsilon_hat = float(epsilon_hat)
        self.sample_variance = float(sample_variance)
        self.qcrb_bound = float(qcrb_bound)
        self.ratio = self.sample_variance / self.qcrb_bound if self.qcrb_bound > 0 else float("nan")

    def as_dict(self):
        return {"epsilon_hat": self.epsilon_hat, "sample_variance": self.sample_variance,
                "qcrb_bound": self.qcrb_bound, "ratio": self.ratio}

    def __repr__(self):
        return "EstimationReport(epsilon_hat={0}, ratio={1})".format(self.epsilon_hat, self.ratio)


def _probe_channel(state, epsilon, channel):
    if not isinstance(state, PartitionedPureState):
        raise TypeError("The {rho, 1 - rho} measurement needs a pure probe state")
    spec = DepolarizingSpec(ALL_LOCAL, epsilon) if channel is None else channel.at(epsilon)
    spec.check(state.dims, open_range=True)
    return spec


def decay_probability(state, epsilon, channel=None):
    """p1 = 1 - tr[rho_eps rho] from the exact channel."""
    spec = _probe_channel(state, epsilon, channel)
    rho = state.density()
    survival = float(np.real(np.vdot(rho.matrix, spec.apply(rho).matrix)))
    return min(max(1.0 - survival, 0.0), 1.0)


def _probe_trace(state, channel):
    subsets = None if channel is None else channel.subsets(state.dims)
    return qfi_limit_pure(state, subsets)


def simulate_povm(state, epsilon, shots, seed, channel=None):
    """Draw count_one ~ Binomial(shots, p1) with a PCG64 generator seeded by ``seed``."""
    if int(shots) < 1:
        raise ValueError("shots must be >= 1, got {0}".format(shots))
    p1 = decay_probability(state, epsilon, channel)
    count_one = np.random.default_rng(seed).binomial(int(shots), p1)
    logger.debug("eps={0:.6g} p1={1:.12g} count_one={2}".format(epsilon, p1, count_one))
    return MeasurementRecord(shots, count_one, epsilon, _probe_trace(state, channel))


def estimate_epsilon(record):
    """eps_hat = count_one / (shots tr[rho rho']) with its binomial variance and the QCRB."""
    trace = record.trace_rho_rhoprime
    if trace <= 0.0:
        raise DimensionError("tr[rho rho'] = {0:.3g}; the estimator is undefined".format(trace))
    shots = record.shots
    p_hat = record.count_one / shots
    if record.count_one == 0:
        logger.warning("No decay events in {0} shots; sample variance is zero".format(shots))
    return EstimationReport(epsilon_hat=p_hat / trace,
                            sample_variance=p_hat * (1.0 - p_hat) / (shots * trace ** 2),
                            qcrb_bound=record.epsilon_true / (trace * shots))


def classical_fisher(probs, dprobs, tol=1e-12):
    """sum_x dprobs_x^2 / probs_x over the support of probs."""
    probs = np.asarray(probs, dtype=float)
    dprobs = np.asarray(dprobs, dtype=float)
    if probs.shape != dprobs.shape:
        raise DimensionError("probs and dprobs differ in shape: {0} vs {1}".format(probs.shape, dprobs.shape))
    if np.any(probs < -tol) or abs(probs.sum() - 1.0) > 1e-10:
        raise ValueError("probs must be nonnegative and sum to 1")
    if abs(dprobs.sum()) > 1e-10:
        raise ValueError("dprobs must sum to 0, got {0:.3g}".format(dprobs.sum()))
    support = probs > tol
    if np.any(np.abs(dprobs[~support]) > tol):
        raise SupportError("dprobs is nonzero where probs vanishes")
    return float(np.sum(dprobs[support] ** 2 / probs[support]))


def povm_fisher(state, epsilon, channel=None):
    """Classical Fisher information of {rho, 1 - rho} on rho_eps."""
    spec = _probe_channel(state, epsilon, channel)
    rho = state.density()
    survival = float(np.real(np.vdot(rho.matrix, spec.apply(rho).matrix)))
    slope = float(np.real(np.vdot(rho.matrix, spec.derivative(rho))))
    return classical_fisher([survival, 1.0 - survival], [slope, -slope])


def replicate_estimates(state, epsilon, shots, runs, seed, channel=None, n_jobs=1):
    """eps_hat for ``runs`` independent records; run i uses child seed i of ``seed``."""
    runs = int(runs)
    if runs < 1:
        raise ValueError("runs must be >= 1, got {0}".format(runs))
    p1 = decay_probability(state, epsilon, channel)
    trace = _probe_trace(state, channel)
    seeds = spawn_seeds(seed, runs)

    def run(run_seed):
        count_one = np.random.default_rng(run_seed).binomial(int(shots), p1)
        return estimate_epsilon(MeasurementRecord(shots, count_one, epsilon, trace)).epsilon_hat

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            estimates = list(pool.map(run, seeds))
    else:
        estimates = [run(s) for s in seeds]
    return np.array(estimates)


def estimation_summary(state, epsilon, shots, runs, seed, channel=None, n_jobs=1):
    """Mean and variance of eps_hat over replicates, against the QCRB and J(rho_eps)."""
    if int(runs) < 2:
        raise ValueError("At least 2 runs are needed for a variance, got {0}".format(runs))
    estimates = replicate_estimates(state, epsilon, shots, runs, seed, channel, n_jobs)
    spec = _probe_channel(state, epsilon, channel)
    qfi = qfi_at(state, spec).qfi
    trace = _probe_trace(state, channel)
    shots = int(shots)
    mean = float(np.mean(estimates))
    variance = float(np.var(estimates, ddof=1))
    bound = epsilon / (trace * shots)
    summary = {
        "epsilon": float(epsilon),
        "shots": shots,
        "runs": int(runs),
        "trace_rho_rhoprime": trace,
        "mean_epsilon_hat": mean,
        "standard_error": float(np.sqrt(variance / len(estimates))),
        "variance": variance,
        "qcrb_bound": bound,
        "variance_ratio": variance / bound,
        "qfi": qfi,
        "qcrb_product": variance * shots * qfi,
    }
    logger.info("eps={0:.6g} shots={1} runs={2}: mean={3:.6g} var={4:.6g} var*shots*J={5:.6g}".format(
        epsilon, shots, runs, mean, variance, summary["qcrb_product"]))
    return summary


def qcrb_gap(state, epsilon, shots, runs, seed, channel=None, n_jobs=1):
    """Empirical Var[eps_hat] * shots * J(rho_eps).

    The O(eps^2) bias of eps_hat bounds this from below by the squared slope
    of E[eps_hat] rather than by 1; the two agree as eps -> 0.
    """
    return estimation_summary(state, epsilon, shots, runs, seed, channel, n_jobs)["qcrb_product"]
