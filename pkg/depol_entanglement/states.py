"""Partitioned quantum states and the dense linear algebra built on them.

Amplitudes and matrices use party-major ordering: party 0 is the slowest
index of the computational basis.
"""

import numbers
from itertools import combinations

import numpy as np
from scipy.linalg import eigh
from scipy.stats import unitary_group

from depol_entanglement.exceptions import (DimensionError, HermiticityError,
                                           NormalizationError,
                                           PositivityError, TraceError)
from depol_entanglement.util import (HERMITIAN_TOL, NORM_TOL, PSD_TOL,
                                     TRACE_TOL, hermitian_deviation, hermitize)

NAMED_STATES = ("ghz", "w", "product")


class PartyDims():
    """Ordered local dimensions of the parties."""

    def __init__(self, dims):
        if isinstance(dims, PartyDims):
            dims = dims.dims
        dims = tuple(int(d) for d in dims)
        if len(dims) == 0:
            raise DimensionError("Party dimensions must be a nonempty list")
        for j, d in enumerate(dims):
            if d < 2:
                raise DimensionError("Party {0} has dimension {1}; every party needs d >= 2".format(j, d))
        self.dims = dims
        self.total_dim = int(np.prod(dims))

    @property
    def n_parties(self):
        return len(self.dims)

    def subset_dim(self, indices):
        return int(np.prod([self.dims[i] for i in indices])) if len(indices) else 1

    def complement(self, indices):
        indices = set(indices)
        return tuple(i for i in range(self.n_parties) if i not in indices)

    def __len__(self):
        return len(self.dims)

    def __iter__(self):
        return iter(self.dims)

    def __getitem__(self, item):
        return self.dims[item]

    def __eq__(self, other):
        if isinstance(other, PartyDims):
            return self.dims == other.dims
        return self.dims == tuple(other)

    def __hash__(self):
        return hash(self.dims)

    def __repr__(self):
        return "PartyDims({0})".format(list(self.dims))


class PartySubset():
    """Sorted set of party indices together with the dimension it spans."""

    def __init__(self, indices, dims):
        dims = PartyDims(dims)
        indices = tuple(sorted(set(int(i) for i in indices)))
        if len(indices) == 0:
            raise DimensionError("A party subset must not be empty")
        for i in indices:
            if i < 0 or i >= dims.n_parties:
                raise DimensionError(
                    "Party index {0} out of range for {1} parties".format(i, dims.n_parties))
        self.indices = indices
        self.dims = dims
        self.d_alpha = dims.subset_dim(indices)

    @property
    def complement(self):
        return self.dims.complement(self.indices)

    def is_proper(self):
        return len(self.indices) < self.dims.n_parties

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __eq__(self, other):
        if isinstance(other, PartySubset):
            return self.indices == other.indices and self.dims == other.dims
        return NotImplemented

    def __hash__(self):
        return hash((self.indices, self.dims.dims))

    def __repr__(self):
        return "PartySubset({0})".format(list(self.indices))


def as_subset(alpha, dims):
    if isinstance(alpha, PartySubset):
        if alpha.dims != PartyDims(dims):
            raise DimensionError("Subset {0} was built for {1}, not {2}".format(alpha, alpha.dims, dims))
        return alpha
    if isinstance(alpha, numbers.Integral):
        alpha = [alpha]
    return PartySubset(alpha, dims)


def single_subsets(dims):
    dims = PartyDims(dims)
    return [PartySubset([j], dims) for j in range(dims.n_parties)]


def proper_subsets(dims):
    """All nonempty proper subsets, ordered by size then lexicographically."""
    dims = PartyDims(dims)
    n = dims.n_parties
    return [PartySubset(c, dims) for k in range(1, n) for c in combinations(range(n), k)]


class PartitionedPureState():
    def __init__(self, dims, amplitudes, validate=True):
        self.dims = PartyDims(dims)
        amplitudes = np.array(amplitudes, dtype=complex).ravel()
        if amplitudes.size != self.dims.total_dim:
            raise DimensionError("Expected {0} amplitudes for dims {1}, got {2}".format(
                self.dims.total_dim, list(self.dims), amplitudes.size))
        if validate:
            norm = np.linalg.norm(amplitudes)
            if abs(norm - 1.0) > NORM_TOL:
                raise NormalizationError(
                    "Amplitude norm is {0:.15g}; must be 1 within {1}".format(norm, NORM_TOL))
        amplitudes.setflags(write=False)
        self.amplitudes = amplitudes

    @property
    def n_parties(self):
        return self.dims.n_parties

    def tensor(self):
        return self.amplitudes.reshape(self.dims.dims)

    def projector(self):
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self):
        return DensityState(self.dims, self.projector(), validate=False)

    def __repr__(self):
        return "PartitionedPureState(dims={0})".format(list(self.dims))


class DensityState():
    def __init__(self, dims, matrix, validate=True):
        self.dims = PartyDims(dims)
        matrix = np.array(matrix, dtype=complex)
        D = self.dims.total_dim
        if matrix.shape != (D, D):
            raise DimensionError("Expected a {0}x{0} matrix for dims {1}, got shape {2}".format(
                D, list(self.dims), matrix.shape))
        if validate:
            check_density_matrix(matrix)
        matrix.setflags(write=False)
        self.matrix = matrix

    @property
    def n_parties(self):
        return self.dims.n_parties

    def density(self):
        return self

    def rank(self, tol=PSD_TOL):
        return int(np.sum(np.linalg.eigvalsh(self.matrix) > tol))

    def __repr__(self):
        return "DensityState(dims={0})".format(list(self.dims))


def check_density_matrix(matrix):
    deviation = hermitian_deviation(matrix)
    if deviation > HERMITIAN_TOL:
        raise HermiticityError(
            "Matrix is not Hermitian: max |M - M^dagger| = {0:.3g} > {1}".format(deviation, HERMITIAN_TOL))
    trace = np.trace(matrix).real
    if abs(trace - 1.0) > TRACE_TOL:
        raise TraceError("Trace is {0:.15g}; must be 1 within {1}".format(trace, TRACE_TOL))
    lowest = np.linalg.eigvalsh(hermitize(matrix))[0]
    if lowest < -PSD_TOL:
        raise PositivityError(
            "Smallest eigenvalue is {0:.3g} < -{1}".format(lowest, PSD_TOL))


def to_density(state):
    if isinstance(state, PartitionedPureState):
        return state.density()
    if isinstance(state, DensityState):
        return state
    raise TypeError("Expected a PartitionedPureState or DensityState, got {0}".format(type(state)))


def named_state(name, n_parties, mu1=0.5):
    """GHZ, W or product states of qubits.

    ghz: sqrt(mu1)|0...0> + sqrt(1 - mu1)|1...1>
    w: mu1 on the excitation of party 0 and mu2 = sqrt((1 - mu1^2)/(n - 1))
       on every other single excitation
    product: |0...0> whatever mu1 is
    """
    if name not in NAMED_STATES:
        raise ValueError("Unknown named state {0}; choose from {1}".format(name, NAMED_STATES))
    n_parties = int(n_parties)
    if n_parties < 2:
        raise DimensionError("Named states need at least 2 parties, got {0}".format(n_parties))
    mu1 = float(mu1)
    if not 0.0 <= mu1 <= 1.0:
        raise ValueError("mu1 must lie in [0, 1], got {0}".format(mu1))

    dims = PartyDims([2] * n_parties)
    amplitudes = np.zeros(dims.total_dim, dtype=complex)
    if name == "ghz":
        amplitudes[0] = np.sqrt(mu1)
        amplitudes[-1] = np.sqrt(1.0 - mu1)
    elif name == "w":
        mu2 = np.sqrt((1.0 - mu1 ** 2) / (n_parties - 1))
        for j in range(n_parties):
            amplitudes[2 ** (n_parties - 1 - j)] = mu1 if j == 0 else mu2
    else:
        amplitudes[0] = 1.0
    return PartitionedPureState(dims, amplitudes)


def werner_state(w):
    """w |psi-><psi-| + (1 - w) 1/4 on two qubits."""
    w = float(w)
    if not -1.0 / 3.0 <= w <= 1.0:
        raise ValueError("Werner parameter must lie in [-1/3, 1], got {0}".format(w))
    singlet = np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / np.sqrt(2.0)
    matrix = w * np.outer(singlet, singlet.conj()) + (1.0 - w) * np.eye(4) / 4.0
    return DensityState([2, 2], matrix)


def mixture(weights, states):
    weights = np.asarray(weights, dtype=float)
    if len(weights) != len(states) or len(states) == 0:
        raise ValueError("Need one weight per state")
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-10:
        raise ValueError("Mixture weights must be nonnegative and sum to 1")
    dims = states[0].dims
    matrix = np.zeros((dims.total_dim, dims.total_dim), dtype=complex)
    for p, state in zip(weights, states):
        if state.dims != dims:
            raise DimensionError("Cannot mix states with dims {0} and {1}".format(dims, state.dims))
        matrix += p * to_density(state).matrix
    return DensityState(dims, hermitize(matrix))


def ptrace_matrix(matrix, dims, keep):
    """Reduced matrix on the parties in ``keep`` (returned in ascending order).

    With ``keep`` empty the result is the 1x1 matrix [[tr M]].
    """
    dims = tuple(dims)
    n = len(dims)
    keep = sorted(keep)
    tensor = np.asarray(matrix).reshape(dims + dims)
    row = list(range(n))
    col = [n + j if j in keep else j for j in range(n)]
    out = [j for j in keep] + [n + j for j in keep]
    reduced = np.einsum(tensor, row + col, out)
    d_keep = int(np.prod([dims[j] for j in keep])) if keep else 1
    return reduced.reshape(d_keep, d_keep)


def embed_identity(reduced, dims, alpha):
    """Place the identity on the parties ``alpha`` and ``reduced`` on the rest."""
    dims = tuple(dims)
    n = len(dims)
    alpha = sorted(alpha)
    rest = [j for j in range(n) if j not in alpha]
    d_alpha = int(np.prod([dims[j] for j in alpha]))
    perm = alpha + rest
    full = np.kron(np.eye(d_alpha), reduced).reshape([dims[j] for j in perm] * 2)
    inverse = list(np.argsort(perm))
    full = full.transpose(inverse + [n + i for i in inverse])
    D = int(np.prod(dims))
    return full.reshape(D, D)


def partial_trace(rho, traced):
    """Trace out the parties in ``traced``.

    Tracing every party returns the scalar trace as a float.
    """
    rho = to_density(rho)
    subset = as_subset(traced, rho.dims)
    keep = subset.complement
    if len(keep) == 0:
        return float(np.trace(rho.matrix).real)
    reduced = ptrace_matrix(rho.matrix, rho.dims.dims, keep)
    return DensityState([rho.dims[j] for j in keep], hermitize(reduced), validate=False)


def reduced_state(state, keep):
    """Marginal on the parties ``keep``."""
    rho = to_density(state)
    subset = as_subset(keep, rho.dims)
    if not subset.is_proper():
        return rho
    return partial_trace(rho, subset.complement)


def purity(rho):
    matrix = rho.matrix if isinstance(rho, DensityState) else np.asarray(rho)
    return float(np.real(np.vdot(matrix, matrix)))


def psd_sqrt(matrix):
    values, vectors = eigh(hermitize(matrix))
    values = np.clip(values, 0.0, None)
    return (vectors * np.sqrt(values)) @ vectors.conj().T


def fidelity(rho, sigma):
    """tr sqrt(sqrt(sigma) rho sqrt(sigma))."""
    rho, sigma = to_density(rho), to_density(sigma)
    if rho.dims != sigma.dims:
        raise DimensionError("Fidelity between dims {0} and {1}".format(rho.dims, sigma.dims))
    root = psd_sqrt(sigma.matrix)
    inner = hermitize(root @ rho.matrix @ root)
    values = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(min(np.sum(np.sqrt(values)), 1.0))


def tensor_product(a, b):
    if isinstance(b, numbers.Number):
        _check_trivial(b)
        return a
    if isinstance(a, numbers.Number):
        _check_trivial(a)
        return b
    a, b = to_density(a), to_density(b)
    return DensityState(list(a.dims) + list(b.dims), np.kron(a.matrix, b.matrix), validate=False)


def _check_trivial(value):
    if abs(value - 1.0) > TRACE_TOL:
        raise TraceError("A one-dimensional state must equal 1, got {0}".format(value))


def random_pure_state(dims, seed):
    """Haar-random pure state from normalized complex Gaussian amplitudes."""
    dims = PartyDims(dims)
    rng = np.random.default_rng(seed)
    vector = rng.standard_normal(dims.total_dim) + 1j * rng.standard_normal(dims.total_dim)
    return PartitionedPureState(dims, vector / np.linalg.norm(vector))


def random_density_state(dims, rank, seed):
    """Ginibre-distributed mixed state of the given rank."""
    dims = PartyDims(dims)
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dims.total_dim, rank)) + 1j * rng.standard_normal((dims.total_dim, rank))
    matrix = g @ g.conj().T
    return DensityState(dims, hermitize(matrix / np.trace(matrix).real))


def random_local_unitary(dims, seed):
    """U_1 x ... x U_n with Haar-random factors."""
    dims = PartyDims(dims)
    rng = np.random.default_rng(seed)
    unitary = np.ones((1, 1), dtype=complex)
    for d in dims:
        unitary = np.kron(unitary, unitary_group.rvs(d, random_state=rng))
    return unitary


def apply_unitary(state, unitary):
    if isinstance(state, PartitionedPureState):
        return PartitionedPureState(state.dims, unitary @ state.amplitudes, validate=False)
    rho = to_density(state)
    return DensityState(rho.dims, hermitize(unitary @ rho.matrix @ unitary.conj().T), validate=False)
