import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
NORM_TOL = 1e-12
SUPPORT_TOL = 1e-10
ISOMETRY_TOL = 1e-10


def hermitize(matrix):
    """Return (M + M^dagger) / 2."""
    matrix = np.asarray(matrix, dtype=complex)
    return 0.5 * (matrix + matrix.conj().T)


def frobenius(matrix):
    return float(np.linalg.norm(matrix, "fro"))


def hermitian_deviation(matrix):
    return float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0


def spawn_seeds(seed, n):
    """Independent child seeds derived from (seed, index), index in range(n)."""
    children = np.random.SeedSequence(seed).spawn(n)
    return [int(child.generate_state(1, dtype=np.uint32)[0]) for child in children]


def cp_bound(d):
    """Upper end of the complete-positivity range of a d-dimensional depolarizer."""
    return d / (d * d - 1.0)


def linear_grid(eps_min, eps_max, steps, log=False):
    if log:
        return np.logspace(np.log10(eps_min), np.log10(eps_max), int(steps))
    return np.linspace(eps_min, eps_max, int(steps))
