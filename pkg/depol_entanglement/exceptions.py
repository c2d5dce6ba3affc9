"""Exceptions raised by the library.

Every exception carries the process exit code the command line maps it to.
"""


class DepolEntanglementError(Exception):
    exit_code = 1


class StateFileError(DepolEntanglementError, ValueError):
    exit_code = 3


class NormalizationError(DepolEntanglementError, ValueError):
    exit_code = 4


class HermiticityError(DepolEntanglementError, ValueError):
    exit_code = 5


class PositivityError(DepolEntanglementError, ValueError):
    exit_code = 6


class TraceError(DepolEntanglementError, ValueError):
    exit_code = 7


class DimensionError(DepolEntanglementError, ValueError):
    exit_code = 8


class EpsilonRangeError(DepolEntanglementError, ValueError):
    exit_code = 9


class SupportError(DepolEntanglementError, ValueError):
    exit_code = 10


class ConvergenceError(DepolEntanglementError):
    exit_code = 11
