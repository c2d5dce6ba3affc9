import logging
import os
import sys
import tempfile

import numpy as np
import pandas as pd
import simplejson as json

from depol_entanglement.exceptions import StateFileError
from depol_entanglement.states import (DensityState, PartitionedPureState,
                                       named_state, werner_state)

CURVE_COLUMNS = ["epsilon", "qfi", "regularized_qfi"]
FLOAT_FORMAT = '%.12g'

logger = logging.getLogger('depol_entanglement')


def _complex_entries(values, where):
    entries = []
    for value in values:
        if isinstance(value, (list, tuple)):
            if len(value) != 2:
                raise StateFileError("{0}: complex entries are [re, im] pairs, got {1}".format(where, value))
            try:
                entries.append(complex(float(value[0]), float(value[1])))
            except (TypeError, ValueError):
                raise StateFileError("{0}: cannot read {1!r} as a number".format(where, value))
        elif isinstance(value, (int, float)) and not isinstance(value, bool):
            entries.append(complex(float(value), 0.0))
        else:
            raise StateFileError("{0}: cannot read {1!r} as a number".format(where, value))
    return entries


def _dims(description):
    dims = description.get("dims")
    if not isinstance(dims, list) or not all(isinstance(d, int) for d in dims):
        raise StateFileError("'dims' must be a list of integers")
    return dims


def load_state_description(path):
    """Raw JSON object of a state file."""
    try:
        with open(path) as handle:
            description = json.load(handle)
    except (OSError, IOError) as e:
        raise StateFileError("Cannot read state file {0}: {1}".format(path, e))
    except json.JSONDecodeError as e:
        raise StateFileError("State file {0} is not valid JSON: {1}".format(path, e))
    if not isinstance(description, dict):
        raise StateFileError("State file {0} must hold a JSON object".format(path))
    return description


def _named(description):
    name = description["named"]
    if name == "werner":
        if "w" not in description:
            raise StateFileError("Werner state needs 'w'")
        return werner_state(description["w"])
    if "n" not in description:
        raise StateFileError("Named state {0} needs 'n'".format(name))
    return named_state(name, description["n"], description.get("mu1", 0.5))


def state_from_description(description):
    """Build a validated state from one of the four state-file layouts.

    {"named": "ghz"|"w"|"product", "n": 3, "mu1": 0.5}
    {"named": "werner", "w": 0.9}
    {"dims": [...], "amplitudes": [[re, im], ...]}
    {"dims": [...], "matrix": [[[re, im], ...], ...]}
    """
    if "named" in description:
        try:
            return _named(description)
        except (TypeError, ValueError) as e:
            if getattr(e, "exit_code", None) is not None:
                raise
            raise StateFileError(str(e))
    if "amplitudes" in description:
        dims = _dims(description)
        if not isinstance(description["amplitudes"], list):
            raise StateFileError("'amplitudes' must be a list")
        return PartitionedPureState(dims, _complex_entries(description["amplitudes"], "amplitudes"))
    if "matrix" in description:
        dims = _dims(description)
        rows = description["matrix"]
        if not isinstance(rows, list) or not all(isinstance(row, list) for row in rows):
            raise StateFileError("'matrix' must be a list of rows")
        matrix = [_complex_entries(row, "matrix row {0}".format(i)) for i, row in enumerate(rows)]
        lengths = set(len(row) for row in matrix)
        if len(lengths) > 1:
            raise StateFileError("'matrix' rows differ in length: {0}".format(sorted(lengths)))
        return DensityState(dims, np.array(matrix))
    raise StateFileError("State file needs one of 'named', 'amplitudes' or 'matrix'")


def parse_state_file(path):
    return state_from_description(load_state_description(path))


def state_to_description(state):
    """Inverse of ``state_from_description`` for explicit states."""
    if isinstance(state, PartitionedPureState):
        return {"dims": list(state.dims),
                "amplitudes": [[float(a.real), float(a.imag)] for a in state.amplitudes]}
    return {"dims": list(state.dims),
            "matrix": [[[float(a.real), float(a.imag)] for a in row] for row in state.matrix]}


def curve_frame(points):
    return pd.DataFrame([point.as_row() for point in points], columns=CURVE_COLUMNS)


def _atomic_write(path, write):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp_", suffix=os.path.basename(path))
    os.close(fd)
    try:
        write(tmp_path)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def write_csv(frame, path=None):
    """Write with 12 significant digits; stdout when ``path`` is None."""
    if path is None:
        sys.stdout.write(frame.to_csv(index=False, float_format=FLOAT_FORMAT))
        return
    _atomic_write(path, lambda tmp: frame.to_csv(tmp, index=False, float_format=FLOAT_FORMAT))


def _dump(obj, handle):
    json.dump(obj, handle, indent=2, sort_keys=True, ignore_nan=True)
    handle.write("\n")


def write_json(obj, path=None):
    if path is None:
        _dump(obj, sys.stdout)
        return

    def write(tmp):
        with open(tmp, "w") as handle:
            _dump(obj, handle)

    _atomic_write(path, write)


def sweep_path(path, mu1):
    """``curve.csv`` -> ``curve_mu1_0.75.csv``."""
    stem, ext = os.path.splitext(path)
    return "{0}_mu1_{1:g}{2}".format(stem, mu1, ext or ".csv")


class DataManager():
    """Execution directory of a run: holds its log, and writes its results."""

    def __init__(self, exec_dir=None):
        if exec_dir is None:
            self.exec_dir = tempfile.mkdtemp()
        else:
            self.exec_dir = exec_dir
            os.makedirs(self.exec_dir, exist_ok=True)

    @property
    def log_path(self):
        return os.path.join(self.exec_dir, "run.log")

    def save_curve(self, points, path=None):
        write_csv(curve_frame(points), path)
        logger.info("Wrote {0} curve points to {1}".format(len(points), path or "stdout"))

    def save_table(self, rows, columns, path=None):
        write_csv(pd.DataFrame(rows, columns=columns), path)
        logger.info("Wrote {0} rows to {1}".format(len(rows), path or "stdout"))

    def save_report(self, report, path=None):
        write_json(report, path)
        logger.info("Wrote report to {0}".format(path or "stdout"))
