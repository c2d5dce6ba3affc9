"""Command-line front end.

    depol-entanglement measure   --state ghz.json --subsets all-proper
    depol-entanglement curve     --state ghz.json --mu1 0.5 0.75 1 --eps-min 1e-4 --eps-max 0.5 --out curve.csv
    depol-entanglement estimate  --state ghz.json --epsilon 0.01 --shots 100000 --runs 200 --seed 7
    depol-entanglement roof      --state werner.json --restarts 20 --seed 1
    depol-entanglement channel-cp --dim 2 --epsilon 0.6667
    depol-entanglement two-copy  --state w.json

Party indices in --subsets and --channel are 0-based, e.g. "0,1;1,2".
"""

import argparse
import logging
import sys

import numpy as np

from depol_entanglement import __version__
from depol_entanglement.channels import (ALL_LOCAL, DepolarizingSpec,
                                         choi_cp_check)
from depol_entanglement.convex_roof import (RoofConfig, convex_roof_minimize,
                                            wootters_concurrence)
from depol_entanglement.data_manager import (DataManager,
                                             load_state_description,
                                             state_from_description,
                                             sweep_path)
from depol_entanglement.estimator import estimation_summary
from depol_entanglement.exceptions import (ConvergenceError,
                                           DepolEntanglementError,
                                           DimensionError, StateFileError)
from depol_entanglement.measures import (ALL_PROPER, SINGLES,
                                         LinearEntropyMeasure,
                                         mw_normalization, partition_measure,
                                         resolve_family, two_copy_expectation)
from depol_entanglement.qfi import qfi_limit_pure, regularized_qfi_curve
from depol_entanglement.states import PartitionedPureState
from depol_entanglement.util import linear_grid

SUBCOMMANDS = ("measure", "curve", "estimate", "roof", "channel-cp", "two-copy")
LOGGER_NAMES = ('depol_entanglement', 'channels', 'qfi', 'roof', 'estimator')
ROOF_DIMENSION_CAP = 16
ESTIMATE_COLUMNS = ["epsilon", "shots", "runs", "trace_rho_rhoprime", "mean_epsilon_hat", "standard_error",
                    "variance", "qcrb_bound", "variance_ratio", "qfi", "qcrb_product"]

logger = logging.getLogger('depol_entanglement')


def parse_subsets(text):
    """"singles", "all-proper", or explicit subsets such as "0,1;1,2"."""
    if text in (SINGLES, ALL_PROPER):
        return text
    try:
        return [[int(i) for i in group.split(",")] for group in text.split(";") if group.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("Cannot read subsets {0!r}; use singles, all-proper or 0,1;1,2".format(text))


def parse_channel(text):
    if text == ALL_LOCAL:
        return text
    subsets = parse_subsets(text)
    if isinstance(subsets, str):
        raise argparse.ArgumentTypeError("--channel takes all-local or explicit subsets")
    return subsets


class RunConfig():
    """Settings of one command-line run, taken from the parsed arguments."""

    def __init__(self, subcommand, state_path=None, eps_min=1e-4, eps_max=0.5, steps=200, log_grid=False,
                 subsets=SINGLES, shots=100000, runs=200, seed=0, restarts=20, max_iters=2000,
                 ensemble_size=None, out_path=None, epsilon=None, dim=2, mu1=None, channel=ALL_LOCAL,
                 n_jobs=1, exec_dir=None, verbose=False):
        if subcommand not in SUBCOMMANDS:
            raise ValueError("Unknown subcommand {0}".format(subcommand))
        self.subcommand = subcommand
        self.state_path = state_path
        self.eps_min = eps_min
        self.eps_max = eps_max
        self.steps = steps
        self.log_grid = log_grid
        self.subsets = subsets
        self.shots = shots
        self.runs = runs
        self.seed = seed
        self.restarts = restarts
        self.max_iters = max_iters
        self.ensemble_size = ensemble_size
        self.out_path = out_path
        self.epsilon = epsilon
        self.dim = dim
        self.mu1 = mu1
        self.channel = channel
        self.n_jobs = n_jobs
        self.exec_dir = exec_dir
        self.verbose = verbose
        self._check()

    def _check(self):
        if self.subcommand != "channel-cp" and self.state_path is None:
            raise ValueError("{0} needs --state".format(self.subcommand))
        if self.subcommand == "curve":
            if self.steps < 2:
                raise ValueError("--steps must be >= 2, got {0}".format(self.steps))
            if not 0.0 < self.eps_min < self.eps_max:
                raise ValueError("Need 0 < --eps-min < --eps-max, got {0} and {1}".format(self.eps_min, self.eps_max))
        if self.subcommand in ("estimate", "channel-cp") and self.epsilon is None:
            raise ValueError("{0} needs --epsilon".format(self.subcommand))
        if self.subcommand == "estimate" and (self.shots < 1 or self.runs < 2):
            raise ValueError("estimate needs --shots >= 1 and --runs >= 2")

    @classmethod
    def from_args(cls, args):
        return cls(args.subcommand,
                   state_path=getattr(args, "state", None),
                   eps_min=getattr(args, "eps_min", 1e-4),
                   eps_max=getattr(args, "eps_max", 0.5),
                   steps=getattr(args, "steps", 200),
                   log_grid=getattr(args, "log_grid", False),
                   subsets=getattr(args, "subsets", SINGLES),
                   shots=getattr(args, "shots", 100000),
                   runs=getattr(args, "runs", 200),
                   seed=args.seed,
                   restarts=getattr(args, "restarts", 20),
                   max_iters=getattr(args, "max_iters", 2000),
                   ensemble_size=getattr(args, "ensemble_size", None),
                   out_path=args.out,
                   epsilon=getattr(args, "epsilon", None),
                   dim=getattr(args, "dim", 2),
                   mu1=getattr(args, "mu1", None),
                   channel=getattr(args, "channel", ALL_LOCAL),
                   n_jobs=args.jobs,
                   exec_dir=args.exec_dir,
                   verbose=args.verbose)

    def roof_config(self):
        return RoofConfig(ensemble_size=self.ensemble_size, restarts=self.restarts, max_iters=self.max_iters,
                          seed=self.seed, n_jobs=self.n_jobs)

    def channel_spec(self):
        return DepolarizingSpec(self.channel)


def setup_logger(data_manager, verbose=False):
    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)-8s [%(filename)s:%(lineno)d] %(message)s')
    handlers = []
    hdlr_file = logging.FileHandler(data_manager.log_path, mode='w')
    hdlr_file.setFormatter(formatter)
    handlers.append(hdlr_file)
    if verbose:
        handler = logging.StreamHandler(sys.stdout)
        handler.setLevel(logging.DEBUG)
        handler.setFormatter(formatter)
        handlers.append(handler)
    for name in LOGGER_NAMES:
        log = logging.getLogger(name)
        for old in list(log.handlers):
            log.removeHandler(old)
            old.close()
        log.setLevel(logging.DEBUG if verbose else logging.INFO)
        for handler in handlers:
            log.addHandler(handler)
    return handlers


def _roof_report(state, config, subsets):
    if state.dims.total_dim > ROOF_DIMENSION_CAP:
        raise DimensionError("Convex roof is limited to total dimension {0}, got {1}".format(
            ROOF_DIMENSION_CAP, state.dims.total_dim))
    family = resolve_family(state.dims, subsets)
    result = convex_roof_minimize(state, LinearEntropyMeasure(subsets), config.roof_config())
    report = {
        "roof_value": result["value"],
        "converged": result["converged"],
        "upper_bound": result["upper_bound"],
        "rank": result["rank"],
        "ensemble_size": result["ensemble_size"],
        "restarts": result["restarts"],
        "best_restart": result["best_restart"],
        "note": result["note"],
        "constant_K": float(sum(1 - alpha.d_alpha for alpha in family)),
        "subsets": [list(alpha.indices) for alpha in family],
    }
    if tuple(state.dims) == (2, 2):
        concurrence = wootters_concurrence(state)
        report["wootters_concurrence"] = concurrence
        report["wootters_tangle"] = concurrence ** 2
    return report


def cmd_measure(config, data_manager):
    state = state_from_description(load_state_description(config.state_path))
    if isinstance(state, PartitionedPureState):
        result = partition_measure(state, config.subsets)
        report = result.as_dict()
        report["trace_rho_rhoprime"] = qfi_limit_pure(state, result.subsets)
        if config.subsets == SINGLES:
            report["normalized"] = mw_normalization(state.n_parties) * result.value
    else:
        report = _roof_report(state, config, config.subsets)
    data_manager.save_report(report, config.out_path)
    return report


def cmd_roof(config, data_manager):
    state = state_from_description(load_state_description(config.state_path))
    report = _roof_report(state, config, config.subsets)
    data_manager.save_report(report, config.out_path)
    if not report["converged"]:
        raise ConvergenceError("Roof minimization did not converge within {0} iterations; best value {1:.12g}".format(
            config.max_iters, report["roof_value"]))
    return report


def _curve_states(config):
    description = load_state_description(config.state_path)
    if not config.mu1:
        return [(None, state_from_description(description))]
    if "named" not in description:
        raise StateFileError("--mu1 sweeps need a named state file")
    states = []
    for mu1 in config.mu1:
        swept = dict(description)
        swept["mu1"] = mu1
        states.append((mu1, state_from_description(swept)))
    return states


def cmd_curve(config, data_manager):
    grid = np.sort(linear_grid(config.eps_min, config.eps_max, config.steps, log=config.log_grid))
    spec = config.channel_spec()
    written = []
    for mu1, state in _curve_states(config):
        points = regularized_qfi_curve(state, grid, channel=spec, n_jobs=config.n_jobs)
        path = config.out_path
        if mu1 is not None and path is not None and len(config.mu1) > 1:
            path = sweep_path(path, mu1)
        data_manager.save_curve(points, path)
        written.append(path)
    return written


def cmd_estimate(config, data_manager):
    state = state_from_description(load_state_description(config.state_path))
    if not isinstance(state, PartitionedPureState):
        raise DimensionError("estimate needs a pure probe state")
    spec = config.channel_spec()
    summary = estimation_summary(state, config.epsilon, config.shots, config.runs, config.seed,
                                 channel=spec, n_jobs=config.n_jobs)
    data_manager.save_table([summary], ESTIMATE_COLUMNS, config.out_path)
    return summary


def cmd_channel_cp(config, data_manager):
    d, epsilon = int(config.dim), float(config.epsilon)
    check = choi_cp_check(d, epsilon)
    report = {
        "dim": d,
        "epsilon": epsilon,
        "min_eigenvalue": check["min_eigenvalue"],
        "closed_form": min(1.0 - d * epsilon + epsilon / d, epsilon / d),
        "is_cp": bool(check["is_cp"]),
        "cp_bound": d / (d * d - 1.0),
    }
    data_manager.save_report(report, config.out_path)
    return report


def cmd_two_copy(config, data_manager):
    state = state_from_description(load_state_description(config.state_path))
    if not isinstance(state, PartitionedPureState):
        raise DimensionError("two-copy needs a pure state")
    result = two_copy_expectation(state)
    report = result.as_dict()
    report["meyer_wallach"] = partition_measure(state, SINGLES).value
    data_manager.save_report(report, config.out_path)
    return report


COMMANDS = {
    "measure": cmd_measure,
    "curve": cmd_curve,
    "estimate": cmd_estimate,
    "roof": cmd_roof,
    "channel-cp": cmd_channel_cp,
    "two-copy": cmd_two_copy,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="result file; stdout when absent")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1, help="threads for grids, runs and restarts")
    common.add_argument("--exec-dir", default=None, help="directory for run.log; a fresh temporary one by default")
    common.add_argument("--verbose", action="store_true")

    with_state = argparse.ArgumentParser(add_help=False)
    with_state.add_argument("--state", required=True, help="state JSON file")

    with_subsets = argparse.ArgumentParser(add_help=False)
    with_subsets.add_argument("--subsets", type=parse_subsets, default=SINGLES,
                              help="singles, all-proper or explicit 0-based subsets like 0,1;1,2")

    with_roof = argparse.ArgumentParser(add_help=False)
    with_roof.add_argument("--restarts", type=int, default=20)
    with_roof.add_argument("--max-iters", type=int, default=2000)
    with_roof.add_argument("--ensemble-size", type=int, default=None)

    with_channel = argparse.ArgumentParser(add_help=False)
    with_channel.add_argument("--channel", type=parse_channel, default=ALL_LOCAL,
                              help="all-local or explicit subsets composed in order")

    parser = argparse.ArgumentParser(prog="depol-entanglement",
                                     description="Entanglement from the regularized QFI of depolarizing noise")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand")
    sub.required = True

    sub.add_parser("measure", parents=[common, with_state, with_subsets, with_roof])

    curve = sub.add_parser("curve", parents=[common, with_state, with_channel])
    curve.add_argument("--eps-min", type=float, default=1e-4)
    curve.add_argument("--eps-max", type=float, default=0.5)
    curve.add_argument("--steps", type=int, default=200)
    curve.add_argument("--log-grid", action="store_true")
    curve.add_argument("--mu1", type=float, nargs="+", default=None, help="sweep of a named state family")

    estimate = sub.add_parser("estimate", parents=[common, with_state, with_channel])
    estimate.add_argument("--epsilon", type=float, required=True)
    estimate.add_argument("--shots", type=int, default=100000)
    estimate.add_argument("--runs", type=int, default=200)

    sub.add_parser("roof", parents=[common, with_state, with_subsets, with_roof])

    channel_cp = sub.add_parser("channel-cp", parents=[common])
    channel_cp.add_argument("--dim", type=int, default=2)
    channel_cp.add_argument("--epsilon", type=float, required=True)

    sub.add_parser("two-copy", parents=[common, with_state])
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = RunConfig.from_args(args)
    except ValueError as e:
        parser.error(str(e))

    data_manager = DataManager(config.exec_dir)
    handlers = setup_logger(data_manager, config.verbose)
    try:
        logger.info("depol-entanglement {0}: {1}".format(__version__, config.subcommand))
        COMMANDS[config.subcommand](config, data_manager)
    except DepolEntanglementError as e:
        logger.error(str(e))
        sys.stderr.write("error: {0}\n".format(e))
        return e.exit_code
    except (TypeError, ValueError) as e:
        logger.error(str(e))
        sys.stderr.write("error: {0}\n".format(e))
        return 1
    finally:
        for name in LOGGER_NAMES:
            log = logging.getLogger(name)
            for handler in handlers:
                log.removeHandler(handler)
        for handler in handlers:
            handler.flush()
            handler.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
