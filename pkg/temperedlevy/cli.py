"""Batch command-line front end."""
import argparse
import json
import os
import sys
from dataclasses import asdict
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from loguru import logger

from . import __version__, analytics
from .constants import DEFAULT_SEED, REFINEMENT, THREADS, TRUNCATION_TOLERANCE
from .exceptions import (
    LagMisalignedError,
    MissingSettingError,
    NumericToleranceError,
    ParameterError,
    ParsingException,
)
from .helpers.data import parse_range, read_table, write_table
from .helpers.parsers import parse_config_file
from .levy_driver import LevyDriverSpec, SampleGrid
from .process_sim import (
    NOISE_OF,
    PATH_KIND_MAPPINGS,
    SIMULATOR_FACTORY,
    SamplePath,
    TemperedParams,
    holder_exponent,
    noise_path,
    simulate_ensemble,
    simulate_smooth_regime,
    structure_exponent,
)
from .verification import BUDGET_MAPPINGS, SUITES, results_table, run_suite

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_PARAMETER = 3
EXIT_NUMERIC = 4
EXIT_PARSING = 5

DEFAULTS: Dict[str, Dict[str, Any]] = {
    "simulate": {
        "kind": "tflp1",
        "driver": "cpois",
        "tmax": 10.0,
        "n": 1024,
        "ensemble": 1,
        "seed": DEFAULT_SEED,
        "refinement": REFINEMENT,
        "trunc_width": 0.0,
        "tolerance": TRUNCATION_TOLERANCE,
        "smooth": False,
        "threads": THREADS,
        "out": "path.csv",
    },
    "analytic": {
        "el2": 1.0,
        "s": 1.0,
        "t": "0:10:0.1",
        "h": "1:50:1",
        "omega": "0:10:0.01",
        "method": "auto",
        "out": "curve.csv",
    },
    "estimate": {"max_lag": 50, "segment": 256, "out": "estimate.csv"},
    "verify": {"suite": "all", "budget": "quick", "seed": DEFAULT_SEED, "n": 0},
}

POSITIONALS = {"simulate": "kind", "analytic": "curve", "estimate": "task", "verify": "suite"}


def _require(config: Dict[str, Any], key: str) -> Any:
    if config.get(key) is None:
        raise MissingSettingError(key)
    return config[key]


def _params(config: Dict[str, Any]) -> TemperedParams:
    return TemperedParams(float(_require(config, "d")), float(_require(config, "lambda")))


def _stem(filepath: str) -> str:
    return os.path.splitext(filepath)[0]


def write_manifest(command: str, config: Dict[str, Any], outputs: List[str]) -> str:
    """
    Write the JSON manifest echoing a resolved configuration.

    Args:
        command (str): sub-command.
        config (Dict[str, Any]): resolved configuration.
        outputs (List[str]): files produced by the run.

    Returns:
        str: path of the manifest.
    """
    out = config.get("out") or f"{command}.csv"
    manifest = f"{_stem(out)}.manifest.json"
    with open(manifest, "w") as fp:
        json.dump(
            {"command": command, "config": config, "outputs": outputs, "version": __version__},
            fp,
            indent=2,
            sort_keys=True,
        )
    return manifest


def _simulate_one(
    config: Dict[str, Any],
    params: TemperedParams,
    driver: LevyDriverSpec,
    seed: int,
) -> SamplePath:
    kind = PATH_KIND_MAPPINGS.get(str(config["kind"]).lower())
    if kind is None:
        raise ParameterError(f"Kind [{config['kind']}] is not supported.")
    process_kind = {noise: process for process, noise in NOISE_OF.items()}.get(kind, kind)
    tmax, n_cells = float(config["tmax"]), int(config["n"])
    grid = SampleGrid(0.0, tmax, n_cells)
    lag_cells = n_cells / tmax
    if process_kind != kind:
        if abs(lag_cells - round(lag_cells)) > 1e-9 * lag_cells:
            raise LagMisalignedError(1.0, grid.dx)
        grid = SampleGrid(0.0, tmax + 1.0, n_cells + int(round(lag_cells)))
    options = dict(
        trunc_width=float(config["trunc_width"]),
        seed=seed,
        refinement=int(config["refinement"]),
        tolerance=float(config["tolerance"]),
    )
    if config["smooth"]:
        path = simulate_smooth_regime(params, grid, driver, kind=process_kind, **options)
    else:
        path = SIMULATOR_FACTORY[process_kind](params, grid, driver, **options)
    return noise_path(path, 1.0) if process_kind != kind else path


def cmd_simulate(config: Dict[str, Any]) -> List[str]:
    """
    Simulate one path, or an ensemble written as a wide CSV.

    Args:
        config (Dict[str, Any]): resolved configuration.

    Returns:
        List[str]: written files.
    """
    params = _params(config)
    driver = LevyDriverSpec.from_config(config)
    config.update(driver.to_config())
    out = str(config["out"])
    if int(config["ensemble"]) == 1:
        path = _simulate_one(config, params, driver, int(config["seed"]))
        sidecar = path.to_csv(out)
        logger.info(f"Path written to {out}")
        return [out, sidecar]

    def simulator(seed: int) -> SamplePath:
        return _simulate_one(config, params, driver, seed)

    paths = simulate_ensemble(
        simulator, int(config["ensemble"]), int(config["seed"]), int(config["threads"])
    )
    times = SampleGrid(0.0, float(config["tmax"]), int(config["n"])).points
    columns = {f"path_{index}": row for index, row in enumerate(paths)}
    table = pd.DataFrame({"t": times, **columns})
    write_table(table, out, units=["time"] + ["value"] * paths.shape[0])
    logger.info(f"Ensemble of {paths.shape[0]} paths written to {out}")
    return [out]


def _cov2_curve(params: TemperedParams, s: float, times: np.ndarray, el2: float) -> np.ndarray:
    return np.array([analytics.cov_tflp2(params, s, t, el2) for t in times])


def cmd_analytic(config: Dict[str, Any]) -> List[str]:
    """
    Tabulate an analytic curve.

    Args:
        config (Dict[str, Any]): resolved configuration.

    Returns:
        List[str]: written files.
    """
    curve = str(_require(config, "curve")).lower()
    params = _params(config)
    el2 = float(config["el2"])
    out = str(config["out"])
    if curve in ("cov1", "cov2"):
        times = parse_range(str(config["t"]))
        s = float(config["s"])
        values = (
            np.asarray(analytics.cov_tflp1(params, s, times, el2))
            if curve == "cov1"
            else _cov2_curve(params, s, times, el2)
        )
        table = pd.DataFrame({"t": times, "cov": values})
        units = ["time", "value^2"]
    elif curve == "varlimit":
        value = analytics.var_limit_tflp1(params, el2)
        print(f"{value:.17g}")
        table = pd.DataFrame({"value": [value]})
        units = ["value^2"]
    elif curve in ("acvf1", "acvf2"):
        lags = parse_range(str(config["h"]))
        if curve == "acvf1":
            table = pd.DataFrame(
                {
                    "h": lags,
                    "gamma": analytics.acvf_tfln1(params, lags, el2),
                    "asymptotic": analytics.acvf_tfln1_asymptotic(
                        params, lags, el2, corrected=True
                    ),
                }
            )
            units = ["lag", "value^2", "value^2"]
        else:
            gamma = analytics.acvf_tfln2(params, lags, el2, str(config["method"]))
            table = pd.DataFrame({"h": lags, "gamma": gamma})
            units = ["lag", "value^2"]
    elif curve == "acvf2band":
        lags = parse_range(str(config["h"]))
        lags = lags[lags > 0]
        lower, upper = analytics.acvf_tfln2_asymptotic_band(params, lags, el2)
        table = pd.DataFrame(
            {
                "h": lags,
                "gamma": analytics.acvf_tfln2(params, lags, el2),
                "lower": lower,
                "upper": upper,
            }
        )
        units = ["lag", "value^2", "value^2", "value^2"]
    elif curve in ("spec1", "spec2"):
        omega = parse_range(str(config["omega"]))
        density = analytics.spec_density_tfln1 if curve == "spec1" else analytics.spec_density_tfln2
        table = pd.DataFrame(
            {
                "omega": omega,
                "density": density(params, omega),
                "two_sided": density(params, omega, el2),
            }
        )
        units = ["rad/time", "value^2*time", "value^2*time"]
    else:
        raise ParameterError(f"Curve [{curve}] is not supported.")
    write_table(table, out, units=units)
    return [out]


def _read_series(config: Dict[str, Any]) -> pd.DataFrame:
    table, _ = read_table(str(_require(config, "input")))
    if table.shape[1] < 2:
        raise ParsingException("Expected at least two columns.", line_number=1)
    return table


def _write_json(record: Dict[str, Any], out: str) -> str:
    target = out if out.endswith(".json") else f"{_stem(out)}.json"
    with open(target, "w") as fp:
        json.dump(record, fp, indent=2, sort_keys=True)
    return target


def cmd_estimate(config: Dict[str, Any]) -> List[str]:
    """
    Run an estimator on a (t, value) or (h, gamma) table.

    Args:
        config (Dict[str, Any]): resolved configuration.

    Returns:
        List[str]: written files.
    """
    task = str(_require(config, "task")).lower()
    table = _read_series(config)
    first, values = table.iloc[:, 0].to_numpy(), table.iloc[:, 1].to_numpy()
    out = str(config["out"])
    if task == "acvf":
        max_lag = int(config["max_lag"])
        acvf = analytics.empirical_acvf(values, max_lag)
        table = pd.DataFrame({"h": np.arange(max_lag + 1), "gamma": acvf})
        write_table(table, out, ["lag", "value^2"])
        return [out]
    if task == "periodogram":
        omega, power = analytics.periodogram(values, int(config["segment"]))
        table = pd.DataFrame({"omega": omega, "power": power})
        write_table(table, out, ["rad/time", "value^2*time"])
        return [out]
    if task == "fit-semilrd":
        keep = np.ones(first.size, dtype=bool)
        if config.get("h_min") is not None:
            keep &= first >= float(config["h_min"])
        if config.get("h_max") is not None:
            keep &= first <= float(config["h_max"])
        fit = analytics.fit_semi_lrd(first[keep], values[keep])
        return [_write_json(asdict(fit), out)]
    if task == "holder":
        grid = SampleGrid(first[0], first[-1], first.size - 1)
        sidecar = f"{_stem(str(config['input']))}.json"
        if config.get("lambda") is None and os.path.exists(sidecar):
            with open(sidecar) as fp:
                config["lambda"] = json.load(fp)["params"]["lambda"]
        lam = float(_require(config, "lambda"))
        holder = holder_exponent(values, grid, lam)
        record = {
            "holder": holder,
            "zeta": 2.0 * holder,
            "structure_exponent": structure_exponent(values, grid, lam),
        }
        print(json.dumps(record, sort_keys=True))
        return [_write_json(record, out)]
    raise ParameterError(f"Estimation task [{task}] is not supported.")


def cmd_verify(config: Dict[str, Any]) -> bool:
    """
    Run verification suites and print the pass/fail table.

    Args:
        config (Dict[str, Any]): resolved configuration.

    Returns:
        bool: whether every check passed.
    """
    budget = BUDGET_MAPPINGS.get(str(config["budget"]).lower())
    if budget is None:
        raise ParameterError(f"Budget [{config['budget']}] is not supported.")
    suite = str(config["suite"]).lower()
    if suite != "all" and suite not in SUITES:
        raise ParameterError(f"Suite [{suite}] is not supported.")
    results = run_suite(suite, budget, int(config["seed"]), int(config["n"]))
    table = results_table(results)
    print(table.to_string(index=False))
    if config.get("out"):
        table["passed"] = table["passed"].astype(int)
        write_table(table, str(config["out"]), ["", "", "", "", "bool"])
    return bool(table["passed"].all())


def _common_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    parser.add_argument(
        "--config",
        "--manifest",
        dest="config",
        help="key=value config file or JSON run manifest",
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", help="output file")
    return parser


def _process_options() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    parser.add_argument("--d", type=float, help="memory parameter, d > -1/2")
    parser.add_argument("--lambda", type=float, help="tempering, lambda > 0")
    return parser


def build_parser() -> argparse.ArgumentParser:
    """
    Command-line parser, every option absent unless given.

    Returns:
        argparse.ArgumentParser: the parser.
    """
    common, process = _common_options(), _process_options()
    parser = argparse.ArgumentParser(
        prog="temperedlevy",
        description="Tempered fractional Lévy processes: simulation, theory, verification.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser(
        "simulate", parents=[common, process], argument_default=argparse.SUPPRESS
    )
    simulate.add_argument("kind", nargs="?", help=", ".join(sorted(PATH_KIND_MAPPINGS)))
    simulate.add_argument("--driver", choices=["cpois", "tstable", "gauss"])
    simulate.add_argument("--intensity", type=float)
    simulate.add_argument("--jumps", choices=["uniform", "gaussian", "twopoint"])
    simulate.add_argument("--a", type=float, help="jump scale")
    simulate.add_argument("--alpha", type=float)
    simulate.add_argument("--lambda-noise", dest="lambda_noise", type=float)
    simulate.add_argument("--scale", type=float)
    simulate.add_argument("--one-sided", dest="symmetric", action="store_false")
    simulate.add_argument("--sigma", type=float)
    simulate.add_argument("--tmax", type=float)
    simulate.add_argument("--n", type=int, help="observation cells")
    simulate.add_argument("--ensemble", type=int)
    simulate.add_argument("--refinement", type=int)
    simulate.add_argument("--trunc-width", dest="trunc_width", type=float)
    simulate.add_argument("--tolerance", type=float)
    simulate.add_argument("--smooth", action="store_true")
    simulate.add_argument("--threads", type=int)

    analytic = commands.add_parser(
        "analytic", parents=[common, process], argument_default=argparse.SUPPRESS
    )
    analytic.add_argument(
        "curve", nargs="?", help="cov1, cov2, varlimit, acvf1, acvf2, acvf2band, spec1, spec2"
    )
    analytic.add_argument("--el2", type=float)
    analytic.add_argument("--s", type=float)
    analytic.add_argument("--t", help="start:stop:step")
    analytic.add_argument("--h", help="start:stop:step")
    analytic.add_argument("--omega", help="start:stop:step")
    analytic.add_argument("--method", help="acvf2 route: auto, fourier or lag")

    estimate = commands.add_parser(
        "estimate", parents=[common, process], argument_default=argparse.SUPPRESS
    )
    estimate.add_argument("task", nargs="?", help="acvf, periodogram, fit-semilrd, holder")
    estimate.add_argument("--input")
    estimate.add_argument("--max-lag", dest="max_lag", type=int)
    estimate.add_argument("--segment", type=int)
    estimate.add_argument("--h-min", dest="h_min", type=float)
    estimate.add_argument("--h-max", dest="h_max", type=float)

    verify = commands.add_parser("verify", parents=[common], argument_default=argparse.SUPPRESS)
    verify.add_argument("suite", nargs="?", help="calculus, covariance, isometry, spectra, all")
    verify.add_argument("--budget", choices=sorted(BUDGET_MAPPINGS))
    verify.add_argument("--n", type=int, help="Monte Carlo draws of the isometry suite")
    return parser


def resolve_config(command: str, flags: Dict[str, Any]) -> Dict[str, Any]:
    """
    Merge defaults, the config file and the flags, in increasing precedence.

    Args:
        command (str): sub-command.
        flags (Dict[str, Any]): options given on the command line.

    Returns:
        Dict[str, Any]: resolved configuration.
    """
    config = dict(DEFAULTS[command])
    config_file = flags.pop("config", None)
    if config_file is not None:
        config.update(parse_config_file(config_file))
    config.update(flags)
    config.pop("command", None)
    config.pop("verbose", None)
    positional = POSITIONALS[command]
    _require(config, positional)
    return config


COMMANDS: Dict[str, Callable[[Dict[str, Any]], Any]] = {
    "simulate": cmd_simulate,
    "analytic": cmd_analytic,
    "estimate": cmd_estimate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point.

    Args:
        argv (Optional[Sequence[str]]): arguments, sys.argv[1:] by default.

    Returns:
        int: exit code, 0 ok, 1 failed verification, 2 usage or setup error,
            3 parameter error, 4 numeric tolerance error, 5 parsing error.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        if not exit_request.code:
            return EXIT_OK
        return EXIT_USAGE
    flags = vars(args)
    logger.remove()
    logger.add(sys.stderr, level="DEBUG" if flags.get("verbose") else "INFO")
    command = flags["command"]
    try:
        config = resolve_config(command, flags)
        if command == "verify":
            passed = cmd_verify(config)
            if config.get("out"):
                write_manifest(command, config, [str(config["out"])])
            return EXIT_OK if passed else EXIT_VERIFY_FAILED
        outputs = COMMANDS[command](config)
        manifest = write_manifest(command, config, outputs)
        logger.info(f"Manifest written to {manifest}")
    except ParameterError as error:
        logger.error(str(error))
        return EXIT_PARAMETER
    except NumericToleranceError as error:
        logger.error(str(error))
        return EXIT_NUMERIC
    except ParsingException as error:
        logger.error(str(error))
        return EXIT_PARSING
    except (MissingSettingError, OSError) as error:
        logger.error(str(error))
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
