"""Testing command-line utilities."""
import json
import os
from importlib.resources import files

import numpy as np
import pandas as pd
import pytest

from ..cli import (
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_PARAMETER,
    EXIT_PARSING,
    EXIT_USAGE,
    main,
    resolve_config,
)
from ..helpers.data import read_table

RESOURCES = files("temperedlevy") / "resources" / "tests"
DRIVER_CFG_FILEPATH = str(RESOURCES / "driver.cfg")
SEMILRD_CSV_FILEPATH = str(RESOURCES / "acvf_semilrd.csv")
SIMULATE = ["simulate", "tflp1", "--d", "0.3", "--lambda", "0.5", "--tmax", "2", "--n", "16"]


def _read_bytes(filepath: str) -> bytes:
    with open(filepath, "rb") as fp:
        return fp.read()


def test_simulate_deterministic(tmpdir):
    """Testing that equal settings give byte-identical outputs."""
    first = os.path.join(tmpdir, "first.csv")
    second = os.path.join(tmpdir, "second.csv")
    assert main(SIMULATE + ["--seed", "7", "--out", first]) == EXIT_OK
    assert main(SIMULATE + ["--seed", "7", "--out", second]) == EXIT_OK
    assert _read_bytes(first) == _read_bytes(second)
    assert os.path.exists(os.path.join(tmpdir, "first.json"))
    with open(os.path.join(tmpdir, "first.manifest.json")) as fp:
        manifest = json.load(fp)
    assert manifest["command"] == "simulate"
    assert manifest["config"]["seed"] == 7
    assert manifest["outputs"] == [first, os.path.join(tmpdir, "first.json")]


def test_manifest_replay(tmpdir):
    """Testing that a run manifest reproduces its run."""
    original = os.path.join(tmpdir, "original.csv")
    replay = os.path.join(tmpdir, "replay.csv")
    assert main(SIMULATE + ["--seed", "3", "--out", original]) == EXIT_OK
    manifest = os.path.join(tmpdir, "original.manifest.json")
    assert main(["simulate", "--manifest", manifest, "--out", replay]) == EXIT_OK
    assert _read_bytes(original) == _read_bytes(replay)


def test_verbose_flag(tmpdir):
    """Testing that debug logging stays out of the manifest."""
    out = os.path.join(tmpdir, "verbose.csv")
    assert main(SIMULATE + ["--verbose", "--out", out]) == EXIT_OK
    with open(os.path.join(tmpdir, "verbose.manifest.json")) as fp:
        manifest = json.load(fp)
    assert "verbose" not in manifest["config"]


def test_simulate_noise_and_ensemble(tmpdir):
    """Testing noise kinds and ensembles."""
    noise = os.path.join(tmpdir, "noise.csv")
    arguments = ["simulate", "tfln1", "--d", "0.3", "--lambda", "0.5", "--tmax", "2", "--n", "16"]
    assert main(arguments + ["--out", noise]) == EXIT_OK
    table, units = read_table(noise)
    assert table.shape == (17, 2)
    assert units == ["time", "value"]
    misaligned = ["simulate", "tfln1", "--d", "0.3", "--lambda", "0.5", "--tmax", "3", "--n", "16"]
    assert main(misaligned + ["--out", noise]) == EXIT_PARAMETER
    ensemble = os.path.join(tmpdir, "ensemble.csv")
    assert main(SIMULATE + ["--ensemble", "3", "--threads", "2", "--out", ensemble]) == EXIT_OK
    table, _ = read_table(ensemble)
    assert list(table.columns) == ["t", "path_0", "path_1", "path_2"]
    assert table.shape == (17, 4)


def test_simulate_config_file(tmpdir):
    """Testing a key=value configuration with a tempered stable driver."""
    out = os.path.join(tmpdir, "stable.csv")
    assert main(["simulate", "--config", DRIVER_CFG_FILEPATH, "--out", out]) == EXIT_OK
    with open(os.path.join(tmpdir, "stable.json")) as fp:
        metadata = json.load(fp)
    assert metadata["driver"]["driver"] == "tstable"
    assert metadata["driver"]["alpha"] == 1.5
    assert metadata["params"] == {"d": 0.3, "lambda": 0.5}
    table, _ = read_table(out)
    assert table.shape == (65, 2)


def test_resolve_config(tmpdir):
    """Testing the precedence of defaults, config file and flags."""
    config = resolve_config("simulate", {"config": DRIVER_CFG_FILEPATH, "n": 32})
    assert config["n"] == 32
    assert config["tmax"] == 4
    assert config["lambda_noise"] == 0.2
    assert config["kind"] == "tflp1"
    assert "config" not in config


def test_exit_codes(tmpdir):
    """Testing the exit codes of failing runs."""
    out = os.path.join(tmpdir, "out.csv")
    base = ["simulate", "tflp1", "--tmax", "2", "--n", "16", "--out", out]
    assert main(base + ["--d", "0.3", "--lambda", "0"]) == EXIT_PARAMETER
    assert main(base + ["--lambda", "0.5"]) == EXIT_USAGE
    unknown = ["simulate", "tflp3", "--d", "0.3", "--lambda", "0.5", "--out", out]
    assert main(unknown) == EXIT_PARAMETER
    assert main(["simulate", "--unknown-flag"]) == EXIT_USAGE
    assert main(["--version"]) == EXIT_OK
    assert main(["simulate", "--help"]) == EXIT_OK
    assert main([]) == EXIT_USAGE
    assert main(base + ["--d", "0.3", "--lambda", "0.5", "--trunc-width", "1"]) == EXIT_NUMERIC
    bad = os.path.join(tmpdir, "bad.csv")
    with open(bad, "w") as fp:
        fp.write("t,value\n0,1\nx,2\n")
    assert main(["estimate", "acvf", "--input", bad, "--out", out]) == EXIT_PARSING
    assert main(["estimate", "acvf", "--input", os.path.join(tmpdir, "none.csv")]) == EXIT_USAGE


def test_analytic(tmpdir, capsys):
    """Testing analytic curves."""
    out = os.path.join(tmpdir, "limit.csv")
    arguments = ["analytic", "varlimit", "--d", "0", "--lambda", "1", "--el2", "1"]
    assert main(arguments + ["--out", out]) == EXIT_OK
    assert float(capsys.readouterr().out.strip().splitlines()[-1]) == pytest.approx(1.0)
    curve = os.path.join(tmpdir, "cov.csv")
    arguments = ["analytic", "cov1", "--d", "0.3", "--lambda", "0.5", "--t", "0:2:0.5"]
    assert main(arguments + ["--out", curve]) == EXIT_OK
    table, _ = read_table(curve)
    assert table.shape == (5, 2)
    assert table["cov"].iloc[0] == 0.0
    spectrum = os.path.join(tmpdir, "spec.csv")
    arguments = ["analytic", "spec2", "--d", "0.3", "--lambda", "0.5", "--omega", "0:3:1"]
    assert main(arguments + ["--el2", "2", "--out", spectrum]) == EXIT_OK
    table, _ = read_table(spectrum)
    assert list(table.columns) == ["omega", "density", "two_sided"]
    assert table["two_sided"].iloc[1] == pytest.approx(4.0 * table["density"].iloc[1])
    routes = {}
    for method in ("fourier", "lag"):
        target = os.path.join(tmpdir, f"acvf2_{method}.csv")
        arguments = ["analytic", "acvf2", "--d", "0.3", "--lambda", "0.5", "--h", "2:4:1"]
        assert main(arguments + ["--method", method, "--out", target]) == EXIT_OK
        routes[method], _ = read_table(target)
    np.testing.assert_allclose(routes["fourier"]["gamma"], routes["lag"]["gamma"], rtol=1e-5)
    arguments = ["analytic", "acvf2", "--d", "0.3", "--lambda", "0.5", "--method", "sum"]
    assert main(arguments + ["--out", curve]) == EXIT_PARAMETER
    rejected = ["analytic", "cov2", "--d", "-0.2", "--lambda", "1", "--t", "0:1:0.5"]
    assert main(rejected + ["--out", curve]) == EXIT_PARAMETER
    unknown = ["analytic", "cov3", "--d", "0.3", "--lambda", "1", "--out", curve]
    assert main(unknown) == EXIT_PARAMETER


def test_estimate(tmpdir, capsys):
    """Testing the estimators on stored and simulated series."""
    fit = os.path.join(tmpdir, "fit.json")
    arguments = ["estimate", "fit-semilrd", "--input", SEMILRD_CSV_FILEPATH]
    assert main(arguments + ["--out", fit]) == EXIT_OK
    with open(fit) as fp:
        record = json.load(fp)
    assert record["lambda_hat"] == pytest.approx(0.3, rel=1e-6)
    assert record["delta_hat"] == pytest.approx(0.2, rel=1e-5)
    assert record["fit_range"] == [10.0, 60.0]
    path = os.path.join(tmpdir, "path.csv")
    arguments = ["simulate", "tflp1", "--d", "0.3", "--lambda", "0.01", "--tmax", "10"]
    assert main(arguments + ["--n", "1000", "--refinement", "1", "--out", path]) == EXIT_OK
    acvf = os.path.join(tmpdir, "acvf.csv")
    assert main(["estimate", "acvf", "--input", path, "--max-lag", "5", "--out", acvf]) == EXIT_OK
    table, _ = read_table(acvf)
    assert list(table["h"]) == [0.0, 1.0, 2.0, 3.0, 4.0, 5.0]
    capsys.readouterr()
    holder = os.path.join(tmpdir, "holder.json")
    assert main(["estimate", "holder", "--input", path, "--out", holder]) == EXIT_OK
    printed = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert set(printed) == {"holder", "zeta", "structure_exponent"}
    assert printed["zeta"] == pytest.approx(2.0 * printed["holder"])


def test_verify(tmpdir, capsys):
    """Testing the verification command."""
    out = os.path.join(tmpdir, "verify.csv")
    assert main(["verify", "covariance", "--budget", "quick", "--out", out]) == EXIT_OK
    assert "passed" in capsys.readouterr().out
    table = pd.read_csv(out, skiprows=[1])
    assert list(table.columns) == ["check", "measured", "expected", "tolerance", "passed"]
    assert table["passed"].all()
    assert os.path.exists(os.path.join(tmpdir, "verify.manifest.json"))
    assert main(["verify", "nothing"]) == EXIT_PARAMETER
    assert main(["verify", "calculus", "--budget", "slow"]) == EXIT_USAGE
