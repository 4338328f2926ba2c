"""
Test the bigcpm command line
Drives main() end to end on small CSV files in a temporary directory
"""
import json
import sys
import tempfile
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import numpy as np
import pandas as pd

from bigcpm.cli.main import exit_code_for, main
from bigcpm.cli.runner import build_config, ingest_csv, read_config_file
from bigcpm.errors import (ArgumentError, ConsistencyError, IngestError, SeparationError,
                           SingularHessianError, UnconvergedSubsetError)
from bigcpm.simulate.scenarios import ScenarioSpec, simulate_dataset
from suite import run_suite


def write_toy_csv(folder: Path, N: int = 400) -> Path:
    """Positive outcome with two predictors, plus two unusable rows"""
    sim = simulate_dataset(ScenarioSpec(N=N, p=2, transform="exp", seed=11))
    frame = pd.DataFrame({"y": sim.data.y, "x1": sim.data.X[:, 0], "x2": sim.data.X[:, 1]})
    frame = frame.astype(object)
    frame.loc[N] = [1.5, "NA", 0.3]
    frame.loc[N + 1] = ["oops", 0.0, 1.0]
    path = folder / "toy.csv"
    frame.to_csv(path, index=False)
    return path


def fit_args(csv: Path, out: Path, *extra: str):
    return ["-q", "fit", "--input", str(csv), "--outcome", "y", "--predictors", "x1,x2",
            "--workers", "1", "--output-dir", str(out), *extra]


def test_fit_whole():
    print("[TEST] Testing Whole-Data Fit")
    print("=" * 40)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        csv = write_toy_csv(tmp)
        out = tmp / "whole"
        assert main(fit_args(csv, out)) == 0

        for name in ("estimates.csv", "beta.csv", "beta_cov.json", "fit.json", "metadata.json"):
            assert (out / name).is_file(), f"missing {name}"
        meta = json.loads((out / "metadata.json").read_text())
        assert meta["N"] == 400 and meta["p"] == 2
        assert meta["approach"] == "whole" and meta["converged"] is True
        assert meta["original_M"] == meta["achieved_M"] == 400
        assert meta["predictors"] == ["x1", "x2"]

        estimates = pd.read_csv(out / "estimates.csv")
        assert list(estimates.columns) == ["y", "alpha", "alpha_se"]
        assert len(estimates) == 400
        alpha = estimates["alpha"].to_numpy()
        assert np.isinf(alpha[-1]) and np.isnan(estimates["alpha_se"].iloc[-1])
        assert np.all(np.diff(alpha[:-1]) > 0)

        beta = pd.read_csv(out / "beta.csv")
        assert list(beta["name"]) == ["x1", "x2"]
        assert np.all(beta["se"] > 0)
        print("[PASS] result files written, unusable rows dropped")

        again = tmp / "again"
        assert main(fit_args(csv, again)) == 0
        for name in ("estimates.csv", "beta.csv"):
            assert (out / name).read_bytes() == (again / name).read_bytes()
        print("[PASS] repeated runs are byte-identical")


def test_fit_from_config():
    print("\n[TEST] Testing Config File Runs")
    print("=" * 40)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        csv = write_toy_csv(tmp)
        config = tmp / "run.conf"
        config.write_text(
            "# divide and combine over two subsets\n"
            f"input = {csv}\n"
            "outcome = y\n"
            "predictors = x1, x2\n"
            "approach = divide-combine\n"
            "Subsets = 2\n"
            "workers = 1\n"
            f"output-dir = {tmp / 'dc'}\n"
        )
        values = read_config_file(config)
        assert values["subsets"] == "2" and values["output_dir"] == str(tmp / "dc")

        assert main(["-q", "fit", "--config", str(config), "--seed", "3"]) == 0
        meta = json.loads((tmp / "dc" / "metadata.json").read_text())
        assert meta["approach"] == "divide-combine" and meta["parameter"] == 2
        assert meta["seed"] == 3 and meta["achieved_M"] == 400
        assert len(meta["details"]["subsets"]) == 2
        print("[PASS] config values used, flags override them")

        cfg = build_config(config, {"approach": "bin", "target": 25})
        assert cfg.approach == "bin" and cfg.parameter == 25
        assert cfg.predictors == ["x1", "x2"]
        print("[PASS] explicit overrides win over the file")


def test_fit_bin_with_report():
    print("\n[TEST] Testing Binned Fit With Report")
    print("=" * 40)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        csv = write_toy_csv(tmp)
        out = tmp / "bin"
        assert main(fit_args(csv, out, "--approach", "bin", "--target", "40",
                             "--report-edges", "0.5,1,2")) == 0

        meta = json.loads((out / "metadata.json").read_text())
        assert meta["approach"] == "bin" and meta["parameter"] == 40
        assert 2 <= meta["achieved_M"] <= 40

        report = pd.read_csv(out / "discretize_report.tsv", sep="\t")
        assert len(report) == 5
        total = report.iloc[-1]
        assert total["region"] == "total" and total["n_obs"] == 400
        assert total["distinct_before"] == 400 and total["distinct_after"] == meta["achieved_M"]
        assert report["n_obs"].iloc[:-1].sum() == 400
        print(f"[PASS] binned to {meta['achieved_M']} values with a region report")


def test_fit_errors():
    print("\n[TEST] Testing Fit Error Exits")
    print("=" * 40)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        csv = write_toy_csv(tmp)

        assert main(fit_args(tmp / "missing.csv", tmp / "a")) == 2
        assert not (tmp / "a").exists()
        print("[PASS] missing input exits 2 and leaves nothing behind")

        typo = ["-q", "fit", "--input", str(csv), "--outcome", "y", "--predictors", "x1,x3",
                "--output-dir", str(tmp / "b")]
        assert main(typo) == 2
        assert not (tmp / "b").exists()
        print("[PASS] unknown column exits 2")

        assert main(fit_args(csv, tmp / "c", "--approach", "bin")) == 2
        assert main(fit_args(csv, tmp / "c", "--approach", "nearest")) == 2
        print("[PASS] invalid configurations exit 2")

        out = tmp / "d"
        assert main(fit_args(csv, out, "--predict-at", str(tmp / "nowhere.csv"))) == 2
        assert not out.exists()
        print("[PASS] partial output rolled back")


def test_simulate_and_predict():
    print("\n[TEST] Testing Simulate And Predict")
    print("=" * 40)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        data_csv = tmp / "sim" / "data.csv"
        assert main(["-q", "simulate", "--n", "300", "--p", "2", "--seed", "4",
                     "--output", str(data_csv)]) == 0
        frame = pd.read_csv(data_csv)
        assert list(frame.columns) == ["y", "x1", "x2"] and len(frame) == 300
        truth = json.loads(data_csv.with_suffix(".truth.json").read_text())
        assert truth["beta"] == [0.1, 0.0] and truth["link"] == "logit"
        print("[PASS] simulated CSV and truth written")

        out = tmp / "fit"
        assert main(["-q", "fit", "--input", str(data_csv), "--outcome", "y",
                     "--output-dir", str(out)]) == 0

        covariates = tmp / "x0.csv"
        pd.DataFrame({"x2": [0.0, 1.0], "x1": [0, 1]}).to_csv(covariates, index=False)
        predictions = tmp / "pred.csv"
        cdf = tmp / "cdf.csv"
        assert main(["-q", "predict", "--fit", str(out / "fit.json"), "--predict-at", str(covariates),
                     "--output", str(predictions), "--cdf-output", str(cdf)]) == 0

        table = pd.read_csv(predictions)
        assert list(table["row"]) == [1, 2]
        assert list(table.columns[:3]) == ["row", "x1", "x2"]
        assert np.all(table["median"].between(frame["y"].min(), frame["y"].max()))
        long = pd.read_csv(cdf)
        assert len(long) == 2 * 300
        last = long.groupby("row")["cdf"].last()
        assert np.allclose(last, 1.0)
        print("[PASS] predictions from a saved fit")

        assert main(["-q", "predict", "--fit", str(tmp / "none.json"), "--predict-at", str(covariates),
                     "--output", str(predictions)]) == 2
        print("[PASS] missing fit file exits 2")


def test_discretize_and_compare():
    print("\n[TEST] Testing Discretize And Compare")
    print("=" * 40)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        csv = write_toy_csv(tmp)
        rounded = tmp / "rounded.csv"
        report = tmp / "report.tsv"
        assert main(["-q", "discretize", "--input", str(csv), "--outcome", "y",
                     "--method", "round-sigdigit", "--target", "60", "--output", str(rounded),
                     "--report-edges", "1", "--report-schemes", "sigdigit:1,decimal:1:5",
                     "--report-output", str(report)]) == 0
        values = pd.read_csv(rounded)
        # without --predictors every other column is a predictor, so the NA row is dropped too
        assert len(values) == 400
        assert values["y_discretized"].nunique() < 400
        assert len(pd.read_csv(report, sep="\t")) == 3
        print("[PASS] discretize writes values and a scheme table")

        assert main(["-q", "discretize", "--input", str(csv), "--outcome", "y", "--target", "60",
                     "--report-schemes", "sigdigit:1"]) == 2
        print("[PASS] schemes without edges rejected")

        table_path = tmp / "compare.csv"
        assert main(["-q", "compare", "--input", str(csv), "--outcome", "y", "--workers", "1",
                     "--subsets", "2", "--target", "50", "--output", str(table_path)]) == 0
        table = pd.read_csv(table_path)
        assert list(table["approach"]) == ["whole", "divide-combine", "bin", "round-decimal",
                                           "round-sigdigit"]
        assert table["success"].all()
        assert np.all(table["mean_se_ratio"] > 0.5)
        print("[PASS] compare covers every approach")

        assert main(["-q", "compare", "--input", str(csv), "--outcome", "y", "--workers", "1",
                     "--subsets", "2", "--seed-sweep", "3"]) == 0
        print("[PASS] partition seed sweep")

        assert main(["-q", "compare", "--input", str(csv), "--outcome", "y"]) == 2
        print("[PASS] compare without parameters exits 2")


def test_helpers():
    print("\n[TEST] Testing Ingest And Exit Codes")
    print("=" * 40)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        csv = tmp / "small.csv"
        csv.write_text("a,y,b\n1,2.5,3\n4, 1.0 ,6\n7,0.5,9\n")
        data = ingest_csv(csv, "y")
        assert data.N == 3 and data.names == ["a", "b"]
        assert np.array_equal(data.y, [2.5, 1.0, 0.5])

        (tmp / "empty.csv").write_text("a,y\nx,\n")
        try:
            ingest_csv(tmp / "empty.csv", "y")
            raise AssertionError("expected IngestError")
        except IngestError:
            pass

        bad = tmp / "bad.conf"
        bad.write_text("input data.csv\n")
        try:
            read_config_file(bad)
            raise AssertionError("expected ArgumentError")
        except ArgumentError:
            pass
    print("[PASS] ingest and config parsing")

    assert exit_code_for(ArgumentError("x")) == 2
    assert exit_code_for(IngestError("x")) == 2
    assert exit_code_for(SeparationError("x", parameter=0)) == 3
    assert exit_code_for(SingularHessianError("x", block="beta")) == 3
    assert exit_code_for(UnconvergedSubsetError(1)) == 3
    assert exit_code_for(ConsistencyError("x")) == 4
    assert exit_code_for(RuntimeError("x")) == 1
    print("[PASS] exit code mapping")


if __name__ == "__main__":
    success = run_suite("bigcpm Command Line Test Suite", [
        test_fit_whole,
        test_fit_from_config,
        test_fit_bin_with_report,
        test_fit_errors,
        test_simulate_and_predict,
        test_discretize_and_compare,
        test_helpers,
    ])
    sys.exit(0 if success else 1)
