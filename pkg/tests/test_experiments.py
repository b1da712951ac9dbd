from __future__ import annotations

import dataclasses
import json
import math

import numpy as np
import pandas as pd
import pytest
from PIL import Image

from rafpy.experiments import (
    Experiment,
    ExperimentReport,
    SweepSpec,
    init_variants,
    load_image,
    run,
    run_cdp_recovery,
    run_init_quality,
    run_limit_histogram,
    run_nmse_vs_snr,
    run_success_rate,
    to_jsonable,
)
from rafpy.init import InitConfig
from rafpy.sensing import Variant
from rafpy.solver import SolverConfig


@pytest.fixture
def quick_solver():
    return SolverConfig(max_iters=300)


def test_spec_validation():
    with pytest.raises(ValueError, match="nonempty sweep"):
        SweepSpec(Experiment.SUCCESS_RATE)
    with pytest.raises(ValueError, match="trials"):
        SweepSpec(Experiment.SUCCESS_RATE, values=(2.0,), trials=0)
    with pytest.raises(ValueError, match="mask counts"):
        SweepSpec(Experiment.CDP_RECOVERY, values=(0.0,))
    with pytest.raises(ValueError, match="threads"):
        SweepSpec(Experiment.LIMIT_HISTOGRAM, threads=0)
    SweepSpec(Experiment.LIMIT_HISTOGRAM)


def test_spec_hash():
    a = SweepSpec(Experiment.SUCCESS_RATE, values=(2.0,), master_seed=1)
    b = SweepSpec(Experiment.SUCCESS_RATE, values=(2.0,), master_seed=1, threads=3)
    c = SweepSpec(Experiment.SUCCESS_RATE, values=(2.0,), master_seed=2)
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != c.config_hash()
    assert len(a.config_hash()) == 16


def test_spec_solver_defaults():
    assert SweepSpec(Experiment.CDP_RECOVERY, values=(4.0,)).solver_config().step_size == 6.0
    assert SweepSpec(Experiment.SUCCESS_RATE, values=(4.0,)).solver_config().step_size == 2.0


def test_cdp_recovery_defaults():
    spec = SweepSpec(Experiment.CDP_RECOVERY, values=(4.0,))
    assert spec.init_config().power_iters == 100
    assert spec.solver_config().max_iters == 100
    other = SweepSpec(Experiment.SUCCESS_RATE, values=(4.0,))
    assert other.init_config() == InitConfig()
    assert other.solver_config().max_iters == 2000


def test_cdp_ratio_is_mask_count():
    spec = SweepSpec(
        Experiment.SUCCESS_RATE,
        n=8,
        values=(2.0, 3.0),
        trials=1,
        variant=Variant.CDP,
        init=InitConfig(power_iters=5),
        solver=SolverConfig.for_variant(Variant.CDP, max_iters=5),
    )
    report = run_success_rate(spec)
    assert [row["m"] for row in report.rows] == [16, 24]
    with pytest.raises(ValueError, match="mask count K"):
        dataclasses.replace(spec, values=(2.5,))
    with pytest.raises(ValueError, match="mask count K"):
        SweepSpec(Experiment.NMSE_VS_SNR, values=(20.0,), ratios=(0.5,), variant=Variant.CDP)
    with pytest.raises(ValueError, match="limit-hist"):
        SweepSpec(Experiment.LIMIT_HISTOGRAM, variant=Variant.CDP)


def test_success_rate_below_uniqueness_stays_finite():
    spec = SweepSpec(Experiment.SUCCESS_RATE, n=50, values=(1.0,), trials=3, master_seed=2)
    row = run_success_rate(spec).rows[0]
    assert math.isfinite(row["mean_relative_error"])
    assert math.isfinite(row["median_loss"])
    assert 0 <= row["diverged"] <= 3
    assert row["success_rate"] <= 1.0


def test_to_jsonable():
    data = {"a": (1, np.float64(2.5)), "b": math.inf, "c": np.int64(3), "d": np.bool_(True)}
    assert to_jsonable(data) == {"a": [1, 2.5], "b": "inf", "c": 3, "d": True}


def test_success_rate(quick_solver):
    spec = SweepSpec(
        Experiment.SUCCESS_RATE,
        n=20,
        values=(1.0, 6.0),
        trials=4,
        master_seed=3,
        solver=quick_solver,
    )
    report = run_success_rate(spec)
    assert [row["ratio"] for row in report.rows] == [1.0, 6.0]
    assert [row["m"] for row in report.rows] == [20, 120]
    assert all(0.0 <= row["success_rate"] <= 1.0 for row in report.rows)
    assert report.rows[0]["success_rate"] < report.rows[1]["success_rate"]
    assert len(report.trials) == 8
    assert "wall_clock" not in report.metadata
    assert "elapsed" not in report.trials[0]


def test_success_rate_reproducible(quick_solver):
    spec = SweepSpec(
        Experiment.SUCCESS_RATE, n=12, values=(4.0,), trials=3, master_seed=5, solver=quick_solver
    )
    a = run(spec)
    b = run(dataclasses.replace(spec, threads=1))
    assert a.to_json() == b.to_json()


def test_timing_and_traces():
    spec = SweepSpec(
        Experiment.SUCCESS_RATE,
        n=10,
        values=(4.0,),
        trials=2,
        solver=SolverConfig(max_iters=5),
        include_timing=True,
        keep_traces=True,
    )
    report = run(spec)
    assert "wall_clock" in report.metadata
    assert "elapsed" in report.trials[0]
    assert len(report.trials[0]["residual_trace"]) == 6


def test_nmse_vs_snr():
    spec = SweepSpec(
        Experiment.NMSE_VS_SNR,
        n=16,
        values=(10.0, 30.0, math.inf),
        ratios=(4.0, 6.0),
        trials=2,
        solver=SolverConfig(max_iters=400),
    )
    report = run_nmse_vs_snr(spec)
    assert len(report.rows) == 6
    assert [(row["ratio"], row["snr_db"]) for row in report.rows[:3]] == [
        (4.0, 10.0),
        (4.0, 30.0),
        (4.0, math.inf),
    ]
    parsed = json.loads(report.to_json())
    assert parsed["rows"][2]["snr_db"] == "inf"


def test_init_variants():
    spec = SweepSpec(Experiment.INIT_QUALITY, values=(2.0,), gammas=(0.0, 0.5, 1.0))
    labels = [label for label, _ in init_variants(spec)]
    assert labels == ["gamma=0", "gamma=0.5", "gamma=1", "spectral"]
    spectral = init_variants(spec)[-1][1]
    assert (spectral.subset_fraction, spectral.gamma) == (1.0, 2.0)


def test_init_quality():
    spec = SweepSpec(
        Experiment.INIT_QUALITY,
        n=30,
        values=(2.0, 10.0),
        trials=6,
        init=InitConfig(power_iters=100),
    )
    report = run_init_quality(spec)
    assert len(report.rows) == 6
    assert report.metadata["baseline"] == "gamma=0"
    baseline = report.rows[0]
    assert baseline["wins_vs_baseline"] is None
    assert 0 <= report.rows[1]["wins_vs_baseline"] <= 6
    by_ratio = {
        (row["ratio"], row["label"]): row["mean_relative_error"] for row in report.rows
    }
    assert by_ratio[(10.0, "gamma=0.5")] < by_ratio[(2.0, "gamma=0.5")]
    assert len(report.trials) == 12


def test_limit_histogram(quick_solver):
    spec = SweepSpec(Experiment.LIMIT_HISTOGRAM, n=10, trials=4, solver=quick_solver)
    report = run_limit_histogram(spec)
    assert report.metadata["m"] == 19
    assert len(report.rows) == 16
    assert sum(row["count"] for row in report.rows) == 4
    assert report.rows[0]["bin_low"] == 0.0
    assert report.rows[-1]["bin_high"] == 40.0
    assert 0.0 <= report.metadata["success_rate"] <= 1.0


def test_cdp_random():
    spec = SweepSpec(
        Experiment.CDP_RECOVERY,
        n=32,
        values=(4.0,),
        trials=2,
        init=InitConfig(power_iters=100),
        solver=SolverConfig.for_variant(Variant.CDP, max_iters=300),
    )
    report = run_cdp_recovery(spec)
    assert len(report.rows) == 1
    row = report.rows[0]
    assert (row["masks"], row["n"], row["m"], row["trials"]) == (4, 32, 128, 2)
    assert 0.0 <= row["fraction_below_1e-3"] <= 1.0
    assert row["median_relative_error"] >= 0.0
    assert [trial["trial"] for trial in report.trials] == [0, 1]
    assert report.recovered is None


@pytest.mark.parametrize("mode", ["L", "RGB"])
def test_cdp_image(tmp_path, mode):
    rng = np.random.default_rng(0)
    shape = (8, 8) if mode == "L" else (8, 8, 3)
    pixels = rng.integers(0, 256, size=shape, dtype=np.uint8)
    image_path = tmp_path / "img.png"
    Image.fromarray(pixels).save(image_path)
    out_path = tmp_path / "recovered.png"
    spec = SweepSpec(
        Experiment.CDP_RECOVERY,
        n=1,
        values=(4.0,),
        init=InitConfig(power_iters=50),
        solver=SolverConfig.for_variant(Variant.CDP, max_iters=50),
    )
    report = run_cdp_recovery(spec, image_path, out_path)
    assert report.recovered is not None
    assert report.recovered.shape == shape
    with Image.open(out_path) as img:
        assert img.size == (8, 8)
        assert img.mode == mode
    assert len(report.rows) == (1 if mode == "L" else 3)
    assert report.metadata["image_shape"] == list(shape)


def test_cdp_image_missing(tmp_path):
    spec = SweepSpec(Experiment.CDP_RECOVERY, n=1, values=(4.0,))
    with pytest.raises(FileNotFoundError):
        run_cdp_recovery(spec, tmp_path / "nope.png")


def test_load_image_corrupt(tmp_path):
    path = tmp_path / "bad.png"
    path.write_bytes(b"not an image")
    with pytest.raises(ValueError, match="cannot decode"):
        load_image(path)


def test_report_files(tmp_path):
    report = ExperimentReport(
        Experiment.SUCCESS_RATE,
        rows=[{"ratio": 2.0, "success_rate": 0.5, "config_hash": "abc"}],
        metadata={"x": math.nan},
    )
    report.write_csv(tmp_path / "r.csv")
    report.write_json(tmp_path / "r.json")
    frame = pd.read_csv(tmp_path / "r.csv")
    assert frame.to_dict("records") == [{"ratio": 2.0, "success_rate": 0.5, "config_hash": "abc"}]
    assert json.loads((tmp_path / "r.json").read_text())["metadata"] == {"x": "nan"}
    assert "config_hash" not in report.summary()


def test_require_matching_experiment():
    spec = SweepSpec(Experiment.LIMIT_HISTOGRAM)
    with pytest.raises(ValueError, match="expected a success-rate sweep"):
        run_success_rate(spec)
