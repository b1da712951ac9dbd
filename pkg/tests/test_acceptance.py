"""
Desk-scale Monte-Carlo checks of the recovery guarantees.

These take minutes; deselect them with ``-m "not slow"``.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from rafpy.experiments import (
    Experiment,
    SweepSpec,
    run_init_quality,
    run_limit_histogram,
    run_nmse_vs_snr,
    run_success_rate,
)
from rafpy.init import InitConfig, initialize
from rafpy.metrics import distance
from rafpy.rng import make_rng
from rafpy.sensing import Variant, sample_instance
from rafpy.solver import SolverConfig, solve

pytestmark = pytest.mark.slow


def test_exact_recovery_at_limit():
    spec = SweepSpec(Experiment.LIMIT_HISTOGRAM, n=500, trials=20, master_seed=1)
    report = run_limit_histogram(spec)
    assert report.metadata["m"] == 999
    assert report.metadata["success_rate"] >= 0.90
    assert report.metadata["median_loss_successes"] < 1e-20


@pytest.fixture(scope="module")
def success_rates():
    spec = SweepSpec(
        Experiment.SUCCESS_RATE,
        n=200,
        values=(1.0, 1.5, 2.0, 2.5, 3.0, 5.0),
        trials=50,
        master_seed=2,
    )
    rows = run_success_rate(spec).rows
    assert all(np.isfinite(row["mean_relative_error"]) for row in rows)
    return {row["ratio"]: row["success_rate"] for row in rows}


def test_phase_transition(success_rates):
    rates = success_rates
    assert rates[1.0] <= 0.10
    assert rates[2.0] >= 0.95
    assert rates[2.5] >= 0.99


def test_success_rate_monotone(success_rates):
    curve = [success_rates[r] for r in (1.0, 1.5, 2.0, 3.0, 5.0)]
    drops = [lo - hi for lo, hi in itertools.pairwise(curve) if hi < lo]
    assert len(drops) <= 1
    assert all(drop <= 0.05 for drop in drops)


def test_nmse_inverse_to_snr():
    spec = SweepSpec(
        Experiment.NMSE_VS_SNR,
        n=200,
        values=(10.0, 20.0, 30.0, 40.0, 50.0),
        ratios=(5.0,),
        trials=25,
        master_seed=3,
    )
    rows = run_nmse_vs_snr(spec).rows
    snr = np.array([row["snr_db"] for row in rows])
    log_nmse = np.log10([row["mean_nmse"] for row in rows])
    slope = np.polyfit(snr, log_nmse, 1)[0]
    assert -0.13 <= slope <= -0.07


def test_init_accuracy_large_ratio():
    errors = []
    for seed in range(50):
        instance = sample_instance(Variant.REAL_GAUSSIAN, 100, 5000, seed)
        z0 = initialize(instance).z0
        errors.append(distance(z0, instance.x_true) / np.linalg.norm(instance.x_true))
    assert np.mean(np.array(errors) <= 0.35) >= 0.95


def test_weighting_beats_unweighted():
    spec = SweepSpec(
        Experiment.INIT_QUALITY,
        n=500,
        values=(999 / 500,),
        gammas=(0.0, 0.5),
        include_spectral=False,
        trials=50,
        master_seed=5,
    )
    report = run_init_quality(spec)
    baseline, weighted = report.rows
    assert baseline["m"] == 999
    assert weighted["mean_relative_error"] < baseline["mean_relative_error"]
    assert weighted["sign_test_pvalue"] < 0.05


def test_local_contraction():
    monotone = 0
    for seed in range(50):
        instance = sample_instance(Variant.REAL_GAUSSIAN, 200, 1600, seed)
        x = instance.x_true
        offset = make_rng(seed, "offset").standard_normal(200)
        start = x + 0.05 * np.linalg.norm(x) * offset / np.linalg.norm(offset)
        result = solve(instance, start, SolverConfig(max_iters=100))
        dist = result.as_arrays()["distance"]
        monotone += bool(np.all(np.diff(dist) <= 1e-12 * np.linalg.norm(x)))
    assert monotone >= 48


def test_cdp_random_signals():
    good = 0
    config = SolverConfig.for_variant(Variant.CDP, max_iters=1000)
    for seed in range(20):
        instance = sample_instance(Variant.CDP, 256, 4, seed)
        z0 = initialize(instance, InitConfig(power_iters=200, seed=seed)).z0
        z = solve(instance, z0, config).z_final
        good += distance(z, instance.x_true) < 1e-3 * np.linalg.norm(instance.x_true)
    assert good >= 16
