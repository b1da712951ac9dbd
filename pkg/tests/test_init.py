from __future__ import annotations

import math

import numpy as np
import pytest

from rafpy.init import (
    InitConfig,
    apply_init_matrix,
    estimate_norm,
    init_weights,
    initialize,
    power_method,
    select_subset,
)
from rafpy.metrics import distance
from rafpy.sensing import SensingModel, Variant, measure, sample_instance, sample_model


def _dense_y(model: SensingModel, weights: np.ndarray) -> np.ndarray:
    a = model.dense()
    return (a.conj().T * weights) @ a / model.m


def test_config_defaults():
    config = InitConfig()
    assert config.subset_fraction == pytest.approx(3 / 13)
    assert config.gamma == 0.5
    assert config.power_iters == 200
    assert config.method == "power"


@pytest.mark.parametrize(
    ("kwargs", "match"),
    [
        ({"subset_fraction": 0.0}, "subset_fraction"),
        ({"subset_fraction": 1.5}, "subset_fraction"),
        ({"gamma": -1.0}, "gamma"),
        ({"power_iters": 0}, "power_iters"),
        ({"eig_tol": -1.0}, "eig_tol"),
        ({"method": "qr"}, "eigensolver"),
    ],
)
def test_config_validation(kwargs, match):
    with pytest.raises(ValueError, match=match):
        InitConfig(**kwargs)


def test_config_presets():
    assert InitConfig.spectral() == InitConfig(subset_fraction=1.0, gamma=2.0)
    assert InitConfig.maximal_correlation(power_iters=50).gamma == 0.0


def test_config_dict():
    config = InitConfig(gamma=1.0, seed=4)
    assert InitConfig.from_dict(config.to_dict()) == config
    with pytest.raises(ValueError, match="unknown init config keys"):
        InitConfig.from_dict({"gama": 1.0})


@pytest.mark.parametrize(("m", "expected"), [(13, 3), (26, 6), (1000, 230), (999, 230)])
def test_cardinality(m, expected):
    assert InitConfig().cardinality(m) == expected


def test_cardinality_empty():
    with pytest.raises(ValueError, match="selects no index"):
        InitConfig().cardinality(4)


@pytest.mark.parametrize(("psi", "expected"), [([1, 1, 1, 1], 1.0), ([3, 4], math.sqrt(12.5))])
def test_estimate_norm(psi, expected):
    assert estimate_norm(psi) == pytest.approx(expected)


def test_estimate_norm_empty():
    with pytest.raises(ValueError, match="empty"):
        estimate_norm([])


def test_select_subset():
    psi = [0.1, 3.0, 2.0, 0.5, 2.5]
    assert select_subset(psi, 3).tolist() == [1, 4, 2]
    assert sorted(select_subset(psi, 5).tolist()) == [0, 1, 2, 3, 4]


def test_select_subset_ties():
    assert select_subset([1.0, 2.0, 2.0, 2.0], 2).tolist() == [1, 2]


@pytest.mark.parametrize("cardinality", [0, 6])
def test_select_subset_range(cardinality):
    with pytest.raises(ValueError, match="cardinality"):
        select_subset([1.0, 2.0, 3.0, 4.0, 5.0], cardinality)


def test_init_weights():
    psi = np.array([4.0, 9.0, 1.0])
    assert init_weights(psi, [0, 1], 0.5).tolist() == [2.0, 3.0, 0.0]
    assert init_weights(psi, [0, 1], 0.0).tolist() == [1.0, 1.0, 0.0]
    assert np.array_equal(init_weights(psi, [0, 1, 2], 2.0), psi**2)


def test_apply_init_matrix_zero_weights():
    model = sample_model(Variant.REAL_GAUSSIAN, 3, 5, rng_seed=0)
    assert np.array_equal(apply_init_matrix(model, np.zeros(5), np.ones(3)), np.zeros(3))


def test_apply_init_matrix_identity():
    model = SensingModel.from_matrix(np.eye(4))
    v = np.array([1.0, -2.0, 3.0, 0.5])
    assert np.allclose(apply_init_matrix(model, np.ones(4), v), v / 4)


@pytest.mark.parametrize("variant", list(Variant))
def test_apply_init_matrix_matches_dense(variant):
    rng = np.random.default_rng(1)
    for trial in range(50):
        n = int(rng.integers(1, 21))
        m_or_k = int(rng.integers(1, 6)) if variant is Variant.CDP else int(rng.integers(1, 101))
        model = sample_model(variant, n, m_or_k, rng_seed=trial)
        weights = rng.random(model.m)
        v = rng.standard_normal(n) + (1j * rng.standard_normal(n) if model.is_complex else 0)
        y = _dense_y(model, weights)
        scale = np.linalg.norm(model.dense()) ** 2 * np.linalg.norm(v) / model.m
        assert np.allclose(
            apply_init_matrix(model, weights, v), y @ v, rtol=0, atol=1e-12 * max(1.0, scale)
        )


def test_power_method_psd():
    rng = np.random.default_rng(5)
    q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
    mat = q @ np.diag([5.0, 3.0, 2.0, 1.0, 0.5]) @ q.T
    top = q[:, 0]
    v = power_method(lambda u: mat @ u, 5, 500, seed=0)
    assert np.linalg.norm(v) == pytest.approx(1.0)
    angle = math.acos(min(1.0, abs(float(top @ v))))
    assert angle < 1e-6


def test_power_method_diagonal():
    mat = np.diag([2.0, 1.0])
    v = power_method(lambda u: mat @ u, 2, 100, seed=3)
    e1 = np.array([1.0, 0.0])
    assert min(np.linalg.norm(v - e1), np.linalg.norm(v + e1)) < 1e-8


def test_power_method_identity_keeps_start():
    start = power_method(lambda u: u, 6, 1, seed=11)
    assert np.linalg.norm(start) == pytest.approx(1.0)
    for apply in (lambda u: u, lambda u: 2.0 * u):
        v = power_method(apply, 6, 50, seed=11)
        assert np.allclose(v, start, rtol=0, atol=1e-13)


def test_power_method_early_exit():
    mat = np.diag([3.0, 1.0, 0.5])
    v = power_method(lambda u: mat @ u, 3, 10_000, seed=0, tol=1e-10)
    assert abs(v[0]) == pytest.approx(1.0)


def test_power_method_bad_operator():
    with pytest.raises(ValueError, match="shape"):
        power_method(lambda u: np.zeros(len(u) + 1), 3, 10, seed=0)
    with pytest.raises(ValueError, match="iters"):
        power_method(lambda u: u, 3, 0, seed=0)


def test_power_method_zero_operator():
    v = power_method(lambda u: np.zeros_like(u), 4, 10, seed=1)
    assert np.linalg.norm(v) == pytest.approx(1.0)


def test_initialize_output_norm():
    instance = sample_instance(Variant.REAL_GAUSSIAN, 20, 100, 3)
    result = initialize(instance)
    assert np.linalg.norm(result.z0) == pytest.approx(estimate_norm(instance.psi), abs=1e-12)
    assert np.linalg.norm(result.direction) == pytest.approx(1.0)
    assert result.selected.size == 23
    assert result.iterations_used == 200


def test_initialize_deterministic():
    instance = sample_instance(Variant.COMPLEX_GAUSSIAN, 16, 96, 4)
    a = initialize(instance, InitConfig(seed=9))
    b = initialize(instance, InitConfig(seed=9))
    assert np.array_equal(a.z0, b.z0)


def test_initialize_scaling():
    instance = sample_instance(Variant.REAL_GAUSSIAN, 20, 200, 5)
    scaled = measure(instance.model, 3.0 * instance.x_true)
    a = initialize(instance)
    b = initialize(scaled)
    assert b.norm_estimate == pytest.approx(3.0 * a.norm_estimate)
    assert distance(a.direction, b.direction) < 1e-8


def test_initialize_accuracy():
    # m/n = 50; first-order perturbation puts the typical error near 0.25
    good = 0
    for seed in range(50):
        instance = sample_instance(Variant.REAL_GAUSSIAN, 100, 5000, seed)
        z0 = initialize(instance).z0
        good += distance(z0, instance.x_true) <= 0.4 * np.linalg.norm(instance.x_true)
    assert good >= 48


@pytest.mark.parametrize("variant", [Variant.REAL_GAUSSIAN, Variant.COMPLEX_GAUSSIAN])
def test_lanczos_agrees_with_power(variant):
    instance = sample_instance(variant, 30, 300, 6)
    power = initialize(instance, InitConfig(power_iters=2000))
    lanczos = initialize(instance, InitConfig(method="lanczos", power_iters=2000, eig_tol=1e-12))
    assert distance(power.direction, lanczos.direction) < 1e-5
    assert lanczos.iterations_used < 2000


def test_lanczos_tiny_signal():
    instance = sample_instance(Variant.REAL_GAUSSIAN, 2, 40, 0)
    result = initialize(instance, InitConfig(method="lanczos"))
    assert np.linalg.norm(result.direction) == pytest.approx(1.0)


def test_more_data_better_init():
    errors = {}
    for ratio in (2, 4):
        errs = []
        for seed in range(20):
            instance = sample_instance(Variant.REAL_GAUSSIAN, 100, ratio * 100, seed)
            z0 = initialize(instance).z0
            errs.append(distance(z0, instance.x_true) / np.linalg.norm(instance.x_true))
        errors[ratio] = np.mean(errs)
    assert errors[4] < errors[2]
