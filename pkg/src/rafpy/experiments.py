"""
Monte-Carlo studies of the solver.

Each trial draws its model, signal, noise and power-method start from streams
derived from ``(master_seed, experiment, sweep_index, trial)``, so a report does not
depend on the order in which trials run. Trials of a sweep point may run on a
thread pool; their outcomes are collected into an indexed list before any
statistic is reduced.
"""

from __future__ import annotations

import dataclasses
import enum
import hashlib
import json
import logging
import math
import os
import time
from collections.abc import Callable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, TypeVar

import numpy as np
import pandas as pd
from numpy.typing import NDArray
from PIL import Image, UnidentifiedImageError
from scipy.stats import binomtest

from rafpy.init import InitConfig, initialize
from rafpy.metrics import SUCCESS_THRESHOLD, EvalReport, evaluate, nmse_db
from rafpy.rng import ALGORITHM, derive_seed
from rafpy.sensing import ProblemInstance, Variant, sample_instance
from rafpy.solver import SolverConfig, SolverResult, solve

logger = logging.getLogger(__name__)

T = TypeVar("T")


class Experiment(enum.Enum):
    SUCCESS_RATE = "success-rate"
    NMSE_VS_SNR = "nmse"
    INIT_QUALITY = "init"
    LIMIT_HISTOGRAM = "limit-hist"
    CDP_RECOVERY = "cdp"


# full-size settings that the small default sweeps stand in for
REFERENCE_SCALE: dict[Experiment, dict[str, Any]] = {
    Experiment.SUCCESS_RATE: {"n": 1000, "ratios": "1:5:0.1", "trials": 100},
    Experiment.NMSE_VS_SNR: {"n": 1000, "ratios": [3, 4, 5], "trials": 100},
    Experiment.INIT_QUALITY: {"n": 1000, "m": "2n-1", "trials": 100},
    Experiment.LIMIT_HISTOGRAM: {"n": 2000, "m": 3999, "trials": 200},
    Experiment.CDP_RECOVERY: {"n": 2073600, "masks": 4, "power_iters": 100, "iters": 100},
}

_SWEPT = (Experiment.SUCCESS_RATE, Experiment.NMSE_VS_SNR, Experiment.INIT_QUALITY)

# power and gradient iterations per cdp run unless configured
CDP_ITERS = 100
CDP_ERROR_TARGET = 1e-3


@dataclass(frozen=True)
class SweepSpec:
    """
    What to sweep and how to run each trial.

    ``values`` holds m/n ratios (success-rate, init), SNRs in dB (nmse, ``inf`` for
    noiseless) or mask counts K (cdp); limit-hist ignores it and uses ``m = 2n - 1``.
    ``ratios`` is the m/n axis of the nmse sweep. With ``variant=CDP`` a ratio m/n is
    the mask count K and must be a whole number. ``init=None`` and ``solver=None``
    select the defaults for ``variant``; cdp defaults to 100 power iterations and
    100 gradient iterations per run.
    """

    experiment: Experiment
    n: int = 200
    values: tuple[float, ...] = ()
    ratios: tuple[float, ...] = (3.0, 4.0, 5.0)
    gammas: tuple[float, ...] = (0.0, 0.5)
    include_spectral: bool = True
    trials: int = 100
    master_seed: int = 0
    variant: Variant = Variant.REAL_GAUSSIAN
    init: InitConfig | None = None
    solver: SolverConfig | None = None
    success_threshold: float = SUCCESS_THRESHOLD
    bin_width: float = 2.5
    hist_max: float = 40.0
    threads: int | None = None
    keep_traces: bool = False
    include_timing: bool = False

    def __post_init__(self) -> None:
        if self.n < 1:
            msg = f"n must be positive, got {self.n}"
            raise ValueError(msg)
        if self.trials < 1:
            msg = f"trials must be positive, got {self.trials}"
            raise ValueError(msg)
        if self.experiment in (*_SWEPT, Experiment.CDP_RECOVERY) and not self.values:
            msg = f"{self.experiment.value} needs a nonempty sweep list"
            raise ValueError(msg)
        if self.experiment is Experiment.NMSE_VS_SNR and not self.ratios:
            msg = "nmse needs a nonempty list of m/n ratios"
            raise ValueError(msg)
        if self.experiment is Experiment.INIT_QUALITY and not (
            self.gammas or self.include_spectral
        ):
            msg = "init needs at least one configuration"
            raise ValueError(msg)
        if self.experiment is Experiment.CDP_RECOVERY and any(
            k < 1 or not float(k).is_integer() for k in self.values
        ):
            msg = f"mask counts must be positive integers, got {self.values}"
            raise ValueError(msg)
        if self.variant is Variant.CDP:
            if self.experiment is Experiment.LIMIT_HISTOGRAM:
                msg = "limit-hist needs m = 2n - 1, which no mask count gives"
                raise ValueError(msg)
            ratios = self.ratios if self.experiment is Experiment.NMSE_VS_SNR else self.values
            if self.experiment in _SWEPT and any(
                r < 1 or not float(r).is_integer() for r in ratios
            ):
                msg = (
                    "with the cdp model m/n is the mask count K and must be "
                    f"a positive integer, got {ratios}"
                )
                raise ValueError(msg)
        if not (self.bin_width > 0.0 and self.hist_max > self.bin_width):
            msg = "histogram needs bin_width > 0 and hist_max > bin_width"
            raise ValueError(msg)
        if self.threads is not None and self.threads < 1:
            msg = f"threads must be positive, got {self.threads}"
            raise ValueError(msg)

    def init_config(self) -> InitConfig:
        if self.init is not None:
            return self.init
        if self.experiment is Experiment.CDP_RECOVERY:
            return InitConfig(power_iters=CDP_ITERS)
        return InitConfig()

    def solver_config(self) -> SolverConfig:
        if self.solver is not None:
            return self.solver
        if self.experiment is Experiment.CDP_RECOVERY:
            return SolverConfig.for_variant(Variant.CDP, max_iters=CDP_ITERS)
        return SolverConfig.for_variant(self.variant)

    def to_dict(self) -> dict[str, Any]:
        """Everything that determines the numbers in a report."""
        return {
            "experiment": self.experiment.value,
            "n": self.n,
            "values": list(self.values),
            "ratios": list(self.ratios),
            "gammas": list(self.gammas),
            "include_spectral": self.include_spectral,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "variant": self.variant.value,
            "init": self.init_config().to_dict(),
            "solver": self.solver_config().to_dict(),
            "success_threshold": self.success_threshold,
            "bin_width": self.bin_width,
            "hist_max": self.hist_max,
        }

    def config_hash(self) -> str:
        text = json.dumps(to_jsonable(self.to_dict()), sort_keys=True)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


@dataclass
class ExperimentReport:
    experiment: Experiment
    rows: list[dict[str, Any]]
    metadata: dict[str, Any]
    trials: list[dict[str, Any]] = field(default_factory=list)
    recovered: NDArray[np.float64] | None = None

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame.from_records(self.rows)

    def write_csv(self, path: os.PathLike[str] | str) -> None:
        self.to_frame().to_csv(path, index=False, encoding="utf-8", lineterminator="\n")

    def to_json(self) -> str:
        payload = {
            "experiment": self.experiment.value,
            "metadata": self.metadata,
            "rows": self.rows,
            "trials": self.trials,
        }
        return json.dumps(to_jsonable(payload), indent=2, sort_keys=True) + "\n"

    def write_json(self, path: os.PathLike[str] | str) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    def summary(self) -> str:
        frame = self.to_frame().drop(columns=["config_hash"], errors="ignore")
        return str(frame.to_string(index=False))


def to_jsonable(value: Any) -> Any:
    """Plain JSON types; non-finite floats become the strings 'inf', '-inf', 'nan'."""
    if isinstance(value, Mapping):
        return {str(key): to_jsonable(val) for key, val in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(val) for val in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, enum.Enum):
        return value.value
    return value


def _map_trials(fn: Callable[[int], T], count: int, threads: int | None) -> list[T]:
    workers = threads if threads is not None else (os.cpu_count() or 1)
    if workers <= 1 or count <= 1:
        return [fn(j) for j in range(count)]
    with ThreadPoolExecutor(max_workers=min(workers, count)) as pool:
        return list(pool.map(fn, range(count)))


def _measurements(spec: SweepSpec, ratio: float) -> tuple[int, int]:
    """``(m_or_k, m)`` for one m/n value; with the cdp model K = m/n."""
    if spec.variant is Variant.CDP:
        k = int(ratio)
        return k, k * spec.n
    m = round(ratio * spec.n)
    if m < 1:
        msg = f"m/n={ratio} gives no measurements at n={spec.n}"
        raise ValueError(msg)
    return m, m


@dataclass(frozen=True)
class TrialOutcome:
    seed: int
    init: EvalReport
    final: EvalReport
    loss: float
    iterations: int
    elapsed: float
    diverged: bool = False
    residual_trace: list[float] | None = None

    def to_dict(self, include_timing: bool) -> dict[str, Any]:
        out: dict[str, Any] = {
            "seed": self.seed,
            "init_relative_error": self.init.relative_error,
            "relative_error": self.final.relative_error,
            "nmse": self.final.nmse,
            "residual": self.final.residual,
            "success": self.final.success,
            "loss": self.loss,
            "iterations": self.iterations,
            "diverged": self.diverged,
        }
        if include_timing:
            out["elapsed"] = self.elapsed
        if self.residual_trace is not None:
            out["residual_trace"] = self.residual_trace
        return out


def _solve_instance(
    instance: ProblemInstance, seed: int, spec: SweepSpec
) -> tuple[EvalReport, EvalReport, SolverResult]:
    init_cfg = dataclasses.replace(spec.init_config(), seed=derive_seed(seed, "init"))
    start = initialize(instance, init_cfg)
    result = solve(instance, start.z0, spec.solver_config())
    return (
        evaluate(instance, start.z0, spec.success_threshold),
        evaluate(instance, result.z_final, spec.success_threshold),
        result,
    )


def _run_trial(
    spec: SweepSpec, m_or_k: int, seed: int, snr_db: float = math.inf
) -> TrialOutcome:
    instance = sample_instance(spec.variant, spec.n, m_or_k, seed, snr_db=snr_db)
    init_report, final_report, result = _solve_instance(instance, seed, spec)
    return TrialOutcome(
        seed=seed,
        init=init_report,
        final=final_report,
        loss=result.trace[-1].loss,
        iterations=result.iterations_run,
        elapsed=result.elapsed,
        diverged=result.diverged,
        residual_trace=[rec.residual for rec in result.trace] if spec.keep_traces else None,
    )


def _run_point(
    spec: SweepSpec, index: int, m_or_k: int, snr_db: float = math.inf
) -> list[TrialOutcome]:
    def trial(j: int) -> TrialOutcome:
        seed = derive_seed(spec.master_seed, spec.experiment.value, index, j)
        return _run_trial(spec, m_or_k, seed, snr_db)

    return _map_trials(trial, spec.trials, spec.threads)


def _metadata(spec: SweepSpec, started: float) -> dict[str, Any]:
    meta: dict[str, Any] = {
        "spec": spec.to_dict(),
        "config_hash": spec.config_hash(),
        "rng": ALGORITHM,
        "reference_scale": REFERENCE_SCALE[spec.experiment],
    }
    if spec.include_timing:
        meta["wall_clock"] = time.perf_counter() - started
    return meta


def _trial_records(
    spec: SweepSpec, key: Mapping[str, Any], outcomes: Sequence[TrialOutcome]
) -> list[dict[str, Any]]:
    return [
        {**key, "trial": j, **outcome.to_dict(spec.include_timing)}
        for j, outcome in enumerate(outcomes)
    ]


def _require(spec: SweepSpec, experiment: Experiment) -> None:
    if spec.experiment is not experiment:
        msg = f"expected a {experiment.value} sweep, got {spec.experiment.value}"
        raise ValueError(msg)


def run_success_rate(spec: SweepSpec) -> ExperimentReport:
    """Empirical success rate of init + solve for each m/n in ``spec.values``."""
    _require(spec, Experiment.SUCCESS_RATE)
    started = time.perf_counter()
    chash = spec.config_hash()
    rows, trials = [], []
    for index, ratio in enumerate(spec.values):
        m_or_k, m = _measurements(spec, ratio)
        outcomes = _run_point(spec, index, m_or_k)
        successes = sum(o.final.success for o in outcomes)
        rows.append(
            {
                "ratio": ratio,
                "m": m,
                "trials": spec.trials,
                "successes": successes,
                "success_rate": successes / spec.trials,
                "diverged": sum(o.diverged for o in outcomes),
                "mean_relative_error": float(
                    np.mean([o.final.relative_error for o in outcomes])
                ),
                "median_loss": float(np.median([o.loss for o in outcomes])),
                "config_hash": chash,
            }
        )
        trials += _trial_records(spec, {"ratio": ratio}, outcomes)
        logger.info(
            "m/n=%g: %d/%d successes", ratio, successes, spec.trials
        )
    return ExperimentReport(spec.experiment, rows, _metadata(spec, started), trials)


def run_nmse_vs_snr(spec: SweepSpec) -> ExperimentReport:
    """Mean NMSE for each (m/n, SNR) pair; rows are ordered by ratio, then SNR."""
    _require(spec, Experiment.NMSE_VS_SNR)
    started = time.perf_counter()
    chash = spec.config_hash()
    rows, trials = [], []
    index = 0
    for ratio in spec.ratios:
        m_or_k, m = _measurements(spec, ratio)
        for snr in spec.values:
            outcomes = _run_point(spec, index, m_or_k, snr)
            index += 1
            mean_nmse = float(np.mean([o.final.nmse for o in outcomes]))
            rows.append(
                {
                    "ratio": ratio,
                    "m": m,
                    "snr_db": snr,
                    "trials": spec.trials,
                    "mean_nmse": mean_nmse,
                    "mean_nmse_db": nmse_db(mean_nmse),
                    "diverged": sum(o.diverged for o in outcomes),
                    "config_hash": chash,
                }
            )
            trials += _trial_records(spec, {"ratio": ratio, "snr_db": snr}, outcomes)
            logger.info("m/n=%g SNR=%g dB: mean NMSE %.3e", ratio, snr, mean_nmse)
    return ExperimentReport(spec.experiment, rows, _metadata(spec, started), trials)


def init_variants(spec: SweepSpec) -> list[tuple[str, InitConfig]]:
    """Labelled initialization configurations compared by :func:`run_init_quality`."""
    base = spec.init_config()
    variants = [
        (f"gamma={gamma:g}", dataclasses.replace(base, gamma=gamma))
        for gamma in spec.gammas
    ]
    if spec.include_spectral:
        variants.append(
            (
                "spectral",
                dataclasses.replace(base, subset_fraction=1.0, gamma=2.0),
            )
        )
    return variants


def run_init_quality(spec: SweepSpec) -> ExperimentReport:
    """
    Relative initialization error of several weightings on matched instances.

    The baseline is the ``gamma=0`` configuration when present (else the first);
    every other row carries the number of paired wins against it and a one-sided
    sign-test p-value.
    """
    _require(spec, Experiment.INIT_QUALITY)
    started = time.perf_counter()
    chash = spec.config_hash()
    variants = init_variants(spec)
    labels = [label for label, _ in variants]
    baseline = next(
        (
            i
            for i, (_, cfg) in enumerate(variants)
            if cfg.gamma == 0.0 and cfg.subset_fraction < 1.0
        ),
        0,
    )
    rows, trials = [], []
    for index, ratio in enumerate(spec.values):
        m_or_k, m = _measurements(spec, ratio)

        def trial(j: int, index: int = index, m_or_k: int = m_or_k) -> list[float]:
            seed = derive_seed(spec.master_seed, spec.experiment.value, index, j)
            instance = sample_instance(spec.variant, spec.n, m_or_k, seed)
            errors = []
            for _, cfg in variants:
                start = initialize(
                    instance, dataclasses.replace(cfg, seed=derive_seed(seed, "init"))
                )
                errors.append(evaluate(instance, start.z0).relative_error)
            return errors

        errors = np.array(_map_trials(trial, spec.trials, spec.threads))
        for k, label in enumerate(labels):
            row: dict[str, Any] = {
                "ratio": ratio,
                "m": m,
                "label": label,
                "gamma": variants[k][1].gamma,
                "subset_fraction": variants[k][1].subset_fraction,
                "trials": spec.trials,
                "mean_relative_error": float(np.mean(errors[:, k])),
                "median_relative_error": float(np.median(errors[:, k])),
                "wins_vs_baseline": None,
                "sign_test_pvalue": None,
                "config_hash": chash,
            }
            if k != baseline:
                diff = errors[:, k] - errors[:, baseline]
                wins = int(np.count_nonzero(diff < 0.0))
                decided = int(np.count_nonzero(diff != 0.0))
                row["wins_vs_baseline"] = wins
                if decided:
                    row["sign_test_pvalue"] = float(
                        binomtest(wins, decided, 0.5, alternative="greater").pvalue
                    )
            rows.append(row)
        trials += [
            {"ratio": ratio, "trial": j, **dict(zip(labels, errs.tolist(), strict=True))}
            for j, errs in enumerate(errors)
        ]
        logger.info(
            "m/n=%g: mean init errors %s",
            ratio,
            ", ".join(f"{lab} {np.mean(errors[:, k]):.4f}" for k, lab in enumerate(labels)),
        )
    meta = _metadata(spec, started)
    meta["baseline"] = labels[baseline]
    return ExperimentReport(spec.experiment, rows, meta, trials)


def run_limit_histogram(spec: SweepSpec) -> ExperimentReport:
    """Histogram of ``-log10 L(z^T)`` at the information-theoretic limit ``m = 2n - 1``."""
    _require(spec, Experiment.LIMIT_HISTOGRAM)
    started = time.perf_counter()
    chash = spec.config_hash()
    m = 2 * spec.n - 1
    outcomes = _run_point(spec, 0, m)
    losses = np.array([o.loss for o in outcomes])
    with np.errstate(divide="ignore"):
        neglog = -np.log10(losses)
    edges = np.arange(0.0, spec.hist_max + spec.bin_width / 2, spec.bin_width)
    # out-of-range values (including L = 0) fall into the end bins
    clipped = np.clip(neglog, edges[0], np.nextafter(edges[-1], -np.inf))
    counts, _ = np.histogram(clipped, bins=edges)
    rows = [
        {
            "bin_low": float(lo),
            "bin_high": float(hi),
            "count": int(count),
            "fraction": int(count) / spec.trials,
            "config_hash": chash,
        }
        for lo, hi, count in zip(edges[:-1], edges[1:], counts, strict=True)
    ]
    success = np.array([o.final.success for o in outcomes])
    meta = _metadata(spec, started)
    meta.update(
        {
            "m": m,
            "success_rate": float(success.mean()),
            "diverged": sum(o.diverged for o in outcomes),
            "median_loss": float(np.median(losses)),
            "median_loss_successes": float(np.median(losses[success]))
            if success.any()
            else None,
        }
    )
    logger.info(
        "n=%d m=%d: median loss %.3e, success rate %.2f",
        spec.n,
        m,
        meta["median_loss"],
        meta["success_rate"],
    )
    trials = _trial_records(spec, {"m": m}, outcomes)
    return ExperimentReport(spec.experiment, rows, meta, trials)


def load_image(path: os.PathLike[str] | str) -> NDArray[np.float64]:
    """Read a PNG/PGM image as floats in [0, 1], shape (H, W) or (H, W, 3)."""
    path = Path(path)
    if not path.is_file():
        msg = f"image not found: {path}"
        raise FileNotFoundError(msg)
    try:
        with Image.open(path) as img:
            img.load()
            if img.mode in ("1", "L", "P", "LA", "RGB", "RGBA", "CMYK"):
                img = img.convert("L" if img.mode in ("1", "L", "LA") else "RGB")
                return np.asarray(img, dtype=np.float64) / 255.0
            # 16-bit and float grayscale
            data = np.asarray(img, dtype=np.float64)
    except (UnidentifiedImageError, OSError) as exc:
        msg = f"cannot decode image {path}: {exc}"
        raise ValueError(msg) from exc
    peak = data.max()
    return data / peak if peak > 0 else data


def save_image(path: os.PathLike[str] | str, image: NDArray[np.float64]) -> None:
    pixels = np.round(np.clip(image, 0.0, 1.0) * 255.0).astype(np.uint8)
    Image.fromarray(pixels).save(path, format="PNG")


def align_real(z: NDArray[Any]) -> NDArray[np.float64]:
    """Rotate ``z`` so its sum is real and positive, then keep the real part."""
    total = np.sum(z)
    if total != 0:
        z = z * (abs(total) / total)
    return np.real(z).astype(np.float64)


def _band_row(
    masks: int, band: int, n: int, report: EvalReport, chash: str
) -> dict[str, Any]:
    return {
        "masks": masks,
        "band": band,
        "n": n,
        "relative_error": report.relative_error,
        "residual": report.residual,
        "success": report.success,
        "config_hash": chash,
    }


def run_cdp_recovery(
    spec: SweepSpec,
    image_path: os.PathLike[str] | str | None = None,
    output_path: os.PathLike[str] | str | None = None,
) -> ExperimentReport:
    """
    Coded-diffraction recovery of random complex signals or of an image.

    Without ``image_path`` every mask count in ``spec.values`` gets ``spec.trials``
    random complex signals of length ``spec.n`` and one aggregate row. With an
    image, each color band is vectorized and recovered independently, one row per
    band and mask count; the recovered image (for the last mask count) is returned
    on the report and written to ``output_path`` as PNG.
    """
    _require(spec, Experiment.CDP_RECOVERY)
    started = time.perf_counter()
    spec = dataclasses.replace(spec, variant=Variant.CDP)
    chash = spec.config_hash()
    rows: list[dict[str, Any]] = []
    trials: list[dict[str, Any]] = []

    if image_path is None:
        for index, k in enumerate(spec.values):
            outcomes = _run_point(spec, index, int(k))
            errors = [o.final.relative_error for o in outcomes]
            successes = sum(o.final.success for o in outcomes)
            below = sum(err < CDP_ERROR_TARGET for err in errors)
            rows.append(
                {
                    "masks": int(k),
                    "n": spec.n,
                    "m": int(k) * spec.n,
                    "trials": spec.trials,
                    "successes": successes,
                    "success_rate": successes / spec.trials,
                    "fraction_below_1e-3": below / spec.trials,
                    "diverged": sum(o.diverged for o in outcomes),
                    "mean_relative_error": float(np.mean(errors)),
                    "median_relative_error": float(np.median(errors)),
                    "config_hash": chash,
                }
            )
            trials += _trial_records(spec, {"masks": int(k)}, outcomes)
            logger.info(
                "K=%d: %d/%d trials below 1e-3 relative error", int(k), below, spec.trials
            )
        return ExperimentReport(spec.experiment, rows, _metadata(spec, started), trials)

    image = load_image(image_path)
    bands = image[..., np.newaxis] if image.ndim == 2 else image
    recovered = np.zeros_like(bands)
    for index, k in enumerate(spec.values):
        for b in range(bands.shape[-1]):
            x = bands[..., b].ravel()
            seed = derive_seed(spec.master_seed, spec.experiment.value, index, b)
            if not np.any(x):
                logger.info("band %d is blank, nothing to recover", b)
                continue
            instance = sample_instance(Variant.CDP, x.size, int(k), seed, x=x)
            init_report, final, result = _solve_instance(instance, seed, spec)
            recovered[..., b] = align_real(result.z_final).reshape(bands.shape[:-1])
            rows.append(_band_row(int(k), b, x.size, final, chash))
            trials.append(
                {
                    "masks": int(k),
                    "band": b,
                    "seed": seed,
                    "init_relative_error": init_report.relative_error,
                    "relative_error": final.relative_error,
                    "iterations": result.iterations_run,
                }
            )
            logger.info(
                "K=%d band %d: relative error %.4e", int(k), b, final.relative_error
            )
    out = recovered[..., 0] if image.ndim == 2 else recovered
    meta = _metadata(spec, started)
    meta["image_shape"] = list(image.shape)
    if output_path is not None:
        save_image(output_path, out)
        meta["recovered_path"] = os.fspath(output_path)
        logger.info("wrote recovered image to %s", output_path)
    return ExperimentReport(spec.experiment, rows, meta, trials, recovered=out)


RUNNERS: dict[Experiment, Callable[[SweepSpec], ExperimentReport]] = {
    Experiment.SUCCESS_RATE: run_success_rate,
    Experiment.NMSE_VS_SNR: run_nmse_vs_snr,
    Experiment.INIT_QUALITY: run_init_quality,
    Experiment.LIMIT_HISTOGRAM: run_limit_histogram,
    Experiment.CDP_RECOVERY: run_cdp_recovery,
}


def run(spec: SweepSpec) -> ExperimentReport:
    return RUNNERS[spec.experiment](spec)
