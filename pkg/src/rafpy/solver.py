"""
Iteratively reweighted amplitude flow.

Each iteration computes ``u = A z``, weights ``w`` from the ratios
``r_i = |u_i| / psi_i``, and moves along the generalized gradient

    g = (1/m) A^H (w * (u - psi * phase(u)))

with ``phase(0) := 0``. The constant and hard-truncation weight schemes recover
the unweighted and truncated amplitude flows.
"""

from __future__ import annotations

import dataclasses
import enum
import logging
import time
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from rafpy.metrics import distance
from rafpy.sensing import ProblemInstance, SensingModel, Variant

logger = logging.getLogger(__name__)

# |A z| beyond this multiple of max(psi) counts as divergence
DIVERGENCE_LIMIT = 1e8


class SchemeKind(enum.Enum):
    RAF = "raf"
    CONSTANT = "constant"
    HARD_TRUNCATION = "hard"


@dataclass(frozen=True)
class WeightScheme:
    """How per-measurement gradient weights follow from ``r_i = |(Az)_i| / psi_i``."""

    kind: SchemeKind = SchemeKind.RAF
    beta: float = 10.0
    alpha: float = 0.3

    def __post_init__(self) -> None:
        if not self.beta > 0.0:
            msg = f"beta must be positive, got {self.beta}"
            raise ValueError(msg)
        if not self.alpha > 0.0:
            msg = f"alpha must be positive, got {self.alpha}"
            raise ValueError(msg)

    @classmethod
    def raf(cls, beta: float = 10.0) -> WeightScheme:
        return cls(SchemeKind.RAF, beta=beta)

    @classmethod
    def constant(cls) -> WeightScheme:
        return cls(SchemeKind.CONSTANT)

    @classmethod
    def hard_truncation(cls, alpha: float) -> WeightScheme:
        return cls(SchemeKind.HARD_TRUNCATION, alpha=alpha)

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind.value, "beta": self.beta, "alpha": self.alpha}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> WeightScheme:
        unknown = sorted(set(data) - {"kind", "beta", "alpha"})
        if unknown:
            msg = f"unknown weight scheme keys: {unknown}"
            raise ValueError(msg)
        kwargs = dict(data)
        if "kind" in kwargs:
            try:
                kwargs["kind"] = SchemeKind(kwargs["kind"])
            except ValueError:
                msg = f"unknown weight scheme '{kwargs['kind']}'"
                raise ValueError(msg) from None
        return cls(**kwargs)


@dataclass(frozen=True)
class SolverConfig:
    step_size: float = 2.0
    weight_scheme: WeightScheme = field(default_factory=WeightScheme.raf)
    max_iters: int = 2000
    stop_tol: float = 0.0
    trace_distance: bool = True
    log_every: int = 500

    def __post_init__(self) -> None:
        if not self.step_size > 0.0:
            msg = f"step_size must be positive, got {self.step_size}"
            raise ValueError(msg)
        if self.max_iters < 1:
            msg = f"max_iters must be positive, got {self.max_iters}"
            raise ValueError(msg)
        if not self.stop_tol >= 0.0:
            msg = f"stop_tol must be nonnegative, got {self.stop_tol}"
            raise ValueError(msg)

    @classmethod
    def for_variant(cls, variant: Variant, **kwargs: Any) -> SolverConfig:
        """Recommended defaults: mu=2, beta=10 (real); mu=6, beta=5 (complex, CDP)."""
        if variant.is_complex:
            kwargs.setdefault("step_size", 6.0)
            kwargs.setdefault("weight_scheme", WeightScheme.raf(5.0))
        return cls(**kwargs)

    def to_dict(self) -> dict[str, Any]:
        data = dataclasses.asdict(self)
        data["weight_scheme"] = self.weight_scheme.to_dict()
        return data

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> SolverConfig:
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            msg = f"unknown solver config keys: {unknown}"
            raise ValueError(msg)
        kwargs = dict(data)
        if isinstance(kwargs.get("weight_scheme"), Mapping):
            kwargs["weight_scheme"] = WeightScheme.from_dict(kwargs["weight_scheme"])
        return cls(**kwargs)


@dataclass(frozen=True)
class TraceRecord:
    residual: float
    loss: float
    distance: float | None = None


@dataclass
class SolverResult:
    z_final: NDArray[Any]
    iterations_run: int
    trace: list[TraceRecord]
    elapsed: float
    diverged: bool = False

    def as_arrays(self) -> dict[str, NDArray[np.float64]]:
        out = {
            "residual": np.array([rec.residual for rec in self.trace]),
            "loss": np.array([rec.loss for rec in self.trace]),
        }
        if self.trace and self.trace[0].distance is not None:
            out["distance"] = np.array([rec.distance for rec in self.trace])
        return out


def _ratios(az_abs: NDArray[np.float64], psi: NDArray[np.float64]) -> NDArray[np.float64]:
    # psi_i = 0 maps to +inf, |(Az)_i| = 0 to 0 (including 0/0)
    ratio = np.full_like(az_abs, np.inf)
    np.divide(az_abs, psi, out=ratio, where=psi > 0.0)
    ratio[az_abs == 0.0] = 0.0
    return ratio


def compute_weights(
    scheme: WeightScheme, az: ArrayLike, psi: ArrayLike
) -> NDArray[np.float64]:
    """Weights in ``[0, 1]`` for the current ``A z``."""
    az_abs = np.abs(np.asarray(az)).astype(np.float64, copy=False)
    psi = np.asarray(psi, dtype=np.float64)
    if az_abs.shape != psi.shape:
        msg = f"A z has shape {az_abs.shape} but psi has shape {psi.shape}"
        raise ValueError(msg)
    if scheme.kind is SchemeKind.CONSTANT:
        return np.ones_like(psi)
    ratio = _ratios(az_abs, psi)
    if scheme.kind is SchemeKind.HARD_TRUNCATION:
        return (ratio >= scheme.alpha).astype(np.float64)
    weights = np.ones_like(ratio)
    finite = np.isfinite(ratio)
    weights[finite] = ratio[finite] / (ratio[finite] + scheme.beta)
    return weights


def phase(u: NDArray[Any]) -> NDArray[Any]:
    """``u / |u|`` elementwise with ``phase(0) = 0``; the sign for real input."""
    if not np.iscomplexobj(u):
        return np.sign(u)  # type: ignore[no-any-return]
    mag = np.abs(u)
    out = np.zeros_like(u)
    np.divide(u, mag, out=out, where=mag > 0.0)
    return out


def generalized_gradient(
    model: SensingModel,
    z: ArrayLike,
    psi: ArrayLike,
    weights: ArrayLike,
    *,
    az: NDArray[Any] | None = None,
) -> NDArray[Any]:
    """``(1/m) A^H (w * (Az - psi * phase(Az)))``; pass ``az`` to reuse a forward product."""
    if az is None:
        az = model.forward(z)
    psi = np.asarray(psi, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if psi.shape != (model.m,) or weights.shape != (model.m,):
        msg = f"psi and weights must have shape ({model.m},)"
        raise ValueError(msg)
    return model.adjoint(weights * (az - psi * phase(az))) / model.m


def step(
    model: SensingModel, z: ArrayLike, psi: ArrayLike, config: SolverConfig
) -> tuple[NDArray[Any], NDArray[np.float64]]:
    """One reweighted gradient step; returns ``(z_next, weights)``."""
    z = np.asarray(z)
    az = model.forward(z)
    weights = compute_weights(config.weight_scheme, az, psi)
    grad = generalized_gradient(model, z, psi, weights, az=az)
    return z - config.step_size * grad, weights


def _loss_from(az: NDArray[Any], psi: NDArray[np.float64]) -> float:
    return float(np.sum((psi - np.abs(az)) ** 2)) / (2 * psi.size)


def loss(instance: ProblemInstance, z: ArrayLike) -> float:
    """Amplitude loss ``(1/2m) sum_i (psi_i - |(Az)_i|)**2``."""
    return _loss_from(instance.model.forward(z), instance.psi)


def _relative_residual(az: NDArray[Any], psi: NDArray[np.float64], psi_norm: float) -> float:
    res = float(np.linalg.norm(psi - np.abs(az)))
    return res / psi_norm if psi_norm > 0.0 else res


def solve(
    instance: ProblemInstance,
    init: ArrayLike,
    config: SolverConfig | None = None,
    *,
    callback: Callable[[int, NDArray[Any], TraceRecord], None] | None = None,
) -> SolverResult:
    """
    Run up to ``max_iters`` reweighted gradient steps from ``init``.

    The trace holds one record for the starting point and one per step. With
    ``stop_tol > 0`` the loop ends once ``||psi - |Az||| / ||psi|| < stop_tol``.
    ``callback(t, z, record)`` is invoked for every recorded point. A step whose
    ``|A z|`` is non-finite or exceeds ``DIVERGENCE_LIMIT * max(psi)`` is discarded,
    the run stops at the last accepted iterate and ``diverged`` is set.
    """
    config = config or SolverConfig.for_variant(instance.model.variant)
    model, psi = instance.model, instance.psi
    z = np.array(init, dtype=model.dtype if model.is_complex else None)
    if z.shape != (model.n,):
        msg = f"initial point must have shape ({model.n},), got {z.shape}"
        raise ValueError(msg)

    psi_norm = float(np.linalg.norm(psi))
    psi_max = float(np.max(psi)) if psi.size else 0.0
    blowup = DIVERGENCE_LIMIT * (psi_max if psi_max > 0.0 else 1.0)
    track = config.trace_distance
    trace: list[TraceRecord] = []

    def record(t: int, az: NDArray[Any]) -> TraceRecord:
        rec = TraceRecord(
            residual=_relative_residual(az, psi, psi_norm),
            loss=_loss_from(az, psi),
            distance=distance(z, instance.x_true, complex_valued=model.is_complex)
            if track
            else None,
        )
        trace.append(rec)
        if callback is not None:
            callback(t, z, rec)
        return rec

    start = time.perf_counter()
    az = model.forward(z)
    rec = record(0, az)
    iterations = 0
    diverged = False
    for t in range(1, config.max_iters + 1):
        if config.stop_tol > 0.0 and rec.residual < config.stop_tol:
            break
        weights = compute_weights(config.weight_scheme, az, psi)
        with np.errstate(over="ignore", invalid="ignore"):
            z_next = z - config.step_size * generalized_gradient(
                model, z, psi, weights, az=az
            )
            az_next = model.forward(z_next)
            peak = float(np.max(np.abs(az_next)))
        if not peak <= blowup:  # also catches NaN
            diverged = True
            break
        z, az = z_next, az_next
        rec = record(t, az)
        iterations = t
        if config.log_every and t % config.log_every == 0:
            logger.debug(
                "iteration %d: residual %.3e loss %.3e", t, rec.residual, rec.loss
            )
    elapsed = time.perf_counter() - start
    if diverged:
        logger.warning(
            "iterates diverged after %d iterations; consider a smaller step size",
            iterations,
        )
    return SolverResult(z, iterations, trace, elapsed, diverged)
