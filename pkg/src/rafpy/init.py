"""
Weighted maximal-correlation initialization.

The direction of ``x`` is taken as the principal eigenvector of

    Y = (1/m) sum_i w_i a_i a_i^H,    w_i = psi_i**gamma for i in S, else 0,

where ``S`` holds the indices of the ``|S|`` largest magnitudes, and the length is
the norm estimate ``sqrt(sum(psi**2) / m)``. ``Y`` is only ever applied, never
formed. Dividing by ``m`` rather than ``|S|`` leaves the eigenvectors unchanged.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from rafpy.rng import make_rng
from rafpy.sensing import ProblemInstance, SensingModel

logger = logging.getLogger(__name__)

METHODS = ("power", "lanczos")


@dataclass(frozen=True)
class InitConfig:
    subset_fraction: float = 3 / 13
    gamma: float = 0.5
    power_iters: int = 200
    eig_tol: float = 0.0
    method: str = "power"
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.subset_fraction <= 1.0:
            msg = f"subset_fraction must lie in (0, 1], got {self.subset_fraction}"
            raise ValueError(msg)
        if not self.gamma >= 0.0:
            msg = f"gamma must be nonnegative, got {self.gamma}"
            raise ValueError(msg)
        if self.power_iters < 1:
            msg = f"power_iters must be positive, got {self.power_iters}"
            raise ValueError(msg)
        if not self.eig_tol >= 0.0:
            msg = f"eig_tol must be nonnegative, got {self.eig_tol}"
            raise ValueError(msg)
        if self.method not in METHODS:
            msg = f"unknown eigensolver '{self.method}', expected one of {METHODS}"
            raise ValueError(msg)

    @classmethod
    def spectral(cls, **kwargs: Any) -> InitConfig:
        """Plain spectral initialization: all indices, ``w_i = psi_i**2``."""
        return cls(subset_fraction=1.0, gamma=2.0, **kwargs)

    @classmethod
    def maximal_correlation(cls, **kwargs: Any) -> InitConfig:
        """Unweighted maximal correlation (0/1 weights on ``S``)."""
        return cls(gamma=0.0, **kwargs)

    def cardinality(self, m: int) -> int:
        """``|S| = floor(subset_fraction * m)``, computed exactly for fractions like 3/13."""
        frac = Fraction(self.subset_fraction).limit_denominator(1_000_000)
        size = math.floor(frac * m)
        if size < 1:
            msg = f"subset_fraction={self.subset_fraction} selects no index out of m={m}"
            raise ValueError(msg)
        return size

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> InitConfig:
        known = {field.name for field in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            msg = f"unknown init config keys: {unknown}"
            raise ValueError(msg)
        return cls(**data)


@dataclass(frozen=True)
class InitResult:
    z0: NDArray[Any]
    direction: NDArray[Any]
    norm_estimate: float
    selected: NDArray[np.intp]
    iterations_used: int


def estimate_norm(psi: ArrayLike) -> float:
    """``sqrt(mean(psi**2))``, an estimate of ``||x||``."""
    psi = np.asarray(psi, dtype=np.float64)
    if psi.size == 0:
        msg = "cannot estimate the norm from empty data"
        raise ValueError(msg)
    return math.sqrt(float(np.mean(psi**2)))


def select_subset(psi: ArrayLike, cardinality: int) -> NDArray[np.intp]:
    """Indices of the ``cardinality`` largest entries, largest first; ties go to the lower index."""
    psi = np.asarray(psi, dtype=np.float64)
    if not 1 <= cardinality <= psi.size:
        msg = f"cardinality must lie in [1, {psi.size}], got {cardinality}"
        raise ValueError(msg)
    order = np.argsort(-psi, kind="stable")
    return order[:cardinality]


def init_weights(
    psi: ArrayLike, selected: ArrayLike, gamma: float
) -> NDArray[np.float64]:
    psi = np.asarray(psi, dtype=np.float64)
    weights = np.zeros_like(psi)
    idx = np.asarray(selected, dtype=np.intp)
    weights[idx] = psi[idx] ** gamma
    return weights


def apply_init_matrix(
    model: SensingModel, weights: NDArray[np.float64], v: ArrayLike
) -> NDArray[Any]:
    """``Y v = (1/m) A^H (w * (A v))``."""
    return model.adjoint(weights * model.forward(v)) / model.m


def _start_vector(n: int, seed: int, complex_valued: bool) -> NDArray[Any]:
    rng = make_rng(seed, "power-start")
    v: NDArray[Any] = rng.standard_normal(n)
    if complex_valued:
        v = v + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)  # type: ignore[no-any-return]


def _power_iterations(
    apply: Callable[[NDArray[Any]], NDArray[Any]],
    n: int,
    iters: int,
    seed: int,
    *,
    complex_valued: bool = False,
    tol: float = 0.0,
) -> tuple[NDArray[Any], int]:
    if iters < 1:
        msg = f"iters must be positive, got {iters}"
        raise ValueError(msg)
    v = _start_vector(n, seed, complex_valued)
    for it in range(1, iters + 1):
        y = apply(v)
        if y.shape != (n,):
            msg = f"operator returned shape {y.shape}, expected ({n},)"
            raise ValueError(msg)
        if tol > 0.0:
            rayleigh = np.vdot(v, y).real
            if np.linalg.norm(y - rayleigh * v) < tol:
                logger.debug("power method converged after %d iterations", it)
                return v, it
        norm = np.linalg.norm(y)
        if norm == 0.0:
            # zero operator: every unit vector is an eigenvector
            return v, it
        v = y / norm
    return v, iters


def power_method(
    apply: Callable[[NDArray[Any]], NDArray[Any]],
    n: int,
    iters: int,
    seed: int,
    *,
    complex_valued: bool = False,
    tol: float = 0.0,
) -> NDArray[Any]:
    """
    Approximate principal eigenvector of a Hermitian PSD operator.

    Starts from a seeded random unit vector and renormalizes after every
    application. With ``tol > 0`` it stops early once
    ``||Y v - (v^H Y v) v|| < tol``.
    """
    v, _ = _power_iterations(
        apply, n, iters, seed, complex_valued=complex_valued, tol=tol
    )
    return v


def _lanczos(
    apply: Callable[[NDArray[Any]], NDArray[Any]],
    n: int,
    config: InitConfig,
    complex_valued: bool,
) -> tuple[NDArray[Any], int]:
    calls = 0

    def matvec(v: NDArray[Any]) -> NDArray[Any]:
        nonlocal calls
        calls += 1
        return apply(np.ravel(v))

    dtype = np.complex128 if complex_valued else np.float64
    op = LinearOperator((n, n), matvec=matvec, dtype=dtype)
    v0 = _start_vector(n, config.seed, complex_valued)
    if n < 3:
        # ARPACK needs k < n - 1; fall back to plain iterations
        return _power_iterations(
            apply, n, config.power_iters, config.seed, complex_valued=complex_valued
        )
    try:
        _, vecs = eigsh(
            op, k=1, which="LA", v0=v0, maxiter=config.power_iters, tol=config.eig_tol
        )
    except ArpackNoConvergence as exc:
        if exc.eigenvectors.size == 0:
            raise
        logger.warning("Lanczos did not converge, using the best Ritz vector")
        vecs = exc.eigenvectors
    vec = vecs[:, 0]
    return vec / np.linalg.norm(vec), calls


def initialize(instance: ProblemInstance, config: InitConfig | None = None) -> InitResult:
    """Select ``S``, weight it, find the top eigenvector of ``Y`` and scale it to the norm estimate."""
    config = config or InitConfig()
    model, psi = instance.model, instance.psi
    selected = select_subset(psi, config.cardinality(model.m))
    weights = init_weights(psi, selected, config.gamma)

    def apply(v: NDArray[Any]) -> NDArray[Any]:
        return apply_init_matrix(model, weights, v)

    if config.method == "lanczos":
        direction, used = _lanczos(apply, model.n, config, model.is_complex)
    else:
        direction, used = _power_iterations(
            apply,
            model.n,
            config.power_iters,
            config.seed,
            complex_valued=model.is_complex,
            tol=config.eig_tol,
        )
    norm = estimate_norm(psi)
    logger.debug(
        "initialized: |S|=%d gamma=%g norm estimate %.6g after %d iterations",
        selected.size,
        config.gamma,
        norm,
        used,
    )
    return InitResult(
        z0=norm * direction,
        direction=direction,
        norm_estimate=norm,
        selected=selected,
        iterations_used=used,
    )
