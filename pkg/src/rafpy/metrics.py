from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from rafpy.sensing import ProblemInstance

SUCCESS_THRESHOLD = 1e-5


def distance(z: ArrayLike, x: ArrayLike, *, complex_valued: bool | None = None) -> float:
    """
    Distance modulo the trivial ambiguity.

    Real signals: ``min(||z - x||, ||z + x||)``. Complex signals: ``||z - e^{j phi} x||``
    with the minimizing global phase ``phi = arg(x^H z)``. ``complex_valued`` defaults
    to whether either argument has a complex dtype.
    """
    z = np.asarray(z)
    x = np.asarray(x)
    if z.shape != x.shape:
        msg = f"cannot compare shapes {z.shape} and {x.shape}"
        raise ValueError(msg)
    if complex_valued is None:
        complex_valued = bool(np.iscomplexobj(z) or np.iscomplexobj(x))
    if not complex_valued:
        return float(min(np.linalg.norm(z - x), np.linalg.norm(z + x)))
    inner = np.vdot(x, z)
    rotation = inner / abs(inner) if inner != 0 else 1.0
    return float(np.linalg.norm(z - rotation * x))


@dataclass(frozen=True)
class EvalReport:
    dist: float
    relative_error: float
    nmse: float
    residual: float
    success: bool
    threshold: float = SUCCESS_THRESHOLD

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


def evaluate(
    instance: ProblemInstance, z: ArrayLike, success_threshold: float = SUCCESS_THRESHOLD
) -> EvalReport:
    """Score an estimate; success means ``||psi - |Az||| / ||x|| < success_threshold``."""
    z = np.asarray(z)
    x_norm = float(np.linalg.norm(instance.x_true))
    if x_norm == 0.0:
        msg = "relative metrics need a nonzero ground truth"
        raise ValueError(msg)
    dist = distance(z, instance.x_true, complex_valued=instance.model.is_complex)
    residual = float(np.linalg.norm(instance.psi - np.abs(instance.model.forward(z))))
    residual /= x_norm
    relative = dist / x_norm
    return EvalReport(
        dist=dist,
        relative_error=relative,
        nmse=relative**2,
        residual=residual,
        success=bool(residual < success_threshold),
        threshold=success_threshold,
    )


def nmse_db(nmse: float) -> float:
    return 10.0 * math.log10(nmse) if nmse > 0.0 else -math.inf
