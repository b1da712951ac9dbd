from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.sparse.linalg import LinearOperator

from rafpy.rng import derive_seed, make_rng

logger = logging.getLogger(__name__)

# dense Gaussian models above this many entries get a warning
DENSE_ENTRY_LIMIT = 10_000_000

_MASK_ALPHABET = np.array([1.0, -1.0, 1.0j, -1.0j], dtype=np.complex128)


class Variant(enum.Enum):
    """Measurement model family."""

    REAL_GAUSSIAN = "real-gaussian"
    COMPLEX_GAUSSIAN = "complex-gaussian"
    CDP = "cdp"

    @property
    def is_complex(self) -> bool:
        return self is not Variant.REAL_GAUSSIAN


class SensingModel:
    """
    Matrix-free view of a measurement operator ``A`` with rows ``a_i``.

    Gaussian models hold the dense ``m x n`` matrix. CDP models hold ``K`` masks of
    length ``n`` and apply ``A`` as the stacked, unnormalized DFTs of the
    mask-multiplied signal, so ``m = K * n`` and ``A`` is never materialized.
    """

    def __init__(
        self,
        variant: Variant,
        n: int,
        *,
        matrix: NDArray[Any] | None = None,
        masks: NDArray[np.complex128] | None = None,
    ) -> None:
        if n < 1:
            msg = f"signal length must be positive, got n={n}"
            raise ValueError(msg)
        if variant is Variant.CDP:
            if masks is None or masks.ndim != 2 or masks.shape[1] != n:
                msg = "CDP model needs a (K, n) array of masks"
                raise ValueError(msg)
            if masks.shape[0] < 1:
                msg = "CDP model needs at least one mask"
                raise ValueError(msg)
            self._matrix = None
            self._masks = masks
            self._m = masks.shape[0] * n
        else:
            if matrix is None or matrix.ndim != 2 or matrix.shape[1] != n:
                msg = "Gaussian model needs an (m, n) matrix"
                raise ValueError(msg)
            if matrix.shape[0] < 1:
                msg = "Gaussian model needs at least one row"
                raise ValueError(msg)
            self._matrix = matrix
            self._masks = None
            self._m = matrix.shape[0]
        self._variant = variant
        self._n = n

    @classmethod
    def from_matrix(cls, matrix: ArrayLike) -> SensingModel:
        """Wrap an explicit matrix; complex entries make it a complex Gaussian model."""
        arr = np.asarray(matrix)
        if np.iscomplexobj(arr):
            return cls(
                Variant.COMPLEX_GAUSSIAN,
                arr.shape[-1],
                matrix=arr.astype(np.complex128),
            )
        return cls(Variant.REAL_GAUSSIAN, arr.shape[-1], matrix=arr.astype(np.float64))

    @classmethod
    def from_masks(cls, masks: ArrayLike) -> SensingModel:
        arr = np.atleast_2d(np.asarray(masks, dtype=np.complex128))
        return cls(Variant.CDP, arr.shape[1], masks=arr)

    def __repr__(self) -> str:
        return f"SensingModel(variant={self._variant.value}, m={self.m}, n={self.n})"

    @property
    def variant(self) -> Variant:
        return self._variant

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return self._m

    @property
    def shape(self) -> tuple[int, int]:
        return (self._m, self._n)

    @property
    def is_complex(self) -> bool:
        return self._variant.is_complex

    @property
    def dtype(self) -> np.dtype[Any]:
        return np.dtype(np.complex128 if self.is_complex else np.float64)

    @property
    def matrix(self) -> NDArray[Any]:
        if self._matrix is None:
            msg = "CDP models do not materialize A, use dense() for small n"
            raise AttributeError(msg)
        return self._matrix

    @property
    def masks(self) -> NDArray[np.complex128]:
        if self._masks is None:
            msg = "only CDP models have masks"
            raise AttributeError(msg)
        return self._masks

    @property
    def mask_count(self) -> int:
        return 0 if self._masks is None else self._masks.shape[0]

    def forward(self, z: ArrayLike) -> NDArray[Any]:
        """Return ``A z``."""
        z = np.asarray(z)
        if z.shape != (self._n,):
            msg = f"expected a signal of shape ({self._n},), got {z.shape}"
            raise ValueError(msg)
        if self._masks is not None:
            return np.fft.fft(self._masks * z, axis=-1).reshape(-1)
        assert self._matrix is not None
        return self._matrix @ z  # type: ignore[no-any-return]

    def adjoint(self, u: ArrayLike) -> NDArray[Any]:
        """Return ``A^H u``."""
        u = np.asarray(u)
        if u.shape != (self._m,):
            msg = f"expected a measurement vector of shape ({self._m},), got {u.shape}"
            raise ValueError(msg)
        if self._masks is not None:
            blocks = u.reshape(self._masks.shape)
            # F^H = n * ifft for the unnormalized kernel
            back = np.fft.ifft(blocks, axis=-1) * self._n
            return np.sum(np.conj(self._masks) * back, axis=0)  # type: ignore[no-any-return]
        assert self._matrix is not None
        if self.is_complex:
            return self._matrix.conj().T @ u  # type: ignore[no-any-return]
        return self._matrix.T @ u  # type: ignore[no-any-return]

    def dense(self) -> NDArray[Any]:
        """Explicit ``A``; CDP models assemble it column by column."""
        if self._matrix is not None:
            return self._matrix
        eye = np.eye(self._n, dtype=np.complex128)
        return np.stack([self.forward(col) for col in eye], axis=1)

    def as_linear_operator(self) -> LinearOperator:
        return LinearOperator(
            self.shape,
            matvec=self.forward,
            rmatvec=self.adjoint,
            dtype=self.dtype,
        )


def sample_model(variant: Variant, n: int, m_or_k: int, rng_seed: int) -> SensingModel:
    """
    Draw a measurement model.

    ``m_or_k`` is the row count m for Gaussian models and the mask count K for CDP.
    Real Gaussian entries are standard normal; complex Gaussian entries have
    independent real and imaginary parts of variance 1/2; CDP mask entries are
    uniform on {1, -1, j, -j}.
    """
    if n < 1:
        msg = f"signal length must be positive, got n={n}"
        raise ValueError(msg)
    if m_or_k < 1:
        what = "mask count K" if variant is Variant.CDP else "measurement count m"
        msg = f"{what} must be positive, got {m_or_k}"
        raise ValueError(msg)

    rng = make_rng(rng_seed, "sensing", variant.value)
    if variant is Variant.CDP:
        picks = rng.integers(0, len(_MASK_ALPHABET), size=(m_or_k, n))
        return SensingModel(variant, n, masks=_MASK_ALPHABET[picks])

    if m_or_k * n > DENSE_ENTRY_LIMIT:
        logger.warning(
            "materializing a dense %d x %d Gaussian model (%d entries)",
            m_or_k,
            n,
            m_or_k * n,
        )
    if variant is Variant.REAL_GAUSSIAN:
        matrix: NDArray[Any] = rng.standard_normal((m_or_k, n))
    else:
        scale = math.sqrt(0.5)
        matrix = scale * (
            rng.standard_normal((m_or_k, n)) + 1j * rng.standard_normal((m_or_k, n))
        )
    return SensingModel(variant, n, matrix=matrix)


def apply_forward(model: SensingModel, z: ArrayLike) -> NDArray[Any]:
    return model.forward(z)


def apply_adjoint(model: SensingModel, u: ArrayLike) -> NDArray[Any]:
    return model.adjoint(u)


def sample_signal(n: int, complex_valued: bool, rng_seed: int) -> NDArray[Any]:
    """Ground truth ``x ~ N(0, I)``, or ``CN(0, I)`` when ``complex_valued``."""
    if n < 1:
        msg = f"signal length must be positive, got n={n}"
        raise ValueError(msg)
    rng = make_rng(rng_seed, "signal")
    if not complex_valued:
        return rng.standard_normal(n)
    return math.sqrt(0.5) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


@dataclass(frozen=True)
class ProblemInstance:
    """A model realization with its ground truth and magnitude data ``psi``."""

    model: SensingModel
    x_true: NDArray[Any]
    psi: NDArray[np.float64]
    noise_sigma: float = 0.0

    @property
    def m(self) -> int:
        return self.model.m

    @property
    def n(self) -> int:
        return self.model.n


def measure(
    model: SensingModel, x: ArrayLike, noise_sigma: float = 0.0, rng_seed: int = 0
) -> ProblemInstance:
    """``psi_i = max(0, |(A x)_i| + eta_i)`` with ``eta ~ N(0, noise_sigma**2 I)``."""
    if not noise_sigma >= 0.0:
        msg = f"noise_sigma must be nonnegative, got {noise_sigma}"
        raise ValueError(msg)
    x = np.asarray(x)
    psi = np.abs(model.forward(x))
    if noise_sigma > 0.0:
        eta = make_rng(rng_seed, "noise").normal(0.0, noise_sigma, size=model.m)
        psi = psi + eta
        clamped = int(np.count_nonzero(psi < 0.0))
        if clamped:
            logger.debug("clamped %d negative noisy magnitudes to zero", clamped)
        psi = np.maximum(psi, 0.0)
    return ProblemInstance(model, x, psi, float(noise_sigma))


def sigma_for_snr(model: SensingModel, x: ArrayLike, snr_db: float) -> float:
    """Noise level with ``SNR = 10 log10(||Ax||^2 / (m sigma^2))``; ``+inf`` dB gives 0."""
    if math.isnan(snr_db) or snr_db == -math.inf:
        msg = f"SNR must be finite or +inf, got {snr_db}"
        raise ValueError(msg)
    energy = float(np.linalg.norm(model.forward(x)) ** 2)
    if energy == 0.0:
        msg = "cannot set an SNR for a zero signal"
        raise ValueError(msg)
    if snr_db == math.inf:
        return 0.0
    return math.sqrt(energy / (model.m * 10.0 ** (snr_db / 10.0)))


def sample_instance(
    variant: Variant,
    n: int,
    m_or_k: int,
    seed: int,
    *,
    snr_db: float = math.inf,
    x: ArrayLike | None = None,
) -> ProblemInstance:
    """
    Model, signal and noise drawn from independent streams derived from ``seed``.

    CDP models draw a complex signal; pass ``x`` to measure a given signal instead.
    """
    model = sample_model(variant, n, m_or_k, derive_seed(seed, "model"))
    if x is None:
        x = sample_signal(n, variant.is_complex, derive_seed(seed, "signal"))
    sigma = sigma_for_snr(model, x, snr_db)
    return measure(model, x, sigma, derive_seed(seed, "noise"))
