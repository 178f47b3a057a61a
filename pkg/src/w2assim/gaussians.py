"""Validated SPD matrices, Gaussian and point-mass containers, sampling, moments.

All containers are immutable after construction (their arrays are marked
read-only) and every operation is a pure function, so everything in this
module is safe to use concurrently without locking.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    DimMismatch,
    EigenFailure,
    NonFinite,
    NotPsd,
    NotSymmetric,
    TooFewSamples,
)
from .rng import stream

#: Default relative tolerance for the symmetry and PSD acceptance bands.
DEFAULT_TOL = 1e-10


def _own_float_array(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True)
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"{name} contains non-finite entries")
    return arr


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class SpdMatrix:
    """Symmetric positive-semidefinite matrix, validated at construction.

    The stored matrix is exactly symmetrized, ``(M + M.T) / 2``.  Asymmetry
    beyond ``tol * (1 + max|M|)`` raises :class:`NotSymmetric`; an eigenvalue
    below ``-tol * (1 + lambda_max)`` raises :class:`NotPsd`; negative
    eigenvalues inside that band are clamped to zero.  Singular matrices are
    legal (the zero matrix is a valid covariance).
    """

    __slots__ = ("mat",)

    def __init__(self, matrix, tol: float = DEFAULT_TOL):
        if isinstance(matrix, SpdMatrix):
            matrix = matrix.mat
        if tol < 0:
            raise ValueError("tol must be nonnegative")
        m = _own_float_array(matrix, "matrix")
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimMismatch(f"expected a square matrix, got shape {m.shape}")

        scale = 1.0 + float(np.abs(m).max())
        asymmetry = float(np.abs(m - m.T).max())
        if asymmetry > tol * scale:
            raise NotSymmetric(
                f"asymmetry {asymmetry:.3e} exceeds band {tol * scale:.3e}"
            )
        sym = (m + m.T) / 2.0

        try:
            eigvals = np.linalg.eigvalsh(sym)
        except np.linalg.LinAlgError as exc:
            raise EigenFailure("eigendecomposition did not converge") from exc
        lam_min, lam_max = float(eigvals[0]), float(eigvals[-1])
        if lam_min < -tol * (1.0 + lam_max):
            raise NotPsd(
                f"eigenvalue {lam_min:.3e} below band "
                f"{-tol * (1.0 + lam_max):.3e}"
            )
        if lam_min < 0.0:
            # In-band negative eigenvalues: rebuild with them clamped to zero.
            w, v = np.linalg.eigh(sym)
            sym = (v * np.clip(w, 0.0, None)) @ v.T
            sym = (sym + sym.T) / 2.0

        self.mat = _readonly(sym)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.mat))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.mat, dtype=dtype)

    def __repr__(self) -> str:
        return f"SpdMatrix(dim={self.dim})"


def validate_spd(matrix, tol: float = DEFAULT_TOL) -> SpdMatrix:
    """Validate a dense square matrix as SPD and return the cleaned wrapper."""
    return SpdMatrix(matrix, tol=tol)


class Gaussian:
    """Mean vector plus SPD covariance of matching dimension."""

    __slots__ = ("mean", "cov")

    def __init__(self, mean, cov, tol: float = DEFAULT_TOL):
        mean_arr = _own_float_array(mean, "mean")
        if mean_arr.ndim == 0:
            mean_arr = mean_arr.reshape(1)
        if mean_arr.ndim != 1:
            raise DimMismatch(f"mean must be a vector, got shape {mean_arr.shape}")
        cov_spd = cov if isinstance(cov, SpdMatrix) else SpdMatrix(cov, tol=tol)
        if mean_arr.shape[0] != cov_spd.dim:
            raise DimMismatch(
                f"mean has length {mean_arr.shape[0]} but cov has dim {cov_spd.dim}"
            )
        self.mean = _readonly(mean_arr)
        self.cov = cov_spd

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def __repr__(self) -> str:
        return f"Gaussian(dim={self.dim})"


class DiracMass:
    """Point mass supported on a single vector."""

    __slots__ = ("point",)

    def __init__(self, point):
        point_arr = _own_float_array(point, "point")
        if point_arr.ndim == 0:
            point_arr = point_arr.reshape(1)
        if point_arr.ndim != 1:
            raise DimMismatch(f"point must be a vector, got shape {point_arr.shape}")
        self.point = _readonly(point_arr)

    @property
    def dim(self) -> int:
        return self.point.shape[0]

    def __repr__(self) -> str:
        return f"DiracMass(dim={self.dim})"


def spd_sqrt(m) -> SpdMatrix:
    """Principal PSD square root, computed by symmetric eigendecomposition.

    Satisfies ``S @ S == m`` to within 1e-10 relative Frobenius error for
    valid input; eigenvalues are clamped at zero so singular input is fine.
    """
    spd = m if isinstance(m, SpdMatrix) else SpdMatrix(m)
    try:
        w, v = np.linalg.eigh(spd.mat)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure("eigendecomposition did not converge") from exc
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
    return SpdMatrix(root)


def psd_factor(m) -> np.ndarray:
    """Factor ``L`` with ``L @ L.T`` equal to ``m``, via eigendecomposition.

    Unlike Cholesky this tolerates singular input, which keeps degenerate
    covariances (point masses) legal in sampling.
    """
    spd = m if isinstance(m, SpdMatrix) else SpdMatrix(m)
    try:
        w, v = np.linalg.eigh(spd.mat)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure("eigendecomposition did not converge") from exc
    return v * np.sqrt(np.clip(w, 0.0, None))


def sample(g: Gaussian, n: int, seed: int, stream_id: int = 0) -> np.ndarray:
    """Draw ``n`` i.i.d. vectors from ``g`` as an ``(n, dim)`` array.

    Draws are ``mean + L z`` with ``z`` standard normal from the
    counter-based stream ``(seed, stream_id)``; identical inputs give
    bit-identical output.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    z = stream(seed, stream_id).standard_normal((int(n), g.dim))
    return g.mean + z @ psd_factor(g.cov).T


def empirical_moments(samples) -> tuple[np.ndarray, SpdMatrix]:
    """Sample mean and unbiased (n - 1 denominator) sample covariance."""
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise DimMismatch(f"samples must be 2-d, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFinite("samples contain non-finite entries")
    n = x.shape[0]
    if n < 2:
        raise TooFewSamples(f"need at least 2 samples, got {n}")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (n - 1)
    return mean, SpdMatrix(cov)
