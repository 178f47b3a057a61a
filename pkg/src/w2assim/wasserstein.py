"""Closed-form 2-Wasserstein distances for Gaussians and point masses.

The Gaussian-Gaussian distance is the Bures-Wasserstein formula; the
Gaussian-to-point distance is its degenerate (zero covariance) limit.
Distances are returned unsquared; the squared trace form exists as its own
operation because downstream code uses it as an objective.
"""

from __future__ import annotations

import numpy as np

from .errors import DimMismatch, EigenFailure, NegativeRadicand
from .gaussians import DiracMass, Gaussian, spd_sqrt

#: Relative band inside which a negative squared distance clamps to zero.
RADICAND_TOL = 1e-10


def _clamped_sqrt(radicand: float, scale: float) -> float:
    """sqrt with the documented clamping band for trace cancellation noise."""
    if radicand < 0.0:
        if radicand < -RADICAND_TOL * scale:
            raise NegativeRadicand(
                f"squared distance {radicand:.3e} is below the clamping band "
                f"{-RADICAND_TOL * scale:.3e}"
            )
        radicand = 0.0
    return float(np.sqrt(radicand))


def _bures_sq(cov1, cov2) -> float:
    """Squared Bures distance ``tr(S1 + S2 - 2 (sqrt(S1) S2 sqrt(S1))^(1/2))``.

    Evaluated as ``min over orthogonal W of |sqrt(S1) - sqrt(S2) W|_F^2``,
    with the minimizer taken from the SVD of ``sqrt(S2) sqrt(S1)`` (whose
    Gram matrix is exactly the nested product above, in that order).  The
    two expressions are algebraically identical; this one is a sum of
    squares, so the cancellation error is quadratic instead of linear and
    the distance of a Gaussian to itself comes out at roundoff level
    rather than at sqrt(roundoff).
    """
    root1 = spd_sqrt(cov1).mat
    root2 = spd_sqrt(cov2).mat
    try:
        u, _, vt = np.linalg.svd(root2 @ root1)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure("SVD did not converge") from exc
    diff = root1 - root2 @ (u @ vt)
    return float(np.sum(diff * diff))


def w2_gaussian(g1: Gaussian, g2: Gaussian) -> float:
    """2-Wasserstein distance between two Gaussians.

    The squared distance is the squared mean gap plus the covariance term
    ``tr(S1 + S2 - 2 (sqrt(S1) S2 sqrt(S1))^(1/2))``; see :func:`_bures_sq`
    for how that term is evaluated.  Symmetry in the arguments is a tested
    property, not an implementation shortcut.
    """
    if g1.dim != g2.dim:
        raise DimMismatch(f"dims differ: {g1.dim} vs {g2.dim}")
    dmean = g1.mean - g2.mean
    mean_sq = float(dmean @ dmean)
    radicand = mean_sq + _bures_sq(g1.cov, g2.cov)
    return _clamped_sqrt(radicand, 1.0 + abs(radicand))


def w2_gaussian_dirac(g: Gaussian, d: DiracMass) -> float:
    """2-Wasserstein distance between a Gaussian and a point mass.

    Equals ``sqrt(|mean - point|^2 + tr(cov))``, the limit of the
    Gaussian-Gaussian distance as the second covariance shrinks to zero.
    """
    if g.dim != d.dim:
        raise DimMismatch(f"dims differ: {g.dim} vs {d.dim}")
    diff = g.mean - d.point
    radicand = float(diff @ diff) + g.cov.trace()
    return _clamped_sqrt(radicand, 1.0 + abs(radicand))


def w2sq_dirac_trace_form(g: Gaussian, d: DiracMass) -> float:
    """Squared Gaussian-to-point distance as one trace.

    Computes ``tr((mean - point)(mean - point)^T + cov)`` literally, as an
    independent evaluation path for the squared distance; it must agree with
    ``w2_gaussian_dirac(g, d) ** 2`` to 1e-12 relative.
    """
    if g.dim != d.dim:
        raise DimMismatch(f"dims differ: {g.dim} vs {d.dim}")
    diff = g.mean - d.point
    return float(np.trace(np.outer(diff, diff) + g.cov.mat))
