"""Exact discrete optimal transport on small empirical measures.

This module is verification machinery: it evaluates the coupling definition
of the 2-Wasserstein distance directly on finite supports, independently of
the Gaussian closed forms, so the two can be checked against each other.
Exactness beats speed here, hence combinatorial/simplex solvers rather than
entropic approximations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.optimize import linprog
from scipy.spatial.distance import cdist

from .errors import DimMismatch, NonFinite, NumericalError, TooLarge, ValidationError
from .gaussians import Gaussian, sample
from .lap import lap_dense

#: Largest support size accepted per measure (keeps worst-case solves fast).
MAX_SUPPORT = 2048

#: Tolerance for weights summing to one.
WEIGHT_SUM_TOL = 1e-12

#: Tolerance for marginal feasibility and cost consistency of a plan.
PLAN_TOL = 1e-9


class DiscreteMeasure:
    """Weighted point cloud with weights summing to one."""

    __slots__ = ("points", "weights")

    def __init__(self, points, weights):
        pts = np.array(points, dtype=np.float64, copy=True)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValidationError(
                f"points must be a nonempty (n, d) array, got shape {pts.shape}"
            )
        if not np.all(np.isfinite(pts)):
            raise NonFinite("points contain non-finite entries")
        w = np.array(weights, dtype=np.float64, copy=True).reshape(-1)
        if w.shape[0] != pts.shape[0]:
            raise DimMismatch(
                f"{pts.shape[0]} points but {w.shape[0]} weights"
            )
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValidationError("weights must be finite and nonnegative")
        if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(f"weights sum to {w.sum()!r}, expected 1")
        pts.flags.writeable = False
        w.flags.writeable = False
        self.points = pts
        self.weights = w

    @classmethod
    def uniform(cls, points) -> "DiscreteMeasure":
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        n = pts.shape[0]
        if n == 0:
            raise ValidationError("points must be nonempty")
        return cls(pts, np.full(n, 1.0 / n))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __repr__(self) -> str:
        return f"DiscreteMeasure(n={self.n}, dim={self.dim})"


@dataclass(frozen=True)
class TransportPlan:
    """Feasible coupling between two discrete measures, with its cost."""

    coupling: np.ndarray
    cost: float


def _is_uniform(w: np.ndarray) -> bool:
    return bool(np.abs(w - 1.0 / w.shape[0]).max() <= WEIGHT_SUM_TOL)


def _check_plan(coupling, cost_matrix, cost, src, dst):
    """Marginal feasibility and cost consistency, or NumericalError."""
    row_gap = np.abs(coupling.sum(axis=1) - src.weights).max()
    col_gap = np.abs(coupling.sum(axis=0) - dst.weights).max()
    if max(row_gap, col_gap) > PLAN_TOL:
        raise NumericalError(
            f"transport plan infeasible: marginal gap {max(row_gap, col_gap):.3e}"
        )
    recomputed = float((coupling * cost_matrix).sum())
    if abs(recomputed - cost) > PLAN_TOL * (1.0 + abs(cost)):
        raise NumericalError("transport plan cost inconsistent with coupling")


def _solve_general(cost_matrix, src, dst):
    """Exact transportation problem via LP (HiGHS) for arbitrary weights."""
    n1, n2 = cost_matrix.shape
    row_marginals = sparse.kron(sparse.eye(n1, format="csr"), np.ones((1, n2)))
    col_marginals = sparse.kron(np.ones((1, n1)), sparse.eye(n2, format="csr"))
    a_eq = sparse.vstack([row_marginals, col_marginals], format="csc")
    b_eq = np.concatenate([src.weights, dst.weights])
    res = linprog(
        cost_matrix.ravel(),
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=(0, None),
        method="highs",
    )
    if not res.success:
        raise NumericalError(f"transportation LP failed: {res.message}")
    coupling = np.clip(res.x.reshape(n1, n2), 0.0, None)
    return coupling


def discrete_w2(src: DiscreteMeasure, dst: DiscreteMeasure):
    """Globally optimal squared-cost transport between two discrete measures.

    Returns ``(distance, plan)`` where ``distance = sqrt(plan.cost)``.
    Equal-size uniform measures are solved by exact assignment on the
    squared-distance matrix; general weights fall back to an exact
    transportation LP.
    """
    if src.n > MAX_SUPPORT or dst.n > MAX_SUPPORT:
        raise TooLarge(
            f"support sizes {src.n}, {dst.n} exceed the cap {MAX_SUPPORT}"
        )
    if src.dim != dst.dim:
        raise DimMismatch(f"dims differ: {src.dim} vs {dst.dim}")

    cost_matrix = cdist(src.points, dst.points, "sqeuclidean")

    if src.n == dst.n and _is_uniform(src.weights) and _is_uniform(dst.weights):
        cols, _, _ = lap_dense(cost_matrix)
        coupling = np.zeros_like(cost_matrix)
        rows = np.arange(src.n)
        coupling[rows, cols] = src.weights
        cost = float(np.sum(src.weights * cost_matrix[rows, cols]))
    else:
        coupling = _solve_general(cost_matrix, src, dst)
        cost = float((coupling * cost_matrix).sum())

    _check_plan(coupling, cost_matrix, cost, src, dst)
    coupling.flags.writeable = False
    distance = float(np.sqrt(max(cost, 0.0)))
    return distance, TransportPlan(coupling=coupling, cost=cost)


def empirical_w2_gaussians(g1: Gaussian, g2: Gaussian, n: int, seed: int) -> float:
    """Empirical W2 between two Gaussians from n samples of each.

    The two sample clouds come from independent streams (1 and 2) derived
    from ``seed``, so the estimate is deterministic given the inputs.
    """
    if n > MAX_SUPPORT:
        raise TooLarge(f"n={n} exceeds the support cap {MAX_SUPPORT}")
    x1 = sample(g1, n, seed, stream_id=1)
    x2 = sample(g2, n, seed, stream_id=2)
    distance, _ = discrete_w2(
        DiscreteMeasure.uniform(x1), DiscreteMeasure.uniform(x2)
    )
    return distance
