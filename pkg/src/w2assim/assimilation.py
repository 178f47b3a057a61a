"""Measurement update that minimizes the posterior error's W2 distance to zero.

The posterior estimate is a linear combination ``G x_prior + H y``.  With
``G = I - H C`` the posterior error is unbiased and its covariance reduces
to the Joseph form, so the objective (squared W2 distance from the error
distribution to a point mass at zero) is the covariance trace.  Minimizing
that trace over ``H`` yields the classical Kalman gain; this module carries
both the closed form and an independent first-order numeric minimizer so
each can vouch for the other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DidNotConverge,
    DimMismatch,
    NonFinite,
    NotPsd,
    NumericalError,
    SingularInnovation,
)
from .gaussians import DiracMass, Gaussian, SpdMatrix, _own_float_array, _readonly
from .wasserstein import w2sq_dirac_trace_form

#: Relative agreement required between the two posterior-covariance forms.
FORM_AGREEMENT_TOL = 1e-10

#: Relative residual allowed on the closed-form gain's stationarity equation.
GAIN_RESIDUAL_TOL = 1e-10


class LinearSensor:
    """Linear measurement map ``y = C x + noise`` with noise covariance R.

    R must be strictly positive definite (smallest eigenvalue above
    ``1e-12 * largest``) so the innovation covariance is invertible for any
    PSD prior covariance; singular noise is rejected, not pseudo-inverted.
    """

    __slots__ = ("C", "R")

    def __init__(self, C, R):
        c = _own_float_array(C, "C")
        if c.ndim != 2:
            raise DimMismatch(f"C must be a matrix, got shape {c.shape}")
        r = R if isinstance(R, SpdMatrix) else SpdMatrix(R)
        if r.dim != c.shape[0]:
            raise DimMismatch(
                f"C has {c.shape[0]} rows but R has dim {r.dim}"
            )
        eigvals = np.linalg.eigvalsh(r.mat)
        if eigvals[0] <= 1e-12 * eigvals[-1] or eigvals[-1] <= 0.0:
            raise NotPsd("R must be strictly positive definite")
        self.C = _readonly(c)
        self.R = r

    @property
    def state_dim(self) -> int:
        return self.C.shape[1]

    @property
    def meas_dim(self) -> int:
        return self.C.shape[0]

    def __repr__(self) -> str:
        return f"LinearSensor(meas_dim={self.meas_dim}, state_dim={self.state_dim})"


class UpdateMaps:
    """Gain pair defining the posterior combination ``G x_prior + H y``."""

    __slots__ = ("G", "H")

    def __init__(self, G, H):
        g = _own_float_array(G, "G")
        h = _own_float_array(H, "H")
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise DimMismatch(f"G must be square, got shape {g.shape}")
        if h.ndim != 2 or h.shape[0] != g.shape[0]:
            raise DimMismatch(
                f"H must have {g.shape[0]} rows, got shape {h.shape}"
            )
        self.G = _readonly(g)
        self.H = _readonly(h)


@dataclass(frozen=True)
class PosteriorErrorModel:
    """Moments of the posterior error plus its squared W2 distance to zero."""

    mean_bias: np.ndarray
    cov: SpdMatrix
    w2sq_to_dirac: float

    def __post_init__(self):
        direct = float(self.mean_bias @ self.mean_bias) + self.cov.trace()
        if abs(self.w2sq_to_dirac - direct) > 1e-12 * (1.0 + abs(direct)):
            raise NumericalError(
                "w2sq_to_dirac disagrees with |bias|^2 + tr(cov)"
            )

    @classmethod
    def from_moments(cls, mean_bias, cov: SpdMatrix) -> "PosteriorErrorModel":
        bias = _readonly(_own_float_array(mean_bias, "mean_bias"))
        if bias.shape != (cov.dim,):
            raise DimMismatch("mean_bias length must match cov dim")
        w2sq = w2sq_dirac_trace_form(Gaussian(bias, cov), DiracMass(np.zeros(cov.dim)))
        return cls(mean_bias=bias, cov=cov, w2sq_to_dirac=w2sq)


def _as_spd(m) -> SpdMatrix:
    return m if isinstance(m, SpdMatrix) else SpdMatrix(m)


def _as_gain(H, sensor: LinearSensor) -> np.ndarray:
    h = np.asarray(H, dtype=np.float64)
    if h.shape != (sensor.state_dim, sensor.meas_dim):
        raise DimMismatch(
            f"gain must have shape ({sensor.state_dim}, {sensor.meas_dim}), "
            f"got {h.shape}"
        )
    if not np.all(np.isfinite(h)):
        raise NonFinite("gain contains non-finite entries")
    return h


def _innovation_cov(sigma: np.ndarray, sensor: LinearSensor) -> np.ndarray:
    s = sensor.C @ sigma @ sensor.C.T + sensor.R.mat
    return (s + s.T) / 2.0


def posterior_cov_general(
    maps: UpdateMaps,
    prior_err_cov,
    sensor: LinearSensor,
    true_state,
) -> SpdMatrix:
    """Posterior error covariance for arbitrary update maps (G, H).

    Evaluates ``G S G^T + M x x^T M^T + H R H^T`` with ``M = G + H C - I``;
    the middle term depends on the unknown true state unless ``G = I - H C``
    wipes it out, which is exactly why the constrained update hard-wires
    that choice.
    """
    sigma = _as_spd(prior_err_cov)
    if maps.G.shape[0] != sigma.dim or maps.G.shape[0] != sensor.state_dim:
        raise DimMismatch("G does not match state dimension")
    if maps.H.shape[1] != sensor.meas_dim:
        raise DimMismatch("H does not match measurement dimension")
    x = np.asarray(true_state, dtype=np.float64).reshape(-1)
    if x.shape[0] != sigma.dim:
        raise DimMismatch("true_state length must match state dimension")

    middle = maps.G + maps.H @ sensor.C - np.eye(sigma.dim)
    mx = middle @ x
    cov = (
        maps.G @ sigma.mat @ maps.G.T
        + np.outer(mx, mx)
        + maps.H @ sensor.R.mat @ maps.H.T
    )
    return SpdMatrix((cov + cov.T) / 2.0)


def posterior_cov_constrained(H, prior_err_cov, sensor: LinearSensor) -> SpdMatrix:
    """Posterior error covariance under the unbiasedness choice G = I - H C.

    Computes both algebraic forms, the Joseph form
    ``(I - H C) S (I - H C)^T + H R H^T`` and its expansion
    ``S + H (C S C^T + R) H^T - H C S - S C^T H^T``, asserts they agree to
    1e-10 relative, and returns the (more robust) Joseph form.
    """
    sigma = _as_spd(prior_err_cov)
    h = _as_gain(H, sensor)
    if sigma.dim != sensor.state_dim:
        raise DimMismatch("prior covariance does not match sensor state dim")

    a = np.eye(sigma.dim) - h @ sensor.C
    joseph = a @ sigma.mat @ a.T + h @ sensor.R.mat @ h.T

    hcs = h @ sensor.C @ sigma.mat
    expanded = sigma.mat + h @ _innovation_cov(sigma.mat, sensor) @ h.T - hcs - hcs.T

    gap = float(np.linalg.norm(joseph - expanded))
    if gap > FORM_AGREEMENT_TOL * (1.0 + float(np.linalg.norm(joseph))):
        raise NumericalError(
            f"posterior covariance forms disagree by {gap:.3e}"
        )
    return SpdMatrix((joseph + joseph.T) / 2.0)


def w2sq_objective(H, prior_err_cov, sensor: LinearSensor) -> float:
    """Squared W2 distance of the posterior error to zero, as a function of H.

    With the unbiasedness constraint in force the bias term vanishes, so the
    objective is the trace of the constrained posterior covariance.
    """
    return posterior_cov_constrained(H, prior_err_cov, sensor).trace()


def w2sq_objective_grad(H, prior_err_cov, sensor: LinearSensor) -> np.ndarray:
    """Analytic gradient of :func:`w2sq_objective` in the gain.

    Equals ``2 (H (C S C^T + R) - S C^T)``; its zero is the stationarity
    equation solved in closed form by :func:`kalman_gain`.
    """
    sigma = _as_spd(prior_err_cov)
    h = _as_gain(H, sensor)
    s_mat = _innovation_cov(sigma.mat, sensor)
    return 2.0 * (h @ s_mat - sigma.mat @ sensor.C.T)


def kalman_gain(prior_err_cov, sensor: LinearSensor) -> np.ndarray:
    """Trace-minimizing gain ``S C^T (C S C^T + R)^(-1)`` via a linear solve.

    Solves ``(C S C^T + R) H^T = C S`` instead of forming the inverse and
    checks the stationarity residual afterwards.
    """
    sigma = _as_spd(prior_err_cov)
    if sigma.dim != sensor.state_dim:
        raise DimMismatch("prior covariance does not match sensor state dim")
    s_mat = _innovation_cov(sigma.mat, sensor)
    target = sigma.mat @ sensor.C.T
    try:
        gain = np.linalg.solve(s_mat, target.T).T
    except np.linalg.LinAlgError as exc:
        raise SingularInnovation("innovation covariance is singular") from exc

    residual = float(np.linalg.norm(gain @ s_mat - target))
    scale = 1.0 + float(np.linalg.norm(target)) + float(
        np.linalg.norm(gain)
    ) * float(np.linalg.norm(s_mat))
    if residual > GAIN_RESIDUAL_TOL * scale:
        raise SingularInnovation(
            f"stationarity residual {residual:.3e} exceeds budget"
        )
    return gain


@dataclass(frozen=True)
class OptimizerSettings:
    """Settings for the numeric gain search.

    ``grad_tol=None`` resolves to ``1e-10 * (1 + tr(prior_err_cov))`` at run
    time.  ``armijo`` is the sufficient-decrease constant of the halving
    line search; ``memory`` is the window of past objective values the
    non-monotone acceptance test compares against.
    """

    grad_tol: Optional[float] = None
    max_iters: int = 10000
    armijo: float = 1e-4
    memory: int = 10


def wasserstein_optimal_gain_numeric(
    prior_err_cov,
    sensor: LinearSensor,
    opts: OptimizerSettings | None = None,
    return_info: bool = False,
):
    """Minimize :func:`w2sq_objective` over the gain by gradient descent.

    Steepest descent from the zero gain with a halving (Armijo) line
    search.  Trial step lengths follow the Barzilai-Borwein rule (exact
    quadratic line minimizer on the first step), and sufficient decrease is
    measured against the worst of the last ``memory`` accepted values
    rather than the current one; a strictly monotone test would cut the
    Barzilai-Borwein steps back to plain gradient descent and stall on
    ill-conditioned systems.  The objective is convex quadratic in the
    gain, so the stationary point reached is the global optimum.

    Returns the gain, or ``(gain, info)`` with the iteration count and
    which stop fired when ``return_info`` is set.  Raises
    :class:`DidNotConverge` if the gradient norm is still above tolerance
    after ``max_iters`` iterations.
    """
    opts = opts or OptimizerSettings()
    sigma = _as_spd(prior_err_cov)
    if sigma.dim != sensor.state_dim:
        raise DimMismatch("prior covariance does not match sensor state dim")
    s_mat = _innovation_cov(sigma.mat, sensor)
    tol = opts.grad_tol
    if tol is None:
        tol = 1e-10 * (1.0 + sigma.trace())

    def exact_step(g, gsq):
        # Line minimizer along -g: the objective is quadratic with
        # Hessian action 2 S on the gain.
        return gsq / (2.0 * float(np.vdot(g @ s_mat, g)))

    h = np.zeros((sensor.state_dim, sensor.meas_dim))
    f = w2sq_objective(h, sigma, sensor)
    g = w2sq_objective_grad(h, sigma, sensor)
    recent = [f]
    prev_h = None
    prev_g = None

    for iterations in range(opts.max_iters + 1):
        grad_norm = float(np.linalg.norm(g))
        if grad_norm <= tol:
            info = {
                "iterations": iterations,
                "grad_norm": grad_norm,
                "stop": "grad_tol",
            }
            return (h, info) if return_info else h
        if iterations == opts.max_iters:
            break

        gsq = grad_norm * grad_norm
        if prev_g is None:
            step = exact_step(g, gsq)
        else:
            dg = g - prev_g
            denom = float(np.vdot(dg, dg))
            step = float(np.vdot(h - prev_h, dg)) / denom if denom > 0.0 else 0.0
            if not np.isfinite(step) or step <= 0.0:
                step = exact_step(g, gsq)

        f_ref = max(recent)
        prev_h, prev_g = h, g
        while True:
            cand = h - step * g
            f_cand = w2sq_objective(cand, sigma, sensor)
            if f_cand <= f_ref - opts.armijo * step * gsq:
                break
            step *= 0.5
            if step * grad_norm <= 1e-18 * (1.0 + float(np.linalg.norm(h))):
                raise DidNotConverge("line search step underflow")
        h, f = cand, f_cand
        recent.append(f)
        if len(recent) > opts.memory:
            recent.pop(0)
        g = w2sq_objective_grad(h, sigma, sensor)

    raise DidNotConverge(
        f"gradient norm {float(np.linalg.norm(g)):.3e} above tolerance "
        f"{tol:.3e} after {opts.max_iters} iterations"
    )


def assimilate(prior: Gaussian, measurement, sensor: LinearSensor):
    """Apply the trace-optimal measurement update to a Gaussian prior.

    Returns ``(posterior, error_model)``.  The posterior mean is
    ``prior_mean + H (y - C prior_mean)`` with H the closed-form gain; the
    posterior covariance is the Joseph-form evaluation; the error model has
    exactly zero bias (the constraint G = I - H C makes the posterior error
    unbiased) and carries the trace of the posterior covariance as its
    squared distance to zero error.
    """
    if prior.dim != sensor.state_dim:
        raise DimMismatch("prior does not match sensor state dimension")
    y = np.asarray(measurement, dtype=np.float64).reshape(-1)
    if y.shape[0] != sensor.meas_dim:
        raise DimMismatch(
            f"measurement length {y.shape[0]} but sensor expects {sensor.meas_dim}"
        )
    if not np.all(np.isfinite(y)):
        raise NonFinite("measurement contains non-finite entries")

    gain = kalman_gain(prior.cov, sensor)
    innovation = y - sensor.C @ prior.mean
    post_mean = prior.mean + gain @ innovation
    post_cov = posterior_cov_constrained(gain, prior.cov, sensor)
    posterior = Gaussian(post_mean, post_cov)
    model = PosteriorErrorModel.from_moments(np.zeros(prior.dim), post_cov)
    return posterior, model
