"""Sequential filtering harness: propagate, assimilate, and validate.

The measurement update is the trace-optimal one from
:mod:`w2assim.assimilation`; the linear-Gaussian propagation step is
ordinary plumbing so the update can be exercised over time.  Per-trial
randomness comes from the counter-based stream ``(seed, trial)``, which
makes runs reproducible and trial order irrelevant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .assimilation import kalman_gain, posterior_cov_constrained
from .errors import DimMismatch, NumericalError
from .gaussians import DiracMass, Gaussian, SpdMatrix, empirical_moments, psd_factor
from .rng import stream
from .scenario import Scenario
from .wasserstein import w2_gaussian_dirac


@dataclass(frozen=True)
class StepRecord:
    """One assimilation step of one realization.

    ``w2_prior_to_dirac``/``w2_post_to_dirac`` are the error belief's W2
    distances to zero error before and after the update; the update can
    never increase it (the zero gain is always available), which the
    constructor enforces.
    """

    step: int
    true_state: np.ndarray
    measurement: np.ndarray
    prior_mean: np.ndarray
    prior_cov_trace: float
    post_mean: np.ndarray
    post_cov_trace: float
    w2_prior_to_dirac: float
    w2_post_to_dirac: float

    def __post_init__(self):
        slack = 1e-12 * (1.0 + self.w2_prior_to_dirac)
        if self.w2_post_to_dirac > self.w2_prior_to_dirac + slack:
            raise NumericalError(
                f"step {self.step}: posterior W2 {self.w2_post_to_dirac!r} "
                f"exceeds prior W2 {self.w2_prior_to_dirac!r}"
            )

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "true_state": [float(v) for v in self.true_state],
            "measurement": [float(v) for v in self.measurement],
            "prior_mean": [float(v) for v in self.prior_mean],
            "prior_cov_trace": float(self.prior_cov_trace),
            "post_mean": [float(v) for v in self.post_mean],
            "post_cov_trace": float(self.post_cov_trace),
            "w2_prior_to_dirac": float(self.w2_prior_to_dirac),
            "w2_post_to_dirac": float(self.w2_post_to_dirac),
        }


def _propagate_cov(cov: SpdMatrix, a: np.ndarray, q: SpdMatrix) -> SpdMatrix:
    return SpdMatrix(a @ cov.mat @ a.T + q.mat)


def predict(belief: Gaussian, A, Q) -> Gaussian:
    """Propagate a belief through linear dynamics with additive noise."""
    a = np.asarray(A, dtype=np.float64)
    q = Q if isinstance(Q, SpdMatrix) else SpdMatrix(Q)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimMismatch(f"A must be square, got shape {a.shape}")
    if a.shape[0] != belief.dim or q.dim != belief.dim:
        raise DimMismatch("A, Q and belief dimensions are inconsistent")
    return Gaussian(a @ belief.mean, _propagate_cov(belief.cov, a, q))


@dataclass(frozen=True)
class ScheduledStep:
    """Per-step covariance state shared by all trials of a scenario."""

    prior_cov: SpdMatrix
    gain: np.ndarray
    post_cov: SpdMatrix


def covariance_schedule(scenario: Scenario) -> list[ScheduledStep]:
    """Deterministic per-step (prior covariance, gain, posterior covariance).

    The covariance recursion never touches the realized measurements, so
    this sequence is shared by every trial; computing it once is what keeps
    large Monte Carlo runs cheap.  The arithmetic here is identical to what
    predict/assimilate perform, step for step.
    """
    belief_cov = scenario.prior0.cov
    schedule = []
    for _ in range(scenario.steps):
        prior_cov = _propagate_cov(belief_cov, scenario.A, scenario.Q)
        gain = kalman_gain(prior_cov, scenario.sensor)
        post_cov = posterior_cov_constrained(gain, prior_cov, scenario.sensor)
        schedule.append(ScheduledStep(prior_cov=prior_cov, gain=gain,
                                      post_cov=post_cov))
        belief_cov = post_cov
    return schedule


def _simulate(scenario: Scenario, trial: int, schedule: list[ScheduledStep]):
    """Yield (step, truth, measurement, prior mean, posterior mean).

    One realization of the truth/measurement/mean recursion, using the
    shared covariance schedule.  The mean update ``prior + K (y - C prior)``
    is the same expression :func:`w2assim.assimilation.assimilate`
    evaluates, applied to the same gain bits, so a full per-step
    predict/assimilate pass reproduces these numbers exactly.
    """
    rng = stream(scenario.seed, trial)
    a = scenario.A
    c = scenario.sensor.C
    n = scenario.state_dim
    m = scenario.meas_dim
    lq = psd_factor(scenario.Q)
    lr = psd_factor(scenario.sensor.R)

    x = scenario.x0_true.copy()
    mean = scenario.prior0.mean
    for step, plan in enumerate(schedule, start=1):
        x = a @ x + lq @ rng.standard_normal(n)
        prior_mean = a @ mean
        y = c @ x + lr @ rng.standard_normal(m)
        post_mean = prior_mean + plan.gain @ (y - c @ prior_mean)
        yield step, x, y, prior_mean, post_mean
        mean = post_mean


def run_filter(scenario: Scenario, trial: int = 0) -> list[StepRecord]:
    """Simulate one realization of the scenario and filter it.

    Truth evolves as ``x' = A x + w`` with ``w ~ N(0, Q)``; measurements are
    ``y = C x + noise``.  Per step the belief is propagated and then
    assimilated.  All randomness comes from stream ``(seed, trial)``, so
    identical inputs reproduce bit for bit.
    """
    n = scenario.state_dim
    origin = DiracMass(np.zeros(n))
    schedule = covariance_schedule(scenario)
    w2_priors = [
        w2_gaussian_dirac(Gaussian(np.zeros(n), plan.prior_cov), origin)
        for plan in schedule
    ]
    w2_posts = [
        w2_gaussian_dirac(Gaussian(np.zeros(n), plan.post_cov), origin)
        for plan in schedule
    ]

    records = []
    for step, x, y, prior_mean, post_mean in _simulate(scenario, trial, schedule):
        plan = schedule[step - 1]
        records.append(
            StepRecord(
                step=step,
                true_state=x,
                measurement=y,
                prior_mean=prior_mean,
                prior_cov_trace=plan.prior_cov.trace(),
                post_mean=post_mean,
                post_cov_trace=plan.post_cov.trace(),
                w2_prior_to_dirac=w2_priors[step - 1],
                w2_post_to_dirac=w2_posts[step - 1],
            )
        )
    return records


@dataclass(frozen=True)
class McSummary:
    """Aggregate of the final-step posterior errors across trials."""

    label: str
    steps: int
    trials: int
    empirical_mean: np.ndarray
    empirical_cov: Optional[SpdMatrix]
    predicted_cov: SpdMatrix
    w2_final: float
    w2sq_empirical: float
    w2sq_predicted: float
    per_step_w2: list

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "steps": self.steps,
            "trials": self.trials,
            "empirical_mean": [float(v) for v in self.empirical_mean],
            "empirical_cov": (
                None if self.empirical_cov is None
                else self.empirical_cov.mat.tolist()
            ),
            "predicted_cov": self.predicted_cov.mat.tolist(),
            "w2_final": float(self.w2_final),
            "w2sq_empirical": float(self.w2sq_empirical),
            "w2sq_predicted": float(self.w2sq_predicted),
            "per_step_w2": [
                {"step": k, "w2_prior": float(a), "w2_post": float(b)}
                for k, a, b in self.per_step_w2
            ],
        }


def run_monte_carlo(scenario: Scenario) -> McSummary:
    """Run ``scenario.trials`` independent realizations and aggregate.

    Trial ``k`` draws from stream ``(seed, k)``; results are aggregated in
    trial-index order, so the summary does not depend on execution order.
    With a single trial the summary degenerates to that realization's error
    and the empirical covariance is None.
    """
    n = scenario.state_dim
    origin = DiracMass(np.zeros(n))
    schedule = covariance_schedule(scenario)
    final_post_cov = schedule[-1].post_cov

    errors = np.empty((scenario.trials, n))
    for trial in range(scenario.trials):
        for _, x, _, _, post_mean in _simulate(scenario, trial, schedule):
            pass
        errors[trial] = post_mean - x

    empirical_cov = None
    if scenario.trials >= 2:
        _, empirical_cov = empirical_moments(errors)

    per_step = [
        (
            k + 1,
            w2_gaussian_dirac(Gaussian(np.zeros(n), plan.prior_cov), origin),
            w2_gaussian_dirac(Gaussian(np.zeros(n), plan.post_cov), origin),
        )
        for k, plan in enumerate(schedule)
    ]

    return McSummary(
        label=scenario.label,
        steps=scenario.steps,
        trials=scenario.trials,
        empirical_mean=errors.mean(axis=0),
        empirical_cov=empirical_cov,
        predicted_cov=final_post_cov,
        w2_final=w2_gaussian_dirac(Gaussian(np.zeros(n), final_post_cov), origin),
        w2sq_empirical=float(np.mean(np.sum(errors * errors, axis=1))),
        w2sq_predicted=final_post_cov.trace(),
        per_step_w2=per_step,
    )


def _fmt(x) -> str:
    return format(float(x), ".17g")


def csv_header(state_dim: int, meas_dim: int) -> str:
    cols = ["trial", "step"]
    cols += [f"true_{i}" for i in range(state_dim)]
    cols += [f"meas_{i}" for i in range(meas_dim)]
    cols += [f"prior_mean_{i}" for i in range(state_dim)]
    cols += [f"post_mean_{i}" for i in range(state_dim)]
    cols += ["prior_trace", "post_trace", "w2_prior", "w2_post"]
    return ",".join(cols)


def records_to_csv(trial_records) -> str:
    """Render ``(trial_id, [StepRecord, ...])`` pairs as deterministic CSV.

    One row per step per trial; floats carry 17 significant digits so the
    output round-trips exactly.
    """
    trial_records = list(trial_records)
    if not trial_records or not trial_records[0][1]:
        raise ValueError("no records to write")
    first = trial_records[0][1][0]
    state_dim = first.true_state.shape[0]
    meas_dim = first.measurement.shape[0]

    lines = [csv_header(state_dim, meas_dim)]
    for trial_id, records in trial_records:
        for r in records:
            fields = [str(int(trial_id)), str(int(r.step))]
            fields += [_fmt(v) for v in r.true_state]
            fields += [_fmt(v) for v in r.measurement]
            fields += [_fmt(v) for v in r.prior_mean]
            fields += [_fmt(v) for v in r.post_mean]
            fields += [
                _fmt(r.prior_cov_trace),
                _fmt(r.post_cov_trace),
                _fmt(r.w2_prior_to_dirac),
                _fmt(r.w2_post_to_dirac),
            ]
            lines.append(",".join(fields))
    return "\n".join(lines) + "\n"
