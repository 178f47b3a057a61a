"""Scenario description and its JSON file format.

A scenario bundles everything one simulation needs: linear dynamics, a
sensor, the initial truth and belief, and run bookkeeping.  The on-disk
format is a single JSON document with row-major matrix arrays and a version
tag (``w2assim-scenario/1``); field names match the attribute names below.
"""

from __future__ import annotations

import json
from typing import Any

from .assimilation import LinearSensor
from .errors import DimMismatch, ValidationError
from .gaussians import Gaussian, SpdMatrix, _own_float_array, _readonly

SCENARIO_FORMAT = "w2assim-scenario/1"


class Scenario:
    """Full simulation description; immutable once constructed."""

    __slots__ = ("A", "Q", "sensor", "x0_true", "prior0", "steps", "trials",
                 "seed", "label")

    def __init__(self, A, Q, sensor: LinearSensor, x0_true, prior0: Gaussian,
                 steps: int, trials: int, seed: int, label: str = ""):
        a = _own_float_array(A, "A")
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimMismatch(f"A must be square, got shape {a.shape}")
        n = a.shape[0]
        q = Q if isinstance(Q, SpdMatrix) else SpdMatrix(Q)
        if q.dim != n:
            raise DimMismatch("Q must match the state dimension")
        if sensor.state_dim != n:
            raise DimMismatch("sensor state dimension must match A")
        x0 = _own_float_array(x0_true, "x0_true").reshape(-1)
        if x0.shape[0] != n:
            raise DimMismatch("x0_true length must match the state dimension")
        if prior0.dim != n:
            raise DimMismatch("prior0 dimension must match the state dimension")
        if int(steps) < 1:
            raise ValidationError("steps must be >= 1")
        if int(trials) < 1:
            raise ValidationError("trials must be >= 1")

        self.A = _readonly(a)
        self.Q = q
        self.sensor = sensor
        self.x0_true = _readonly(x0)
        self.prior0 = prior0
        self.steps = int(steps)
        self.trials = int(trials)
        self.seed = int(seed)
        self.label = str(label)

    @property
    def state_dim(self) -> int:
        return self.A.shape[0]

    @property
    def meas_dim(self) -> int:
        return self.sensor.meas_dim

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": SCENARIO_FORMAT,
            "label": self.label,
            "A": self.A.tolist(),
            "Q": self.Q.mat.tolist(),
            "sensor": {"C": self.sensor.C.tolist(), "R": self.sensor.R.mat.tolist()},
            "x0_true": self.x0_true.tolist(),
            "prior0": {
                "mean": self.prior0.mean.tolist(),
                "cov": self.prior0.cov.mat.tolist(),
            },
            "steps": self.steps,
            "trials": self.trials,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "Scenario":
        if not isinstance(doc, dict):
            raise ValidationError("scenario document must be a JSON object")
        version = doc.get("version")
        if version != SCENARIO_FORMAT:
            raise ValidationError(
                f"unsupported scenario version {version!r}, "
                f"expected {SCENARIO_FORMAT!r}"
            )
        try:
            sensor_doc = doc["sensor"]
            prior_doc = doc["prior0"]
            sensor = LinearSensor(sensor_doc["C"], sensor_doc["R"])
            prior0 = Gaussian(prior_doc["mean"], prior_doc["cov"])
            return cls(
                A=doc["A"],
                Q=doc["Q"],
                sensor=sensor,
                x0_true=doc["x0_true"],
                prior0=prior0,
                steps=doc["steps"],
                trials=doc["trials"],
                seed=doc["seed"],
                label=doc.get("label", ""),
            )
        except KeyError as exc:
            raise ValidationError(f"scenario is missing field {exc.args[0]!r}") from exc
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"malformed scenario: {exc}") from exc

    @classmethod
    def loads(cls, text: str) -> "Scenario":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"scenario is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)

    @classmethod
    def load(cls, path) -> "Scenario":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.loads(fh.read())

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())
            fh.write("\n")

    def __repr__(self) -> str:
        return (
            f"Scenario(label={self.label!r}, n={self.state_dim}, "
            f"m={self.meas_dim}, steps={self.steps}, trials={self.trials})"
        )
