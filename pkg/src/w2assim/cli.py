"""Command-line interface.

Subcommands::

    w2          closed-form W2 distance between two inline Gaussians
    gain        optimal gain for a scenario's initial belief and sensor
    assimilate  one measurement update on a scenario's initial belief
    filter      one filter realization, per-step records as CSV or JSON
    mc          Monte Carlo over trials: records CSV plus JSON summary
    verify      transport-oracle cross-check of the closed forms

Exit codes: 0 success, 1 validation error (bad flags, malformed config,
failed verification), 2 numerical failure.  All output is deterministic
given ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .assimilation import (
    OptimizerSettings,
    assimilate,
    kalman_gain,
    wasserstein_optimal_gain_numeric,
)
from .errors import NumericalError, ValidationError
from .filtering import records_to_csv, run_filter, run_monte_carlo
from .gaussians import Gaussian
from .scenario import Scenario
from .verification import (
    DEFAULT_REL_TOL,
    DEFAULT_SAMPLES,
    DEFAULT_SEEDS,
    oracle_crosscheck,
)
from .wasserstein import w2_gaussian

#: Gap allowed between the numeric and closed-form gains by ``gain --check-numeric``.
GAIN_CHECK_TOL = 1e-6


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage errors with exit code 1."""

    def error(self, message):
        raise _UsageError(message)


def _parse_vector(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ValidationError(f"bad vector {text!r}: {exc}") from exc


def _parse_matrix(text: str) -> list[list[float]]:
    rows = [r for r in text.split(";") if r.strip() != ""]
    return [_parse_vector(r) for r in rows]


def _parse_gaussian(tokens: list[str], flag: str) -> Gaussian:
    fields: dict[str, str] = {}
    for tok in tokens:
        key, sep, value = tok.partition("=")
        if not sep or key not in ("mean", "cov"):
            raise ValidationError(
                f"{flag} expects mean=... cov=... tokens, got {tok!r}"
            )
        fields[key] = value
    if "mean" not in fields or "cov" not in fields:
        raise ValidationError(f"{flag} needs both mean= and cov=")
    return Gaussian(_parse_vector(fields["mean"]), _parse_matrix(fields["cov"]))


def _load_scenario(args) -> Scenario:
    scenario = Scenario.load(args.scenario)
    seed = scenario.seed if args.seed is None else args.seed
    trials = scenario.trials
    if getattr(args, "trials", None) is not None:
        trials = args.trials
    if seed != scenario.seed or trials != scenario.trials:
        scenario = Scenario(
            A=scenario.A,
            Q=scenario.Q,
            sensor=scenario.sensor,
            x0_true=scenario.x0_true,
            prior0=scenario.prior0,
            steps=scenario.steps,
            trials=trials,
            seed=seed,
            label=scenario.label,
        )
    return scenario


def _emit(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_w2(args) -> int:
    g1 = _parse_gaussian(args.g1, "--g1")
    g2 = _parse_gaussian(args.g2, "--g2")
    _emit(repr(float(w2_gaussian(g1, g2))) + "\n", args.out)
    return 0


def _cmd_gain(args) -> int:
    scenario = _load_scenario(args)
    gain = kalman_gain(scenario.prior0.cov, scenario.sensor)
    doc = {"label": scenario.label, "gain": gain.tolist()}
    exit_code = 0
    if args.check_numeric:
        numeric, info = wasserstein_optimal_gain_numeric(
            scenario.prior0.cov,
            scenario.sensor,
            OptimizerSettings(),
            return_info=True,
        )
        gap = float(
            np.linalg.norm(numeric - gain) / (1.0 + np.linalg.norm(gain))
        )
        doc["numeric_gain"] = numeric.tolist()
        doc["numeric_gap"] = gap
        doc["numeric_iterations"] = info["iterations"]
        doc["numeric_within_tol"] = bool(gap <= GAIN_CHECK_TOL)
        if gap > GAIN_CHECK_TOL:
            exit_code = 2
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return exit_code


def _cmd_assimilate(args) -> int:
    scenario = _load_scenario(args)
    y = _parse_vector(args.measurement)
    posterior, model = assimilate(scenario.prior0, y, scenario.sensor)
    doc = {
        "label": scenario.label,
        "posterior": {
            "mean": posterior.mean.tolist(),
            "cov": posterior.cov.mat.tolist(),
        },
        "w2sq_to_dirac": float(model.w2sq_to_dirac),
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def _cmd_filter(args) -> int:
    scenario = _load_scenario(args)
    records = run_filter(scenario, trial=args.trial)
    if args.format == "json":
        text = json.dumps([r.to_dict() for r in records], indent=2) + "\n"
    else:
        text = records_to_csv([(args.trial, records)])
    _emit(text, args.out)
    return 0


def _cmd_mc(args) -> int:
    scenario = _load_scenario(args)
    if args.out:
        trial_records = (
            (trial, run_filter(scenario, trial))
            for trial in range(scenario.trials)
        )
        if args.format == "json":
            payload = [
                {"trial": t, "records": [r.to_dict() for r in recs]}
                for t, recs in trial_records
            ]
            _emit(json.dumps(payload, indent=2) + "\n", args.out)
        else:
            _emit(records_to_csv(trial_records), args.out)
    summary = run_monte_carlo(scenario)
    sys.stdout.write(json.dumps(summary.to_dict()) + "\n")
    return 0


def _cmd_verify(args) -> int:
    seed = 20240501 if args.seed is None else args.seed
    rows = oracle_crosscheck(
        n=args.n, n_seeds=args.seeds, base_seed=seed, rel_tol=args.tol
    )
    if args.format == "json":
        text = json.dumps([r.to_dict() for r in rows], indent=2) + "\n"
    else:
        lines = [
            f"{r.label}: closed={r.closed_form:.6f} "
            f"empirical={r.empirical_mean:.6f} rel_gap={r.rel_gap:.4f} "
            f"{'PASS' if r.passed else 'FAIL'}"
            for r in rows
        ]
        text = "\n".join(lines) + "\n"
    _emit(text, args.out)
    return 0 if all(r.passed for r in rows) else 1


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="override the scenario seed")
    common.add_argument("--out", default=None, help="write output to this path")
    common.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="output format for record-style output")

    parser = _Parser(prog="w2assim", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_w2 = sub.add_parser("w2", parents=[common],
                          help="closed-form W2 between two Gaussians")
    p_w2.add_argument("--g1", nargs="+", required=True, metavar="KEY=VAL",
                      help="mean=v1,v2 cov=a,b;c,d")
    p_w2.add_argument("--g2", nargs="+", required=True, metavar="KEY=VAL")
    p_w2.set_defaults(func=_cmd_w2)

    p_gain = sub.add_parser("gain", parents=[common],
                            help="optimal gain for a scenario")
    p_gain.add_argument("--scenario", required=True)
    p_gain.add_argument("--check-numeric", action="store_true",
                        help="also run the numeric minimizer and compare")
    p_gain.set_defaults(func=_cmd_gain)

    p_assim = sub.add_parser("assimilate", parents=[common],
                             help="one measurement update on prior0")
    p_assim.add_argument("--scenario", required=True)
    p_assim.add_argument("--measurement", required=True,
                         help="comma-separated measurement vector")
    p_assim.set_defaults(func=_cmd_assimilate)

    p_filter = sub.add_parser("filter", parents=[common],
                              help="run one filter realization")
    p_filter.add_argument("--scenario", required=True)
    p_filter.add_argument("--trial", type=int, default=0,
                          help="trial stream id (default 0)")
    p_filter.set_defaults(func=_cmd_filter)

    p_mc = sub.add_parser("mc", parents=[common],
                          help="Monte Carlo trials with JSON summary")
    p_mc.add_argument("--scenario", required=True)
    p_mc.add_argument("--trials", type=int, default=None,
                      help="override the scenario trial count")
    p_mc.set_defaults(func=_cmd_mc)

    p_verify = sub.add_parser("verify", parents=[common],
                              help="oracle cross-check of the closed forms")
    p_verify.add_argument("--n", type=int, default=DEFAULT_SAMPLES,
                          help="samples per measure")
    p_verify.add_argument("--seeds", type=int, default=DEFAULT_SEEDS,
                          help="number of seeds averaged per pair")
    p_verify.add_argument("--tol", type=float, default=DEFAULT_REL_TOL,
                          help="relative tolerance on the averaged gap")
    p_verify.set_defaults(func=_cmd_verify)

    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
