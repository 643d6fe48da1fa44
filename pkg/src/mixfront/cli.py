"""Command-line entry point: simulate | eigen | predict | sweep | verify.

Exit codes: 0 success, 1 configuration error, 2 runtime (solver) error,
3 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import dichotomy as classify_mod

from . import harness, report, solver
from .config import ConfigError, RunConfig
from .eigen import compute_thresholds, lambda1_mixed, lambda1_nonlocal

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_VERIFY = 3


def _parser():
    p = argparse.ArgumentParser(
        prog="mixfront",
        description="Two-species competition with mixed dispersal and free boundaries",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in (
        ("simulate", "integrate the free-boundary system and classify the outcome"),
        ("eigen", "principal-eigenvalue curves and critical lengths"),
        ("predict", "a-priori spreading/vanishing criteria"),
        ("sweep", "response-scale sweep across the dichotomy"),
        ("verify", "executable checks of the qualitative theory"),
    ):
        q = sub.add_parser(name, help=text)
        q.add_argument("--config", required=True, help="path to the JSON run configuration")
        q.add_argument("--out", default=".", help="output directory")
        q.add_argument("--horizon", type=float, default=None, help="override the horizon")
        q.add_argument("--seed", type=int, default=None, help="override the seed")
        q.add_argument("--jobs", type=int, default=None, help="parallel workers for sweeps")
        if name == "predict":
            q.add_argument("--confirm", action="store_true",
                           help="run the confirming simulation for a predicted verdict")
    return p


def _load(args):
    cfg = RunConfig.from_file(args.config)
    if args.horizon is not None:
        cfg.horizon = args.horizon
    if args.seed is not None:
        cfg.seed = args.seed
    if args.jobs is not None:
        cfg.jobs = args.jobs
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return cfg, out


def _thresholds(cfg, spec):
    return compute_thresholds(
        spec.kernel, spec.d1, spec.d2, spec.tau,
        spec.coefficients.a, spec.coefficients.c,
        tol=cfg.bisect_tol, m=cfg.eigen_m,
    )


def _spread_length(cfg, spec, thresholds):
    if cfg.spread_length is not None:
        return cfg.spread_length
    return classify_mod.default_spread_length(spec.h0, thresholds.h_star)


def cmd_simulate(args):
    cfg, out = _load(args)
    spec = cfg.build_spec()
    thresholds = _thresholds(cfg, spec)
    spread = _spread_length(cfg, spec, thresholds)
    traj = solver.run(spec, cfg.horizon, record_stride=cfg.record_stride,
                      spread_stop=spread)
    outcome = classify_mod.classify(
        traj, spread, eps_field=cfg.eps_field, eps_speed=cfg.eps_speed,
        settle_window=cfg.settle_window)
    report.write_trajectory_csv(traj, out / "trajectory.csv")
    report.write_fields_jsonl(traj, out / "fields.jsonl")
    payload = outcome.to_dict()
    payload["seed"] = cfg.seed
    report.write_json(payload, out / "outcome.json")
    report.fronts_figure(traj, out / "fronts.svg")
    report.fields_figure(traj, out / "fields.svg")
    print(f"verdict: {outcome.verdict} (extent {outcome.terminal_extent:.4g} "
          f"at t={outcome.horizon_reached:.4g})")
    return EXIT_OK


def cmd_eigen(args):
    cfg, out = _load(args)
    spec = cfg.build_spec()
    thresholds = _thresholds(cfg, spec)
    lengths = np.geomspace(0.25, 32.0, 22)
    rows = []
    for ell in lengths:
        rows.append(("nonlocal", ell, lambda1_nonlocal(
            spec.kernel, spec.d1, spec.coefficients.a, ell, m=cfg.eigen_m).lambda1))
        rows.append(("mixed", ell, lambda1_mixed(
            spec.kernel, spec.d2, spec.tau, spec.coefficients.c, ell,
            m=cfg.eigen_m).lambda1))
    report.write_eigen_csv(rows, out / "lambda_curves.csv")
    report.eigen_figure(rows, out / "lambda_curves.svg", thresholds=thresholds)
    payload = {
        "h_star": thresholds.h_star,
        "l_star": thresholds.l_star,
        "a_T": spec.coefficients.a.time_average(),
        "c_T": spec.coefficients.c.time_average(),
        "d1": spec.d1, "d2": spec.d2, "tau": spec.tau,
    }
    report.write_json(payload, out / "thresholds.json")
    l_txt = "absent" if thresholds.l_star is None else f"{thresholds.l_star:.6g}"
    print(f"h_star={thresholds.h_star:.6g} l_star={l_txt}")
    return EXIT_OK


def cmd_predict(args):
    cfg, out = _load(args)
    spec = cfg.build_spec()
    thresholds = _thresholds(cfg, spec)
    prediction = classify_mod.predict(spec, thresholds)
    payload = prediction.to_dict()
    payload["h_star"] = thresholds.h_star
    payload["l_star"] = thresholds.l_star
    if args.confirm:
        spread = _spread_length(cfg, spec, thresholds)
        outcome, agreed = classify_mod.confirm_prediction(
            spec, prediction, cfg.horizon, spread,
            record_stride=cfg.record_stride, eps_field=cfg.eps_field,
            eps_speed=cfg.eps_speed, settle_window=cfg.settle_window)
        payload["confirmation"] = outcome.to_dict()
        payload["agreed"] = agreed
    report.write_json(payload, out / "prediction.json")
    print(f"prediction: {prediction.verdict() or 'no prediction'}")
    return EXIT_OK


def cmd_sweep(args):
    cfg, out = _load(args)
    spec = cfg.build_spec()
    thresholds = _thresholds(cfg, spec)
    spread = _spread_length(cfg, spec, thresholds)
    factors = cfg.sweep_factors or list(np.geomspace(0.01, 100.0, 9))
    result = classify_mod.sweep_response(
        spec, factors, cfg.horizon, spread,
        record_stride=cfg.record_stride, eps_field=cfg.eps_field,
        eps_speed=cfg.eps_speed, settle_window=cfg.settle_window,
        jobs=max(1, cfg.jobs))
    report.write_sweep_csv(result, out / "sweep.csv")
    report.write_json(result.to_dict(), out / "sweep.json")
    report.sweep_figure(result, out / "sweep.svg")
    lo, hi = result.bracket
    print(f"bracket: last vanishing {lo}, first spreading {hi}, "
          f"monotone {result.monotone}")
    if not result.monotone:
        return EXIT_VERIFY
    return EXIT_OK


def cmd_verify(args):
    cfg, out = _load(args)
    spec = cfg.build_spec()
    thresholds = _thresholds(cfg, spec)
    artifacts = {}
    result = harness.verify_suite(
        spec, horizon=cfg.horizon, thresholds=thresholds, m=cfg.eigen_m,
        seed=cfg.seed, record_stride=cfg.record_stride, artifacts=artifacts)
    result["seed"] = cfg.seed
    report.write_json(result, out / "verification.json")
    traj = artifacts.get("trajectory")
    if traj is not None:
        sup = artifacts.get("supersolution")
        report.fronts_figure(traj, out / "verification.svg",
                             cap=sup.front_cap if sup else None)
    for name, entry in result["checks"].items():
        status = {True: "pass", False: "FAIL", None: "skip"}[entry["passed"]]
        print(f"{status:>4}  {name}")
    if not result["all_passed"]:
        return EXIT_VERIFY
    return EXIT_OK


_COMMANDS = {
    "simulate": cmd_simulate,
    "eigen": cmd_eigen,
    "predict": cmd_predict,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except solver.SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except harness.HypothesisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
