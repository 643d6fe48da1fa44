"""Spreading-vanishing classification, a-priori criteria, and response sweeps."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import solver

SPREADING = "Spreading"
VANISHING = "Vanishing"
UNDETERMINED = "Undetermined"

DEFAULT_EPS_FIELD = 1e-6
DEFAULT_EPS_SPEED = 1e-8


@dataclass
class Outcome:
    verdict: str
    terminal_extent: float
    terminal_field_max: float
    terminal_speed_sum: float
    horizon_reached: float
    spread_length: float

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "terminal_extent": self.terminal_extent,
            "terminal_field_max": self.terminal_field_max,
            "terminal_speed_sum": self.terminal_speed_sum,
            "horizon_reached": self.horizon_reached,
            "spread_length": self.spread_length,
        }


def default_spread_length(h0, h_star):
    """Detection width far beyond both thresholds."""
    return max(40.0 * h0, 4.0 * h_star)


def classify(trajectory, spread_length, eps_field=DEFAULT_EPS_FIELD,
             eps_speed=DEFAULT_EPS_SPEED, settle_window=None):
    """Verdict for one trajectory.

    Spreading once the habitat width reaches spread_length at any snapshot;
    Vanishing when both the fields and the front speeds stay below their
    thresholds throughout the final settle window (default: one coefficient
    period); Undetermined otherwise.
    """
    if trajectory.times.size == 0:
        raise ValueError("trajectory is empty")
    extent = trajectory.extent
    fields = trajectory.max_u + trajectory.max_v
    speeds = trajectory.hprime - trajectory.gprime
    verdict = UNDETERMINED
    if np.max(extent) >= spread_length:
        verdict = SPREADING
    else:
        window = settle_window
        if window is None:
            window = trajectory.spec.coefficients.period
        t_end = trajectory.times[-1]
        sel = trajectory.times >= t_end - window - 1e-9
        if np.count_nonzero(sel) >= 2:
            if np.all(fields[sel] < eps_field) and np.all(speeds[sel] < eps_speed):
                verdict = VANISHING
    return Outcome(
        verdict=verdict,
        terminal_extent=float(extent[-1]),
        terminal_field_max=float(fields[-1]),
        terminal_speed_sum=float(speeds[-1]),
        horizon_reached=float(trajectory.times[-1]),
        spread_length=float(spread_length),
    )


# --------------------------------------------------------------------------
# a-priori criteria

@dataclass
class CriterionRecord:
    criterion: str
    hypothesis_met: bool
    predicted: Optional[str]
    note: str

    def to_dict(self):
        return {
            "criterion": self.criterion,
            "hypothesis_met": self.hypothesis_met,
            "predicted": self.predicted if self.predicted else "no prediction",
            "note": self.note,
        }


@dataclass
class CriteriaPrediction:
    records: list

    def verdict(self):
        for rec in self.records:
            if rec.hypothesis_met and rec.predicted:
                return rec.predicted
        return None

    def to_dict(self):
        return {"verdict": self.verdict() or "no prediction",
                "criteria": [r.to_dict() for r in self.records]}


def predict(spec, thresholds):
    """Evaluate the spreading/vanishing criteria against the thresholds."""
    a_t = spec.coefficients.a.time_average()
    h_star = thresholds.h_star
    l_star = thresholds.l_star
    records = []

    met = a_t >= spec.d1
    records.append(CriterionRecord(
        "growth_dominates_dispersal", met, SPREADING if met else None,
        f"a_T={a_t:.6g} vs d1={spec.d1:.6g}"))

    met = spec.h0 >= 0.5 * h_star
    records.append(CriterionRecord(
        "initial_width_vs_mixed_threshold", met, SPREADING if met else None,
        f"h0={spec.h0:.6g} vs h*/2={0.5 * h_star:.6g}"))

    met = a_t < spec.d1 and l_star is not None and spec.h0 >= 0.5 * l_star
    records.append(CriterionRecord(
        "initial_width_vs_nonlocal_threshold", met, SPREADING if met else None,
        "l* absent" if l_star is None else f"h0={spec.h0:.6g} vs l*/2={0.5 * l_star:.6g}"))

    narrow = (
        a_t < spec.d1
        and l_star is not None
        and spec.h0 < 0.5 * min(h_star, l_star)
    )
    covered = spec.tau == 1.0 or spec.kernel.constant_radius() > 2.0 * spec.h0
    met = narrow and covered
    records.append(CriterionRecord(
        "bistable_response_regime", met, None,
        "small total front response vanishes, large spreads"
        if met else "hypotheses not met"))
    return CriteriaPrediction(records)


def confirm_prediction(spec, prediction, horizon, spread_length,
                       record_stride=10, **classify_kw):
    """Run the simulation behind a Spreading prediction, doubling the horizon once.

    Returns (outcome, agreed).
    """
    expected = prediction.verdict()
    traj = solver.run(spec, horizon, record_stride=record_stride,
                      spread_stop=spread_length)
    outcome = classify(traj, spread_length, **classify_kw)
    if expected and outcome.verdict != expected:
        traj = solver.run(spec, 2.0 * horizon, record_stride=record_stride,
                          spread_stop=spread_length)
        outcome = classify(traj, spread_length, **classify_kw)
    agreed = expected is None or outcome.verdict == expected
    return outcome, agreed


# --------------------------------------------------------------------------
# response-scale sweep

@dataclass
class SweepRow:
    scale: float
    verdict: str
    terminal_extent: float
    terminal_field_max: float


@dataclass
class SweepResult:
    rows: list
    bracket: tuple
    monotone: bool

    def to_dict(self):
        lo, hi = self.bracket
        return {
            "rows": [
                {"scale": r.scale, "verdict": r.verdict,
                 "terminal_extent": r.terminal_extent,
                 "terminal_field_max": r.terminal_field_max}
                for r in self.rows
            ],
            "bracket_last_vanishing": lo,
            "bracket_first_spreading": hi,
            "monotone": self.monotone,
        }


def _sweep_one(args):
    spec, scale, horizon, spread_length, record_stride, eps_field, eps_speed, window = args
    traj = solver.run(spec.scaled_responses(scale), horizon,
                      record_stride=record_stride, spread_stop=spread_length)
    outcome = classify(traj, spread_length, eps_field=eps_field,
                       eps_speed=eps_speed, settle_window=window)
    return SweepRow(
        scale=scale,
        verdict=outcome.verdict,
        terminal_extent=outcome.terminal_extent,
        terminal_field_max=outcome.terminal_field_max,
    )


def sweep_response(spec, factors, horizon, spread_length,
                   record_stride=10, eps_field=DEFAULT_EPS_FIELD,
                   eps_speed=DEFAULT_EPS_SPEED, settle_window=None, jobs=1):
    """Classify runs with the front responses scaled by each factor.

    Factors must be sorted ascending and positive.  Reports the empirical
    transition bracket and whether the verdict sequence is monotone
    (no Vanishing after a Spreading at a smaller factor).
    """
    factors = [float(s) for s in factors]
    if any(s <= 0 for s in factors):
        raise solver.SpecError("response scale factors must be positive")
    if factors != sorted(factors):
        raise solver.SpecError("response scale factors must be sorted ascending")
    tasks = [(spec, s, horizon, spread_length, record_stride,
              eps_field, eps_speed, settle_window) for s in factors]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_one, tasks))
    else:
        rows = [_sweep_one(t) for t in tasks]
    last_vanish = None
    first_spread = None
    monotone = True
    seen_spread = False
    for row in rows:
        if row.verdict == VANISHING:
            if seen_spread:
                monotone = False
            last_vanish = row.scale
        elif row.verdict == SPREADING:
            seen_spread = True
            if first_spread is None:
                first_spread = row.scale
    return SweepResult(rows=rows, bracket=(last_vanish, first_spread), monotone=monotone)
