"""Time-periodic environment coefficients and their averages.

Three concrete forms are supported: constant, sinusoidal, and a uniformly
sampled table interpolated linearly with wraparound.  All forms must stay
strictly positive; positivity is checked on a dense sample at construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

POSITIVITY_SAMPLES = 1000


class CoefficientError(ValueError):
    pass


@dataclass(frozen=True)
class PeriodicCoefficient:
    """One positive T-periodic rate function.

    kind is one of "constant", "sinusoidal", "table".  For the sinusoidal
    form the value is mean + amp*sin(2*pi*t/period + phase); the table form
    holds samples at t_k = k*period/len(values) and wraps around.
    """

    kind: str
    period: float
    value: float = 0.0
    mean: float = 0.0
    amp: float = 0.0
    phase: float = 0.0
    values: tuple = field(default=())

    def __post_init__(self):
        if not np.isfinite(self.period) or self.period <= 0:
            raise CoefficientError("period: must be a positive finite number")
        if self.kind == "constant":
            if self.value <= 0:
                raise CoefficientError("value: constant coefficient must be positive")
        elif self.kind == "sinusoidal":
            if self.mean <= 0:
                raise CoefficientError("mean: must be positive")
            if self.amp < 0:
                raise CoefficientError("amp: must be nonnegative")
            if self.amp >= self.mean:
                raise CoefficientError("amp: amplitude must be smaller than the mean")
        elif self.kind == "table":
            vals = np.asarray(self.values, dtype=float)
            if vals.size < 1:
                raise CoefficientError("values: table needs at least one sample")
            if np.min(vals) <= 0:
                raise CoefficientError("values: table samples must be strictly positive")
            object.__setattr__(self, "values", tuple(float(v) for v in vals))
        else:
            raise CoefficientError(f"kind: unknown coefficient form {self.kind!r}")
        t = np.linspace(0.0, self.period, POSITIVITY_SAMPLES, endpoint=False)
        if np.min(self.evaluate(t)) <= 0:
            raise CoefficientError("coefficient must be strictly positive over one period")

    def evaluate(self, t):
        """Value of the periodic extension at time t (scalar or array)."""
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            out = np.full_like(t, self.value)
        elif self.kind == "sinusoidal":
            out = self.mean + self.amp * np.sin(2.0 * np.pi * t / self.period + self.phase)
        else:
            vals = np.asarray(self.values)
            n = vals.size
            pos = np.mod(t, self.period) / self.period * n
            lo = np.floor(pos).astype(int) % n
            hi = (lo + 1) % n
            frac = pos - np.floor(pos)
            out = vals[lo] * (1.0 - frac) + vals[hi] * frac
        return out if out.ndim else float(out)

    def __call__(self, t):
        return self.evaluate(t)

    def time_average(self):
        """Mean value over one period: analytic where possible, Simpson otherwise."""
        if self.kind == "constant":
            return self.value
        if self.kind == "sinusoidal":
            return self.mean
        panels = max(10_000, 2 * len(self.values))
        if panels % 2:
            panels += 1
        t = np.linspace(0.0, self.period, panels + 1)
        y = self.evaluate(t)
        h = self.period / panels
        integral = h / 3.0 * (y[0] + y[-1] + 4.0 * np.sum(y[1:-1:2]) + 2.0 * np.sum(y[2:-1:2]))
        return integral / self.period

    def maximum(self):
        """Supremum over one period (dense sample for tables/sinusoids)."""
        if self.kind == "constant":
            return self.value
        if self.kind == "sinusoidal":
            return self.mean + self.amp
        return float(max(self.values))

    def minimum(self):
        if self.kind == "constant":
            return self.value
        if self.kind == "sinusoidal":
            return self.mean - self.amp
        return float(min(self.values))

    def to_dict(self):
        if self.kind == "constant":
            return {"kind": "constant", "value": self.value, "period": self.period}
        if self.kind == "sinusoidal":
            return {
                "kind": "sinusoidal",
                "mean": self.mean,
                "amp": self.amp,
                "phase": self.phase,
                "period": self.period,
            }
        return {"kind": "table", "values": list(self.values), "period": self.period}

    @staticmethod
    def from_dict(d):
        kind = d.get("kind")
        if kind == "constant":
            return constant(d["value"], period=d.get("period", 1.0))
        if kind == "sinusoidal":
            return sinusoidal(
                d["mean"], d["amp"], phase=d.get("phase", 0.0), period=d.get("period", 1.0)
            )
        if kind == "table":
            return table(d["values"], period=d.get("period", 1.0))
        raise CoefficientError(f"kind: unknown coefficient form {kind!r}")


def constant(value, period=1.0):
    return PeriodicCoefficient(kind="constant", period=period, value=value)


def sinusoidal(mean, amp, phase=0.0, period=1.0):
    return PeriodicCoefficient(kind="sinusoidal", period=period, mean=mean, amp=amp, phase=phase)


def table(values, period=1.0):
    return PeriodicCoefficient(kind="table", period=period, values=tuple(values))


@dataclass(frozen=True)
class CoefficientSet:
    """The four environment rates a, b, c, d sharing one period."""

    a: PeriodicCoefficient
    b: PeriodicCoefficient
    c: PeriodicCoefficient
    d: PeriodicCoefficient

    def __post_init__(self):
        periods = {self.a.period, self.b.period, self.c.period, self.d.period}
        if len(periods) != 1:
            raise CoefficientError("all four coefficients must share one period")

    @property
    def period(self):
        return self.a.period

    def to_dict(self):
        return {k: getattr(self, k).to_dict() for k in ("a", "b", "c", "d")}

    @staticmethod
    def from_dict(d):
        return CoefficientSet(
            a=PeriodicCoefficient.from_dict(d["a"]),
            b=PeriodicCoefficient.from_dict(d["b"]),
            c=PeriodicCoefficient.from_dict(d["c"]),
            d=PeriodicCoefficient.from_dict(d["d"]),
        )
