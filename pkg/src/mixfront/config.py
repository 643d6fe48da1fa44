"""Run configuration: a single JSON file with tagged records.

Parsing is strict and field-addressed: any invalid entry raises ConfigError
with the offending field named.  Serialisation round-trips bit-identically
(sorted keys, canonical float repr via json).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .coefficients import CoefficientError, CoefficientSet
from .kernels import Kernel, KernelError
from .solver import InitialProfile, ProblemSpec, SpecError


class ConfigError(ValueError):
    pass


def _require(d, key, kind, where=""):
    label = f"{where}{key}"
    if key not in d:
        raise ConfigError(f"{label}: missing")
    value = d[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"{label}: expected a number")
        return float(value)
    if kind is int:
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError(f"{label}: expected an integer")
        return value
    if kind is dict:
        if not isinstance(value, dict):
            raise ConfigError(f"{label}: expected an object")
        return value
    return value


@dataclass
class RunConfig:
    d1: float
    d2: float
    tau: float
    mu: float
    rho1: float
    rho2: float
    h0: float
    coefficients: CoefficientSet
    kernel: Kernel
    u0: InitialProfile = field(default_factory=InitialProfile)
    v0: InitialProfile = field(default_factory=InitialProfile)
    grid_n: int = 256
    eigen_m: int = 400
    horizon: float = 40.0
    record_stride: int = 10
    bisect_tol: float = 1e-4
    spread_length: Optional[float] = None
    eps_field: float = 1e-6
    eps_speed: float = 1e-8
    settle_window: Optional[float] = None
    sweep_factors: Optional[list] = None
    seed: int = 0
    jobs: int = 1

    def to_dict(self):
        out = {
            "d1": self.d1, "d2": self.d2, "tau": self.tau,
            "mu": self.mu, "rho1": self.rho1, "rho2": self.rho2,
            "h0": self.h0,
            "coefficients": self.coefficients.to_dict(),
            "kernel": self.kernel.to_dict(),
            "u0": self.u0.to_dict(), "v0": self.v0.to_dict(),
            "grid_n": self.grid_n, "eigen_m": self.eigen_m,
            "horizon": self.horizon, "record_stride": self.record_stride,
            "bisect_tol": self.bisect_tol,
            "eps_field": self.eps_field, "eps_speed": self.eps_speed,
            "seed": self.seed, "jobs": self.jobs,
        }
        if self.spread_length is not None:
            out["spread_length"] = self.spread_length
        if self.settle_window is not None:
            out["settle_window"] = self.settle_window
        if self.sweep_factors is not None:
            out["sweep_factors"] = list(self.sweep_factors)
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @staticmethod
    def from_dict(raw):
        if not isinstance(raw, dict):
            raise ConfigError("config: expected a JSON object at top level")
        try:
            coeffs = CoefficientSet.from_dict(_require(raw, "coefficients", dict))
        except (CoefficientError, KeyError) as exc:
            raise ConfigError(f"coefficients: {exc}") from exc
        try:
            kernel = Kernel.from_dict(_require(raw, "kernel", dict))
        except (KernelError, KeyError) as exc:
            raise ConfigError(f"kernel: {exc}") from exc
        cfg = RunConfig(
            d1=_require(raw, "d1", float),
            d2=_require(raw, "d2", float),
            tau=_require(raw, "tau", float),
            mu=_require(raw, "mu", float),
            rho1=_require(raw, "rho1", float),
            rho2=_require(raw, "rho2", float),
            h0=_require(raw, "h0", float),
            coefficients=coeffs,
            kernel=kernel,
            u0=InitialProfile.from_dict(raw.get("u0", {"kind": "cosine"})),
            v0=InitialProfile.from_dict(raw.get("v0", {"kind": "cosine"})),
            grid_n=raw.get("grid_n", 256),
            eigen_m=raw.get("eigen_m", 400),
            horizon=raw.get("horizon", 40.0),
            record_stride=raw.get("record_stride", 10),
            bisect_tol=raw.get("bisect_tol", 1e-4),
            spread_length=raw.get("spread_length"),
            eps_field=raw.get("eps_field", 1e-6),
            eps_speed=raw.get("eps_speed", 1e-8),
            settle_window=raw.get("settle_window"),
            sweep_factors=raw.get("sweep_factors"),
            seed=raw.get("seed", 0),
            jobs=raw.get("jobs", 1),
        )
        for name in ("grid_n", "eigen_m", "record_stride", "seed", "jobs"):
            if not isinstance(getattr(cfg, name), int) or isinstance(getattr(cfg, name), bool):
                raise ConfigError(f"{name}: expected an integer")
        for name in ("horizon", "bisect_tol", "eps_field", "eps_speed"):
            if not isinstance(getattr(cfg, name), (int, float)):
                raise ConfigError(f"{name}: expected a number")
        if cfg.horizon < 0:
            raise ConfigError("horizon: must be nonnegative")
        if cfg.bisect_tol <= 0:
            raise ConfigError("bisect_tol: must be positive")
        if cfg.record_stride < 1:
            raise ConfigError("record_stride: must be at least 1")
        if cfg.sweep_factors is not None:
            if not isinstance(cfg.sweep_factors, list) or not cfg.sweep_factors:
                raise ConfigError("sweep_factors: expected a nonempty list of numbers")
        return cfg

    @staticmethod
    def from_file(path):
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON in {path}: {exc}") from exc
        return RunConfig.from_dict(raw)

    def build_spec(self):
        """Materialise the validated problem specification."""
        try:
            return ProblemSpec(
                d1=self.d1, d2=self.d2, tau=self.tau,
                mu=self.mu, rho1=self.rho1, rho2=self.rho2,
                h0=self.h0, coefficients=self.coefficients,
                kernel=self.kernel, u0=self.u0, v0=self.v0,
                grid_n=self.grid_n,
            )
        except (SpecError, KernelError) as exc:
            raise ConfigError(str(exc)) from exc
