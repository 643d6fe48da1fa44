"""Time integration of the two-species free-boundary system.

Fields live on the fixed reference grid; the habitat motion enters through
an advection term and a rescaled diffusion factor.  Fronts advance by an
explicit Euler update of the flux law; the random-dispersal part of the
second species is treated implicitly (tridiagonal solve), everything else
explicitly under a positivity-preserving step-size rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.linalg import solve_banded

from .coefficients import CoefficientSet
from .kernels import require_valid
from .operators import (
    NonlocalMatrix,
    assemble_nonlocal,
    boundary_gradient,
    trapezoid_weights,
)
from .transform import ReferenceGrid, advection_speed, diffusion_factor, physical_x

UNDERSHOOT_TOL = 1e-13


class SolverError(RuntimeError):
    def __init__(self, message, time=None):
        if time is not None:
            message = f"{message} (at t={time:.6g})"
        super().__init__(message)
        self.time = time


class UndershootError(SolverError):
    """A field dipped below the roundoff floor: the step-size rule was violated."""


class FrontCollapseError(SolverError):
    """The habitat width would become nonpositive."""


class SpecError(ValueError):
    pass


# --------------------------------------------------------------------------
# growth models

@dataclass(frozen=True)
class LotkaVolterraGrowth:
    """Competition growth u(a - u - b v), v(c - v - d u)."""

    coefficients: CoefficientSet

    def f1(self, t, x, u, v):
        co = self.coefficients
        return u * (co.a.evaluate(t) - u - co.b.evaluate(t) * v)

    def f2(self, t, x, u, v):
        co = self.coefficients
        return v * (co.c.evaluate(t) - v - co.d.evaluate(t) * u)

    @property
    def saturation(self):
        return max(self.coefficients.a.maximum(), self.coefficients.c.maximum())

    def lipschitz(self, k1, k2):
        co = self.coefficients
        return max(
            co.a.maximum() + 2.0 * k1 + co.b.maximum() * k2,
            co.b.maximum() * k1,
            co.c.maximum() + 2.0 * k2 + co.d.maximum() * k1,
            co.d.maximum() * k2,
        )


@dataclass(frozen=True)
class CustomGrowth:
    """User-supplied rates with a declared saturation level and Lipschitz bound."""

    f1_func: Callable
    f2_func: Callable
    saturation: float
    lipschitz_bound: float

    def f1(self, t, x, u, v):
        return self.f1_func(t, x, u, v)

    def f2(self, t, x, u, v):
        return self.f2_func(t, x, u, v)

    def lipschitz(self, k1, k2):
        return self.lipschitz_bound


def validate_growth(growth, period=1.0):
    """Spot-check the growth interface on a sampled argument lattice."""
    k = growth.saturation
    if not (k > 0 and math.isfinite(k)):
        raise SpecError("growth: saturation constant must be positive and finite")
    ts = np.linspace(0.0, period, 20)
    xs = np.linspace(-5.0, 5.0, 20)
    vals = np.linspace(0.0, 2.0 * k, 20)
    above = np.linspace(1.0000001 * k, 3.0 * k, 20)
    inside = np.linspace(0.0, k, 20)
    for t in ts:
        zero1 = np.asarray(growth.f1(t, xs[:, None], 0.0 * vals[None, :], vals[None, :]))
        zero2 = np.asarray(growth.f2(t, xs[:, None], vals[None, :], 0.0 * vals[None, :]))
        if np.max(np.abs(zero1)) > 1e-10 or np.max(np.abs(zero2)) > 1e-10:
            raise SpecError("growth: rates must vanish when their species is absent")
        sat1 = np.asarray(growth.f1(t, xs[0], above[:, None], inside[None, :]))
        sat2 = np.asarray(growth.f2(t, xs[0], inside[None, :], above[:, None]))
        if np.max(sat1) >= 0.0 or np.max(sat2) >= 0.0:
            raise SpecError("growth: rates must be negative beyond the saturation level")


# --------------------------------------------------------------------------
# initial profiles

@dataclass(frozen=True)
class InitialProfile:
    """Initial density shape on [-h0, h0]: cosine bump or sampled table."""

    kind: str = "cosine"
    amplitude: float = 0.5
    values: tuple = ()

    def evaluate(self, x, h0):
        x = np.asarray(x, dtype=float)
        if self.kind == "cosine":
            out = self.amplitude * np.cos(np.pi * x / (2.0 * h0))
        elif self.kind == "table":
            vals = np.asarray(self.values, dtype=float)
            xs = np.linspace(-h0, h0, vals.size)
            out = np.interp(x, xs, vals)
        else:
            raise SpecError(f"initial profile: unknown kind {self.kind!r}")
        # zero strictly outside only: endpoint values stay visible to validation
        return np.where(np.abs(x) > h0, 0.0, out)

    def to_dict(self):
        if self.kind == "cosine":
            return {"kind": "cosine", "amplitude": self.amplitude}
        return {"kind": "table", "values": list(self.values)}

    @staticmethod
    def from_dict(d):
        if d.get("kind") == "table":
            return InitialProfile(kind="table", values=tuple(d["values"]))
        return InitialProfile(kind="cosine", amplitude=d.get("amplitude", 0.5))


# --------------------------------------------------------------------------
# problem specification and derived bounds

@dataclass(frozen=True)
class ProblemSpec:
    d1: float
    d2: float
    tau: float
    mu: float
    rho1: float
    rho2: float
    h0: float
    coefficients: CoefficientSet
    kernel: object
    u0: InitialProfile = field(default_factory=InitialProfile)
    v0: InitialProfile = field(default_factory=InitialProfile)
    growth: object = None
    grid_n: int = 256
    safety: float = 0.5

    def __post_init__(self):
        for name in ("d1", "d2", "mu", "rho1", "rho2", "h0"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise SpecError(f"{name}: must be a positive finite number")
        if not 0.0 < self.tau <= 1.0:
            raise SpecError("tau: must lie in (0, 1]")
        if self.grid_n < 8:
            raise SpecError("grid_n: too coarse")
        require_valid(self.kernel)
        if self.growth is None:
            object.__setattr__(self, "growth", LotkaVolterraGrowth(self.coefficients))
        validate_growth(self.growth, period=self.coefficients.period)
        for name in ("u0", "v0"):
            prof = getattr(self, name)
            xs = np.linspace(-self.h0, self.h0, 1001)
            vals = prof.evaluate(xs, self.h0)
            if abs(vals[0]) > 1e-12 or abs(vals[-1]) > 1e-12:
                raise SpecError(f"{name}: must vanish at the initial fronts")
            if np.min(vals[1:-1]) <= 0.0:
                raise SpecError(f"{name}: must be positive inside the initial habitat")

    def scaled_responses(self, factor):
        """Copy with mu, rho1, rho2 multiplied by a positive factor."""
        if factor <= 0:
            raise SpecError("response scale factor must be positive")
        return replace(
            self, mu=factor * self.mu, rho1=factor * self.rho1, rho2=factor * self.rho2
        )


@dataclass(frozen=True)
class Bounds:
    """Solution bounds and the front-speed envelope implied by the data."""

    k1: float
    k2: float
    k3: float
    lipschitz: float
    mu: float
    rho1: float
    rho2: float
    h0: float

    def envelope(self, t):
        rate = self.rho1 * self.k1 + self.rho2 * self.k2
        amp = self.h0 * self.rho1 * self.k1 + self.h0 * self.rho2 * self.k2 + self.mu * self.k3
        return self.mu * self.k3 + 2.0 * amp * np.exp(rate * np.asarray(t))


def compute_bounds(spec):
    xs = np.linspace(-spec.h0, spec.h0, 4001)
    u_vals = spec.u0.evaluate(xs, spec.h0)
    v_vals = spec.v0.evaluate(xs, spec.h0)
    sup_u0 = float(np.max(u_vals))
    sup_v0 = float(np.max(v_vals))
    v0_c1 = sup_v0 + float(np.max(np.abs(np.gradient(v_vals, xs))))
    k = spec.growth.saturation
    k1 = max(sup_u0, k)
    k2 = max(sup_v0, k)
    lhat = spec.growth.lipschitz(k1, k2)
    k3 = 2.0 * k2 * max(
        math.sqrt((lhat + spec.d2 * (1.0 - spec.tau)) / (2.0 * spec.d2 * spec.tau)),
        4.0 * v0_c1 / (3.0 * k2),
    )
    return Bounds(
        k1=k1, k2=k2, k3=k3, lipschitz=lhat,
        mu=spec.mu, rho1=spec.rho1, rho2=spec.rho2, h0=spec.h0,
    )


# --------------------------------------------------------------------------
# state and stepping

@dataclass
class FrontState:
    t: float
    g: float
    h: float
    u: np.ndarray
    v: np.ndarray
    gprime: float = 0.0
    hprime: float = 0.0

    @property
    def width(self):
        return self.h - self.g


def front_speeds(state, spec):
    """Front velocities from the boundary gradient and the outward leakage."""
    n = state.u.size - 1
    z = np.linspace(-1.0, 1.0, n + 1)
    dz = 2.0 / n
    width = state.width
    x = physical_x(state.g, state.h, z)
    w = trapezoid_weights(n + 1, dz)
    combo = spec.rho1 * state.u + spec.rho2 * state.v
    flux_right = 0.5 * width * np.sum(w * combo * spec.kernel.tail_mass(state.h - x))
    flux_left = 0.5 * width * np.sum(w * combo * spec.kernel.tail_mass(x - state.g))
    vx_right = boundary_gradient(state.v, state.g, state.h, "right")
    vx_left = boundary_gradient(state.v, state.g, state.h, "left")
    return (-spec.mu * vx_left - flux_left, -spec.mu * vx_right + flux_right)


def upwind_advection(field, eta, dz):
    """First-order transport term eta * d(field)/dz, upwinded by the sign of eta."""
    out = np.zeros_like(field)
    fwd = np.diff(field) / dz
    eta_i = eta[1:-1]
    out[1:-1] = np.where(eta_i > 0.0, eta_i * fwd[1:], eta_i * fwd[:-1])
    return out


def initial_state(spec):
    grid = ReferenceGrid(spec.grid_n)
    x = physical_x(-spec.h0, spec.h0, grid.z)
    u = spec.u0.evaluate(x, spec.h0)
    v = spec.v0.evaluate(x, spec.h0)
    u[0] = u[-1] = 0.0
    v[0] = v[-1] = 0.0
    state = FrontState(t=0.0, g=-spec.h0, h=spec.h0, u=u, v=v)
    state.gprime, state.hprime = front_speeds(state, spec)
    return state


def _check_undershoot(field, t):
    low = float(np.min(field))
    if low < -UNDERSHOOT_TOL:
        raise UndershootError(f"field undershoot {low:.3e}", time=t)
    np.maximum(field, 0.0, out=field)


def step(state, spec, dt):
    """Advance one explicit front update plus one IMEX field update."""
    n = state.u.size - 1
    grid = ReferenceGrid(n)
    gp, hp = state.gprime, state.hprime
    t_new = state.t + dt
    g_new = state.g + dt * gp
    h_new = state.h + dt * hp
    if h_new - g_new <= 0.0:
        raise FrontCollapseError("habitat width became nonpositive", time=t_new)

    width = state.width
    xi = diffusion_factor(state.g, state.h)
    eta = advection_speed(state.g, state.h, gp, hp, grid.z)
    w_mat = assemble_nonlocal(spec.kernel, width, grid)
    x = physical_x(state.g, state.h, grid.z)

    u_new = state.u + dt * (
        upwind_advection(state.u, eta, grid.dz)
        + spec.d1 * (w_mat.apply(state.u) - state.u)
        + spec.growth.f1(state.t, x, state.u, state.v)
    )
    u_new[0] = u_new[-1] = 0.0
    _check_undershoot(u_new, t_new)

    explicit = upwind_advection(state.v, eta, grid.dz) + spec.growth.f2(
        state.t, x, state.u, state.v
    )
    if spec.tau < 1.0:
        explicit += spec.d2 * (1.0 - spec.tau) * (w_mat.apply(state.v) - state.v)
    rhs = (state.v + dt * explicit)[1:-1]
    c = dt * spec.d2 * spec.tau * xi / grid.dz**2
    ab = np.zeros((3, n - 1))
    ab[0, 1:] = -c
    ab[1, :] = 1.0 + 2.0 * c
    ab[2, :-1] = -c
    v_new = np.zeros(n + 1)
    v_new[1:-1] = solve_banded((1, 1), ab, rhs)
    _check_undershoot(v_new, t_new)

    new_state = FrontState(t=t_new, g=g_new, h=h_new, u=u_new, v=v_new)
    new_state.gprime, new_state.hprime = front_speeds(new_state, spec)
    return new_state


def step_size(state, spec, bounds):
    """Positivity-preserving step: advection CFL, explicit nonlocal, reaction."""
    n = state.u.size - 1
    dz_phys = state.width / n
    speed = max(abs(state.gprime), abs(state.hprime), 1e-14)
    return spec.safety * min(
        dz_phys / speed,
        1.0 / (spec.d2 * (1.0 - spec.tau) + spec.d1),
        1.0 / bounds.lipschitz,
    )


# --------------------------------------------------------------------------
# trajectories

@dataclass
class Trajectory:
    spec: ProblemSpec
    times: np.ndarray
    g: np.ndarray
    h: np.ndarray
    gprime: np.ndarray
    hprime: np.ndarray
    max_u: np.ndarray
    max_v: np.ndarray
    vx_left: np.ndarray
    vx_right: np.ndarray
    states: list
    horizon: float
    early_stop: bool
    steps: int

    @property
    def extent(self):
        return self.h - self.g


def _collect(spec, records, horizon, early, steps):
    return Trajectory(
        spec=spec,
        times=np.array([s.t for s in records]),
        g=np.array([s.g for s in records]),
        h=np.array([s.h for s in records]),
        gprime=np.array([s.gprime for s in records]),
        hprime=np.array([s.hprime for s in records]),
        max_u=np.array([float(np.max(s.u)) for s in records]),
        max_v=np.array([float(np.max(s.v)) for s in records]),
        vx_left=np.array([boundary_gradient(s.v, s.g, s.h, "left") for s in records]),
        vx_right=np.array([boundary_gradient(s.v, s.g, s.h, "right") for s in records]),
        states=records,
        horizon=horizon,
        early_stop=early,
        steps=steps,
    )


def run(spec, horizon, record_stride=10, spread_stop=None):
    """Integrate to the horizon, recording every record_stride accepted steps.

    When spread_stop is given the run halts early once the habitat width
    reaches it (used by the dichotomy classifier).
    """
    if horizon < 0:
        raise SpecError("horizon: must be nonnegative")
    bounds = compute_bounds(spec)
    state = initial_state(spec)
    records = [state]
    steps = 0
    early = False
    while state.t < horizon - 1e-12:
        dt = min(step_size(state, spec, bounds), horizon - state.t)
        state = step(state, spec, dt)
        steps += 1
        if steps % record_stride == 0:
            records.append(state)
        if spread_stop is not None and state.width >= spread_stop:
            early = True
            break
    if records[-1] is not state:
        records.append(state)
    return _collect(spec, records, horizon, early, steps)


# --------------------------------------------------------------------------
# fixed-domain single-species runs (dynamical oracle for eigenvalue signs)

@dataclass
class FixedDomainTrajectory:
    times: np.ndarray
    fields: np.ndarray
    x: np.ndarray
    period: float

    @property
    def max_field(self):
        return np.max(self.fields, axis=1)

    def field_at(self, t):
        idx = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[idx] - t) > 1e-9 * max(1.0, abs(t)):
            raise ValueError(f"no snapshot recorded at t={t}")
        return self.fields[idx]

    def periodicity_residual(self, t):
        """max|u(t) - u(t - period)| over the domain."""
        return float(np.max(np.abs(self.field_at(t) - self.field_at(t - self.period))))


def run_fixed_domain_single(kernel, d1, a, length, u0, horizon, m=200,
                            record_stride=1, cap=None):
    """Single species with pure nonlocal dispersal on a frozen interval.

    Explicit Euler under the same positivity rule; the step divides the
    coefficient period exactly so periodicity residuals compare aligned
    snapshots.  Pass a shared `cap` (upper bound on the data) to give two
    runs identical steps for pointwise comparison.
    """
    if d1 <= 0:
        raise SpecError("d1: must be positive")
    if length <= 0:
        raise SpecError("length: must be positive")
    x = np.linspace(-length / 2.0, length / 2.0, m + 1)
    u = u0(x) if callable(u0) else np.asarray(u0, dtype=float).copy()
    if u.size != m + 1:
        raise SpecError("u0: wrong sample count for the grid")
    if np.min(u) < 0 or np.max(u) <= 0:
        raise SpecError("u0: must be nonnegative and not identically zero")
    period = a.period if hasattr(a, "period") else 1.0
    a_fun = a.evaluate if hasattr(a, "evaluate") else (lambda t: float(a))
    a_max = a.maximum() if hasattr(a, "maximum") else float(a)
    cap = max(float(np.max(u)), a_max, cap or 0.0)
    lip = a_max + 2.0 * cap
    dt0 = 0.5 * min(1.0 / d1, 1.0 / lip)
    per_period = max(1, math.ceil(period / dt0))
    dt = period / per_period
    n_steps = math.ceil(horizon / dt - 1e-9)
    w_mat = NonlocalMatrix(kernel, length, m + 1)
    times = [0.0]
    fields = [u.copy()]
    t = 0.0
    for k in range(1, n_steps + 1):
        rate = a_fun(t)
        u = u + dt * (d1 * (w_mat.apply(u) - u) + u * (rate - u))
        _check_undershoot(u, t + dt)
        t = k * dt
        if k % record_stride == 0 or k == n_steps:
            times.append(t)
            fields.append(u.copy())
    return FixedDomainTrajectory(
        times=np.array(times), fields=np.array(fields), x=x, period=period
    )
