"""Executable checks for the qualitative theory: bounds, comparison, domination.

The centrepiece is an explicitly constructed dominating pair whose fronts are
capped by a saturating curve; when the combined front response stays below
the derived budget, the true fronts must remain inside the cap for all time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded

from . import solver as solver_mod
from .eigen import compute_thresholds, lambda1_mixed, lambda1_nonlocal
from .operators import assemble_nonlocal, trapezoid_weights
from .solver import run_fixed_domain_single
from .transform import ReferenceGrid, advection_speed, diffusion_factor

SHRINK_LIMIT = 40


class HypothesisError(RuntimeError):
    """A construction hypothesis failed; the message names the first violation."""


def _periodic_prefactor(coeff, samples=4096):
    """exp of the running integral of (coeff - mean), tabulated over one period."""
    t = np.linspace(0.0, coeff.period, samples + 1)
    dev = coeff.evaluate(t) - coeff.time_average()
    integral = np.concatenate([[0.0], np.cumsum(0.5 * (dev[1:] + dev[:-1]) * np.diff(t))])
    values = np.exp(integral)
    return t, values


@dataclass
class Supersolution:
    h1: float
    h2: float
    delta: float
    sigma: float
    k_amp: float
    c_amp: float
    alpha: float
    lambda_u: float
    lambda_v: float
    psi_c1: float
    amplitude_bound: float
    response_budget: float
    residual_min: float
    residual_late_min: float
    t_span: float
    omega_grid: np.ndarray
    omega: np.ndarray

    def shrink_curve(self, t):
        return 1.0 - self.delta / 2.0 - self.delta / 2.0 * np.exp(-self.sigma * np.asarray(t))

    def front_cap(self, t):
        """Upper envelope for h(t) (and -g(t)): strictly increasing, bounded."""
        out = self.h2 * self.shrink_curve(t)
        return out if np.ndim(out) else float(out)

    @property
    def cap_limit(self):
        return self.h2 * (1.0 - self.delta / 2.0)

    def to_dict(self):
        return {
            "h1": self.h1, "h2": self.h2, "delta": self.delta, "sigma": self.sigma,
            "k_amp": self.k_amp, "c_amp": self.c_amp, "alpha": self.alpha,
            "lambda_u": self.lambda_u, "lambda_v": self.lambda_v,
            "psi_c1": self.psi_c1, "amplitude_bound": self.amplitude_bound,
            "response_budget": self.response_budget,
            "residual_min": self.residual_min,
            "residual_late_min": self.residual_late_min,
        }


def _residual_profile(sup_args, t_samples):
    """Domination-inequality bracket on the (time, space) sample grid.

    The bracket factorises through the separable eigenfunction, so the
    positivity of  S(t)*omega(x) + d2*(1-tau)*D(shrink(t), x)  decides it.
    """
    (omega_x, omega, lam_v, alpha, sigma, delta, c_coeff, d2, tau, kernel) = sup_args
    period = c_coeff.period
    shrink = 1.0 - delta / 2.0 - delta / 2.0 * np.exp(-sigma * t_samples)
    # running time rescale: xi(t) = integral of shrink^-2
    integrand = shrink**-2
    xi = np.concatenate([[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(t_samples))])
    s_term = (
        -sigma * (1.0 + alpha)
        + d2 * (1.0 - tau) * (1.0 - shrink**-2)
        + lam_v * shrink**-2
        + c_coeff.evaluate(xi % period) * shrink**-2
        - c_coeff.evaluate(t_samples % period)
    )
    interior = slice(1, -1)
    omega_int = omega[interior]
    if tau >= 1.0:
        grid = s_term[:, None] * omega_int[None, :]
        return grid, shrink
    w = trapezoid_weights(omega_x.size, omega_x[1] - omega_x[0])
    wom = w * omega
    delta_x = omega_x[interior][:, None] - omega_x[None, :]
    q_same = kernel.evaluate(delta_x) @ wom
    d_rows = []
    for sc in shrink:
        q_scaled = kernel.evaluate(sc * delta_x) @ wom
        d_rows.append(q_same / sc**2 - sc * q_scaled)
    d_mat = np.array(d_rows)
    grid = s_term[:, None] * omega_int[None, :] + d2 * (1.0 - tau) * d_mat
    return grid, shrink


def _late_time_floor(sup_args):
    """Conservative asymptotic residual: worst-case coefficient phases."""
    (omega_x, omega, lam_v, alpha, sigma, delta, c_coeff, d2, tau, kernel) = sup_args
    shrink_inf = 1.0 - delta / 2.0
    base = (
        -sigma * (1.0 + alpha)
        + d2 * (1.0 - tau) * (1.0 - shrink_inf**-2)
        + lam_v * shrink_inf**-2
        + c_coeff.minimum() * shrink_inf**-2
        - c_coeff.maximum()
    )
    omega_int = omega[1:-1]
    if tau >= 1.0:
        return float(np.min(base * omega_int))
    w = trapezoid_weights(omega_x.size, omega_x[1] - omega_x[0])
    wom = w * omega
    delta_x = omega_x[1:-1][:, None] - omega_x[None, :]
    d_vec = kernel.evaluate(delta_x) @ wom / shrink_inf**2 - shrink_inf * (
        kernel.evaluate(shrink_inf * delta_x) @ wom
    )
    return float(np.min(base * omega_int + d2 * (1.0 - tau) * d_vec))


def build_supersolution(spec, thresholds=None, m=400, t_points=240,
                        sigma_init=None, delta_init=None):
    """Assemble the dominating pair for a narrow initial habitat.

    Fails with the first violated hypothesis named.  The decay rate and the
    cap margin start at 0.1 and halve until the bracket of the domination
    inequality is positive at every checked point.
    """
    co = spec.coefficients
    a_t = co.a.time_average()
    if a_t >= spec.d1:
        raise HypothesisError("a_T >= d1: spreading regime, no vanishing construction")
    if thresholds is None:
        thresholds = compute_thresholds(spec.kernel, spec.d1, spec.d2, spec.tau, co.a, co.c, m=m)
    h_star, l_star = thresholds.h_star, thresholds.l_star
    if l_star is None:
        raise HypothesisError("a_T >= d1: spreading regime, no vanishing construction")
    if spec.h0 >= 0.5 * min(h_star, l_star):
        raise HypothesisError("h0 too large: initial habitat is not below both thresholds")
    if spec.tau < 1.0:
        flat = spec.kernel.constant_radius()
        if flat <= 2.0 * spec.h0:
            raise HypothesisError(
                "kernel must be constant on a neighbourhood wider than twice the "
                "initial habitat when tau < 1")
        margin = 0.5 * (flat - 2.0 * spec.h0)
    else:
        margin = math.inf

    h1 = 0.5 * (spec.h0 + 0.5 * l_star)
    report_u = lambda1_nonlocal(spec.kernel, spec.d1, co.a, 2.0 * h1, m=m)
    lam_u = report_u.lambda1
    if lam_u <= 0:
        raise HypothesisError("nonlocal eigenvalue not positive at the chosen width")

    h2_cap = min(0.5 * h_star, h1, spec.h0 + margin)
    h2 = 0.5 * (spec.h0 + h2_cap)
    report_v = lambda1_mixed(spec.kernel, spec.d2, spec.tau, co.c, 2.0 * h2, m=m)
    lam_v = report_v.lambda1
    if lam_v <= 0:
        raise HypothesisError("mixed eigenvalue not positive at the chosen width")

    omega_x = report_v.grid
    omega = report_v.eigenfunction
    omega_prime = np.gradient(omega, omega_x)
    ratio = omega_x[1:-1] * omega_prime[1:-1] / omega[1:-1]
    alpha = 1.05 * max(float(np.max(ratio)), 0.01)

    sigma = sigma_init if sigma_init is not None else min(0.1, 0.45 * lam_u)
    delta = delta_init if delta_init is not None else min(0.1, 0.5 * (1.0 - spec.h0 / h2))
    if not 0.0 < sigma < 0.5 * lam_u:
        raise ValueError("sigma must lie in (0, lambda_u/2)")
    if not 0.0 < delta < 1.0 - spec.h0 / h2:
        raise ValueError("delta must keep the initial cap above h0")
    period = co.period
    accepted = False
    for _ in range(SHRINK_LIMIT):
        t_span = max(12.0 / sigma, 6.0 * period)
        t_samples = np.linspace(0.0, t_span, t_points)
        sup_args = (omega_x, omega, lam_v, alpha, sigma, delta,
                    co.c, spec.d2, spec.tau, spec.kernel)
        grid, _ = _residual_profile(sup_args, t_samples)
        res_min = float(np.min(grid))
        late_min = _late_time_floor(sup_args)
        if res_min > 0.0 and late_min > 0.0:
            accepted = True
            break
        sigma /= 2.0
        delta /= 2.0
    if not accepted:
        raise HypothesisError("domination inequality stayed nonpositive after shrinking")

    # amplitudes: dominate the initial data with a 5% margin
    _, pv = _periodic_prefactor(co.c)
    p_c0 = pv[0] / np.max(pv)
    xs = np.linspace(-spec.h0, spec.h0, 801)[1:-1]
    v0 = spec.v0.evaluate(xs, spec.h0)
    psi0 = p_c0 * np.interp(xs / (1.0 - delta), omega_x, omega)
    k_amp = 1.05 * float(np.max(v0 / psi0))
    _, pva = _periodic_prefactor(co.a)
    p_a0 = pva[0] / np.max(pva)
    u0 = spec.u0.evaluate(xs, spec.h0)
    phi0 = p_a0 * np.interp(xs, report_u.grid, report_u.eigenfunction)
    c_amp = 1.05 * float(np.max(u0 / phi0))

    psi_c1 = max(1.0, float(np.max(np.abs(omega_prime))))
    amplitude_bound = max(k_amp * psi_c1 / (1.0 - delta), 2.0 * k_amp * h2, 2.0 * c_amp * h2)
    response_budget = h2 * delta * sigma / (2.0 * amplitude_bound)
    return Supersolution(
        h1=h1, h2=h2, delta=delta, sigma=sigma, k_amp=k_amp, c_amp=c_amp,
        alpha=alpha, lambda_u=lam_u, lambda_v=lam_v, psi_c1=psi_c1,
        amplitude_bound=amplitude_bound, response_budget=response_budget,
        residual_min=res_min, residual_late_min=late_min, t_span=t_span,
        omega_grid=omega_x, omega=omega,
    )


def verify_residual(spec, sup, refine=10, t_points=240):
    """Re-check the domination bracket on a refine-times finer time grid."""
    t_samples = np.linspace(0.0, sup.t_span, refine * t_points)
    sup_args = (sup.omega_grid, sup.omega, sup.lambda_v, sup.alpha,
                sup.sigma, sup.delta, spec.coefficients.c, spec.d2, spec.tau,
                spec.kernel)
    grid, _ = _residual_profile(sup_args, t_samples)
    return float(np.min(grid))


@dataclass
class DominationReport:
    applicable: bool
    passed: Optional[bool]
    max_violation: float
    first_violation_time: Optional[float]
    note: str

    def to_dict(self):
        return {
            "applicable": self.applicable, "passed": self.passed,
            "max_violation": self.max_violation,
            "first_violation_time": self.first_violation_time,
            "note": self.note,
        }


def check_domination(sup, trajectory, tol=1e-8):
    """Assert the fronts stay inside the cap whenever the response budget holds."""
    spec = trajectory.spec
    total = spec.mu + spec.rho1 + spec.rho2
    if total > sup.response_budget * (1.0 + 1e-12):
        return DominationReport(
            applicable=False, passed=None, max_violation=0.0,
            first_violation_time=None,
            note=f"combined response {total:.3g} exceeds budget {sup.response_budget:.3g}")
    caps = sup.front_cap(trajectory.times)
    viol_h = trajectory.h - caps
    viol_g = -caps - trajectory.g
    worst = float(max(np.max(viol_h), np.max(viol_g)))
    if worst <= tol:
        return DominationReport(True, True, worst, None, "fronts dominated by the cap")
    bad = np.flatnonzero((viol_h > tol) | (viol_g > tol))[0]
    return DominationReport(
        True, False, worst, float(trajectory.times[bad]),
        "front escaped the cap")


@dataclass
class OrderingReport:
    passed: bool
    max_violation: float
    first_violation: Optional[tuple]

    def to_dict(self):
        return {
            "passed": self.passed, "max_violation": self.max_violation,
            "first_violation": self.first_violation,
        }


def check_ordering(traj_low, traj_high, tol=1e-9):
    """Pointwise comparison of two fixed-domain runs with ordered initial data."""
    if traj_low.fields.shape != traj_high.fields.shape:
        raise ValueError("trajectories must share the grid and recording times")
    gap = traj_low.fields - traj_high.fields
    worst = float(np.max(gap))
    if worst <= tol:
        return OrderingReport(True, worst, None)
    t_idx, x_idx = np.unravel_index(np.argmax(gap), gap.shape)
    return OrderingReport(False, worst, (float(traj_low.times[t_idx]),
                                         float(traj_low.x[x_idx])))


def check_linear_positivity(kernel, d2, tau, n=128, dt=0.05, seed=0):
    """Discrete maximum-principle probe for the second-species update.

    One linear IMEX update (advection + explicit nonlocal + implicit local
    diffusion, no growth) applied to a random nonnegative field must stay
    nonnegative at the admissible step size.
    """
    rng = np.random.default_rng(seed)
    z = np.linspace(-1.0, 1.0, n + 1)
    dz = 2.0 / n
    field = rng.uniform(0.0, 1.0, n + 1)
    field[0] = field[-1] = 0.0
    g, h = -1.0, 1.0
    gp, hp = -0.3, 0.4
    grid = ReferenceGrid(n)
    eta = advection_speed(g, h, gp, hp, z)
    dt = min(dt, 0.5 * dz / np.max(np.abs(eta)), 0.5 / max(d2 * (1.0 - tau), 1e-9))
    w_mat = assemble_nonlocal(kernel, h - g, grid)
    explicit = solver_mod.upwind_advection(field, eta, dz)
    if tau < 1.0:
        explicit += d2 * (1.0 - tau) * (w_mat.apply(field) - field)
    rhs = (field + dt * explicit)[1:-1]
    c = dt * d2 * tau * diffusion_factor(g, h) / dz**2
    ab = np.zeros((3, n - 1))
    ab[0, 1:] = -c
    ab[1, :] = 1.0 + 2.0 * c
    ab[2, :-1] = -c
    out = solve_banded((1, 1), ab, rhs)
    return float(np.min(out))


def random_positive_profile(rng, x, scale=0.5):
    """Smooth strictly positive profile for ordering experiments."""
    length = x[-1] - x[0]
    base = scale * (1.2 + 0.8 * np.sin(2.0 * np.pi * (x - x[0]) / length + rng.uniform(0, 2 * np.pi)))
    bump = rng.uniform(0.1, 0.6) * np.exp(-((x - rng.uniform(x[0], x[-1])) ** 2)
                                          / (0.1 * length) ** 2)
    return base + bump


# --------------------------------------------------------------------------
# full verification suite

def _check(passed, **details):
    return {"passed": bool(passed), **details}


def verify_suite(spec, horizon=10.0, thresholds=None, m=400, seed=0,
                 ordering_pairs=3, record_stride=5, artifacts=None):
    """Run the executable checks behind the qualitative theory for one spec.

    Returns a JSON-ready report; entries with passed=None were not applicable.
    Pass a dict as `artifacts` to receive the trajectory and, when built,
    the dominating cap (for rendering).
    """
    report = {}
    bounds = solver_mod.compute_bounds(spec)
    traj = solver_mod.run(spec, horizon, record_stride=record_stride)
    if artifacts is not None:
        artifacts["trajectory"] = traj

    slack = 1.0 + 1e-6
    report["field_bounds"] = _check(
        np.all(traj.max_u > 0) and np.all(traj.max_u <= bounds.k1 * slack)
        and np.all(traj.max_v > 0) and np.all(traj.max_v <= bounds.k2 * slack),
        max_u=float(np.max(traj.max_u)), k1=bounds.k1,
        max_v=float(np.max(traj.max_v)), k2=bounds.k2)
    grad_cap = 1.1 * bounds.k3
    report["gradient_bounds"] = _check(
        np.all(traj.vx_left <= grad_cap) and np.all(-traj.vx_right <= grad_cap)
        and np.all(traj.vx_left >= -1e-12) and np.all(-traj.vx_right >= -1e-12),
        max_gradient=float(max(np.max(traj.vx_left), np.max(-traj.vx_right))),
        k3=bounds.k3)
    report["monotone_fronts"] = _check(
        np.all(traj.hprime > 0) and np.all(traj.gprime < 0),
        min_hprime=float(np.min(traj.hprime)), max_gprime=float(np.max(traj.gprime)))
    envelope = bounds.envelope(traj.times)
    report["speed_envelope"] = _check(
        np.all(traj.hprime <= envelope) and np.all(-traj.gprime <= envelope),
        max_speed=float(max(np.max(traj.hprime), np.max(-traj.gprime))),
        envelope_at_end=float(envelope[-1]))

    xs = np.linspace(-spec.h0, spec.h0, 801)
    even_data = max(
        float(np.max(np.abs(spec.u0.evaluate(xs, spec.h0)
                            - spec.u0.evaluate(-xs, spec.h0)))),
        float(np.max(np.abs(spec.v0.evaluate(xs, spec.h0)
                            - spec.v0.evaluate(-xs, spec.h0)))),
    ) <= 1e-12
    if even_data:
        sym_front = float(np.max(np.abs(traj.g + traj.h)))
        sym_field = max(
            float(np.max(np.abs(s.u - s.u[::-1]))) for s in traj.states
        )
        sym_field = max(sym_field, max(
            float(np.max(np.abs(s.v - s.v[::-1]))) for s in traj.states
        ))
        report["symmetry"] = _check(sym_front <= 1e-8 and sym_field <= 1e-8,
                                    front_defect=sym_front, field_defect=sym_field)
    else:
        report["symmetry"] = {"passed": None, "note": "initial data not symmetric"}

    report["positivity_preservation"] = _check(
        check_linear_positivity(spec.kernel, spec.d2, spec.tau, seed=seed) >= -1e-13)

    rng = np.random.default_rng(seed)
    length = 4.0 * spec.h0
    x = np.linspace(-length / 2, length / 2, 201)
    worst = 0.0
    ok = True
    for _ in range(ordering_pairs):
        low = random_positive_profile(rng, x)
        high = low + rng.uniform(0.05, 0.5) * random_positive_profile(rng, x, scale=0.3)
        shared_cap = float(np.max(high))
        t_low = run_fixed_domain_single(spec.kernel, spec.d1, spec.coefficients.a,
                                        length, low, horizon=3.0, m=200,
                                        cap=shared_cap)
        t_high = run_fixed_domain_single(spec.kernel, spec.d1, spec.coefficients.a,
                                         length, high, horizon=3.0, m=200,
                                         cap=shared_cap)
        rep = check_ordering(t_low, t_high)
        worst = max(worst, rep.max_violation)
        ok = ok and rep.passed
    report["ordering"] = _check(ok, max_violation=worst)

    try:
        sup = build_supersolution(spec, thresholds=thresholds, m=m)
        if artifacts is not None:
            artifacts["supersolution"] = sup
        dom = check_domination(sup, traj)
        entry = dom.to_dict()
        entry["passed"] = dom.passed
        entry["response_budget"] = sup.response_budget
        report["supersolution_domination"] = entry
    except HypothesisError as exc:
        report["supersolution_domination"] = {"passed": None, "note": str(exc)}

    applicable = [v["passed"] for v in report.values() if v["passed"] is not None]
    return {"checks": report, "all_passed": all(applicable)}
