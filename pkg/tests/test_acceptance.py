"""Acceptance suite: one test per criterion, one printed line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines alongside the pytest verdicts.
"""

import math
import time

import numpy as np
import pytest

import mixfront.dichotomy as cl
from mixfront import harness
from mixfront.coefficients import CoefficientSet, constant, sinusoidal
from mixfront.eigen import (
    critical_length_mixed,
    critical_length_nonlocal,
    compute_thresholds,
    lambda1_mixed,
    lambda1_nonlocal,
)
from mixfront.kernels import PlateauKernel, TentKernel, TruncatedGaussianKernel
from mixfront.solver import (
    InitialProfile,
    ProblemSpec,
    compute_bounds,
    run,
    run_fixed_domain_single,
)

TENT = TentKernel(1.0)


def note(num, msg):
    print(f"\n[criterion {num:02d}] PASS: {msg}")


def coeffs(a=1.0, b=0.5, c=1.0, d=0.5):
    wrap = lambda v: v if hasattr(v, "evaluate") else constant(v)
    return CoefficientSet(a=wrap(a), b=wrap(b), c=wrap(c), d=wrap(d))


def spec_for(a, c=1.0, h0=1.0, tau=0.5, kernel=TENT, amp=0.5, grid_n=192, **kw):
    coeff_kw = {k: kw.pop(k) for k in ("b", "d") if k in kw}
    params = dict(d1=1.0, d2=1.0, tau=tau, mu=0.5, rho1=0.5, rho2=0.5, h0=h0,
                  coefficients=coeffs(a=a, c=c, **coeff_kw), kernel=kernel,
                  u0=InitialProfile(amplitude=amp),
                  v0=InitialProfile(amplitude=amp), grid_n=grid_n)
    params.update(kw)
    return ProblemSpec(**params)


@pytest.fixture(scope="module")
def bistable_setup():
    """Narrow habitat below both thresholds, tau = 1: the vanishing regime."""
    base = spec_for(a=0.25, c=1.2, h0=0.2, tau=1.0, amp=0.25,
                    mu=0.01, rho1=0.01, rho2=0.01, grid_n=128)
    thresholds = compute_thresholds(base.kernel, base.d1, base.d2, base.tau,
                                    base.coefficients.a, base.coefficients.c,
                                    tol=1e-4, m=400)
    sup = harness.build_supersolution(base, thresholds=thresholds, m=400)
    total = base.mu + base.rho1 + base.rho2
    compliant = base.scaled_responses(0.9 * sup.response_budget / total)
    spread_length = cl.default_spread_length(base.h0, thresholds.h_star)
    traj = run(compliant, 120.0, record_stride=4, spread_stop=spread_length)
    return base, thresholds, sup, compliant, traj, spread_length


def test_criterion_01_eigenvalue_limits():
    start = time.perf_counter()
    small = lambda1_nonlocal(TENT, 1.0, 0.5, 0.01, m=400).lambda1
    large = lambda1_nonlocal(TENT, 1.0, 0.5, 200.0, m=400).lambda1
    elapsed = time.perf_counter() - start
    assert small == pytest.approx(0.5, abs=0.02)
    assert large == pytest.approx(-0.5, abs=0.02)
    assert elapsed < 10.0
    note(1, f"lambda1(0.01)={small:.4f} ~ d1-a_T, lambda1(200)={large:.4f} ~ -a_T "
            f"({elapsed:.2f}s)")


def test_criterion_02_strict_monotonicity():
    start = time.perf_counter()
    ladder = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0]
    nonlocal_vals = [lambda1_nonlocal(TENT, 1.0, 0.5, ell, m=400).lambda1
                     for ell in ladder]
    mixed_vals = [lambda1_mixed(TENT, 1.0, 0.5, 0.8, ell, m=400).lambda1
                  for ell in ladder]
    elapsed = time.perf_counter() - start
    for values in (nonlocal_vals, mixed_vals):
        gaps = -np.diff(values)
        assert np.all(gaps > 1e-6)
    assert elapsed < 10.0
    note(2, f"both operators strictly decreasing over {ladder} "
            f"(min gaps {min(-np.diff(nonlocal_vals)):.3g}, "
            f"{min(-np.diff(mixed_vals)):.3g}; {elapsed:.2f}s)")


def test_criterion_03_tau_one_spectral_oracle():
    start = time.perf_counter()
    m, ell = 400, math.pi
    got = lambda1_mixed(TENT, 1.0, 1.0, 1.0, ell, m=m).lambda1
    dx = ell / m
    oracle = (2.0 / dx**2) * (1.0 - math.cos(math.pi * dx / ell)) - 1.0
    elapsed = time.perf_counter() - start
    assert got == pytest.approx(oracle, abs=1e-8)
    assert elapsed < 5.0
    note(3, f"lambda1={got:.3e} matches discrete-Laplacian oracle to "
            f"{abs(got - oracle):.2e} ({elapsed:.2f}s)")


def test_criterion_04_threshold_roots():
    start = time.perf_counter()
    tol = 1e-4
    h_star = critical_length_mixed(TENT, 1.0, 1.0, 1.0, tol=tol, m=400)
    assert h_star == pytest.approx(math.pi, abs=0.01)
    h_fine = critical_length_mixed(TENT, 1.0, 1.0, 1.0, tol=tol, m=800)
    assert abs(h_star - h_fine) <= 2.0 * tol
    l_star = critical_length_nonlocal(TENT, 1.0, 0.5, tol=tol, m=400)
    l_fine = critical_length_nonlocal(TENT, 1.0, 0.5, tol=tol, m=800)
    assert abs(l_star - l_fine) <= 2.0 * tol
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    note(4, f"h*={h_star:.5f} (continuum pi), refinement shifts "
            f"{abs(h_star - h_fine):.2e}/{abs(l_star - l_fine):.2e} ({elapsed:.1f}s)")


def test_criterion_05_dynamical_consistency():
    start = time.perf_counter()
    a = sinusoidal(0.5, 0.2)
    l_star = critical_length_nonlocal(TENT, 1.0, a, tol=1e-4, m=400)
    profile = lambda width: (lambda x: 0.4 * np.cos(np.pi * x / width))

    decay = run_fixed_domain_single(TENT, 1.0, a, 0.5 * l_star,
                                    profile(0.5 * l_star), 120.0, m=300)
    assert decay.max_field[-1] < 1e-6

    grow = run_fixed_domain_single(TENT, 1.0, a, 2.0 * l_star,
                                   profile(2.0 * l_star), 120.0, m=300)
    residual = grow.periodicity_residual(grow.times[-1])
    assert grow.max_field[-1] > 0.05
    assert residual < 1e-3
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    note(5, f"l*={l_star:.4f}: decay to {decay.max_field[-1]:.1e} at l*/2, "
            f"periodic state residual {residual:.1e} at 2l* ({elapsed:.1f}s)")


def test_criterion_06_wellposedness_bounds():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    kernels = [TENT, TruncatedGaussianKernel(0.6, 2.5), PlateauKernel(0.8, 0.4)]
    worst_field = worst_grad = worst_speed = 0.0
    for trial in range(10):
        mean_a = rng.uniform(0.6, 1.4)
        mean_c = rng.uniform(0.6, 1.4)
        a = sinusoidal(mean_a, 0.3 * mean_a, phase=rng.uniform(0, 6.28)) \
            if trial % 2 else constant(mean_a)
        c = sinusoidal(mean_c, 0.3 * mean_c) if trial % 3 else constant(mean_c)
        spec = spec_for(
            a=a, c=c,
            h0=rng.uniform(0.6, 1.4), tau=rng.uniform(0.3, 1.0),
            kernel=kernels[trial % 3], amp=rng.uniform(0.2, 0.7),
            d1=rng.uniform(0.6, 1.4), d2=rng.uniform(0.6, 1.4),
            mu=rng.uniform(0.2, 1.0), rho1=rng.uniform(0.2, 1.0),
            rho2=rng.uniform(0.2, 1.0), b=rng.uniform(0.3, 0.8),
            d=rng.uniform(0.3, 0.8), grid_n=192)
        bounds = compute_bounds(spec)
        traj = run(spec, 8.0, record_stride=10)
        assert np.all(traj.max_u > 0) and np.all(traj.max_v > 0)
        assert np.all(traj.max_u <= 1.000001 * bounds.k1)
        assert np.all(traj.max_v <= 1.000001 * bounds.k2)
        grads = np.maximum(traj.vx_left, -traj.vx_right)
        assert np.all(grads <= 1.1 * bounds.k3)
        assert np.all(traj.hprime > 0) and np.all(traj.gprime < 0)
        envelope = bounds.envelope(traj.times)
        assert np.all(traj.hprime <= envelope)
        assert np.all(-traj.gprime <= envelope)
        worst_field = max(worst_field, np.max(traj.max_u / bounds.k1),
                          np.max(traj.max_v / bounds.k2))
        worst_grad = max(worst_grad, np.max(grads / bounds.k3))
        worst_speed = max(worst_speed, np.max(traj.hprime / envelope))
    elapsed = time.perf_counter() - start
    assert elapsed < 300.0
    note(6, f"10 randomised runs: fields <= {worst_field:.3f} K, gradients <= "
            f"{worst_grad:.3f} K3, speeds <= {worst_speed:.3f} R(t) ({elapsed:.1f}s)")


def test_criterion_07_symmetry():
    start = time.perf_counter()
    spec = spec_for(a=1.2, c=1.0, h0=1.0, tau=0.5, grid_n=128)
    traj = run(spec, 20.0, record_stride=10)
    front_defect = float(np.max(np.abs(traj.g + traj.h)))
    field_defect = 0.0
    for state in traj.states:
        field_defect = max(field_defect,
                           float(np.max(np.abs(state.u - state.u[::-1]))),
                           float(np.max(np.abs(state.v - state.v[::-1]))))
    elapsed = time.perf_counter() - start
    assert front_defect <= 1e-8
    assert field_defect <= 1e-8
    assert elapsed < 30.0
    note(7, f"front defect {front_defect:.1e}, field defect {field_defect:.1e} "
            f"over horizon 20 ({elapsed:.1f}s)")


def test_criterion_08_criteria_confirmation():
    start = time.perf_counter()
    confirmed = []

    growth_dominant = [
        spec_for(a=1.0, c=1.0, tau=1.0, mu=1.0, rho1=1.0, rho2=1.0),
        spec_for(a=sinusoidal(1.5, 0.3), c=1.0, tau=0.5,
                 mu=1.0, rho1=1.0, rho2=1.0),
        spec_for(a=1.2, c=0.8, tau=0.7, d1=0.8, mu=1.0, rho1=1.0, rho2=1.0,
                 kernel=TruncatedGaussianKernel(0.6, 2.5)),
    ]
    for spec in growth_dominant:
        assert spec.coefficients.a.time_average() >= spec.d1
        spread = cl.default_spread_length(spec.h0, 3.0)
        traj = run(spec, 400.0, record_stride=10, spread_stop=spread)
        outcome = cl.classify(traj, spread)
        assert outcome.verdict == cl.SPREADING
        confirmed.append(f"a_T>=d1 at t={traj.times[-1]:.1f}")

    for c_val, factor in ((1.0, 0.55), (1.5, 0.7), (0.8, 0.6)):
        h_star = critical_length_mixed(TENT, 1.0, 0.5, c_val, tol=1e-3, m=300)
        spec = spec_for(a=0.5, c=c_val, h0=factor * h_star, tau=0.5,
                        mu=1.0, rho1=1.0, rho2=1.0)
        assert spec.h0 >= 0.5 * h_star
        spread = cl.default_spread_length(spec.h0, h_star)
        traj = run(spec, 400.0, record_stride=10, spread_stop=spread)
        outcome = cl.classify(traj, spread)
        assert outcome.verdict == cl.SPREADING
        confirmed.append(f"h0={factor:.2f}h* at t={traj.times[-1]:.1f}")
    elapsed = time.perf_counter() - start
    assert elapsed < 300.0
    note(8, "; ".join(confirmed) + f" ({elapsed:.1f}s)")


def test_criterion_09_vanishing_structure(bistable_setup):
    start = time.perf_counter()
    base, thresholds, sup, compliant, traj, spread_length = bistable_setup
    total = compliant.mu + compliant.rho1 + compliant.rho2
    assert total <= sup.response_budget

    outcome = cl.classify(traj, spread_length)
    assert outcome.verdict == cl.VANISHING

    cell = traj.extent[-1] / compliant.grid_n
    assert traj.extent[-1] <= thresholds.h_star + 3.0 * cell
    assert outcome.terminal_field_max < 1e-6
    assert outcome.terminal_speed_sum < 1e-8

    lam_terminal = lambda1_nonlocal(base.kernel, base.d1, base.coefficients.a,
                                    traj.extent[-1], m=400).lambda1
    assert lam_terminal >= -0.05
    elapsed = time.perf_counter() - start
    note(9, f"Vanishing: extent {traj.extent[-1]:.3f} <= h*={thresholds.h_star:.3f}, "
            f"fields {outcome.terminal_field_max:.1e}, speeds "
            f"{outcome.terminal_speed_sum:.1e}, terminal lambda1={lam_terminal:.3f} "
            f"({elapsed:.1f}s)")


def test_criterion_10_supersolution_domination(bistable_setup):
    start = time.perf_counter()
    base, _, sup, compliant, traj, _ = bistable_setup
    assert sup.residual_min > 0.0
    assert sup.residual_late_min > 0.0
    assert harness.verify_residual(base, sup, refine=10) > 0.0
    report = harness.check_domination(sup, traj, tol=1e-8)
    assert report.applicable and report.passed
    elapsed = time.perf_counter() - start
    assert elapsed < 120.0
    note(10, f"residual min {sup.residual_min:.3f} > 0, fronts within cap "
             f"(worst slack {-report.max_violation:.3f}), budget "
             f"{sup.response_budget:.2e} ({elapsed:.1f}s)")


def test_criterion_11_sweep_dichotomy(bistable_setup):
    start = time.perf_counter()
    _, thresholds, _, _, _, _ = bistable_setup
    # stronger initial data at the same coefficients: still below both
    # thresholds, but the transition falls inside the factor range
    sweep_spec = spec_for(a=0.25, c=1.2, h0=0.45, tau=1.0, amp=0.8,
                          mu=0.01, rho1=0.01, rho2=0.01, grid_n=128)
    assert sweep_spec.h0 < 0.5 * min(thresholds.h_star, thresholds.l_star)
    spread_length = cl.default_spread_length(sweep_spec.h0, thresholds.h_star)
    factors = list(np.geomspace(0.01, 100.0, 9))
    result = cl.sweep_response(sweep_spec, factors, horizon=300.0,
                               spread_length=spread_length, record_stride=5)
    verdicts = [row.verdict for row in result.rows]
    order = {cl.VANISHING: 0, cl.UNDETERMINED: 1, cl.SPREADING: 2}
    ranks = [order[v] for v in verdicts]
    assert ranks == sorted(ranks), verdicts
    assert verdicts[0] == cl.VANISHING
    assert verdicts[-1] == cl.SPREADING
    assert result.monotone
    lo, hi = result.bracket
    assert lo is not None and hi is not None and lo < hi
    elapsed = time.perf_counter() - start
    assert elapsed < 900.0
    note(11, f"verdicts {verdicts} -> bracket [{lo:.3g}, {hi:.3g}] ({elapsed:.1f}s)")


def test_criterion_12_ordering_property():
    start = time.perf_counter()
    a = sinusoidal(0.8, 0.3)
    length = 4.0
    x = np.linspace(-length / 2, length / 2, 201)
    violations = 0
    worst = -np.inf
    for seed in range(50):
        rng = np.random.default_rng(seed)
        low = harness.random_positive_profile(rng, x)
        high = low + rng.uniform(0.05, 0.5) * harness.random_positive_profile(
            rng, x, scale=0.3)
        cap = float(np.max(high))
        t_low = run_fixed_domain_single(TENT, 1.0, a, length, low, 3.0,
                                        m=200, cap=cap)
        t_high = run_fixed_domain_single(TENT, 1.0, a, length, high, 3.0,
                                         m=200, cap=cap)
        rep = harness.check_ordering(t_low, t_high, tol=1e-9)
        worst = max(worst, rep.max_violation)
        violations += 0 if rep.passed else 1
    elapsed = time.perf_counter() - start
    assert violations == 0
    assert elapsed < 120.0
    note(12, f"50 ordered pairs, 0 violations (worst gap {worst:.2e}) "
             f"({elapsed:.1f}s)")
