"""Principal eigenvalues of the time-averaged dispersal operators.

Because the growth rates depend on time only, the periodic-parabolic
eigenproblems reduce exactly to elliptic ones driven by the time-averaged
rate.  The ground state of the discretised operator is extracted by shifted
inverse power iteration (the shift is the Gershgorin upper bound, so the
shifted system is an M-matrix and the iteration preserves Perron positivity).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import lu_factor, lu_solve, toeplitz

from .operators import NonlocalMatrix

DEFAULT_GRID = 400
MAX_ITERATIONS = 100_000
RESIDUAL_TOL = 1e-9


class EigenError(RuntimeError):
    pass


class ThresholdError(RuntimeError):
    pass


@dataclass
class EigenReport:
    operator: str
    length: float
    lambda1: float
    grid: np.ndarray
    eigenfunction: np.ndarray
    iterations: int
    residual: float
    potential_average: float


@dataclass
class Thresholds:
    """Critical habitat lengths where the principal eigenvalues cross zero.

    l_star is absent (None) when the averaged growth rate of the first
    species is at least its dispersal rate, in which case spreading is
    unconditional.
    """

    h_star: float
    l_star: Optional[float]


def _average(coeff):
    return coeff.time_average() if hasattr(coeff, "time_average") else float(coeff)


def _dominant_eigenpair(mat, tol=RESIDUAL_TOL, max_iterations=MAX_ITERATIONS):
    """Largest eigenvalue and positive eigenvector of a symmetric matrix.

    Inverse power iteration on (sigma*I - mat) with sigma just above the
    Gershgorin upper bound; the shifted matrix is strictly diagonally
    dominant with nonpositive off-diagonal entries, so its inverse is
    entrywise nonnegative and the iterates stay positive.
    """
    n = mat.shape[0]
    diag = np.diag(mat)
    abs_rows = np.sum(np.abs(mat), axis=1)
    radii = abs_rows - np.abs(diag)
    sigma_upper = float(np.max(diag + radii))
    # matvec roundoff scales with the operator norm; don't demand less
    op_norm = float(np.max(abs_rows))
    tol = max(tol, 512.0 * np.finfo(float).eps * op_norm)
    margin = 1e-9 * max(1.0, abs(sigma_upper))
    vec = np.full(n, 1.0 / np.sqrt(n))
    for _ in range(8):
        shifted = -mat + (sigma_upper + margin) * np.eye(n)
        try:
            factors = lu_factor(shifted, check_finite=False)
        except Exception:
            margin *= 100.0
            continue
        probe = lu_solve(factors, vec, check_finite=False)
        if not np.all(np.isfinite(probe)):
            margin *= 100.0
            continue
        break
    else:
        raise EigenError("could not factor the shifted operator")

    theta = float(vec @ (mat @ vec))
    for iteration in range(1, max_iterations + 1):
        nxt = lu_solve(factors, vec, check_finite=False)
        norm = np.linalg.norm(nxt)
        if not np.isfinite(norm) or norm == 0.0:
            raise EigenError("inverse iteration produced a degenerate vector")
        vec = nxt / norm
        image = mat @ vec
        theta = float(vec @ image)
        residual = float(np.max(np.abs(image - theta * vec)))
        if residual <= tol * np.max(np.abs(vec)):
            break
    else:
        raise EigenError(
            f"power iteration failed to converge: residual {residual:.3e} "
            f"after {max_iterations} iterations"
        )
    vec = np.abs(vec)
    scale = np.max(vec)
    return theta, vec / scale, iteration, residual / scale


def lambda1_nonlocal(kernel, d1, a, length, m=DEFAULT_GRID, tol=RESIDUAL_TOL):
    """Principal eigenvalue of the nonlocal-dispersal growth operator.

    Assembles d1*(W - I) + a_T*I on m+1 nodes spanning the interval (no
    boundary condition: the operator acts on continuous functions up to the
    edges) and returns the negated Perron value.
    """
    if length <= 0:
        raise ValueError("length must be positive")
    if d1 <= 0:
        raise ValueError("d1 must be positive")
    a_t = _average(a)
    nodes = m + 1
    w = NonlocalMatrix(kernel, length, nodes)
    mat = d1 * (w.symmetrized() - np.eye(nodes)) + a_t * np.eye(nodes)
    theta, func, iters, residual = _dominant_eigenpair(mat, tol=tol)
    x = np.linspace(-length / 2.0, length / 2.0, nodes)
    return EigenReport(
        operator="nonlocal",
        length=float(length),
        lambda1=-theta,
        grid=x,
        eigenfunction=func,
        iterations=iters,
        residual=residual,
        potential_average=a_t,
    )


def _mixed_matrix(kernel, d2, tau, c_t, length, m):
    dx = length / m
    interior = m - 1
    x = np.linspace(-length / 2.0, length / 2.0, m + 1)
    lap = (
        toeplitz(np.concatenate([[-2.0, 1.0], np.zeros(interior - 2)]))
        / dx**2
    )
    mat = d2 * tau * lap + c_t * np.eye(interior)
    if tau < 1.0:
        offsets = dx * np.arange(interior)
        w_int = toeplitz(kernel.evaluate(offsets)) * dx
        mat += d2 * (1.0 - tau) * (w_int - np.eye(interior))
    return mat, x


def lambda1_mixed(kernel, d2, tau, c, length, m=DEFAULT_GRID, tol=RESIDUAL_TOL):
    """Principal eigenvalue of the mixed-dispersal growth operator (Dirichlet).

    The matrix d2*tau*D2 + d2*(1-tau)*(W - I) + c_T*I lives on the m-1
    interior nodes; the reported eigenfunction is padded with the boundary
    zeros.
    """
    if length <= 0:
        raise ValueError("length must be positive")
    if not 0.0 < tau <= 1.0:
        raise ValueError("tau must lie in (0, 1]")
    if d2 <= 0:
        raise ValueError("d2 must be positive")
    c_t = _average(c)
    mat, x = _mixed_matrix(kernel, d2, tau, c_t, length, m)
    theta, func, iters, residual = _dominant_eigenpair(mat, tol=tol)
    padded = np.zeros(m + 1)
    padded[1:-1] = func
    return EigenReport(
        operator="mixed",
        length=float(length),
        lambda1=-theta,
        grid=x,
        eigenfunction=padded,
        iterations=iters,
        residual=residual,
        potential_average=c_t,
    )


def rayleigh_quotient(omega, kernel, d2, tau, c_t, length):
    """Variational quotient for the mixed operator at a trial field.

    The field is sampled on the full node set (endpoints included) and must
    vanish at both ends.  The quadrature matches the discrete operator, so
    the reported eigenvalue is attained by its own eigenfunction.
    """
    omega = np.asarray(omega, dtype=float)
    scale = np.max(np.abs(omega))
    if scale == 0.0:
        raise ValueError("trial field must not vanish identically")
    if abs(omega[0]) > 1e-12 * scale or abs(omega[-1]) > 1e-12 * scale:
        raise ValueError("trial field must vanish at the endpoints")
    m = omega.size - 1
    dx = length / m
    grad = np.sum(np.diff(omega) ** 2) / dx
    interior = omega[1:-1]
    x = np.linspace(-length / 2.0, length / 2.0, m + 1)[1:-1]
    double = dx**2 * interior @ (kernel.evaluate(x[:, None] - x[None, :]) @ interior)
    mass = dx * np.sum(interior**2)
    return (d2 * tau * grad - d2 * (1.0 - tau) * double) / mass + d2 * (1.0 - tau) - c_t


def _bracketed_root(evaluate, tol, lo=0.05, hi=1.0, cap=1e4):
    f_lo = evaluate(lo)
    while f_lo <= 0.0 and lo > 1e-6:
        hi = lo
        lo /= 4.0
        f_lo = evaluate(lo)
    if f_lo <= 0.0:
        raise ThresholdError("no positive eigenvalue found at small lengths")
    f_hi = evaluate(hi)
    while f_hi > 0.0:
        lo, f_lo = hi, f_hi
        hi *= 2.0
        if hi > cap:
            raise ThresholdError(f"no sign change up to length {cap:g}")
        f_hi = evaluate(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if evaluate(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def critical_length_mixed(kernel, d2, tau, c, tol=1e-4, m=DEFAULT_GRID):
    """Habitat length at which the mixed-operator eigenvalue crosses zero."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    return _bracketed_root(
        lambda ell: lambda1_mixed(kernel, d2, tau, c, ell, m=m).lambda1, tol
    )


def critical_length_nonlocal(kernel, d1, a, tol=1e-4, m=DEFAULT_GRID):
    """Critical length for the nonlocal operator, or None when a_T >= d1.

    For a_T >= d1 the eigenvalue is negative at every length and spreading
    is unconditional, so no root exists.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if _average(a) >= d1:
        return None
    return _bracketed_root(
        lambda ell: lambda1_nonlocal(kernel, d1, a, ell, m=m).lambda1, tol
    )


def compute_thresholds(kernel, d1, d2, tau, a, c, tol=1e-4, m=DEFAULT_GRID):
    return Thresholds(
        h_star=critical_length_mixed(kernel, d2, tau, c, tol=tol, m=m),
        l_star=critical_length_nonlocal(kernel, d1, a, tol=tol, m=m),
    )
