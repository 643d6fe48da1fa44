"""Discrete dispersal operators on a uniform grid.

The nonlocal convolution is assembled as a dense symmetrised trapezoid matrix
(the grid is uniform, so kernel values are Toeplitz in the node offset).  The
local part is the standard second difference with zero endpoint values.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import toeplitz

DENSE_LIMIT = 2048


def trapezoid_weights(n_nodes, spacing):
    w = np.full(n_nodes, spacing)
    w[0] = w[-1] = spacing / 2.0
    return w


class NonlocalMatrix:
    """Quadrature of phi -> integral of J(x - y) phi(y) dy over an interval.

    Application uses plain trapezoid weights, so a constant field reproduces
    the captured kernel mass exactly.  symmetrized() averages the weight
    pattern with its transpose for spectral work.  The dense matrix is kept
    up to DENSE_LIMIT+1 nodes; above that products run matrix-free through
    direct convolution.
    """

    def __init__(self, kernel, length, n_nodes):
        if length <= 0:
            raise ValueError("interval length must be positive")
        self.length = float(length)
        self.n_nodes = int(n_nodes)
        spacing = self.length / (self.n_nodes - 1)
        self.spacing = spacing
        offsets = spacing * np.arange(self.n_nodes)
        self._kernel_lattice = kernel.evaluate(offsets)
        self.weights = trapezoid_weights(self.n_nodes, spacing)
        if self.n_nodes <= DENSE_LIMIT + 1:
            self.matrix = toeplitz(self._kernel_lattice) * self.weights[None, :]
        else:
            self.matrix = None

    def symmetrized(self):
        """Dense (W + W^T)/2; the eigensolvers rely on exact symmetry."""
        if self.matrix is None:
            raise ValueError("symmetrized form needs the dense matrix")
        return 0.5 * (self.matrix + self.matrix.T)

    def apply(self, field):
        field = np.asarray(field, dtype=float)
        if self.matrix is not None:
            return self.matrix @ field
        lattice = np.concatenate([self._kernel_lattice[::-1], self._kernel_lattice[1:]])
        return np.convolve(self.weights * field, lattice, mode="valid")

    def row_sums(self):
        if self.matrix is not None:
            return self.matrix.sum(axis=1)
        return self.apply(np.ones(self.n_nodes))


def assemble_nonlocal(kernel, length, grid):
    """Nonlocal weight matrix on the reference grid for a habitat of given length."""
    return NonlocalMatrix(kernel, length, grid.n + 1)


def dirichlet_second_difference(field, dz):
    """Second difference of a field that vanishes at both endpoints.

    Returns an array of the same shape with zero entries at the endpoints.
    """
    out = np.zeros_like(field)
    out[1:-1] = (field[2:] - 2.0 * field[1:-1] + field[:-2]) / dz**2
    return out


def apply_mixed(field, d2, tau, nonlocal_matrix, dz, xi):
    """Mixed dispersal: d2*tau*xi*second-difference + d2*(1-tau)*(W f - f)."""
    if not 0.0 < tau <= 1.0:
        raise ValueError("tau must lie in (0, 1]")
    field = np.asarray(field, dtype=float)
    out = d2 * tau * xi * dirichlet_second_difference(field, dz)
    if tau < 1.0:
        hop = nonlocal_matrix.apply(field) - field
        hop[0] = hop[-1] = 0.0
        out += d2 * (1.0 - tau) * hop
    out[0] = out[-1] = 0.0
    return out


def boundary_gradient(field, g, h, side):
    """One-sided second-order physical-space gradient at a front.

    The field is given on the reference grid and must vanish at the queried
    endpoint; the z-derivative is rescaled by 2/(h-g).
    """
    field = np.asarray(field, dtype=float)
    n = field.size - 1
    dz = 2.0 / n
    if side == "right":
        dfdz = (3.0 * field[-1] - 4.0 * field[-2] + field[-3]) / (2.0 * dz)
    elif side == "left":
        dfdz = (-3.0 * field[0] + 4.0 * field[1] - field[2]) / (2.0 * dz)
    else:
        raise ValueError("side must be 'left' or 'right'")
    return 2.0 / (h - g) * dfdz
