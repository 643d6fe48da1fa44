"""Front-fixing change of variables onto the fixed interval [-1, 1].

The moving habitat (g(t), h(t)) is mapped affinely to reference coordinates;
the map induces a squared length scale for diffusion and a z-dependent
advection speed that carries the grid motion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class ReferenceGrid:
    """Uniform nodes z_j = -1 + 2j/n for j = 0..n."""

    n: int
    z: np.ndarray = field(init=False, repr=False)
    dz: float = field(init=False)

    def __post_init__(self):
        if self.n < 4:
            raise ValueError("grid needs at least 4 intervals")
        self.z = np.linspace(-1.0, 1.0, self.n + 1)
        self.dz = 2.0 / self.n


def _check_interval(g, h):
    if not g < h:
        raise ValueError(f"fronts must satisfy g < h, got g={g}, h={h}")


def physical_x(g, h, z):
    """Map reference coordinate(s) z in [-1,1] to physical position."""
    _check_interval(g, h)
    z = np.asarray(z, dtype=float)
    out = ((h - g) * z + h + g) / 2.0
    return out if out.ndim else float(out)


def diffusion_factor(g, h):
    """Scale multiplying the second z-derivative: 4 / (h-g)^2."""
    _check_interval(g, h)
    return 4.0 / (h - g) ** 2


def advection_speed(g, h, gprime, hprime, z):
    """Reference-frame transport speed induced by the moving fronts.

    Affine in z; equals 2*hprime/(h-g) at z=1 and 2*gprime/(h-g) at z=-1.
    """
    _check_interval(g, h)
    z = np.asarray(z, dtype=float)
    width = h - g
    out = (hprime + gprime) / width + (hprime - gprime) * z / width
    return out if out.ndim else float(out)


@dataclass
class TransformCoeffs:
    """Per-step transform data: diffusion scale and sampled advection speed."""

    xi: float
    eta: np.ndarray

    @staticmethod
    def at(g, h, gprime, hprime, grid):
        return TransformCoeffs(
            xi=diffusion_factor(g, h),
            eta=advection_speed(g, h, gprime, hprime, grid.z),
        )
