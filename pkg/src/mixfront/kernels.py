"""Compactly supported dispersal kernels with tail-mass tables and validation.

Every built-in integrates to 1 over its support, is even, Lipschitz, and
positive at the origin.  The plateau kernel is exactly constant on its flat
core, which the vanishing construction relies on.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

TAIL_TABLE_CELLS = 4096
_SCAN_POINTS = 20001


class KernelError(ValueError):
    pass


@dataclass
class ValidationEntry:
    name: str
    passed: bool
    measured: float


@dataclass
class ValidationReport:
    entries: list

    @property
    def ok(self):
        return all(e.passed for e in self.entries)

    def failures(self):
        return [e for e in self.entries if not e.passed]

    def to_dict(self):
        return {
            "ok": self.ok,
            "entries": [
                {"name": e.name, "passed": e.passed, "measured": e.measured}
                for e in self.entries
            ],
        }


class Kernel:
    """Base dispersal density.  Subclasses fill in evaluate() and the support."""

    kind = "abstract"
    support = 0.0

    def evaluate(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.evaluate(x)

    def constant_radius(self):
        """Radius around 0 on which the density is exactly constant (0 if none)."""
        return 0.0

    def _tail_closed_form(self, r):
        """Exact one-sided tail for r >= 0, or None if unavailable."""
        return None

    def _build_tail_table(self):
        rs = np.linspace(0.0, self.support, TAIL_TABLE_CELLS + 1)
        exact = self._tail_closed_form(rs)
        if exact is not None:
            cum = np.asarray(exact, dtype=float)
        else:
            vals = self.evaluate(rs)
            seg = 0.5 * (vals[:-1] + vals[1:]) * np.diff(rs)
            cum = np.concatenate([np.cumsum(seg[::-1])[::-1], [0.0]])
        cum[-1] = 0.0
        self._tail_r = rs
        self._tail_values = cum

    def tail_mass(self, r):
        """Mass beyond r: integral of the density over (r, infinity)."""
        if not hasattr(self, "_tail_values"):
            self._build_tail_table()
        r = np.asarray(r, dtype=float)
        mag = np.interp(np.abs(r), self._tail_r, self._tail_values, right=0.0)
        out = np.where(r >= 0, mag, 1.0 - mag)
        return out if out.ndim else float(out)

    def validate(self):
        """Check the admissibility conditions; returns pass/fail with measurements."""
        s = self.support
        x = np.linspace(-s, s, _SCAN_POINTS)
        vals = self.evaluate(x)
        entries = []
        entries.append(ValidationEntry("nonnegative", bool(np.min(vals) >= 0.0), float(np.min(vals))))
        j0 = float(self.evaluate(0.0))
        entries.append(ValidationEntry("positive_at_origin", j0 > 0.0, j0))
        panels = 200_000
        xq = np.linspace(-s, s, panels + 1)
        integral = float(np.trapezoid(self.evaluate(xq), xq))
        entries.append(ValidationEntry("unit_mass", abs(integral - 1.0) <= 1e-8, abs(integral - 1.0)))
        sym_defect = float(np.max(np.abs(vals - vals[::-1])))
        entries.append(ValidationEntry("symmetric", sym_defect <= 1e-9, sym_defect))
        sup = float(np.max(vals))
        entries.append(ValidationEntry("bounded", math.isfinite(sup), sup))
        slopes = np.abs(np.diff(vals)) / (x[1] - x[0])
        lip = float(np.max(slopes)) if slopes.size else 0.0
        entries.append(ValidationEntry("lipschitz", math.isfinite(lip), lip))
        return ValidationReport(entries)

    def to_dict(self):
        raise NotImplementedError

    @staticmethod
    def from_dict(d):
        kind = d.get("kind")
        if kind == "tent":
            return TentKernel(d["radius"])
        if kind == "gaussian":
            return TruncatedGaussianKernel(d["sigma"], d["cutoff"])
        if kind == "plateau":
            return PlateauKernel(d["flat_radius"], d["taper"])
        if kind == "table":
            if "csv" in d:
                return TableKernel.from_csv(d["csv"], symmetrize=d.get("symmetrize", True))
            return TableKernel(
                d["displacements"], d["densities"], symmetrize=d.get("symmetrize", True)
            )
        raise KernelError(f"kind: unknown kernel form {kind!r}")


def require_valid(kernel):
    """Raise if the kernel fails admissibility; returns the report otherwise."""
    report = kernel.validate()
    if not report.ok:
        names = ", ".join(e.name for e in report.failures())
        raise KernelError(f"kernel fails admissibility checks: {names}")
    return report


class TentKernel(Kernel):
    kind = "tent"

    def __init__(self, radius):
        if radius <= 0:
            raise KernelError("radius: must be positive")
        self.radius = float(radius)
        self.support = self.radius

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        out = np.maximum(0.0, 1.0 - np.abs(x) / self.radius) / self.radius
        return out if out.ndim else float(out)

    def _tail_closed_form(self, r):
        frac = np.clip(1.0 - np.asarray(r) / self.radius, 0.0, 1.0)
        return 0.5 * frac**2

    def to_dict(self):
        return {"kind": "tent", "radius": self.radius}


class TruncatedGaussianKernel(Kernel):
    """Gaussian density cut at |x| = cutoff and renormalised to unit mass."""

    kind = "gaussian"

    def __init__(self, sigma, cutoff):
        if sigma <= 0 or cutoff <= 0:
            raise KernelError("sigma/cutoff: must be positive")
        self.sigma = float(sigma)
        self.cutoff = float(cutoff)
        self.support = self.cutoff
        z = self.cutoff / (self.sigma * math.sqrt(2.0))
        self._mass = self.sigma * math.sqrt(2.0 * math.pi) * math.erf(z)
        self._scale = 1.0 / self._mass

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(
            np.abs(x) <= self.cutoff,
            self._scale * np.exp(-0.5 * (x / self.sigma) ** 2),
            0.0,
        )
        return out if out.ndim else float(out)

    def _tail_closed_form(self, r):
        r = np.clip(np.asarray(r, dtype=float), 0.0, self.cutoff)
        zc = self.cutoff / (self.sigma * math.sqrt(2.0))
        zr = r / (self.sigma * math.sqrt(2.0))
        erf = np.vectorize(math.erf)
        return self._scale * self.sigma * math.sqrt(math.pi / 2.0) * (erf(zc) - erf(zr))

    def to_dict(self):
        return {"kind": "gaussian", "sigma": self.sigma, "cutoff": self.cutoff}


class PlateauKernel(Kernel):
    """Constant on [-flat_radius, flat_radius], linear taper to 0 over `taper`."""

    kind = "plateau"

    def __init__(self, flat_radius, taper):
        if flat_radius <= 0 or taper <= 0:
            raise KernelError("flat_radius/taper: must be positive")
        self.flat_radius = float(flat_radius)
        self.taper = float(taper)
        self.support = self.flat_radius + self.taper
        self.height = 1.0 / (2.0 * self.flat_radius + self.taper)

    def constant_radius(self):
        return self.flat_radius

    def evaluate(self, x):
        ax = np.abs(np.asarray(x, dtype=float))
        out = np.where(
            ax <= self.flat_radius,
            self.height,
            np.where(ax >= self.support, 0.0, self.height * (self.support - ax) / self.taper),
        )
        return out if out.ndim else float(out)

    def _tail_closed_form(self, r):
        r = np.asarray(r, dtype=float)
        taper_mass = 0.5 * self.height * self.taper
        in_flat = 0.5 - self.height * r
        rt = np.clip(self.support - r, 0.0, self.taper)
        in_taper = 0.5 * self.height * rt**2 / self.taper
        return np.where(r <= self.flat_radius, in_flat, np.where(r >= self.support, 0.0, in_taper))

    def to_dict(self):
        return {"kind": "plateau", "flat_radius": self.flat_radius, "taper": self.taper}


class TableKernel(Kernel):
    """Piecewise-linear density from (displacement, density) samples.

    By default the table is symmetrised and rescaled to unit mass; pass
    symmetrize=False to keep the raw interpolant (useful for validation of
    inadmissible inputs).
    """

    kind = "table"

    def __init__(self, displacements, densities, symmetrize=True):
        disp = np.asarray(displacements, dtype=float)
        dens = np.asarray(densities, dtype=float)
        if disp.size != dens.size or disp.size < 2:
            raise KernelError("table: need matching displacement/density columns, length >= 2")
        order = np.argsort(disp)
        disp, dens = disp[order], dens[order]
        self._raw_disp = disp
        self._raw_dens = dens
        self.symmetrized = bool(symmetrize)
        self.support = float(np.max(np.abs(disp)))
        grid = np.linspace(0.0, self.support, TAIL_TABLE_CELLS + 1)
        right = np.interp(grid, disp, dens, left=0.0, right=0.0)
        left = np.interp(-grid, disp, dens, left=0.0, right=0.0)
        if symmetrize:
            vals = 0.5 * (right + left)
            mass = 2.0 * np.trapezoid(vals, grid)
            if mass <= 0:
                raise KernelError("table: density must have positive mass")
            self._grid = grid
            self._vals = vals / mass
        else:
            self._grid = None
            mass = np.trapezoid(
                np.interp(np.linspace(-self.support, self.support, 2 * TAIL_TABLE_CELLS + 1),
                          disp, dens, left=0.0, right=0.0),
                np.linspace(-self.support, self.support, 2 * TAIL_TABLE_CELLS + 1),
            )
            if mass <= 0:
                raise KernelError("table: density must have positive mass")
            self._scale = 1.0 / mass

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        if self.symmetrized:
            out = np.interp(np.abs(x), self._grid, self._vals, left=0.0, right=0.0)
        else:
            out = self._scale * np.interp(x, self._raw_disp, self._raw_dens, left=0.0, right=0.0)
        return out if out.ndim else float(out)

    def to_dict(self):
        return {
            "kind": "table",
            "displacements": [float(v) for v in self._raw_disp],
            "densities": [float(v) for v in self._raw_dens],
            "symmetrize": self.symmetrized,
        }

    @staticmethod
    def from_csv(path, symmetrize=True):
        disp, dens = [], []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    disp.append(float(row[0]))
                    dens.append(float(row[1]))
                except (IndexError, ValueError):
                    continue
        return TableKernel(disp, dens, symmetrize=symmetrize)
