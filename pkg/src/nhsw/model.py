"""Pointwise pieces of the depth-averaged non-hydrostatic system.

Unknowns are the depth ``H``, the discharge ``H u``, the vertical momentum
``H w`` and the depth-averaged non-hydrostatic pressure ``pnh`` (per unit
density, m^2/s^2). Besides the non-hydrostatic model itself the module
provides the Saint-Venant, Green-Naghdi and viscous (Navier-Stokes) variants
used for comparison.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np

from .bathymetry import Bathymetry
from .errors import ContractError, DegenerateColumnError
from .grid import Grid1D, ddx

DEFAULT_G = 9.81
DEFAULT_H_MIN = 1e-6


@dataclass(frozen=True)
class PhysParams:
    g: float = DEFAULT_G
    mu: float = 0.0
    kappa: float = 0.0
    h_min: float = DEFAULT_H_MIN

    def __post_init__(self):
        if not self.g > 0:
            raise ContractError(f"gravity must be positive, got {self.g}")
        if self.mu < 0 or self.kappa < 0:
            raise ContractError("viscosity and friction must be non-negative")
        if not self.h_min > 0:
            raise ContractError("h_min must be positive")


@dataclass(frozen=True, eq=False)
class State:
    grid: Grid1D
    H: np.ndarray
    hu: np.ndarray
    hw: np.ndarray
    pnh: np.ndarray

    def __post_init__(self):
        for name in ("H", "hu", "hw", "pnh"):
            object.__setattr__(self, name, self.grid.field(getattr(self, name), name))
        if np.any(self.H < 0):
            raise ContractError(f"negative depth at cell {int(np.argmin(self.H))}")

    @classmethod
    def from_primitive(cls, grid: Grid1D, H, u, w=0.0, pnh=0.0) -> "State":
        H = grid.field(H, "H")
        return cls(grid, H, H * grid.field(u, "u"), H * grid.field(w, "w"), grid.field(pnh, "pnh"))

    def velocities(self, h_min: float = DEFAULT_H_MIN) -> Tuple[np.ndarray, np.ndarray]:
        wet = self.H >= h_min
        Hs = np.where(wet, self.H, 1.0)
        return np.where(wet, self.hu / Hs, 0.0), np.where(wet, self.hw / Hs, 0.0)

    def replace(self, **kw) -> "State":
        data = {"grid": self.grid, "H": self.H, "hu": self.hu, "hw": self.hw, "pnh": self.pnh}
        data.update(kw)
        return State(**data)


def nh_flux(s: State, p: PhysParams):
    """Fluxes of the mass, horizontal and vertical momentum equations."""
    u, w = s.velocities(p.h_min)
    wet = s.H >= p.h_min
    F_H = s.H * u
    F_hu = np.where(wet, s.H * u * u + 0.5 * p.g * s.H * s.H + s.H * s.pnh, 0.0)
    F_hw = s.H * w * u
    return F_H, F_hu, F_hw


def nh_source(s: State, b: Bathymetry, p: PhysParams):
    """Topography source of the horizontal momentum and the 2 pnh source of H w."""
    _, dzb, _ = b.eval(s.grid.x)
    return -(p.g * s.H + 2.0 * s.pnh) * dzb, 2.0 * s.pnh


def bottom_pressure(pnh):
    """Energy-consistent bottom closure: non-hydrostatic pressure at the bottom is twice its mean."""
    return 2.0 * np.asarray(pnh, dtype=float)


def divergence_constraint_residual(s: State, b: Bathymetry, p: PhysParams = PhysParams()) -> np.ndarray:
    """H w + (H^2/2) du/dx - H z_b' u; vanishes for states obeying the
    shallow-water divergence-free condition."""
    u, _ = s.velocities(p.h_min)
    _, dzb, _ = b.eval(s.grid.x)
    return s.hw + 0.5 * s.H ** 2 * ddx(u, s.grid) - s.H * dzb * u


def energy_density(s: State, b: Bathymetry, p: PhysParams) -> np.ndarray:
    zb = b.eval(s.grid.x)[0]
    u, w = s.velocities(p.h_min)
    eta = s.H + zb
    return 0.5 * s.H * (u * u + w * w) + 0.5 * p.g * s.H * (eta + zb)


def energy_flux(s: State, b: Bathymetry, p: PhysParams) -> np.ndarray:
    u, _ = s.velocities(p.h_min)
    E = energy_density(s, b, p)
    return u * (E + 0.5 * p.g * s.H ** 2 + s.H * s.pnh)


def gn_pressure_and_energy(s: State, dt_hw, p: PhysParams):
    """Green-Naghdi pressure (2/3)(d_t(Hw) + d_x(Huw)) and energy density.

    ``dt_hw`` is the time derivative of ``H w`` supplied by the caller. The
    energy uses the flat-bottom expression (potential part g H^2 / 2).
    """
    u, w = s.velocities(p.h_min)
    dt_hw = s.grid.field(dt_hw, "dt_hw")
    p_gn = (2.0 / 3.0) * (dt_hw + ddx(s.H * u * w, s.grid))
    E_gn = 0.5 * s.H * (u * u + (2.0 / 3.0) * w * w) + 0.5 * p.g * s.H ** 2
    return p_gn, E_gn


def sv_residual(s: State, b: Bathymetry, p: PhysParams, dt_H, dt_hu):
    """Residuals of the Saint-Venant mass and momentum equations."""
    u, _ = s.velocities(p.h_min)
    _, dzb, _ = b.eval(s.grid.x)
    r_H = s.grid.field(dt_H, "dt_H") + ddx(s.H * u, s.grid)
    r_hu = (
        s.grid.field(dt_hu, "dt_hu")
        + ddx(s.H * u * u + 0.5 * p.g * s.H ** 2, s.grid)
        + p.g * s.H * dzb
    )
    return r_H, r_hu


def sv_energy(s: State, b: Bathymetry, p: PhysParams) -> np.ndarray:
    zb = b.eval(s.grid.x)[0]
    u, _ = s.velocities(p.h_min)
    return 0.5 * s.H * u * u + 0.5 * p.g * s.H * (s.H + 2.0 * zb)


def ns_viscous_terms(s: State, p: PhysParams):
    """Viscous and friction right-hand sides of the depth-averaged Navier-Stokes variant."""
    u, w = s.velocities(p.h_min)
    g = s.grid
    V_hu = ddx(2.0 * p.mu * s.H * ddx(u, g), g) - p.kappa * u
    V_hw = ddx(p.mu * s.H * ddx(w, g), g)
    return V_hu, V_hw


@dataclass(frozen=True, eq=False)
class VerticalProfile:
    """Samples ``u(z)`` of one water column between the bottom and the free surface."""

    z: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        u = np.asarray(self.u, dtype=float)
        if z.ndim != 1 or z.shape != u.shape or z.size < 2:
            raise ContractError("profile needs matching 1D z/u arrays with at least 2 samples")
        if np.any(np.diff(z) <= 0):
            raise ContractError("profile z must be strictly increasing")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "u", u)

    @property
    def depth(self) -> float:
        return float(self.z[-1] - self.z[0])


def closure_defect(prof: VerticalProfile, h_min: float = DEFAULT_H_MIN) -> float:
    """<u^2> - <u>^2 / H for one column (trapezoid quadrature over z).

    Non-negative for every profile; zero only for vertically uniform ``u``,
    which is the minimal-energy closure used by the model.
    """
    H = prof.depth
    if H < h_min:
        raise DegenerateColumnError(f"column depth {H:.3e} below h_min={h_min:.1e}")
    mean = np.trapezoid(prof.u, prof.z)
    sq = np.trapezoid(prof.u * prof.u, prof.z)
    # Cauchy-Schwarz holds for the trapezoid rule too (positive weights); clip round-off
    return max(sq - mean * mean / H, 0.0)


STATE_COLUMNS = ("x", "H", "u", "w", "pnh", "zb")


def write_state_csv(path, s: State, b: Bathymetry, p: PhysParams = PhysParams(), extra: dict = None) -> None:
    u, w = s.velocities(p.h_min)
    zb = b.eval(s.grid.x)[0]
    cols = {"x": s.grid.x, "H": s.H, "u": u, "w": w, "pnh": s.pnh, "zb": zb}
    if extra:
        cols.update(extra)
    write_columns_csv(path, cols)


def write_columns_csv(path, cols: dict) -> None:
    names = list(cols)
    data = np.column_stack([np.asarray(cols[k], dtype=float) for k in names])
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for row in data:
            w.writerow([repr(float(v)) for v in row])


def read_columns_csv(path) -> dict:
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        rows = [[float(v) for v in r] for r in reader if r]
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return {k: data[:, i] for i, k in enumerate(header)}


def read_state_csv(path, bc_mode: str = "extrapolate") -> Tuple[State, np.ndarray]:
    """Read a ``x,H,u,w,pnh,zb`` snapshot; returns the state and the sampled z_b."""
    cols = read_columns_csv(path)
    missing = [c for c in STATE_COLUMNS if c not in cols]
    if missing:
        raise ContractError(f"{path}: missing columns {missing}")
    x = cols["x"]
    dx = float(np.mean(np.diff(x)))
    if not np.allclose(np.diff(x), dx, rtol=1e-8, atol=1e-12):
        raise ContractError(f"{path}: x samples are not uniformly spaced")
    grid = Grid1D(float(x[0] - 0.5 * dx), dx, x.size, bc_mode)
    return State.from_primitive(grid, cols["H"], cols["u"], cols["w"], cols["pnh"]), cols["zb"]
