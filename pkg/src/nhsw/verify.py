"""Residuals of model variants on analytic solutions, convergence studies and energy budgets.

A *sampler* is any callable ``(x, t) -> SampledFields`` with attributes
``x_range`` (tuple), ``t_eval`` (float) and optionally ``bc_mode`` and
``name``. Space derivatives use the stencils of :mod:`nhsw.grid`; time
derivatives are centered differences of the sampler with step
``dt_stencil`` (default: the grid spacing).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from .errors import ContractError
from .grid import Grid1D, ddx
from .model import PhysParams

VARIANTS = ("nh", "nh+forcing", "gn", "sv", "ns")
EQUATIONS = {
    "nh": ("mass", "momentum_x", "momentum_z", "constraint"),
    "nh+forcing": ("mass", "momentum_x", "momentum_z", "constraint"),
    "gn": ("mass", "momentum_x", "momentum_z", "constraint"),
    "ns": ("mass", "momentum_x", "momentum_z", "constraint"),
    "sv": ("mass", "momentum_x"),
    "energy": ("energy",),
}
SATURATION_FLOOR = 1e-10


@dataclass
class ResidualReport:
    variant: str
    n: int
    dx: float
    dt_stencil: float
    max: Dict[str, float]
    l2: Dict[str, float]
    cells: int  # cells entering the norms

    def __post_init__(self):
        for norms in (self.max, self.l2):
            for k, v in norms.items():
                if not (np.isfinite(v) and v >= 0):
                    raise ContractError(f"invalid norm {k}={v}")

    def to_dict(self) -> dict:
        return {"variant": self.variant, "n": self.n, "dx": self.dx, "dt_stencil": self.dt_stencil,
                "max": dict(self.max), "l2": dict(self.l2), "cells": self.cells}


@dataclass
class ConvergenceReport:
    variant: str
    levels: List[ResidualReport]
    orders: Dict[str, object] = field(default_factory=dict)  # from max norms; "saturated" at round-off
    orders_l2: Dict[str, object] = field(default_factory=dict)

    @property
    def n_list(self) -> List[int]:
        return [r.n for r in self.levels]

    def finest(self) -> ResidualReport:
        return self.levels[-1]

    def within(self, target: float = 2.0, tol: float = 0.3, equations: Optional[Sequence[str]] = None) -> bool:
        """True when every fitted order is within ``target +- tol``; saturated counts as a pass."""
        eqs = equations if equations is not None else list(self.orders)
        for eq in eqs:
            o = self.orders[eq]
            if o == "saturated":
                continue
            if abs(o - target) > tol:
                return False
        return True

    def to_dict(self) -> dict:
        return {"variant": self.variant, "n_list": self.n_list, "orders": dict(self.orders),
                "orders_l2": dict(self.orders_l2), "levels": [r.to_dict() for r in self.levels]}


def sampling_grid(sampler, n: int) -> Grid1D:
    lo, hi = sampler.x_range
    return Grid1D.from_domain(lo, hi - lo, n, getattr(sampler, "bc_mode", "extrapolate"))


def _front_mask(grid: Grid1D, *depths: np.ndarray, width: int = 2) -> np.ndarray:
    """Cells whose +-width neighbourhood is wet at every sampled time."""
    wet = np.ones(grid.n, dtype=bool)
    for H in depths:
        wet &= H > 0
    keep = wet.copy()
    for k in range(1, width + 1):
        if grid.bc_mode == "periodic":
            keep &= np.roll(wet, k) & np.roll(wet, -k)
        else:
            keep[k:] &= wet[:-k]
            keep[:-k] &= wet[k:]
    return keep


def _norms(res: Dict[str, np.ndarray], mask: np.ndarray, dx: float):
    mx, l2 = {}, {}
    for k, r in res.items():
        r = r[mask]
        mx[k] = float(np.max(np.abs(r))) if r.size else 0.0
        l2[k] = float(np.sqrt(dx * np.sum(r * r)))
    return mx, l2


def _sample3(sampler, grid: Grid1D, dt: float):
    t = sampler.t_eval
    return sampler(grid.x, t - dt), sampler(grid.x, t), sampler(grid.x, t + dt)


def _equations(variant: str, grid: Grid1D, before, now, after, dt: float, p: PhysParams):
    g = p.g

    def d_t(fun):
        return (fun(after) - fun(before)) / (2.0 * dt)

    H, u, w, pnh, dzb, s = now.H, now.u, now.w, now.pnh, now.dzb, now.s
    dtH = d_t(lambda f: f.H)
    dthu = d_t(lambda f: f.H * f.u)
    dthw = d_t(lambda f: f.H * f.w)
    r_mass = dtH + ddx(H * u, grid)
    if variant == "sv":
        r_hu = dthu + ddx(H * u * u + 0.5 * g * H * H, grid) + g * H * dzb
        return {"mass": r_mass, "momentum_x": r_hu}
    forcing = H * s if variant in ("nh+forcing", "gn", "ns") else 0.0
    constraint = H * w + 0.5 * H * H * ddx(u, grid) - H * dzb * u
    if variant == "gn":
        # Green-Naghdi form with the pressure that balances its vertical equation
        p_gn = (4.0 / 3.0) * pnh
        r_hu = dthu + ddx(H * u * u + 0.5 * g * H * H + H * p_gn, grid) + g * H * dzb
        r_hw = dthw + ddx(H * u * w, grid) - 1.5 * p_gn - forcing
    else:
        r_hu = dthu + ddx(H * u * u + 0.5 * g * H * H + H * pnh, grid) + (g * H + 2.0 * pnh) * dzb
        r_hw = dthw + ddx(H * u * w, grid) - 2.0 * pnh - forcing
        if variant == "ns":
            mu, kappa = p.mu, p.kappa
            r_hu = r_hu - (ddx(2.0 * mu * H * ddx(u, grid), grid) - kappa * u)
            r_hw = r_hw - ddx(mu * H * ddx(w, grid), grid)
    return {"mass": r_mass, "momentum_x": r_hu, "momentum_z": r_hw, "constraint": constraint}


def pde_residual(sampler, variant: str = "nh", n: int = 256, dt_stencil: Optional[float] = None,
                 p: PhysParams = PhysParams()) -> ResidualReport:
    """Norms of every equation of ``variant`` evaluated on the exact fields of ``sampler``.

    Cells within two cells of a wet/dry front (at any of the three sampled
    times) are left out of both norms.
    """
    if variant not in VARIANTS:
        raise ContractError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    grid = sampling_grid(sampler, n)
    dt = grid.dx if dt_stencil is None else float(dt_stencil)
    if not dt > 0:
        raise ContractError("dt_stencil must be positive")
    before, now, after = _sample3(sampler, grid, dt)
    res = _equations(variant, grid, before, now, after, dt, p)
    mask = _front_mask(grid, before.H, now.H, after.H)
    mx, l2 = _norms(res, mask, grid.dx)
    return ResidualReport(variant, n, grid.dx, dt, mx, l2, int(mask.sum()))


def _energy_parts(f, g: float):
    E = 0.5 * f.H * (f.u ** 2 + f.w ** 2) + 0.5 * g * f.H * (f.H + 2.0 * f.zb)
    flux = f.u * (E + 0.5 * g * f.H ** 2 + f.H * f.pnh)
    return E, flux


def energy_residual(sampler, n: int = 256, dt_stencil: Optional[float] = None,
                    p: PhysParams = PhysParams()) -> ResidualReport:
    """Norms of dE/dt + d/dx(u (E + g H^2/2 + H pnh)) - H s w."""
    grid = sampling_grid(sampler, n)
    dt = grid.dx if dt_stencil is None else float(dt_stencil)
    if not dt > 0:
        raise ContractError("dt_stencil must be positive")
    before, now, after = _sample3(sampler, grid, dt)
    E0, _ = _energy_parts(before, p.g)
    E1, _ = _energy_parts(after, p.g)
    _, flux = _energy_parts(now, p.g)
    r = (E1 - E0) / (2.0 * dt) + ddx(flux, grid) - now.H * now.s * now.w
    mask = _front_mask(grid, before.H, now.H, after.H)
    mx, l2 = _norms({"energy": r}, mask, grid.dx)
    return ResidualReport("energy", n, grid.dx, dt, mx, l2, int(mask.sum()))


def _fit_order(ns: Sequence[int], norms: Sequence[float], floor: float):
    norms = np.asarray(norms, dtype=float)
    if np.all(norms <= floor):
        return "saturated"
    norms = np.maximum(norms, np.finfo(float).tiny)
    slope = np.polyfit(np.log(np.asarray(ns, dtype=float)), np.log(norms), 1)[0]
    return float(-slope)


def convergence_study(sampler, variant: str, n_list: Sequence[int], dt_stencil: Optional[float] = None,
                      p: PhysParams = PhysParams(), floor: float = SATURATION_FLOOR) -> ConvergenceReport:
    """Residual norms on each level and least-squares log-log orders per equation.

    ``variant`` may also be ``"energy"``. ``dt_stencil`` defaults to dx on
    every level. Norms that are all below ``floor`` are reported as
    ``"saturated"`` instead of an order.
    """
    n_list = [int(k) for k in n_list]
    if len(n_list) < 2:
        raise ContractError("a convergence study needs at least two grid levels")
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ContractError("grid levels must be strictly increasing")
    levels = []
    for n in n_list:
        if variant == "energy":
            levels.append(energy_residual(sampler, n, dt_stencil, p))
        else:
            levels.append(pde_residual(sampler, variant, n, dt_stencil, p))
    rep = ConvergenceReport(variant, levels)
    for eq in levels[0].max:
        rep.orders[eq] = _fit_order(n_list, [r.max[eq] for r in levels], floor)
        rep.orders_l2[eq] = _fit_order(n_list, [r.l2[eq] for r in levels], floor)
    return rep


@dataclass
class EnergyBudget:
    t: np.ndarray
    energy: np.ndarray
    boundary_work: np.ndarray  # time integral of the net boundary inflow of energy
    drift: float  # (E_end - E_0) / |E_0|
    imbalance: float  # (E_end - E_0 - boundary work) / |E_0|
    max_increase: float  # largest step-to-step increase of E - boundary work, relative
    monotone_violations: int

    def summary(self) -> dict:
        return {"drift": self.drift, "imbalance": self.imbalance, "max_increase": self.max_increase,
                "monotone_violations": self.monotone_violations,
                "energy_start": float(self.energy[0]), "energy_end": float(self.energy[-1])}


def energy_budget(result, tol: float = 1e-12) -> EnergyBudget:
    """Drift of the total energy of a run, corrected by what crossed the boundaries.

    An increase of the corrected energy by more than ``tol`` (relative) between
    consecutive steps counts as a monotonicity violation.
    """
    t = np.asarray(result.series_t, dtype=float)
    E = np.asarray(result.energy, dtype=float)
    if E.size == 0:
        raise ContractError("run result carries no energy series")
    flux = np.asarray(result.boundary_energy_flux, dtype=float)
    if flux.size != E.size:
        flux = np.zeros_like(E)
    work = np.concatenate(([0.0], np.cumsum(0.5 * (flux[1:] + flux[:-1]) * np.diff(t))))
    scale = abs(E[0]) if E[0] != 0 else 1.0
    corrected = E - work
    steps = np.diff(corrected) / scale
    return EnergyBudget(
        t=t, energy=E, boundary_work=work,
        drift=float((E[-1] - E[0]) / scale),
        imbalance=float((corrected[-1] - corrected[0]) / scale),
        max_increase=float(max(steps.max(), 0.0)) if steps.size else 0.0,
        monotone_violations=int(np.sum(steps > tol)),
    )


def write_report_json(path, report) -> None:
    data = report.to_dict() if hasattr(report, "to_dict") else report
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def write_levels_csv(path, report: ConvergenceReport) -> None:
    """One row per grid level: n, dx, dt_stencil, then max and L2 norms per equation."""
    eqs = list(report.levels[0].max)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "dx", "dt_stencil"] + [f"max_{e}" for e in eqs] + [f"l2_{e}" for e in eqs])
        for r in report.levels:
            w.writerow([r.n, repr(r.dx), repr(r.dt_stencil)] + [repr(r.max[e]) for e in eqs]
                       + [repr(r.l2[e]) for e in eqs])
