"""Prediction-correction time stepping for the non-hydrostatic system.

Each step runs

1. a hydrostatic finite-volume predictor for (H, Hu) with hydrostatic
   reconstruction of the topography and a Rusanov flux; ``H w`` is advected
   with the same flux,
2. optional explicit sub-steps for an external vertical forcing and the
   viscous/friction terms,
3. a non-hydrostatic correction: the pressure equation is solved on every wet
   interval so that the corrected state satisfies the shallow-water
   divergence constraint, and its contributions are added to ``H u`` and
   ``H w``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, List, Optional

import numpy as np

from .bathymetry import Bathymetry
from .errors import ConfigError, ContractError, IntegrationError, NHSWError, StepRejected
from .grid import Grid1D, ddx
from .model import (
    PhysParams,
    State,
    divergence_constraint_residual,
    energy_density,
    energy_flux,
    ns_viscous_terms,
    write_columns_csv,
    write_state_csv,
)
from .pressure import lambda_coeff, rhs_B, solve_wet_pressure

NG = 2  # ghost cells per side


@dataclass(frozen=True)
class BoundaryCondition:
    """``periodic``, ``reflective``, ``inflow`` (imposed discharge) or
    ``outflow`` (imposed depth; transmissive when ``value`` is None)."""

    kind: str = "reflective"
    value: Optional[float] = None

    KINDS = ("periodic", "reflective", "inflow", "outflow")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ConfigError(f"unknown boundary kind {self.kind!r}")
        if self.kind == "inflow" and self.value is None:
            raise ConfigError("inflow boundary needs a discharge value")

    @classmethod
    def parse(cls, text: str) -> "BoundaryCondition":
        kind, _, val = text.strip().partition(":")
        return cls(kind.strip(), float(val) if val.strip() else None)

    def __str__(self):
        return self.kind if self.value is None else f"{self.kind}:{self.value!r}"


@dataclass(frozen=True)
class SolverConfig:
    t_end: float
    cfl: float = 0.5
    bc_left: BoundaryCondition = BoundaryCondition()
    bc_right: BoundaryCondition = BoundaryCondition()
    h_min: float = 1e-6
    h_nh: float = 1e-2
    enable_nh: bool = True
    mu: float = 0.0
    kappa: float = 0.0
    order: int = 1
    nh_rhs: str = "projection"
    snapshot_interval: Optional[float] = None
    max_steps: int = 10_000_000

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise ConfigError(f"cfl must be in (0, 1], got {self.cfl}")
        if not self.t_end > 0:
            raise ConfigError("t_end must be positive")
        if self.order not in (1, 2):
            raise ConfigError("order must be 1 or 2")
        if self.nh_rhs not in ("projection", "analytic"):
            raise ConfigError("nh_rhs must be 'projection' or 'analytic'")
        if (self.bc_left.kind == "periodic") != (self.bc_right.kind == "periodic"):
            raise ConfigError("periodic boundaries must be set on both sides")

    @property
    def periodic(self) -> bool:
        return self.bc_left.kind == "periodic"

    def phys(self, g: float = 9.81) -> PhysParams:
        return PhysParams(g=g, mu=self.mu, kappa=self.kappa, h_min=self.h_min)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bc_left"] = str(self.bc_left)
        d["bc_right"] = str(self.bc_right)
        return d


@dataclass
class RunResult:
    times: List[float] = field(default_factory=list)
    states: List[State] = field(default_factory=list)
    series_t: List[float] = field(default_factory=list)
    series_dt: List[float] = field(default_factory=list)
    energy: List[float] = field(default_factory=list)
    mass: List[float] = field(default_factory=list)
    constraint_residual: List[float] = field(default_factory=list)
    boundary_energy_flux: List[float] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def final(self) -> State:
        return self.states[-1]

    def save(self, outdir, b: Bathymetry, p: PhysParams) -> Path:
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        meta = dict(self.meta)
        meta["snapshot_times"] = list(self.times)
        (out / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        for k, s in enumerate(self.states):
            write_state_csv(out / f"snap_{k}.csv", s, b, p)
        write_columns_csv(out / "series.csv", {
            "t": self.series_t,
            "dt": self.series_dt,
            "energy": self.energy,
            "mass": self.mass,
            "constraint_residual": self.constraint_residual,
            "boundary_energy_flux": self.boundary_energy_flux,
        })
        return out


# ----------------------------------------------------------------- predictor


def _minmod(a, b):
    return np.where(a * b > 0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def _ghost_index(n: int, bc_left: BoundaryCondition, bc_right: BoundaryCondition):
    """Source index and momentum sign for every extended cell."""
    idx = np.arange(-NG, n + NG)
    sign = np.ones(n + 2 * NG)
    if bc_left.kind == "periodic":
        return np.mod(idx, n), sign
    src = idx.copy()
    lo = idx < 0
    hi = idx >= n
    if bc_left.kind == "reflective":
        src[lo] = -idx[lo] - 1
        sign[lo] = -1.0
    else:
        src[lo] = 0
    if bc_right.kind == "reflective":
        src[hi] = 2 * n - idx[hi] - 1
        sign[hi] = -1.0
    else:
        src[hi] = n - 1
    return src, sign


def _extend(H, u, w, zb, cfg: SolverConfig):
    n = H.size
    src, sign = _ghost_index(n, cfg.bc_left, cfg.bc_right)
    He, ue, we, ze = H[src], u[src] * sign, w[src], zb[src]
    for side, sl, edge in ((cfg.bc_left, slice(0, NG), 0), (cfg.bc_right, slice(n + NG, n + 2 * NG), n - 1)):
        if side.kind == "inflow":
            Hg = max(H[edge], cfg.h_min)
            He[sl] = Hg
            ue[sl] = side.value / Hg
        elif side.kind == "outflow" and side.value is not None:
            He[sl] = side.value
    return He, ue, we, ze


def _fv_rhs(H, hu, hw, zb, cfg: SolverConfig, p: PhysParams, dx: float):
    """Time derivative of (H, Hu, Hw) from the hydrostatic finite-volume discretization."""
    wet = H >= p.h_min
    Hs = np.where(wet, H, 1.0)
    u = np.where(wet, hu / Hs, 0.0)
    w = np.where(wet, hw / Hs, 0.0)
    He, ue, we, ze = _extend(H, u, w, zb, cfg)
    eta = He + ze
    n = H.size
    if cfg.order == 2:
        slopes = []
        for q in (He, eta, ue, we):
            s = np.zeros_like(q)
            s[1:-1] = _minmod(q[1:-1] - q[:-2], q[2:] - q[1:-1])
            slopes.append(s)
        # first order next to dry cells
        dryish = He < p.h_min
        near = dryish.copy()
        near[1:] |= dryish[:-1]
        near[:-1] |= dryish[1:]
        for s in slopes:
            s[near] = 0.0
        sH, seta, su, sw = slopes
    else:
        sH = seta = su = sw = 0.0
    HLf = He + 0.5 * sH  # value at the right face of each extended cell
    HRf = He - 0.5 * sH  # value at the left face
    eLf, eRf = eta + 0.5 * seta, eta - 0.5 * seta
    uLf, uRf = ue + 0.5 * su, ue - 0.5 * su
    wLf, wRf = we + 0.5 * sw, we - 0.5 * sw
    zLf, zRf = eLf - HLf, eRf - HRf

    # interfaces j+1/2 for extended cells j = NG-1 .. n+NG-1 (n+1 physical faces)
    L = slice(NG - 1, n + NG)
    R = slice(NG, n + NG + 1)
    HL, HR = HLf[L], HRf[R]
    zL, zR = zLf[L], zRf[R]
    uL, uR = uLf[L], uRf[R]
    wL, wR = wLf[L], wRf[R]
    zs = np.maximum(zL, zR)
    HLs = np.maximum(0.0, HL + zL - zs)
    HRs = np.maximum(0.0, HR + zR - zs)
    uL = np.where(HLs > 0, uL, 0.0)
    uR = np.where(HRs > 0, uR, 0.0)
    g = p.g
    a = np.maximum(np.abs(uL) + np.sqrt(g * HLs), np.abs(uR) + np.sqrt(g * HRs))
    F0 = 0.5 * (HLs * uL + HRs * uR) - 0.5 * a * (HRs - HLs)
    F1 = 0.5 * (HLs * uL * uL + 0.5 * g * HLs ** 2 + HRs * uR * uR + 0.5 * g * HRs ** 2) \
        - 0.5 * a * (HRs * uR - HLs * uL)
    F2 = 0.5 * (HLs * uL * wL + HRs * uR * wR) - 0.5 * a * (HRs * wR - HLs * wL)
    # hydrostatic-reconstruction corrections seen by the left/right cell of each face
    F1_left = F1 + 0.5 * g * (HL ** 2 - HLs ** 2)
    F1_right = F1 + 0.5 * g * (HR ** 2 - HRs ** 2)

    dH = -(F0[1:] - F0[:-1]) / dx
    dhu = -(F1_left[1:] - F1_right[:-1]) / dx
    dhw = -(F2[1:] - F2[:-1]) / dx
    if cfg.order == 2:
        c = slice(NG, n + NG)
        dhu -= g * 0.5 * (HRf[c] + HLf[c]) * (zLf[c] - zRf[c]) / dx
    return dH, dhu, dhw


def max_wave_speed(s: State, p: PhysParams) -> float:
    u, _ = s.velocities(p.h_min)
    return float(np.max(np.abs(u) + np.sqrt(p.g * s.H)))


def admissible_dt(s: State, cfg: SolverConfig, p: PhysParams) -> float:
    c = max_wave_speed(s, p)
    return np.inf if c == 0 else cfg.cfl * s.grid.dx / c


def _clean(H, hu, hw, h_min):
    H = np.maximum(H, 0.0)
    dry = H < h_min
    hu = np.where(dry, 0.0, hu)
    hw = np.where(dry, 0.0, hw)
    return H, hu, hw


def hydrostatic_step(s: State, b: Bathymetry, cfg: SolverConfig, p: PhysParams, dt: float) -> State:
    """Advance (H, Hu, Hw) by the hydrostatic part only; ``pnh`` is left untouched."""
    dt_max = admissible_dt(s, cfg, p)
    if dt > dt_max * (1.0 + 1e-12):
        raise StepRejected(dt, dt_max)
    zb = b.eval(s.grid.x)[0]
    dx = s.grid.dx
    k = _fv_rhs(s.H, s.hu, s.hw, zb, cfg, p, dx)
    H1, hu1, hw1 = _clean(s.H + dt * k[0], s.hu + dt * k[1], s.hw + dt * k[2], p.h_min)
    if cfg.order == 2:
        k2 = _fv_rhs(H1, hu1, hw1, zb, cfg, p, dx)
        H1, hu1, hw1 = _clean(
            0.5 * (s.H + H1 + dt * k2[0]),
            0.5 * (s.hu + hu1 + dt * k2[1]),
            0.5 * (s.hw + hw1 + dt * k2[2]),
            p.h_min,
        )
    return s.replace(H=H1, hu=hu1, hw=hw1)


# ---------------------------------------------------------------- corrector


def _stencil_grid(grid: Grid1D, cfg: SolverConfig) -> Grid1D:
    return grid.with_bc("periodic" if cfg.periodic else "extrapolate")


def nh_correction(s: State, b: Bathymetry, cfg: SolverConfig, p: PhysParams, dt: float) -> State:
    """Solve for pnh on the predicted state and apply its contributions over ``dt``.

    With ``nh_rhs='projection'`` (default) the right-hand side is chosen so
    that the corrected state satisfies the divergence constraint; with
    ``'analytic'`` it is the closed-form B of the predicted state.
    """
    grid = _stencil_grid(s.grid, cfg)
    sg = s.replace(grid=grid) if grid != s.grid else s
    _, dzb, _ = b.eval(grid.x)
    wet = sg.H >= p.h_min
    # thin layers next to wet/dry fronts are kept hydrostatic
    active = sg.H >= max(cfg.h_nh, p.h_min)
    if cfg.nh_rhs == "projection":
        C = divergence_constraint_residual(sg, b, p)
        B = np.where(wet, -C / dt, 0.0)
    else:
        B = np.where(wet, rhs_B(sg, b, p), 0.0)
    lam = lambda_coeff(sg.H, b, grid)
    H_active = np.where(active, sg.H, 0.0)
    pnh = solve_wet_pressure(grid, H_active, lam, np.where(active, B, 0.0), max(cfg.h_nh, p.h_min),
                             periodic=cfg.periodic)
    Hp = sg.H * pnh
    hu = sg.hu - dt * (ddx(Hp, grid) + 2.0 * pnh * dzb)
    hw = sg.hw + 2.0 * dt * pnh
    # cells outside the pressure intervals keep their predicted momentum
    hu = np.where(active, hu, np.where(wet, sg.hu, 0.0))
    hw = np.where(active, hw, np.where(wet, sg.hw, 0.0))
    return s.replace(hu=hu, hw=hw, pnh=pnh)


def viscous_step(s: State, cfg: SolverConfig, p: PhysParams, dt: float) -> State:
    if p.mu == 0 and p.kappa == 0:
        return s
    sg = s.replace(grid=_stencil_grid(s.grid, cfg))
    V_hu, V_hw = ns_viscous_terms(sg, p)
    wet = s.H >= p.h_min
    return s.replace(hu=np.where(wet, s.hu + dt * V_hu, 0.0), hw=np.where(wet, s.hw + dt * V_hw, 0.0))


# ---------------------------------------------------------------------- run

Forcing = Callable[[np.ndarray, float], np.ndarray]


def _wet_interior_max(r, H, h_min):
    wet = H >= h_min
    core = wet.copy()
    core[1:] &= wet[:-1]
    core[:-1] &= wet[1:]
    return float(np.max(np.abs(r[core]))) if np.any(core) else 0.0


def _advance(s: State, b: Bathymetry, cfg: SolverConfig, p: PhysParams, dt: float, t: float,
             forcing: Optional[Forcing]) -> State:
    s = hydrostatic_step(s, b, cfg, p, dt)
    if forcing is not None:
        wet = s.H >= p.h_min
        s = s.replace(hw=np.where(wet, s.hw + dt * s.H * forcing(s.grid.x, t), 0.0))
    s = viscous_step(s, cfg, p, dt)
    if cfg.enable_nh:
        s = nh_correction(s, b, cfg, p, dt)
    return s


def run(initial: State, b: Bathymetry, cfg: SolverConfig, p: Optional[PhysParams] = None,
        forcing: Optional[Forcing] = None, t0: float = 0.0) -> RunResult:
    """Integrate from ``t0`` to ``t_end``; ``forcing(x, t)`` adds ``H s`` to the H w equation."""
    if p is None:
        p = cfg.phys()
    if initial.grid.bc_mode == "periodic" and not cfg.periodic:
        raise ContractError("periodic grid needs periodic boundary conditions")
    grid = initial.grid
    dx = grid.dx
    interval = cfg.snapshot_interval or (cfg.t_end - t0)
    targets = list(np.arange(t0 + interval, cfg.t_end, interval)) + [cfg.t_end]
    targets = [tk for tk in targets if tk > t0 + 1e-12 * max(1.0, abs(cfg.t_end))]
    res = RunResult()
    s = initial
    t = t0
    res.times.append(t)
    res.states.append(s)
    sgrid = _stencil_grid(grid, cfg)

    def record(s, t, dt):
        res.series_t.append(t)
        res.series_dt.append(dt)
        res.energy.append(float(np.sum(energy_density(s, b, p)) * dx))
        res.mass.append(float(np.sum(s.H) * dx))
        r = divergence_constraint_residual(s.replace(grid=sgrid), b, p)
        res.constraint_residual.append(_wet_interior_max(r, s.H, p.h_min))
        if cfg.periodic:
            res.boundary_energy_flux.append(0.0)
        else:
            # net inflow of energy through the two end cells
            F = energy_flux(s, b, p)
            res.boundary_energy_flux.append(float(F[0] - F[-1]))

    record(s, t, 0.0)
    steps = 0
    k = 0
    while k < len(targets):
        dt = admissible_dt(s, cfg, p)
        if targets[k] - t <= dt * (1.0 + 1e-12):
            dt = targets[k] - t
            hit = True
        else:
            hit = False
        try:
            s = _advance(s, b, cfg, p, dt, t, forcing)
        except ContractError as exc:
            # a step produced an invalid state (non-finite or negative fields)
            err = IntegrationError(f"invalid state after step: {exc}", t + dt)
            err.result = res
            raise err from exc
        except NHSWError as exc:
            exc.result = res
            raise
        t = targets[k] if hit else t + dt
        steps += 1
        record(s, t, dt)
        if hit:
            res.times.append(t)
            res.states.append(s)
            k += 1
        if steps >= cfg.max_steps:
            res.times.append(t)
            res.states.append(s)
            break
    res.meta.update({"config": cfg.to_dict(), "g": p.g, "steps": steps, "bathymetry": b.describe(),
                     "grid": {"x_left": grid.x_left, "dx": dx, "n": grid.n}})
    return res
