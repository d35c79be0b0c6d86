"""Thacker-type solutions in a parabolic bowl with a vertical forcing term.

The horizontal velocity is uniform in space, ``u = f(t)``, where ``f`` solves

    f' = -b2 (g + b2 f^2) F,    F' = f,

and the depth is a parabola translated by the displacement ``F``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from ..bathymetry import ParabolicBottom
from ..errors import ContractError, IntegrationError, OutOfDomainError
from .fields import SampledFields
from .rk4 import rk4_step


@dataclass(frozen=True)
class ThackerParams:
    H0: float = 1.0
    b1: float = 0.0
    b2: float = 0.5
    f0: float = 1.0
    t0: float = 0.0
    t_tilde0: Optional[float] = None  # lower bound of F; defaults to t0
    F0: float = 0.0  # F(t0), only meaningful when t_tilde0 != t0
    g: float = 9.81

    def __post_init__(self):
        if not self.H0 > 0:
            raise ContractError("Thacker H0 must be positive")
        if self.t_tilde0 is not None and self.t_tilde0 == self.t0 and self.F0 != 0.0:
            raise ContractError("F(t0) must vanish when t_tilde0 == t0")

    @property
    def bathymetry(self) -> ParabolicBottom:
        return ParabolicBottom(self.b1, self.b2)

    def rhs(self, t, y):
        F, f = y
        return np.array([f, -self.b2 * (self.g + self.b2 * f * f) * F])


@dataclass(frozen=True, eq=False)
class ThackerTrajectory:
    t: np.ndarray
    f: np.ndarray
    F: np.ndarray
    df: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "_F", CubicHermiteSpline(self.t, self.F, self.f))
        object.__setattr__(self, "_f", CubicHermiteSpline(self.t, self.f, self.df))

    @property
    def t_range(self):
        return float(self.t[0]), float(self.t[-1])

    def at(self, t):
        """Return ``(F, f, f')`` at time ``t`` (cubic Hermite between RK4 steps)."""
        lo, hi = self.t_range
        tt = np.asarray(t, dtype=float)
        slack = 1e-12 * max(1.0, abs(hi))
        if np.any(tt < lo - slack) or np.any(tt > hi + slack):
            raise OutOfDomainError(f"t={t} outside the trajectory range [{lo}, {hi}]")
        tt = np.clip(tt, lo, hi)
        return self._F(tt), self._f(tt), self._f(tt, 1)


def integrate_f(p: ThackerParams, t_end: float, dt: float) -> ThackerTrajectory:
    """RK4 integration of the (F, f) system from ``t0`` to ``t_end``; every step is stored."""
    if not dt > 0:
        raise ContractError("dt must be positive")
    if not t_end > p.t0:
        raise ContractError("t_end must exceed t0")
    n = int(np.ceil((t_end - p.t0) / dt - 1e-9))
    ts = np.minimum(p.t0 + dt * np.arange(n + 1), t_end)
    ys = np.empty((n + 1, 2))
    ys[0] = (p.F0, p.f0)
    # overflow is reported through IntegrationError, not as a warning
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n):
            ys[k + 1] = rk4_step(p.rhs, ts[k], ys[k], ts[k + 1] - ts[k])
            if not np.all(np.isfinite(ys[k + 1])):
                raise IntegrationError("Thacker ODE blew up", float(ts[k + 1]))
    F, f = ys[:, 0], ys[:, 1]
    df = -p.b2 * (p.g + p.b2 * f * f) * F
    return ThackerTrajectory(ts, f, F, df)


def thacker_fields(x, t: float, p: ThackerParams, traj: ThackerTrajectory):
    """Pointwise fields ``(H, u, w, p_bottom, s)``.

    ``p_bottom`` is the total pressure at z = z_b, i.e. (g + b2 f^2) H; the
    full column is given by :func:`thacker_pressure`.
    """
    x = np.asarray(x, dtype=float)
    F, f, df = traj.at(t)
    H = np.maximum(p.H0 - 0.5 * p.b2 * (x - F) ** 2, 0.0)
    wet = H > 0
    u = np.where(wet, f, 0.0)
    w = np.where(wet, p.b2 * x * f, 0.0)
    pb = np.where(wet, (p.g + p.b2 * f * f) * H, 0.0)
    s = p.b2 * x * df
    return H, u, w, pb, s


def thacker_pressure(x, z, t: float, p: ThackerParams, traj: ThackerTrajectory):
    """Total pressure (g + b2 f^2)(eta - z) inside the water column."""
    x = np.asarray(x, dtype=float)
    F, f, _ = traj.at(t)
    H = np.maximum(p.H0 - 0.5 * p.b2 * (x - F) ** 2, 0.0)
    eta = H + p.b1 + 0.5 * p.b2 * x * x
    return np.where(H > 0, (p.g + p.b2 * f * f) * (eta - z), 0.0)


def thacker_depth_averaged(x, t: float, p: ThackerParams, traj: ThackerTrajectory) -> SampledFields:
    """Depth-averaged fields; pnh = b2 f^2 H / 2 and the forcing s = b2 x f'."""
    H, u, w, _, s = thacker_fields(x, t, p, traj)
    _, f, _ = traj.at(t)
    zb, dzb, _ = p.bathymetry.eval(x)
    pnh = 0.5 * p.b2 * f * f * H
    return SampledFields(H, u, w, pnh, zb, dzb, s)


class ThackerSampler:
    """Callable ``(x, t) -> SampledFields`` over a precomputed trajectory."""

    name = "thacker"
    bc_mode = "extrapolate"

    def __init__(self, params: ThackerParams = ThackerParams(), t_eval: float = 0.5,
                 dt: float = 1e-4, t_end: Optional[float] = None, x_range=(-3.0, 3.0)):
        self.params = params
        self.t_eval = float(t_eval)
        self.x_range = tuple(x_range)
        self.traj = integrate_f(params, t_end if t_end is not None else t_eval + 1.0, dt)
        self.bathymetry = params.bathymetry

    def __call__(self, x, t) -> SampledFields:
        return thacker_depth_averaged(x, t, self.params, self.traj)
