"""Elliptic equation for the non-hydrostatic pressure and its regime map.

With ``q = sqrt(H) pnh`` the pressure obeys

    -4 H^2 q'' + Lambda q = 8 sqrt(H) B,

a diffusion-type problem where ``Lambda > 0`` and a Helmholtz-type problem
where ``Lambda < 0``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple

import numpy as np
from numba import njit

from .bathymetry import Bathymetry
from .errors import ContractError, SolverFailure, WetIntervalError
from .grid import Grid1D, d2dx2, ddx
from .model import PhysParams, State

DIFFUSION = "diffusion"
HELMHOLTZ = "helmholtz"
MARGINAL = "marginal"

_PIVOT_RTOL = 1e-13


def _stencil_grid(grid: Grid1D) -> Grid1D:
    # without caller ghosts, dirichlet grids fall back to one-sided edges
    return grid.with_bc("extrapolate") if grid.bc_mode == "dirichlet" else grid


def lambda_coeff(H, b: Bathymetry, grid: Grid1D) -> np.ndarray:
    """16(1 + zb'^2) - 8 H zb'' + 16 H' zb' - 2 H H'' + 3 H'^2."""
    H = grid.field(H, "H")
    sg = _stencil_grid(grid)
    dH = ddx(H, sg)
    d2H = d2dx2(H, sg)
    _, dzb, d2zb = b.eval(grid.x)
    return 16.0 * (1.0 + dzb * dzb) - 8.0 * H * d2zb + 16.0 * dH * dzb - 2.0 * H * d2H + 3.0 * dH * dH


def rhs_B(s: State, b: Bathymetry, p: PhysParams) -> np.ndarray:
    """Right-hand side B of the pressure equation evaluated on a state."""
    g = _stencil_grid(s.grid)
    H = s.H
    u, _ = s.velocities(p.h_min)
    zb, dzb, _ = b.eval(s.grid.x)
    kinetic = H * (
        -u * d2dx2(H * u, g) + 0.5 * d2dx2(H * u * u, g) + 0.5 * u * u * d2dx2(H + 2.0 * zb, g)
    )
    gravity = 0.5 * p.g * H * (H * d2dx2(H + zb, g) - 2.0 * dzb * ddx(H + zb, g))
    return kinetic + gravity


@dataclass(frozen=True, eq=False)
class PressureProblem:
    """One contiguous wet interval of the pressure equation.

    ``q_left``/``q_right`` are Dirichlet values of ``q`` on the outer faces
    of the interval; they are ignored on periodic grids.
    """

    grid: Grid1D
    H: np.ndarray
    lam: np.ndarray
    B: np.ndarray
    q_left: float = 0.0
    q_right: float = 0.0
    h_min: float = 1e-6

    def __post_init__(self):
        for name in ("H", "lam", "B"):
            object.__setattr__(self, name, self.grid.field(getattr(self, name), name))
        dry = np.flatnonzero(self.H < self.h_min)
        if dry.size:
            raise WetIntervalError("pressure problem contains a dry cell", int(dry[0]))

    @property
    def periodic(self) -> bool:
        return self.grid.bc_mode == "periodic"

    def diagonals(self):
        """Lower, main and upper diagonals and the right-hand side of the discrete system."""
        dx2 = self.grid.dx ** 2
        k = 4.0 * self.H ** 2 / dx2
        lower = -k.copy()
        upper = -k.copy()
        diag = 2.0 * k + self.lam
        rhs = 8.0 * np.sqrt(self.H) * self.B
        if not self.periodic:
            # face Dirichlet value through the ghost q_{-1} = 2 q_b - q_0
            diag[0] += k[0]
            rhs[0] += 2.0 * k[0] * self.q_left
            diag[-1] += k[-1]
            rhs[-1] += 2.0 * k[-1] * self.q_right
            lower[0] = 0.0
            upper[-1] = 0.0
        return lower, diag, upper, rhs

    def apply(self, q) -> np.ndarray:
        """Discrete left-hand side applied to ``q`` minus the boundary contributions."""
        lower, diag, upper, rhs = self.diagonals()
        q = np.asarray(q, dtype=float)
        out = diag * q
        if self.periodic:
            out += lower * np.roll(q, 1) + upper * np.roll(q, -1)
        else:
            out[1:] += lower[1:] * q[:-1]
            out[:-1] += upper[:-1] * q[1:]
        return out - rhs

    def is_diagonally_dominant(self) -> bool:
        lower, diag, upper, _ = self.diagonals()
        return bool(np.all(np.abs(diag) > np.abs(lower) + np.abs(upper)))


@njit(cache=True)
def _thomas_kernel(lower, diag, upper, rhs, rtol):
    n = diag.shape[0]
    c = np.empty(n)
    x = np.empty(n)
    for i in range(n):
        piv = diag[i]
        if i > 0:
            piv -= lower[i] * c[i - 1]
        scale = abs(diag[i]) + abs(lower[i]) + abs(upper[i])
        if not abs(piv) > rtol * scale:
            return x, i
        c[i] = upper[i] / piv if i < n - 1 else 0.0
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / piv if i > 0 else rhs[i] / piv
    for i in range(n - 2, -1, -1):
        x[i] -= c[i] * x[i + 1]
    return x, -1


def thomas(lower, diag, upper, rhs) -> np.ndarray:
    """Tridiagonal elimination without pivoting.

    ``lower[0]`` and ``upper[-1]`` are ignored. Raises :class:`SolverFailure`
    with the row index when a pivot vanishes relative to its row.
    """
    arrs = [np.ascontiguousarray(a, dtype=np.float64) for a in (lower, diag, upper, rhs)]
    x, bad = _thomas_kernel(*arrs, _PIVOT_RTOL)
    if bad >= 0:
        raise SolverFailure("singular tridiagonal system", int(bad))
    return x


def cyclic_thomas(lower, diag, upper, rhs) -> np.ndarray:
    """Periodic tridiagonal system (corner entries ``lower[0]``, ``upper[-1]``)
    via the Sherman-Morrison correction of two Thomas solves."""
    n = len(diag)
    alpha = upper[-1]  # A[n-1, 0]
    beta = lower[0]  # A[0, n-1]
    gamma = -diag[0] if diag[0] != 0 else 1.0
    bb = np.array(diag, dtype=float)
    bb[0] -= gamma
    bb[-1] -= alpha * beta / gamma
    x = thomas(lower, bb, upper, rhs)
    u = np.zeros(n)
    u[0] = gamma
    u[-1] = alpha
    z = thomas(lower, bb, upper, u)
    fact = (x[0] + beta * x[-1] / gamma) / (1.0 + z[0] + beta * z[-1] / gamma)
    return x - fact * z


def solve_pressure_bvp(prob: PressureProblem) -> np.ndarray:
    """Solve for q on one wet interval and return pnh = q / sqrt(H)."""
    lower, diag, upper, rhs = prob.diagonals()
    if prob.periodic:
        q = cyclic_thomas(lower, diag, upper, rhs)
    else:
        q = thomas(lower, diag, upper, rhs)
    if not np.all(np.isfinite(q)):
        raise SolverFailure("non-finite pressure solution", int(np.argmax(~np.isfinite(q))))
    return q / np.sqrt(prob.H)


def solve_q(prob: PressureProblem) -> np.ndarray:
    return solve_pressure_bvp(prob) * np.sqrt(prob.H)


def wet_intervals(H, h_min: float) -> List[Tuple[int, int]]:
    """Half-open index ranges of maximal runs of cells with H >= h_min."""
    wet = np.asarray(H) >= h_min
    edges = np.diff(np.concatenate(([0], wet.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1)
    return list(zip(starts.tolist(), stops.tolist()))


def solve_wet_pressure(grid: Grid1D, H, lam, B, h_min: float, periodic: bool = False,
                       q_left: float = 0.0, q_right: float = 0.0) -> np.ndarray:
    """Solve the pressure equation independently on every wet interval.

    Dry cells get zero pressure and bound each interval with q = 0. A fully
    wet periodic domain is solved as a single cyclic system; ``q_left`` and
    ``q_right`` apply only where an interval touches the domain edge.
    """
    H = grid.field(H, "H")
    lam = grid.field(lam, "lam")
    B = grid.field(B, "B")
    pnh = np.zeros(grid.n)
    intervals = wet_intervals(H, h_min)
    if periodic and intervals == [(0, grid.n)]:
        prob = PressureProblem(grid.with_bc("periodic"), H, lam, B, h_min=h_min)
        return solve_pressure_bvp(prob)
    for i0, i1 in intervals:
        m = i1 - i0
        if m < 3:
            # too thin for a 3-point solve; treat as hydrostatic
            continue
        sub = Grid1D(grid.x_left + i0 * grid.dx, grid.dx, m, "dirichlet")
        prob = PressureProblem(
            sub, H[i0:i1], lam[i0:i1], B[i0:i1],
            q_left=q_left if i0 == 0 else 0.0,
            q_right=q_right if i1 == grid.n else 0.0,
            h_min=h_min,
        )
        try:
            pnh[i0:i1] = solve_pressure_bvp(prob)
        except SolverFailure as exc:
            raise SolverFailure("pressure solve failed", exc.pivot + i0) from exc
    return pnh


def classify_regime(lam, tau: float = 1e-10) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if tau < 0:
        raise ContractError("regime threshold must be non-negative")
    out = np.full(lam.shape, MARGINAL, dtype=object)
    out[lam > tau] = DIFFUSION
    out[lam < -tau] = HELMHOLTZ
    return out


def write_regime_csv(path, x, lam, tau: float = 1e-10) -> None:
    tags = classify_regime(lam, tau)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "lambda", "regime"])
        for xi, li, ti in zip(x, lam, tags):
            w.writerow([repr(float(xi)), repr(float(li)), ti])
