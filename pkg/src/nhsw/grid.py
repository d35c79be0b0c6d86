"""Uniform 1D cell-centered grid and second-order finite-difference stencils."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import ContractError

BC_MODES = ("periodic", "extrapolate", "dirichlet")


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid of ``n`` cells starting at ``x_left`` with spacing ``dx``.

    Cell centers are ``x_left + (i + 1/2) dx``. ``bc_mode`` selects the edge
    treatment of the stencils: ``periodic`` wraps around, ``extrapolate`` uses
    one-sided second-order formulas and ``dirichlet`` expects the caller to
    pass ghost values (the values one cell outside each edge).
    """

    x_left: float
    dx: float
    n: int
    bc_mode: str = "extrapolate"

    def __post_init__(self):
        if not self.dx > 0 or not np.isfinite(self.dx):
            raise ContractError(f"dx must be positive and finite, got {self.dx}")
        if int(self.n) != self.n or self.n < 3:
            raise ContractError(f"grid needs n >= 3 cells, got {self.n}")
        if self.bc_mode not in BC_MODES:
            raise ContractError(f"unknown bc_mode {self.bc_mode!r}")

    @classmethod
    def from_domain(cls, x_left: float, length: float, n: int, bc_mode: str = "extrapolate") -> "Grid1D":
        return cls(float(x_left), float(length) / n, int(n), bc_mode)

    @property
    def x(self) -> np.ndarray:
        return self.x_left + (np.arange(self.n) + 0.5) * self.dx

    @property
    def length(self) -> float:
        return self.n * self.dx

    @property
    def x_right(self) -> float:
        return self.x_left + self.n * self.dx

    @property
    def faces(self) -> np.ndarray:
        return self.x_left + np.arange(self.n + 1) * self.dx

    def with_bc(self, bc_mode: str) -> "Grid1D":
        return Grid1D(self.x_left, self.dx, self.n, bc_mode)

    def field(self, values, name: str = "field") -> np.ndarray:
        """Validate ``values`` as a field on this grid (broadcasting scalars)."""
        arr = np.asarray(values, dtype=float)
        if arr.ndim == 0:
            arr = np.full(self.n, float(arr))
        if arr.shape != (self.n,):
            raise ContractError(f"{name} has shape {arr.shape}, grid expects ({self.n},)")
        if not np.all(np.isfinite(arr)):
            raise ContractError(f"{name} contains non-finite values")
        return arr


def _check(f, g: Grid1D) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (g.n,):
        raise ContractError(f"field of length {f.shape} is not bound to a grid of {g.n} cells")
    return f


def _padded(f: np.ndarray, g: Grid1D, ghosts: Optional[Tuple[float, float]]) -> np.ndarray:
    if g.bc_mode == "periodic":
        return np.concatenate(([f[-1]], f, [f[0]]))
    if g.bc_mode == "dirichlet":
        if ghosts is None:
            raise ContractError("dirichlet grid requires ghost values (left, right)")
        return np.concatenate(([ghosts[0]], f, [ghosts[1]]))
    return None


def ddx(f, g: Grid1D, ghosts: Optional[Tuple[float, float]] = None) -> np.ndarray:
    """First derivative: centered in the interior, one-sided 3-point at
    non-periodic edges (or centered through ghost values for ``dirichlet``)."""
    f = _check(f, g)
    fp = _padded(f, g, ghosts)
    if fp is not None:
        return (fp[2:] - fp[:-2]) / (2.0 * g.dx)
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - f[:-2]) / (2.0 * g.dx)
    # written in differences so that constants give exactly zero
    out[0] = (4.0 * (f[1] - f[0]) - (f[2] - f[0])) / (2.0 * g.dx)
    out[-1] = -(4.0 * (f[-2] - f[-1]) - (f[-3] - f[-1])) / (2.0 * g.dx)
    return out


def d2dx2(f, g: Grid1D, ghosts: Optional[Tuple[float, float]] = None) -> np.ndarray:
    """Second derivative: 3-point interior, one-sided 4-point at edges."""
    f = _check(f, g)
    dx2 = g.dx * g.dx
    fp = _padded(f, g, ghosts)
    if fp is not None:
        return (fp[2:] - 2.0 * fp[1:-1] + fp[:-2]) / dx2
    out = np.empty_like(f)
    out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / dx2
    if g.n >= 4:
        out[0] = (-5.0 * (f[1] - f[0]) + 4.0 * (f[2] - f[0]) - (f[3] - f[0])) / dx2
        out[-1] = (-5.0 * (f[-2] - f[-1]) + 4.0 * (f[-3] - f[-1]) - (f[-4] - f[-1])) / dx2
    else:
        # only 3 cells: first-order one-sided fallback
        out[0] = out[1]
        out[-1] = out[1]
    return out
