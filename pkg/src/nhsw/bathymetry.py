"""Bottom profiles z_b(x) together with their first and second derivatives."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from .errors import ContractError, OutOfDomainError

Triple = Tuple[np.ndarray, np.ndarray, np.ndarray]


class Bathymetry:
    """Interface: ``eval(x)`` returns ``(z_b, z_b', z_b'')``."""

    kind = "abstract"

    def eval(self, x) -> Triple:
        raise NotImplementedError

    def __call__(self, x) -> Triple:
        return self.eval(x)

    def describe(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class FlatBottom(Bathymetry):
    b1: float = 0.0
    kind = "flat"

    def eval(self, x) -> Triple:
        x = np.asarray(x, dtype=float)
        return np.full_like(x, self.b1), np.zeros_like(x), np.zeros_like(x)

    def describe(self) -> dict:
        return {"kind": self.kind, "b1": self.b1}


@dataclass(frozen=True)
class ParabolicBottom(Bathymetry):
    """z_b = b1 + b2 x^2 / 2, the bowl of the Thacker-type solutions."""

    b1: float = 0.0
    b2: float = 0.0
    kind = "parabolic"

    def eval(self, x) -> Triple:
        x = np.asarray(x, dtype=float)
        return self.b1 + 0.5 * self.b2 * x * x, self.b2 * x, np.full_like(x, self.b2)

    def describe(self) -> dict:
        return {"kind": self.kind, "b1": self.b1, "b2": self.b2}


def _second_derivative(xs: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Three-point second differences inside, four-point one-sided at both ends."""
    h0 = xs[1:-1] - xs[:-2]
    h1 = xs[2:] - xs[1:-1]
    out = np.empty_like(f)
    out[1:-1] = 2.0 * (h0 * f[2:] - (h0 + h1) * f[1:-1] + h1 * f[:-2]) / (h0 * h1 * (h0 + h1))
    for i, idx in ((0, slice(0, 4)), (-1, slice(-4, None))):
        # second derivative of the cubic through the four end samples
        c = np.polyfit(xs[idx] - xs[i], f[idx], 3)
        out[i] = 2.0 * c[1]
    return out


@dataclass(frozen=True, eq=False)
class SampledBottom(Bathymetry):
    """Bottom known at sample points; linear interpolation in between.

    Derivatives come from second-order differences of the samples unless
    ``dzb`` is supplied (``generated`` kind), in which case the curvature is
    obtained with a single differentiation.
    """

    xs: np.ndarray
    zb: np.ndarray
    dzb: Optional[np.ndarray] = None
    kind: str = "sampled"
    tol: float = 1e-9
    _d1: np.ndarray = field(init=False, repr=False)
    _d2: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        zb = np.asarray(self.zb, dtype=float)
        if xs.ndim != 1 or xs.shape != zb.shape or xs.size < 3:
            raise ContractError("sampled bathymetry needs matching 1D x/zb arrays with >= 3 samples")
        if np.any(np.diff(xs) <= 0):
            raise ContractError("bathymetry sample positions must be strictly increasing")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(zb))):
            raise ContractError("bathymetry samples must be finite")
        if self.dzb is None:
            d1 = np.gradient(zb, xs, edge_order=2)
            d2 = _second_derivative(xs, zb) if xs.size >= 4 else np.gradient(d1, xs, edge_order=2)
        else:
            d1 = np.asarray(self.dzb, dtype=float)
            if d1.shape != xs.shape:
                raise ContractError("dzb must match the sample positions")
            d2 = np.gradient(d1, xs, edge_order=2)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "zb", zb)
        object.__setattr__(self, "_d1", d1)
        object.__setattr__(self, "_d2", d2)

    @property
    def curvature_twice_differenced(self) -> bool:
        """True when z_b'' was obtained by differencing sampled z_b twice (lower accuracy)."""
        return self.dzb is None

    @property
    def domain(self) -> Tuple[float, float]:
        return float(self.xs[0]), float(self.xs[-1])

    def eval(self, x) -> Triple:
        x = np.asarray(x, dtype=float)
        lo, hi = self.domain
        span = self.tol * max(1.0, hi - lo)
        if np.any(x < lo - span) or np.any(x > hi + span):
            raise OutOfDomainError(f"x outside sampled bathymetry domain [{lo}, {hi}]")
        return (
            np.interp(x, self.xs, self.zb),
            np.interp(x, self.xs, self._d1),
            np.interp(x, self.xs, self._d2),
        )

    def describe(self) -> dict:
        lo, hi = self.domain
        return {
            "kind": self.kind,
            "samples": int(self.xs.size),
            "x_min": lo,
            "x_max": hi,
            "curvature_twice_differenced": self.curvature_twice_differenced,
        }

    @classmethod
    def from_function(cls, fun, xs) -> "SampledBottom":
        xs = np.asarray(xs, dtype=float)
        return cls(xs, np.asarray(fun(xs), dtype=float))


def read_bathymetry_csv(path) -> SampledBottom:
    """Load a two-column ``x,zb`` CSV file."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        if header != ["x", "zb"]:
            raise ContractError(f"{path}: expected header 'x,zb', got {','.join(header)!r}")
        rows = [(float(r[0]), float(r[1])) for r in reader if r]
    data = np.array(rows, dtype=float)
    return SampledBottom(data[:, 0], data[:, 1])


def write_bathymetry_csv(path, xs, zb) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "zb"])
        for a, b in zip(xs, zb):
            w.writerow([repr(float(a)), repr(float(b))])
