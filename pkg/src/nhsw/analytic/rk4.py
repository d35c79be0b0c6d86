"""Classical fourth-order Runge-Kutta stepping."""

from __future__ import annotations

import numpy as np


def rk4_step(fun, t: float, y: np.ndarray, h: float) -> np.ndarray:
    k1 = fun(t, y)
    k2 = fun(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = fun(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = fun(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_march(fun, ts, y0) -> np.ndarray:
    """Integrate through the (monotone) sample times ``ts``; one RK4 step per interval."""
    ts = np.asarray(ts, dtype=float)
    ys = np.empty((ts.size, np.size(y0)))
    ys[0] = y0
    for k in range(1, ts.size):
        ys[k] = rk4_step(fun, ts[k - 1], ys[k - 1], ts[k] - ts[k - 1])
    return ys
