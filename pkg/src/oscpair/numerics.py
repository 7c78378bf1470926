"""Small dense-matrix helpers used throughout the simulator.

Everything here operates on plain numpy arrays, almost always 4x4 (two
modes) or 2x2 (a single mode). The quadrature ordering is mode-wise,
r = (x1, p1, x2, p2), and ``OMEGA`` below is the symplectic form in that
ordering. All other modules import it from here so there is exactly one
copy of the convention.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy.linalg import expm as _scipy_expm

__all__ = [
    "OMEGA",
    "OMEGA_SINGLE",
    "mat_exp",
    "integrate_matrix",
    "rk4_integrate",
]

# Single-mode symplectic form, [x, p] ordering.
OMEGA_SINGLE = np.array([[0.0, 1.0], [-1.0, 0.0]])
OMEGA_SINGLE.setflags(write=False)

# Two-mode symplectic form in mode-wise ordering r = (x1, p1, x2, p2).
OMEGA = np.block(
    [
        [OMEGA_SINGLE, np.zeros((2, 2))],
        [np.zeros((2, 2)), OMEGA_SINGLE],
    ]
)
OMEGA.setflags(write=False)


def _require_square(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def mat_exp(m: np.ndarray) -> np.ndarray:
    """Matrix exponential of a real square matrix.

    Thin validation wrapper around scipy's scaling-and-squaring Pade
    implementation. Raises ValueError for non-square or non-finite input.
    """
    arr = _require_square(m, "mat_exp argument")
    out = _scipy_expm(arr)
    if not np.all(np.isfinite(out)):
        raise ValueError("mat_exp overflowed; argument norm too large")
    return out


def integrate_matrix(
    f: Callable[[float], np.ndarray],
    t0: float,
    t1: float,
    steps: int,
) -> np.ndarray:
    """Entrywise composite Simpson quadrature of a matrix-valued function.

    Parameters
    ----------
    f : callable
        Maps a float to an ndarray of fixed shape.
    t0, t1 : float
        Integration limits, ``t1 >= t0``.
    steps : int
        Number of subintervals, at least 2. Odd counts are rounded up
        since Simpson's rule needs an even number of panels.
    """
    if t1 < t0:
        raise ValueError(f"integration limits reversed: [{t0}, {t1}]")
    if steps < 2:
        raise ValueError("integrate_matrix needs at least 2 steps")
    n = int(steps)
    if n % 2:
        n += 1
    h = (t1 - t0) / n
    acc = np.asarray(f(t0), dtype=float).copy()
    acc += np.asarray(f(t1), dtype=float)
    for k in range(1, n):
        w = 4.0 if k % 2 else 2.0
        acc += w * np.asarray(f(t0 + k * h), dtype=float)
    return acc * (h / 3.0)


def rk4_integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    t: float,
    dt: float,
) -> np.ndarray:
    """Classical fixed-step RK4 from 0 to t for a matrix-valued ODE.

    The step count is ``ceil(t / dt)`` and the actual step is ``t / n``,
    so the endpoint is hit exactly. Used as an independent cross-check
    of the closed-form propagators, so it deliberately shares no code
    with them.
    """
    if dt <= 0:
        raise ValueError("rk4_integrate needs dt > 0")
    if t < 0:
        raise ValueError("rk4_integrate needs t >= 0")
    y = np.array(y0, dtype=float)
    if t == 0:
        return y
    n = max(1, math.ceil(t / dt))
    h = t / n
    s = 0.0
    for _ in range(n):
        k1 = rhs(s, y)
        k2 = rhs(s + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(s + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(s + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        s += h
    return y
