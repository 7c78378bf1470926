"""Closed-form covariance propagation, unitary and dissipative.

Conventions, fixed here once:

* quadrature ordering r = (x1, p1, x2, p2), symplectic form ``OMEGA``
  (re-exported from numerics so every module shares one copy);
* unitary flow S(t) = exp(OMEGA H t) acting by congruence,
  sigma(t) = S sigma0 S^T;
* dissipative flow dsigma/dt = A sigma + sigma A^T + D with drift
  A = OMEGA H - Gamma/2 and diffusion D = Gamma_bar, solved in closed
  form by

      sigma(t) = K(t) [sigma0 + integral_0^t K(-tau) D K(-tau)^T dtau] K(t)^T,

  where K(t) = exp(A t). The independent check of that formula is plain
  RK4 on the differential form; both routes are public API on purpose.

Trajectories through the supercritical regime grow exponentially. They
are allowed to, but a trajectory stops early (with a warning) once any
covariance entry passes ``SIGMA_OVERFLOW_LIMIT`` or once the entanglement
observables stop being computable in double precision; callers detect
this by the returned record count.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .model import HamiltonianMatrix, OscillatorPair, build_hamiltonian, diagonal_hamiltonian, diagonalizer_params, diagonalizing_symplectic
from .numerics import OMEGA, integrate_matrix, mat_exp
from .states import NumericalInconsistencyError, nu_minus_pt, purity, seralian

__all__ = [
    "OMEGA",
    "SIGMA_OVERFLOW_LIMIT",
    "DissipationSpec",
    "TrajectoryRecord",
    "unitary_propagator",
    "evolve_unitary",
    "elliptical_mode_propagator",
    "mach_zehnder_residual",
    "drift_and_diffusion",
    "evolve_dissipative",
    "entanglement_trajectory",
    "death_time",
]

# Hard stop for unstable trajectories; the instability itself is physical
# but there is nothing meaningful to record past this magnitude.
SIGMA_OVERFLOW_LIMIT = 1e12

# Quadrature panels per unit time for the dissipative noise integral.
STEPS_PER_UNIT_TIME = 1000

# Upper bound accepted for purity before a row is declared unrepresentable
# (purity of a physical state never exceeds 1; the slack is roundoff).
PURITY_CEILING = 1.0 + 1e-9


@dataclass(frozen=True)
class DissipationSpec:
    """Per-mode environment coupling rates and bath occupations."""

    gamma1: float
    gamma2: float
    nbar1: float = 0.0
    nbar2: float = 0.0

    def __post_init__(self) -> None:
        for name in ("gamma1", "gamma2", "nbar1", "nbar2"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be >= 0 and finite, got {v}")


@dataclass(frozen=True)
class TrajectoryRecord:
    """One sampled point of an entanglement trajectory."""

    t: float
    log_negativity: float
    seralian: float
    nu_minus: float
    purity: float
    sigma: Optional[np.ndarray] = None


def _require_time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t):
        raise ValueError(f"time must be finite, got {t}")
    return t


def _symmetrize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.T)


def unitary_propagator(hmat: HamiltonianMatrix, t: float) -> np.ndarray:
    """S(t) = exp(OMEGA H t), the symplectic flow of the closed system."""
    t = _require_time(t)
    return mat_exp(OMEGA @ hmat.mode_wise * t)


def evolve_unitary(sigma0: np.ndarray, hmat: HamiltonianMatrix, t: float) -> np.ndarray:
    """Propagate a covariance matrix through the closed-system flow."""
    s = unitary_propagator(hmat, t)
    return _symmetrize(s @ np.asarray(sigma0, dtype=float) @ s.T)


def elliptical_mode_propagator(alpha_sq: float, beta_sq: float, t: float) -> np.ndarray:
    """Quadrature flow of a single mode with energy (alpha^2 x^2 + beta^2 p^2)/2.

    Three branches depending on the sign of the position coefficient:

    * alpha_sq > 0: rotation along an ellipse,
      [[cos(wt), -(beta/alpha) sin(wt)], [(alpha/beta) sin(wt), cos(wt)]]
      with w = alpha*beta;
    * alpha_sq = 0: free particle, shear [[1, -beta_sq*t], [0, 1]];
    * alpha_sq < 0: inverted potential, the cosh/sinh continuation of the
      rotation (each orbit squeezes without bound).

    All branches are the analytic continuation of one matrix function and
    have determinant 1. The direction convention is the one above; the
    inverse flow is the same matrix at -t, which is what the factorization
    identity in mach_zehnder_residual consumes.
    """
    t = _require_time(t)
    if not (beta_sq > 0 and math.isfinite(beta_sq)):
        raise ValueError(f"beta_sq must be positive, got {beta_sq}")
    if not math.isfinite(alpha_sq):
        raise ValueError(f"alpha_sq must be finite, got {alpha_sq}")
    if alpha_sq > 0:
        w = math.sqrt(alpha_sq * beta_sq)
        c, s = math.cos(w * t), math.sin(w * t)
        return np.array([[c, -beta_sq * s / w], [alpha_sq * s / w, c]])
    if alpha_sq == 0:
        return np.array([[1.0, -beta_sq * t], [0.0, 1.0]])
    w = math.sqrt(-alpha_sq * beta_sq)
    ch, sh = math.cosh(w * t), math.sinh(w * t)
    return np.array([[ch, -beta_sq * sh / w], [alpha_sq * sh / w, ch]])


def _embed_modes(m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    out = np.zeros((4, 4))
    out[:2, :2] = m1
    out[2:, 2:] = m2
    return out


def mach_zehnder_residual(omega: float, g: float, t: float) -> float:
    """Residual of the beam-splitter factorization of the resonant flow.

    At resonance the coupled evolution factorizes through a 50:50 beam
    splitter into independent single-mode arms,

        S(t) = S_T^(-1) [arm_minus(t) + arm_plus(t)] S_T,

    with the '-' arm on mode 1 and each arm the elliptical propagator of
    the corresponding decoupled mode, evaluated at -t (the arm matrices
    follow the opposite direction convention; -t is their forward flow
    here, and the residual test below pins that choice). Returns the
    operator-norm difference between the two sides.
    """
    if not (omega > 0 and math.isfinite(omega)):
        raise ValueError(f"omega must be positive, got {omega}")
    if not (g >= 0 and math.isfinite(g)):
        raise ValueError(f"g must be >= 0, got {g}")
    t = _require_time(t)
    osc = OscillatorPair(omega, omega, g)
    hmat = build_hamiltonian(osc)
    direct = unitary_propagator(hmat, t)
    params = diagonalizer_params(osc, allow_uncoupled=True)
    splitter = diagonalizing_symplectic(params, osc)
    mode_plus, mode_minus = diagonal_hamiltonian(osc)
    arm_minus = elliptical_mode_propagator(mode_minus.x_coeff, mode_minus.p_coeff, -t)
    arm_plus = elliptical_mode_propagator(mode_plus.x_coeff, mode_plus.p_coeff, -t)
    factored = np.linalg.inv(splitter) @ _embed_modes(arm_minus, arm_plus) @ splitter
    return float(np.linalg.norm(direct - factored, 2))


def drift_and_diffusion(hmat: HamiltonianMatrix, d: DissipationSpec) -> tuple[np.ndarray, np.ndarray]:
    """Drift A = OMEGA H - Gamma/2 and diffusion D = Gamma_bar.

    Gamma couples each mode to its bath at rate gamma_j; Gamma_bar scales
    each rate by the bath's symmetrized occupation nbar_j + 1/2.
    """
    gamma = np.diag([d.gamma1, d.gamma1, d.gamma2, d.gamma2])
    gamma_bar = np.diag(
        [
            d.gamma1 * (d.nbar1 + 0.5),
            d.gamma1 * (d.nbar1 + 0.5),
            d.gamma2 * (d.nbar2 + 0.5),
            d.gamma2 * (d.nbar2 + 0.5),
        ]
    )
    drift = OMEGA @ hmat.mode_wise - 0.5 * gamma
    return drift, gamma_bar


def _noise_steps(t: float) -> int:
    n = max(8, math.ceil(STEPS_PER_UNIT_TIME * t))
    return n + (n % 2)


def evolve_dissipative(
    sigma0: np.ndarray,
    hmat: HamiltonianMatrix,
    d: DissipationSpec,
    t: float,
    steps: Optional[int] = None,
) -> np.ndarray:
    """Closed-form solution of the damped covariance equation of motion.

    sigma(t) = K(t) [sigma0 + integral_0^t K(-tau) D K(-tau)^T dtau] K(t)^T
    with K(t) = exp(A t). The integral is done by composite Simpson
    (``steps`` panels, default 1000 per unit time), which keeps the
    quadrature error orders of magnitude below the 1e-6 agreement the
    RK4 cross-check demands.
    """
    t = _require_time(t)
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    sig = np.array(sigma0, dtype=float)
    if sig.shape != (4, 4):
        raise ValueError(f"covariance matrix must be 4x4, got shape {sig.shape}")
    if t == 0:
        return sig
    drift, diff = drift_and_diffusion(hmat, d)
    n = _noise_steps(t) if steps is None else int(steps)

    def integrand(tau: float) -> np.ndarray:
        q = mat_exp(-drift * tau)
        return q @ diff @ q.T

    noise = integrate_matrix(integrand, 0.0, t, n)
    k = mat_exp(drift * t)
    return _symmetrize(k @ (sig + noise) @ k.T)


class _TrajectoryStop(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def _record_point(t: float, sigma: np.ndarray, keep_sigma: bool) -> TrajectoryRecord:
    if float(np.abs(sigma).max()) > SIGMA_OVERFLOW_LIMIT:
        raise _TrajectoryStop("covariance entries exceeded the overflow guard")
    try:
        delta = seralian(sigma)
        nu = nu_minus_pt(sigma)
        pur = purity(sigma)
    except NumericalInconsistencyError as exc:
        raise _TrajectoryStop(str(exc)) from exc
    if nu <= 0.0:
        raise _TrajectoryStop("PT symplectic eigenvalue collapsed to zero")
    if not (0.0 < pur <= PURITY_CEILING):
        raise _TrajectoryStop(f"purity {pur} left (0, 1]; precision exhausted")
    log_neg = max(0.0, -math.log(2.0 * nu))
    if not all(map(math.isfinite, (delta, nu, pur, log_neg))):
        raise _TrajectoryStop("non-finite observable")
    return TrajectoryRecord(
        t=t,
        log_negativity=log_neg,
        seralian=delta,
        nu_minus=nu,
        purity=pur,
        sigma=sigma.copy() if keep_sigma else None,
    )


def entanglement_trajectory(
    sigma0: np.ndarray,
    hmat: HamiltonianMatrix,
    t_grid: Sequence[float],
    dissipation: Optional[DissipationSpec] = None,
    keep_sigma: bool = False,
) -> list[TrajectoryRecord]:
    """Entanglement observables sampled along a time grid.

    Without a DissipationSpec every point is an independent closed-form
    unitary evaluation. With one, the closed-form dissipative solution is
    stepped between grid points (the step kernel and its noise integral
    are cached per step size, so uniform grids cost one matrix exponential
    per distinct spacing).

    A trajectory that leaves the numerically representable range stops
    early with a warning; the returned list is then shorter than the
    grid. Records are always ordered by t.
    """
    grid = [_require_time(x) for x in t_grid]
    if not grid:
        raise ValueError("empty time grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("time grid must be strictly increasing")
    sig0 = np.array(sigma0, dtype=float)
    records: list[TrajectoryRecord] = []

    if dissipation is None:
        gen = OMEGA @ hmat.mode_wise
        for t in grid:
            s = mat_exp(gen * t)
            sigma = _symmetrize(s @ sig0 @ s.T)
            try:
                records.append(_record_point(t, sigma, keep_sigma))
            except _TrajectoryStop as stop:
                warnings.warn(f"trajectory stopped at t={t}: {stop.reason}")
                break
        return records

    if grid[0] < 0:
        raise ValueError("dissipative trajectories need t >= 0")
    drift, diff = drift_and_diffusion(hmat, dissipation)
    kernel_cache: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    def kernel(dt: float) -> tuple[np.ndarray, np.ndarray]:
        hit = kernel_cache.get(dt)
        if hit is None:
            def integrand(tau: float) -> np.ndarray:
                q = mat_exp(-drift * tau)
                return q @ diff @ q.T

            k = mat_exp(drift * dt)
            noise = integrate_matrix(integrand, 0.0, dt, _noise_steps(dt))
            hit = (k, noise)
            kernel_cache[dt] = hit
        return hit

    sigma = sig0 if grid[0] == 0 else evolve_dissipative(sig0, hmat, dissipation, grid[0])
    prev_t = grid[0]
    for i, t in enumerate(grid):
        if i > 0:
            k, noise = kernel(t - prev_t)
            sigma = _symmetrize(k @ (sigma + noise) @ k.T)
            prev_t = t
        try:
            records.append(_record_point(t, sigma, keep_sigma))
        except _TrajectoryStop as stop:
            warnings.warn(f"trajectory stopped at t={t}: {stop.reason}")
            break
    return records


def death_time(
    sigma0: np.ndarray,
    hmat: HamiltonianMatrix,
    d: DissipationSpec,
    t_max: float,
    tol: float = 1e-6,
    dt: float = 0.01,
) -> Optional[float]:
    """First zero of E_N after its global maximum, or None.

    Scans a uniform grid of spacing ~dt up to t_max, locates the global
    maximum of E_N, then bisects the first bracketing interval where E_N
    returns to zero. Grazing zeros resolve to the earliest crossing since
    the scan takes the first non-positive sample after the maximum.

    Returns None when E_N never rises above zero or has not died by
    t_max (including the unitary gamma = 0 case, where it never dies).
    """
    if not (t_max > 0 and math.isfinite(t_max)):
        raise ValueError(f"t_max must be positive, got {t_max}")
    if not (tol > 0 and dt > 0):
        raise ValueError("tol and dt must be positive")
    n = max(1, math.ceil(t_max / dt))
    h = t_max / n
    grid = [k * h for k in range(n + 1)]
    records = entanglement_trajectory(sigma0, hmat, grid, dissipation=d)
    if not records:
        return None
    en = [r.log_negativity for r in records]
    peak = max(range(len(en)), key=en.__getitem__)
    if en[peak] <= 0.0:
        return None
    dead = next((j for j in range(peak + 1, len(en)) if en[j] <= 0.0), None)
    if dead is None:
        return None

    def alive(t: float) -> bool:
        sigma = evolve_dissipative(sigma0, hmat, d, t)
        return nu_minus_pt(sigma) < 0.5

    lo, hi = records[dead - 1].t, records[dead].t
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if alive(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
