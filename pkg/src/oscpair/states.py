"""Two-mode Gaussian states at the covariance level.

A zero-mean Gaussian state is a 4x4 symmetric covariance matrix of
symmetrized quadrature second moments in the mode-wise ordering
(x1, p1, x2, p2), with the vacuum at sigma = I/2. Entanglement between
the modes is measured through the partial-transpose symplectic
eigenvalue, which only needs the three 2x2 blocks

    sigma = [[sigma1, gamma],
             [gamma^T, sigma2]].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import OMEGA

__all__ = [
    "ThermalSpec",
    "NumericalInconsistencyError",
    "PhysicalityCheck",
    "thermal_covariance",
    "covariance_blocks",
    "seralian",
    "nu_minus_pt",
    "log_negativity",
    "purity",
    "symplectic_eigenvalues",
    "check_physical",
]

# States are physical iff both symplectic eigenvalues reach the vacuum
# floor of 1/2; the slack absorbs roundoff in long propagations.
PHYSICALITY_TOLERANCE = 1e-9

# How far below zero the PT discriminant may dip before it stops looking
# like roundoff and starts looking like a corrupted state.
DISCRIMINANT_TOLERANCE = 1e-12


class NumericalInconsistencyError(RuntimeError):
    """A covariance matrix produced values no physical state can have.

    Raised when determinants or eigenvalue combinations come out with
    impossible signs, which in practice means precision was exhausted
    somewhere upstream (typically deep in an unstable trajectory).
    """


@dataclass(frozen=True)
class ThermalSpec:
    """Mean excitation numbers of a product thermal state."""

    eta1: float
    eta2: float

    def __post_init__(self) -> None:
        if not (self.eta1 >= 0 and math.isfinite(self.eta1)):
            raise ValueError(f"eta1 must be >= 0, got {self.eta1}")
        if not (self.eta2 >= 0 and math.isfinite(self.eta2)):
            raise ValueError(f"eta2 must be >= 0, got {self.eta2}")

    @classmethod
    def from_delta(cls, delta1: float, delta2: float) -> "ThermalSpec":
        """Build from the Boltzmann exponents delta_j = omega_j / (kB T_j)."""
        if delta1 <= 0 or delta2 <= 0:
            raise ValueError("Boltzmann exponents must be positive")
        return cls(
            eta1=1.0 / math.expm1(delta1),
            eta2=1.0 / math.expm1(delta2),
        )


@dataclass(frozen=True)
class PhysicalityCheck:
    is_physical: bool
    nu_min: float
    nu_max: float


def _as_covariance(sigma: np.ndarray) -> np.ndarray:
    arr = np.asarray(sigma, dtype=float)
    if arr.shape != (4, 4):
        raise ValueError(f"covariance matrix must be 4x4, got shape {arr.shape}")
    return arr


def thermal_covariance(spec: ThermalSpec) -> np.ndarray:
    """Product thermal state, (eta_j + 1/2) I per mode."""
    v1 = spec.eta1 + 0.5
    v2 = spec.eta2 + 0.5
    return np.diag([v1, v1, v2, v2])


def covariance_blocks(sigma: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split sigma into (sigma1, sigma2, gamma) single-mode and cross blocks."""
    arr = _as_covariance(sigma)
    return arr[:2, :2], arr[2:, 2:], arr[:2, 2:]


def _det2(m: np.ndarray) -> float:
    return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]


def seralian(sigma: np.ndarray) -> float:
    """Det sigma1 + Det sigma2 - 2 Det gamma.

    The sign on the cross term is the partial-transpose-adapted one, so
    this is the quantity whose growth tracks entanglement directly.
    """
    s1, s2, gam = covariance_blocks(sigma)
    return _det2(s1) + _det2(s2) - 2.0 * _det2(gam)


def nu_minus_pt(sigma: np.ndarray) -> float:
    """Smallest symplectic eigenvalue of the partially transposed state.

    nu = sqrt((Delta - sqrt(Delta^2 - 4 Det sigma)) / 2) with Delta the
    seralian. Separability of the 1x1-mode split is equivalent to
    nu >= 1/2.
    """
    arr = _as_covariance(sigma)
    delta = seralian(arr)
    disc = delta * delta - 4.0 * float(np.linalg.det(arr))
    if disc < -DISCRIMINANT_TOLERANCE:
        raise NumericalInconsistencyError(
            f"PT discriminant {disc} is negative beyond roundoff; "
            "the covariance matrix is unphysical"
        )
    nu_sq = 0.5 * (delta - math.sqrt(max(disc, 0.0)))
    if nu_sq < -DISCRIMINANT_TOLERANCE:
        raise NumericalInconsistencyError(
            f"squared PT eigenvalue {nu_sq} is negative beyond roundoff; "
            "the covariance matrix is unphysical"
        )
    return math.sqrt(max(nu_sq, 0.0))


def log_negativity(sigma: np.ndarray) -> float:
    """E_N = max(0, -ln(2 nu)) with nu the smallest PT symplectic eigenvalue.

    Natural logarithm, so a two-mode squeezed state with squeezing r has
    E_N = 2r exactly.
    """
    nu = nu_minus_pt(sigma)
    if nu <= 0.0:
        raise NumericalInconsistencyError(
            "PT symplectic eigenvalue collapsed to zero; log-negativity undefined"
        )
    return max(0.0, -math.log(2.0 * nu))


def purity(sigma: np.ndarray) -> float:
    """Tr rho^2 = 1 / (4 sqrt(Det sigma)), normalized so vacuum gives 1."""
    arr = _as_covariance(sigma)
    det = float(np.linalg.det(arr))
    if det <= 0.0:
        raise NumericalInconsistencyError(
            f"covariance determinant {det} is not positive; purity undefined"
        )
    return 1.0 / (4.0 * math.sqrt(det))


def symplectic_eigenvalues(sigma: np.ndarray) -> tuple[float, float]:
    """Both symplectic eigenvalues of sigma, ascending.

    These are the moduli of the eigenvalues of OMEGA sigma, which come in
    conjugate imaginary pairs for any positive definite sigma.
    """
    arr = _as_covariance(sigma)
    mods = np.sort(np.abs(np.linalg.eigvals(OMEGA @ arr)))
    return float(0.5 * (mods[0] + mods[1])), float(0.5 * (mods[2] + mods[3]))


def check_physical(sigma: np.ndarray) -> PhysicalityCheck:
    """Uncertainty-principle check: both symplectic eigenvalues >= 1/2.

    The tolerance PHYSICALITY_TOLERANCE is subtracted from the floor so
    that states coming out of long but legitimate propagations do not
    get rejected for roundoff.
    """
    arr = _as_covariance(sigma)
    if not np.allclose(arr, arr.T, rtol=0.0, atol=1e-10 * max(1.0, float(np.abs(arr).max()))):
        raise ValueError("covariance matrix must be symmetric")
    nu_min, nu_max = symplectic_eigenvalues(arr)
    ok = nu_min >= 0.5 - PHYSICALITY_TOLERANCE
    return PhysicalityCheck(is_physical=bool(ok), nu_min=nu_min, nu_max=nu_max)
