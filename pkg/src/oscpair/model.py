"""Two coupled oscillators: Hamiltonian assembly and normal-mode analysis.

The system is a pair of harmonic oscillators with a bilinear x1*x2
coupling of strength g. In the block quadrature basis R = (x1, x2, p1, p2)
the Hamiltonian matrix is

    H = [[omega1, g,      0,      0     ],
         [g,      omega2, 0,      0     ],
         [0,      0,      omega1, 0     ],
         [0,      0,      0,      omega2]]

so the energy reads (1/2) R^T H R. Internally everything uses the
mode-wise ordering r = (x1, p1, x2, p2); the permutation between the two
orderings lives here and nowhere else.

The coupling g_c = sqrt(omega1*omega2) separates a stable regime (both
normal modes oscillate) from an unstable one (the soft mode sits in an
inverted potential). At g = g_c the soft mode is a free particle.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .numerics import OMEGA, mat_exp

__all__ = [
    "OscillatorPair",
    "HamiltonianMatrix",
    "Regime",
    "DiagonalizerParams",
    "ModeHamiltonian",
    "HookianSpec",
    "DegenerateCouplingError",
    "BLOCK_TO_MODEWISE",
    "build_hamiltonian",
    "critical_coupling",
    "normal_mode_energies_sq",
    "symplectic_frequencies",
    "classify_regime",
    "diagonalizer_params",
    "diagonalizing_symplectic",
    "diagonal_hamiltonian",
    "hookian_reduce",
]

# Relative width of the band around g_c that is reported as critical.
REGIME_TOLERANCE = 1e-9

# Permutation P with r = P R, mapping the block ordering (x1, x2, p1, p2)
# to the mode-wise ordering (x1, p1, x2, p2).
BLOCK_TO_MODEWISE = np.zeros((4, 4))
BLOCK_TO_MODEWISE[0, 0] = 1.0
BLOCK_TO_MODEWISE[1, 2] = 1.0
BLOCK_TO_MODEWISE[2, 1] = 1.0
BLOCK_TO_MODEWISE[3, 3] = 1.0
BLOCK_TO_MODEWISE.setflags(write=False)


class DegenerateCouplingError(ValueError):
    """Raised when a diagonalizing transform is requested at g = 0."""


@dataclass(frozen=True)
class OscillatorPair:
    """Bare frequencies and coupling rate, all in units of omega2.

    omega2 = 1 is the conventional choice in the CLI but the library
    accepts any positive pair.
    """

    omega1: float
    omega2: float
    g: float

    def __post_init__(self) -> None:
        if not (self.omega1 > 0 and math.isfinite(self.omega1)):
            raise ValueError(f"omega1 must be positive and finite, got {self.omega1}")
        if not (self.omega2 > 0 and math.isfinite(self.omega2)):
            raise ValueError(f"omega2 must be positive and finite, got {self.omega2}")
        if not (self.g >= 0 and math.isfinite(self.g)):
            raise ValueError(f"g must be non-negative and finite, got {self.g}")


class HamiltonianMatrix:
    """4x4 symmetric Hamiltonian matrix, exposed in both orderings."""

    def __init__(self, mode_wise: np.ndarray):
        arr = np.array(mode_wise, dtype=float)
        if arr.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {arr.shape}")
        if not np.array_equal(arr, arr.T):
            raise ValueError("Hamiltonian matrix must be exactly symmetric")
        arr.setflags(write=False)
        self._mode_wise = arr

    @property
    def mode_wise(self) -> np.ndarray:
        """H in the (x1, p1, x2, p2) ordering used by the propagators."""
        return self._mode_wise

    @property
    def block(self) -> np.ndarray:
        """H in the (x1, x2, p1, p2) ordering, x-block and p-block stacked."""
        p = BLOCK_TO_MODEWISE
        out = p.T @ self._mode_wise @ p
        out.setflags(write=False)
        return out

    def __repr__(self) -> str:
        return f"HamiltonianMatrix({self._mode_wise.tolist()!r})"


class Regime(enum.Enum):
    SUBCRITICAL = "Subcritical"
    CRITICAL = "Critical"
    SUPERCRITICAL = "Supercritical"


@dataclass(frozen=True)
class DiagonalizerParams:
    """Mixing parameters (A, B) of the normal-mode transform.

    c and s cache cos(sqrt(A*B)) and sin(sqrt(A*B)). The defining
    conditions are A/B = omega2/omega1 and
    tan(2 sqrt(A*B)) = 2 g g_c / (omega1^2 - omega2^2).
    """

    A: float
    B: float
    c: float
    s: float


@dataclass(frozen=True)
class ModeHamiltonian:
    """Single normal mode, energy (1/2)(p_coeff p^2 + x_coeff x^2)."""

    label: str
    p_coeff: float
    x_coeff: float


@dataclass(frozen=True)
class HookianSpec:
    """Classical mass-and-spring pair with coupling spring rate g_hook."""

    m: float
    omega: float
    g_hook: float

    def __post_init__(self) -> None:
        for name in ("m", "omega", "g_hook"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be positive and finite, got {v}")


def build_hamiltonian(osc: OscillatorPair) -> HamiltonianMatrix:
    """Assemble the 4x4 Hamiltonian matrix for the coupled pair."""
    block = np.array(
        [
            [osc.omega1, osc.g, 0.0, 0.0],
            [osc.g, osc.omega2, 0.0, 0.0],
            [0.0, 0.0, osc.omega1, 0.0],
            [0.0, 0.0, 0.0, osc.omega2],
        ]
    )
    p = BLOCK_TO_MODEWISE
    return HamiltonianMatrix(p @ block @ p.T)


def critical_coupling(osc: OscillatorPair) -> float:
    """Coupling at which the soft normal mode loses its restoring force."""
    return math.sqrt(osc.omega1 * osc.omega2)


def normal_mode_energies_sq(osc: OscillatorPair) -> tuple[float, float]:
    """Squared normal-mode energies (E+^2, E-^2).

    E-^2 goes negative beyond the critical coupling; it is returned as a
    signed real rather than a complex energy. Note these carry a factor
    2 relative to the squared normal frequencies: nu_pm^2 = E_pm^2 / 2
    (see symplectic_frequencies, which is the independent route).
    """
    s = osc.omega1**2 + osc.omega2**2
    root = math.sqrt(s * s + 4.0 * osc.omega1 * osc.omega2 * (osc.g**2 - osc.omega1 * osc.omega2))
    return s + root, s - root


def symplectic_frequencies(hmat: HamiltonianMatrix) -> tuple[float, float]:
    """Normal frequencies from the eigenvalues of the drift matrix OMEGA H.

    Returns (nu_plus, nu_minus_sq). The hard mode always oscillates, so
    nu_plus is returned as a frequency. The soft branch is reported as a
    signed square: positive for an oscillating mode (eigenvalues +-i nu),
    negative when the drift matrix has a real pair +-kappa (then
    nu_minus_sq = -kappa^2).

    This route never touches the closed-form energy expression, which is
    what makes it usable as a cross-check of that formula.
    """
    eig = np.linalg.eigvals(OMEGA @ hmat.mode_wise)
    order = np.argsort(np.abs(eig))
    soft = eig[order[:2]]
    hard = eig[order[2:]]
    # For the soft pair the imaginary/real character decides the sign.
    # Im^2 - Re^2 is smooth through the transition, where rounding makes
    # the computed eigenvalues slightly complex on both sides.
    lam = soft[np.argmax(np.abs(soft))]
    nu_minus_sq = lam.imag**2 - lam.real**2
    nu_plus = float(np.mean(np.abs(hard)))
    return nu_plus, float(nu_minus_sq)


def classify_regime(osc: OscillatorPair) -> Regime:
    """Subcritical, critical or supercritical, with a relative band.

    The band |g - g_c| <= 1e-9 g_c is reported as critical since the
    exact point is a measure-zero set in parameter space.
    """
    gc = critical_coupling(osc)
    if osc.g < gc * (1.0 - REGIME_TOLERANCE):
        return Regime.SUBCRITICAL
    if osc.g > gc * (1.0 + REGIME_TOLERANCE):
        return Regime.SUPERCRITICAL
    return Regime.CRITICAL


def diagonalizer_params(osc: OscillatorPair, allow_uncoupled: bool = False) -> DiagonalizerParams:
    """Mixing parameters of the transform that decouples the two modes.

    The two defining conditions are A/B = omega2/omega1 together with
    tan(2 sqrt(A*B)) = 2 g g_c / (omega1^2 - omega2^2); the branch is
    2 sqrt(A*B) in (0, pi/2] for omega1 >= omega2, which continues into
    (pi/2, pi) when omega1 < omega2 so that A and B stay positive. At
    resonance this lands on A = B = pi/4, a 50:50 beam splitter.

    g = 0 has nothing to diagonalize; by default that is an error, but
    allow_uncoupled=True returns the identity parameters (A = B = 0).
    """
    if osc.g == 0:
        if allow_uncoupled:
            return DiagonalizerParams(A=0.0, B=0.0, c=1.0, s=0.0)
        raise DegenerateCouplingError(
            "no coupling to diagonalize at g = 0; pass allow_uncoupled=True for the identity"
        )
    gc = critical_coupling(osc)
    phi = math.atan2(2.0 * osc.g * gc, osc.omega1**2 - osc.omega2**2)
    half = 0.5 * phi  # sqrt(A*B)
    ratio = math.sqrt(osc.omega2 / osc.omega1)
    return DiagonalizerParams(
        A=half * ratio,
        B=half / ratio,
        c=math.cos(half),
        s=math.sin(half),
    )


def diagonalizing_symplectic(params: DiagonalizerParams, osc: OscillatorPair) -> np.ndarray:
    """4x4 symplectic representation of the mode-mixing transform.

    Built as mat_exp of the quadrature generator of A x1 p2 - B x2 p1,
    which in the mode-wise ordering reads

        L = [[0, 0, -B, 0],
             [0, 0, 0, -A],
             [A, 0, 0,  0],
             [0, B, 0,  0]].

    The result S is block-diagonal in the (x1, x2 | p1, p2) basis with
    S_p^T = S_x^(-1), and the congruence S^T H S is the diagonalized
    Hamiltonian (that orientation is fixed by the tests).
    """
    expected = diagonalizer_params(osc, allow_uncoupled=True)
    scale = max(1.0, abs(expected.A), abs(expected.B))
    if abs(params.A - expected.A) > 1e-9 * scale or abs(params.B - expected.B) > 1e-9 * scale:
        raise ValueError(
            "diagonalizer params inconsistent with the oscillator pair: "
            f"got (A={params.A}, B={params.B}), expected (A={expected.A}, B={expected.B})"
        )
    a, b = params.A, params.B
    gen = np.array(
        [
            [0.0, 0.0, -b, 0.0],
            [0.0, 0.0, 0.0, -a],
            [a, 0.0, 0.0, 0.0],
            [0.0, b, 0.0, 0.0],
        ]
    )
    return mat_exp(gen)


def diagonal_hamiltonian(osc: OscillatorPair) -> tuple[ModeHamiltonian, ModeHamiltonian]:
    """Coefficient pairs of the decoupled '+' and '-' modes.

    Each mode contributes (1/2)(p_coeff p^2 + x_coeff x^2). The momentum
    coefficients stay at the bare frequencies; the position coefficients
    are normalized so the pair reproduces the congruence-transformed
    Hamiltonian exactly (tested against the numerical transform). At
    resonance they reduce to x_coeff = g_c +- g with p_coeff = omega.
    """
    w1, w2, g = osc.omega1, osc.omega2, osc.g
    gc = critical_coupling(osc)
    p = diagonalizer_params(osc, allow_uncoupled=True)
    c2, s2, cs = p.c * p.c, p.s * p.s, p.c * p.s
    x_plus = c2 * w1 + s2 * w2 * w2 / w1 + 2.0 * g * gc * cs / w1
    x_minus = c2 * w2 + s2 * w1 * w1 / w2 - 2.0 * g * gc * cs / w2
    return (
        ModeHamiltonian(label="+", p_coeff=w1, x_coeff=x_plus),
        ModeHamiltonian(label="-", p_coeff=w2, x_coeff=x_minus),
    )


def hookian_reduce(spec: HookianSpec) -> tuple[float, float, float]:
    """Reduce a classical spring-coupled pair to the quadratic-coupling form.

    Completing the square in the spring coupling renormalizes the bare
    frequency to omega0 = sqrt(omega^2 + g_hook^2) and leaves a bilinear
    coupling with dimensionless strength G = g_hook^2 / (omega^2 + g_hook^2),
    so the x1 x2 coefficient has magnitude g_effective = omega0 G / 2.

    G < 1 for every finite g_hook, which keeps g_effective strictly below
    the critical coupling omega0 of the renormalized pair: a passive
    spring network cannot reach the unstable regime.
    """
    w2 = spec.omega**2
    gh2 = spec.g_hook**2
    omega0 = math.sqrt(w2 + gh2)
    G = gh2 / (w2 + gh2)
    g_effective = 0.5 * omega0 * G
    return omega0, G, g_effective
