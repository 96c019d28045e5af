"""Fourier-transform interferometer with a linear phase gradient, used as a
single-photon phase sensor whose signal is the permanent of the whole map."""
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .fock import permanent_ryser

SINGULAR_TOL = 1e-8
RYSER_MAX_N = 8


@dataclass(frozen=True)
class QuftiParams:
    n: int
    phi: float
    dephasing_var: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("n must be >= 1")
        if self.dephasing_var < 0:
            raise ParameterError("dephasing variance must be non-negative")


def _dft(n):
    # 1-based indices with the negative exponent; the closed form below
    # depends on this choice through a diagonal phase similarity
    j = np.arange(1, n + 1)
    return np.exp(-2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)


def qufti_unitary_product(n, phi):
    """Explicit DFT . phase-gradient . inverse-DFT product."""
    V = _dft(n)
    ramp = np.exp(1j * phi * np.arange(n))
    return (V * ramp) @ V.conj().T


def qufti_unitary(n, phi):
    """Closed-form interferometer matrix; falls back to the product near poles."""
    j = np.arange(n)
    denom = np.exp(2j * np.pi * (j[:, None] - j[None, :]) / n) - np.exp(1j * phi)
    if np.min(np.abs(denom)) < SINGULAR_TOL:
        return qufti_unitary_product(n, phi)
    return (1.0 - np.exp(1j * n * phi)) / (n * denom)


def conjectured_permanent(n, phi):
    """Product formula for the permanent of the interferometer matrix."""
    z = np.exp(1j * n * phi)
    j = np.arange(1, n)
    return complex(np.prod(j * z + n - j) / float(n) ** (n - 1))


def _coefficients(n):
    j = np.arange(1, n, dtype=float)
    return 2 * j * (n - j), n ** 2 - 2 * j * n + 2 * j ** 2


def dephasing_factor(n, dephasing_var):
    return float(np.exp(-(n ** 2) * dephasing_var / 2.0))


def coincidence_prob(n, phi, dephasing_var=0.0):
    """Probability that every output mode registers exactly one photon.

    Each factor is written as 1 - a(1 - D cos n phi)/n^2, which keeps
    1 - P accurate near phi = 0.
    """
    a, _ = _coefficients(n)
    D = dephasing_factor(n, dephasing_var)
    gap = (1.0 - D) + D * 2.0 * np.sin(n * phi / 2.0) ** 2  # 1 - D cos(n phi)
    return float(np.exp(np.sum(np.log1p(-a * gap / n ** 2))))


def coincidence_prob_numeric(n, phi, ryser_max_n=RYSER_MAX_N):
    """|Per|^2 by Ryser up to ``ryser_max_n``, by the product formula above."""
    if n <= ryser_max_n:
        return float(abs(permanent_ryser(qufti_unitary(n, phi))) ** 2)
    return float(abs(conjectured_permanent(n, phi)) ** 2)


def _one_minus_prob(n, phi, dephasing_var):
    a, _ = _coefficients(n)
    D = dephasing_factor(n, dephasing_var)
    gap = (1.0 - D) + D * 2.0 * np.sin(n * phi / 2.0) ** 2
    return float(-np.expm1(np.sum(np.log1p(-a * gap / n ** 2))))


@dataclass(frozen=True)
class Sensitivity:
    P: float
    dP_dphi: float
    delta_phi: float
    reason: str = ""


def signal_and_sensitivity(params):
    """Signal P, slope |dP/dphi| and phase uncertainty sqrt(P - P^2)/|dP/dphi|.

    Where the slope vanishes the uncertainty is returned as inf with a reason.
    """
    n, phi, var = params.n, params.phi, params.dephasing_var
    P = coincidence_prob(n, phi, var)
    if n < 2:
        return Sensitivity(P, 0.0, float("inf"), "n=1 has a constant signal")
    a, b = _coefficients(n)
    D = dephasing_factor(n, var)
    c = np.cos(n * phi)
    slope = n * P * abs(np.sin(n * phi)) * D * np.sum(np.abs(a / (a * D * c + b)))
    q = _one_minus_prob(n, phi, var)
    if slope == 0.0 or not np.isfinite(slope):
        return Sensitivity(P, float(slope), float("inf"), "zero slope at a signal extremum")
    return Sensitivity(P, float(slope), float(np.sqrt(max(P * q, 0.0)) / slope))


def small_angle_sensitivity(n):
    if n < 2:
        raise ParameterError("n must be >= 2")
    return float(np.sqrt(3.0 / (2.0 * n * (n + 1) * (n - 1))))


def orc_baselines(n):
    """Resource count and the shot-noise and Heisenberg limits for it."""
    if n < 2:
        raise ParameterError("n must be >= 2")
    N = 1 + n * (n - 1) // 2
    return N, 1.0 / np.sqrt(N), 1.0 / N
