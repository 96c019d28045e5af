"""Heralded SPDC sources: pair statistics, lossy heralding, multiplexing and
bunching baselines."""
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, lgamma, log

import numpy as np
from scipy.stats import binom

from .errors import ParameterError

SERIES_TOL = 1e-12


@dataclass(frozen=True)
class SpdcParams:
    r: float
    eta: float
    N: int
    n: int

    def __post_init__(self):
        if self.r < 0:
            raise ParameterError("squeezing r must be >= 0")
        if not 0.0 <= self.eta <= 1.0:
            raise ParameterError("eta must lie in [0, 1]")
        if not self.N >= self.n >= 0:
            raise ParameterError("need N >= n >= 0")


def spdc_pn(s, r):
    """Probability of s photon pairs from a source with squeezing r."""
    t2 = np.tanh(r) ** 2
    return float(t2 ** s / np.cosh(r) ** 2)


def detector_cond(t, s, eta):
    """Probability an efficiency-eta detector counts t of s photons."""
    if t > s or t < 0:
        return 0.0
    return float(binom.pmf(t, s, eta))


def herald_detect(t, r, eta, tol=SERIES_TOL):
    """Probability the herald detector reports t photons.

    The pair sum is cut where the remaining geometric tail tanh^(2S) r drops
    below ``tol``.
    """
    t2 = np.tanh(r) ** 2
    if t2 == 0.0:
        return 1.0 if t == 0 else 0.0
    s_max = max(t, int(np.ceil(np.log(tol) / np.log(t2))) if t2 < 1 else t + 10 ** 6)
    s = np.arange(t, s_max + 1)
    return float(np.sum(binom.pmf(t, s, eta) * t2 ** s) / np.cosh(r) ** 2)


def multiplex_prep_prob(params):
    """Probability that at least n of N parallel sources herald one photon."""
    if params.n == 0:
        return 1.0
    p1 = herald_detect(1, params.r, params.eta)
    return float(binom.sf(params.n - 1, params.N, p1))


def multiplex_crossing(n, r, eta, target=0.99, N_max=100000):
    """Smallest source count reaching ``target`` preparation probability."""
    p1 = herald_detect(1, r, eta)
    N = np.arange(n, N_max + 1)
    ok = np.nonzero(binom.sf(n - 1, N, p1) >= target)[0]
    return int(N[ok[0]]) if ok.size else None


@dataclass(frozen=True)
class HeraldFidelity:
    P_corr: float
    P_par: float
    asymptote: float


def herald_fidelity(r, eta, n, epsilon=None):
    """Probability a single herald click really means one photon, for one
    source and for n in parallel.

    ``asymptote`` is the large-n limit when eta is tied to a target
    probability by eta = epsilon^(1/n); it is None unless epsilon is given.
    """
    t2 = np.tanh(r) ** 2
    P_corr = (1.0 - (1.0 - eta) * t2) ** 2
    asym = None if epsilon is None else float(epsilon ** (2 * t2))
    return HeraldFidelity(float(P_corr), float(P_corr ** n), asym)


def parallel_fidelity_at_epsilon(r, epsilon, n):
    """Parallel heralding fidelity with the detector set to eta = epsilon^(1/n)."""
    return herald_fidelity(r, epsilon ** (1.0 / n), n).P_par


def post_prob(eta, n):
    return float(eta ** n)


@dataclass(frozen=True)
class EtaSolution:
    eta: float
    feasible: bool
    P_post: float


def eta_from_epsilon(epsilon_prime, r, n):
    """Detector efficiency giving parallel fidelity epsilon_prime, and the
    resulting post-selection probability. Infeasible when it would be < 0."""
    if r <= 0:
        raise ParameterError("r must be positive")
    eta = 1.0 + (epsilon_prime ** (1.0 / (2 * n)) - 1.0) / np.tanh(r) ** 2
    if eta < 0:
        return EtaSolution(float(eta), False, 0.0)
    return EtaSolution(float(eta), True, post_prob(eta, n))


def eta_from_epsilon_numeric(epsilon_prime, r, n):
    """Root of P_par(eta) = epsilon_prime by bracketed root finding (cross-check solver)."""
    from scipy.optimize import brentq
    f = lambda e: herald_fidelity(r, e, n).P_par - epsilon_prime
    if f(0.0) > 0:
        return EtaSolution(0.0, True, 0.0)
    if f(1.0) < 0:
        return EtaSolution(float("nan"), False, 0.0)
    eta = brentq(f, 0.0, 1.0, xtol=1e-14)
    return EtaSolution(float(eta), True, post_prob(eta, n))


def single_shot_bunch(n):
    """Chance that n photons in a balanced n-mode interferometer all exit together."""
    if n <= 300:
        return float(Fraction(factorial(n), n ** n))
    return float(np.exp(lgamma(n + 1) - n * log(n)))


def single_shot_rate(d):
    """Per-beamsplitter-resource rate of the single-shot approach."""
    return single_shot_bunch(d) / d


def spdc_atleast(d, nbar):
    """Probability a thermal source with mean nbar gives at least d photons."""
    return float((nbar / (nbar + 1.0)) ** d)
