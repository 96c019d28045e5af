"""Sampling amplitudes for non-Fock inputs: coherent-state superpositions
(cat states), photon-added coherent states, displaced Fock states and
photon-added squeezed vacuum."""
from dataclasses import dataclass
from itertools import product
from math import factorial, lgamma

import numpy as np
from scipy.special import eval_genlaguerre
from scipy.stats import binom

from .errors import InconsistencyError, ParameterError, SizeGuardError
from .fock import check_mode_matrix, output_amplitude, permanent_ryser

TERM_GUARD = 10 ** 6


def fock_coefficient(n, alpha):
    """Amplitude of |n> in the coherent state |alpha>."""
    alpha = complex(alpha)
    if alpha == 0:
        return 1.0 + 0j if n == 0 else 0j
    return complex(np.exp(-abs(alpha) ** 2 / 2 + n * np.log(alpha) - 0.5 * lgamma(n + 1)))


def coherent_overlap(a, b):
    """<a|b> for coherent states."""
    return complex(np.exp(-0.5 * abs(a) ** 2 - 0.5 * abs(b) ** 2 + np.conj(a) * b))


def propagate_coherent(U, alphas):
    """Output coherent amplitudes for a product of coherent inputs.

    Rows of U are inputs, so output j collects sum_k U[k, j] alpha_k.
    """
    U = check_mode_matrix(U)
    return U.T @ np.asarray(alphas, dtype=np.complex128)


@dataclass(frozen=True)
class CoherentSuperposition:
    """Per-mode superpositions sum_t weight_t |alpha_t>."""
    weights: tuple
    alphas: tuple

    def __post_init__(self):
        if len(self.weights) != len(self.alphas):
            raise ParameterError("weights and amplitudes need one entry per mode")
        for w, a in zip(self.weights, self.alphas):
            if len(w) != len(a) or len(w) == 0:
                raise ParameterError("each mode needs matching, non-empty term lists")

    @property
    def modes(self):
        return len(self.weights)

    def norm_sq(self):
        total = 1.0
        for w, a in zip(self.weights, self.alphas):
            s = sum(np.conj(wi) * wj * coherent_overlap(ai, aj)
                    for wi, ai in zip(w, a) for wj, aj in zip(w, a))
            total *= s.real
        return total

    @classmethod
    def cat(cls, alpha, m, parity="odd"):
        sign = -1.0 if parity == "odd" else 1.0
        return cls(tuple((1.0, sign) for _ in range(m)), tuple((alpha, -alpha) for _ in range(m)))

    @classmethod
    def coherent(cls, alphas):
        return cls(tuple((1.0,) for _ in alphas), tuple((a,) for a in alphas))


def cat_amplitude(state, U, S, normalize=True):
    """Amplitude of output pattern S for a coherent-superposition input.

    Sums over one term choice per input mode; each choice gives a product
    coherent state after the network.
    """
    U = check_mode_matrix(U)
    m = state.modes
    if U.shape[0] != m or len(S) != m:
        raise ParameterError("state, matrix and pattern sizes differ")
    sizes = [len(w) for w in state.weights]
    if np.prod(sizes, dtype=float) > TERM_GUARD:
        raise SizeGuardError("too many superposition terms")
    gamma = 0j
    for choice in product(*[range(k) for k in sizes]):
        alpha = np.array([state.alphas[k][t] for k, t in enumerate(choice)], dtype=np.complex128)
        w = np.prod([state.weights[k][t] for k, t in enumerate(choice)])
        beta = U.T @ alpha
        gamma += w * np.prod([fock_coefficient(s, b) for s, b in zip(S, beta)])
    if normalize:
        gamma /= np.sqrt(state.norm_sq())
    return complex(gamma)


def cat_prob(state, U, S):
    return abs(cat_amplitude(state, U, S)) ** 2


def photon_cutoff(alpha_max):
    """Per-mode photon cutoff leaving a tail below about 1e-6."""
    a = abs(alpha_max)
    return int(np.ceil(a ** 2 + 8 * a + 10))


@dataclass(frozen=True)
class HardnessBound:
    prob: float
    threshold: float
    above_threshold: bool


def odd_cat_hardness_bound(alpha, n, k=None):
    """Probability (alpha^2 csch alpha^2)^n that n odd cats all hold one photon.

    With ``k`` given, also compares it with the inverse-polynomial 1/n^k.
    """
    if alpha <= 0:
        raise ParameterError("alpha must be positive")
    x = alpha ** 2
    single = x / np.sinh(x)
    prob = float(np.exp(n * np.log(single)))
    thr = float(n ** (-k)) if k is not None else float("nan")
    return HardnessBound(prob, thr, bool(prob > thr) if k is not None else False)


@dataclass(frozen=True)
class SpacsStats:
    probs: np.ndarray
    regime: str


def spacs_stats(n, alpha2):
    """Total-photon distribution of n photon-added coherent states after
    the counter-displacement, and the sampling-hardness regime."""
    if alpha2 < 0:
        raise ParameterError("|alpha|^2 must be non-negative")
    i = np.arange(n + 1)
    probs = binom.pmf(i, n, 1.0 / (1.0 + alpha2))
    if alpha2 <= 1.0 / n:
        regime = "hard"
    elif alpha2 >= n ** 2:
        regime = "easy"
    else:
        regime = "intermediate"
    return SpacsStats(probs, regime)


def spacs_all_photons(n, alpha2):
    """Probability that all n added photons are seen, in closed form."""
    return float(np.exp(-n * np.log1p(alpha2)))


def displacement_element(out, inp, beta):
    """<out| D(beta) |inp> via associated Laguerre polynomials."""
    x = abs(beta) ** 2
    if out >= inp:
        lo, hi, z = inp, out, complex(beta)
    else:
        lo, hi, z = out, inp, -np.conj(beta)
    pref = np.exp(0.5 * (lgamma(lo + 1) - lgamma(hi + 1)) - x / 2)
    return complex(pref * z ** (hi - lo) * eval_genlaguerre(lo, hi - lo, x))


def dspfs_amplitude(U, k, alphas, S, counter_displace=False):
    """Amplitude of pattern S for displaced Fock inputs D(alpha)|k>.

    The network carries the displacements to the outputs; with
    ``counter_displace`` they are undone there and the amplitude reduces to
    ordinary Fock sampling.
    """
    U = check_mode_matrix(U)
    if counter_displace:
        return output_amplitude(U, k, S)
    from .fock import configurations
    beta = U.T @ np.asarray(alphas, dtype=np.complex128)
    total = 0j
    for T in configurations(sum(k), U.shape[0]):
        amp = output_amplitude(U, k, T)
        if amp == 0:
            continue
        total += amp * np.prod([displacement_element(s, t, b) for s, t, b in zip(S, T, beta)])
    return complex(total)


def passv_pattern(parity):
    """Modes reporting odd parity, from a sequence of 'odd'/'even' or 1/0."""
    flags = []
    for p in parity:
        if p in ("odd", 1, True):
            flags.append(True)
        elif p in ("even", 0, False):
            flags.append(False)
        else:
            raise ParameterError(f"unknown parity label {p!r}")
    return [j for j, f in enumerate(flags) if f]


def passv_sample(O, n, parity, xi=0.0):
    """Probability of a parity pattern for photon-added squeezed vacuum.

    Modes 0..n-1 each carry one added photon, every mode carries the same
    squeezed vacuum, and O is real orthogonal so the squeezing passes
    through unchanged. An odd pattern with exactly n odd modes forces one
    photon per odd mode, giving |Per(O[:n, odd])|^2; the squeezing cancels
    between the state norm and the photon-added amplitude, so ``xi`` is
    validated but does not enter.
    """
    O = check_mode_matrix(O, kind="orthogonal")
    if not np.isfinite(xi):
        raise ParameterError("xi must be finite")
    if len(parity) != O.shape[0]:
        raise ParameterError("parity pattern length must equal the mode count")
    odd = passv_pattern(parity)
    if len(odd) != n:
        raise InconsistencyError(f"{len(odd)} odd modes reported for {n} added photons")
    return float(abs(permanent_ryser(O[np.ix_(range(n), odd)])) ** 2)
