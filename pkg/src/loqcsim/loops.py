"""Time-bin fiber-loop interferometer: unitary synthesis, loss bias,
post-selection and temporal mode-mismatch.

A switch setting u(t) is a 2x2 matrix whose row is the input port
(0: fresh pulse, 1: returning from the loop) and whose column is the output
port (0: leaves the loop, 1: enters the loop).
"""
from dataclasses import dataclass
from itertools import product
from math import factorial

import numpy as np

from .errors import MismatchRegimeError, ParameterError, SequenceError
from .fock import permanent_ryser

SWAP = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
MISMATCH_GUARD = 10.0


def beamsplitter(alpha, beta, gamma, delta):
    """General U(2) element parametrised by a global phase and three angles."""
    a = np.exp(1j * (alpha - beta / 2 - gamma / 2)) * np.cos(delta / 2)
    b = -np.exp(1j * (alpha - beta / 2 + gamma / 2)) * np.sin(delta / 2)
    c = np.exp(1j * (alpha + beta / 2 - gamma / 2)) * np.sin(delta / 2)
    d = np.exp(1j * (alpha + beta / 2 + gamma / 2)) * np.cos(delta / 2)
    return np.array([[a, b], [c, d]], dtype=np.complex128)


def switch_sequence(middle):
    """Wrap m-1 interior settings with the swap boundary steps."""
    return [SWAP.copy()] + [np.asarray(u, dtype=np.complex128) for u in middle] + [SWAP.copy()]


def random_sequence(m, rng):
    """Interior settings with angles drawn uniformly on their ranges."""
    mids = []
    for _ in range(m - 1):
        alpha = rng.uniform(0.0, 2 * np.pi)
        beta, gamma, delta = rng.uniform(0.0, np.pi, size=3)
        mids.append(beamsplitter(alpha, beta, gamma, delta))
    return switch_sequence(mids)


def validate_sequence(seq, m, tol=1e-10):
    if len(seq) != m + 1:
        raise SequenceError(f"need m+1={m + 1} switch settings, got {len(seq)}")
    seq = [np.asarray(u, dtype=np.complex128) for u in seq]
    for t, u in enumerate(seq):
        if u.shape != (2, 2):
            raise SequenceError(f"setting {t + 1} is not 2x2")
        if np.max(np.abs(u.conj().T @ u - np.eye(2))) > tol:
            raise SequenceError(f"setting {t + 1} is not unitary")
    if np.max(np.abs(seq[0] - SWAP)) > tol or np.max(np.abs(seq[-1] - SWAP)) > tol:
        raise SequenceError("first and last settings must be the swap")
    return seq


def _loop_map(seq, m, eta_s=1.0, eta=1.0):
    # u[t] below is 0-based: u[t] is the setting at time bin t+1.
    V = np.zeros((m, m), dtype=np.complex128)
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            if i > j + 1:
                continue
            if i == j + 1:
                V[i - 1, j - 1] = eta_s * seq[i - 1][0, 0]
                continue
            amp = seq[i - 1][0, 1] * seq[j][1, 0]
            for k in range(i + 1, j + 1):
                amp *= seq[k - 1][1, 1]
            V[i - 1, j - 1] = eta_s * eta ** (j - i + 1) * amp
    return V


def loop_pass_map(seq, m):
    """Mode map implemented by one pass of the pulse train through the loop."""
    seq = validate_sequence(seq, m)
    return _loop_map(seq, m)


def simulate_loop_pass(seq, m, eta_f=1.0, eta_s=1.0):
    """Bin-by-bin propagation of single-photon amplitudes through the loop.

    Independent of the closed-form map: every switch passage costs eta_s and
    every round trip of the inner fiber costs eta_f. A pulse leaving at time
    bin t lands in output bin t-1.
    """
    seq = [np.asarray(u, dtype=np.complex128) for u in seq]
    V = np.zeros((m, m), dtype=np.complex128)
    for i in range(m):
        loop = 0.0 + 0.0j
        for t in range(m + 1):
            fresh = 1.0 if t == i else 0.0
            u = seq[t]
            leave = eta_s * (fresh * u[0, 0] + loop * u[1, 0])
            loop = eta_f * eta_s * (fresh * u[0, 1] + loop * u[1, 1])
            if t >= 1:
                V[i, t - 1] = leave
            elif abs(leave) > 0:
                raise SequenceError("a pulse left before the first output bin")
        if abs(loop) > 1e-14:
            raise SequenceError("amplitude left in the loop after the last bin")
    return V


def _check_loss(eta_f, eta_s):
    for name, v in (("eta_f", eta_f), ("eta_s", eta_s)):
        if not 0.0 <= v <= 1.0:
            raise ParameterError(f"{name}={v} outside [0, 1]")


def loss_matrix(m, L, eta_f, eta_s):
    """Element-wise loss bias accumulated over L inner-loop passes."""
    _check_loss(eta_f, eta_s)
    eta = eta_f * eta_s
    i = np.arange(m)[:, None]
    j = np.arange(m)[None, :]
    return eta_s ** L * eta ** (L + j - i).astype(float)


def outer_loss_factor(m, L, eta_f, eta_s):
    """Global amplitude factor from L-1 recirculations of the outer loop."""
    _check_loss(eta_f, eta_s)
    return eta_f ** (m * (L - 1)) * eta_s ** (2 * (L - 1))


@dataclass(frozen=True)
class LossyLoopMap:
    matrix: np.ndarray        # outer factor times the product of lossy passes
    inner: np.ndarray         # product of lossy passes only
    ideal: np.ndarray         # lossless product of passes
    loss: np.ndarray          # loss matrix for L passes
    outer_factor: float

    def factorization_error(self):
        return float(np.max(np.abs(self.inner - self.ideal * self.loss)))


def _sequences(seqs, m, L):
    if len(seqs) and np.asarray(seqs[0]).ndim == 2:
        seqs = [seqs] * L
    if len(seqs) != L:
        raise SequenceError(f"need {L} switch sequences, got {len(seqs)}")
    return [validate_sequence(s, m) for s in seqs]


def lossy_loop_map(seqs, m, eta_f, eta_s, L=1, check=True):
    """Net map after L passes with fiber and switch losses.

    ``seqs`` is either one sequence reused for every pass or a list of L
    sequences.
    """
    if L < 1:
        raise ParameterError("L must be >= 1")
    _check_loss(eta_f, eta_s)
    seqs = _sequences(seqs, m, L)
    eta = eta_f * eta_s
    inner = np.eye(m, dtype=np.complex128)
    ideal = np.eye(m, dtype=np.complex128)
    for s in seqs:
        inner = inner @ _loop_map(s, m, eta_s, eta)
        ideal = ideal @ _loop_map(s, m)
    outer = outer_loss_factor(m, L, eta_f, eta_s)
    res = LossyLoopMap(outer * inner, inner, ideal, loss_matrix(m, L, eta_f, eta_s), outer)
    if check and res.factorization_error() > 1e-12 * max(1.0, np.max(np.abs(inner))):
        raise AssertionError("lossy map does not factor as ideal map times loss matrix")
    return res


def similarity(U, lossless=False):
    """Closeness of |U| to the uniform matrix; 1 for a balanced map.

    The default form is scale invariant and suited to lossy maps; with
    ``lossless=True`` the unnormalised form for unitaries is used.
    """
    A = np.abs(np.asarray(U))
    m = A.shape[0]
    s1 = A.sum()
    if lossless:
        return float(s1 ** 2 / m ** 3)
    s2 = (A ** 2).sum()
    if s2 == 0:
        raise ParameterError("similarity of the zero matrix is undefined")
    return float(s1 ** 2 / s2 / m ** 2)


def similarity_search(m, L, eta_f, eta_s, trials=1750, rng=None):
    """Monte-Carlo search over random switch settings for the most uniform map."""
    rng = np.random.default_rng() if rng is None else rng
    best, best_seqs = -1.0, None
    for _ in range(trials):
        seqs = [random_sequence(m, rng) for _ in range(L)]
        s = similarity(lossy_loop_map(seqs, m, eta_f, eta_s, L, check=False).inner)
        if s > best:
            best, best_seqs = s, seqs
    return best, best_seqs


def postselect_prob(U, k):
    """Probability that every input photon survives a lossy map."""
    U = np.asarray(U)
    rows = np.sum(np.abs(U) ** 2, axis=1)
    return float(np.prod(rows ** np.asarray(k, dtype=float)))


def _mismatch_inputs(m, k, delta, sigma, omega):
    if omega <= 0:
        raise ParameterError("omega must be positive")
    if abs(delta) / omega > MISMATCH_GUARD or sigma / omega > MISMATCH_GUARD:
        raise MismatchRegimeError("delta/omega and sigma/omega must stay below 10")
    k = tuple(int(v) for v in (k if k is not None else (1,) * m))
    if len(k) != m:
        raise ParameterError("input configuration length must equal m")
    return k


def _shifts(m, sources, jitter, delta):
    # shift of the photon from input bin i exiting in output bin j
    i = np.asarray(sources)[:, None]
    j = np.arange(m)[None, :]
    return jitter[i] + (j - i + 1) * delta


def _overlap_sparse(V, sources, shifts, omega):
    """<ideal|actual> and <actual|actual> from an explicit expansion.

    Terms of the actual output are keyed by the multiset of
    (output bin, traversal count, source bin); overlaps between terms are
    formed by symmetrising over photons sharing an output bin.
    """
    m = V.shape[0]
    n = len(sources)
    terms = {}
    for js in product(range(m), repeat=n):
        amp = 1.0 + 0.0j
        for q, j in enumerate(js):
            amp *= V[sources[q], j]
        if amp == 0:
            continue
        key = tuple(sorted((j, j - sources[q] + 1, sources[q]) for q, j in enumerate(js)))
        terms[key] = terms.get(key, 0.0) + amp
    ideal = {}
    for key, amp in terms.items():
        cfg = tuple(sorted(j for j, _, _ in key))
        ideal[cfg] = ideal.get(cfg, 0.0) + amp
    kern = lambda a, b: np.exp(-((a - b) ** 2) / (4.0 * omega ** 2))

    def shift_of(j, src):
        return shifts[sources.index(src), j]

    def bin_overlap(key_a, key_b):
        # product over bins of the permanent of pairwise wave-packet overlaps
        total = 1.0
        for b in set(j for j, _, _ in key_a):
            sa = [shift_of(j, src) for j, _, src in key_a if j == b]
            sb = [shift_of(j, src) for j, _, src in key_b if j == b]
            if len(sa) != len(sb):
                return 0.0
            K = kern(np.asarray(sa)[:, None], np.asarray(sb)[None, :])
            total *= permanent_ryser(K).real
        return total

    cross = 0.0 + 0.0j
    for key, amp in terms.items():
        cfg = tuple(sorted(j for j, _, _ in key))
        occ = np.bincount(cfg, minlength=m)
        weight = np.prod([factorial(c) for c in occ])
        damp = np.prod([kern(shift_of(j, src), 0.0) for j, _, src in key])
        cross += np.conj(ideal[cfg]) * amp * weight * damp
    by_cfg = {}
    for key, amp in terms.items():
        by_cfg.setdefault(tuple(sorted(j for j, _, _ in key)), []).append((key, amp))
    norm_a = 0.0
    for group in by_cfg.values():
        for ka, aa in group:
            for kb, ab in group:
                norm_a += (np.conj(aa) * ab * bin_overlap(ka, kb)).real
    norm_i = 0.0
    for cfg, amp in ideal.items():
        occ = np.bincount(cfg, minlength=m)
        norm_i += abs(amp) ** 2 * np.prod([factorial(c) for c in occ])
    return cross, norm_i, norm_a


def _overlap_gram(V, sources, shifts, omega):
    """Same overlap written as a permanent of the single-photon Gram matrix."""
    damp = np.exp(-(shifts ** 2) / (4.0 * omega ** 2))
    A = V[sources, :]
    G = np.conj(A) @ (A * damp).T
    mult = np.prod([factorial(c) for c in np.bincount(sources, minlength=V.shape[0])])
    return permanent_ryser(G), float(mult), float(mult)


def mismatch_fidelity(seq, m, delta, sigma, omega, trials=250, rng=None, k=None, method="sparse"):
    """Fidelity between ideal and temporally shifted loop outputs.

    Each inner-loop round trip shifts a wave packet by ``delta``; each source
    bin carries Gaussian timing jitter of standard deviation ``sigma``.
    Returns the mean fidelity over ``trials`` jitter draws (one evaluation
    when ``sigma`` is zero).
    """
    k = _mismatch_inputs(m, k, delta, sigma, omega)
    V = loop_pass_map(seq, m)
    sources = [i for i, c in enumerate(k) for _ in range(c)]
    evaluate = _overlap_sparse if method == "sparse" else _overlap_gram
    if delta == 0 and sigma == 0:
        # shifted and ideal packets coincide; skip the round-off
        return 1.0
    if sigma == 0:
        draws = [np.zeros(m)]
    else:
        rng = np.random.default_rng() if rng is None else rng
        draws = [rng.normal(0.0, sigma, size=m) for _ in range(trials)]
    fids = []
    for jitter in draws:
        shifts = _shifts(m, sources, jitter, delta)
        cross, ni, na = evaluate(V, sources, shifts, omega)
        fids.append(min(abs(cross) ** 2 / (ni * na), 1.0))
    return float(np.mean(fids))


def two_mode_hadamard_fidelity(delta_over_omega):
    """Closed form for m=2, Hadamard middle setting, no jitter, input (1,1)."""
    r2 = delta_over_omega ** 2
    return float(np.exp(-r2 / 2.0) * (1.0 + np.exp(-r2)) ** 2 / 4.0)
