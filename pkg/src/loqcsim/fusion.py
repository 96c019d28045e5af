"""Bootstrapped preparation of large Fock states by fusing smaller ones on a
beamsplitter and heralding on the photon count of one output."""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import binomtest

from ._accel import njit
from .errors import ParameterError
from .rng import as_rng

ETA_MIN, ETA_MAX = 1e-4, 1.0 - 1e-4
GRID_POINTS = 200
STRATEGIES = ("balanced", "modesty", "random", "frugal")


def _check_eta(eta):
    eta = np.asarray(eta, dtype=float)
    if np.any((eta <= 0.0) | (eta >= 1.0)):
        raise ParameterError("eta must lie strictly between 0 and 1")
    return eta


def fusion_distribution(m, n, eta):
    """Distribution of the detected photon number s = 0..m+n.

    Works on an array of reflectivities at once. The output state is built by
    applying normalised creation operators one photon at a time, which avoids
    the alternating-sign sum of the closed form.
    """
    eta = _check_eta(eta)
    scalar = eta.ndim == 0
    eta = np.atleast_1d(eta)
    t = np.sqrt(1.0 - eta ** 2)
    N = m + n
    psi = np.zeros((eta.size, N + 1))
    psi[:, 0] = 1.0
    k = np.arange(N + 1)
    total = 0
    for mode, count in ((0, m), (1, n)):
        x, y = (eta, t) if mode == 0 else (t, -eta)
        for j in range(1, count + 1):
            new = np.zeros_like(psi)
            new[:, 1:] = x[:, None] * np.sqrt(k[1:]) * psi[:, :-1]
            new += y[:, None] * np.sqrt(np.maximum(total + 1 - k, 0)) * psi
            psi = new / np.sqrt(j)
            total += 1
    probs = psi ** 2
    return probs[0] if scalar else probs


def fusion_prob(s, m, n, eta):
    """Probability of detecting s photons when fusing |m> and |n>."""
    if not 0 <= s <= m + n:
        return 0.0
    return float(fusion_distribution(m, n, float(eta))[s])


def fusion_prob_exact(s, m, n, eta_sq):
    """Closed-form probability as an exact rational for rational eta^2."""
    q = Fraction(eta_sq)
    if not 0 < q < 1:
        raise ParameterError("eta^2 must lie strictly between 0 and 1")
    ratio = q / (q - 1)
    inner = sum(comb(m, j) * comb(n, s - j) * ratio ** j for j in range(0, s + 1))
    pref = Fraction(factorial(s) * factorial(m + n - s), factorial(m) * factorial(n))
    return q ** (n - s) * (1 - q) ** (m + s) * pref * inner ** 2


def grow_prob(m, n, eta):
    """Probability that the fused state is larger than both inputs."""
    top = m + n - max(m, n)
    if top <= 0:
        return 0.0
    return float(np.sum(fusion_distribution(m, n, float(eta))[:top]))


def _weights(m, n, mode):
    """Per-outcome weights whose expectation is the optimisation objective."""
    N = m + n
    s = np.arange(N + 1)
    big = max(m, n)
    if mode == "recycled":
        return (s < N - big).astype(float)
    if mode == "s0-only":
        return (s == 0).astype(float)
    if isinstance(mode, tuple) and mode[0] == "frugal":
        d = mode[1]
        if N >= d:
            return (s <= N - d).astype(float)
        return np.clip(N - s - big, 0, None).astype(float)
    raise ParameterError(f"unknown optimisation mode {mode!r}")


@lru_cache(maxsize=None)
def optimize_eta(m, n, mode="recycled"):
    """Reflectivity maximising the chosen objective; returns (eta, value).

    Grid search on [1e-4, 1-1e-4] followed by bounded refinement around the
    best grid point.
    """
    if m < 1 or n < 1:
        raise ParameterError("m and n must be >= 1")
    w = _weights(m, n, mode)
    grid = np.linspace(ETA_MIN, ETA_MAX, GRID_POINTS)
    vals = fusion_distribution(m, n, grid) @ w
    i = int(np.argmax(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, GRID_POINTS - 1)]
    res = minimize_scalar(lambda e: -float(fusion_distribution(m, n, e) @ w),
                          bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    if -res.fun >= vals[i]:
        return float(res.x), float(-res.fun)
    return float(grid[i]), float(vals[i])


def limited_recycling_prob(n):
    """Success probability of a 50/50 fusion of two n-photon states that
    loses at most n/2 photons."""
    half = Fraction(1, 2)
    return float(sum(fusion_prob_exact(s, n, n, half) for s in range(n // 2 + 1)))


def doubling_singles_per_state(d):
    """Expected single photons per d-photon state for non-recycled doubling."""
    if d < 2 or d & (d - 1):
        raise ParameterError("d must be a power of two")
    total, size = float(d), d // 2
    while size >= 1:
        total /= float(fusion_prob_exact(0, size, size, Fraction(1, 2)))
        size //= 2
    return total


@dataclass(frozen=True)
class FusionStrategy:
    kind: str
    d: int
    d_prime: int = None
    recycled: bool = True
    unlimited_at: int = 1

    def __post_init__(self):
        if self.kind not in STRATEGIES:
            raise ParameterError(f"unknown strategy {self.kind!r}")
        if self.d < 2:
            raise ParameterError("target d must be >= 2")
        if self.d_prime is None:
            object.__setattr__(self, "d_prime", self.d)
        if self.d_prime < self.d:
            raise ParameterError("frugal slack d' must be >= d")
        if not 1 <= self.unlimited_at < self.d:
            raise ParameterError("unlimited bucket must hold fewer than d photons")


def _pairs(strategy):
    d, x, dp = strategy.d, strategy.unlimited_at, strategy.d_prime
    sizes = range(1, d)
    if strategy.kind == "balanced":
        return {(k, k) for k in sizes}
    if strategy.kind == "modesty":
        return {tuple(sorted((k, x))) for k in sizes}
    if strategy.kind == "random":
        return {(a, b) for a in sizes for b in sizes if a <= b}
    return {(a, b) for a in sizes for b in sizes
            if a <= b and ((a == b and a <= dp // 2) or d <= a + b <= dp)}


def _mode_for(strategy):
    if not strategy.recycled:
        return "s0-only"
    if strategy.kind == "frugal":
        return ("frugal", strategy.d, strategy.d_prime)
    return "recycled"


def outcome_table(strategy):
    """Cumulative outcome distributions at the optimal reflectivity for every
    pair of sizes the strategy can select; indexed [m, n, s]."""
    d = strategy.d
    cum = np.zeros((d, d, 2 * d - 1))
    mode = _mode_for(strategy)
    etas = {}
    for a, b in sorted(_pairs(strategy)):
        eta, _ = optimize_eta(a, b, mode)
        p = fusion_distribution(a, b, eta)
        c = np.cumsum(p)
        c /= c[-1]
        cum[a, b, :a + b + 1] = c
        cum[a, b, a + b + 1:] = 1.0
        cum[b, a] = cum[a, b]
        etas[(a, b)] = eta
    return cum, etas


_KIND = {k: i for i, k in enumerate(STRATEGIES)}


@njit(cache=True)
def _select(kind, counts, x, d, dp, u):
    # returns (m, n, fallback)
    if kind == 0:
        for k in range(d - 1, 0, -1):
            if k == x or counts[k] >= 2:
                return k, k, 0
        return x, x, 1
    if kind == 1:
        for k in range(d - 1, 0, -1):
            if k != x and counts[k] >= 1:
                return k, x, 0
        return x, x, 1
    if kind == 2:
        npairs = 0
        for a in range(1, d):
            if a != x and counts[a] == 0:
                continue
            for b in range(a, d):
                if b != x and counts[b] == 0:
                    continue
                if a == b and a != x and counts[a] < 2:
                    continue
                npairs += 1
        pick = int(u * npairs)
        if pick >= npairs:
            pick = npairs - 1
        for a in range(1, d):
            if a != x and counts[a] == 0:
                continue
            for b in range(a, d):
                if b != x and counts[b] == 0:
                    continue
                if a == b and a != x and counts[a] < 2:
                    continue
                if pick == 0:
                    return a, b, 0
                pick -= 1
        return x, x, 1
    half = dp // 2
    for big in range(d - 1, half, -1):
        if big != x and counts[big] == 0:
            continue
        lo = d - big
        if lo < 1:
            lo = 1
        hi = dp - big
        if hi > d - 1:
            hi = d - 1
        for small in range(lo, hi + 1):
            if small == big:
                if big != x and counts[big] < 2:
                    continue
            elif small != x and counts[small] == 0:
                continue
            return small, big, 0
    for k in range(min(half, d - 1), 0, -1):
        if k == x or counts[k] >= 2:
            return k, k, 0
    return x, x, 1


@njit(cache=True)
def _run_chain(kind, d, dp, x, recycled, cum, uniforms, burn, record):
    steps = uniforms.shape[0]
    counts = np.zeros(d, dtype=np.int64)
    harvested = 0
    unlimited = 0
    fallbacks = 0
    vacuum = 0
    nrec = steps if record else 0
    tm = np.zeros(nrec, dtype=np.int32)
    tn = np.zeros(nrec, dtype=np.int32)
    ts = np.zeros(nrec, dtype=np.int32)
    tstore = np.zeros(nrec, dtype=np.int64)
    stored = 0
    for t in range(steps):
        m, n, fb = _select(kind, counts, x, d, dp, uniforms[t, 1])
        fallbacks += fb
        for size in (m, n):
            if size == x:
                if t >= burn:
                    unlimited += 1
            else:
                counts[size] -= 1
                stored -= 1
        row = cum[m, n]
        s = 0
        u = uniforms[t, 0]
        while s < m + n and row[s] <= u:
            s += 1
        out = m + n - s
        if recycled or s == 0:
            if out >= d:
                if t >= burn:
                    harvested += 1
            elif out == 0:
                vacuum += 1
            elif out != x:
                counts[out] += 1
                stored += 1
        if record:
            tm[t] = m
            tn[t] = n
            ts[t] = s
            tstore[t] = stored
    return harvested, unlimited, fallbacks, vacuum, tm, tn, ts, tstore


@dataclass
class ChainResult:
    rate: float
    ci: tuple
    harvested: int
    counted_steps: int
    unlimited_draws: int
    fallbacks: int
    vacuum_outcomes: int
    etas: dict = field(repr=False, default_factory=dict)
    trace: dict = field(repr=False, default=None)

    def trace_records(self):
        """Newline-friendly (step, m, n, s, stored) tuples."""
        if self.trace is None:
            return []
        tr = self.trace
        return [(i, int(tr["m"][i]), int(tr["n"][i]), int(tr["s"][i]), int(tr["stored"][i]))
                for i in range(len(tr["m"]))]


def run_strategy(strategy, steps, rng=None, burn_fraction=0.1, record=False):
    """Simulate the bucket Markov chain and estimate the preparation rate of
    states with at least d photons per fusion operation.

    States reaching d photons are removed and counted; the first
    ``burn_fraction`` of steps is excluded from the count.
    """
    if steps < 1:
        raise ParameterError("steps must be >= 1")
    rng = as_rng(rng)
    cum, etas = outcome_table(strategy)
    uniforms = rng.random((steps, 2))
    burn = int(burn_fraction * steps)
    h, unl, fb, vac, tm, tn, ts, tst = _run_chain(
        _KIND[strategy.kind], strategy.d, strategy.d_prime, strategy.unlimited_at,
        strategy.recycled, cum, uniforms, burn, record)
    counted = steps - burn
    ci = binomtest(int(h), counted).proportion_ci(method="wilson") if counted else (0.0, 1.0)
    trace = dict(m=tm, n=tn, s=ts, stored=tst) if record else None
    return ChainResult(h / counted if counted else 0.0, (float(ci[0]), float(ci[1])),
                       int(h), counted, int(unl), int(fb), int(vac), etas, trace)


@dataclass(frozen=True)
class ReductionResult:
    operations: np.ndarray
    success: np.ndarray

    @property
    def mean_operations(self):
        return float(np.mean(self.operations))

    @property
    def success_rate(self):
        return float(np.mean(self.success))


def reduce_state(n, d, eta_small=0.05, rng=None, trials=10000):
    """Trim an n-photon state to d photons with a weak beamsplitter and a
    vacuum ancilla, repeating until exactly d remain.

    Each pass detects a binomially thinned photon count with p = eta^2.
    Detecting more photons than needed ends the trial as a failure.
    """
    if n < d:
        raise ParameterError("need n >= d")
    _check_eta(eta_small)
    rng = as_rng(rng)
    p = eta_small ** 2
    ops = np.zeros(trials, dtype=np.int64)
    ok = np.ones(trials, dtype=bool)
    for i in range(trials):
        k = n
        while k > d:
            p_any = -np.expm1(k * np.log1p(-p))
            ops[i] += rng.geometric(p_any)
            # photon count given at least one detection
            while True:
                s = rng.binomial(k, p)
                if s > 0:
                    break
            k -= s
        ok[i] = k == d
    return ReductionResult(ops, ok)
