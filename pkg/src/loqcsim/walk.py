"""Discrete-time coined quantum walk on a 2D square lattice with static
defects and dephasing, plus the matching classical walk.

Amplitudes live in a dense array indexed [x + T, y + T, cx, cy] where T is
the lattice half-extent; coin index 0 moves the walker towards +x (or +y).
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._accel import USE_NUMBA, njit
from .errors import ExtentError, ParameterError
from .rng import as_rng, make_rng

H2 = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


def initial_state(t_max):
    """Walker at the origin with both coins pointing in the + direction."""
    N = 2 * t_max + 1
    psi = np.zeros((N, N, 2, 2), dtype=np.complex128)
    psi[t_max, t_max, 0, 0] = 1.0
    return psi


def coin_field(t_max, p=1.0, rng=None):
    """Boolean map of live sites; each non-origin site is a defect with
    probability 1 - p."""
    if not 0.0 <= p <= 1.0:
        raise ParameterError("p must lie in [0, 1]")
    N = 2 * t_max + 1
    if p >= 1.0:
        return np.ones((N, N), dtype=bool)
    live = as_rng(rng).random((N, N)) < p
    live[t_max, t_max] = True
    return live


def _check_extent(psi):
    edge = (np.any(psi[0] != 0) or np.any(psi[-1] != 0)
            or np.any(psi[:, 0] != 0) or np.any(psi[:, -1] != 0))
    if edge:
        raise ExtentError("walker reached the lattice edge; increase t_max")


def _step_numpy(psi, live):
    h = np.einsum("ab,xybd->xyad", H2, psi)
    h = np.einsum("cd,xyad->xyac", H2, h)
    coined = np.where(live[:, :, None, None], h, psi[:, :, ::-1, ::-1])
    out = np.empty_like(psi)
    for cx, dx in ((0, 1), (1, -1)):
        for cy, dy in ((0, 1), (1, -1)):
            out[:, :, cx, cy] = np.roll(np.roll(coined[:, :, cx, cy], dx, axis=0), dy, axis=1)
    return out


@njit(cache=True)
def _step_loops(psi, live):
    N = psi.shape[0]
    out = np.zeros_like(psi)
    r = 1.0 / np.sqrt(2.0)
    for x in range(N):
        for y in range(N):
            a00 = psi[x, y, 0, 0]
            a01 = psi[x, y, 0, 1]
            a10 = psi[x, y, 1, 0]
            a11 = psi[x, y, 1, 1]
            if live[x, y]:
                b00 = 0.5 * (a00 + a01 + a10 + a11)
                b01 = 0.5 * (a00 - a01 + a10 - a11)
                b10 = 0.5 * (a00 + a01 - a10 - a11)
                b11 = 0.5 * (a00 - a01 - a10 + a11)
            else:
                b00, b01, b10, b11 = a11, a10, a01, a00
            out[(x + 1) % N, (y + 1) % N, 0, 0] += b00
            out[(x + 1) % N, (y - 1) % N, 0, 1] += b01
            out[(x - 1) % N, (y + 1) % N, 1, 0] += b10
            out[(x - 1) % N, (y - 1) % N, 1, 1] += b11
    return out


def step(psi, live, check=True):
    """One coin toss (H x H at live sites, X x X at defects) and shift."""
    if check:
        _check_extent(psi)
    if USE_NUMBA:
        return _step_loops(psi, live)
    return _step_numpy(psi, live)


def dephase(psi, p_d, rng):
    """Flip the sign of each basis amplitude independently with probability p_d."""
    if not 0.0 <= p_d <= 1.0:
        raise ParameterError("p_d must lie in [0, 1]")
    if p_d == 0.0:
        return psi
    flips = rng.random(psi.shape) < p_d
    return np.where(flips, -psi, psi)


def x_marginal(psi):
    return np.sum(np.abs(psi) ** 2, axis=(1, 2, 3))


def variance_from_marginal(px):
    T = (px.shape[-1] - 1) // 2
    x = np.arange(-T, T + 1)
    mean = px @ x
    return px @ x ** 2 - mean ** 2


def escape_from_marginal(px, t_b):
    T = (px.shape[-1] - 1) // 2
    x = np.arange(-T, T + 1)
    return np.sum(px[..., np.abs(x) > t_b], axis=-1)


def metrics(psi, t_b=0):
    """Variance of the x position and the probability beyond |x| = t_b."""
    T = (psi.shape[0] - 1) // 2
    if not 0 <= t_b <= T:
        raise ParameterError("t_b must lie in [0, t_max]")
    px = x_marginal(psi)
    return float(variance_from_marginal(px)), float(escape_from_marginal(px, t_b))


def run_walk(t_max, steps=None, live=None, p_d=0.0, rng=None):
    """Evolve one walker; returns the x marginal after every step (t = 0..steps)."""
    steps = t_max if steps is None else steps
    psi = initial_state(t_max)
    live = coin_field(t_max) if live is None else live
    rng = as_rng(rng)
    marg = np.empty((steps + 1, 2 * t_max + 1))
    marg[0] = x_marginal(psi)
    for t in range(1, steps + 1):
        psi = dephase(step(psi, live), p_d, rng)
        marg[t] = x_marginal(psi)
    return marg, psi


@dataclass
class EnsembleSeries:
    t: np.ndarray
    variance: np.ndarray
    variance_err: np.ndarray
    escape: np.ndarray
    escape_err: np.ndarray
    marginal: np.ndarray


def ensemble_run(t_max, p=1.0, p_d=0.0, t_b=0, trials=100, seed=0, steps=None, threads=1):
    """Average the walk over congestion fields and dephasing histories.

    The variance is taken from the trial-averaged position distribution, with
    a jackknife error; trial k draws from its own stream (seed, k).
    """
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    steps = t_max if steps is None else steps

    def one(k):
        rng = make_rng(seed, k)
        live = coin_field(t_max, p, rng)
        return run_walk(t_max, steps, live, p_d, rng)[0]

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            margs = np.stack(list(pool.map(one, range(trials))))
    else:
        margs = np.stack([one(k) for k in range(trials)])
    mean = margs.mean(axis=0)
    var = variance_from_marginal(mean)
    esc_trials = escape_from_marginal(margs, t_b)
    esc = esc_trials.mean(axis=0)
    if trials > 1:
        loo = (margs.sum(axis=0)[None] - margs) / (trials - 1)
        var_loo = variance_from_marginal(loo)
        var_err = np.sqrt((trials - 1) / trials * np.sum((var_loo - var_loo.mean(axis=0)) ** 2, axis=0))
        esc_err = esc_trials.std(axis=0, ddof=1) / np.sqrt(trials)
    else:
        var_err = np.zeros_like(var)
        esc_err = np.zeros_like(esc)
    return EnsembleSeries(np.arange(steps + 1), var, var_err, esc, esc_err, mean)


def classical_walk_exact(t_max, live=None, steps=None):
    """Position distribution of the fully dephased walk as a Markov chain:
    coins are resampled uniformly at live sites and reversed at defects."""
    steps = t_max if steps is None else steps
    live = coin_field(t_max) if live is None else live
    N = 2 * t_max + 1
    prob = np.zeros((N, N, 2, 2))
    prob[t_max, t_max, 0, 0] = 1.0
    marg = np.empty((steps + 1, N))
    marg[0] = prob.sum(axis=(1, 2, 3))
    for t in range(1, steps + 1):
        _check_extent(prob)
        tot = prob.sum(axis=(2, 3))
        coined = np.where(live[:, :, None, None], np.broadcast_to(tot[:, :, None, None] / 4, prob.shape),
                          prob[:, :, ::-1, ::-1])
        new = np.empty_like(prob)
        for cx, dx in ((0, 1), (1, -1)):
            for cy, dy in ((0, 1), (1, -1)):
                new[:, :, cx, cy] = np.roll(np.roll(coined[:, :, cx, cy], dx, axis=0), dy, axis=1)
        prob = new
        marg[t] = prob.sum(axis=(1, 2, 3))
    return marg


def classical_walk_tokens(t_max, tokens, rng, live=None, steps=None):
    """Monte-Carlo classical walkers with the same coin rules."""
    steps = t_max if steps is None else steps
    live = coin_field(t_max) if live is None else live
    x = np.zeros(tokens, dtype=np.int64)
    y = np.zeros(tokens, dtype=np.int64)
    cx = np.zeros(tokens, dtype=np.int64)
    cy = np.zeros(tokens, dtype=np.int64)
    var = np.empty(steps + 1)
    var[0] = 0.0
    for t in range(1, steps + 1):
        ok = live[x + t_max, y + t_max]
        cx = np.where(ok, rng.integers(0, 2, tokens), 1 - cx)
        cy = np.where(ok, rng.integers(0, 2, tokens), 1 - cy)
        x = x + 1 - 2 * cx
        y = y + 1 - 2 * cy
        var[t] = x.var()
    return var


def dephase_map_check(p_d, trials=20000, dim=5, rng=None):
    """Ensemble-average sign flips on a random dim-level pure state and
    return (expected factor, measured factor, standard error) for the
    decay of the density-matrix off-diagonals."""
    rng = as_rng(rng)
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    psi /= np.linalg.norm(psi)
    rho0 = np.outer(psi, psi.conj())
    signs = np.where(rng.random((trials, dim)) < p_d, -1.0, 1.0)
    off = ~np.eye(dim, dtype=bool)
    # per-trial ratio of each off-diagonal to its initial value is s_i s_j
    ratios = (signs[:, :, None] * signs[:, None, :])[:, off]
    per_trial = ratios.mean(axis=1)
    rho = np.einsum("ki,kj,ij->ij", signs, signs, rho0) / trials
    measured = float(np.mean((rho[off] / rho0[off]).real))
    err = float(per_trial.std(ddof=1) / np.sqrt(trials))
    return (1 - 2 * p_d) ** 2, measured, err
