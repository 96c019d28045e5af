import numpy as np
import pytest

from loqcsim import walk
from loqcsim.errors import ExtentError, ParameterError


def test_numpy_and_loop_steps_agree():
    rng = np.random.default_rng(0)
    T = 6
    psi = rng.normal(size=(13, 13, 2, 2)) + 1j * rng.normal(size=(13, 13, 2, 2))
    psi[[0, -1]] = 0
    psi[:, [0, -1]] = 0
    live = walk.coin_field(T, 0.6, rng)
    assert np.allclose(walk._step_numpy(psi, live), walk._step_loops(psi, live), atol=1e-14)


def test_first_step_and_norm():
    T = 5
    psi = walk.step(walk.initial_state(T), walk.coin_field(T))
    probs = np.sum(np.abs(psi) ** 2, axis=(2, 3))
    assert np.isclose(probs.sum(), 1.0)
    occupied = {(int(a) - T, int(b) - T) for a, b in zip(*np.nonzero(probs > 1e-15))}
    assert occupied == {(1, 1), (1, -1), (-1, 1), (-1, -1)}


def test_defect_reflects():
    T = 3
    live = walk.coin_field(T)
    live[T, T] = False
    psi = walk.step(walk.initial_state(T), live)
    assert abs(psi[T - 1, T - 1, 1, 1]) == pytest.approx(1.0)


def test_coin_field_keeps_origin_live():
    live = walk.coin_field(10, 0.0, np.random.default_rng(1))
    assert live[10, 10] and live.sum() == 1
    with pytest.raises(ParameterError):
        walk.coin_field(3, 1.5)


def test_extent_guard():
    T = 2
    live = walk.coin_field(T)
    psi = walk.initial_state(T)
    for _ in range(T):
        psi = walk.step(psi, live)
    with pytest.raises(ExtentError):
        walk.step(psi, live)


def test_norm_preserved_with_defects_and_dephasing():
    rng = np.random.default_rng(2)
    marg, psi = walk.run_walk(30, live=walk.coin_field(30, 0.7, rng), p_d=0.2, rng=rng)
    assert np.max(np.abs(marg.sum(axis=1) - 1)) < 1e-12


def test_ballistic_vs_classical_spread():
    marg, _ = walk.run_walk(40)
    var_q = walk.variance_from_marginal(marg)
    var_c = walk.variance_from_marginal(walk.classical_walk_exact(40))
    assert var_c[-1] == pytest.approx(40.0)
    assert var_q[-1] > 5 * var_c[-1]


def test_classical_tokens_match_exact_chain():
    T = 20
    var = walk.classical_walk_tokens(T, 20000, np.random.default_rng(3))
    exact = walk.variance_from_marginal(walk.classical_walk_exact(T))
    # var of 20000 samples of a variance-20 walk: relative error about 1%
    assert var[-1] == pytest.approx(exact[-1], rel=0.05)


def test_classical_chain_with_defects():
    rng = np.random.default_rng(4)
    T = 15
    live = walk.coin_field(T, 0.5, rng)
    marg = walk.classical_walk_exact(T, live)
    assert np.allclose(marg.sum(axis=1), 1.0)
    var_tok = walk.classical_walk_tokens(T, 40000, rng, live)
    assert var_tok[-1] == pytest.approx(walk.variance_from_marginal(marg[-1]), rel=0.05)


def test_metrics():
    px = np.zeros(7)
    px[[1, 5]] = 0.5
    psi = np.zeros((7, 7, 2, 2))
    psi[1, 3, 0, 0] = psi[5, 3, 0, 0] = np.sqrt(0.5)
    assert walk.metrics(psi, 1) == (pytest.approx(4.0), pytest.approx(1.0))
    assert walk.escape_from_marginal(px, 2) == 0.0


def test_ensemble_reproducible_and_threaded():
    a = walk.ensemble_run(12, p=0.8, p_d=0.1, trials=8, seed=5)
    b = walk.ensemble_run(12, p=0.8, p_d=0.1, trials=8, seed=5, threads=4)
    assert np.array_equal(a.variance, b.variance)
    assert np.array_equal(a.escape, b.escape)
    assert np.all(a.variance_err >= 0)


def test_dephasing_map():
    expected, measured, err = walk.dephase_map_check(0.15, 20000, rng=np.random.default_rng(6))
    assert abs(measured - expected) < 4 * err
    with pytest.raises(ParameterError):
        walk.dephase(walk.initial_state(2), -0.1, np.random.default_rng())


def test_first_step_probabilities():
    T = 3
    psi = walk.step(walk.initial_state(T), walk.coin_field(T))
    probs = np.sum(np.abs(psi) ** 2, axis=(2, 3))
    for dx in (1, -1):
        for dy in (1, -1):
            assert probs[T + dx, T + dy] == pytest.approx(0.25)


def test_all_defect_lattice_oscillates():
    T = 10
    live = np.zeros((21, 21), dtype=bool)
    marg, _ = walk.run_walk(T, live=live)
    var = walk.variance_from_marginal(marg)
    assert var.max() <= 1.0 + 1e-12


def test_dephasing_extremes():
    rng = np.random.default_rng(0)
    psi = walk.step(walk.initial_state(4), walk.coin_field(4))
    assert walk.dephase(psi, 0.0, rng) is psi
    assert np.array_equal(walk.dephase(psi, 1.0, rng), -psi)
    expected, measured, err = walk.dephase_map_check(0.5, 20000, rng=rng)
    assert expected == 0 and abs(measured) < 4 * err


def test_initial_metrics():
    assert walk.metrics(walk.initial_state(5), 0) == (0.0, 0.0)


def test_single_trial_ensemble_is_single_run():
    ens = walk.ensemble_run(8, trials=1)
    marg, _ = walk.run_walk(8)
    assert np.array_equal(ens.variance, walk.variance_from_marginal(marg))


def test_full_dephasing_spreads_like_classical_walk():
    T = 30
    ens = walk.ensemble_run(T, p_d=0.5, trials=100, seed=1)
    t = np.arange(10, T + 1)
    slope = np.polyfit(t, ens.variance[10:], 1)[0]
    classical = np.polyfit(t, walk.variance_from_marginal(walk.classical_walk_exact(T))[10:], 1)[0]
    assert slope == pytest.approx(classical, rel=0.15)


def test_defects_slow_spreading():
    T = 25
    clean = walk.variance_from_marginal(walk.run_walk(T)[0])
    ens = walk.ensemble_run(T, p=0.9, trials=100, seed=2)
    # the origin is always live, so t = 1 ties exactly
    assert np.all(ens.variance <= clean + 3 * ens.variance_err + 1e-12)
    assert ens.variance[-1] < clean[-1] - 3 * ens.variance_err[-1]


def test_weak_dephasing_localises_defect_free_walk():
    T = 75
    coherent = walk.run_walk(T)[0][-1]
    noisy = walk.ensemble_run(T, p_d=0.03, trials=20, seed=3).marginal[-1]
    assert walk.variance_from_marginal(noisy) < walk.variance_from_marginal(coherent)
    assert walk.escape_from_marginal(noisy, 20) < walk.escape_from_marginal(coherent, 20)
