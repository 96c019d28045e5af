from math import lgamma

import numpy as np
import pytest
from scipy.linalg import expm

from loqcsim import fock, nonfock
from loqcsim.errors import InconsistencyError, ParameterError

CUTOFF = 60


def _rotate(psi, theta, phases=(0.0, 0.0)):
    """Truncated two-mode beamsplitter exp(theta (a^dag b - a b^dag)) then
    output phase shifts, applied photon-number sector by sector."""
    K = psi.shape[0] - 1
    out = np.zeros_like(psi, dtype=complex)
    for N in range(K + 1):
        G = np.zeros((N + 1, N + 1))
        for k in range(N):
            v = np.sqrt((k + 1) * (N - k))
            G[k + 1, k] += v
            G[k, k + 1] -= v
        ks = np.arange(N + 1)
        out[ks, N - ks] = expm(theta * G) @ psi[ks, N - ks]
    n = np.arange(K + 1)
    return out * np.exp(1j * phases[0] * n)[:, None] * np.exp(1j * phases[1] * n)[None, :]


def _mode_matrix(theta, phases=(0.0, 0.0)):
    one = np.zeros((2, 2), dtype=complex)
    one[1, 0] = 1
    a = _rotate(one, theta, phases)
    one = np.zeros((2, 2), dtype=complex)
    one[0, 1] = 1
    b = _rotate(one, theta, phases)
    return np.array([[a[1, 0], a[0, 1]], [b[1, 0], b[0, 1]]])


def _squeezed(xi, K=CUTOFF):
    c = np.zeros(K + 1)
    for k in range(K // 2 + 1):
        c[2 * k] = (-np.tanh(xi)) ** k * np.exp(0.5 * lgamma(2 * k + 1) - lgamma(k + 1)) / 2 ** k
    return c / np.sqrt(np.cosh(xi))


def _add_photon(c):
    out = np.zeros_like(c)
    out[1:] = np.sqrt(np.arange(1, len(c))) * c[:-1]
    return out / np.linalg.norm(out)


def _coherent(alpha, K=CUTOFF):
    return np.array([nonfock.fock_coefficient(n, alpha) for n in range(K + 1)])


def _displaced_one(alpha, K=CUTOFF):
    # D(a)|1> = (a^dag - conj(a)) |a>
    c = _coherent(alpha, K + 1)
    out = np.sqrt(np.arange(1, K + 2)) * c[:-1]
    return np.concatenate([[0], out[:-1]]) - np.conj(alpha) * c[:-1]


def test_oracle_mode_matrix_is_unitary():
    U = _mode_matrix(0.6, (0.3, 1.1))
    assert np.allclose(U @ U.conj().T, np.eye(2))


@pytest.mark.parametrize("xi", [0.0, 0.3, 0.6])
def test_passv_against_truncated_fock(xi):
    theta = 0.6
    O = _mode_matrix(theta).real
    parity = np.arange(CUTOFF + 1) % 2
    for n in (1, 2):
        a = _add_photon(_squeezed(xi))
        b = _add_photon(_squeezed(xi)) if n == 2 else _squeezed(xi)
        P = np.abs(_rotate(np.outer(a, b), theta)) ** 2
        for pat in [(1, 0), (0, 1), (1, 1)]:
            if sum(pat) != n:
                continue
            mask = (parity[:, None] == pat[0]) & (parity[None, :] == pat[1])
            assert nonfock.passv_sample(O, n, pat, xi) == pytest.approx(P[mask].sum(), abs=1e-9)


def test_passv_is_xi_independent_and_validates():
    O = fock.random_matrix(4, "haar-orthogonal", np.random.default_rng(0))
    pat = ("odd", "even", "odd", "even")
    vals = {nonfock.passv_sample(O, 2, pat, xi) for xi in (0.0, 0.4, 1.3)}
    assert len(vals) == 1
    with pytest.raises(InconsistencyError):
        nonfock.passv_sample(O, 3, pat)
    with pytest.raises(ParameterError):
        nonfock.passv_sample(O, 2, ("odd", "even", "odd", "maybe"))


def test_displacement_element_against_series():
    beta = 0.4 - 0.3j
    for inp in range(3):
        vec = np.zeros(CUTOFF + 1)
        vec[inp] = 1
        # D(beta)|inp> built from (a^dag - conj(beta))^inp |beta> / sqrt(inp!)
        state = _coherent(beta)
        for _ in range(inp):
            nxt = np.zeros_like(state)
            nxt[1:] = np.sqrt(np.arange(1, CUTOFF + 1)) * state[:-1]
            state = nxt - np.conj(beta) * state
        state = state / np.sqrt(np.prod(np.arange(1, inp + 1)))
        for out in range(6):
            assert nonfock.displacement_element(out, inp, beta) == pytest.approx(state[out], abs=1e-12)


def test_dspfs_against_truncated_fock():
    theta, phases = 0.7, (0.4, -1.0)
    U = _mode_matrix(theta, phases)
    alphas = (0.3 + 0.1j, -0.2 + 0.25j)
    out = _rotate(np.outer(_displaced_one(alphas[0]), _displaced_one(alphas[1])), theta, phases)
    for S in [(0, 0), (1, 1), (2, 0), (0, 3), (2, 1)]:
        assert nonfock.dspfs_amplitude(U, (1, 1), alphas, S) == pytest.approx(out[S], abs=1e-10)


def test_dspfs_counter_displacement_is_fock_sampling():
    U = fock.random_matrix(3, rng=np.random.default_rng(3))
    a = nonfock.dspfs_amplitude(U, (1, 1, 0), (0.2, 0.1, 0.0), (0, 1, 1), counter_displace=True)
    assert a == pytest.approx(fock.output_amplitude(U, (1, 1, 0), (0, 1, 1)))


def test_coherent_propagation_matches_truncated_fock():
    theta, phases = 0.5, (0.2, 0.9)
    U = _mode_matrix(theta, phases)
    alphas = np.array([0.4 + 0.2j, -0.3j])
    out = _rotate(np.outer(_coherent(alphas[0]), _coherent(alphas[1])), theta, phases)
    beta = nonfock.propagate_coherent(U, alphas)
    assert np.allclose(out, np.outer(_coherent(beta[0]), _coherent(beta[1])), atol=1e-12)


def test_cat_state_norm():
    cat = nonfock.CoherentSuperposition.cat(0.8, 1)
    x = 0.64
    assert cat.norm_sq() == pytest.approx(2 - 2 * np.exp(-2 * x))
    assert nonfock.CoherentSuperposition.coherent([0.3, 0.1]).norm_sq() == pytest.approx(1.0)


def test_cat_hom_small_alpha():
    H = fock.hadamard()
    alpha = 1e-3
    cat = nonfock.CoherentSuperposition.cat(alpha, 2)
    amps = [nonfock.cat_amplitude(cat, H, S) for S in [(1, 1), (0, 2), (2, 0)]]
    assert abs(amps[0]) < 10 * alpha ** 2
    assert amps[1] == pytest.approx(-2 ** -0.5, abs=10 * alpha ** 2)
    assert amps[2] == pytest.approx(2 ** -0.5, abs=10 * alpha ** 2)


def test_coherent_input_probabilities_sum_to_one():
    U = fock.random_matrix(2, rng=np.random.default_rng(4))
    state = nonfock.CoherentSuperposition.coherent([0.5, 0.3j])
    K = nonfock.photon_cutoff(0.6)
    total = sum(nonfock.cat_prob(state, U, (a, b)) for a in range(K) for b in range(K))
    assert total == pytest.approx(1.0, abs=1e-6)


def test_hardness_bound():
    b = nonfock.odd_cat_hardness_bound(0.5, 4, k=2)
    single = abs(nonfock.cat_amplitude(nonfock.CoherentSuperposition.cat(0.5, 1), np.eye(1), (1,))) ** 2
    assert b.prob == pytest.approx(single ** 4)
    assert b.threshold == 1 / 16 and b.above_threshold
    with pytest.raises(ParameterError):
        nonfock.odd_cat_hardness_bound(0.0, 3)


def test_spacs():
    st = nonfock.spacs_stats(10, 0.0)
    assert st.probs[-1] == 1.0 and st.regime == "hard"
    st = nonfock.spacs_stats(10000, 1e-4)
    assert st.probs[-1] == pytest.approx(np.exp(-1), rel=0.01)
    assert nonfock.spacs_all_photons(10000, 1e-4) == pytest.approx(st.probs[-1])
    assert nonfock.spacs_stats(10, 200.0).regime == "easy"
    assert nonfock.spacs_stats(10, 1.0).regime == "intermediate"


def test_coherent_propagation_basics():
    H = fock.hadamard()
    assert np.allclose(nonfock.propagate_coherent(H, [0, 0]), 0)
    a = 0.3 + 0.4j
    beta = nonfock.propagate_coherent(H, [a, a])
    assert beta == pytest.approx([np.sqrt(2) * a, 0])
    U = fock.random_matrix(5, rng=np.random.default_rng(1))
    alpha = np.random.default_rng(2).normal(size=5) + 0j
    assert np.linalg.norm(nonfock.propagate_coherent(U, alpha)) == pytest.approx(np.linalg.norm(alpha), abs=1e-12)


def test_pure_coherent_amplitude_is_separable():
    U = fock.random_matrix(3, rng=np.random.default_rng(3))
    alphas = [0.2, -0.1j, 0.3 + 0.1j]
    beta = nonfock.propagate_coherent(U, alphas)
    S = (1, 0, 2)
    expected = np.prod([nonfock.fock_coefficient(s, b) for s, b in zip(S, beta)])
    state = nonfock.CoherentSuperposition.coherent(alphas)
    assert nonfock.cat_amplitude(state, U, S) == pytest.approx(expected)
    vac = nonfock.CoherentSuperposition.coherent([0.0, 0.0, 0.0])
    assert nonfock.cat_amplitude(vac, U, (0, 0, 0)) == pytest.approx(1.0)


def test_hardness_bound_limits():
    assert nonfock.odd_cat_hardness_bound(1e-4, 10).prob == pytest.approx(1.0)
    probs = [nonfock.odd_cat_hardness_bound(0.8, n).prob for n in (5, 10, 20)]
    assert probs[1] == pytest.approx(probs[0] ** 2) and probs[2] == pytest.approx(probs[0] ** 4)
    direct = abs(nonfock.cat_amplitude(nonfock.CoherentSuperposition.cat(0.5, 1), np.eye(1), (1,))) ** 8
    assert nonfock.odd_cat_hardness_bound(0.5, 4).prob == pytest.approx(direct)


def test_spacs_easy_limit():
    n = 1000
    assert nonfock.spacs_stats(n, float(n) ** 2).probs[0] == pytest.approx(1.0, abs=2e-3)


def test_passv_routing_and_hom():
    P = np.eye(4)[[2, 0, 3, 1]]
    pattern = ["even"] * 4
    pattern[2] = pattern[0] = "odd"
    assert nonfock.passv_sample(P, 2, pattern) == pytest.approx(1.0)
    H = fock.hadamard().real
    hom = fock.probabilities(fock.full_distribution(fock.hadamard(), (1, 1)))
    assert nonfock.passv_sample(H, 2, ("odd", "odd")) == pytest.approx(hom[(1, 1)], abs=1e-15)
