import numpy as np
import pytest

from loqcsim import fock
from loqcsim.errors import ConservationError, SizeGuardError


def test_small_permanents():
    assert fock.permanent_ryser(np.zeros((0, 0))) == 1
    assert fock.permanent_ryser([[3.0]]) == 3
    assert np.isclose(fock.permanent_ryser([[1, 2], [3, 4]]), 10)


def test_ryser_matches_naive_random():
    rng = np.random.default_rng(5)
    for n in range(1, 8):
        A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        assert np.isclose(fock.permanent_ryser(A), fock.permanent_naive(A), rtol=1e-11)


def test_numpy_subset_kernel_matches_gray_code():
    rng = np.random.default_rng(6)
    A = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
    assert np.isclose(fock._ryser_subsets_np(A), fock._ryser_gray_nb(A), rtol=1e-11)


def test_naive_guard():
    with pytest.raises(SizeGuardError):
        fock.permanent_naive(np.ones((11, 11)))


def test_hom_table():
    dist = fock.full_distribution(fock.hadamard(), (1, 1))
    assert list(dist) == [(2, 0), (1, 1), (0, 2)]
    p = fock.probabilities(dist)
    assert abs(p[(1, 1)]) < 1e-15
    assert abs(p[(2, 0)] - 0.5) < 1e-12 and abs(p[(0, 2)] - 0.5) < 1e-12


def test_distribution_normalised_and_colex():
    U = fock.random_matrix(4, rng=np.random.default_rng(1))
    dist = fock.full_distribution(U, (1, 1, 1, 0))
    assert abs(sum(fock.probabilities(dist).values()) - 1) < 1e-12
    keys = list(dist)
    assert keys == sorted(keys, key=lambda c: tuple(reversed(c)))
    assert len(keys) == 20


def test_conservation_error():
    with pytest.raises(ConservationError):
        fock.output_amplitude(np.eye(2), (1, 0), (1, 1))


def test_identity_and_permutation_routing():
    P = np.eye(3)[[2, 0, 1]]
    dist = fock.full_distribution(P, (2, 1, 0))
    nonzero = {k: v for k, v in fock.probabilities(dist).items() if v > 1e-14}
    assert nonzero == pytest.approx({(1, 0, 2): 1.0})


@pytest.mark.parametrize("kind", ["haar-unitary", "haar-orthogonal"])
def test_random_matrix_is_in_group(kind):
    U = fock.random_matrix(6, kind, np.random.default_rng(2))
    fock.check_mode_matrix(U, "orthogonal" if kind == "haar-orthogonal" else "unitary")


def test_haar_first_moment():
    # E|U_ij|^2 = 1/m for Haar unitaries
    rng = np.random.default_rng(3)
    vals = [abs(fock.random_matrix(3, rng=rng)[0, 1]) ** 2 for _ in range(4000)]
    assert abs(np.mean(vals) - 1 / 3) < 4 * np.std(vals) / np.sqrt(len(vals))


def test_reference_permanents():
    assert fock.permanent_ryser(np.eye(3)) == pytest.approx(1)
    assert abs(fock.permanent_ryser(fock.hadamard())) < 1e-15
    assert fock.permanent_naive(np.ones((3, 3))) == pytest.approx(6)
    assert fock.permanent_naive(np.eye(2)) == 1


def test_hom_amplitude_signs():
    H = fock.hadamard()
    assert fock.output_amplitude(H, (1, 1), (2, 0)) == pytest.approx(2 ** -0.5)
    assert fock.output_amplitude(H, (1, 1), (0, 2)) == pytest.approx(-(2 ** -0.5))
    assert fock.output_amplitude(np.eye(3), (1, 1, 0), (1, 1, 0)) == pytest.approx(1)


def test_distribution_matches_path_sum():
    from itertools import product
    from math import factorial
    U = fock.random_matrix(3, rng=np.random.default_rng(12))
    dist = fock.full_distribution(U, (1, 1, 1))
    paths = {}
    for outs in product(range(3), repeat=3):
        S = tuple(outs.count(j) for j in range(3))
        paths[S] = paths.get(S, 0) + np.prod([U[i, o] for i, o in enumerate(outs)])
    for S, amp in paths.items():
        # each map of photons to outputs is one term; the permanent counts it S! times
        scale = np.sqrt(np.prod([factorial(s) for s in S]))
        assert dist[S] == pytest.approx(amp * scale, abs=1e-12)


def test_single_mode_haar_is_a_phase():
    assert abs(fock.random_matrix(1, rng=np.random.default_rng(0))[0, 0]) == pytest.approx(1)


def test_haar_mean_weight_four_modes():
    rng = np.random.default_rng(13)
    vals = [abs(fock.random_matrix(4, rng=rng)[0, 0]) ** 2 for _ in range(10000)]
    assert np.mean(vals) == pytest.approx(0.25, abs=0.01)


def test_lossy_kind_check():
    fock.check_mode_matrix(0.9 * fock.hadamard(), "lossy-map")
    with pytest.raises(Exception):
        fock.check_mode_matrix(1.1 * fock.hadamard(), "lossy-map")
