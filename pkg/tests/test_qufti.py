import numpy as np
import pytest

from loqcsim import fock, qufti


def test_n1_and_phi0():
    assert np.allclose(qufti.qufti_unitary(1, 0.4), [[1]])
    for n in (2, 3, 6):
        assert np.allclose(qufti.qufti_unitary(n, 0.0), np.eye(n))


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_closed_form_matches_dft_product(n):
    assert np.max(np.abs(qufti.qufti_unitary(n, 0.7) - qufti.qufti_unitary_product(n, 0.7))) < 1e-12
    U = qufti.qufti_unitary(n, 0.7)
    assert np.max(np.abs(U.conj().T @ U - np.eye(n))) < 1e-10


def test_removable_singularity():
    U = qufti.qufti_unitary(3, 2 * np.pi / 3)
    assert np.all(np.isfinite(U))
    assert np.allclose(U, qufti.qufti_unitary_product(3, 2 * np.pi / 3))


def test_permanent_examples():
    phi = 0.37
    assert qufti.conjectured_permanent(2, phi) == pytest.approx(np.exp(1j * phi) * np.cos(phi))
    z = np.exp(3j * phi)
    assert qufti.conjectured_permanent(3, phi) == pytest.approx((2 + z) * (1 + 2 * z) / 9)


@pytest.mark.parametrize("n", range(1, 9))
def test_conjecture_against_ryser(n):
    for phi in np.linspace(0.05, 2 * np.pi, 7):
        assert abs(fock.permanent_ryser(qufti.qufti_unitary(n, phi)) - qufti.conjectured_permanent(n, phi)) < 1e-9


def test_signal_properties():
    n = 5
    phis = np.linspace(0, 2 * np.pi, 50)
    P = np.array([qufti.coincidence_prob(n, p) for p in phis])
    assert np.all((P >= 0) & (P <= 1 + 1e-15))
    assert qufti.coincidence_prob(n, 0.3) == pytest.approx(qufti.coincidence_prob(n, 0.3 + 2 * np.pi / n))
    assert qufti.coincidence_prob(4, 0.3) == pytest.approx(qufti.coincidence_prob_numeric(4, 0.3))
    assert qufti.coincidence_prob_numeric(10, 0.3) == pytest.approx(qufti.coincidence_prob(10, 0.3))


def test_phi_zero_and_small_angle():
    s = qufti.signal_and_sensitivity(qufti.QuftiParams(4, 0.0))
    assert s.P == 1.0 and s.dP_dphi == 0.0
    assert not np.isfinite(s.delta_phi) and s.reason
    phi = 1e-3
    assert 1 - qufti.coincidence_prob(2, phi) == pytest.approx(phi ** 2, rel=1e-5)


def test_slope_matches_finite_difference():
    n, phi, h = 4, 0.05, 1e-6
    fd = (qufti.coincidence_prob(n, phi + h) - qufti.coincidence_prob(n, phi - h)) / (2 * h)
    s = qufti.signal_and_sensitivity(qufti.QuftiParams(n, phi))
    assert s.dP_dphi == pytest.approx(abs(fd), rel=1e-6)
    P = s.P
    assert s.delta_phi == pytest.approx(np.sqrt(P - P * P) / abs(fd), rel=1e-6)


def test_baselines():
    assert qufti.small_angle_sensitivity(2) == pytest.approx(0.5)
    assert qufti.small_angle_sensitivity(3) == pytest.approx(0.25)
    N, snl, hl = qufti.orc_baselines(2)
    assert (N, hl) == (2, 0.5) and snl == pytest.approx(0.70710678)
    N, snl, hl = qufti.orc_baselines(10)
    assert hl <= qufti.small_angle_sensitivity(10) <= snl


def test_dephasing_contracts_oscillation():
    n = 4
    clean = [qufti.coincidence_prob(n, p) for p in np.linspace(0, 1.5, 30)]
    noisy = [qufti.coincidence_prob(n, p, 0.01) for p in np.linspace(0, 1.5, 30)]
    assert max(noisy) - min(noisy) <= max(clean) - min(clean)
    assert qufti.dephasing_factor(n, 0.01) < 1
    h = 1e-6
    fd = (qufti.coincidence_prob(n, 0.2 + h, 0.01) - qufti.coincidence_prob(n, 0.2 - h, 0.01)) / (2 * h)
    assert qufti.signal_and_sensitivity(qufti.QuftiParams(n, 0.2, 0.01)).dP_dphi == pytest.approx(abs(fd), rel=1e-6)
