"""Phase-space view of single-photon sampling: characteristic and Wigner
functions of the output state, and the Gaussian integral whose value is the
squared permanent."""
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.linalg import block_diag

from .errors import ParameterError
from .fock import check_mode_matrix, permanent_ryser
from .rng import as_rng

QUAD_MAX_N = 3
MC_MAX_N = 6
CHUNK = 1 << 18


def displacement_overlap_fock1(lam):
    """<1| D(lam) |1>."""
    x = abs(lam) ** 2
    return complex(np.exp(-x / 2) * (1 - x))


def _back_propagate(U, n, m, z):
    U = check_mode_matrix(U)
    if U.shape != (m, m):
        raise ParameterError("matrix size does not match m")
    if not 0 <= n <= m:
        raise ParameterError("need 0 <= n <= m")
    # output displacement z seen by input mode i: sum_j conj(U[i, j]) z_j
    return np.conj(U) @ np.asarray(z, dtype=np.complex128)


def char_w(U, n, m, lambdas):
    """Symmetric characteristic function of the output for single photons in
    the first n input modes."""
    mu = _back_propagate(U, n, m, lambdas)
    x = np.abs(mu) ** 2
    return complex(np.exp(-0.5 * x.sum()) * np.prod(1 - x[:n]))


def wigner(U, n, m, alphas):
    mu = _back_propagate(U, n, m, alphas)
    a2 = np.sum(np.abs(np.asarray(alphas)) ** 2)
    val = (2 / np.pi) ** m * np.exp(-2 * a2) * np.prod(4 * np.abs(mu[:n]) ** 2 - 1)
    return float(np.real(val))


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error: float
    method: str
    evaluations: int
    complete: bool = True


def _reduced_integrand(A, alpha):
    # alpha: (N, n) complex; A: n x n submatrix, rows inputs
    amp = np.abs(alpha @ A) ** 2
    return np.prod(amp, axis=1) * np.prod(np.abs(alpha) ** 2 - 0.5, axis=1)




def _quadrature(A, n, order):
    x, w = np.polynomial.hermite.hermgauss(order)
    # alpha = (x + i y)/sqrt(2) maps e^{-2|alpha|^2} d^2alpha to e^{-x^2-y^2} dx dy / 2
    pts = (x[:, None] + 1j * x[None, :]).ravel() / np.sqrt(2)
    wts = (w[:, None] * w[None, :]).ravel() / 2
    P = pts.size
    total = 0.0
    count = P ** n
    for start in range(0, count, CHUNK):
        idx = np.arange(start, min(start + CHUNK, count))
        digits = np.empty((idx.size, n), dtype=np.int64)
        rem = idx.copy()
        for k in range(n - 1, -1, -1):
            digits[:, k] = rem % P
            rem //= P
        alpha = pts[digits]
        total += np.sum(np.prod(wts[digits], axis=1) * _reduced_integrand(A, alpha))
    return total, count


def integral_prob(U, n, m=None, method="quadrature", budget=None, order=None, rng=None):
    """Probability of one photon in each of the first n outputs, from the
    reduced n-mode phase-space integral.

    Quadrature is exact once ``order`` exceeds n + 1, since the integrand
    times the Gaussian weight is a polynomial of degree at most 2n + 2 in
    each real coordinate. Monte-Carlo samples the Gaussian weight and
    reports a standard error; ``budget`` is the sample count.
    """
    U = check_mode_matrix(U)
    m = U.shape[0] if m is None else m
    if not 1 <= n <= m:
        raise ParameterError("need 1 <= n <= m")
    A = U[:n, :n]
    if method == "quadrature":
        if n > QUAD_MAX_N:
            raise ParameterError(f"quadrature supports n <= {QUAD_MAX_N}")
        order = n + 2 if order is None else order
        total, count = _quadrature(A, n, order)
        return IntegralResult(float((8 / np.pi) ** n * total), 0.0, method, count)
    if method == "monte-carlo":
        if n > MC_MAX_N:
            raise ParameterError(f"Monte-Carlo supports n <= {MC_MAX_N}")
        rng = as_rng(rng)
        budget = 200000 if budget is None else int(budget)
        s1 = s2 = 0.0
        done = 0
        while done < budget:
            k = min(CHUNK, budget - done)
            z = rng.normal(0.0, 0.5, size=(k, n)) + 1j * rng.normal(0.0, 0.5, size=(k, n))
            g = 4.0 ** n * _reduced_integrand(A, z)
            s1 += g.sum()
            s2 += (g ** 2).sum()
            done += k
        mean = s1 / done
        var = max(s2 / done - mean ** 2, 0.0)
        return IntegralResult(float(mean), float(np.sqrt(var / done)), method, done)
    raise ParameterError(f"unknown method {method!r}")


def integral_prob_full(U, n, order=None):
    """Same probability from the overlap of the full m-mode output Wigner
    function with the Wigner function of the detected pattern."""
    U = check_mode_matrix(U)
    m = U.shape[0]
    order = n + 3 if order is None else order
    x, w = np.polynomial.hermite.hermgauss(order)
    # weight e^{-4|alpha|^2}: alpha = (x + i y)/2, d^2alpha = dx dy / 4
    pts = (x[:, None] + 1j * x[None, :]).ravel() / 2
    wts = (w[:, None] * w[None, :]).ravel() / 4
    total = 0.0
    for combo in product(range(pts.size), repeat=m):
        alpha = pts[list(combo)]
        mu = np.conj(U) @ alpha
        poly = np.prod(4 * np.abs(mu[:n]) ** 2 - 1) * np.prod(4 * np.abs(alpha[:n]) ** 2 - 1)
        total += np.prod(wts[list(combo)]) * poly
    return float(np.pi ** m * (2 / np.pi) ** (2 * m) * total.real)


def block_diagonal_check(blocks, permutation=None):
    """Permanent of a permuted block-diagonal matrix, and the product of the
    block permanents."""
    blocks = [np.asarray(b, dtype=np.complex128) for b in blocks]
    for b in blocks:
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise ParameterError("blocks must be square")
    M = block_diag(*blocks)
    if permutation is not None:
        P = np.eye(M.shape[0])[list(permutation)]
        M = P @ M @ P.T
    lhs = permanent_ryser(M)
    rhs = np.prod([permanent_ryser(b) for b in blocks])
    return complex(lhs), complex(rhs)
