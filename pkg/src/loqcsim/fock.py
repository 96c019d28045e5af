"""Fock-state amplitudes through linear-optical networks.

Convention: rows of a transfer matrix index input modes and columns index
output modes, i.e. a_i^dag -> sum_j U[i, j] b_j^dag.
"""
from itertools import combinations_with_replacement, permutations
from math import factorial, sqrt

import numpy as np

from ._accel import USE_NUMBA, njit
from .errors import ConservationError, DimensionError, ParameterError, SizeGuardError

UNITARY_TOL = 1e-10
NAIVE_MAX_N = 10
DEFAULT_MAX_PHOTONS = 8
DEFAULT_MAX_MODES = 12


def _square(M):
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {M.shape}")
    return M


@njit(cache=True)
def _ryser_gray_nb(M):
    n = M.shape[0]
    rowsum = np.zeros(n, dtype=np.complex128)
    total = 0.0 + 0.0j
    gray = 0
    size = 0
    for k in range(1, 1 << n):
        j = 0
        t = k
        while (t & 1) == 0:
            t >>= 1
            j += 1
        gray ^= 1 << j
        if (gray >> j) & 1:
            size += 1
            for i in range(n):
                rowsum[i] += M[i, j]
        else:
            size -= 1
            for i in range(n):
                rowsum[i] -= M[i, j]
        prod = 1.0 + 0.0j
        for i in range(n):
            prod *= rowsum[i]
        if size & 1:
            total -= prod
        else:
            total += prod
    if n & 1:
        return -total
    return total


def _ryser_subsets_np(M, chunk=1 << 14):
    # All column subsets at once, in chunks of the subset index.
    n = M.shape[0]
    total = 0.0 + 0.0j
    bits = 1 << np.arange(n)
    for start in range(1, 1 << n, chunk):
        idx = np.arange(start, min(start + chunk, 1 << n))
        mask = (idx[:, None] & bits[None, :]) != 0
        rowsums = mask.astype(np.complex128) @ M.T
        sizes = mask.sum(axis=1)
        sign = np.where(sizes % 2 == 1, -1.0, 1.0)
        total += np.sum(sign * np.prod(rowsums, axis=1))
    return -total if n % 2 else total


def permanent_ryser(M):
    """Permanent by Ryser's inclusion-exclusion over a Gray-code walk, O(2^n n)."""
    M = _square(M)
    n = M.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    if n == 1:
        return complex(M[0, 0])
    if USE_NUMBA:
        return complex(_ryser_gray_nb(np.ascontiguousarray(M)))
    return complex(_ryser_subsets_np(M))


def permanent_naive(M):
    """Explicit sum over permutations. Guarded to n <= 10."""
    M = _square(M)
    n = M.shape[0]
    if n > NAIVE_MAX_N:
        raise SizeGuardError(f"naive permanent limited to n <= {NAIVE_MAX_N}, got {n}")
    total = 0.0 + 0.0j
    rows = range(n)
    for sigma in permutations(range(n)):
        p = 1.0 + 0.0j
        for i in rows:
            p *= M[i, sigma[i]]
        total += p
    return complex(total)


def _config(c, m=None):
    c = tuple(int(v) for v in c)
    if any(v < 0 for v in c):
        raise ParameterError(f"occupations must be non-negative: {c}")
    if m is not None and len(c) != m:
        raise DimensionError(f"configuration {c} has {len(c)} modes, expected {m}")
    return c


def submatrix(U, inp, out):
    """Rows repeated by input occupation, columns by output occupation."""
    U = np.asarray(U)
    rows = np.repeat(np.arange(len(inp)), inp)
    cols = np.repeat(np.arange(len(out)), out)
    return U[np.ix_(rows, cols)]


def output_amplitude(U, inp, out):
    """Transition amplitude <out| U |inp> for Fock configurations."""
    U = _square(U)
    m = U.shape[0]
    inp = _config(inp, m)
    out = _config(out, m)
    if sum(inp) != sum(out):
        raise ConservationError(f"photon number {sum(inp)} in, {sum(out)} out")
    norm = 1.0
    for k in inp + out:
        norm *= factorial(k)
    return permanent_ryser(submatrix(U, inp, out)) / sqrt(norm)


def configurations(n, m):
    """All occupations of n photons in m modes, colexicographic order."""
    out = []
    for combo in combinations_with_replacement(range(m), n):
        occ = [0] * m
        for mode in combo:
            occ[mode] += 1
        out.append(tuple(occ))
    out.sort(key=lambda c: c[::-1])
    return out


def full_distribution(U, inp, max_photons=DEFAULT_MAX_PHOTONS, max_modes=DEFAULT_MAX_MODES):
    """Amplitude map over every output configuration, in colex order."""
    U = _square(U)
    m = U.shape[0]
    inp = _config(inp, m)
    n = sum(inp)
    if n > max_photons or m > max_modes:
        raise SizeGuardError(f"n={n}, m={m} exceeds cutoff n<={max_photons}, m<={max_modes}")
    return {out: output_amplitude(U, inp, out) for out in configurations(n, m)}


def probabilities(amplitudes):
    return {k: abs(v) ** 2 for k, v in amplitudes.items()}


def random_matrix(m, kind="haar-unitary", rng=None):
    """Haar-random unitary or orthogonal matrix via phase-fixed QR."""
    if m < 1:
        raise ParameterError("m must be >= 1")
    rng = np.random.default_rng() if rng is None else rng
    if kind == "haar-unitary":
        Z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2.0)
    elif kind == "haar-orthogonal":
        Z = rng.standard_normal((m, m))
    else:
        raise ParameterError(f"unknown kind {kind!r}")
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    ph = d / np.abs(d)
    return Q * ph[None, :]


def check_mode_matrix(U, kind="unitary", tol=UNITARY_TOL):
    """Raise if U violates the invariants of its declared kind."""
    U = _square(U)
    m = U.shape[0]
    if kind == "unitary":
        err = np.max(np.abs(U.conj().T @ U - np.eye(m)))
    elif kind == "orthogonal":
        if np.max(np.abs(U.imag)) > tol:
            raise ParameterError("orthogonal matrix has complex entries")
        err = np.max(np.abs(U.real.T @ U.real - np.eye(m)))
    elif kind == "lossy-map":
        err = max(0.0, np.linalg.svd(U, compute_uv=False).max() - 1.0)
    else:
        raise ParameterError(f"unknown kind {kind!r}")
    if err > tol:
        raise ParameterError(f"matrix is not {kind}: deviation {err:.3g}")
    return U


def hadamard():
    return np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / np.sqrt(2.0)
