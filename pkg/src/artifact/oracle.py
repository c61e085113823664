"""Exact diagonalization and explicit Bethe vectors for small periodic chains.

Conventions
-----------
Site ``m`` (0-based) is tensor axis ``m`` of a ``(2,)*M`` array; local
state 0 is spin up and 1 is spin down, so the flat index of a basis state is
``sum_m down_m 2^(M-1-m)``.  A sector is labelled by ``S3 = M/2 - N`` with
``N`` down spins; its basis is the ascending list of such indices.

The Hamiltonian is ``H = sum_m [sx sx + sy sy + sz sz - 1]`` on bonds
``(m, m+1 mod M)``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from pathlib import Path

import numpy as np
import scipy.sparse as sp

MAX_SITES = 16
MAX_VECTOR_SITES = 14
CACHE_ENV = "ARTIFACT_CACHE_DIR"
CACHE_VERSION = 1
_DEGEN_TOL = 1e-8


class SizeCapError(ValueError):
    """Chain too large for brute-force treatment."""


# --- sector bookkeeping -------------------------------------------------------


def _n_down(M: int, sector) -> int:
    n = Fraction(M, 2) - Fraction(sector).limit_denominator(2)
    if n.denominator != 1 or not 0 <= n <= M:
        raise ValueError(f"no sector S3={sector} for M={M}")
    return int(n)


@lru_cache(maxsize=64)
def sector_basis(M: int, sector) -> np.ndarray:
    """Ascending flat indices of the basis states with ``S3 = sector``."""
    n = _n_down(M, sector)
    out = []
    for downs in combinations(range(M), n):
        out.append(sum(1 << (M - 1 - m) for m in downs))
    return np.array(sorted(out), dtype=np.int64)


def _index_map(basis: np.ndarray) -> dict:
    return {int(b): i for i, b in enumerate(basis)}


def _bit(b: int, m: int, M: int) -> int:
    return (b >> (M - 1 - m)) & 1


def _flip(b: int, m: int, M: int) -> int:
    return b ^ (1 << (M - 1 - m))


def _check_size(M: int, cap: int = MAX_SITES) -> None:
    if M < 2 or M % 2:
        raise ValueError("M must be even and at least 2")
    if M > cap:
        raise SizeCapError(f"M={M} exceeds the brute-force cap {cap}")


# --- operators ----------------------------------------------------------------


def build_hamiltonian(M: int, sector=0) -> sp.csr_matrix:
    """Periodic XXX Hamiltonian restricted to an ``S3`` sector (real symmetric)."""
    _check_size(M)
    basis = sector_basis(M, sector)
    idx = _index_map(basis)
    rows, cols, vals = [], [], []
    for i, b in enumerate(basis):
        b = int(b)
        diag = 0.0
        for m in range(M):
            m2 = (m + 1) % M
            if _bit(b, m, M) != _bit(b, m2, M):
                diag -= 2.0
                j = idx[_flip(_flip(b, m, M), m2, M)]
                rows.append(i)
                cols.append(j)
                vals.append(2.0)
        rows.append(i)
        cols.append(i)
        vals.append(diag)
    n = len(basis)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def translation_operator(M: int, sector=0) -> sp.csr_matrix:
    """Shift by one site: the spin on site ``m`` moves to site ``m+1``."""
    basis = sector_basis(M, sector)
    idx = _index_map(basis)
    rows, cols = [], []
    for i, b in enumerate(basis):
        b = int(b)
        shifted = 0
        for m in range(M):
            if _bit(b, m, M):
                shifted |= 1 << (M - 1 - ((m + 1) % M))
        rows.append(idx[shifted])
        cols.append(i)
    n = len(basis)
    return sp.csr_matrix((np.ones(n), (rows, cols)), shape=(n, n))


def casimir_operator(M: int, sector=0) -> sp.csr_matrix:
    """Total spin ``S^2 = 3M/4 + sum_{i<j} (P_ij - 1/2)`` with ``P`` the swap."""
    basis = sector_basis(M, sector)
    idx = _index_map(basis)
    n = len(basis)
    rows, cols, vals = [], [], []
    const = 0.75 * M - 0.5 * M * (M - 1) / 2
    for i, b in enumerate(basis):
        b = int(b)
        diag = const
        for p in range(M):
            for q in range(p + 1, M):
                if _bit(b, p, M) == _bit(b, q, M):
                    diag += 1.0
                else:
                    rows.append(i)
                    cols.append(idx[_flip(_flip(b, p, M), q, M)])
                    vals.append(1.0)
        rows.append(i)
        cols.append(i)
        vals.append(diag)
    return sp.csr_matrix((vals, (rows, cols)), shape=(n, n))


def sigma_z_diag(M: int, sector, m: int) -> np.ndarray:
    """Diagonal of ``sigma^3_m`` on the sector basis (+1 up, -1 down)."""
    basis = sector_basis(M, sector)
    return np.array([1.0 - 2.0 * _bit(int(b), m, M) for b in basis])


# --- spectral decomposition -----------------------------------------------------------


@dataclass(frozen=True)
class SpectralDecomposition:
    """Full spectrum of one sector with momentum and total-spin labels.

    ``eigenvectors`` has unit-norm columns that are simultaneous
    eigenvectors of ``H``, the translation and ``S^2``; they are complex
    because momentum eigenstates are.  ``momenta[k]`` is the integer ``j``
    with translation eigenvalue ``exp(2 pi i j / M)``.
    """

    M: int
    sector: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    momenta: np.ndarray
    spins: np.ndarray

    @property
    def basis(self) -> np.ndarray:
        return sector_basis(self.M, self.sector)

    def momentum(self, k: int) -> float:
        """Momentum of level ``k`` in ``[0, 2 pi)``."""
        return 2 * np.pi * (int(self.momenta[k]) % self.M) / self.M

    def ground_index(self) -> int:
        return int(np.argmin(self.eigenvalues))


def _cache_path(M: int, sector) -> Path | None:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    tag = str(Fraction(sector).limit_denominator(2)).replace("/", "_").replace("-", "m")
    return Path(root) / f"xxx_v{CACHE_VERSION}_M{M}_S{tag}.npz"


def _load(path: Path, M: int, sector) -> SpectralDecomposition | None:
    try:
        with np.load(path) as z:
            if int(z["version"]) != CACHE_VERSION or int(z["M"]) != M:
                return None
            return SpectralDecomposition(
                M, float(sector), z["eigenvalues"], z["eigenvectors"], z["momenta"], z["spins"]
            )
    except (OSError, KeyError, ValueError):
        return None


def _save(path: Path, d: SpectralDecomposition) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp.npz")
    np.savez(
        tmp,
        version=CACHE_VERSION,
        M=d.M,
        sector=d.sector,
        eigenvalues=d.eigenvalues,
        eigenvectors=d.eigenvectors,
        momenta=d.momenta,
        spins=d.spins,
    )
    os.replace(tmp, path)


def _diagonalize(M: int, sector) -> SpectralDecomposition:
    H = build_hamiltonian(M, sector).toarray()
    T = translation_operator(M, sector)
    S2 = casimir_operator(M, sector)
    w, v = np.linalg.eigh(H)
    v = v.astype(complex)
    # resolve degenerate clusters with a generic hermitian combination of
    # commuting symmetries
    start = 0
    n = len(w)
    while start < n:
        stop = start + 1
        while stop < n and w[stop] - w[stop - 1] < _DEGEN_TOL:
            stop += 1
        if stop - start > 1:
            V = v[:, start:stop]
            TV = T @ V
            G = 0.731 * (V.conj().T @ (S2 @ V)) + 0.419 * (V.conj().T @ TV)
            G = G + G.conj().T
            G += 0.283j * (V.conj().T @ TV - (V.conj().T @ TV).conj().T)
            _, u = np.linalg.eigh(G)
            v[:, start:stop] = V @ u
        start = stop
    tv = np.einsum("ij,ij->j", v.conj(), T @ v)
    momenta = np.rint(np.angle(tv) * M / (2 * np.pi)).astype(int) % M
    s2 = np.real(np.einsum("ij,ij->j", v.conj(), S2 @ v))
    spins = np.rint(2 * (-0.5 + np.sqrt(0.25 + np.maximum(s2, 0)))) / 2
    return SpectralDecomposition(M, float(sector), w, v, momenta, spins)


def diagonalize(M: int, sector=0) -> SpectralDecomposition:
    """Full dense diagonalization of one sector, cached on disk when
    the cache environment variable names a directory."""
    _check_size(M)
    path = _cache_path(M, sector)
    if path is not None and path.exists():
        d = _load(path, M, sector)
        if d is not None:
            return d
    d = _diagonalize(M, sector)
    if path is not None:
        _save(path, d)
    return d


@lru_cache(maxsize=16)
def diagonalize_cached(M: int, sector=0) -> SpectralDecomposition:
    """In-process memoized :func:`diagonalize`."""
    return diagonalize(M, sector)


def direct_form_factor(M: int, ground: int, excited: int, m: int = 0, sector=0) -> float:
    """``|<g|sigma^3_m|e>|^2 / (<g|g><e|e>)`` between two levels of a sector."""
    d = diagonalize_cached(M, sector)
    g = d.eigenvectors[:, ground]
    e = d.eigenvectors[:, excited]
    amp = np.vdot(g, sigma_z_diag(M, sector, m) * e)
    return float(abs(amp) ** 2 / (np.vdot(g, g).real * np.vdot(e, e).real))


def all_form_factors(M: int, m: int = 0) -> np.ndarray:
    """Form factors from the ground state to every level of sector 0."""
    d = diagonalize_cached(M, 0)
    g = d.eigenvectors[:, d.ground_index()]
    amps = d.eigenvectors.conj().T @ (sigma_z_diag(M, 0, m) * g)
    return np.abs(amps) ** 2


# --- explicit Bethe vectors ---------------------------------------------------


def _rmatrix(lam: complex) -> np.ndarray:
    # basis (aux, site) with 0 = up; f and g as in the rational R-matrix
    f = lam / (lam + 1j)
    g = 1j / (lam + 1j)
    R = np.zeros((2, 2, 2, 2), dtype=complex)  # R[a', s', a, s]
    R[0, 0, 0, 0] = R[1, 1, 1, 1] = 1.0
    R[0, 1, 0, 1] = R[1, 0, 1, 0] = f
    R[1, 0, 0, 1] = R[0, 1, 1, 0] = g
    return R


def _apply_chain(v: np.ndarray, lam: complex, M: int, aux_in: int, aux_out: int, transpose: bool) -> np.ndarray:
    # sequentially apply L_1 ... L_M (each R(lam - i/2) on aux x site m)
    R = _rmatrix(lam - 0.5j)
    if transpose:
        R = R.transpose(0, 3, 2, 1)  # partial transpose on the site legs
    psi = np.zeros((2,) + (2,) * M, dtype=complex)
    psi[aux_in] = v.reshape((2,) * M)
    for m in range(M):
        # contract aux (axis 0) and site m (axis m+1)
        psi = np.tensordot(R, psi, axes=([2, 3], [0, m + 1]))
        # result axes: a', s', then the remaining site axes in order without m
        psi = np.moveaxis(psi, 1, m + 1)
    return psi[aux_out].reshape(-1)


def b_operator(lam: complex, v: np.ndarray, M: int) -> np.ndarray:
    """Action of ``B(lam)`` on a full-space vector."""
    return _apply_chain(v, lam, M, aux_in=1, aux_out=0, transpose=False)


def c_transpose_operator(lam: complex, v: np.ndarray, M: int) -> np.ndarray:
    """Action of ``C(lam)^T`` (transpose in the quantum space)."""
    return _apply_chain(v, lam, M, aux_in=0, aux_out=1, transpose=True)


def reference_vector(M: int) -> np.ndarray:
    v = np.zeros(2**M, dtype=complex)
    v[0] = 1.0
    return v


def bethe_vector(roots, M: int) -> np.ndarray:
    """``prod B(lambda) |0>`` in the full ``2^M`` space (unnormalized)."""
    _check_size(M, MAX_VECTOR_SITES)
    v = reference_vector(M)
    for lam in np.atleast_1d(np.asarray(roots, dtype=complex)):
        v = b_operator(lam, v, M)
    return v


def dual_bethe_vector(roots, M: int) -> np.ndarray:
    """Column form of ``<0| prod C(mu)`` (bilinear, no conjugation)."""
    _check_size(M, MAX_VECTOR_SITES)
    v = reference_vector(M)
    for mu in np.atleast_1d(np.asarray(roots, dtype=complex))[::-1]:
        v = c_transpose_operator(mu, v, M)
    return v


def lowering(v: np.ndarray, M: int) -> np.ndarray:
    """Total ``S^- = sum_m |down><up|_m`` on a full-space vector."""
    t = v.reshape((2,) * M)
    out = np.zeros_like(t)
    for m in range(M):
        src = [slice(None)] * M
        dst = [slice(None)] * M
        src[m], dst[m] = 0, 1
        out[tuple(dst)] += t[tuple(src)]
    return out.reshape(-1)


def raising(v: np.ndarray, M: int) -> np.ndarray:
    """Total ``S^+ = sum_m |up><down|_m``."""
    t = v.reshape((2,) * M)
    out = np.zeros_like(t)
    for m in range(M):
        src = [slice(None)] * M
        dst = [slice(None)] * M
        src[m], dst[m] = 1, 0
        out[tuple(dst)] += t[tuple(src)]
    return out.reshape(-1)


def sigma_z_full(v: np.ndarray, M: int, m: int) -> np.ndarray:
    t = v.reshape((2,) * M).copy()
    sl = [slice(None)] * M
    sl[m] = 1
    t[tuple(sl)] *= -1
    return t.reshape(-1)


def full_hamiltonian_apply(v: np.ndarray, M: int) -> np.ndarray:
    """``H v`` in the full space, used for eigenvector residuals."""
    t = v.reshape((2,) * M)
    out = np.zeros_like(t)
    for m in range(M):
        m2 = (m + 1) % M
        for a in (0, 1):
            for b in (0, 1):
                sl = [slice(None)] * M
                sl[m], sl[m2] = a, b
                blk = t[tuple(sl)]
                if a == b:
                    continue
                out[tuple(sl)] -= 2 * blk
                sw = [slice(None)] * M
                sw[m], sw[m2] = b, a
                out[tuple(sw)] += 2 * blk
    return out.reshape(-1)


def restrict_to_sector(v: np.ndarray, M: int, sector) -> np.ndarray:
    """Components of a full-space vector on a sector basis."""
    return v[sector_basis(M, sector)]
