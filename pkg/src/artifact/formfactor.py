"""Scalar products, norms and longitudinal form factors of Bethe states.

Conventions follow the explicit operators of :mod:`artifact.oracle`: the
monodromy is normalized so that ``a(nu) = 1`` and ``d(nu) = r(nu) =
((nu - i/2)/(nu + i/2))^M`` on the reference state, and

    tau(nu | lambda) = prod_k (lambda_k - nu + i)/(lambda_k - nu)
                       + d(nu) prod_k (nu - lambda_k + i)/(nu - lambda_k)

is the transfer-matrix eigenvalue.  With ``lambda`` on-shell,

    <0| prod C(mu) prod B(lambda) |0> = det T / det V,
    T_ab = d tau(mu_b | lambda) / d lambda_a,   V_ab = 1/(mu_b - lambda_a).

Every determinant is carried as ``(phase, log|det|)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bethe import BetheState, DeviationUnderflowError, DEVIATION_FLOOR
from .cvlinalg import log_det

HALF_I = 0.5j
COLLISION_TOL = 1e-12
# near-string conjugate pairs within this distance of +-i/2 get the column recombination
PAIR_REGULARIZE = 0.25


class NodeCollisionError(ValueError):
    """An off-shell node coincides with an on-shell root."""


class SelectionRuleError(ValueError):
    """Raised internally when a transition is forbidden."""


@dataclass(frozen=True)
class LogValue:
    """A complex number stored as ``phase * exp(logabs)``."""

    phase: complex
    logabs: float

    @property
    def value(self) -> complex:
        if self.logabs == -np.inf:
            return 0j
        return complex(self.phase * math.exp(self.logabs))

    def __mul__(self, other: "LogValue") -> "LogValue":
        return LogValue(self.phase * other.phase, self.logabs + other.logabs)

    def __truediv__(self, other: "LogValue") -> "LogValue":
        return LogValue(self.phase / other.phase, self.logabs - other.logabs)

    @classmethod
    def from_complex(cls, z: complex) -> "LogValue":
        z = complex(z)
        if z == 0:
            return cls(0j, -np.inf)
        return cls(z / abs(z), math.log(abs(z)))

    @classmethod
    def from_log(cls, w: complex) -> "LogValue":
        """From a complex logarithm."""
        return cls(complex(np.exp(1j * w.imag)), float(w.real))


@dataclass
class SlavnovBuild:
    """Assembled Slavnov matrix for ``<0| prod C(mu) prod B(lambda) |0>``."""

    off_shell_nodes: np.ndarray
    on_shell_state: BetheState
    matrix: np.ndarray
    prefactor: LogValue  # column scales of the matrix over det V


@dataclass
class FormFactorResult:
    """A longitudinal form factor ``|F^z|^2`` with its provenance."""

    value: float
    method: str
    M: int
    holes: tuple[float, ...] = ()
    descriptor: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in ("finite-determinant", "exact-diag", "thermo-2spinon", "thermo-4spinon"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.value < -1e-12:
            raise ValueError("form factor must be non-negative")


# --- building blocks ---------------------------------------------------------------


def _roots(state_or_roots) -> np.ndarray:
    if isinstance(state_or_roots, BetheState):
        return np.asarray(state_or_roots.roots, dtype=complex)
    return np.atleast_1d(np.asarray(state_or_roots, dtype=complex))


def _d(nu: complex, M: int) -> complex:
    # zero of r at nu = i/2 is exact, not computed
    if nu == HALF_I:
        return 0j
    return ((nu - HALF_I) / (nu + HALF_I)) ** M


def transfer_eigenvalue(nu: complex, roots, M: int) -> complex:
    """``tau(nu)`` for the on-shell root set ``roots`` on an ``M``-site chain.

    At a root ``lambda_j`` both terms have a pole whose residues cancel by
    the Bethe equation; the finite limit ``i (B' - A') + A + B`` is used,
    with ``A``, ``B`` the two terms stripped of their ``j`` factor.
    """
    lam = _roots(roots)
    nu = complex(nu)
    x = lam - nu
    if len(lam) and np.min(np.abs(x)) < COLLISION_TOL:
        j = int(np.argmin(np.abs(x)))
        y = np.delete(lam, j) - lam[j]
        A = np.prod((y + 1j) / y)
        B = _d(lam[j], M) * np.prod((1j - y) / (-y))
        dA = A * np.sum(1 / y - 1 / (y + 1j))
        dB = B * (M * (1 / (lam[j] - HALF_I) - 1 / (lam[j] + HALF_I)) + np.sum(1 / (1j - y) + 1 / y))
        return complex(1j * (dB - dA) + A + B)
    t1 = np.prod((x + 1j) / x)
    t2 = _d(nu, M) * np.prod((-x + 1j) / (-x)) if nu != HALF_I else 0j
    return complex(t1 + t2)


def _log_r(nu: complex, M: int) -> complex:
    return M * (np.log(nu - HALF_I) - np.log(nu + HALF_I))


def _tau_derivative_parts(mu: complex, lam: np.ndarray, M: int) -> list[tuple[complex, np.ndarray]]:
    # d tau(mu | lambda)/d lambda_a as sum_k exp(w_k) v_k; the second term is absent at mu = i/2
    x = lam - mu
    w1 = complex(np.sum(np.log((x + 1j) / x)))
    parts = [(w1, -1j / (x * (x + 1j)))]
    if mu != HALF_I:
        w2 = complex(_log_r(mu, M) + np.sum(np.log((1j - x) / (-x))))
        parts.append((w2, -1j / (x * (1j - x))))
    return parts


def _combine(parts) -> tuple[np.ndarray, float]:
    shift = max(w.real for w, _ in parts)
    return sum(np.exp(w - shift) * v for w, v in parts), shift


def _tau_derivative_column(mu: complex, lam: np.ndarray, M: int) -> tuple[np.ndarray, float]:
    """Column ``d tau(mu | lambda)/d lambda_a`` scaled by ``exp(-shift)``."""
    return _combine(_tau_derivative_parts(mu, lam, M))


def _string_partners(mu: np.ndarray) -> list[tuple[int, int]]:
    # (upper, lower) index pairs mu = c +- i(1/2 + eps) of near-string conjugate pairs
    out = []
    used = set()
    for p, m in enumerate(mu):
        if m.imag <= 0 or abs(m.imag - 0.5) > PAIR_REGULARIZE or m == HALF_I:
            continue
        for q, m2 in enumerate(mu):
            if q not in used and m2.real == m.real and m2.imag == -m.imag:
                out.append((p, q))
                used.add(q)
                break
    return out


def _pair_column(mu_p: complex, lam: np.ndarray, M: int, eps: float | None = None) -> tuple[np.ndarray, float]:
    """Column of ``mu^-`` plus ``d(mu^-)/a(mu^+)`` times the column of ``mu^+``.

    The leading terms of the two columns are parallel up to ``O(eps)``; their
    difference is written in closed form so the determinant keeps its digits.
    ``eps`` is the unrounded deviation when known (``1/2 + eps`` loses its
    low digits in the root itself).
    """
    c = mu_p.real
    if eps is None:
        eps = mu_p.imag - 0.5  # exact for a float imaginary part near 1/2
    mu_q = complex(c, -mu_p.imag)
    (w1p, _), (w2p, v2p) = _tau_derivative_parts(mu_p, lam, M)
    (w1q, v1q), (w2q, _) = _tau_derivative_parts(mu_q, lam, M)
    u = lam - c
    xp = u - 1j * (0.5 + eps)
    xq = u + 1j * (0.5 + eps)
    dv = 4 * eps * u / (xp * xq * (xq - 2j * eps) * (xp + 2j * eps))
    return _combine([(w1q, v1q), (w2q, dv), (w2q + w2p - w1p, v2p)])


def _log_cauchy_det(x: np.ndarray, y: np.ndarray) -> LogValue:
    # det[1/(x_i - y_j)] as a sum of complex logs
    n = len(x)
    w = 0j
    for i in range(n):
        for j in range(i + 1, n):
            w += np.log(x[j] - x[i]) + np.log(y[i] - y[j])
    w -= np.sum(np.log(x[:, None] - y[None, :]))
    return LogValue.from_log(complex(w))


def slavnov_matrix(mu, state: BetheState, deviations: dict | None = None) -> SlavnovBuild:
    """Assemble ``T`` and ``1/det V`` without evaluating the determinant.

    ``deviations`` maps the centre of a close pair in ``mu`` to its exact
    deviation.
    """
    deviations = deviations or {}
    mu = _roots(mu)
    lam = _roots(state)
    if len(mu) != len(lam):
        raise ValueError("Slavnov matrix needs |mu| = |lambda|")
    if len(lam) and np.min(np.abs(mu[:, None] - lam[None, :])) < COLLISION_TOL:
        raise NodeCollisionError("off-shell node equals an on-shell root; use gaudin_norm")
    T = np.empty((len(lam), len(mu)), dtype=complex)
    shift = 0.0
    lower = {q: p for p, q in _string_partners(mu)}
    for b, m in enumerate(mu):
        if b in lower:
            # column operation, determinant unchanged
            up = mu[lower[b]]
            T[:, b], sh = _pair_column(up, lam, state.M, deviations.get(up.real))
        else:
            T[:, b], sh = _tau_derivative_column(m, lam, state.M)
        shift += sh
    # V_ab = 1/(mu_b - lambda_a) = -1/(lambda_a - mu_b)
    cv = _log_cauchy_det(lam, mu)
    detV = LogValue(cv.phase * (-1) ** len(lam), cv.logabs)
    return SlavnovBuild(mu, state, T, LogValue(1 / detV.phase, shift - detV.logabs))


def log_slavnov_scalar_product(mu, state: BetheState, deviations: dict | None = None) -> LogValue:
    b = slavnov_matrix(mu, state, deviations)
    ph, la = log_det(b.matrix)
    return LogValue(ph, la) * b.prefactor


def slavnov_scalar_product(mu, state: BetheState) -> complex:
    """``<0| prod C(mu) prod B(lambda) |0>`` with ``lambda`` the roots of ``state``.

    Returns an exact zero when the cardinalities differ (the two vectors
    then live in different magnetization sectors).
    """
    mu = _roots(mu)
    if len(mu) != len(state.roots):
        return 0j
    return log_slavnov_scalar_product(mu, state).value


# --- Gaudin norm -----------------------------------------------------------------


def _pair_indices(state: BetheState) -> list[tuple[int, int]]:
    n_r = len(state.real_roots)
    return [(n_r + 2 * p, n_r + 2 * p + 1) for p in range(len(state.close_pairs))]


def gaudin_matrix(state: BetheState, *, drop_pairs: bool = False) -> np.ndarray:
    """Jacobian of the logarithmic Bethe equations in the root variables.

    With ``drop_pairs`` the divergent kernel ``K(lambda^+ - lambda^-)`` of
    every close pair is left out (it is restored analytically by
    :func:`log_gaudin_norm`).
    """
    lam = _roots(state)
    N = len(lam)
    d = lam[:, None] - lam[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        K = 2.0 / (1.0 + d * d)
    np.fill_diagonal(K, 0.0)
    if drop_pairs:
        for p, q in _pair_indices(state):
            K[p, q] = K[q, p] = 0.0
    G = K.copy()
    G[np.diag_indices(N)] = state.M * 4.0 / (1.0 + 4.0 * lam * lam) - K.sum(axis=1)
    return G


def log_gaudin_norm(state: BetheState) -> LogValue:
    """``<0| prod C(lambda) prod B(lambda) |0>`` in log form.

    The norm is ``prod_{a != b} f(lambda_a - lambda_b) det(-G)`` with
    ``f(x) = (x + i)/x``.  For a close pair ``f(lambda^- - lambda^+) =
    2 delta/(1 + 2 delta)`` vanishes while ``K(lambda^+ - lambda^-) = -1/(2
    delta (1 + delta))`` diverges; the product is taken analytically and the
    determinant is split by multilinearity in the recombined column.
    """
    lam = _roots(state)
    N = len(lam)
    pairs = _pair_indices(state)
    for cp in state.close_pairs:
        if abs(cp.deviation) < DEVIATION_FLOOR:
            raise DeviationUnderflowError("close-pair deviation below resolution")
    skip = {(q, p) for p, q in pairs}  # (lambda^-, lambda^+) factor handled below
    w = 0j
    for a in range(N):
        for b in range(N):
            if a != b and (a, b) not in skip:
                x = lam[a] - lam[b]
                w += np.log((x + 1j) / x)
    pre = LogValue.from_log(complex(w))
    F = -gaudin_matrix(state, drop_pairs=True)
    if not pairs:
        ph, la = log_det(F)
        return pre * LogValue(ph, la)
    for p, q in pairs:
        F[:, p] += F[:, q]
    terms = []
    for choice in itertools.product((0, 1), repeat=len(pairs)):
        A = F.copy()
        coef = 1.0 + 0j
        for (p, q), take, cp in zip(pairs, choice, state.close_pairs):
            e = cp.deviation
            if take:
                # f * kappa; -G carries -kappa (e_p - e_q) in column q
                A[:, q] = 0.0
                A[p, q], A[q, q] = 1.0, -1.0
                coef *= 1.0 / ((1 + e) * (1 + 2 * e))
            else:
                coef *= 2 * e / (1 + 2 * e)
        ph, la = log_det(A)
        if la > -np.inf:
            terms.append((coef * ph, la))
    if not terms:
        return LogValue(0j, -np.inf)
    top = max(la for _, la in terms)
    total = sum(c * np.exp(la - top) for c, la in terms)
    return pre * LogValue.from_complex(total) * LogValue(1.0 + 0j, top)


def gaudin_norm(state: BetheState) -> float:
    """Squared norm ``<psi|psi>`` of the on-shell Bethe vector.

    The Hermitian conjugate of ``prod B(lambda)|0>`` is ``(-1)^N <0| prod
    C(lambda)`` for a self-conjugate root set, so the norm is ``(-1)^N``
    times the bilinear form of :func:`log_gaudin_norm`.
    """
    v = (-1) ** state.N * log_gaudin_norm(state).value
    if v.real <= 0 or abs(v.imag) > 1e-6 * abs(v):
        raise ValueError(f"Gaudin norm not positive real ({v})")
    return float(v.real)


# --- Foda-Wheeler -----------------------------------------------------------------


def _h2(x: complex, y: complex, n: int) -> complex:
    # complete homogeneous polynomial h_n(x, y)
    return sum(x**k * y ** (n - k) for k in range(n + 1))


def foda_wheeler_matrices(mu, state: BetheState, ell: int) -> tuple[np.ndarray, np.ndarray]:
    """Slavnov matrix extended by ``ell`` descendant rows, and the matching
    Cauchy-Vandermonde matrix.

    Sending ``ell`` extra rapidities to infinity turns their rows into

        r_n(mu) = tau_1(mu) h_n(mu, mu - i) - d(mu) tau_2(mu) h_n(mu, mu + i),

    ``n = 0 .. ell-1``, where ``tau_1``, ``tau_2`` are the two terms of the
    transfer eigenvalue; the Cauchy rows become ``mu^n``.
    """
    mu = _roots(mu)
    lam = _roots(state)
    N = len(lam)
    if len(mu) != N + ell:
        raise ValueError("Foda-Wheeler product needs |mu| = N + ell")
    if N and np.min(np.abs(mu[:, None] - lam[None, :])) < COLLISION_TOL:
        raise NodeCollisionError("off-shell node equals an on-shell root")
    T = np.empty((N + ell, N + ell), dtype=complex)
    V = np.empty((N + ell, N + ell), dtype=complex)
    for b, m in enumerate(mu):
        x = lam - m
        col, sh = _tau_derivative_column(m, lam, state.M)
        T[:N, b] = col * np.exp(sh)
        t1 = np.prod((x + 1j) / x)
        t2 = _d(m, state.M) * np.prod((1j - x) / (-x))
        T[N:, b] = [t1 * _h2(m, m - 1j, n) - t2 * _h2(m, m + 1j, n) for n in range(ell)]
        V[:N, b] = 1.0 / (m - lam)
        V[N:, b] = m ** np.arange(ell)
    return T, V


def foda_wheeler_scalar_product(mu, state: BetheState, ell: int) -> complex:
    """``<0| prod C(mu) (S^-)^ell prod B(lambda) |0>`` for on-shell ``lambda``.

    Equals ``det T / det V`` with the extended matrices of
    :func:`foda_wheeler_matrices`; at ``ell = 0`` it is the Slavnov product.
    """
    if ell < 0:
        raise ValueError("ell must be non-negative")
    if ell == 0:
        return slavnov_scalar_product(mu, state)
    T, V = foda_wheeler_matrices(mu, state, ell)
    pt, lt = log_det(T)
    pv, lv = log_det(V)
    return complex(pt / pv * np.exp(lt - lv))


def large_rapidity_limit(mu, state: BetheState, ell: int, R: float = 1e6) -> complex:
    """Richardson-extrapolated ``prod (R_j / i) S(mu; lambda u {R_j})``.

    Independent route to :func:`foda_wheeler_scalar_product`: the extra
    rapidities ``R_j = R (1 + j)`` are sent to infinity.
    """
    lam = _roots(state)

    def at(Rv):
        Rs = Rv * (1.0 + np.arange(ell))
        ext = BetheState(state.chain, state.s - ell, tuple(lam.real) + tuple(Rs), quantum_numbers=state.quantum_numbers) \
            if not state.close_pairs else None
        if ext is None:
            raise NotImplementedError("large-rapidity oracle only for real-root states")
        b = slavnov_matrix(mu, ext)
        ph, la = log_det(b.matrix)
        val = (LogValue(ph, la) * b.prefactor).value
        return val * np.prod(Rs / 1j)

    # corrections are a series in 1/R: three-level Richardson
    f1, f2, f4 = at(R), at(2 * R), at(4 * R)
    g2, g4 = 2 * f2 - f1, 2 * f4 - f2
    return (4 * g4 - g2) / 3


# --- form factors ---------------------------------------------------------------


def eigenvalue_ratio_finite(nu: complex, ground: BetheState, excited: BetheState) -> complex:
    """``tau_e(nu) / tau_g(nu)``."""
    if ground.M != excited.M:
        raise ValueError("states live on different chains")
    tg = transfer_eigenvalue(nu, ground, ground.M)
    te = transfer_eigenvalue(nu, excited, excited.M)
    if abs(tg) < 1e-300:
        raise NodeCollisionError("nu is a zero of the ground-state eigenvalue")
    return te / tg


def _shift_eigenvalue(lam: np.ndarray) -> LogValue:
    # tau(i/2) = prod (lambda + i/2)/(lambda - i/2), a pure phase for self-conjugate sets
    return LogValue.from_log(complex(np.sum(np.log((lam + HALF_I) / (lam - HALF_I)))))


def longitudinal_ff_finite(ground: BetheState, excited: BetheState) -> FormFactorResult:
    """``|<g|sigma^z_m|e>|^2 / (<g|g><e|e>)`` from determinants.

    ``excited`` is the highest-weight triplet; its ``S^z = 0`` descendant
    is reached through ``sigma^z_m S^- = S^- sigma^z_m - 2 sigma^-_m`` with
    ``<g|S^- = 0``, and ``sigma^-_1 = B(i/2) / tau(i/2)``.  This gives

        |F^z|^2 = -2 S^2 / (tau_e(i/2) tau_g(i/2) <g|g> <e|e>),
        S = <0| prod C(mu u {i/2}) prod B(lambda) |0>,

    where the sign comes from the Hermitian norms (``N_g + N_e`` is odd).
    """
    M = ground.M
    if excited.M != M:
        raise ValueError("states live on different chains")
    if ground.s != 0:
        raise ValueError("ground must be a singlet state")
    desc = {
        "excited_quantum_numbers": tuple(excited.quantum_numbers.values),
        "excited_spin": excited.s,
        "close_pairs": [(p.center, p.deviation) for p in excited.close_pairs],
    }
    if excited.s != 1:
        reason = "singlet excitation" if excited.s == 0 else f"spin {excited.s} excitation"
        return FormFactorResult(0.0, "finite-determinant", M, tuple(excited.holes), desc,
                                {"selection_rule": reason})
    lam = _roots(ground)
    mu = _roots(excited)
    devs = {p.center: p.deviation for p in excited.close_pairs}
    S = log_slavnov_scalar_product(np.append(mu, HALF_I), ground, devs)
    ng = log_gaudin_norm(ground)
    ne = log_gaudin_norm(excited)
    # bilinear norms: ng * ne = -<g|g><e|e>
    val = LogValue(2.0 + 0j, 0.0) * S * S / (_shift_eigenvalue(mu) * _shift_eigenvalue(lam) * ng * ne)
    z = val.value
    diag = {
        "imag_ratio": abs(z.imag) / abs(z) if z != 0 else 0.0,
        "min_deviation": min((abs(p.deviation) for p in excited.close_pairs), default=None),
        "log_abs": val.logabs,
    }
    return FormFactorResult(max(float(z.real), 0.0), "finite-determinant", M, tuple(excited.holes), desc, diag)
