"""Bethe equations of the periodic XXX chain.

Roots ``lambda`` solve ``r(lambda_a) prod_{k != a} (lambda_a - lambda_k + i) /
(lambda_a - lambda_k - i) = 1`` with ``r(lambda) = ((lambda - i/2) /
(lambda + i/2))^M``.  Real roots are found from the logarithmic form

    M Theta_1(x_j) - sum_{k != j} Theta_2(x_j - x_k) = 2 pi Q_j,
    Theta_kappa(x) = 2 arctan(2 x / kappa),

and close pairs ``c +- i(1/2 + delta)`` are carried as ``(c, log|delta|)``
so that exponentially small deviations keep their digits.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import optimize

NEWTON_MAX_ITER = 200
NEWTON_MAX_HALVINGS = 8
REAL_TOL = 1e-12
STEP_TOL = 1e-13
DEVIATION_FLOOR = 1e-13


class BetheError(RuntimeError):
    """Base class for solver failures."""


class ConvergenceError(BetheError):
    pass


class InadmissibleError(ValueError):
    pass


class WindowError(ValueError):
    pass


class BranchPointError(ValueError):
    pass


class DeviationUnderflowError(BetheError):
    pass


class IncompleteEnumerationError(BetheError):
    def __init__(self, found, expected):
        super().__init__(f"found {found} higher-level solutions, expected {expected}")
        self.found = found
        self.expected = expected


# --- data -----------------------------------------------------------------


@dataclass(frozen=True)
class ChainSpec:
    """Periodic isotropic chain; coupling and anisotropy are fixed to 1."""

    M: int

    def __post_init__(self):
        if self.M < 2 or self.M % 2:
            raise ValueError("M must be even and at least 2")


@dataclass(frozen=True)
class QuantumNumberSet:
    """Strictly increasing half-integers, all of one parity."""

    values: tuple[float, ...]

    def __post_init__(self):
        v = tuple(float(x) for x in self.values)
        if any(abs(2 * x - round(2 * x)) > 1e-12 for x in v):
            raise InadmissibleError("quantum numbers must be half-integers")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise InadmissibleError("quantum numbers must be strictly increasing")
        if len({round(2 * x) % 2 for x in v}) > 1:
            raise InadmissibleError("quantum numbers of mixed parity")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)


@dataclass(frozen=True)
class ClosePair:
    """Roots ``center +- i (1/2 + deviation)``; ``number`` is the centre's integer."""

    center: float
    deviation: float
    number: int = 0

    @property
    def roots(self) -> tuple[complex, complex]:
        y = 0.5 + self.deviation
        return complex(self.center, y), complex(self.center, -y)


@dataclass(frozen=True)
class BetheState:
    chain: ChainSpec
    s: float
    real_roots: tuple[float, ...]
    close_pairs: tuple[ClosePair, ...] = ()
    wide_pairs: tuple[complex, ...] = ()
    holes: tuple[float, ...] = ()
    quantum_numbers: QuantumNumberSet = field(default_factory=lambda: QuantumNumberSet(()))
    hole_numbers: tuple[float, ...] = ()
    residual: float = 0.0

    @property
    def M(self) -> int:
        return self.chain.M

    @property
    def roots(self) -> np.ndarray:
        out = [complex(x) for x in self.real_roots]
        for p in self.close_pairs:
            out.extend(p.roots)
        for w in self.wide_pairs:
            out.extend([w, w.conjugate()])
        return np.array(out, dtype=complex)

    @property
    def N(self) -> int:
        return len(self.real_roots) + 2 * len(self.close_pairs) + 2 * len(self.wide_pairs)

    @property
    def n_tilde(self) -> int:
        return len(self.close_pairs) + 2 * len(self.wide_pairs)

    @property
    def n_holes(self) -> int:
        return int(round(2 * self.s)) + 2 * self.n_tilde


@dataclass(frozen=True)
class HigherLevelState:
    holes: tuple[float, ...]
    roots: tuple[complex, ...]
    residual: float


# --- elementary functions --------------------------------------------------


def theta(x, kappa: float = 1.0):
    """``Theta_kappa(x) = 2 arctan(2 x / kappa)``."""
    return 2.0 * np.arctan(2.0 * np.asarray(x) / kappa)


def theta_prime(x, kappa: float = 1.0):
    x = np.asarray(x)
    return 4.0 * kappa / (kappa * kappa + 4.0 * x * x)


def theta_pair(x, deviation: float):
    """Sum of ``Theta_2`` over a close pair at ``x +- i(1/2 + deviation)``,
    continuous in ``x`` and running from ``-2 pi`` to ``2 pi``."""
    x = np.asarray(x, dtype=float)
    return 2 * np.pi - 2 * np.arctan2(0.5 - deviation, x) - 2 * np.arctan2(1.5 + deviation, x)


def bare_energy(lam):
    """``eps_0 = -2 / (lambda^2 + 1/4)``."""
    lam = np.asarray(lam)
    return -2.0 / (lam * lam + 0.25)


def bare_momentum(lam):
    """``p_0 = pi - 2 arctan(2 lambda)``."""
    return np.pi - 2.0 * np.arctan(2.0 * np.asarray(lam))


def max_quantum_number(M: int, s: float) -> float:
    """``Q_max = M/4 + (s - 1)/2``."""
    return M / 4 + (s - 1) / 2


def quantum_number_window(M: int, s: float) -> np.ndarray:
    """All admissible real-root quantum numbers ``-Q_max .. Q_max``."""
    qmax = max_quantum_number(M, s)
    if qmax < 0:
        return np.zeros(0)
    n = int(round(2 * qmax)) + 1
    return -qmax + np.arange(n)


def ground_state_quantum_numbers(chain: ChainSpec) -> QuantumNumberSet:
    """``Q_a = a - (M + 2)/4`` for ``a = 1 .. M/2``."""
    M = chain.M
    return QuantumNumberSet(tuple(a - (M + 2) / 4 for a in range(1, M // 2 + 1)))


# --- Newton -----------------------------------------------------------------


def _newton(fun, jac, x0, *, tol=REAL_TOL, max_iter=NEWTON_MAX_ITER):
    x = np.array(x0, dtype=float)
    f = fun(x)
    norm = np.max(np.abs(f))
    for _ in range(max_iter):
        if norm < tol:
            return x, norm
        J = jac(x)
        try:
            step = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("singular Jacobian") from exc
        t = 1.0
        for _ in range(NEWTON_MAX_HALVINGS + 1):
            xn = x + t * step
            fn = fun(xn)
            nn = np.max(np.abs(fn)) if np.all(np.isfinite(fn)) else np.inf
            if nn < norm or nn < tol:
                break
            t *= 0.5
        else:
            # accept the smallest step anyway; stagnation is caught below
            pass
        if not np.isfinite(nn):
            raise ConvergenceError("Newton iterate left the domain")
        x, f, norm = xn, fn, nn
        if np.max(np.abs(t * step)) < STEP_TOL and norm < 1e3 * tol:
            return x, norm
    if norm < tol:
        return x, norm
    raise ConvergenceError(f"no convergence after {max_iter} iterations, residual {norm:.3g}")


def _initial_guess(q: np.ndarray, M: int, s: float) -> np.ndarray:
    ang = 2 * np.pi * q / M
    if np.all(np.abs(ang) < np.pi / 2 - 1e-3):
        return np.arcsinh(np.tan(ang)) / np.pi
    # edge quantum numbers: squeeze the angle to stay below pi/2
    ang = np.pi * q / (M / 2 + s + 1)
    return np.arcsinh(np.tan(ang)) / np.pi


# --- real roots -------------------------------------------------------------------


def _real_equations(x, q, M, pairs=()):
    d = x[:, None] - x[None, :]
    out = M * theta(x, 1) - theta(d, 2).sum(axis=1) - 2 * np.pi * q
    for c, dev in pairs:
        out -= theta_pair(x - c, dev)
    return out


def _real_jacobian(x, M):
    d = x[:, None] - x[None, :]
    k = theta_prime(d, 2)
    np.fill_diagonal(k, 0.0)
    J = k.copy()
    J[np.diag_indices_from(J)] = M * theta_prime(x, 1) - k.sum(axis=1)
    return J


def solve_real_roots(chain: ChainSpec, q: QuantumNumberSet) -> BetheState:
    """Real solution of the logarithmic Bethe equations for quantum numbers ``q``."""
    M = chain.M
    N = len(q)
    s = M / 2 - N
    if s < 0:
        raise InadmissibleError("more roots than M/2")
    qa = q.as_array()
    if N and abs((2 * qa[0]) % 2 - (N - 1) % 2) > 1e-9:
        raise InadmissibleError(f"quantum numbers must be congruent to (N-1)/2 mod 1 for N={N}")
    qmax = max_quantum_number(M, s)
    if N and np.max(np.abs(qa)) > qmax + 1e-12:
        raise InadmissibleError(f"|Q| exceeds Q_max={qmax}")
    if N == 0:
        st = BetheState(chain, s, (), quantum_numbers=q)
        return _attach_holes(st)
    x0 = _initial_guess(qa, M, s)
    x, _ = _newton(lambda x: _real_equations(x, qa, M), lambda x: _real_jacobian(x, M), x0)
    order = np.argsort(x)
    x = x[order]
    st = BetheState(chain, s, tuple(float(v) for v in x), quantum_numbers=q)
    st = replace(st, residual=bethe_residual(st))
    return _attach_holes(st)


# --- close pairs ------------------------------------------------------------------


def _phase_factor(re, im):
    # continuous arg of (z + i)/(z - i) for z = re + i im
    return np.arctan2(im + 1.0, re) - np.arctan2(im - 1.0, re)


def _logmod_factor(re, im):
    # log |(z + i)/(z - i)|
    return 0.5 * (np.log(re * re + (im + 1) ** 2) - np.log(re * re + (im - 1) ** 2))


def _pair_equations(z, qa, js, signs, M, n_r):
    x = z[:n_r]
    cs = z[n_r::2]
    us = z[n_r + 1 :: 2]
    devs = signs * np.exp(us)
    out = np.empty_like(z)
    out[:n_r] = _real_equations(x, qa, M, list(zip(cs, devs)))
    for p, (c, e) in enumerate(zip(cs, devs)):
        ph = 2 * M * (np.arctan2(e, c) - np.arctan2(1 + e, c))
        d = c - x
        ph += np.sum(2 * np.arctan2(1.5 + e, d) - 2 * np.arctan2(e - 0.5, d))
        lm = 0.5 * M * (np.log(c * c + e * e) - np.log(c * c + (1 + e) ** 2))
        lm += np.sum(0.5 * (np.log(d * d + (1.5 + e) ** 2) - np.log(d * d + (e - 0.5) ** 2)))
        for p2, (c2, e2) in enumerate(zip(cs, devs)):
            if p2 == p:
                continue
            dc = c - c2
            for sa in (1, -1):
                for sb in (1, -1):
                    im = sa * (0.5 + e) - sb * (0.5 + e2)
                    ph += _phase_factor(dc, im)
                    if sa == 1:
                        lm += _logmod_factor(dc, im)
        out[n_r + 2 * p] = ph - 2 * np.pi * js[p]
        out[n_r + 2 * p + 1] = lm - (np.log(abs(e)) - np.log(abs(1 + e)))
    return out


def _numeric_jacobian(fun, z, h=1e-7):
    n = len(z)
    J = np.empty((n, n))
    for k in range(n):
        dz = np.zeros(n)
        dz[k] = h * max(1.0, abs(z[k]))
        J[:, k] = (fun(z + dz) - fun(z - dz)) / (2 * dz[k])
    return J


def _center_phase(c, e, x, M, others=()):
    ph = 2 * M * (np.arctan2(e, c) - np.arctan2(1 + e, c))
    d = c - np.asarray(x)
    ph += np.sum(2 * np.arctan2(1.5 + e, d) - 2 * np.arctan2(e - 0.5, d))
    for c2, e2 in others:
        for sa in (1, -1):
            for sb in (1, -1):
                ph += _phase_factor(c - c2, sa * (0.5 + e) - sb * (0.5 + e2))
    return ph


def solve_string_state(
    chain: ChainSpec,
    q: QuantumNumberSet,
    center_seeds: Sequence[float],
    *,
    numbers: Sequence[int] | None = None,
    deviation_seed: float = 0.05,
    signs: Sequence[int] | None = None,
    max_iter: int = NEWTON_MAX_ITER,
) -> BetheState:
    """Solve for real roots with quantum numbers ``q`` plus close pairs.

    Parameters
    ----------
    center_seeds : initial pair centres (one per pair).
    numbers : integers fixing the continuous phase of each centre equation;
        read off from the seeds when omitted.
    signs : sign of each deviation (``+1`` default).
    """
    M = chain.M
    n_r = len(q)
    n_c = len(center_seeds)
    N = n_r + 2 * n_c
    s = M / 2 - N
    if s < 0:
        raise InadmissibleError("more roots than M/2")
    qa = q.as_array()
    if n_r and abs((2 * qa[0]) % 2 - (n_r - 1) % 2) > 1e-9:
        raise InadmissibleError("real quantum numbers must be congruent to (n_r-1)/2 mod 1")
    if n_r and np.max(np.abs(qa)) > max_quantum_number(M, s) + 1e-12:
        raise InadmissibleError("real quantum number outside the window")
    sg = np.ones(n_c) if signs is None else np.asarray(signs, dtype=float)
    if np.any(np.abs(np.abs(sg) - 1) > 0):
        raise ValueError("deviation signs must be +1 or -1")
    x0 = _initial_guess(qa, M, s) if n_r else np.zeros(0)
    cs0 = np.asarray(center_seeds, dtype=float)
    if numbers is None:
        others = lambda p: [(cs0[k], deviation_seed) for k in range(n_c) if k != p]
        numbers = [int(round(_center_phase(cs0[p], deviation_seed, x0, M, others(p)) / (2 * np.pi))) for p in range(n_c)]
    js = np.asarray(numbers, dtype=float)
    z0 = np.empty(n_r + 2 * n_c)
    z0[:n_r] = x0
    z0[n_r::2] = cs0
    z0[n_r + 1 :: 2] = math.log(deviation_seed)

    def fun(z):
        with np.errstate(all="ignore"):
            return _pair_equations(z, qa, js, sg, M, n_r)

    z, _ = _newton(fun, lambda z: _numeric_jacobian(fun, z), z0, tol=REAL_TOL, max_iter=max_iter)
    devs = sg * np.exp(z[n_r + 1 :: 2])
    if np.any(np.abs(devs) < DEVIATION_FLOOR):
        raise DeviationUnderflowError("string deviation below representable resolution")
    if np.any(np.abs(devs) > 0.49):
        raise ConvergenceError("pair left the close-pair region")
    x = np.sort(z[:n_r])
    pairs = tuple(
        sorted(
            (ClosePair(float(c), float(e), int(j)) for c, e, j in zip(z[n_r::2], devs, js)),
            key=lambda p: p.center,
        )
    )
    st = BetheState(chain, s, tuple(float(v) for v in x), pairs, quantum_numbers=q)
    st = replace(st, residual=bethe_residual(st))
    return _attach_holes(st)


# --- residuals, counting function ---------------------------------------------------


def _factor(re, im):
    # (z + i)/(z - i) for z = re + i im, with im given exactly
    return complex(re, im + 1.0) / complex(re, im - 1.0)


def _root_parts(state: BetheState):
    # (real part, imaginary part, deviation or None) per root, imaginary parts exact
    parts = [(x, 0.0, None, None) for x in state.real_roots]
    for k, p in enumerate(state.close_pairs):
        parts.append((p.center, 0.5 + p.deviation, p.deviation, (k, 1)))
        parts.append((p.center, -(0.5 + p.deviation), p.deviation, (k, -1)))
    for w in state.wide_pairs:
        parts.append((w.real, w.imag, None, None))
        parts.append((w.real, -w.imag, None, None))
    return parts


def bethe_residual(state: BetheState) -> float:
    """``max_a |1 + a(lambda_a)|`` with pair differences taken analytically."""
    M = state.M
    parts = _root_parts(state)
    worst = 0.0
    for a, (ra, ia, da, ta) in enumerate(parts):
        if ta is not None:
            # lambda - i/2 and lambda + i/2 from the deviation directly
            sgn = ta[1]
            lo = complex(ra, sgn * da if sgn > 0 else -(1 + da))
            hi = complex(ra, (1 + da) if sgn > 0 else -da)
            val = (lo / hi) ** M
        else:
            lam = complex(ra, ia)
            val = ((lam - 0.5j) / (lam + 0.5j)) ** M
        for b, (rb, ib, db, tb) in enumerate(parts):
            if a == b:
                val *= -1.0
                continue
            if ta is not None and tb is not None and ta[0] == tb[0]:
                # partner in the same pair: (2i y + i)/(2i y - i) with y = +-(1/2 + delta)
                val *= (1 + da) / da if ta[1] > 0 else da / (1 + da)
                continue
            if ta is not None and tb is not None:
                im = ta[1] * (0.5 + da) - tb[1] * (0.5 + db)
            else:
                im = ia - ib
            val *= _factor(ra - rb, im)
        worst = max(worst, abs(1 + val))
    return worst


def _check_branch(nu: complex, state: BetheState) -> None:
    if abs(nu - 0.5j) < 1e-12 or abs(nu + 0.5j) < 1e-12:
        raise BranchPointError("nu at +-i/2")
    r = state.roots
    if len(r) and (np.min(np.abs(nu - r - 1j)) < 1e-12 or np.min(np.abs(nu - r + 1j)) < 1e-12):
        raise BranchPointError("nu at a root +- i")


def counting_function(nu, state: BetheState) -> complex:
    """``xi(nu) = Theta_1(nu)/2pi - sum_k Theta_2(nu - lambda_k) / (2 pi M)``.

    On the real line close pairs use the continuous pair phase; off the
    real line the principal complex arctangent is used.
    """
    nu = complex(nu)
    _check_branch(nu, state)
    M = state.M
    x = np.asarray(state.real_roots)
    if abs(nu.imag) < 1e-15:
        v = nu.real
        tot = theta(v, 1) * M - np.sum(theta(v - x, 2))
        for p in state.close_pairs:
            tot -= theta_pair(v - p.center, p.deviation)
        for w in state.wide_pairs:
            tot -= 2 * np.real(2 * np.arctan(v - w))
        return complex(tot / (2 * np.pi * M))
    tot = M * 2 * np.arctan(2 * nu) - np.sum(2 * np.arctan(nu - state.roots))
    return complex(tot / (2 * np.pi * M))


def counting_function_real(v: np.ndarray, state: BetheState) -> np.ndarray:
    """Vectorized :func:`counting_function` on real arguments."""
    v = np.asarray(v, dtype=float)
    M = state.M
    x = np.asarray(state.real_roots)
    tot = M * theta(v, 1) - np.sum(theta(v[..., None] - x, 2), axis=-1)
    for p in state.close_pairs:
        tot = tot - theta_pair(v - p.center, p.deviation)
    return tot / (2 * np.pi * M)


def exp_counting_function(nu, state: BetheState) -> complex:
    """``a(nu) = r(nu) prod_k (nu - lambda_k + i)/(nu - lambda_k - i)``.

    Equals ``exp(2 pi i M xi(nu))`` up to the sign ``(-1)^N``.
    """
    nu = complex(nu)
    _check_branch(nu, state)
    r = state.roots
    val = ((nu - 0.5j) / (nu + 0.5j)) ** state.M
    return complex(val * np.prod((nu - r + 1j) / (nu - r - 1j)))


# --- holes -------------------------------------------------------------------------


def _vacancies(state: BetheState) -> np.ndarray:
    window = quantum_number_window(state.M, state.s)
    occ = state.quantum_numbers.as_array()
    if len(state.real_roots) == 0:
        return window
    return np.array([w for w in window if np.min(np.abs(occ - w)) > 1e-9])


def hole_rapidities(state: BetheState, missing_q: Sequence[float]) -> list[float]:
    """Real ``theta`` with ``M xi(theta) = Q`` for each vacant quantum number."""
    M = state.M
    qmax = max_quantum_number(M, state.s)
    occ = state.quantum_numbers.as_array()
    out = []
    lim = M * float(np.real(counting_function_real(np.array([1e8]), state))[0])
    for qv in missing_q:
        if abs(qv) > qmax + 1e-12:
            raise WindowError(f"quantum number {qv} outside the window |Q| <= {qmax}")
        if len(occ) and np.min(np.abs(occ - qv)) < 1e-9:
            raise WindowError(f"quantum number {qv} is occupied")
        if abs(qv) >= lim:
            raise WindowError(f"quantum number {qv} has no finite rapidity")
        f = lambda t: M * counting_function_real(np.array([t]), state)[0] - qv
        lo, hi = -1.0, 1.0
        while f(lo) > 0:
            lo *= 2
        while f(hi) < 0:
            hi *= 2
        out.append(float(optimize.brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)))
    return out


def _attach_holes(state: BetheState) -> BetheState:
    vac = _vacancies(state)
    try:
        th = hole_rapidities(state, vac)
    except WindowError:
        return state
    return replace(state, holes=tuple(th), hole_numbers=tuple(float(v) for v in vac))


# --- energy and momentum ---------------------------------------------------------


def energy_momentum(state: BetheState) -> tuple[float, float]:
    """Energy and momentum (mod 2 pi); close pairs are combined analytically."""
    x = np.asarray(state.real_roots)
    E = float(np.sum(bare_energy(x)))
    P = float(np.sum(bare_momentum(x)))
    for p in state.close_pairs:
        c, e = p.center, p.deviation
        # (lambda - i/2)(lambda + i/2) = (c + i e)(c + i(1 + e)) for the upper root
        E += -4.0 * (1.0 / (complex(c, e) * complex(c, 1 + e))).real
        P += 2 * (math.atan2(1 + e, c) - math.atan2(e, c))
    for w in state.wide_pairs:
        E += float(2 * np.real(bare_energy(w)))
        P += float(2 * np.real(np.pi - 2 * np.arctan(2 * w)))
    return E, P % (2 * np.pi)


# --- higher level ---------------------------------------------------------------------


def count_solutions(n_h: int, n_tilde: int) -> int:
    """``P(n_h, n~) = C(n_h, n~) - C(n_h, n~ - 1)``."""
    if n_tilde < 0 or n_tilde > n_h / 2:
        raise ValueError("need 0 <= n_tilde <= n_h/2")
    return math.comb(n_h, n_tilde) - (math.comb(n_h, n_tilde - 1) if n_tilde else 0)


def dimension(n_h: int) -> int:
    """``Z(n_h) = sum (n_h - 2 n~ + 1) P(n_h, n~) = 2^n_h``."""
    return sum((n_h - 2 * k + 1) * count_solutions(n_h, k) for k in range(n_h // 2 + 1))


def higher_level_defect(chi: Sequence[complex], holes: Sequence[float]) -> float:
    """``max_a |1 + a_hat(chi_a)|``, the self term supplying the ``-1``."""
    chi = np.asarray(chi, dtype=complex)
    th = np.asarray(holes, dtype=float)
    worst = 0.0
    for a, c in enumerate(chi):
        v = np.prod((c - th - 0.5j) / (c - th + 0.5j))
        for b, c2 in enumerate(chi):
            v *= -1.0 if a == b else (c2 - c + 1j) / (c2 - c - 1j)
        worst = max(worst, abs(1 + v))
    return float(worst)


def _hl_poly_system(z, th, n):
    chi = z[:n] + 1j * z[n:]
    out = np.empty(n, dtype=complex)
    for a in range(n):
        lhs = np.prod(chi[a] - th - 0.5j)
        rhs = np.prod(chi[a] - th + 0.5j)
        for b in range(n):
            if b != a:
                lhs *= chi[b] - chi[a] + 1j
                rhs *= chi[b] - chi[a] - 1j
        scale = np.prod(np.abs(chi[a] - th) + 1) * np.prod([abs(chi[b] - chi[a]) + 1 for b in range(n) if b != a])
        out[a] = (lhs - rhs) / scale
    return np.concatenate([out.real, out.imag])


def _valid_hl(chi: np.ndarray, tol=1e-6) -> bool:
    n = len(chi)
    for a in range(n):
        for b in range(a + 1, n):
            d = chi[a] - chi[b]
            if abs(d) < tol or abs(d - 1j) < tol or abs(d + 1j) < tol:
                return False
    # self-conjugate set
    for c in chi:
        if np.min(np.abs(chi - np.conj(c))) > 1e-6:
            return False
    return True


def _cubic_center(holes: Sequence[float]) -> list[float]:
    th = np.asarray(holes, dtype=float)
    e1 = th.sum()
    e2 = sum(a * b for a, b in itertools.combinations(th, 2))
    e3 = sum(a * b * c for a, b, c in itertools.combinations(th, 3))
    roots = np.roots([4.0, -3.0 * e1, 2.0 * e2 - 1.0, -(e3 - e1 / 4.0)])
    out = []
    for r in roots:
        c = complex(r)
        # polish on the original phase equation
        f = lambda t: float(np.sum(np.arctan2(0.5, t - th))) - np.pi * round(float(np.sum(np.arctan2(0.5, c.real - th))) / np.pi)
        if abs(c.imag) < 1e-7:
            t = c.real
            for _ in range(5):
                g = -np.sum(0.5 / ((t - th) ** 2 + 0.25))
                t -= f(t) / g
            out.append(float(t))
    return sorted(out)


def solve_higher_level(holes: Sequence[float], n_tilde: int, *, seed: int = 0, max_starts: int = 4000) -> list[HigherLevelState]:
    """All solutions of the higher-level equations with ``n_tilde`` roots.

    ``n_tilde = 1`` is solved in closed form (``n_h = 2``) or through the
    cubic (``n_h = 4``); otherwise by seeded multi-start Newton on the
    polynomial form until ``P(n_h, n_tilde)`` admissible solutions are found.
    """
    th = np.asarray(holes, dtype=float)
    n_h = len(th)
    if n_h % 2:
        raise ValueError("number of holes must be even")
    expected = count_solutions(n_h, n_tilde)
    if n_tilde == 0:
        return [HigherLevelState(tuple(th), (), 0.0)]
    if n_tilde == 1 and n_h == 2:
        chi = (0.5 * (th[0] + th[1]),)
        return [HigherLevelState(tuple(th), chi, higher_level_defect(chi, th))]
    if n_tilde == 1 and n_h == 4:
        roots = _cubic_center(th)
        out = [HigherLevelState(tuple(th), (complex(r),), higher_level_defect([r], th)) for r in roots]
        if len(out) != expected:
            raise IncompleteEnumerationError(len(out), expected)
        return out
    rng = np.random.default_rng(seed)
    found: list[np.ndarray] = []
    span = max(1.0, np.ptp(th)) if n_h else 1.0
    center = th.mean() if n_h else 0.0
    for _ in range(max_starts):
        if len(found) >= expected:
            break
        z0 = np.concatenate([center + span * rng.normal(size=n_tilde), rng.normal(size=n_tilde)])
        try:
            sol = optimize.root(_hl_poly_system, z0, args=(th, n_tilde), method="hybr", tol=1e-14)
        except (ValueError, FloatingPointError):
            continue
        if not sol.success:
            continue
        chi = sol.x[:n_tilde] + 1j * sol.x[n_tilde:]
        if not np.all(np.isfinite(chi)) or np.max(np.abs(chi)) > 1e3:
            continue
        if not _valid_hl(chi):
            continue
        if higher_level_defect(chi, th) > 1e-8:
            continue
        chi = np.sort_complex(chi)
        if any(np.allclose(chi, f, atol=1e-6) for f in found):
            continue
        found.append(chi)
    if len(found) != expected:
        raise IncompleteEnumerationError(len(found), expected)
    out = []
    for chi in found:
        chi = _symmetrize(chi)
        out.append(HigherLevelState(tuple(th), tuple(chi), higher_level_defect(chi, th)))
    return sorted(out, key=lambda h: tuple((c.real, c.imag) for c in h.roots))


def _symmetrize(chi: np.ndarray) -> np.ndarray:
    # snap to an exactly self-conjugate set
    chi = np.array(chi, dtype=complex)
    out = chi.copy()
    for a, c in enumerate(chi):
        if abs(c.imag) < 1e-7:
            out[a] = c.real
        else:
            b = int(np.argmin(np.abs(chi - np.conj(c))))
            out[a] = 0.5 * (c + np.conj(chi[b]))
    return np.sort_complex(out)


# --- complex states and enumeration ------------------------------------------------


def _thermo_hole_number(theta: float, M: int) -> float:
    # inverse of the thermodynamic initial guess: Q = (M / 2 pi) arctan sinh(pi theta)
    return M / (2 * np.pi) * math.atan(math.sinh(np.pi * theta))


def _pair_attempts(chain, q, seed, numbers=None):
    for dev in (0.05, 1e-3):
        for sg in (1, -1):
            try:
                st = solve_string_state(
                    chain, q, [seed], numbers=numbers, deviation_seed=dev, signs=[sg], max_iter=60
                )
            except (BetheError, np.linalg.LinAlgError):
                continue
            if st.residual < 1e-10:
                yield st


def solve_complex_state(chain: ChainSpec, holes: Sequence[float], hl: HigherLevelState) -> BetheState:
    """Finite-chain state with close pairs seeded from a higher-level solution.

    Hole rapidities are mapped to the nearest vacant quantum numbers of the
    window; the remaining numbers carry real roots.  Each real higher-level
    root seeds one close pair.
    """
    M = chain.M
    th = np.asarray(holes, dtype=float)
    chi = np.asarray(hl.roots, dtype=complex)
    if np.any(np.abs(chi.imag) > 1e-9):
        raise NotImplementedError("wide pairs are not solved at finite size")
    n_c = len(chi)
    s = (len(th) - 2 * n_c) / 2
    if s < 0 or (len(th) - 2 * n_c) % 2:
        raise InadmissibleError("n_h must equal 2s + 2 n~")
    N = int(round(M / 2 - s))
    n_r = N - 2 * n_c
    window = quantum_number_window(M, s)
    if len(window) != n_r + len(th):
        raise InadmissibleError("hole count does not fit the quantum-number window")
    taken: list[float] = []
    for t in th:
        free = [w for w in window if w not in taken]
        taken.append(min(free, key=lambda w: abs(w - _thermo_hole_number(t, M))))
    q = QuantumNumberSet(tuple(w for w in window if w not in taken))
    if n_c == 0:
        return solve_real_roots(chain, q)
    if n_c > 1:
        raise NotImplementedError("only one close pair is solved at finite size")
    best = None
    for st in _pair_attempts(chain, q, float(chi[0].real)):
        if best is None or abs(st.close_pairs[0].center - chi[0].real) < abs(best.close_pairs[0].center - chi[0].real):
            best = st
    if best is None:
        raise ConvergenceError("no close-pair solution near the higher-level seed")
    return best


def parity_mirror(state: BetheState) -> BetheState:
    """The state with all roots negated, itself a solution by parity."""
    x = tuple(sorted(-v for v in state.real_roots))
    pairs = tuple(
        sorted(
            (
                ClosePair(-p.center, p.deviation, int(round(_center_phase(-p.center, p.deviation, x, state.M) / (2 * np.pi))))
                for p in state.close_pairs
            ),
            key=lambda p: p.center,
        )
    )
    if len(pairs) > 1 or state.wide_pairs:
        raise NotImplementedError("mirror of multi-pair states")
    q = QuantumNumberSet(tuple(sorted(-v for v in state.quantum_numbers.values)))
    st = BetheState(state.chain, state.s, x, pairs, quantum_numbers=q)
    st = replace(st, residual=bethe_residual(st))
    return _attach_holes(st)


def enumerate_states(chain: ChainSpec, s: float, *, max_pairs: int = 1, grid: int = 7) -> list[BetheState]:
    """Real-root states and single-close-pair states of spin ``s``.

    Pair states are searched from the higher-level roots of the vacant
    quantum numbers and from a small grid of centres; both deviation signs
    are tried.  The search is not guaranteed to be exhaustive: singular
    states and states with wide pairs are not produced.
    """
    M = chain.M
    N = int(round(M / 2 - s))
    window = quantum_number_window(M, s)
    out: list[BetheState] = []
    for q in itertools.combinations(window, N):
        out.append(solve_real_roots(chain, QuantumNumberSet(q)))
    if max_pairs < 1 or N < 2:
        return out
    for q in itertools.combinations(window, N - 2):
        qs = QuantumNumberSet(q)
        vac = [w for w in window if w not in q]
        th = _initial_guess(np.array(vac), M, s)
        seeds = [float(h.roots[0].real) for h in solve_higher_level(th, 1)]
        seeds += list(np.linspace(-1.5, 1.5, grid))
        seen: list[float] = []
        for c0 in seeds:
            for st in _pair_attempts(chain, qs, c0):
                c = st.close_pairs[0].center
                if all(abs(c - v) > 1e-7 for v in seen):
                    seen.append(c)
                    out.append(st)
                    break
    # the grid search can miss one member of a parity doublet
    have = {(tuple(st.quantum_numbers.values), round(st.close_pairs[0].center, 7)) for st in out if st.close_pairs}
    for st in [st for st in out if st.close_pairs]:
        mirror = parity_mirror(st)
        key = (tuple(mirror.quantum_numbers.values), round(mirror.close_pairs[0].center, 7))
        if key not in have and mirror.residual < 1e-10:
            have.add(key)
            out.append(mirror)
    return out
