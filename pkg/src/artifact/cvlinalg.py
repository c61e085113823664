"""Cauchy, Vandermonde and Cauchy-Vandermonde matrices.

Rational matrices are built on nodes ``x``, ``y``; hyperbolic ones on
``alpha``, ``beta`` and are related to the rational ones by
``x = exp(2 pi alpha)``, ``y = exp(2 pi beta)`` together with diagonal
dressings and a fixed recombination of the exponential Vandermonde columns
into the cosh/sinh basis ``Xi``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np
import scipy.linalg as sla

Kind = Literal["cauchy", "vandermonde", "cauchy-vandermonde", "dual-cauchy-vandermonde"]
Param = Literal["rational", "hyperbolic"]

NODE_TOL = 1e-10


class CoincidentNodeError(ValueError):
    """Two nodes (or an x and a y node) coincide within tolerance."""


class SingularBlockError(ValueError):
    """The pivot block of a determinant reduction is singular."""


# --- partitions -------------------------------------------------------------


@dataclass(frozen=True)
class Partition:
    """Weakly decreasing tuple of non-negative integers."""

    parts: tuple[int, ...]

    def __post_init__(self):
        p = tuple(int(v) for v in self.parts)
        if any(v < 0 for v in p):
            raise ValueError("partition parts must be non-negative")
        if any(a < b for a, b in zip(p, p[1:])):
            raise ValueError("partition parts must be weakly decreasing")
        object.__setattr__(self, "parts", p)

    def __len__(self) -> int:
        return len(self.parts)

    @classmethod
    def delta(cls, n: int) -> "Partition":
        """Consecutive integers ``{n-1, ..., 0}``."""
        return cls(tuple(range(n - 1, -1, -1)))

    @classmethod
    def gamma(cls, n: int) -> "Partition":
        """Consecutive integers of the parity of ``n-1``: ``{n-1, n-3, ...}``."""
        return cls(tuple(range(n - 1, -1, -2)))

    @classmethod
    def jump(cls, n: int, skip: int) -> "Partition":
        """``{n, ..., 0}`` with the single exponent ``skip`` removed."""
        if not 0 <= skip <= n:
            raise ValueError("skip must lie in [0, n]")
        return cls(tuple(v for v in range(n, -1, -1) if v != skip))

    def is_delta(self) -> bool:
        return self.parts == tuple(range(len(self.parts) - 1, -1, -1))


@dataclass(frozen=True)
class StructuredMatrixSpec:
    """Declarative description of a structured matrix.

    For the Cauchy-Vandermonde kinds ``len(x_nodes) == len(y_nodes) +
    len(partition)``.  Hyperbolic Vandermonde blocks always use the
    cosh/sinh basis of length ``len(partition)`` and require a
    consecutive partition.
    """

    kind: Kind
    parametrization: Param
    x_nodes: tuple[complex, ...]
    y_nodes: tuple[complex, ...] = ()
    partition: Partition = field(default_factory=lambda: Partition(()))

    def __post_init__(self):
        object.__setattr__(self, "x_nodes", tuple(complex(v) for v in self.x_nodes))
        object.__setattr__(self, "y_nodes", tuple(complex(v) for v in self.y_nodes))
        if self.kind not in ("cauchy", "vandermonde", "cauchy-vandermonde", "dual-cauchy-vandermonde"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.parametrization not in ("rational", "hyperbolic"):
            raise ValueError(f"unknown parametrization {self.parametrization!r}")
        nx, ny, n = len(self.x_nodes), len(self.y_nodes), len(self.partition)
        if self.kind == "vandermonde" and ny:
            raise ValueError("vandermonde takes no y nodes")
        if self.kind == "vandermonde" and n != nx:
            raise ValueError("vandermonde partition length must equal the number of nodes")
        if self.kind in ("cauchy-vandermonde", "dual-cauchy-vandermonde") and nx != ny + n:
            raise ValueError("need |x| = |y| + length(partition)")
        if self.parametrization == "hyperbolic" and n and not self.partition.is_delta():
            raise ValueError("hyperbolic Vandermonde blocks need a consecutive partition")
        if self.kind == "dual-cauchy-vandermonde" and not self.partition.is_delta():
            raise ValueError("the dual matrix is defined for consecutive partitions only")
        _check_nodes(np.array(self.x_nodes), np.array(self.y_nodes), self.parametrization)

    @property
    def n(self) -> int:
        return len(self.partition)

    @property
    def x(self) -> np.ndarray:
        return np.array(self.x_nodes, dtype=complex)

    @property
    def y(self) -> np.ndarray:
        return np.array(self.y_nodes, dtype=complex)


@dataclass(frozen=True)
class BlockMatrix:
    """Block matrix ``[[A, C], [B, D]]`` with ``A`` square."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def dense(self) -> np.ndarray:
        return np.block([[self.A, self.C], [self.B, self.D]])


@dataclass(frozen=True)
class DetResult:
    """Determinant value with a 1-norm condition estimate."""

    value: complex
    cond: float

    def __complex__(self) -> complex:
        return complex(self.value)


def _wrap_dist(d: np.ndarray) -> np.ndarray:
    # distance modulo i for hyperbolic nodes
    return np.abs(d.real) + np.abs((d.imag + 0.5) % 1.0 - 0.5)


def _check_nodes(x: np.ndarray, y: np.ndarray, param: str) -> None:
    dist = _wrap_dist if param == "hyperbolic" else np.abs
    for name, v in (("x", x), ("y", y)):
        if len(v) > 1:
            d = dist(v[:, None] - v[None, :])
            np.fill_diagonal(d, np.inf)
            if d.min() < NODE_TOL:
                raise CoincidentNodeError(f"coincident {name} nodes")
    if len(x) and len(y) and dist(x[:, None] - y[None, :]).min() < NODE_TOL:
        raise CoincidentNodeError("x and y nodes coincide")


# --- symmetric functions ---------------------------------------------------


def _elementary_all(x: Sequence[complex], rmax: int) -> np.ndarray:
    e = np.zeros(rmax + 1, dtype=complex)
    e[0] = 1.0
    for v in x:
        e[1:] = e[1:] + v * e[:-1]
    return e


def _complete_all(y: Sequence[complex], rmax: int) -> np.ndarray:
    h = np.zeros(rmax + 1, dtype=complex)
    h[0] = 1.0
    for v in y:
        for r in range(1, rmax + 1):
            h[r] = h[r] + v * h[r - 1]
    return h


def elementary_symmetric(x: Sequence[complex], r: int) -> complex:
    """Elementary symmetric polynomial ``e_r(x)`` (zero for ``r > len(x)``)."""
    if r < 0:
        raise ValueError("degree must be non-negative")
    if r > len(x):
        return 0j
    return complex(_elementary_all(x, r)[r])


def complete_symmetric(y: Sequence[complex], r: int) -> complex:
    """Complete homogeneous symmetric polynomial ``h_r(y)``."""
    if r < 0:
        raise ValueError("degree must be non-negative")
    return complex(_complete_all(y, r)[r])


def super_elementary(x: Sequence[complex], y: Sequence[complex], r: int) -> complex:
    """Supersymmetric elementary polynomial ``e_r(x||y) = sum_a (-1)^a e_{r-a}(x) h_a(y)``."""
    if r < 0:
        raise ValueError("degree must be non-negative")
    e = _elementary_all(x, r)
    h = _complete_all(y, r)
    a = np.arange(r + 1)
    return complex(np.sum((-1.0) ** a * e[r - a] * h[a]))


# --- hyperbolic Vandermonde basis -------------------------------------------


def xi_vector(lam: complex, n: int) -> np.ndarray:
    """Row of cosh/sinh functions: ``cosh(pi k lam)`` then ``sinh(pi k lam)``.

    Entry ``a`` (1-based) is ``cosh(pi (n+1-2a) lam)`` for ``a <= ceil(n/2)``
    and entry ``n+1-a`` is ``sinh(pi (n+1-2a) lam)`` for ``a <= floor(n/2)``.
    """
    out = np.empty(n, dtype=complex)
    for a in range(1, (n + 1) // 2 + 1):
        out[a - 1] = np.cosh(np.pi * (n + 1 - 2 * a) * lam)
    for a in range(1, n // 2 + 1):
        out[n - a] = np.sinh(np.pi * (n + 1 - 2 * a) * lam)
    return out


def xi_vector_reversed(lam: complex, n: int) -> np.ndarray:
    """The basis of :func:`xi_vector` in reversed order."""
    return xi_vector(lam, n)[::-1].copy()


def _xi_recombination(n: int) -> np.ndarray:
    # R with xi_vector(lam) == [exp(pi k_r lam)]_r @ R, k_r = 2r - n + 1
    R = np.zeros((n, n), dtype=complex)
    idx = {2 * r - n + 1: r for r in range(n)}
    for a in range(1, (n + 1) // 2 + 1):
        k = n + 1 - 2 * a
        if k == 0:
            R[idx[0], a - 1] = 1.0
        else:
            R[idx[k], a - 1] += 0.5
            R[idx[-k], a - 1] += 0.5
    for a in range(1, n // 2 + 1):
        k = n + 1 - 2 * a
        R[idx[k], n - a] += 0.5
        R[idx[-k], n - a] -= 0.5
    return R


# --- builders -------------------------------------------------------------


def _cauchy(x: np.ndarray, y: np.ndarray, param: str) -> np.ndarray:
    d = x[:, None] - y[None, :]
    return 1.0 / (np.sinh(np.pi * d) if param == "hyperbolic" else d)


def _vandermonde(x: np.ndarray, partition: Partition) -> np.ndarray:
    exps = sorted(partition.parts)
    return x[:, None] ** np.array(exps)[None, :]


def _dual_vandermonde(x: np.ndarray, y: np.ndarray, n: int) -> np.ndarray:
    V = np.empty((len(x), n), dtype=complex)
    for k in range(len(x)):
        xk = np.delete(x, k)
        for r in range(n):
            V[k, r] = super_elementary(xk, y, n - r - 1)
    return V


def _hyp_dressings(alpha: np.ndarray, beta: np.ndarray, n: int):
    # C_gamma[alpha||beta] = Dl @ C_delta[x||y] @ Dr @ blockdiag(I, R)
    dl = np.exp(-np.pi * (n - 1) * alpha)
    dr = np.concatenate([2.0 * np.exp(np.pi * (n + 1) * beta), np.ones(n)])
    R = _xi_recombination(n)
    m = len(beta)
    Bm = np.eye(m + n, dtype=complex)
    Bm[m:, m:] = R
    return dl, dr, Bm


def build_matrix(spec: StructuredMatrixSpec) -> np.ndarray:
    """Dense realization of a structured matrix."""
    x, y, n = spec.x, spec.y, spec.n
    hyp = spec.parametrization == "hyperbolic"
    if spec.kind == "cauchy":
        return _cauchy(x, y, spec.parametrization)
    if spec.kind == "vandermonde":
        if hyp:
            return np.array([xi_vector(v, n) for v in x]).reshape(len(x), n)
        return _vandermonde(x, spec.partition)
    if hyp:
        if spec.kind == "cauchy-vandermonde":
            cau = np.exp(-n * np.pi * x)[:, None] * _cauchy(x, y, "hyperbolic") * np.exp(n * np.pi * y)[None, :]
            van = np.array([xi_vector(v, n) for v in x]).reshape(len(x), n)
            return np.hstack([cau, van])
        # dual: the rational dual carried through the same dressing
        xr, yr = np.exp(2 * np.pi * x), np.exp(2 * np.pi * y)
        rat = np.hstack([_cauchy(xr, yr, "rational"), _dual_vandermonde(xr, yr, n)])
        dl, dr, Bm = _hyp_dressings(x, y, n)
        return (dl[:, None] * rat * dr[None, :]) @ Bm
    cau = _cauchy(x, y, "rational")
    if spec.kind == "cauchy-vandermonde":
        return np.hstack([cau, _vandermonde(x, spec.partition)])
    return np.hstack([cau, _dual_vandermonde(x, y, n)])


# --- closed forms -----------------------------------------------------------


def _alt(v: np.ndarray, f) -> complex:
    # prod_{j>k} f(v_j - v_k)
    out = 1.0 + 0j
    for j in range(len(v)):
        for k in range(j):
            out *= f(v[j] - v[k])
    return out


def superalternant(x: np.ndarray, y: np.ndarray, param: Param = "rational") -> complex:
    """``prod_{j>k} f(x_j-x_k) prod_{j>k} f(y_k-y_j) / prod f(x_j-y_k)``.

    ``f`` is the identity (rational) or ``sinh(pi .)`` (hyperbolic).
    """
    f = (lambda d: np.sinh(np.pi * d)) if param == "hyperbolic" else (lambda d: d)
    num = _alt(np.asarray(x), f) * _alt(-np.asarray(y), f)
    den = np.prod(f(np.asarray(x)[:, None] - np.asarray(y)[None, :])) if len(y) else 1.0
    return complex(num / den)


def closed_form_det(spec: StructuredMatrixSpec) -> complex:
    """Determinant from the superalternant formula."""
    if spec.kind != "cauchy" and not spec.partition.is_delta():
        raise ValueError("closed form available for consecutive partitions only")
    if spec.kind == "cauchy" and len(spec.x_nodes) != len(spec.y_nodes):
        raise ValueError("square Cauchy matrix required")
    y = np.zeros(0) if spec.kind == "vandermonde" else spec.y
    val = superalternant(spec.x, y, spec.parametrization)
    if spec.parametrization == "hyperbolic" and spec.kind != "cauchy":
        # normalization of the cosh/sinh basis, fixed numerically for n <= 8
        val *= 2.0 ** (((spec.n - 1) ** 2) // 2)
    return val


def _phi_prime(z: np.ndarray, zeros: np.ndarray, poles: np.ndarray) -> np.ndarray:
    # prod (z_j - zeros) / prod' (z_j - poles), the primed product skips z_j
    out = np.empty(len(z), dtype=complex)
    for j, zj in enumerate(z):
        num = np.prod(zj - zeros) if len(zeros) else 1.0
        d = zj - poles
        d = d[np.abs(d) > 0]
        out[j] = num / (np.prod(d) if len(d) else 1.0)
    return out


def _rational_cv_inverse(x: np.ndarray, y: np.ndarray, n: int) -> np.ndarray:
    # inverse from the block formulas with supersymmetric Vandermonde rows
    m = len(y)
    px = _phi_prime(x, y, x)  # prod(x_k - y) / prod'(x_k - x)
    py = _phi_prime(y, x, y)  # prod(y_j - x) / prod'(y_j - y)
    inv = np.empty((m + n, m + n), dtype=complex)
    inv[:m, :] = py[:, None] * px[None, :] / (y[:, None] - x[None, :])
    for k in range(m + n):
        xk = np.delete(x, k)
        for a in range(1, n + 1):
            inv[m + a - 1, k] = (-1) ** (n - a) * px[k] * super_elementary(xk, y, n - a)
    return inv


def _dressing_inverse(x: np.ndarray, y: np.ndarray, n: int, dual_target: bool) -> np.ndarray:
    # inverse as a diagonal dressing of the transposed partner matrix at (-x, -y)
    m = len(y)
    if dual_target:
        partner = np.hstack([_cauchy(-x, -y, "rational"), _vandermonde(-x, Partition.delta(n))])
    else:
        partner = np.hstack([_cauchy(-x, -y, "rational"), _dual_vandermonde(-x, -y, n)])
    if dual_target:
        # inverting the dressing identity puts the dressings at negated nodes
        left = np.concatenate([_phi_prime(-y, -x, -y), np.ones(n)])
        right = _phi_prime(-x, -y, -x)
    else:
        left = np.concatenate([_phi_prime(y, x, y), np.ones(n)])
        right = _phi_prime(x, y, x)
    return left[:, None] * partner.T * right[None, :]


def closed_form_inverse(spec: StructuredMatrixSpec, route: str = "direct") -> np.ndarray:
    """Closed-form inverse.

    Parameters
    ----------
    route : {"direct", "dual"}
        ``direct`` uses the block formulas with supersymmetric
        polynomials; ``dual`` the diagonal dressing of the (transposed)
        dual matrix at negated nodes.  Both must agree.
    """
    x, y, n = spec.x, spec.y, spec.n
    if spec.kind == "vandermonde":
        if spec.parametrization == "hyperbolic":
            spec = StructuredMatrixSpec("cauchy-vandermonde", "hyperbolic", spec.x_nodes, (), spec.partition)
        else:
            spec = StructuredMatrixSpec("cauchy-vandermonde", "rational", spec.x_nodes, (), spec.partition)
        return closed_form_inverse(spec, route)
    if spec.kind == "cauchy":
        if len(x) != len(y):
            raise ValueError("square Cauchy matrix required")
        if spec.parametrization == "rational":
            return _rational_cv_inverse(x, y, 0)
        # hyperbolic Cauchy is dressed rational Cauchy
        xr, yr = np.exp(2 * np.pi * x), np.exp(2 * np.pi * y)
        inv = _rational_cv_inverse(xr, yr, 0)
        return (1.0 / (2 * np.exp(np.pi * y)))[:, None] * inv * (1.0 / np.exp(np.pi * x))[None, :]
    if not spec.partition.is_delta():
        raise ValueError("closed-form inverse needs a consecutive partition")
    dual = spec.kind == "dual-cauchy-vandermonde"
    if spec.parametrization == "rational":
        if dual:
            return _dressing_inverse(x, y, n, dual_target=True)
        if route == "dual":
            return _dressing_inverse(x, y, n, dual_target=False)
        return _rational_cv_inverse(x, y, n)
    xr, yr = np.exp(2 * np.pi * x), np.exp(2 * np.pi * y)
    if dual:
        rat_inv = _dressing_inverse(xr, yr, n, dual_target=True)
    elif route == "dual":
        rat_inv = _dressing_inverse(xr, yr, n, dual_target=False)
    else:
        rat_inv = _rational_cv_inverse(xr, yr, n)
    dl, dr, Bm = _hyp_dressings(x, y, n)
    return np.linalg.solve(Bm, (1.0 / dr)[:, None] * rat_inv * (1.0 / dl)[None, :])


def _sinh_phi_prime(z: np.ndarray, zeros: np.ndarray, poles: np.ndarray) -> np.ndarray:
    # prod sinh pi(z_j - zeros) / prod' sinh pi(z_j - poles)
    out = np.empty(len(z), dtype=complex)
    for j, zj in enumerate(z):
        num = np.prod(np.sinh(np.pi * (zj - zeros))) if len(zeros) else 1.0
        d = zj - poles
        d = d[np.abs(d) > 0]
        out[j] = num / (np.prod(np.sinh(np.pi * d)) if len(d) else 1.0)
    return out


def hyperbolic_dual_inverse_explicit(
    alpha: Sequence[complex], beta: Sequence[complex], reversed_xi: bool = True
) -> np.ndarray:
    """Elementwise dressing form of the inverse hyperbolic dual matrix.

    Cauchy rows ``Phi'(beta_j) Phi'(alpha_k) exp(-pi n (beta_j - alpha_k)) /
    sinh pi(beta_j - alpha_k)``; Vandermonde rows ``Phi'(alpha_k) Xi*_a(alpha_k)``
    with ``Phi'(z_j|zeros, poles) = prod sinh pi(z_j - zeros) / prod' sinh pi(z_j - poles)``.

    This form is determinant-level: with the reversed basis (default) its
    determinant is ``2^{floor((n-1)^2/2)} / superalternant``.  The plain
    ordering flips the sign by ``(-1)^{floor(n/2)}``.
    """
    a = np.asarray(alpha, dtype=complex)
    b = np.asarray(beta, dtype=complex)
    m, n = len(b), len(a) - len(b)
    pa = _sinh_phi_prime(a, b, a)
    pb = _sinh_phi_prime(b, a, b)
    out = np.empty((m + n, m + n), dtype=complex)
    d = b[:, None] - a[None, :]
    out[:m, :] = pb[:, None] * pa[None, :] * np.exp(-np.pi * n * d) / np.sinh(np.pi * d)
    for k in range(m + n):
        v = xi_vector_reversed(a[k], n) if reversed_xi else xi_vector(a[k], n)
        out[m:, k] = pa[k] * v
    return out


# --- generic linear algebra ---------------------------------------------------


def generic_det(m: np.ndarray) -> DetResult:
    """Determinant by pivoted LU with a 1-norm condition estimate."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("square matrix required")
    if m.shape[0] == 0:
        return DetResult(1.0 + 0j, 1.0)
    with warnings.catch_warnings():
        # an exactly singular matrix has determinant zero, not an error
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(m, check_finite=True)
    sign = (-1) ** int(np.sum(piv != np.arange(len(piv))))
    val = sign * np.prod(np.diag(lu))
    with np.errstate(all="ignore"):
        cond = float(np.real(np.linalg.cond(m, 1)))
    return DetResult(complex(val), cond if np.isfinite(cond) else np.inf)


def log_det(m: np.ndarray) -> tuple[complex, float]:
    """``(phase, log|det|)`` by pivoted LU, safe from overflow."""
    m = np.asarray(m, dtype=complex)
    if m.shape[0] == 0:
        return 1.0 + 0j, 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(m, check_finite=True)
    d = np.diag(lu)
    sign = (-1) ** int(np.sum(piv != np.arange(len(piv))))
    if np.any(d == 0):
        return 0j, -np.inf
    phase = sign * np.prod(d / np.abs(d))
    return complex(phase), float(np.sum(np.log(np.abs(d))))


def det_reduce(m: BlockMatrix) -> np.ndarray:
    """Reduced matrix ``P = D - B A^{-1} C`` with ``det M = det A det P``."""
    A = np.asarray(m.A, dtype=complex)
    if A.shape[0] and np.linalg.cond(A) > 1e14:
        raise SingularBlockError("pivot block A is singular")
    if A.shape[0] == 0:
        return np.asarray(m.D, dtype=complex)
    return np.asarray(m.D, dtype=complex) - np.asarray(m.B) @ np.linalg.solve(A, np.asarray(m.C))


def rank1_det(m: np.ndarray, p: np.ndarray, tol: float = 1e-10) -> complex:
    """``det(m + p)`` for rank-1 ``p`` via single-column replacements."""
    m = np.asarray(m, dtype=complex)
    p = np.asarray(p, dtype=complex)
    if m.shape != p.shape:
        raise ValueError("shape mismatch")
    s = np.linalg.svd(p, compute_uv=False)
    if len(s) > 1 and s[1] > tol * max(1.0, s[0]):
        raise ValueError("p is not of rank one")
    total = generic_det(m).value
    for a in range(m.shape[1]):
        ma = m.copy()
        ma[:, a] = p[:, a]
        total += generic_det(ma).value
    return complex(total)


def schur_quotient_check(x: Sequence[complex], y: Sequence[complex], r: int) -> tuple[complex, complex]:
    """Compare ``det C_{lambda_r} / det C_delta`` against ``e_r(x||y)``.

    ``lambda_r`` is the consecutive partition ``{0..n}`` with the exponent
    ``n - r`` skipped; both determinants are taken by pivoted LU.
    """
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    n = len(x) - len(y)
    if not 0 <= r < n + 1:
        raise ValueError("need 0 <= r <= n")
    jump = StructuredMatrixSpec("cauchy-vandermonde", "rational", tuple(x), tuple(y), Partition.jump(n, n - r))
    base = StructuredMatrixSpec("cauchy-vandermonde", "rational", tuple(x), tuple(y), Partition.delta(n))
    lhs = generic_det(build_matrix(jump)).value / generic_det(build_matrix(base)).value
    return complex(lhs), super_elementary(x, y, r)
