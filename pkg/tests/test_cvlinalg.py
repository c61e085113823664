import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artifact.cvlinalg import (
    BlockMatrix,
    CoincidentNodeError,
    Partition,
    SingularBlockError,
    StructuredMatrixSpec,
    build_matrix,
    closed_form_det,
    closed_form_inverse,
    complete_symmetric,
    det_reduce,
    elementary_symmetric,
    generic_det,
    hyperbolic_dual_inverse_explicit,
    rank1_det,
    schur_quotient_check,
    super_elementary,
    superalternant,
    xi_vector,
)
from artifact.cvlinalg import _hyp_dressings


def random_nodes(rng, m, n, param):
    if param == "rational":
        x = rng.normal(size=m + n) + 1j * rng.normal(size=m + n)
        y = rng.normal(size=m) + 1j * rng.normal(size=m)
    else:
        # spread along the imaginary direction, i.e. around the unit circle in exp(2 pi alpha)
        x = rng.uniform(-0.15, 0.15, m + n) + 1j * rng.uniform(-0.5, 0.5, m + n)
        y = rng.uniform(-0.15, 0.15, m) + 1j * rng.uniform(-0.5, 0.5, m)
    return x, y


# --- partitions and specs ---------------------------------------------------


def test_partitions():
    assert Partition.delta(4).parts == (3, 2, 1, 0)
    assert Partition.gamma(4).parts == (3, 1)
    assert Partition.gamma(5).parts == (4, 2, 0)
    assert Partition.jump(3, 1).parts == (3, 2, 0)
    with pytest.raises(ValueError):
        Partition((0, 1))


def test_spec_validation():
    with pytest.raises(CoincidentNodeError):
        StructuredMatrixSpec("cauchy", "rational", [1, 2], [2, 3])
    with pytest.raises(CoincidentNodeError):
        StructuredMatrixSpec("cauchy", "hyperbolic", [0.1, 0.1 + 1j], [0.5, 0.7])
    with pytest.raises(ValueError):
        StructuredMatrixSpec("cauchy-vandermonde", "rational", [1, 2, 3], [5], Partition.delta(1))
    with pytest.raises(ValueError):
        StructuredMatrixSpec("vandermonde", "rational", [1, 2], [3], Partition.delta(2))


# --- symmetric functions ------------------------------------------------------


def test_elementary_and_complete():
    x = [1.0, 2.0, 3.0]
    assert elementary_symmetric(x, 0) == 1
    assert elementary_symmetric(x, 2) == pytest.approx(11)
    assert elementary_symmetric(x, 4) == 0
    assert complete_symmetric([1.0, 2.0], 2) == pytest.approx(1 + 2 + 4)


def test_super_elementary_examples():
    rng = np.random.default_rng(0)
    x, y = rng.normal(size=4), rng.normal(size=2)
    assert super_elementary(x, y, 1) == pytest.approx(x.sum() - y.sum())
    assert abs(super_elementary(x, x, 2)) < 1e-12
    assert abs(super_elementary([1, 2], [3], 1)) < 1e-14


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=5), st.lists(st.floats(-3, 3), max_size=4), st.integers(0, 6))
def test_super_elementary_generating_function(x, y, r):
    # coefficient of t^r in prod(1 + x t) / prod(1 + y t)
    t = 0.173
    series = sum(super_elementary(x, y, k) * t**k for k in range(40))
    exact = np.prod([1 + v * t for v in x]) / np.prod([1 + v * t for v in y])
    assert series == pytest.approx(exact, rel=1e-9, abs=1e-12)


# --- builders and determinants ----------------------------------------------------


def test_build_examples():
    m = build_matrix(StructuredMatrixSpec("cauchy", "rational", [0, 1], [2, 3]))
    assert np.allclose(m, [[-1 / 2, -1 / 3], [-1, -1 / 2]])
    v = build_matrix(StructuredMatrixSpec("vandermonde", "rational", [2.0, 5.0], (), Partition.delta(2)))
    assert np.allclose(v, [[1, 2], [1, 5]])
    h = build_matrix(StructuredMatrixSpec("cauchy-vandermonde", "hyperbolic", [0.1, 0.2], [0.3], Partition.delta(1)))
    assert np.allclose(h[:, -1], 1.0)


def test_xi_vector_layout():
    lam = 0.37
    v = xi_vector(lam, 4)
    assert v[0] == pytest.approx(np.cosh(3 * np.pi * lam))
    assert v[1] == pytest.approx(np.cosh(np.pi * lam))
    assert v[2] == pytest.approx(np.sinh(np.pi * lam))
    assert v[3] == pytest.approx(np.sinh(3 * np.pi * lam))
    assert xi_vector(lam, 3)[1] == 1.0


def test_closed_det_examples():
    assert closed_form_det(StructuredMatrixSpec("cauchy", "rational", [0, 1], [2, 3])) == pytest.approx(-1 / 12)
    x = [1.0, 2.5, 4.0]
    cv = StructuredMatrixSpec("cauchy-vandermonde", "rational", x, (), Partition.delta(3))
    assert closed_form_det(cv) == pytest.approx((2.5 - 1) * (4 - 1) * (4 - 2.5))
    s = StructuredMatrixSpec("cauchy-vandermonde", "rational", [1, 2, 4], [7], Partition.delta(2))
    assert abs(closed_form_det(s) - generic_det(build_matrix(s)).value) < 1e-12


@pytest.mark.parametrize("param", ["rational", "hyperbolic"])
@pytest.mark.parametrize("kind", ["cauchy-vandermonde", "dual-cauchy-vandermonde"])
@pytest.mark.parametrize("m,n", [(0, 1), (0, 4), (1, 1), (2, 2), (3, 1), (2, 3), (1, 5), (4, 4)])
def test_det_and_inverse(param, kind, m, n):
    rng = np.random.default_rng(100 * m + n)
    x, y = random_nodes(rng, m, n, param)
    s = StructuredMatrixSpec(kind, param, x, y, Partition.delta(n))
    mat = build_matrix(s)
    g = generic_det(mat)
    assert abs(closed_form_det(s) / g.value - 1) < 1e-9
    inv1 = closed_form_inverse(s)
    inv2 = closed_form_inverse(s, "dual")
    eye = np.eye(m + n)
    assert np.abs(mat @ inv1 - eye).max() < 1e-8
    assert np.abs(mat @ inv2 - eye).max() < 1e-8
    assert np.abs(inv1 - inv2).max() < 1e-8 * max(1.0, np.abs(inv1).max())


@pytest.mark.parametrize("param", ["rational", "hyperbolic"])
def test_cauchy_degeneration(param):
    rng = np.random.default_rng(7)
    x, y = random_nodes(rng, 4, 0, param)
    s = StructuredMatrixSpec("cauchy", param, x, y)
    assert abs(closed_form_det(s) / generic_det(build_matrix(s)).value - 1) < 1e-10
    assert np.abs(build_matrix(s) @ closed_form_inverse(s) - np.eye(4)).max() < 1e-9


def test_small_inverses():
    assert np.allclose(closed_form_inverse(StructuredMatrixSpec("cauchy", "rational", [0.3], [1.1])), [[0.3 - 1.1]])
    v = closed_form_inverse(StructuredMatrixSpec("vandermonde", "rational", [0, 1], (), Partition.delta(2)))
    assert np.allclose(v, [[1, 0], [-1, 1]])
    s = StructuredMatrixSpec("cauchy-vandermonde", "rational", [1, 2, 4], [7], Partition.delta(2))
    assert np.abs(build_matrix(s) @ closed_form_inverse(s) - np.eye(3)).max() < 1e-10


@pytest.mark.parametrize("param", ["rational", "hyperbolic"])
def test_duality_of_determinants(param):
    rng = np.random.default_rng(3)
    for m, n in [(1, 2), (2, 2), (3, 3), (2, 5)]:
        x, y = random_nodes(rng, m, n, param)
        a = generic_det(build_matrix(StructuredMatrixSpec("cauchy-vandermonde", param, x, y, Partition.delta(n)))).value
        b = generic_det(build_matrix(StructuredMatrixSpec("dual-cauchy-vandermonde", param, x, y, Partition.delta(n)))).value
        assert abs(a / b - 1) < 1e-9


def test_hyperbolic_rational_reparametrization():
    rng = np.random.default_rng(4)
    for m, n in [(2, 3), (3, 2), (1, 4)]:
        a, b = random_nodes(rng, m, n, "hyperbolic")
        hyp = StructuredMatrixSpec("cauchy-vandermonde", "hyperbolic", a, b, Partition.delta(n))
        rat = StructuredMatrixSpec("cauchy-vandermonde", "rational", np.exp(2 * np.pi * a), np.exp(2 * np.pi * b), Partition.delta(n))
        dl, dr, bm = _hyp_dressings(a, b, n)
        mapped = np.prod(dl) * np.prod(dr) * np.linalg.det(bm) * closed_form_det(rat)
        assert abs(generic_det(build_matrix(hyp)).value / mapped - 1) < 1e-9


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_hyperbolic_basis_normalization(n):
    # det of the cosh/sinh CV matrix is the superalternant times 2^floor((n-1)^2/2)
    rng = np.random.default_rng(n)
    a, b = random_nodes(rng, 2, n, "hyperbolic")
    s = StructuredMatrixSpec("cauchy-vandermonde", "hyperbolic", a, b, Partition.delta(n))
    ratio = generic_det(build_matrix(s)).value / superalternant(a, b, "hyperbolic")
    assert ratio == pytest.approx(2.0 ** (((n - 1) ** 2) // 2), rel=1e-9)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_explicit_dual_inverse_ordering(n):
    rng = np.random.default_rng(10 + n)
    a, b = random_nodes(rng, 2, n, "hyperbolic")
    sa = superalternant(a, b, "hyperbolic")
    norm = 2.0 ** (((n - 1) ** 2) // 2)
    rev = np.linalg.det(hyperbolic_dual_inverse_explicit(a, b, reversed_xi=True)) * sa
    plain = np.linalg.det(hyperbolic_dual_inverse_explicit(a, b, reversed_xi=False)) * sa
    assert rev == pytest.approx(norm, rel=1e-9)
    assert plain == pytest.approx((-1) ** (n // 2) * norm, rel=1e-9)


# --- Schur quotients and lemmas ----------------------------------------------------


def test_schur_quotient_examples():
    lhs, rhs = schur_quotient_check([1, 2, 4, 5], [9], 0)
    assert lhs == pytest.approx(1) and rhs == 1
    lhs, rhs = schur_quotient_check([1, 2, 4, 5], [9], 1)
    assert abs(lhs - rhs) < 1e-10
    # x = y + {w} in the limit gives e_1 = w
    eps = 1e-7
    lhs, rhs = schur_quotient_check([1 + eps, 3 + eps, 7.5], [1, 3], 1)
    assert lhs == pytest.approx(7.5, abs=1e-6)


def test_schur_quotient_random():
    rng = np.random.default_rng(8)
    for _ in range(20):
        m, n = rng.integers(0, 4), rng.integers(1, 5)
        x, y = random_nodes(rng, m, n, "rational")
        r = int(rng.integers(0, n))
        lhs, rhs = schur_quotient_check(x, y, r)
        assert abs(lhs - rhs) < 1e-10 * max(1, abs(rhs))


def test_det_reduce():
    rng = np.random.default_rng(9)
    full = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    bm = BlockMatrix(full[:4, :4], full[4:, :4], full[:4, 4:], full[4:, 4:])
    assert np.allclose(bm.dense(), full)
    p = det_reduce(bm)
    assert np.linalg.det(full) == pytest.approx(np.linalg.det(bm.A) * np.linalg.det(p), rel=1e-10)
    ident = BlockMatrix(np.eye(2), full[2:4, :2], full[:2, 2:4], full[2:4, 2:4])
    assert np.allclose(det_reduce(ident), ident.D - ident.B @ ident.C)
    tri = BlockMatrix(full[:3, :3], np.zeros((3, 3)), full[:3, 3:], full[3:, 3:])
    assert np.linalg.det(tri.dense()) == pytest.approx(np.linalg.det(tri.A) * np.linalg.det(tri.D), rel=1e-10)
    with pytest.raises(SingularBlockError):
        det_reduce(BlockMatrix(np.zeros((2, 2)), full[:2, :2], full[:2, :2], full[:2, :2]))


def test_rank1_det():
    rng = np.random.default_rng(10)
    m = rng.normal(size=(5, 5))
    assert rank1_det(m, np.zeros((5, 5))) == pytest.approx(np.linalg.det(m))
    u, v = rng.normal(size=2), rng.normal(size=2)
    assert rank1_det(np.eye(2), np.outer(u, v)) == pytest.approx(1 + v @ u)
    u, v = rng.normal(size=5), rng.normal(size=5)
    assert abs(rank1_det(m, np.outer(u, v)) - np.linalg.det(m + np.outer(u, v))) < 1e-10
    with pytest.raises(ValueError):
        rank1_det(m, rng.normal(size=(5, 5)))


def test_generic_det():
    assert generic_det(np.eye(5)).value == 1
    assert generic_det(np.diag([2.0, 3.0])).value == pytest.approx(6)
    rng = np.random.default_rng(12)
    x, y = random_nodes(rng, 4, 0, "rational")
    s = StructuredMatrixSpec("cauchy", "rational", x, y)
    r = generic_det(build_matrix(s))
    assert abs(r.value / closed_form_det(s) - 1) < 1e-9
    assert r.cond >= 1
