import numpy as np
import pytest

from artifact import bethe, oracle
from artifact.oracle import (
    SizeCapError,
    all_form_factors,
    bethe_vector,
    build_hamiltonian,
    diagonalize,
    diagonalize_cached,
    direct_form_factor,
    dual_bethe_vector,
    full_hamiltonian_apply,
    lowering,
    raising,
    reference_vector,
    restrict_to_sector,
    sector_basis,
)


def test_two_site_spectrum():
    H = build_hamiltonian(2, 0).toarray()
    assert H.shape == (2, 2)
    assert np.allclose(H, H.T)
    assert np.allclose(np.linalg.eigvalsh(H), [-8, 0])


def test_sector_dimensions():
    assert len(sector_basis(8, 0)) == 70
    assert len(sector_basis(8, 1)) == 56
    assert len(sector_basis(8, 4)) == 1
    with pytest.raises(ValueError):
        sector_basis(8, 5)


def test_size_cap():
    with pytest.raises(SizeCapError):
        diagonalize(18, 0)
    with pytest.raises(ValueError):
        diagonalize(7, 0)


def test_four_site_ground_matches_bethe():
    d = diagonalize(4, 0)
    chain = bethe.ChainSpec(4)
    g = bethe.solve_real_roots(chain, bethe.ground_state_quantum_numbers(chain))
    E, _ = bethe.energy_momentum(g)
    assert abs(d.eigenvalues[d.ground_index()] - E) < 1e-10
    assert abs(E + 12) < 1e-12


@pytest.mark.parametrize("M", [6, 8])
def test_labels_and_multiplets(M):
    total = 0
    for s in range(M // 2 + 1):
        d = diagonalize_cached(M, s)
        total += (2 * s + 1) * int(np.sum(d.spins == s))
        assert set(np.unique(d.spins)) <= set(range(s, M // 2 + 1))
    assert total == 2**M


def test_reference_and_empty_bethe_vector():
    v = bethe_vector([], 6)
    assert np.array_equal(v, reference_vector(6))


def test_six_site_ground_bethe_vector():
    M = 6
    chain = bethe.ChainSpec(M)
    g = bethe.solve_real_roots(chain, bethe.ground_state_quantum_numbers(chain))
    E, _ = bethe.energy_momentum(g)
    v = bethe_vector(g.roots, M)
    res = full_hamiltonian_apply(v, M) - E * v
    assert np.linalg.norm(res) / np.linalg.norm(v) < 1e-9
    # highest weight: S^+ annihilates it
    assert np.linalg.norm(raising(v, M)) < 1e-9 * np.linalg.norm(v)
    # bilinear pairing with the dual vector is the norm up to (-1)^N
    n = np.sum(dual_bethe_vector(g.roots, M) * v)
    assert abs((-1) ** g.N * n - np.vdot(v, v)) < 1e-9 * abs(np.vdot(v, v))


def test_lowering_moves_sector():
    M = 6
    chain = bethe.ChainSpec(M)
    q = bethe.QuantumNumberSet((-0.5, 0.5))
    st = bethe.solve_real_roots(chain, q)
    v = bethe_vector(st.roots, M)
    w = lowering(v, M)
    assert np.linalg.norm(restrict_to_sector(w, M, 0)) == pytest.approx(np.linalg.norm(w))


def test_form_factor_of_ground_with_itself():
    d = diagonalize_cached(8, 0)
    g = d.ground_index()
    assert direct_form_factor(8, g, g) < 1e-28


@pytest.mark.parametrize("M", [8, 10, 12])
def test_completeness(M):
    assert abs(np.sum(all_form_factors(M)) - 1) < 1e-12


def test_site_independence():
    d = diagonalize_cached(8, 0)
    g = d.ground_index()
    for e in (3, 10, 25):
        vals = [direct_form_factor(8, g, e, m) for m in range(8)]
        assert max(vals) - min(vals) < 1e-10


def test_frozen_triplet_form_factor():
    # frozen oracle: lowest two-spinon triplet of M = 8 at k = 7
    d = diagonalize_cached(8, 0)
    ff = all_form_factors(8)
    sel = (np.abs(d.eigenvalues + 17.834954035579329) < 1e-8) & (d.momenta == 7) & (d.spins == 1)
    assert abs(ff[sel].sum() - 0.036951549371156696) < 1e-12


def test_disk_cache(tmp_path, monkeypatch):
    monkeypatch.setenv(oracle.CACHE_ENV, str(tmp_path))
    a = diagonalize(6, 1)
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    b = diagonalize(6, 1)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.momenta, b.momenta)
