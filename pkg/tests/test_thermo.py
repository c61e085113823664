import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artifact import bethe, specfun
from artifact.thermo import (
    GROUND,
    HOLE,
    DensityKind,
    SpinonSet,
    StripBoundaryError,
    close_pair_identity,
    condensation_check,
    density,
    density_fourier,
    four_spinon_constant,
    four_spinon_parts,
    fourier_transform,
    ground_density,
    hl_density,
    hole_density,
    lieb_nystrom,
    nspinon_prefactor,
    spinon_energy_momentum,
    tau_ratio_thermo,
    two_spinon_ff_thermo,
)


def ground(M):
    ch = bethe.ChainSpec(M)
    return bethe.solve_real_roots(ch, bethe.ground_state_quantum_numbers(ch))


# --- densities ------------------------------------------------------------------


def test_density_values():
    # [PAPER] rho_g = 1/(2 cosh pi lam), rho_h(0) = ln 2 / pi
    assert abs(density(GROUND, 0.0) - 0.5) < 1e-15
    assert abs(ground_density(1.3) - 1 / (2 * math.cosh(math.pi * 1.3))) < 1e-15
    assert abs(hole_density(0.0) - math.log(2) / math.pi) < 1e-15
    assert abs(hl_density(0.0) - 2 / math.pi) < 1e-15
    # no overflow far out
    assert ground_density(400.0) >= 0


def test_strip_classification():
    assert GROUND.strip == "central"
    assert DensityKind(2, 0.7j).strip == "upper-outer"
    assert DensityKind(2, -0.7j).strip == "lower-outer"
    assert DensityKind(1, -0.8j).strip == "central"
    with pytest.raises(StripBoundaryError):
        DensityKind(2, 0.5j)
    with pytest.raises(ValueError):
        DensityKind(3)


@pytest.mark.parametrize("kind", [GROUND, HOLE, DensityKind(2, 0.7j), DensityKind(2, -0.3 + 0.2j), DensityKind(1, -0.8j)])
def test_density_against_nystrom(kind):
    sol = lieb_nystrom(kind)
    x = np.linspace(-5, 5, 41)
    assert np.max(np.abs(sol(x) - density(kind, x))) < 1e-6


def test_ground_density_normalization():
    # filling 1/2: int rho_g = 1/2
    assert abs(lieb_nystrom(GROUND).integral() - 0.5) < 1e-10


@pytest.mark.parametrize("kind", [GROUND, HOLE])
@pytest.mark.parametrize("t", [0.0, 0.7, -3.0, 12.0])
def test_density_fourier(kind, t):
    f = lambda x: complex(density(kind, x))
    assert abs(fourier_transform(f, t, even=True) - complex(density_fourier(kind, t))) < 1e-8


def test_fourier_transform_odd_part():
    # shifted Lorentzian: FT of 1/(pi(1+(x-a)^2)) is exp(-|t| - i a t)
    a = 0.4
    f = lambda x: 1 / (math.pi * (1 + (x - a) ** 2))
    for t in (0.5, -1.5):
        assert abs(fourier_transform(f, t) - np.exp(-abs(t) - 1j * a * t)) < 1e-8


def test_close_pair_identity():
    tau = np.array([0.3, -1.2 + 0.1j, 2.0])
    lhs, rhs = close_pair_identity(tau, 0.4)
    assert np.max(np.abs(lhs - rhs)) < 1e-13
    lhs, rhs = close_pair_identity(tau, 0.4, 0.01)
    assert 1e-6 < np.max(np.abs(lhs - rhs)) < 0.1


@pytest.mark.parametrize("pole", [0.2 + 0.3j, -0.4 - 0.2j])
def test_condensation_converges(pole):
    errs = [condensation_check(ground(M), pole).error for M in (32, 64, 128, 256)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 2e-4


def test_condensation_pole_validation():
    with pytest.raises(ValueError):
        condensation_check(ground(8), 0.3 + 0.6j)


# --- spinons --------------------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(st.floats(-6, 6))
def test_spinon_dispersion(theta):
    # [PAPER] eps = -(pi/2) sin p
    eps, p = spinon_energy_momentum(theta)
    assert abs(eps + math.pi / 2 * math.sin(p)) < 1e-12
    assert -math.pi <= p <= 0


def test_tau_ratio_thermo():
    assert tau_ratio_thermo(0.3, [0.3, 1.0]) == 0.0
    assert abs(tau_ratio_thermo(0.0, [-0.4, 0.4]) + math.tanh(0.2 * math.pi) ** 2) < 1e-15


@pytest.mark.parametrize("nu", [0.5, 1.0, 2.0])
def test_two_spinon_closed_form_vs_integral(nu):
    val = two_spinon_ff_thermo(0.0, nu, 1).value
    assert abs(val - 2 * math.exp(-specfun.two_spinon_I(nu))) < 1e-8


def test_two_spinon_closed_form_properties():
    assert two_spinon_ff_thermo(0.3, 0.3, 8).value == 0.0
    a = two_spinon_ff_thermo(-0.2, 0.9, 16).value
    assert a == pytest.approx(two_spinon_ff_thermo(0.9, -0.2, 16).value, rel=1e-14)
    assert a == pytest.approx(two_spinon_ff_thermo(0.3, 1.4, 16).value, rel=1e-14)
    assert two_spinon_ff_thermo(-0.2, 0.9, 32).value == pytest.approx(a / 4, rel=1e-14)


def test_prefactors():
    th2 = (-0.3, 0.5)
    assert nspinon_prefactor(SpinonSet(th2), 16) == pytest.approx(two_spinon_ff_thermo(*th2, 16).value, rel=1e-12)
    th4 = (-0.9, -0.3, 0.4, 1.0)
    for hl in bethe.solve_higher_level(th4, 1):
        c = hl.roots[0].real
        ref = four_spinon_constant(th4, 16) * np.prod(c - np.array(th4) - 0.5j)
        assert nspinon_prefactor(SpinonSet(th4, (c,)), 16) == pytest.approx(ref.real, rel=1e-12)


def test_spinon_set_validation():
    with pytest.raises(ValueError):
        SpinonSet((0.1, 0.2, 0.3))
    with pytest.raises(ValueError):
        SpinonSet((0.1, 0.2), (0.1, 0.2))
    assert SpinonSet((0.1, 0.2, 0.3, 0.4), (0.2,)).spin == 1
    with pytest.raises(ValueError):
        nspinon_prefactor(SpinonSet((0.1, 0.2, 0.3, 0.4)), 8)
    with pytest.raises(ValueError):
        four_spinon_constant((0.1, 0.2), 8)


def test_four_spinon_contour_independence():
    th = (-0.9, -0.3, 0.4, 1.0)
    p2 = four_spinon_parts(th, 1, 32, 32, alpha=0.2)
    p3 = four_spinon_parts(th, 1, 32, 32, alpha=0.3)
    assert abs(p2.value - p3.value) < 1e-6 * abs(p3.value)
    with pytest.raises(ValueError):
        four_spinon_parts(th, 4, 32, 32)
    with pytest.raises(ValueError):
        four_spinon_parts(th, 1, 32, 32, alpha=0.6)
