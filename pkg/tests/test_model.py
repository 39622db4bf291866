import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qpeh.model import (
    QuenchSpec,
    eta,
    eta_clamped,
    flat_occupation,
    linear_dispersion,
    thermal_occupation,
)


def test_hopping_band_values(hopping):
    assert hopping.energy(0.0) == pytest.approx(-1.0, abs=1e-15)
    assert hopping.velocity(math.pi / 2) == pytest.approx(1.0, abs=1e-15)
    assert hopping.velocity(math.pi / 6) == pytest.approx(0.5, abs=1e-15)
    assert hopping.v_max == 1.0


def test_velocity_is_derivative_of_energy(hopping):
    k = np.linspace(-3.0, 3.0, 31)
    h = 1e-6
    fd = (hopping.energy(k + h) - hopping.energy(k - h)) / (2 * h)
    np.testing.assert_allclose(hopping.velocity(k), fd, atol=1e-9)


def test_dimer_occupation_midpoint_and_reflection(dimer):
    assert dimer(math.pi / 2) == pytest.approx(0.5, abs=1e-15)
    k = np.linspace(-math.pi, math.pi, 101)
    np.testing.assert_allclose(dimer(k) + dimer(math.pi - k), 1.0, atol=1e-15)
    np.testing.assert_allclose(dimer(k), dimer(-k), atol=1e-15)


def test_dimer_occupation_sign_from_ring_state(dimer):
    # <D|c_k^dag c_k|D> on an L = 8 ring, built from the real-space dimer
    # correlations <c_a^dag c_b> = 1/2 inside each pair (a, b) and delta_ab/2.
    L = 8
    c0 = np.zeros((L, L))
    for a in range(0, L, 2):
        c0[a:a + 2, a:a + 2] = 0.5
    ks = 2 * np.pi * np.arange(L) / L - np.pi
    for k in ks:
        phase = np.exp(1j * k * np.arange(L)) / np.sqrt(L)
        # c_k = sum_x e^{-ikx} c_x / sqrt(L)
        nk = np.real(phase @ c0 @ phase.conj())
        assert nk == pytest.approx(float(dimer(k)), abs=1e-12)


@pytest.mark.parametrize("n, expected", [(0.5, 0.0), (0.25, math.log(3)), (0.75, -math.log(3))])
def test_eta_closed_forms(n, expected):
    assert eta(n) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, 1.5])
def test_eta_rejects_closed_interval(bad):
    with pytest.raises(ValueError):
        eta(bad)


@given(st.floats(min_value=1e-4, max_value=1 - 1e-4))
def test_eta_antisymmetry(n):
    assert eta(n) == pytest.approx(-eta(1.0 - n), abs=1e-10)


def test_eta_clamped_saturates():
    assert eta_clamped(0.0) == pytest.approx(math.log(1e12), rel=1e-9)
    # 1 - 1e-12 is not exact in binary, hence the looser match
    assert eta_clamped(1.0) == pytest.approx(-math.log(1e12), rel=1e-5)
    assert eta_clamped(0.3) == eta(0.3)


def test_dimer_log_ratio_matches_definition(dimer):
    k = np.linspace(0.05, 3.0, 40)
    np.testing.assert_allclose(dimer.eta(k), eta(dimer(k)), atol=1e-12)
    np.testing.assert_allclose(dimer.eta(-k), dimer.eta(k), atol=1e-14)


def test_thermal_occupation_eta_is_beta_energy(hopping):
    occ = thermal_occupation(0.7, hopping)
    k = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(eta(occ(k)), 0.7 * hopping.energy(k), atol=1e-12)


def test_flat_occupation_bounds():
    assert flat_occupation(0.5)(np.zeros(3)).tolist() == [0.5] * 3
    with pytest.raises(ValueError):
        flat_occupation(1.2)


def test_linear_dispersion_superlevel():
    d = linear_dispersion(2.0)
    assert d.v_max == 2.0
    assert d.superlevel(1.0, 1) == [(0.0, math.pi)]
    assert d.superlevel(3.0, -1) == []


def test_quench_spec_validation(hopping, dimer):
    assert QuenchSpec(hopping, dimer, 10, 0.0).ell == 10
    with pytest.raises(ValueError):
        QuenchSpec(hopping, dimer, 1, 1.0)
    with pytest.raises(ValueError):
        QuenchSpec(hopping, dimer, 10, -1.0)
    with pytest.raises(ValueError):
        QuenchSpec(hopping, dimer, 10.5, 1.0)
