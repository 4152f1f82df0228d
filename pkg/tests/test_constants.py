"""Constants and material-parameter tests."""

import math

import pytest
from hypothesis import given, settings, strategies as st

from neqcp import constants
from neqcp.errors import DomainError


def test_pinned_values():
    assert constants.C_LIGHT == 299792458.0
    assert constants.K_BOLTZMANN == 1.380649e-23
    assert constants.HBAR == pytest.approx(6.62607015e-34 / (2.0 * math.pi),
                                           rel=1e-15)
    assert constants.FINE_STRUCTURE == pytest.approx(7.2973525693e-3, rel=1e-12)
    assert constants.V_FERMI_DEFAULT == constants.C_LIGHT / 300.0


def test_thermal_wavelength_room_temperature():
    # hbar*c/(k_B*T) at 300 K, about 7.6 um
    assert constants.thermal_wavelength(300.0) == \
        pytest.approx(7.632948402035783e-06, rel=1e-14)


def test_first_matsubara_frequency_room_temperature():
    assert constants.matsubara_frequency(1, 300.0) == \
        pytest.approx(2.467790253640998e14, rel=1e-14)


def test_matsubara_order_zero_is_zero():
    assert constants.matsubara_frequency(0, 300.0) == 0.0


@given(st.floats(1.0, 3000.0))
@settings(max_examples=50, deadline=None)
def test_thermal_wavelength_times_temperature_constant(temperature):
    product = constants.thermal_wavelength(temperature) * temperature
    reference = constants.thermal_wavelength(300.0) * 300.0
    assert product == pytest.approx(reference, rel=1e-12)


@given(st.integers(1, 2000), st.floats(1.0, 2000.0))
@settings(max_examples=50, deadline=None)
def test_matsubara_frequency_linear_in_order_and_temperature(order, temperature):
    base = constants.matsubara_frequency(1, temperature)
    assert constants.matsubara_frequency(order, temperature) == \
        pytest.approx(order * base, rel=1e-12)
    assert constants.matsubara_frequency(order, 2.0 * temperature) == \
        pytest.approx(2.0 * constants.matsubara_frequency(order, temperature),
                      rel=1e-12)


def test_domain_errors():
    with pytest.raises(DomainError):
        constants.thermal_wavelength(0.0)
    with pytest.raises(DomainError):
        constants.thermal_wavelength(-5.0)
    with pytest.raises(DomainError):
        constants.matsubara_frequency(-1, 300.0)
    with pytest.raises(DomainError):
        constants.matsubara_frequency(1, -300.0)


class TestPolarizability:
    def test_metal_sphere_is_volume_cubed_radius(self):
        assert constants.static_polarizability(50e-9) == (50e-9) ** 3

    def test_dielectric_reduction(self):
        alpha = constants.static_polarizability(50e-9, epsilon=4.0)
        assert alpha == pytest.approx((50e-9) ** 3 * 0.5, rel=1e-15)

    def test_large_permittivity_approaches_metal(self):
        metal = constants.static_polarizability(1e-8)
        nearly = constants.static_polarizability(1e-8, epsilon=1e6)
        assert nearly == pytest.approx(metal, rel=1e-5)

    def test_invalid_inputs(self):
        with pytest.raises(DomainError):
            constants.static_polarizability(-1e-9)
        with pytest.raises(DomainError):
            constants.static_polarizability(1e-9, epsilon=0.5)
