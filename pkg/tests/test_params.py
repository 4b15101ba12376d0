import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from optomech_budget import constants
from optomech_budget.params import (CONSTANTS, Coupling, Material, MaterialError, MechanicalOscillator,
                                    OpticalCavity, ParameterError, silica_at)

positive = st.floats(min_value=1e-20, max_value=1e20, allow_nan=False, allow_infinity=False)


def test_silica_ambient_values():
    mat = silica_at(295.0)
    assert (mat.n, mat.dn_dT, mat.rho, mat.C, mat.D) == (1.45, 1.2e-5, 2200.0, 670.0, 8.7e-7)


def test_silica_is_pure():
    assert silica_at(295.0) == silica_at(295.0)


@pytest.mark.parametrize("T", [30.0, 4.2, 249.9, 350.1])
def test_silica_outside_table_is_an_error(T):
    with pytest.raises(MaterialError, match="unknown material regime"):
        silica_at(T)


def test_silica_override_used_for_its_range():
    cold = Material(n=1.45, dn_dT=1e-6, rho=2200.0, C=50.0, D=5e-6)
    assert silica_at(30.0, {(4.0, 40.0): cold}) is cold
    # ambient table still answers outside the override range
    assert silica_at(295.0, {(4.0, 40.0): cold}).C == 670.0


def test_silica_rejects_nonpositive_temperature():
    with pytest.raises(ParameterError):
        silica_at(0.0)


def test_constants_are_si_exact():
    assert CONSTANTS.k_B == 1.380649e-23
    assert CONSTANTS.c == 299792458.0
    assert CONSTANTS.hbar == 6.62607015e-34 / (2 * math.pi)
    assert constants.SILICA_TABLE_VERSION


@given(m=positive, om=positive, gm=positive)
def test_quality_factor_is_derived(m, om, gm):
    osc = MechanicalOscillator(m=m, Omega_m=om, Gamma_m=gm)
    assert osc.Q == om / gm


@given(wl=st.floats(min_value=1e-7, max_value=1e-5))
def test_optical_frequency_is_derived(wl):
    cav = OpticalCavity(wavelength=wl, kappa=1e8, kappa_ex=5e7, R=2e-5, r_minor=2e-6)
    assert cav.omega == 2 * math.pi * CONSTANTS.c / wl


@pytest.mark.parametrize("kwargs", [
    dict(m=0.0, Omega_m=1.0, Gamma_m=1.0),
    dict(m=1.0, Omega_m=-1.0, Gamma_m=1.0),
    dict(m=1.0, Omega_m=1.0, Gamma_m=float("nan")),
])
def test_oscillator_rejects_nonpositive(kwargs):
    with pytest.raises(ParameterError):
        MechanicalOscillator(**kwargs)


@pytest.mark.parametrize("kwargs", [
    dict(wavelength=850e-9, kappa=1.0, kappa_ex=2.0, R=1e-5, r_minor=1e-6),
    dict(wavelength=850e-9, kappa=1.0, kappa_ex=0.5, R=1e-6, r_minor=1e-5),
    dict(wavelength=0.0, kappa=1.0, kappa_ex=0.5, R=1e-5, r_minor=1e-6),
    dict(wavelength=850e-9, kappa=1.0, kappa_ex=0.0, R=1e-5, r_minor=1e-6),
])
def test_cavity_rejects_invalid(kwargs):
    with pytest.raises(ParameterError):
        OpticalCavity(**kwargs)


def test_cavity_defaults_to_critical_coupling(toroid):
    assert toroid.critically_coupled
    assert toroid.kappa == 2 * math.pi * 60e6


def test_coupling_validation():
    with pytest.raises(ParameterError):
        Coupling(g=0.0)
    with pytest.raises(ParameterError):
        Coupling(g=1.0, gamma_reactive=-1.0)
    assert Coupling.from_hz_per_m(50e15).g == 2 * math.pi * 50e15


def test_material_rejects_nonpositive():
    with pytest.raises(ParameterError):
        Material(n=1.45, dn_dT=0.0, rho=1.0, C=1.0, D=1.0)


def test_types_are_immutable(string_osc):
    with pytest.raises(Exception):
        string_osc.m = 1.0
