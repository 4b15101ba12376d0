import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optomech_budget.geometry import (ModeGeometry, mode_geometry, sampled_length,
                                      scaled_geometry)
from optomech_budget.params import OpticalCavity, ParameterError

TAU_K = (4 / math.pi) ** (1 / 3)


def tau_identity_residual(geom, D):
    return (1 / geom.tau) / TAU_K / D / (geom.b ** -2 + geom.d ** -2) - 1


def test_angular_mode_number(geom):
    # 2 pi R n / lambda = 192.93
    assert geom.ell == 193


def test_semi_axes(geom):
    assert geom.b == pytest.approx(4.150098051451219e-07, rel=1e-12)
    assert geom.d == pytest.approx(7.480544714310444e-07, rel=1e-12)


def test_volume_and_tau_follow_semi_axes(geom, silica):
    assert geom.V == pytest.approx(2 * math.pi ** 2 * 18e-6 * geom.b * geom.d, rel=1e-15)
    assert abs(tau_identity_residual(geom, silica.D)) < 1e-14


def test_length_homogeneity_at_fixed_ell(silica):
    # R and r scaled x4 while lambda scales x4 keeps ell fixed
    small = mode_geometry(OpticalCavity(850e-9, 1e8, 5e7, 18e-6, 2e-6), silica)
    big = mode_geometry(OpticalCavity(4 * 850e-9, 1e8, 5e7, 4 * 18e-6, 4 * 2e-6), silica)
    assert small.ell == big.ell
    assert big.b / small.b == pytest.approx(4, rel=1e-14)
    assert big.d / small.d == pytest.approx(4, rel=1e-14)


def test_zero_mode_number_rejected(silica):
    cav = OpticalCavity(wavelength=1e-3, kappa=1e8, kappa_ex=5e7, R=2e-5, r_minor=2e-6)
    with pytest.raises(ParameterError, match="angular mode number"):
        mode_geometry(cav, silica)


def test_scaling_identity(geom, silica):
    assert scaled_geometry(geom, 1.0, 1.0, silica) == geom


def test_scaling_fitted_outcome(geom, silica):
    fitted = scaled_geometry(geom, 0.75, 1.25, silica)
    assert fitted.b == pytest.approx(0.75 * geom.b, rel=1e-15)
    assert fitted.d == pytest.approx(1.25 * geom.d, rel=1e-15)
    assert fitted.V == pytest.approx(0.75 * 1.25 * geom.V, rel=1e-14)
    assert fitted.ell == geom.ell


@given(s_b=st.floats(0.05, 20), s_d=st.floats(0.05, 20))
def test_scaling_keeps_tau_identity(geom, silica, s_b, s_d):
    assert abs(tau_identity_residual(scaled_geometry(geom, s_b, s_d, silica), silica.D)) < 1e-13


@pytest.mark.parametrize("s", [(0.0, 1.0), (1.0, -1.0)])
def test_scaling_rejects_nonpositive(geom, silica, s):
    with pytest.raises(ParameterError):
        scaled_geometry(geom, *s, silica)


@settings(max_examples=200)
@given(R=st.floats(10e-6, 40e-6), r=st.floats(1e-6, 4e-6))
def test_radial_axis_is_smaller(silica, R, r):
    geom = mode_geometry(OpticalCavity(850e-9, 1e8, 5e7, R, r), silica)
    assert geom.b < geom.d


def test_geometry_is_pure(toroid, silica):
    assert mode_geometry(toroid, silica) == mode_geometry(toroid, silica)


def test_geometry_rejects_invalid_fields():
    with pytest.raises(ParameterError):
        ModeGeometry(ell=0, b=1.0, d=1.0, V=1.0, tau=1.0, R=1.0)


@pytest.mark.parametrize("R, expected", [(15e-6, 2.5248762345905195e-06), (18e-6, 2.7658633371878662e-06)])
def test_sampled_length(R, expected):
    assert sampled_length(850e-9, R) == pytest.approx(expected, rel=1e-14)


def test_sampled_length_square_root_law():
    assert sampled_length(850e-9, 4 * 17e-6) == pytest.approx(2 * sampled_length(850e-9, 17e-6), rel=1e-15)


def test_sampled_length_rejects_nonpositive():
    with pytest.raises(ParameterError):
        sampled_length(0.0, 1e-5)
