from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bumpforge.errors import Harmonic, NotSubharmonic
from bumpforge.fsbump import (
    RadialBump,
    circle_profile,
    construct_radial_bump,
    laplacian_composite,
    verify_radial_bump,
    univariate,
)

from conftest import FS_UNIT

THETA = np.linspace(0, 2 * np.pi, 4096, endpoint=False)


@pytest.fixture(scope="module")
def fs_unit():
    prof = circle_profile(univariate(FS_UNIT))
    return prof, construct_radial_bump(prof, sigma=0.2)


def test_abs_square_constant_profile():
    prof = circle_profile(univariate({(1, 1): 1}))
    assert prof.zeros == []
    assert np.allclose(prof.L(THETA), 4)
    bump = construct_radial_bump(prof)
    # no zeros: constant profile min(1, Lmin / (8 m^2)) = 1/2
    assert bump.constant and bump.params["mode"] == "constant"
    assert bump.values[0] == pytest.approx(0.5)
    assert bump.C1 > 0 and bump.C2 > 0
    assert verify_radial_bump(prof, bump)["passed"]


def test_fs_unit_profile(fs_unit):
    prof, bump = fs_unit
    # oracle: Laplacian / r^4 = 72 cos^2 theta, zeros at pi/2 and 3 pi/2
    assert np.allclose(prof.L(THETA), 72 * np.cos(THETA) ** 2, atol=1e-9)
    assert prof.zeros == pytest.approx([np.pi / 2, 3 * np.pi / 2], abs=1e-12)
    assert prof.zero_certificates == ["exact", "exact"]
    assert prof.two_m == 6 and prof.m == 3
    assert bump.params["mode"] == "caps"
    h = bump.h(THETA)
    assert np.all(h > 0) and np.all(h <= 1)
    # the profile peaks at the zeros of the Laplacian
    assert np.argmax(h) in (np.argmin(np.abs(THETA - np.pi / 2)), np.argmin(np.abs(THETA - 3 * np.pi / 2)))


def test_harmonic_rejected():
    with pytest.raises(Harmonic):
        circle_profile(univariate({(4, 0): Fraction(1, 2), (0, 4): Fraction(1, 2)}))


def test_not_subharmonic_rejected():
    with pytest.raises(NotSubharmonic) as e:
        circle_profile(univariate({(3, 1): Fraction(1, 2), (1, 3): Fraction(1, 2)}))
    assert "theta" in e.value.to_dict()["witness"]


def test_odd_degree_rejected():
    with pytest.raises(ValueError):
        circle_profile(univariate({(2, 1): 1, (1, 2): 1}))


def test_tampered_amplitude_fails(fs_unit):
    prof, bump = fs_unit
    bad = RadialBump(bump.two_m, bump.values * 10, bump.C1, bump.C2, bump.sigma, bump.zeros, bump.params)
    rep = verify_radial_bump(prof, bad)
    assert not rep["passed"]
    assert rep["witness"] is not None or rep["h_max"] > 1
    assert min(v["margin_C1"] for v in rep["per_delta"].values()) < 0


def test_zero_delta_margin_is_min_laplacian(fs_unit):
    prof, bump = fs_unit
    grid = 8192
    rep = verify_radial_bump(prof, bump, deltas=(0.0,), grid=grid)
    theta = np.arange(grid) * 2 * np.pi / grid
    assert rep["per_delta"]["0.0"]["margin_C1"] == pytest.approx(float(prof.L(theta).min()), abs=1e-12)


def test_json_round_trip(fs_unit):
    _, bump = fs_unit
    back = RadialBump.from_json(bump.to_json())
    assert np.array_equal(back.h(THETA), bump.h(THETA))
    assert (back.C1, back.C2, back.zeros) == (bump.C1, bump.C2, bump.zeros)


def test_wirtinger_data_matches_fd(fs_unit):
    _, bump = fs_unit
    rng = np.random.default_rng(5)
    s = 0.5 * (rng.standard_normal(20) + 1j * rng.standard_normal(20))
    h = 1e-5
    fx = (bump.F(s + h) - bump.F(s - h)) / (2 * h)
    fy = (bump.F(s + 1j * h) - bump.F(s - 1j * h)) / (2 * h)
    assert np.allclose(bump.Fs(s), (fx - 1j * fy) / 2, rtol=1e-5, atol=1e-8)
    lap = (bump.F(s + h) + bump.F(s - h) + bump.F(s + 1j * h) + bump.F(s - 1j * h) - 4 * bump.F(s)) / h ** 2
    assert np.allclose(4 * bump.Fss(s), lap, rtol=1e-3, atol=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_composite_is_affine_in_delta(d1, d2, lam):
    prof = circle_profile(univariate(FS_UNIT))
    bump = construct_radial_bump(prof, sigma=0.2, grid=1024, check_grid=2048)
    a = laplacian_composite(prof, bump, THETA, lam * d1 + (1 - lam) * d2)
    b = lam * laplacian_composite(prof, bump, THETA, d1) + (1 - lam) * laplacian_composite(prof, bump, THETA, d2)
    assert np.allclose(a, b, atol=1e-9)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 4), st.fractions(Fraction(0), Fraction(9, 10)))
def test_subharmonic_family_gets_a_bump(m, k):
    # |s|^{2m} + k |s|^{2m-2} Re(s^2) stays subharmonic for small k
    terms = {(m, m): 1}
    if m >= 2:
        terms[(m + 1, m - 1)] = terms[(m - 1, m + 1)] = k / 2
    prof = circle_profile(univariate(terms), grid=2048)
    bump = construct_radial_bump(prof, sigma=0.2, grid=1024, check_grid=2048)
    rep = verify_radial_bump(prof, bump, grid=2048)
    assert rep["passed"]
    assert 0 < rep["h_min"] <= rep["h_max"] <= 1
