import dataclasses
from fractions import Fraction

import numpy as np
import pytest

from bumpforge.conebump import (
    ConeBump,
    build_cone_bump,
    factor_bidegree,
    lowest_block,
    sample_cone_points,
    verify_cone_bump,
)
from bumpforge.errors import EmptyBlock, NotFactorable, NotStrictlyPsh
from bumpforge.exceptional import Slope, local_frame
from bumpforge.levi import fd_levi_matrix
from bumpforge.polyalg import MixedPolynomial

from conftest import MODEL_P_TEXT, poly


@pytest.fixture(scope="module")
def model_bump():
    Pi = poly(MODEL_P_TEXT)
    local = local_frame(Pi, Slope.from_fraction(0))
    return Pi, build_cone_bump(Pi, 0.0, local)


def test_lowest_block_and_factorization():
    mu, Q = lowest_block(poly(MODEL_P_TEXT))
    assert mu == 6 and Q == poly("|z1|^6*|z2|^2")
    fac = factor_bidegree(Q)
    assert (fac.a, fac.b, fac.two_m) == (3, 1, 2)
    assert fac.U == poly("|z1|^2")


def test_simple_factorization():
    fac = factor_bidegree(poly("|z1|^2*|z2|^2"))
    assert (fac.a, fac.b) == (1, 1) and fac.U == poly("|z1|^2")
    fac = factor_bidegree(poly("|z1|^4*|z2|^4 + Re(z1^2*z2^2)*|z1*z2|^2"))
    assert (fac.a, fac.b, fac.two_m) == (1, 1, 4)


def test_not_factorable():
    with pytest.raises(NotFactorable):
        factor_bidegree(poly("|z1|^2*|z2|^2 + |z1|^4"))
    with pytest.raises(NotFactorable):
        factor_bidegree(poly("|z1|^2*|z2|^2 + Re(z1*conj(z2))^2"))
    with pytest.raises(NotFactorable):
        factor_bidegree(poly("|z1|^4"))


def test_lowest_block_errors():
    with pytest.raises(EmptyBlock):
        lowest_block(MixedPolynomial())
    with pytest.raises(NotStrictlyPsh):
        lowest_block(poly("|z1|^2*|z2|^2 - 2*|z1|^2*|z2|^4"))


def test_model_hgood_bump(model_bump):
    Pi, b = model_bump
    # oracle: U = |x|^2 has Laplacian 4, so gamma = 1 and coefficient gamma/(2 m^2) = 1/2
    assert b.mode == "HGOOD"
    assert (b.a, b.b, b.two_m, b.mu, b.two_k) == (3, 1, 2, 6, 8)
    assert b.gamma == 1 and b.coefficient == Fraction(1, 2)
    assert b.c == pytest.approx(0.5, rel=0.02) and b.c < 0.5
    assert 0 < b.sigma <= 0.5
    assert all(v > 0 for v in b.shell_constants.values())
    # exponent bookkeeping: a * two_m / 1 = mu and total degree two_k
    assert b.a * b.two_m == b.mu and (b.a + b.b) * b.two_m == b.two_k


def test_value_and_jet(model_bump):
    _, b = model_bump
    z = sample_cone_points(b, 200, 3)
    assert np.allclose(b.value(z), 0.5 * np.abs(z[:, 0]) ** 6 * np.abs(z[:, 1]) ** 2)
    L = b.jet(z[:10]).L
    fd = fd_levi_matrix(b.value, z[:10])
    assert np.allclose(L, fd, rtol=1e-5, atol=1e-9)


def test_verify_and_tamper(model_bump):
    Pi, b = model_bump
    rep = verify_cone_bump(Pi, b)
    assert rep["passed"] and rep["decay_margin"] > 0
    bad = dataclasses.replace(b, c=2 * b.c)
    rep = verify_cone_bump(Pi, bad)
    assert not rep["passed"] and rep["decay_margin"] < 0
    assert len(rep["decay_argmin"]) == 4


def test_json_round_trip(model_bump):
    _, b = model_bump
    back = ConeBump.from_json(b.to_json())
    z = sample_cone_points(b, 50, 9)
    assert np.array_equal(back.value(z), b.value(z))
    assert back.gamma == b.gamma and back.mu == b.mu


def test_hbad_bump():
    # lowest block is FS-unit(z1 z2): the Laplacian of U vanishes at two angles
    Pi = poly("|z1*z2|^6 + (9/8)*|z1*z2|^4*Re(z1^2*z2^2) + |z1|^12")
    b = build_cone_bump(Pi, 0.0, local_frame(Pi, Slope.from_fraction(0)), n=2000)
    assert b.mode == "HBAD" and b.radial is not None
    assert (b.a, b.b, b.two_m, b.mu) == (1, 1, 6, 6)
    assert verify_cone_bump(Pi, b, n=2000)["passed"]
