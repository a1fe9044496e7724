from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bumpforge.errors import NoCandidate, NonLatticeMonomial
from bumpforge.polyalg import (
    MixedPolynomial,
    WeightSignature,
    infer_weights,
    is_harmonic_1d,
    laplacian_1d,
    pluriharmonic_strip,
    pullback,
    pushdown,
    random_real_polynomial,
    restrict_to_line,
    shear,
    univariate_order,
    weighted_decompose,
    wirtinger,
)

from conftest import abs2, poly

M = MixedPolynomial.monomial


def test_wirtinger_examples():
    p = poly("|z1|^4*|z2|^2")
    assert wirtinger(p, "z1") == M(1, 2, 1, 1, coeff=2)
    assert wirtinger(p, "z2", "anti") == M(2, 2, 1, 0)
    assert wirtinger(poly("z1^3"), "z1", "anti").is_zero()


def test_laplacian_1d():
    s2 = abs2("z1")
    assert laplacian_1d(s2) == MixedPolynomial.constant(4)
    assert laplacian_1d(s2 * s2 * s2 * s2 * s2) == M(4, 4, coeff=100)


def test_weighted_decompose():
    w = WeightSignature(4, 8)
    p = poly("|z2|^8 + |z2|^4*|z1|^2 + |z1|^6")
    comps = weighted_decompose(p, w)
    assert [c.eta for c in comps] == [1, Fraction(3, 2)]
    assert comps[0].part == poly("|z2|^8 + |z2|^4*|z1|^2")
    assert sum((c.part for c in comps), MixedPolynomial()) == p


def test_weight_signature():
    w = WeightSignature(4, 8)
    assert (w.nu, w.sigma) == (8, (2, 1))
    assert WeightSignature.parse("6, 4").sigma == (2, 3)
    with pytest.raises(ValueError):
        WeightSignature(0, 2)


def test_infer_weights():
    w, tag = infer_weights(poly("|z1|^6*|z2|^2 + |z1|^8 + |z2|^10"))
    assert tag == "NON_AUTHORITATIVE"
    assert weighted_decompose(poly("|z1|^6*|z2|^2 + |z1|^8"), w)[0].eta == 1
    assert infer_weights(poly("|z1|^4 + |z2|^4"))[0] == WeightSignature(4, 4)
    with pytest.raises(NoCandidate):
        infer_weights(MixedPolynomial())
    with pytest.raises(NoCandidate):
        infer_weights(poly("Re(z1^3)"))


def test_pluriharmonic_strip():
    p = poly("|z1|^4 + Re(z1^2*z2) + Im(z2^3)")
    q, rho = pluriharmonic_strip(p)
    assert q.is_holomorphic()
    assert rho == poly("|z1|^4")
    assert p == rho + q.real_part()
    # degree cap leaves the cubic alone
    q2, rho2 = pluriharmonic_strip(p, max_degree=2)
    assert q2.is_zero() and rho2 == p


def test_restrict_to_line():
    p = poly("|z1|^6*|z2|^2 + |z1|^8")
    assert restrict_to_line(p, xi=0).is_zero()
    u = restrict_to_line(p, axis=True)
    assert u == M(4, 4)
    v = restrict_to_line(poly("|z1 - z2|^2"), xi=1)
    assert v.is_zero()
    shifted = restrict_to_line(poly("|z1|^2"), base=(1, 0), direction=(1, 0))
    assert shifted == M(1, 1) + M(1, 0) + M(0, 1) + MixedPolynomial.constant(1)


def test_pullback_pushdown():
    w = WeightSignature(6, 4)  # sigma = (2, 3)
    p = poly("z1*conj(z2)")
    assert pullback(p, w) == M(2, 0, 0, 3)
    assert pushdown(M(6, 0, 6, 0), w) == M(3, 0, 2, 0)
    with pytest.raises(NonLatticeMonomial):
        pushdown(M(1, 0, 0, 0), w)


def test_shear_moves_line():
    p = poly("|z1 - 2*z2|^2*|z1|^2")
    sheared = shear(p, 2)
    assert restrict_to_line(sheared, xi=0).is_zero()


def test_univariate_helpers():
    assert is_harmonic_1d(poly("Re(z1^5)"))
    assert not is_harmonic_1d(abs2("z1"))
    assert univariate_order(poly("3 + |z1|^4 + z1^7")) == 4
    assert univariate_order(MixedPolynomial.constant(2)) == float("inf")


# hypothesis properties

seeds = st.integers(0, 2 ** 32 - 1)
weights = st.tuples(st.integers(1, 6), st.integers(1, 6)).map(lambda t: WeightSignature(*t))


def _rand(seed, degree=6, n=6):
    return random_real_polynomial(np.random.default_rng(seed), degree, n_terms=n)


@settings(max_examples=40, deadline=None)
@given(seeds, weights)
def test_decompose_sums_back(seed, w):
    p = _rand(seed)
    comps = weighted_decompose(p, w)
    assert sum((c.part for c in comps), MixedPolynomial()) == p
    assert [c.eta for c in comps] == sorted(c.eta for c in comps)
    for c in comps:
        assert all(w.eta(k) == c.eta for k in c.part.terms)


@settings(max_examples=40, deadline=None)
@given(seeds, weights, st.floats(0.3, 2.0))
def test_weighted_scaling_law(seed, w, lam):
    # a weighted-homogeneous component scales like lam^(nu*eta) under z_j -> lam^(nu/m_j) z_j
    comps = weighted_decompose(_rand(seed), w)
    rng = np.random.default_rng(seed + 1)
    z1, z2 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    for c in comps:
        f = c.part.compile()
        a = f.eval_complex(lam ** w.sigma1 * z1, lam ** w.sigma2 * z2)
        b = lam ** float(w.nu * c.eta) * f.eval_complex(z1, z2)
        assert abs(a - b) <= 1e-9 * (1 + abs(b))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_strip_consistency(seed):
    p = _rand(seed) + poly("Re(z1^2*z2) + Im(z2^3) + (2/3)*Re(z1)")
    q, rho = pluriharmonic_strip(p)
    assert q.is_holomorphic()
    assert rho + q.real_part() == p
    assert not any(
        (k[1] == 0 and k[3] == 0 or k[0] == 0 and k[2] == 0) and sum(k) > 0 for k in rho.terms
    )


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_wirtinger_matches_finite_differences(seed):
    p = _rand(seed, degree=5)
    rng = np.random.default_rng(seed)
    z1, z2 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    h = 1e-6
    f = p.compile()
    dx = (f.eval_complex(z1 + h, z2) - f.eval_complex(z1 - h, z2)) / (2 * h)
    dy = (f.eval_complex(z1 + 1j * h, z2) - f.eval_complex(z1 - 1j * h, z2)) / (2 * h)
    d = wirtinger(p, "z1").compile().eval_complex(z1, z2)
    assert abs(d - (dx - 1j * dy) / 2) <= 1e-5 * (1 + abs(d))
    dbar = wirtinger(p, "z1", "anti").compile().eval_complex(z1, z2)
    assert abs(dbar - (dx + 1j * dy) / 2) <= 1e-5 * (1 + abs(dbar))


@settings(max_examples=40, deadline=None)
@given(seeds, weights)
def test_pullback_degree(seed, w):
    p = _rand(seed)
    pb = pullback(p, w)
    # every monomial lands in pulled-back degree nu * eta
    for k, c in p.terms.items():
        s1, s2 = w.sigma
        key = (k[0] * s1, k[1] * s1, k[2] * s2, k[3] * s2)
        assert sum(key) == w.nu * w.eta(k)
        assert pb.coeff(key) == c
    assert pushdown(pb, w) == p
