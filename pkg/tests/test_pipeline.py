import numpy as np
import pytest

from bumpforge.deck import push
from bumpforge.errors import (
    NoAdmissibleK,
    NonLatticeMonomial,
    NotApplicable,
    NotDeckInvariant,
    NotPsh,
    NotWeightedHomogeneous,
    PluriharmonicInP,
    QWeightTooLow,
    SchemaError,
)
from bumpforge.pipeline import (
    BumpCertificate,
    ModelDomain,
    build_v,
    bump,
    choose_K,
    pushdown_coordinate_change,
    pushforward,
    strip_pullback,
    symmetrize,
    validate_domain,
)
from bumpforge.polyalg import MixedPolynomial, WeightSignature

from conftest import MODEL_TEXT, poly

W = WeightSignature
M = MixedPolynomial.monomial


def test_validate_splits_p_and_q(model_domain):
    assert model_domain.Q == poly("|z2|^10")
    assert model_domain.full == poly(MODEL_TEXT)
    back = ModelDomain.from_json(model_domain.to_json())
    assert back.P == model_domain.P and back.weights == W(8, 8)


@pytest.mark.parametrize("text, w, err", [
    ("|z1|^2 + |z2|^8", (4, 8), QWeightTooLow),
    ("-|z1|^8 + |z2|^8", (8, 8), NotPsh),
    ("|z1|^4 + |z2|^4 + Re(z1^4)", (4, 4), PluriharmonicInP),
    ("|z1|^6 + |z2|^6", (4, 4), NotWeightedHomogeneous),
    ("z1*|z2|^4", (4, 4), SchemaError),
])
def test_validate_errors(text, w, err):
    with pytest.raises(err):
        validate_domain(poly(text), W(*w))


def test_validate_explicit_q():
    with pytest.raises(QWeightTooLow):
        validate_domain(poly("|z1|^4 + |z2|^4"), W(4, 4), Q=poly("|z1|^4"))
    with pytest.raises(NotWeightedHomogeneous):
        validate_domain(poly("|z1|^4 + |z2|^6"), W(4, 4), Q=poly("|z1|^6"))


def test_symmetrize_polynomials():
    w = W(4, 8)  # sigma (2, 1)
    assert symmetrize(M(2, 2, 1, 1), w) == M(1, 1, 1, 1)
    # t1^2 conj(t1)^0 survives as a lattice term
    assert symmetrize(M(2, 0), w) == M(1, 0)
    with pytest.raises(NotDeckInvariant):
        symmetrize(M(1, 0), w)
    # deck invariant but off-lattice exponents: falls back to a callable
    avg = symmetrize(M(1, 1), w)
    z = np.array([[0.3 + 0.4j, 0.2j]])
    assert avg(z) == pytest.approx(0.5)


def test_pushforward_counts_branches():
    w = W(6, 4)  # sigma (2, 3)
    assert pushforward(M(6, 6, 0, 0), w) == M(3, 3) * 6


def test_pushdown_examples():
    w = W(6, 4)
    assert pushdown_coordinate_change(M(6, 0, 6, 0), w) == M(3, 0, 2, 0)
    assert pushdown_coordinate_change(MixedPolynomial(), w).is_zero()
    with pytest.raises(NonLatticeMonomial):
        pushdown_coordinate_change(M(1, 0), w)


def test_strip_pullback(weighted_domain):
    Pi, q, rho = strip_pullback(weighted_domain)
    assert Pi == poly("|z2|^8 + |z2|^4*|z1|^4")
    assert q.is_zero()
    assert rho == Pi + poly("|z1|^12")


def test_wedge_profiles(model_cert, weighted_cert):
    (v,) = build_v(model_cert.assembled, model_cert.domain.weights)
    assert v.single_valued and v.variable == 1 and v.degree == 10
    x = np.array([0.3, 0.2j, -0.1 + 0.1j])
    # homogeneous of degree 10 in its variable
    assert np.allclose(v(2 * x), 2 ** 10 * v(x), rtol=1e-9)
    (vw,) = build_v(weighted_cert.assembled, weighted_cert.domain.weights)
    assert vw.variable == 0 and vw.sigma == 2 and vw.degree == 6


def test_he_has_no_pieces(he_cert):
    assert he_cert.assembled.pieces == [] and he_cert.curves == []
    assert he_cert.constants["per_curve"] == []
    assert he_cert.K == 1 and he_cert.R > 0


def test_model_certificate(model_cert):
    c = model_cert.constants
    assert model_cert.K == 1 and 0 < model_cert.R <= c["per_curve"][0]["r_delta"]
    assert c["Delta"] == 10 and c["nu"] == 8 and c["exponent"] == "11/8"
    assert c["margin"] > 0 and c["off_wedge"]["C"] > 0
    pc = c["per_curve"][0]
    assert pc["C"] == pytest.approx(0.9 * pc["inf"])


def test_certificate_round_trip(model_cert):
    d = model_cert.to_json()
    back = BumpCertificate.from_json(d)
    zg, zb = model_cert.zspace(), back.zspace()
    z = zg.sample(model_cert.R, 500, 3)
    assert np.allclose(zb.value(z), zg.value(z), rtol=1e-12, atol=0)
    with pytest.raises(SchemaError):
        BumpCertificate.from_json({**d, "schema": "other/0"})
    with pytest.raises(SchemaError):
        BumpCertificate.from_json({k: v for k, v in d.items() if k != "G"})


def test_deck_invariance(weighted_cert):
    w = weighted_cert.domain.weights
    rng = np.random.default_rng(1)
    t = 0.2 * (rng.standard_normal((300, 2)) + 1j * rng.standard_normal((300, 2)))
    flipped = t * np.array([-1, 1])
    G = weighted_cert.assembled
    assert np.allclose(G.value(t), G.value(flipped), rtol=1e-10, atol=1e-300)
    assert np.allclose(push(t, w), push(flipped, w))


def test_rank_one_domain_not_applicable():
    dom = validate_domain(poly("|z1^2 - z2|^2"), W(4, 2), Q=poly("|z2|^4"))
    with pytest.raises(NotApplicable) as e:
        bump(dom)
    assert e.value.stage == "analyze"


def test_no_admissible_k(model_cert):
    zg = model_cert.zspace()
    # a gap that is negative everywhere makes Re W + G positive on every ball
    zg.gap = lambda z: -np.ones(len(z))
    with pytest.raises(NoAdmissibleK) as e:
        choose_K(zg, model_cert.R, n=500, max_halvings=3)
    assert e.value.witness is not None
