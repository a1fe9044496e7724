import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bumpforge.errors import NonPolynomialModulus, ParseError, SchemaError
from bumpforge.parser import DomainDocument, format_expression, load_domain_document, parse_expression
from bumpforge.polyalg import MixedPolynomial, WeightSignature

M = MixedPolynomial.monomial


def test_examples():
    assert parse_expression("|z1|^4") == M(2, 2)
    assert parse_expression("z1bar") == parse_expression("conj(z1)") == M(0, 1)
    assert parse_expression("Re(z1^2)") == (M(2, 0) + M(0, 2)) * Fraction(1, 2)
    assert parse_expression("Im(z2)") == M(0, 0, 1, 0, coeff=(0, Fraction(-1, 2))) + M(0, 0, 0, 1, coeff=(0, Fraction(1, 2)))
    assert parse_expression("(15/7)*z1") == M(1, 0, coeff=Fraction(15, 7))
    assert parse_expression("0.25*z2**2") == M(0, 0, 2, 0, coeff=Fraction(1, 4))
    assert parse_expression("i*i") == MixedPolynomial.constant(-1)
    assert parse_expression("-|z1 - z2|^2 + |z1|^2 + |z2|^2") == M(1, 0, 0, 1) + M(0, 1, 1, 0)
    assert parse_expression("z1/4") == M(1, 0, coeff=Fraction(1, 4))


@pytest.mark.parametrize("text, err", [
    ("|z1|^3", NonPolynomialModulus),
    ("|z1|", NonPolynomialModulus),
    ("", ParseError),
    ("z3", ParseError),
    ("z1 +", ParseError),
    ("(z1", ParseError),
    ("z1^-1", ParseError),
    ("z1^1.5", ParseError),
    ("1/z1", ParseError),
    ("1/0", ParseError),
    ("z1 $ z2", ParseError),
    ("Re z1", ParseError),
])
def test_errors(text, err):
    with pytest.raises(err):
        parse_expression(text)


def test_error_position():
    with pytest.raises(ParseError) as e:
        parse_expression("z1 + |z2|^5")
    assert e.value.position == 10
    assert e.value.to_dict()["error"] == "NonPolynomialModulus"


def test_domain_document(tmp_path):
    doc = DomainDocument(text="|z1|^4 + |z2|^4", weights=WeightSignature(4, 4), q_text="|z1|^6", name="d")
    back = DomainDocument.from_json(json.loads(json.dumps(doc.to_json())))
    assert back.polynomial() == doc.polynomial() and back.weights == doc.weights
    assert back.q_polynomial() == parse_expression("|z1|^6")
    p = tmp_path / "dom.json"
    p.write_text(json.dumps({"terms": M(2, 2).to_json_terms(), "weights": [4, 4]}))
    assert load_domain_document(str(p)).polynomial() == M(2, 2)
    t = tmp_path / "dom.txt"
    t.write_text("|z1|^2*|z2|^2\n")
    doc = load_domain_document(str(t))
    assert doc.name == "dom" and doc.polynomial() == M(1, 1, 1, 1)
    assert load_domain_document("|z1|^2").polynomial() == M(1, 1)
    with pytest.raises(SchemaError):
        DomainDocument.from_json({"weights": [2, 2]})
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(SchemaError):
        load_domain_document(str(bad))


coeffs = st.tuples(
    st.fractions(min_value=-20, max_value=20, max_denominator=50),
    st.fractions(min_value=-20, max_value=20, max_denominator=50),
)
keys = st.tuples(*[st.integers(0, 4)] * 4)


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(keys, coeffs, max_size=8))
def test_round_trip(terms):
    p = MixedPolynomial(terms)
    text = format_expression(p)
    assert parse_expression(text) == p


@settings(max_examples=50, deadline=None)
@given(st.dictionaries(keys, coeffs, min_size=1, max_size=6))
def test_values_agree_after_round_trip(terms):
    p = MixedPolynomial(terms)
    q = parse_expression(format_expression(p))
    z1, z2 = 0.3 + 0.7j, -0.4 + 0.1j
    assert np.isclose(p.compile().eval_complex(z1, z2), q.compile().eval_complex(z1, z2))
