from fractions import Fraction

import pytest

from bumpforge.parser import parse_expression
from bumpforge.pipeline import bump, validate_domain
from bumpforge.polyalg import MixedPolynomial, WeightSignature

MODEL_TEXT = "|z1|^6*|z2|^2 + |z1|^8 + (15/7)*|z1|^2*Re(z1^6) + |z2|^10"
MODEL_P_TEXT = "|z1|^6*|z2|^2 + |z1|^8 + (15/7)*|z1|^2*Re(z1^6)"
HE_TEXT = "|z1|^4 + 2*|z1*z2|^2 + |z2|^4"
WEIGHTED_P_TEXT = "|z2|^8 + |z2|^4*|z1|^2"
WEIGHTED_Q_TEXT = "|z1|^6"


def poly(text):
    return parse_expression(text)


def abs2(name):
    z = MixedPolynomial.var(name)
    return z * z.conj()


@pytest.fixture(scope="session")
def z():
    """(|z1|^2, |z2|^2, z1, z2) as polynomials."""
    return abs2("z1"), abs2("z2"), MixedPolynomial.var("z1"), MixedPolynomial.var("z2")


@pytest.fixture(scope="session")
def model_P():
    return poly(MODEL_P_TEXT)


@pytest.fixture(scope="session")
def model_domain():
    return validate_domain(poly(MODEL_TEXT), WeightSignature(8, 8), name="model")


@pytest.fixture(scope="session")
def he_domain():
    return validate_domain(poly(HE_TEXT), WeightSignature(4, 4), name="he")


@pytest.fixture(scope="session")
def weighted_domain():
    return validate_domain(poly(WEIGHTED_P_TEXT), WeightSignature(4, 8), Q=poly(WEIGHTED_Q_TEXT), name="weighted")


# certificates are expensive; build each once per session
@pytest.fixture(scope="session")
def model_cert(model_domain):
    return bump(model_domain, seed=0)


@pytest.fixture(scope="session")
def he_cert(he_domain):
    return bump(he_domain, seed=0)


@pytest.fixture(scope="session")
def weighted_cert(weighted_domain):
    return bump(weighted_domain, seed=0)


@pytest.fixture(scope="session")
def model_cert_json(model_cert):
    return model_cert.to_json()


FS_UNIT = {(3, 3): 1, (4, 2): Fraction(9, 16), (2, 4): Fraction(9, 16)}


# ------------------------------------------------------------ acceptance summary

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): one of the numbered acceptance criteria")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    n, title = mark.args
    prev = _ACCEPTANCE.get(n, (title, "PASS", ""))
    if rep.failed:
        msg = str(rep.longrepr.reprcrash.message).splitlines()[0] if hasattr(rep.longrepr, "reprcrash") else "error"
        _ACCEPTANCE[n] = (title, "FAIL", msg)
    elif rep.when == "call" and prev[1] != "FAIL":
        _ACCEPTANCE[n] = (title, "PASS", getattr(item, "acceptance_note", ""))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        title, status, note = _ACCEPTANCE[n]
        terminalreporter.write_line(f"[{status}] {n}. {title}" + (f"  ({note})" if note else ""))
