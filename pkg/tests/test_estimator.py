import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from bumpforge.estimator import DomainBumper, as_weights, check_points
from bumpforge.polyalg import WeightSignature

HE = "|z1|^4 + 2*|z1*z2|^2 + |z2|^4"


@pytest.fixture(scope="module")
def fitted():
    return DomainBumper(weights="4,4", n_samples=3000).fit(HE)


def test_params_and_clone():
    est = DomainBumper(weights=(4, 4), seed=3)
    assert est.get_params() == {"weights": (4, 4), "seed": 3, "n_samples": 6000}
    c = clone(est)
    assert c.get_params() == est.get_params() and c is not est


def test_not_fitted():
    with pytest.raises(NotFittedError):
        DomainBumper().predict(np.zeros((1, 2), dtype=complex))


def test_fit_attributes(fitted):
    assert fitted.classification_ == "H_EXTENDIBLE"
    assert fitted.n_curves_ == 0 and fitted.K_ == 1 and fitted.R_ > 0
    assert fitted.to_json()["schema"] == "bumpforge-cert/1"


def test_predict_real_and_complex_input(fitted):
    rng = np.random.default_rng(0)
    z = 0.5 * fitted.R_ * (rng.standard_normal((20, 2)) + 1j * rng.standard_normal((20, 2))) / 3
    real = np.stack([z[:, 0].real, z[:, 0].imag, z[:, 1].real, z[:, 1].imag], axis=1)
    assert np.array_equal(fitted.predict(z), fitted.predict(real))
    # G sits strictly below rho away from the origin
    assert np.all(fitted.rho(z) - fitted.predict(z) > 0)


def test_decision_function_negative_on_hypersurface(fitted):
    rng = np.random.default_rng(1)
    z = fitted.R_ / 4 * (rng.standard_normal((50, 2)) + 1j * rng.standard_normal((50, 2))) / 2
    w = -fitted.rho(z) + 1j * rng.uniform(-0.01, 0.01, 50) * fitted.R_
    X = np.column_stack([w, z])
    assert np.all(fitted.decision_function(X) < 0)


def test_verify(fitted):
    assert fitted.verify(samples=3000).passed


def test_validation_helpers():
    assert as_weights("4,8") == WeightSignature(4, 8)
    assert as_weights((2, 3)) == WeightSignature(2, 3)
    with pytest.raises(ValueError):
        as_weights(None)
    assert check_points([1, 2]).shape == (1, 2)
    with pytest.raises(ValueError):
        check_points(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        check_points([[np.nan, 0]])
    with pytest.raises(TypeError):
        DomainBumper(weights="4,4").fit(42)
