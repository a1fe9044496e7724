"""scikit-learn style facade.

``DomainBumper().fit(domain)`` builds a certificate; afterwards ``predict``
evaluates the bumped function G at points of C^2 and ``decision_function``
evaluates Re W + G at points (w, z1, z2) of C^3, negative on the bumped
side.  Domains may be given as a ModelDomain, a polynomial or expression text.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .parser import parse_expression
from .pipeline import ModelDomain, ZSpaceG, bump, validate_domain
from .polyalg import MixedPolynomial, WeightSignature
from .verifier import verify_certificate


def as_weights(weights):
    if isinstance(weights, WeightSignature):
        return weights
    if isinstance(weights, str):
        return WeightSignature.parse(weights)
    if weights is None:
        raise ValueError("weights are required for polynomial or text input")
    m1, m2 = weights
    return WeightSignature(int(m1), int(m2))


def as_domain(domain, weights=None):
    """Coerce a ModelDomain, MixedPolynomial or expression into a validated ModelDomain."""
    if isinstance(domain, ModelDomain):
        return domain
    if isinstance(domain, str):
        domain = parse_expression(domain)
    if not isinstance(domain, MixedPolynomial):
        raise TypeError(f"cannot interpret {type(domain).__name__} as a domain")
    return validate_domain(domain, as_weights(weights))


def check_points(X, dim=2):
    """(n, dim) complex array from complex input or (n, 2 dim) real pairs."""
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {X.shape}")
    if not np.iscomplexobj(X):
        if X.shape[1] == 2 * dim:
            X = X[:, 0::2] + 1j * X[:, 1::2]
        elif X.shape[1] != dim:
            raise ValueError(f"expected {dim} complex or {2 * dim} real columns, got {X.shape[1]}")
    if X.shape[1] != dim:
        raise ValueError(f"expected {dim} complex columns, got {X.shape[1]}")
    X = X.astype(complex)
    if not np.all(np.isfinite(X)):
        raise ValueError("input contains NaN or infinity")
    return X


class DomainBumper(BaseEstimator):
    """Builds and evaluates a bump certificate for a model domain.

    Parameters
    ----------
    weights : pair of int or "m1,m2", optional
        Needed when ``fit`` receives a polynomial or text instead of a ModelDomain.
    seed : int
        Construction seed; the certificate is a deterministic function of (domain, seed).
    n_samples : int
        Samples per strict-psh search during assembly.
    """

    def __init__(self, weights=None, seed=0, n_samples=6000):
        self.weights = weights
        self.seed = seed
        self.n_samples = n_samples

    def fit(self, X, y=None):
        dom = as_domain(X, self.weights)
        self.domain_ = dom
        self.certificate_ = bump(dom, seed=self.seed, n=self.n_samples)
        self.G_ = ZSpaceG(self.certificate_.assembled, dom, self.certificate_.f)
        self.R_ = self.certificate_.R
        self.K_ = self.certificate_.K
        self.n_curves_ = len(self.certificate_.curves)
        self.classification_ = self.certificate_.classification.verdict
        return self

    def predict(self, X):
        """G(z) at the rows of X (points of C^2)."""
        check_is_fitted(self, "certificate_")
        return self.G_.value(check_points(X, 2))

    def decision_function(self, X):
        """Re W + G(z) at rows (w, z1, z2); W = w' + K w'^2 with w' = w + f(z)."""
        check_is_fitted(self, "certificate_")
        X = check_points(X, 3)
        z = X[:, 1:]
        f = self.certificate_.f.compile().eval_complex(z[:, 0], z[:, 1])
        wh = X[:, 0] + f
        W = wh + self.K_ * wh ** 2
        return W.real + self.G_.value(z)

    def rho(self, X):
        check_is_fitted(self, "certificate_")
        return self.G_.rho(check_points(X, 2))

    def verify(self, samples=20000, seed=1):
        check_is_fitted(self, "certificate_")
        return verify_certificate(self.certificate_.to_json(), samples=samples, seed=seed)

    def to_json(self):
        check_is_fitted(self, "certificate_")
        return self.certificate_.to_json()
