import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bumpforge.errors import RegionEmpty
from bumpforge.levi import (
    PolyJetEvaluator,
    check_psh,
    eig2,
    fd_levi_matrix,
    hessian,
    norm_power_jet,
    strict_psh_lower_bound,
)
from bumpforge.polyalg import MixedPolynomial, random_real_polynomial
from bumpforge.sampling import Ball, Cone

from conftest import poly

M = MixedPolynomial.monomial


def test_hessian_matches_oracle():
    # frozen from tools/oracles.py: det = 16 |z1|^10, h22 = |z1|^4
    H = hessian(poly("|z1|^8 + |z1|^4*|z2|^2"))
    assert H.det() == M(5, 5, coeff=16)
    assert H.h22 == M(2, 2)
    assert H.h11 == poly("16*|z1|^6 + 4*|z1|^2*|z2|^2")
    assert H.h12 == M(1, 2, 1, 0, coeff=2)
    assert H.trace() == H.h11 + H.h22


def test_eig2_matches_numpy():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((50, 2, 2)) + 1j * rng.standard_normal((50, 2, 2))
    L = A @ np.conj(np.transpose(A, (0, 2, 1))) - np.eye(2)
    lo, hi = eig2(L)
    ref = np.linalg.eigvalsh(L)
    assert np.allclose(lo, ref[:, 0], atol=1e-12) and np.allclose(hi, ref[:, 1], atol=1e-12)


def test_check_psh_pass_and_fail():
    good = check_psh(poly("|z1|^4 + |z2|^4"), Ball(0.1, 1.0), n=2000, seed=1)
    assert good.passed and good.witness is None and good.n_samples == 2000
    bad = check_psh(poly("|z1|^2 - |z2|^2"), Ball(0.1, 1.0), n=500, seed=1)
    assert bad.verdict == "FAIL"
    assert bad.witness is not None and bad.min_scaled_eigenvalue <= -0.99
    assert bad.to_dict()["verdict"] == "FAIL"


def test_check_psh_deterministic():
    a = check_psh(poly("|z1|^6*|z2|^2 + |z1|^8 + |z2|^8"), Ball(0.1, 1.0), n=3000, seed=7)
    b = check_psh(poly("|z1|^6*|z2|^2 + |z1|^8 + |z2|^8"), Ball(0.1, 1.0), n=3000, seed=7)
    assert a.min_scaled_eigenvalue == b.min_scaled_eigenvalue


def test_strict_bound():
    B, info = strict_psh_lower_bound(poly("|z1|^2 + |z2|^2"), Ball(0.1, 1.0), n=500)
    assert B == pytest.approx(1.0)
    B0, info0 = strict_psh_lower_bound(poly("|z1|^4"), Ball(0.1, 1.0), n=500)
    assert B0 == 0.0 and info0["raw_min"] <= 1e-12


def test_empty_region():
    with pytest.raises(RegionEmpty):
        check_psh(poly("|z1|^2"), Ball(0.1, 1.0), n=0)
    with pytest.raises(RegionEmpty):
        check_psh(poly("|z1|^2"), Cone(0.1, 1.0, xi=0, aperture=0.0), n=10)


def test_norm_power_jet_against_fd():
    rng = np.random.default_rng(0)
    z = rng.standard_normal((20, 2)) + 1j * rng.standard_normal((20, 2))
    jet = norm_power_jet(z, 3)
    fd = fd_levi_matrix(lambda x: np.sum(np.abs(x) ** 2, axis=1) ** 3, z)
    assert np.allclose(jet.L, fd, rtol=1e-6, atol=1e-6)
    assert np.allclose(jet.val, np.sum(np.abs(z) ** 2, axis=1) ** 3)


seeds = st.integers(0, 2 ** 32 - 1)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 5), st.floats(0.2, 3.0))
def test_levi_homogeneity(seed, half, lam):
    # a homogeneous polynomial of degree d has Levi matrix scaling like lam^(d-2)
    rng = np.random.default_rng(seed)
    d = 2 * half
    p = random_real_polynomial(rng, d, n_terms=5, homogeneous=True)
    z = rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2))
    ev = PolyJetEvaluator(p)
    L1, L2 = ev(z).L, ev(lam * z).L
    assert np.allclose(L2, lam ** (d - 2) * L1, rtol=1e-9, atol=1e-9 * np.abs(L1).max())


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_levi_hermitian_and_real_on_diagonal(seed):
    rng = np.random.default_rng(seed)
    p = random_real_polynomial(rng, 6)
    z = rng.standard_normal((8, 2)) + 1j * rng.standard_normal((8, 2))
    H = hessian(p)
    m = H.matrix(z)
    assert np.allclose(m, np.conj(np.transpose(m, (0, 2, 1))), atol=1e-9 * (1 + np.abs(m).max()))
    v = rng.standard_normal((8, 2)) + 1j * rng.standard_normal((8, 2))
    q = H.levi(z, v)
    assert np.all(np.abs(q.imag) <= 1e-9 * (1 + np.abs(q.real)))
