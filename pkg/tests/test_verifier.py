import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bumpforge.errors import SchemaError
from bumpforge.fsbump import circle_profile, construct_radial_bump, univariate
from bumpforge.polyalg import WeightSignature
from bumpforge.sampling import Ball, Cap, Cone, local_coords, sample_weighted_sphere, sharded
from bumpforge.verifier import fd_cross_check, load_certificate, mutations, verify_certificate

from conftest import FS_UNIT, poly


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 10 ** 6))
def test_weighted_sphere(m1, m2, seed):
    w = WeightSignature(m1, m2)
    z = sample_weighted_sphere(w, 200, seed)
    assert np.allclose(w.weighted_norm(z[:, 0], z[:, 1]), 1.0, atol=1e-12, rtol=0)
    assert np.array_equal(z, sample_weighted_sphere(w, 200, seed))


def test_sampler_coverage():
    z = Cone(0.1, 1.0, xi=0.5, aperture=0.2).sample(4000, 1)
    ell, s = local_coords(z, 0.5)
    ratio = np.abs(ell) / np.abs(s)
    assert ratio.max() < 0.2 and ratio.min() < 1e-4
    r = np.linalg.norm(z, axis=1)
    assert 0.1 <= r.min() and r.max() <= 1.0 and r.min() < 0.12 and r.max() > 0.9
    cap = Cap(1.0, 1.0, "fixed", center=(0, 1), radius2=0.1).sample(2000, 2)
    assert np.abs(cap[:, 0]).max() ** 2 <= 0.1 + 1e-12
    assert np.allclose(np.linalg.norm(cap, axis=1), 1)
    # sharding is deterministic and independent of evaluation order
    a = np.concatenate([p for _, p in sharded(Ball(0.1, 1.0), 10000, 5)])
    b = np.concatenate([p for _, p in sharded(Ball(0.1, 1.0), 10000, 5)])
    assert len(a) == 10000 and np.array_equal(a, b)


def test_fd_cross_check():
    rng = np.random.default_rng(0)
    pts = rng.standard_normal((10, 2)) + 1j * rng.standard_normal((10, 2))
    assert fd_cross_check(poly("|z1|^6*|z2|^2 + |z1|^8 + (15/7)*|z1|^2*Re(z1^6)"), pts) <= 1e-6
    prof = circle_profile(univariate(FS_UNIT))
    bump = construct_radial_bump(prof)
    assert fd_cross_check(bump, pts) <= 1e-4
    assert fd_cross_check(3.0, pts) == 0.0
    assert fd_cross_check(poly("Re(z1)"), pts) == 0.0


def test_fd_cross_check_on_g(model_cert):
    G = model_cert.assembled
    pts = G.sample_regions(0.05, 0.5, 10, 10, 5, 1)
    assert fd_cross_check(G, pts) <= 1e-4


def test_verify_passes_and_is_deterministic(model_cert_json):
    a = verify_certificate(model_cert_json, samples=5000, seed=3)
    b = verify_certificate(model_cert_json, samples=5000, seed=3)
    assert a.passed and a.verdict == "PASS"
    assert [c.name for c in a.checks] == ["domain", "curves", "psh", "identities", "hypersurface", "decay"]
    ja, jb = a.to_json(), b.to_json()
    ja.pop("seconds", None)
    jb.pop("seconds", None)
    assert ja == jb


def test_mutation_names(model_cert_json):
    names = [name for name, _ in mutations(model_cert_json)]
    assert len(names) == 12 and len(set(names)) == 12


def test_load_certificate_errors(tmp_path):
    with pytest.raises(SchemaError):
        load_certificate({"schema": "nope"})
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(SchemaError):
        load_certificate(str(p))
