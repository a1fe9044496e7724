"""The derived constants frozen in the other tests, recomputed by the sympy oracle.

tools/oracles.py shares no code with bumpforge; if it drifts from the frozen
table below, one of the two is wrong.
"""

import importlib.util
from pathlib import Path

import pytest

FROZEN = {
    "det_hessian_z1^8+z1^4z2^2": "16*(x1**2 + y1**2)**5",
    "h22_z1^8+z1^4z2^2": "(x1**2 + y1**2)**2",
    "fs_unit_laplacian_polar": "72*cos(theta)**2",
    "fs_unit_zeros": ["pi/2", "3*pi/2"],
    "fs_unit_laplacian_min": "0",
    "model_mu": 6,
    "model_P_on_line_z1_0": "0",
    "model_twoM": 10,
    "weighted_mu": 4,
    "weighted_twoM": 12,
    "model_u_laplacian_on_circle": "100",
    "model_h_constant": "1/2",
    "model_cone_gamma": "1",
    "model_cone_coefficient": "1/2",
    "model_wedge_ratio_over_delta": "1/2",
}


@pytest.fixture(scope="module")
def oracle():
    path = Path(__file__).resolve().parents[1] / "tools" / "oracles.py"
    spec = importlib.util.spec_from_file_location("oracles", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod.main()


@pytest.mark.parametrize("key", sorted(FROZEN))
def test_oracle_matches_frozen(oracle, key):
    assert oracle[key] == FROZEN[key]
