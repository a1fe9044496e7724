"""End-to-end bumping of a model domain Re w + P(z) + Q(z) < 0.

The construction runs on the pullback side t -> (t1^sigma1, t2^sigma2) where
P becomes homogeneous, and comes back to z by averaging over the
sigma1*sigma2 branches.  The holomorphic part stripped off in t-space pushes
down to a polynomial f(z), and the final coordinates are W = w' + K w'^2 with
w' = w + f(z).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .assembler import AssembledG, assemble_G, fit_decay_constants
from .deck import branch_points, deck_defect, push, roots_of_unity, rotation_factors, symmetrize_levi
from .errors import (
    BumpforgeError,
    NoAdmissibleK,
    NotApplicable,
    NotDeckInvariant,
    NotPsh,
    NotWeightedHomogeneous,
    PluriharmonicInP,
    QWeightTooLow,
    SchemaError,
)
from .exceptional import Classification, ExceptionalCurve, analyze
from .levi import Jet, check_psh, eig2, point_to_list
from .polyalg import (
    MixedPolynomial,
    WeightSignature,
    has_pluriharmonic_terms,
    pluriharmonic_strip,
    pullback,
    pushdown,
    to_text,
    weighted_decompose,
)
from .sampling import Ball, Cap, Cone, PointSet, rng_for, sample_weighted_sphere

SCHEMA = "bumpforge-cert/1"

# ------------------------------------------------------------ domain


@dataclass
class ModelDomain:
    weights: WeightSignature
    P: MixedPolynomial
    Q: MixedPolynomial
    name: str = ""
    source: str = ""
    text: str | None = None  # display form as stored in a payload, checked against P + Q

    @property
    def full(self):
        return self.P + self.Q

    def to_json(self):
        return {
            "name": self.name,
            "source": self.source,
            "text": to_text(self.full),
            "weights": self.weights.to_list(),
            "P": self.P.to_json_terms(),
            "Q": self.Q.to_json_terms(),
        }

    @classmethod
    def from_json(cls, d):
        try:
            w = WeightSignature(*[int(x) for x in d["weights"]])
            return cls(w, MixedPolynomial.from_json_terms(d["P"]), MixedPolynomial.from_json_terms(d["Q"]),
                       d.get("name", ""), d.get("source", ""), d.get("text"))
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"malformed domain block: {e}") from e


def validate_domain(poly, w, Q=None, name="", source="", n=4000, seed=0):
    """Split into P (weight one) and Q (weight > 1) and check the model-domain conditions.

    With ``Q`` given, ``poly`` is taken as P and both parts are checked separately.
    """
    if not poly.is_real() or (Q is not None and not Q.is_real()):
        raise SchemaError("defining polynomial is not real-valued")
    if Q is None:
        P, Q = MixedPolynomial(), MixedPolynomial()
        for comp in weighted_decompose(poly, w):
            if comp.eta < 1:
                raise QWeightTooLow(f"terms of weighted degree {comp.eta} < 1", witness=comp.part.to_json_terms())
            if comp.eta == 1:
                P = P + comp.part
            else:
                Q = Q + comp.part
    else:
        P = poly
        comps = weighted_decompose(P, w) if not P.is_zero() else []
        if any(c.eta != 1 for c in comps):
            raise NotWeightedHomogeneous("P has terms of weighted degree other than one")
        for comp in weighted_decompose(Q, w) if not Q.is_zero() else []:
            if comp.eta <= 1:
                raise QWeightTooLow(f"Q has terms of weighted degree {comp.eta} <= 1",
                                    witness=comp.part.to_json_terms())
    if P.is_zero():
        raise NotWeightedHomogeneous("no terms of weighted degree one")
    if has_pluriharmonic_terms(P):
        harm = P.filter(lambda k: (k[1] == 0 and k[3] == 0) or (k[0] == 0 and k[2] == 0))
        raise PluriharmonicInP("P contains pluriharmonic terms", witness=harm.to_json_terms())
    pts = sample_weighted_sphere(w, n, seed)
    rep = check_psh(P, PointSet(points=pts), n=n, seed=seed, tol=1e-9, scale=lambda z: np.ones(len(z)))
    if not rep.passed:
        raise NotPsh("P is not plurisubharmonic", witness=rep.witness)
    return ModelDomain(w, P, Q, name, source)


# ------------------------------------------------------------ symmetrization


def symmetrize(F, w, check=True, n=200, seed=0, tol=1e-10):
    """Branch average z -> mean_b F(t_b) of a deck-invariant function of t.

    For a MixedPolynomial the result is again a polynomial when all surviving
    monomials lie on the lattice; otherwise a callable on (n, 2) arrays.
    """
    if isinstance(F, MixedPolynomial):
        s1, s2 = w.sigma
        kept = F.filter(lambda k: (k[0] - k[1]) % s1 == 0 and (k[2] - k[3]) % s2 == 0)
        if check and kept != F:
            bad = next(k for k in F.terms if k not in kept.terms)
            raise NotDeckInvariant("polynomial is not deck invariant", witness=list(bad))
        if all(a1 % s1 == 0 and a2 % s2 == 0 for (a1, _, a2, _) in kept.terms):
            return pushdown(kept, w)
        F = kept.compile()
        fn = lambda t: F(t[:, 0], t[:, 1])  # noqa: E731
    else:
        fn = F
    if check and w.sigma != (1, 1):
        rng = rng_for(seed, 0, 31)
        t = rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))
        err, rot = deck_defect(fn, t, w)
        if err > tol:
            raise NotDeckInvariant(f"deck defect {err:.3e}", witness=list(rot))

    def averaged(z):
        z = np.asarray(z, dtype=complex)
        return np.mean([fn(t) for t in branch_points(z, w)], axis=0)

    return averaged


def pushforward(F, w):
    """Sum over branches, i.e. sigma1*sigma2 times the branch average."""
    avg = symmetrize(F, w)
    n = w.sigma1 * w.sigma2
    if isinstance(avg, MixedPolynomial):
        return avg * n
    return lambda z: n * avg(z)


def pushdown_coordinate_change(q, w, n=200, seed=0):
    """f with q = f o Psi; checks psi o tau1 = tau2 o psi at random points."""
    f = pushdown(q, w)
    if q.is_zero():
        return f
    rng = rng_for(seed, 0, 41)
    t = 0.5 * (rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2)))
    wv = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    lhs = wv - q.compile().eval_complex(t[:, 0], t[:, 1])
    z = push(t, w)
    rhs = wv - f.compile().eval_complex(z[:, 0], z[:, 1])
    err = float(np.max(np.abs(lhs - rhs) / (1 + np.abs(lhs))))
    if err > 1e-10:
        raise RuntimeError(f"pushed-down coordinate change disagrees by {err:.3e}")
    return f


# ------------------------------------------------------------ wedge profiles v_j


@dataclass
class WedgeProfile:
    """v_j on C: the branch average of the line profiles U_jk = u_jk - delta h_jk."""

    piece: object
    w: WeightSignature
    delta: float

    @property
    def variable(self):
        """Index of the z-coordinate v depends on (0 for the axis curve)."""
        return 0 if self.piece.slope is None else 1

    @property
    def sigma(self):
        return self.w.sigma[self.variable]

    @property
    def single_valued(self):
        """True when every branch sees the same profile (sigma of s is 1, or xi is 0 or infinite)."""
        return self.sigma == 1 or self.piece.slope is None or self.piece.slope == 0

    @property
    def degree(self):
        """Homogeneity degree 2d_j of v in its variable."""
        return Fraction(self.piece.twoM, self.sigma)

    def _line_profiles(self, y):
        p = self.piece
        vals = []
        for l, m in p.rotations:
            a = rotation_factors(l, m, self.w, inverse=True)
            s = y * (a[0] if p.slope is None else a[1])
            vals.append(p.U_value(s, self.delta))
        return vals

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        r = x ** (1.0 / self.sigma) if self.sigma > 1 else x
        acc = np.zeros(len(x))
        cnt = 0
        for zeta in roots_of_unity(self.sigma):
            for v in self._line_profiles(r * zeta):
                acc += v
                cnt += 1
        return acc / cnt

    def laplacian(self, x, h=1e-4):
        x = np.asarray(x, dtype=complex)
        out = -4 * self(x)
        for e in (h, -h, 1j * h, -1j * h):
            out = out + self(x + e * np.abs(x))
        return out / (h * np.abs(x)) ** 2


def build_v(assembled, w):
    return [WedgeProfile(p, w, assembled.delta) for p in assembled.pieces]


# ------------------------------------------------------------ z-space view


class ZSpaceG:
    """The bumped function G on z-space, built from an AssembledG in t-space."""

    def __init__(self, assembled, domain, f=None):
        self.t = assembled
        self.domain = domain
        self.w = domain.weights
        self.f = f if f is not None else MixedPolynomial()
        self._P = domain.P.compile()
        self._PQ = domain.full.compile()
        self._f = self.f.compile()
        self.v = build_v(assembled, self.w)

    # values ---------------------------------------------------------
    def _avg(self, fn, z):
        z = np.asarray(z, dtype=complex)
        return np.mean([fn(t) for t in branch_points(z, self.w)], axis=0)

    def value(self, z):
        return self._avg(self.t.value, z)

    __call__ = value

    def jet_levi(self, z):
        """(values, complex Hessian in z) of the branch average."""
        return symmetrize_levi(self.t.jet, np.asarray(z, dtype=complex), self.w)

    def H0(self, z):
        """Averaged bump delta * mean_b H(t_b); weighted homogeneous of degree one."""
        return self.t.delta * self._avg(self.t.H, z)

    def P(self, z):
        return self._P(z[:, 0], z[:, 1])

    def rho(self, z):
        """P + Q - Re f: the defining function in the stripped coordinates."""
        return self._PQ(z[:, 0], z[:, 1]) - self._f.eval_complex(z[:, 0], z[:, 1]).real

    def imf(self, z):
        return self._f.eval_complex(z[:, 0], z[:, 1]).imag

    def gap(self, z):
        """rho - G, evaluated without cancelling the common P."""
        return self._avg(self.t.gap, z)

    def wedge_index(self, z, factor=1.0):
        """Index of the curve whose factor*alpha wedge contains z, or -1."""
        t = branch_points(np.asarray(z, dtype=complex), self.w)[0]
        return self.t.line_index(t, factor)

    def wedge_piece(self, z):
        """Branch-wise wedge term mean_b U_{line(b)}(s_b) (valid inside W1)."""
        z = np.asarray(z, dtype=complex)
        return self._avg(lambda t: self.t.evaluate(t)["U"].val, z)

    def decay_denominator(self, z):
        return self._avg(self.t.decay_denominator, z)

    def sigma_norm(self, z):
        """Sigma(z) = |z1|^m1 + |z2|^m2."""
        return np.abs(z[:, 0]) ** self.w.m1 + np.abs(z[:, 1]) ** self.w.m2

    # sampling -------------------------------------------------------
    def t_radius(self, r):
        """Largest t-radius whose image lies in the z-ball of radius r."""
        return min((r / math.sqrt(2)) ** (1.0 / s) for s in self.w.sigma)

    def z_radius_cap(self, r0):
        """Largest z-radius whose preimage lies in the t-ball of radius r0."""
        return min((r0 / math.sqrt(2)) ** s for s in self.w.sigma)

    def sample(self, r, n, seed, kind="all", curve=None, span=1e-4):
        """Points of the z-ball of radius r: pushed samples of t-space regions.

        kind: "all" (ball, cones, caps), "wedge" (W1 of ``curve``), "off" (outside every W1).
        """
        rt = self.t_radius(r)
        lo = rt * span
        if kind == "wedge":
            p = self.t.pieces[curve]
            parts = [Cone(lo, rt, "log", xi=sl, aperture=p.alpha).sample(n // len(p.rotations) + 1, seed + i)
                     for i, sl in enumerate(p.line_slopes(self.w))]
            t = np.concatenate(parts)[:n]
        elif kind == "off":
            t = Ball(lo, rt, "log").sample(2 * n, seed)
            if self.t.pieces:
                t = t[self.t.line_index(t, 1.0) < 0]
            t = t[:n]
        else:
            m = len(self.t.pieces) + len(self.t.ambient.caps)
            n_ball = n // 2 if m else n
            t = self.t.sample_regions(lo, rt, n_ball, n // (2 * max(m, 1)) + 1, n // (2 * max(m, 1)) + 1, seed)
        return push(t, self.w)


# ------------------------------------------------------------ hypersurface


def _hypersurface_batch(zg, R, n, seed, shard):
    rng = rng_for(seed, shard, 53)
    z = zg.sample(R, n, seed + 7919 * shard)
    m = len(z)
    kind = rng.integers(0, 3, m)
    imf = zg.imf(z)
    # kind 0: beta = 0 exactly, the hardest slice; 1: uniform; 2: log-uniform small
    y = np.where(kind == 1, rng.uniform(-R, R, m), R * 10.0 ** rng.uniform(-8, 0, m) * rng.choice([-1.0, 1.0], m))
    y = np.where(kind == 0, -imf, y)
    u = -zg._PQ(z[:, 0], z[:, 1])
    keep = (u ** 2 + y ** 2 + np.sum(np.abs(z) ** 2, axis=1) < R * R) & (np.linalg.norm(z, axis=1) > 0)
    return z[keep], (y + imf)[keep]


def hypersurface_points(zg, R, n, seed, max_batches=20):
    """(z, beta) on {Re w + P + Q = 0} with |w|^2 + |z|^2 < R^2, (w, z) != 0; n points."""
    zs, bs, have = [], [], 0
    for shard in range(max_batches):
        z, b = _hypersurface_batch(zg, R, n, seed, shard)
        zs.append(z)
        bs.append(b)
        have += len(z)
        if have >= n:
            break
    return np.concatenate(zs)[:n], np.concatenate(bs)[:n]


def final_values(zg, z, beta, K):
    """Re W + G and the comparison scale beta^2 + Sigma^{(Delta+1)/nu}."""
    gap = zg.gap(z)
    rho = zg.rho(z)
    val = -gap + K * (rho ** 2 - beta ** 2)
    delta_max = max([p.twoM for p in zg.t.pieces], default=zg.w.nu)
    scale = beta ** 2 + zg.sigma_norm(z) ** ((delta_max + 1) / zg.w.nu)
    return val, scale


def choose_K(zg, R_start, n=20000, seed=0, max_halvings=30):
    """(K, R, margin): K = 1 and R halved until Re W + G < 0 strictly on samples.

    With r = 0 the only K-dependent term is K (rho^2 - beta^2), which can only
    hurt where rho^2 > beta^2; there shrinking R is what helps, so K stays 1.
    """
    K = 1.0
    R = min(R_start, 1.0 / (4 * K))
    worst = None
    for _ in range(max_halvings):
        z, beta = hypersurface_points(zg, R, n, seed)
        val, scale = final_values(zg, z, beta, K)
        ratio = -val / scale
        i = int(np.argmin(ratio))
        if ratio[i] > 0:
            return K, R, float(ratio[i]), {"n": len(z), "argmin": point_to_list(z[i]) + [float(beta[i])]}
        worst = point_to_list(z[i]) + [float(beta[i])]
        R /= 2
    raise NoAdmissibleK("Re W + G is not negative on any sampled ball", witness=worst, last_R=R)


# ------------------------------------------------------------ certificate


@dataclass
class BumpCertificate:
    domain: ModelDomain
    classification: Classification
    curves: list
    assembled: AssembledG
    f: MixedPolynomial
    q_t: MixedPolynomial
    K: float
    R: float
    constants: dict
    verification: dict = field(default_factory=dict)
    seed: int = 0

    def zspace(self):
        return ZSpaceG(self.assembled, self.domain, self.f)

    def to_json(self):
        return {
            "schema": SCHEMA,
            "generator": f"bumpforge {__version__}",
            "seed": self.seed,
            "domain": self.domain.to_json(),
            "classification": self.classification.to_json(),
            "curves": [c.to_json() for c in self.curves],
            "wedges": {str(i): {"W1": p.alpha, "W2": 2 * p.alpha} for i, p in enumerate(self.assembled.pieces)},
            "G": self.assembled.to_json(),
            "coordinate_change": {"q_t": self.q_t.to_json_terms(), "f": self.f.to_json_terms(), "K": self.K},
            "R": self.R,
            "constants": self.constants,
            "verification": self.verification,
        }

    @classmethod
    def from_json(cls, d):
        if not isinstance(d, dict) or d.get("schema") != SCHEMA:
            raise SchemaError(f"unsupported schema {d.get('schema') if isinstance(d, dict) else d!r}")
        try:
            dom = ModelDomain.from_json(d["domain"])
            c = d["classification"]
            cls_ = Classification(c["verdict"], c.get("separating_wedge"), c.get("failure_witness"), [],
                                  c.get("notes", []))
            curves = [ExceptionalCurve.from_json(x) for x in d["curves"]]
            G = AssembledG.from_json(d["G"], dom.weights)
            cc = d["coordinate_change"]
            return cls(dom, cls_, curves, G, MixedPolynomial.from_json_terms(cc["f"]),
                       MixedPolynomial.from_json_terms(cc["q_t"]), float(cc["K"]), float(d["R"]),
                       dict(d["constants"]), dict(d.get("verification", {})), int(d.get("seed", 0)))
        except (KeyError, TypeError, ValueError, IndexError) as e:
            raise SchemaError(f"malformed certificate: {e}") from e


def _stage(name, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except BumpforgeError as e:
        if e.stage is None:
            e.stage = name
        raise


def strip_pullback(domain, D=None):
    """(Pi, q_t, rho_t): pullback of P, and the stripped pullback of P + Q."""
    w = domain.weights
    Pi = pullback(domain.P, w)
    R = pullback(domain.full, w)
    q, rho = pluriharmonic_strip(R, None, D if D is not None else R.degree())
    return Pi, q, rho


def bump(domain, seed=0, n=6000, n_fit=10000, n_K=20000):
    """Full construction: analysis, assembly, decay constants, K and R."""
    t0 = time.time()
    w = domain.weights
    curves, cls = _stage("analyze", analyze, domain.P, domain.Q, w, seed=seed)
    if cls.verdict not in ("ALMOST_H_EXTENDIBLE", "H_EXTENDIBLE"):
        err = NotApplicable(f"classification {cls.verdict}", witness=cls.failure_witness)
        err.stage = "analyze"
        raise err
    Pi, q_t, rho_t = strip_pullback(domain)
    f = _stage("pushdown", pushdown_coordinate_change, q_t, w)
    Qt = rho_t - Pi
    G = _stage("assemble", assemble_G, Pi, Qt, rho_t, w, curves, cls.separating_wedge or {}, seed=seed, n=n)
    _stage("symmetrize", symmetrize, G.value, w, seed=seed + 3)
    zg = ZSpaceG(G, domain, f)
    R_cap = zg.z_radius_cap(G.r0)
    per_curve = []
    for j in range(len(G.pieces)):
        r, C, info = _stage(
            "decay", fit_decay_constants, zg.gap, zg.decay_denominator,
            lambda r, m, s, j=j: zg.sample(r, m, s, kind="wedge", curve=j), R_cap, n=n_fit, seed=seed + 7 + j)
        per_curve.append({"r_delta": r, "C": C, "inf": info["inf"], "argmin": info["argmin"]})
    r_off, C_off, info_off = _stage(
        "decay", fit_decay_constants, zg.gap, zg.sigma_norm,
        lambda r, m, s: zg.sample(r, m, s, kind="off"), R_cap, n=n_fit, seed=seed + 5)
    R_start = min([R_cap, r_off] + [c["r_delta"] for c in per_curve])
    K, R, margin, kinfo = _stage("choose_K", choose_K, zg, R_start, n=n_K, seed=seed + 13)
    delta_max = max([c.twoM for c in curves], default=None)
    constants = {
        "delta0": G.delta0,
        "delta": G.delta,
        "eps": G.eps,
        "r0": G.r0,
        "per_curve": per_curve,
        "off_wedge": {"r_delta": r_off, "C": C_off, "inf": info_off["inf"], "argmin": info_off["argmin"]},
        "margin": margin,
        "Delta": delta_max,
        "nu": w.nu,
        "exponent": str(Fraction((delta_max if delta_max is not None else w.nu) + 1, w.nu)),
        "contact_ratio": {str(i): [c.twoM, str(Fraction(c.twoM, w.nu))] for i, c in enumerate(curves)},
        "v_degree": {str(i): str(v.degree) for i, v in enumerate(zg.v)},
        "v_single_valued": {str(i): v.single_valued for i, v in enumerate(zg.v)},
    }
    verification = {
        "construction_seed": seed,
        "samples": {"assembly": n, "decay": n_fit, "K": n_K},
        "K_search": kinfo,
        "seconds": round(time.time() - t0, 3),
    }
    return BumpCertificate(domain, cls, curves, G, f, q_t, K, R, constants, verification, seed)
