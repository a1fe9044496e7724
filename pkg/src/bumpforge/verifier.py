"""Independent re-verification of bump certificates.

Everything here is recomputed from the serialized payload and the domain
polynomials; nothing is taken from construction-time state.  Checks:

    (i)   domain validation
    (ii)  exceptional curves and payload consistency
    (iii) plurisubharmonicity of G on B(0, R) minus the origin
    (iv)  piecewise identities of G, sign and zero set of H0
    (v)   Re W + G < 0 on the model hypersurface
    (vi)  decay bounds with the stored constants
"""

from __future__ import annotations

import copy
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .assembler import line_terms
from .conebump import factor_bidegree, lowest_block, verify_cone_bump
from .errors import BumpforgeError, SchemaError
from .exceptional import analyze, is_harmonic_line, local_frame
from .fsbump import RadialBump, verify_radial_bump
from .levi import Jet, PolyJetEvaluator, eig2, fd_levi_matrix, point_to_list
from .parser import parse_expression
from .pipeline import BumpCertificate, ZSpaceG, final_values, hypersurface_points, strip_pullback, validate_domain
from .polyalg import MixedPolynomial, pushdown
from .sampling import rng_for, sample_weighted_sphere  # noqa: F401  (re-exported)

CHECKS = ("domain", "curves", "psh", "identities", "hypersurface", "decay")


@dataclass
class CheckResult:
    index: int
    name: str
    passed: bool
    margin: float | None = None
    argmin: list | None = None
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    def to_json(self):
        return {"check": self.index, "name": self.name, "passed": self.passed, "margin": self.margin,
                "argmin": self.argmin, "witness": self.witness, "details": self.details}


@dataclass
class VerificationReport:
    checks: list
    seed: int
    samples: int
    tol: float
    seconds: float = 0.0

    @property
    def passed(self):
        return len(self.checks) == len(CHECKS) and all(c.passed for c in self.checks)

    @property
    def verdict(self):
        return "PASS" if self.passed else "FAIL"

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_json(self):
        return {"verdict": self.verdict, "seed": self.seed, "samples": self.samples, "tol": self.tol,
                "seconds": round(self.seconds, 3), "checks": [c.to_json() for c in self.checks]}


def _close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def _poly_close(p, q, tol=1e-12):
    d = p - q
    return d.is_zero() or float(d.max_abs_coeff()) <= tol * max(1.0, float(q.max_abs_coeff() or 1))


# ------------------------------------------------------------ (ii)


def _consistency(cert, zg):
    """Payload facts recomputed from the domain; returns (problems, details)."""
    dom = cert.domain
    w = dom.weights
    G = cert.assembled
    bad = []
    curves, cls = analyze(dom.P, dom.Q, w)
    if cls.verdict not in ("ALMOST_H_EXTENDIBLE", "H_EXTENDIBLE"):
        bad.append({"what": "classification", "got": cls.verdict})
    if cls.verdict != cert.classification.verdict:
        bad.append({"what": "classification differs", "payload": cert.classification.verdict, "recomputed": cls.verdict})
    if len(curves) != len(cert.curves) or len(G.pieces) != len(curves):
        bad.append({"what": "exceptional set differs", "payload": len(cert.curves), "pieces": len(G.pieces),
                    "recomputed": len(curves)})
    Pi, q_t, rho_t = strip_pullback(dom)
    if not _poly_close(G.Pi, Pi):
        bad.append({"what": "Pi is not the pullback of P"})
    if not _poly_close(G.Qt, rho_t - Pi):
        bad.append({"what": "Qt is not the stripped pullback of Q"})
    if not _poly_close(cert.q_t, q_t) or not _poly_close(cert.f, pushdown(q_t, w)):
        bad.append({"what": "coordinate change does not match the stripped terms"})
    for j, c in enumerate(cert.curves):
        for ln in c.lines:
            if not is_harmonic_line(Pi, ln.slope):
                bad.append({"what": "line is not harmonic", "curve": j, "slope": ln.slope.to_json()})
    wedges = cls.separating_wedge or {}
    for j, (p, c) in enumerate(zip(G.pieces, curves)):
        if abs(complex(c.xi.value if not c.xi.is_inf else 0) - complex(p.curve.xi.value if not p.curve.xi.is_inf else 0)) > 1e-9 \
                or c.xi.is_inf != p.curve.xi.is_inf:
            bad.append({"what": "curve slope differs", "curve": j})
            continue
        if c.mu != p.curve.mu or c.twoM != p.curve.twoM or c.twoM != p.twoM:
            bad.append({"what": "contact invariants differ", "curve": j, "payload": [p.curve.mu, p.twoM],
                        "recomputed": [c.mu, c.twoM]})
        u, _ = line_terms(rho_t, c.representative, c.twoM)
        if not _poly_close(p.u, u):
            bad.append({"what": "line profile u differs from the domain", "curve": j})
        if p.alpha > float(wedges.get(str(j), {}).get("W1", 0)) * (1 + 1e-12):
            bad.append({"what": "wedge wider than the separating wedge", "curve": j, "alpha": p.alpha})
        if 2 * p.alpha > p.cone.sigma * (1 + 1e-12):
            bad.append({"what": "wedge wider than the verified cone", "curve": j, "alpha": p.alpha,
                        "sigma": p.cone.sigma})
        mu, Qb = lowest_block(local_frame(Pi, c.representative))
        fac = factor_bidegree(Qb)
        if (mu, fac.a, fac.b, fac.two_m) != (p.cone.mu, p.cone.a, p.cone.b, p.cone.two_m) or not _poly_close(p.cone.U, fac.U):
            bad.append({"what": "cone bump block differs", "curve": j})
        if p.cone.mode == "HGOOD" and not p.cone.gamma > 0:
            bad.append({"what": "cone bump coefficient not positive", "curve": j})
        rep = verify_cone_bump(Pi, p.cone, seed=cert.seed + 1009)
        if not rep["passed"]:
            bad.append({"what": "cone bump fails re-verification", "curve": j, "witness": rep["witness"],
                        "decay_margin": rep["decay_margin"]})
        rb = verify_radial_bump(u, p.h)
        if not rb["passed"]:
            bad.append({"what": "line bump fails re-verification", "curve": j, "witness": rb["witness"],
                        "h_max": rb["h_max"], "h_min": rb["h_min"]})
    for cp in G.ambient.caps:
        if cp.c < 0 or cp.radius2 <= 0:
            bad.append({"what": "ambient cap with negative amplitude"})
    const = cert.constants
    if not (0 < G.delta <= G.delta0 * (1 + 1e-12)):
        bad.append({"what": "delta exceeds delta0", "delta": G.delta, "delta0": G.delta0})
    if not G.eps > 0:
        bad.append({"what": "perturbation size not positive"})
    if not (cert.K > 0 and 0 < cert.R <= 1 / (4 * cert.K) * (1 + 1e-12)):
        bad.append({"what": "R exceeds 1/(4K)", "R": cert.R, "K": cert.K})
    if cert.R > zg.z_radius_cap(G.r0) * (1 + 1e-12):
        bad.append({"what": "R exceeds the verified t-space radius", "R": cert.R, "cap": zg.z_radius_cap(G.r0)})
    twoMs = [c.twoM for c in curves]
    if const.get("Delta") != (max(twoMs) if twoMs else None):
        bad.append({"what": "contact exponent differs", "payload": const.get("Delta")})
    return bad, {"recomputed_curves": [c.to_json() for c in curves], "verdict": cls.verdict}


# ------------------------------------------------------------ individual checks


def _check_psh(zg, R, n, seed, tol):
    z = zg.sample(R, n, seed)
    worst, arg, count, done = math.inf, None, 0, 0
    for s in range(0, len(z), 8192):
        chunk = z[s:s + 8192]
        _, L = zg.jet_levi(chunk)
        lmin, lmax = eig2(L)
        sc = np.maximum(np.abs(lmax), 1e-300)
        r = lmin / sc
        count += int(np.sum(r < -tol))
        i = int(np.argmin(r))
        if r[i] < worst:
            worst, arg = float(r[i]), point_to_list(chunk[i])
        done += len(chunk)
    return count == 0, worst, arg, {"negative_samples": count, "n": done}


def _check_identities(zg, R, n, seed, tol=1e-10):
    w = zg.w
    G = zg.t
    bad = []
    worst = 0.0
    arg = None

    def rel(a, b, scale):
        return np.abs(a - b) / np.maximum(scale, 1e-300)

    for j, v in enumerate(zg.v):
        z = zg.sample(R, n, seed + j, kind="wedge", curve=j)
        g = zg.value(z)
        p = zg.P(z)
        h0 = zg.H0(z)
        piece = v(z[:, v.variable]) if v.single_valued else zg.wedge_piece(z)
        e = rel(g, p - h0 + piece, np.abs(g) + np.abs(p) + np.abs(h0) + np.abs(piece))
        i = int(np.argmax(e))
        if e[i] > worst:
            worst, arg = float(e[i]), point_to_list(z[i])
        if e[i] > tol:
            bad.append({"what": "wedge identity", "curve": j, "error": float(e[i]), "point": point_to_list(z[i])})
        # v is homogeneous of degree 2d and subharmonic off the origin
        x = z[:200, v.variable]
        x = x[np.abs(x) > 0]
        lam = 0.5
        scal = rel(v(lam * x), abs(lam) ** float(v.degree) * v(x), np.abs(v(x)))
        if scal.max() > 1e-8:
            bad.append({"what": "v is not homogeneous", "curve": j, "error": float(scal.max())})
        lap = v.laplacian(x)
        if np.any(lap < 0):
            bad.append({"what": "v is not subharmonic", "curve": j, "point": [float(x[np.argmin(lap)].real),
                                                                         float(x[np.argmin(lap)].imag)]})
    z = zg.sample(R, n, seed + 97, kind="all")
    if G.pieces:
        z = z[zg.wedge_index(z, 2.0) < 0]
    if len(z):
        g = zg.value(z)
        p = zg.P(z)
        h0 = zg.H0(z)
        e = rel(g, p - h0, np.abs(g) + np.abs(p) + np.abs(h0))
        i = int(np.argmax(e))
        if e[i] > worst:
            worst, arg = float(e[i]), point_to_list(z[i])
        if e[i] > tol:
            bad.append({"what": "off-wedge identity", "error": float(e[i]), "point": point_to_list(z[i])})
    # sign, homogeneity and zero set of H0
    z = zg.sample(R, n, seed + 131, kind="all")
    h0 = zg.H0(z)
    scale = zg.sigma_norm(z)
    neg = h0 < -1e-12 * scale
    if neg.any():
        i = int(np.argmin(h0 / scale))
        bad.append({"what": "H0 negative", "point": point_to_list(z[i]), "value": float(h0[i])})
    lam = 0.37
    zs = np.stack([lam ** (1 / w.m1) * z[:, 0], lam ** (1 / w.m2) * z[:, 1]], axis=1)
    e = rel(zg.H0(zs), lam * h0, np.abs(h0) + 1e-300)
    if e.max() > 1e-8:
        bad.append({"what": "H0 is not weighted homogeneous", "error": float(e.max())})
    off_line = np.ones(len(z), dtype=bool)
    if G.pieces:
        off_line = zg.wedge_index(z, 1e-3) < 0
    if np.any(h0[off_line] <= 0):
        i = int(np.flatnonzero(off_line & (h0 <= 0))[0])
        bad.append({"what": "H0 vanishes off the curves", "point": point_to_list(z[i])})
    rng = rng_for(seed, 0, 71)
    for j, p in enumerate(G.pieces):
        s = np.exp(2j * np.pi * rng.random(64)) * 10.0 ** rng.uniform(-2, 0, 64) * zg.t_radius(R)
        on = []
        for sl in p.line_slopes(w):
            on.append(np.stack([s, np.zeros_like(s)], 1) if sl is None else np.stack([sl * s, s], 1))
        t = np.concatenate(on)
        zc = np.stack([t[:, 0] ** w.sigma1, t[:, 1] ** w.sigma2], axis=1)
        hc = zg.H0(zc)
        if np.any(np.abs(hc) > 1e-12 * zg.sigma_norm(zc)):
            bad.append({"what": "H0 does not vanish on the curve", "curve": j, "value": float(np.max(np.abs(hc)))})
    return not bad, worst, arg, {"problems": bad}


def _check_hypersurface(zg, K, R, n, seed, tol):
    z, beta = hypersurface_points(zg, R, n, seed)
    val, scale = final_values(zg, z, beta, K)
    ratio = -val / scale
    i = int(np.argmin(ratio))
    viol = int(np.sum(val >= 0))
    weak = int(np.sum(ratio <= tol))
    return weak == 0, float(ratio[i]), point_to_list(z[i]) + [float(beta[i])], \
        {"violations": viol, "below_tol": weak, "n": len(z)}


def _check_decay(zg, constants, n, seed):
    bad = []
    worst, arg = math.inf, None
    per = constants.get("per_curve", [])
    if len(per) != len(zg.t.pieces):
        return False, None, None, {"problems": [{"what": "decay constants missing for some curves"}]}
    for j, c in enumerate(per):
        z = zg.sample(float(c["r_delta"]), n, seed + j, kind="wedge", curve=j)
        ratio = zg.gap(z) / zg.decay_denominator(z)
        m = ratio - float(c["C"])
        i = int(np.argmin(m))
        if m[i] / max(abs(float(c["C"])), 1e-300) < worst:
            worst, arg = float(m[i] / max(abs(float(c["C"])), 1e-300)), point_to_list(z[i])
        if m[i] < 0 or not float(c["C"]) > 0:
            bad.append({"what": "wedge decay bound fails", "curve": j, "inf": float(ratio[i]), "C": c["C"],
                        "point": point_to_list(z[i])})
    off = constants.get("off_wedge")
    if off is None:
        bad.append({"what": "off-wedge decay constant missing"})
    else:
        z = zg.sample(float(off["r_delta"]), n, seed + 51, kind="off")
        ratio = zg.gap(z) / zg.sigma_norm(z)
        m = ratio - float(off["C"])
        i = int(np.argmin(m))
        rel = float(m[i] / max(abs(float(off["C"])), 1e-300))
        if rel < worst:
            worst, arg = rel, point_to_list(z[i])
        if m[i] < 0 or not float(off["C"]) > 0:
            bad.append({"what": "off-wedge decay bound fails", "inf": float(ratio[i]), "C": off["C"],
                        "point": point_to_list(z[i])})
    return not bad, worst, arg, {"problems": bad}


# ------------------------------------------------------------ driver


def load_certificate(obj):
    if isinstance(obj, BumpCertificate):
        return obj
    if isinstance(obj, (str, bytes)):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as e:
            raise SchemaError(f"certificate is not JSON: {e}") from e
    return BumpCertificate.from_json(obj)


def _run(index, name, fn):
    try:
        ok, margin, arg, details = fn()
        wit = None if ok else {"argmin": arg, **details}
        return CheckResult(index, name, bool(ok), margin, arg, wit, details)
    except BumpforgeError as e:
        return CheckResult(index, name, False, None, None, e.to_dict(), {"error": e.code})


def verify_certificate(cert, samples=100000, seed=12345, tol=1e-10, n_identity=1000, n_decay=10000):
    """Re-run checks (i)-(vi) from the payload; a pure function of its arguments."""
    t0 = time.time()
    cert = load_certificate(cert)
    dom = cert.domain
    checks = []

    def domain_check():
        d = validate_domain(dom.P, dom.weights, Q=dom.Q, seed=seed)
        ok = _poly_close(d.P, dom.P, 0) and _poly_close(d.Q, dom.Q, 0)
        details = {}
        if dom.text is not None and parse_expression(dom.text) != dom.full:
            ok = False
            details["problem"] = "domain text does not match the P and Q terms"
        return ok, None, None, details

    checks.append(_run(1, "domain", domain_check))
    zg = ZSpaceG(cert.assembled, dom, cert.f)

    def curves_check():
        bad, info = _consistency(cert, zg)
        return not bad, float(len(bad)), None, {"problems": bad, **info}

    checks.append(_run(2, "curves", curves_check))
    checks.append(_run(3, "psh", lambda: _check_psh(zg, cert.R, samples, seed + 1, tol)))
    checks.append(_run(4, "identities", lambda: _check_identities(zg, cert.R, n_identity, seed + 2)))
    checks.append(_run(5, "hypersurface", lambda: _check_hypersurface(zg, cert.K, cert.R, samples, seed + 3, tol)))
    checks.append(_run(6, "decay", lambda: _check_decay(zg, cert.constants, n_decay, seed + 4)))
    return VerificationReport(checks, seed, samples, tol, time.time() - t0)


# ------------------------------------------------------------ finite differences


def fd_cross_check(F, points, step=1e-4):
    """Max relative deviation between declared second derivatives and central differences."""
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    if isinstance(F, (int, float)):
        return 0.0
    if isinstance(F, dict) and "terms" in F:
        F = MixedPolynomial.from_json_terms(F["terms"])
    if isinstance(F, dict) and "grid" in F:
        F = RadialBump.from_json(F)
    if isinstance(F, MixedPolynomial):
        if F.degree() <= 1:
            return 0.0
        ev = PolyJetEvaluator(F)
        fun = lambda z: F(z[:, 0], z[:, 1])  # noqa: E731
        jet_fn = ev
    elif isinstance(F, RadialBump):
        return _fd_radial(F, points[:, 0], step)
    elif isinstance(F, ZSpaceG):
        fun = F.value
        jet_fn = lambda z: Jet(*F.jet_levi(z)[:1], None, F.jet_levi(z)[1])  # noqa: E731
    else:
        fun = F.value
        jet_fn = F.jet
    worst = 0.0
    for z in points:
        L = jet_fn(z[None, :]).L[0]
        fd = fd_levi_matrix(fun, z, h=step)
        scale = max(np.max(np.abs(L)), 1e-300)
        worst = max(worst, float(np.max(np.abs(L - fd)) / scale))
    return worst


def _fd_radial(bump, s, step):
    """Compare Fs, Fss of a radial bump with central differences of F."""
    worst = 0.0
    for x in s:
        h = step * abs(x)
        f = lambda y: float(bump.F(np.array([y]))[0])  # noqa: E731
        fx = (f(x + h) - f(x - h)) / (2 * h)
        fy = (f(x + 1j * h) - f(x - 1j * h)) / (2 * h)
        lap = (f(x + h) + f(x - h) + f(x + 1j * h) + f(x - 1j * h) - 4 * f(x)) / h ** 2
        ds = complex(bump.Fs(np.array([x]))[0])
        dss = float(bump.Fss(np.array([x]))[0])
        fd_s = 0.5 * (fx - 1j * fy)
        sc1 = max(abs(ds), abs(fd_s), 1e-300)
        sc2 = max(abs(dss), abs(lap / 4), 1e-300)
        worst = max(worst, abs(ds - fd_s) / sc1, abs(dss - lap / 4) / sc2)
    return worst


# ------------------------------------------------------------ mutation suite


def mutations(cert_json):
    """Twelve canned tamperings of a certificate with at least one wedge piece."""
    out = []

    def mut(name, fn):
        d = copy.deepcopy(cert_json)
        fn(d)
        out.append((name, d))

    piece = lambda d: d["G"]["pieces"][0]  # noqa: E731

    def neg_terms(rows):
        for r in rows:
            r[4], r[6] = -r[4], -r[6]

    mut("line profile sign flip", lambda d: neg_terms(piece(d)["u"]))
    mut("radius x10", lambda d: d.__setitem__("R", d["R"] * 10))
    mut("delta x100", lambda d: d["G"].__setitem__("delta", d["G"]["delta"] * 100))
    mut("wedge decay constant x10", lambda d: d["constants"]["per_curve"][0].__setitem__(
        "C", d["constants"]["per_curve"][0]["C"] * 10))
    mut("wedge widened x3", lambda d: piece(d).__setitem__("alpha", piece(d)["alpha"] * 3))
    mut("cone bump sign flip", lambda d: _flip_cone(piece(d)["cone"]))
    mut("K x1e6", lambda d: d["coordinate_change"].__setitem__("K", d["coordinate_change"]["K"] * 1e6))
    mut("Q coefficient altered", lambda d: _scale_first(d["domain"]["Q"], 3))
    mut("exceptional curve removed", _drop_curve)
    mut("line bump grid x10", lambda d: piece(d)["h"].__setitem__("grid", [10 * v for v in piece(d)["h"]["grid"]]))
    mut("perturbation x1e4", lambda d: d["G"].__setitem__("eps", d["G"]["eps"] * 1e4))
    mut("pullback payload altered", lambda d: _scale_first(d["G"]["Pi"], 2))
    return out


def _scale_first(rows, k):
    """Multiply the first stored coefficient by the integer k."""
    rows[0][4] *= k
    rows[0][6] *= k


def _flip_cone(cone):
    if "gamma" in cone:
        cone["gamma"] = str(-Fraction(cone["gamma"]))
    else:
        cone["radial"]["grid"] = [-v for v in cone["radial"]["grid"]]


def _drop_curve(d):
    d["curves"] = d["curves"][1:]
    d["G"]["pieces"] = d["G"]["pieces"][1:]
    d["constants"]["per_curve"] = d["constants"]["per_curve"][1:]
    d["wedges"] = {}


def run_mutation_suite(cert_json, samples=20000, seed=777, tol=1e-10):
    """Verify every mutation; returns a list of (name, report)."""
    return [(name, verify_certificate(d, samples=samples, seed=seed, tol=tol)) for name, d in mutations(cert_json)]
