"""Assembly of the bumped function in the pullback frame.

Pieces, all functions of t in C^2 (Pi homogeneous of degree 2k):

* ambient caps H0 around Levi-degenerate directions of Pi off the exceptional lines;
* per exceptional line, a cone bump H_j, a cutoff Psi_j = chi(|ell| / (alpha |s|))
  and a line profile U_j = u_j(s) - delta h_j(s);
* a perturbation eps ||t||^{2k} prod_j (1 - chi(|ell_j| / ((alpha/2) |s_j|)))
  which makes H vanish only on the lines.

    G(t) = Pi - delta (H0 + sum Psi_j H_j + eps Pert) + sum Psi_j U_j

Lines in one curve are deck images of a representative; their pieces are
the representative's pieces composed with the inverse rotation, so G is
deck invariant by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .conebump import ConeBump, _safe, build_cone_bump, frame_jets
from .deck import apply_diag, rotation_factors, transport_jet
from .errors import (
    DeltaTooLarge,
    Harmonic,
    NoPositiveDelta,
    NoPositiveRadius,
    NotSubharmonic,
    NotSubharmonicNonHarmonic,
    StrictPshFailed,
)
from .exceptional import ExceptionalCurve, cluster_directions, degenerate_directions, fs_distance, local_frame
from .fsbump import RadialBump, circle_profile, construct_radial_bump
from .levi import HoloJet, Jet, PolyJetEvaluator, eig2, norm2_jet, norm_power_jet, point_to_list
from .polyalg import MixedPolynomial, wirtinger
from .sampling import Ball, Cap, Cone

# ------------------------------------------------------------ smooth profiles


def _expinv(x):
    x = np.asarray(x, dtype=float)
    pos = x > 0
    xs = np.where(pos, x, 1.0)
    f = np.where(pos, np.exp(-1.0 / xs), 0.0)
    f1 = np.where(pos, f / xs ** 2, 0.0)
    f2 = np.where(pos, f * (1.0 / xs ** 4 - 2.0 / xs ** 3), 0.0)
    return f, f1, f2


def smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1, with two derivatives."""
    x = np.asarray(x, dtype=float)
    a, a1, a2 = _expinv(x)
    b, b1, b2 = _expinv(1 - x)
    b1, b2 = -b1, b2
    D = a + b
    S = a / D
    n = a1 * b - a * b1
    S1 = n / D ** 2
    n1 = a2 * b - a * b2
    D1 = a1 + b1
    S2 = (n1 * D - 2 * n * D1) / D ** 3
    return S, S1, S2


def cutoff2(y):
    """chi(sqrt(y)): 1 for y <= 1, 0 for y >= 4."""
    S, S1, S2 = smooth_step((np.asarray(y, dtype=float) - 1.0) / 3.0)
    return 1 - S, -S1 / 3.0, -S2 / 9.0


def cap_profile(x, kappa):
    """exp(-kappa x / (1 - x)) on x < 1, 0 beyond."""
    x = np.asarray(x, dtype=float)
    inside = x < 1
    q = np.where(inside, 1 - x, 1.0)
    p = np.where(inside, np.exp(-kappa * np.where(inside, x, 0.0) / q), 0.0)
    p1 = p * (-kappa / q ** 2)
    p2 = p * (kappa ** 2 / q ** 4 - 2 * kappa / q ** 3)
    return p, np.where(inside, p1, 0.0), np.where(inside, p2, 0.0)


def _scatter(n, idx, jet):
    out = Jet.zeros(n)
    out.val[idx] = jet.val
    out.d[idx] = jet.d
    out.L[idx] = jet.L
    return out


def _compose(jet, fn):
    """jet.compose for an fn returning (value, first, second) derivatives together."""
    v, d1, d2 = fn(jet.val)
    outer = jet.d[:, :, None] * np.conj(jet.d)[:, None, :]
    return Jet(v, d1[:, None] * jet.d, d1[:, None, None] * jet.L + d2[:, None, None] * outer)


# ------------------------------------------------------------ ambient caps


@dataclass
class AmbientCap:
    center: np.ndarray
    radius2: float
    c: float
    kappa: float
    k: int

    def distance(self, t):
        e = self.center
        inner = np.abs(t[:, 0] * np.conj(e[0]) + t[:, 1] * np.conj(e[1])) ** 2
        return 1 - inner / np.sum(np.abs(t) ** 2, axis=1)

    def jet(self, t):
        n = len(t)
        d = self.distance(t)
        idx = np.flatnonzero(d < self.radius2)
        if not len(idx):
            return Jet.zeros(n)
        ts = t[idx]
        e = self.center
        N = norm2_jet(ts)
        A = HoloJet.linear(np.conj(e[0]), np.conj(e[1]), ts).abs2()
        dj = (A * N.reciprocal()) * (-1.0 / self.radius2) + 1.0 / self.radius2
        psi = _compose(dj, lambda x: cap_profile(x, self.kappa))
        return _scatter(n, idx, psi * norm_power_jet(ts, self.k) * self.c)

    def to_json(self):
        e = self.center
        return {"center": [e[0].real, e[0].imag, e[1].real, e[1].imag], "radius2": self.radius2, "c": self.c,
                "kappa": self.kappa, "k": self.k}

    @classmethod
    def from_json(cls, d):
        c = d["center"]
        return cls(np.array([complex(c[0], c[1]), complex(c[2], c[3])]), float(d["radius2"]), float(d["c"]),
                   float(d["kappa"]), int(d["k"]))


@dataclass
class AmbientBump:
    caps: list
    two_k: int
    delta_max: float = 1.0
    info: dict = field(default_factory=dict)

    def jet(self, t):
        out = Jet.zeros(len(t))
        for c in self.caps:
            out = out + c.jet(t)
        return out

    def value(self, t):
        return self.jet(t).val

    def to_json(self):
        return {"caps": [c.to_json() for c in self.caps], "two_k": self.two_k, "delta_max": self.delta_max,
                "info": self.info}

    @classmethod
    def from_json(cls, d):
        return cls([AmbientCap.from_json(c) for c in d["caps"]], int(d["two_k"]), float(d["delta_max"]),
                   dict(d.get("info", {})))


def _min_scaled_eig(jet_fn, t, two_k):
    jet = jet_fn(t)
    lmin, _ = eig2(jet.L)
    return lmin / np.linalg.norm(t, axis=1) ** (two_k - 2)


def deck_orbit(vectors, w):
    """Close a set of unit vectors under the deck rotations, up to phase."""
    out = []
    for v in vectors:
        for l in range(w.sigma1):
            for m in range(w.sigma2):
                u = np.array(v) * np.array(rotation_factors(l, m, w))
                if all(fs_distance(u, o) > 1e-6 for o in out):
                    out.append(u)
    return out


def build_ambient_bump(Pi, w, line_vectors, exclusion, n=6000, seed=0, iterations=16):
    """Caps around off-line Levi-degenerate directions of Pi, and the largest verified delta.

    ``exclusion`` is the FS angle around each line inside which degeneracy
    belongs to the line (cone bumps handle it).
    """
    two_k = Pi.degree()
    k = two_k // 2
    pts, scale = degenerate_directions(Pi, n=n, seed=seed)
    off = [p for p in pts if not line_vectors or min(fs_distance(p, v) for v in line_vectors) > exclusion]
    clusters = cluster_directions(off)
    centers = deck_orbit([c["center"] for c in clusters], w)
    if not centers:
        return AmbientBump([], two_k, 1.0, {"clusters": 0})
    spread = max((c["spread"] for c in clusters), default=0.0)
    ev = PolyJetEvaluator(Pi)
    z = Ball(1.0, 1.0, "fixed").sample(4000, seed + 3)
    amp = float(np.max(ev(z).val))
    caps = []
    for e in centers:
        room = min([fs_distance(e, v) - exclusion for v in line_vectors] + [math.pi / 4])
        room = min(room, min([fs_distance(e, o) for o in centers if o is not e] + [math.pi]) / 2 + 0.5 * room)
        ang = 0.5 * room
        if ang <= 2 * spread or ang <= 0:
            raise NoPositiveDelta("degenerate directions are not separated from the exceptional lines",
                                  witness=point_to_list(e))
        r2 = math.sin(ang) ** 2
        caps.append(AmbientCap(e, r2, amp, 4 * k * r2, k))
    amb = AmbientBump(caps, two_k)
    samples = np.concatenate([Cap(1.0, 1.0, "fixed", center=tuple(c.center), radius2=c.radius2).sample(3000, seed + 7 + i)
                              for i, c in enumerate(caps)])

    def ok(delta):
        s = _min_scaled_eig(lambda t: ev(t) - amb.jet(t) * delta, samples, two_k)
        return float(np.min(s)) > 0, s

    passed, s = ok(1.0)
    if passed:
        amb.delta_max = 1.0
    else:
        lo, hi = math.log(1e-9), 0.0
        good, s_lo = ok(math.exp(lo))
        if not good:
            i = int(np.argmin(s_lo))
            raise NoPositiveDelta("Levi degeneracy outside the declared wedges", witness=point_to_list(samples[i]))
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            if ok(math.exp(mid))[0]:
                lo = mid
            else:
                hi = mid
        amb.delta_max = math.exp(lo)
    amb.info = {"clusters": len(clusters), "spread": spread, "degenerate_points": len(off)}
    return amb


# ------------------------------------------------------------ line data


def restrict_local(poly_local):
    """ell = 0 restriction of a local-frame polynomial, as univariate in s."""
    return MixedPolynomial({(a2, b2, 0, 0): c for (a1, b1, a2, b2), c in poly_local.terms.items() if a1 == 0 and b1 == 0})


def line_terms(rho_t, slope, twoM, fs_sigma=0.2):
    """(u, h) for one exceptional line: u is the degree-2M part of rho on the line."""
    part = rho_t.homogeneous_part(twoM)
    u = restrict_local(local_frame(part, slope))
    if u.exact is False:
        u = u.map_coeffs(lambda c: c)
    try:
        prof = circle_profile(u)
    except (Harmonic, NotSubharmonic) as exc:
        raise NotSubharmonicNonHarmonic(f"line profile is not subharmonic and non-harmonic: {exc}",
                                        witness=getattr(exc, "witness", None)) from exc
    sig = fs_sigma
    if len(prof.zeros) > 1:
        gaps = np.diff(prof.zeros + [prof.zeros[0] + 2 * math.pi])
        sig = min(sig, float(gaps.min()) / 4)
    h = construct_radial_bump(prof, sig)
    return u, h


class _Univariate:
    """u(s) with its Wirtinger data, for HoloJet.compose_real."""

    def __init__(self, u):
        self.u = u
        self._v = u.compile()
        self._s = wirtinger(u, 1, "holo").compile()
        self._ss = wirtinger(wirtinger(u, 1, "holo"), 1, "anti").compile()

    def F(self, s):
        return self._v.eval_complex(s, 0).real

    def Fs(self, s):
        return self._s.eval_complex(s, 0)

    def Fss(self, s):
        return self._ss.eval_complex(s, 0).real


@dataclass
class CurvePiece:
    curve: ExceptionalCurve
    slope: complex | None
    rotations: list
    alpha: float
    cone: ConeBump
    u: MixedPolynomial
    h: RadialBump

    def __post_init__(self):
        self._u = _Univariate(self.u)

    @property
    def twoM(self):
        return self.u.degree()

    def line_slopes(self, w):
        """Slopes of all member lines (None for the axis)."""
        out = []
        for l, m in self.rotations:
            if self.slope is None:
                out.append(None)
            else:
                a = rotation_factors(l, m, w)
                out.append(complex(self.slope) * a[0] / a[1])
        return out

    def U_jet(self, s, delta):
        uj = s.compose_real(self._u.F, self._u.Fs, self._u.Fss)
        hj = s.compose_real(_safe(self.h.F, float), _safe(self.h.Fs, complex), _safe(self.h.Fss, float))
        return uj - hj * delta

    def U_value(self, s, delta):
        return self._u.F(s) - delta * _safe(self.h.F, float)(s)

    def to_json(self):
        return {
            "curve": self.curve.to_json(),
            "slope": None if self.slope is None else [complex(self.slope).real, complex(self.slope).imag],
            "rotations": [list(r) for r in self.rotations],
            "alpha": self.alpha,
            "cone": self.cone.to_json(),
            "u": self.u.to_json_terms(),
            "h": self.h.to_json(),
        }

    @classmethod
    def from_json(cls, d):
        return cls(ExceptionalCurve.from_json(d["curve"]), None if d["slope"] is None else complex(*d["slope"]),
                   [tuple(r) for r in d["rotations"]], float(d["alpha"]), ConeBump.from_json(d["cone"]),
                   MixedPolynomial.from_json_terms(d["u"]), RadialBump.from_json(d["h"]))


def _frame_matrix(slope):
    if slope is None:
        return np.array([[0, 1], [1, 0]], dtype=complex)
    return np.array([[1, -complex(slope)], [0, 1]], dtype=complex)


# ------------------------------------------------------------ assembled function


@dataclass
class AssembledG:
    Pi: MixedPolynomial
    Qt: MixedPolynomial
    w: object
    delta: float
    eps: float
    ambient: AmbientBump
    pieces: list
    delta0: float = 0.0
    r0: float = 0.0
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self._pi = PolyJetEvaluator(self.Pi)
        self._q = self.Qt.compile()
        self._local = []
        for p in self.pieces:
            if p.slope is not None and p.slope != 0:
                loc = local_frame(self.Pi, _slope_obj(p.slope))
                self._local.append(PolyJetEvaluator(loc))
            else:
                self._local.append(None)

    @property
    def two_k(self):
        return self.Pi.degree()

    @property
    def k(self):
        return self.two_k // 2

    # per-line loop -------------------------------------------------
    def _lines(self):
        for pi_idx, p in enumerate(self.pieces):
            for rot in p.rotations:
                yield pi_idx, p, rot

    def evaluate(self, t):
        """Jets of the named parts: Pi, H0, Hcone, pert, U."""
        t = np.asarray(t, dtype=complex)
        n = len(t)
        pi = self._pi(t)
        hcone = Jet.zeros(n)
        U = Jet.zeros(n)
        pert = norm_power_jet(t, self.k)
        for pidx, p, (l, m) in self._lines():
            a_inv = rotation_factors(l, m, self.w, inverse=True)
            tt = apply_diag(t, a_inv)
            ell = tt[:, 1] if p.slope is None else tt[:, 0] - complex(p.slope) * tt[:, 1]
            s = tt[:, 0] if p.slope is None else tt[:, 1]
            with np.errstate(divide="ignore", invalid="ignore"):
                y = np.abs(ell) ** 2 / (p.alpha ** 2 * np.abs(s) ** 2)
            idx = np.flatnonzero(np.isfinite(y) & (y < 4))
            if not len(idx):
                continue
            ts = tt[idx]
            ellj, sj = frame_jets(ts, p.slope)
            yj = (ellj / sj).abs2() * (1.0 / p.alpha ** 2)
            psi = _compose(yj, cutoff2)
            off = _compose(yj * 4.0, cutoff2)
            off = Jet(1 - off.val, -off.d, -off.L)
            Hj = p.cone.jet(ts)
            Uj = p.U_jet(sj, self.delta)
            hcone_part = transport_jet(psi * Hj, a_inv)
            U_part = transport_jet(psi * Uj, a_inv)
            off_part = transport_jet(off, a_inv)
            hcone = hcone + _scatter(n, idx, hcone_part)
            U = U + _scatter(n, idx, U_part)
            # multiply the perturbation by the off-line factor on idx only
            sub = pert.take(idx) * off_part
            pert.val[idx], pert.d[idx], pert.L[idx] = sub.val, sub.d, sub.L
            loc = self._local[pidx]
            if loc is not None:
                lj = loc(np.stack([ell[idx], s[idx]], axis=1))
                M = _frame_matrix(p.slope)
                d = lj.d @ M
                L = np.einsum("pi,npq,qj->nij", M, lj.L, np.conj(M))
                acc = transport_jet(Jet(lj.val, d, L), a_inv)
                pi.val[idx], pi.d[idx], pi.L[idx] = acc.val, acc.d, acc.L
        return {"Pi": pi, "H0": self.ambient.jet(t), "Hcone": hcone, "pert": pert, "U": U}

    def H_jet(self, t, parts=None):
        parts = parts or self.evaluate(t)
        return parts["H0"] + parts["Hcone"] + parts["pert"] * self.eps

    def jet(self, t, parts=None):
        parts = parts or self.evaluate(t)
        return parts["Pi"] - self.H_jet(t, parts) * self.delta + parts["U"]

    def homogeneous_jet(self, t):
        parts = self.evaluate(t)
        return parts["Pi"] - self.H_jet(t, parts) * self.delta

    def value(self, t):
        return self.jet(t).val

    def H(self, t):
        return self.H_jet(t).val

    def gap(self, t):
        """rho - G in t-space: delta H + Qt - sum Psi U (no cancellation against Pi)."""
        parts = self.evaluate(t)
        return self.delta * self.H_jet(t, parts).val + self._q(t[:, 0], t[:, 1]) - parts["U"].val

    def rho(self, t):
        return self.Pi.compile()(t[:, 0], t[:, 1]) + self._q(t[:, 0], t[:, 1])

    def line_index(self, t, factor=1.0):
        """Index of the piece whose factor*alpha cone contains t, or -1."""
        out = np.full(len(t), -1)
        for pidx, p, (l, m) in self._lines():
            tt = apply_diag(t, rotation_factors(l, m, self.w, inverse=True))
            ell = tt[:, 1] if p.slope is None else tt[:, 0] - complex(p.slope) * tt[:, 1]
            s = tt[:, 0] if p.slope is None else tt[:, 1]
            with np.errstate(divide="ignore", invalid="ignore"):
                r = np.abs(ell) / np.abs(s)
            out[np.isfinite(r) & (r < factor * p.alpha)] = pidx
        return out

    def decay_denominator(self, t):
        """|ell|^mu |s|^{2k-mu} + |s|^{2M} for the containing line (inf off wedges)."""
        out = np.full(len(t), np.inf)
        for pidx, p, (l, m) in self._lines():
            tt = apply_diag(t, rotation_factors(l, m, self.w, inverse=True))
            ell = tt[:, 1] if p.slope is None else tt[:, 0] - complex(p.slope) * tt[:, 1]
            s = tt[:, 0] if p.slope is None else tt[:, 1]
            with np.errstate(divide="ignore", invalid="ignore"):
                r = np.abs(ell) / np.abs(s)
            inside = np.isfinite(r) & (r < p.alpha)
            mu = p.cone.mu
            den = np.abs(ell) ** mu * np.abs(s) ** (self.two_k - mu) + np.abs(s) ** p.twoM
            out[inside] = den[inside]
        return out

    def sample_regions(self, rmin, rmax, n_ball, n_cone, n_cap, seed, core=None):
        """Points in the ball, the 2 alpha cones of every line and every cap.

        With ``core`` given, points with |ell| < core * alpha |s| for some line
        are dropped: there the Levi form of the homogeneous part degenerates to
        an order beyond double precision, and only the shells are certified.
        """
        pts = [Ball(rmin, rmax, "log").sample(n_ball, seed)]
        i = 1
        for p in self.pieces:
            inner = 0.0 if core is None else core / 2
            for sl in p.line_slopes(self.w):
                pts.append(Cone(rmin, rmax, "log", xi=sl, aperture=2 * p.alpha, inner=inner).sample(n_cone, seed + i))
                i += 1
        for c in self.ambient.caps:
            pts.append(Cap(rmin, rmax, "log", center=tuple(c.center), radius2=c.radius2).sample(n_cap, seed + i))
            i += 1
        out = np.concatenate(pts)
        if core is not None and self.pieces:
            out = out[self.line_index(out, core) < 0]
        return out

    def to_json(self):
        return {
            "Pi": self.Pi.to_json_terms(),
            "Qt": self.Qt.to_json_terms(),
            "delta": self.delta,
            "delta0": self.delta0,
            "eps": self.eps,
            "r0": self.r0,
            "ambient": self.ambient.to_json(),
            "pieces": [p.to_json() for p in self.pieces],
            "info": self.info,
        }

    @classmethod
    def from_json(cls, d, w):
        return cls(MixedPolynomial.from_json_terms(d["Pi"]), MixedPolynomial.from_json_terms(d["Qt"]), w,
                   float(d["delta"]), float(d["eps"]), AmbientBump.from_json(d["ambient"]),
                   [CurvePiece.from_json(p) for p in d["pieces"]], float(d["delta0"]), float(d["r0"]),
                   dict(d.get("info", {})))


def _slope_obj(value):
    from .exceptional import Slope

    if value is None:
        return Slope.infinity()
    return Slope(complex(value), None)


# ------------------------------------------------------------ construction


def _cone_slope(curve):
    rep = curve.representative
    return None if rep.is_inf else complex(rep.value)


def _strict_min(fn, t, two_k):
    s = _min_scaled_eig(fn, t, two_k)
    i = int(np.argmin(s))
    return float(s[i]), t[i]


CORE = 0.125


def assemble_G(Pi, Qt, rho_t, w, curves, wedges, seed=0, n=6000, delta=None, fs_sigma=0.2):
    """Build all pieces, then search delta, eps and r0.

    ``wedges`` maps curve index (as str) to {"W1": alpha_max, ...} from the
    classification; ``rho_t`` is the stripped pullback used for u_j.
    """
    two_k = Pi.degree()
    pieces = []
    for ci, c in enumerate(curves):
        slope = _cone_slope(c)
        cone = build_cone_bump(Pi, slope, local_frame(Pi, c.representative), seed=seed + 11 * ci)
        u, h = line_terms(rho_t, c.representative, c.twoM, fs_sigma)
        alpha = min(float(wedges[str(ci)]["W1"]), cone.sigma / 2)
        pieces.append(CurvePiece(c, slope, [ln.rotation for ln in c.lines], alpha, cone, u, h))
    line_vecs = [ln.slope.sphere_point() for c in curves for ln in c.lines]
    exclusion = max([math.asin(min(1.0, 2 * p.alpha)) for p in pieces], default=0.0)
    ambient = build_ambient_bump(Pi, w, line_vecs, exclusion, n=n, seed=seed)
    delta0 = min(ambient.delta_max, 0.5)
    G = AssembledG(Pi, Qt, w, delta0, 0.0, ambient, pieces, delta0)
    sphere = G.sample_regions(1.0, 1.0, 20000, 4000, 2000, seed + 101, core=CORE)
    # delta0: halve until Pi - delta0 (H0 + sum Psi_j H_j) is strictly psh on the sphere;
    # the Levi form is affine in delta, so every smaller delta also passes
    for _ in range(40):
        G.delta = G.delta0 = delta0
        m, wit = _strict_min(G.homogeneous_jet, sphere, two_k)
        if m > 0:
            break
        delta0 /= 2
    else:
        raise StrictPshFailed("cutoff cross terms destroy strict psh for every delta", witness=point_to_list(wit))
    if delta is None:
        delta = delta0 / 2
    elif delta > delta0:
        raise DeltaTooLarge(f"delta={delta} exceeds the verified bound {delta0}")
    G.delta = delta
    # eps: largest power-of-two fraction of the cap/P scale keeping strict psh
    eps = float(np.max(np.abs(PolyJetEvaluator(Pi)(sphere[:2000]).val))) or 1.0
    for _ in range(48):
        G.eps = eps
        m, wit = _strict_min(G.homogeneous_jet, sphere, two_k)
        if m > 0:
            break
        eps /= 2
    else:
        raise StrictPshFailed("no perturbation size keeps the homogeneous part strictly psh",
                              witness=point_to_list(wit))
    G.info["sphere_margin"] = m
    # r0: largest dyadic radius with strict psh on B(0, 2 r0) \ {0}
    r = 1.0
    for _ in range(40):
        pts = G.sample_regions(2 * r * 1e-4, 2 * r, 8000, 3000, 1000, seed + 202)
        m, wit = _strict_min(G.jet, pts, two_k)
        if m > 0:
            G.r0 = r
            G.info["ball_margin"] = m
            return G
        r /= 2
    raise StrictPshFailed("no radius with strict plurisubharmonicity", witness=point_to_list(wit))


def fit_decay_constants(gap_fn, den_fn, sampler, r_start, n=10000, seed=0, safety=0.9, max_halvings=30):
    """Largest dyadic r <= r_start with inf gap/den > 0 on sampler(r); returns (r, C, info).

    C is ``safety`` times the sampled infimum.
    """
    r = r_start
    last = None
    for _ in range(max_halvings):
        pts = sampler(r, n, seed)
        ratio = gap_fn(pts) / den_fn(pts)
        i = int(np.argmin(ratio))
        if ratio[i] > 0:
            return r, safety * float(ratio[i]), {"inf": float(ratio[i]), "argmin": point_to_list(pts[i]), "n": len(pts)}
        last = pts[i]
        r /= 2
    raise NoPositiveRadius("decay ratio is not positive at any radius", witness=point_to_list(last))
