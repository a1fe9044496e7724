"""Cone bumps around a harmonic line of a homogeneous polynomial.

In local coordinates (ell, s) with the line at {ell = 0}, the lowest block of
P in ell factors as U(ell^a s^b).  The bump is a function of g = ell^a s^b:

* HGOOD (Laplacian of U has no zeros on the circle): (gamma / 2m^2) |g|^{2m};
* HBAD: F(g) with F(r e^{i theta}) = r^{2m} h(theta) from :mod:`fsbump`.

The aperture sigma of the cone on which P - delta H stays strictly psh is
found by halving, with the Levi form sampled on shells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import EmptyBlock, NotFactorable, NotStrictlyPsh, ShellVerificationFailed
from .fsbump import RadialBump, circle_profile, construct_radial_bump
from .levi import HoloJet, PolyJetEvaluator, check_psh, eig2
from .polyalg import MixedPolynomial
from .sampling import Ball, Cone, sharded

SHELLS = (0.5, 0.25, 0.125)
DELTAS = (1.0, 0.5, 0.125)


def lowest_block(local):
    """(mu, Q_mu): terms of minimal total degree in the first variable."""
    if local.is_zero():
        raise EmptyBlock("polynomial is identically zero")
    mu = min(a1 + b1 for (a1, b1, _, _) in local.terms)
    Q = local.filter(lambda k: k[0] + k[1] == mu)
    rep = check_psh(Q, Ball(1.0, 1.0, "fixed"), n=2000, seed=5, tol=1e-9)
    if not rep.passed:
        raise NotStrictlyPsh("lowest block is not plurisubharmonic", witness=rep.witness)
    return mu, Q


@dataclass
class BidegreeFactorization:
    U: MixedPolynomial
    a: int
    b: int

    @property
    def two_m(self):
        return self.U.degree()


def factor_bidegree(Q):
    """Write a bihomogeneous Q as U(z1^a z2^b) with U univariate."""
    degs = {(a1 + b1, a2 + b2) for (a1, b1, a2, b2) in Q.terms}
    if len(degs) != 1:
        raise NotFactorable("Q is not bihomogeneous")
    (d1, d2), = degs
    if d1 % 2 or d2 % 2 or d1 == 0 or d2 == 0:
        raise NotFactorable("bidegree must be even and positive in both variables")
    p, q = d1 // 2, d2 // 2
    g = math.gcd(p, q)
    a, b = p // g, q // g
    U = {}
    for (a1, b1, a2, b2), c in Q.terms.items():
        if a1 % a or b1 % a or a2 % b or b2 % b or a1 // a != a2 // b or b1 // a != b2 // b:
            raise NotFactorable(f"monomial {(a1, b1, a2, b2)} is not a function of z1^{a} z2^{b}",
                                witness=[a1, b1, a2, b2])
        U[(a1 // a, b1 // a, 0, 0)] = c
    fac = BidegreeFactorization(MixedPolynomial(U), a, b)
    assert 2 * g * a == d1 and 2 * g * (a + b) == d1 + d2
    return fac


def frame_jets(z, slope_value):
    """HoloJets (ell, s) of the local frame at points z (slope None means the axis)."""
    if slope_value is None:
        return HoloJet.coordinate(1, z), HoloJet.coordinate(0, z)
    return HoloJet.linear(1.0, -complex(slope_value), z), HoloJet.coordinate(1, z)


def frame_coords(z, slope_value):
    if slope_value is None:
        return z[:, 1], z[:, 0]
    return z[:, 0] - complex(slope_value) * z[:, 1], z[:, 1]


@dataclass
class ConeBump:
    slope: complex | None  # None: the axis {t2 = 0}
    mode: str
    a: int
    b: int
    two_m: int
    mu: int
    two_k: int
    U: MixedPolynomial
    gamma: Fraction | None = None
    radial: RadialBump | None = None
    sigma: float = 0.0
    c: float = 0.0
    shell_constants: dict = field(default_factory=dict)

    @property
    def coefficient(self):
        """HGOOD coefficient gamma / (2 m^2)."""
        m = self.two_m // 2
        return self.gamma / (2 * m * m)

    def _g(self, z):
        ell, s = frame_jets(z, self.slope)
        return (ell ** self.a) * (s ** self.b)

    def value(self, z):
        ell, s = frame_coords(z, self.slope)
        g = ell ** self.a * s ** self.b
        if self.mode == "HGOOD":
            return float(self.coefficient) * np.abs(g) ** self.two_m
        return self.radial.F(g)

    def jet(self, z):
        g = self._g(z)
        if self.mode == "HGOOD":
            k = float(self.coefficient)
            n = self.two_m
            m = n // 2
            return g.compose_real(
                lambda x: k * np.abs(x) ** n,
                lambda x: k * m * np.abs(x) ** (n - 2) * np.conj(x),
                lambda x: k * m * m * np.abs(x) ** (n - 2),
            )
        rb = self.radial
        return g.compose_real(_safe(rb.F, float), _safe(rb.Fs, complex), _safe(rb.Fss, float))

    __call__ = value

    def decay_ratio(self, z):
        ell, s = frame_coords(z, self.slope)
        return self.value(z) / (np.abs(ell) ** self.mu * np.abs(s) ** (self.two_k - self.mu))

    def to_json(self):
        out = {
            "slope": None if self.slope is None else [complex(self.slope).real, complex(self.slope).imag],
            "mode": self.mode,
            "a": self.a,
            "b": self.b,
            "two_m": self.two_m,
            "mu": self.mu,
            "two_k": self.two_k,
            "U": self.U.to_json_terms(),
            "sigma": self.sigma,
            "c": self.c,
            "shell_constants": {str(k): v for k, v in self.shell_constants.items()},
        }
        if self.mode == "HGOOD":
            out["gamma"] = str(self.gamma)
        else:
            out["radial"] = self.radial.to_json()
        return out

    @classmethod
    def from_json(cls, d):
        slope = None if d["slope"] is None else complex(*d["slope"])
        return cls(
            slope, d["mode"], int(d["a"]), int(d["b"]), int(d["two_m"]), int(d["mu"]), int(d["two_k"]),
            MixedPolynomial.from_json_terms(d["U"]),
            Fraction(d["gamma"]) if "gamma" in d else None,
            RadialBump.from_json(d["radial"]) if "radial" in d else None,
            float(d["sigma"]), float(d["c"]), {float(k): v for k, v in d.get("shell_constants", {}).items()},
        )


def _safe(fn, dtype):
    """Evaluate fn away from g = 0; the bump and its derivatives vanish there (degree >= 2)."""

    def wrapped(x):
        x = np.asarray(x)
        nz = x != 0
        out = np.zeros(x.shape, dtype=dtype)
        if nz.any():
            out[nz] = fn(x[nz])
        return out

    return wrapped


def _shell_margins(Pi_jet, bump, sigma, deltas, n, seed):
    """Minimal scaled Levi eigenvalue of Pi - delta H on each shell."""
    out = {}
    witness = None
    for t in SHELLS:
        region = Cone(1.0, 1.0, "fixed", xi=bump.slope, aperture=sigma, inner=t)
        worst = math.inf
        for _, z in sharded(region, n, seed + int(1000 * t)):
            jp = Pi_jet(z)
            jh = bump.jet(z)
            sc = np.linalg.norm(z, axis=1) ** (bump.two_k - 2)
            for d in deltas:
                lmin, _ = eig2(jp.L - d * jh.L)
                s = lmin / sc
                i = int(np.argmin(s))
                if s[i] < worst:
                    worst = float(s[i])
                    if worst <= 0:
                        witness = {"shell": t, "delta": d, "point": [float(z[i, 0].real), float(z[i, 0].imag),
                                                                    float(z[i, 1].real), float(z[i, 1].imag)]}
        out[t] = worst
    return out, witness


def build_cone_bump(Pi, slope, local, sigma0=0.5, fs_sigma=0.2, n=4000, seed=0, max_halvings=12):
    """Cone bump for Pi around the line ``slope`` (complex or None for the axis).

    ``local`` is Pi written in the line's local frame (ell, s).
    """
    mu, Q = lowest_block(local)
    fac = factor_bidegree(Q)
    prof = circle_profile(fac.U)
    two_m = fac.two_m
    if not prof.zeros:
        lmin = float(np.min(prof.L(np.linspace(0, 2 * math.pi, 8192, endpoint=False))))
        gamma = Fraction(lmin / 4).limit_denominator(10 ** 6)
        if gamma > lmin / 4:
            gamma = Fraction(math.floor(lmin / 4 * 10 ** 6), 10 ** 6)
        bump = ConeBump(slope, "HGOOD", fac.a, fac.b, two_m, mu, Pi.degree(), fac.U, gamma=gamma)
    else:
        rb = construct_radial_bump(prof, fs_sigma)
        bump = ConeBump(slope, "HBAD", fac.a, fac.b, two_m, mu, Pi.degree(), fac.U, radial=rb)
    Pi_jet = PolyJetEvaluator(Pi)
    sigma = sigma0
    best = None
    for _ in range(max_halvings):
        margins, wit = _shell_margins(Pi_jet, bump, sigma, DELTAS, n, seed)
        if best is None or min(margins.values()) > min(best[1].values()):
            best = (sigma, margins, wit)
        if min(margins.values()) > 0:
            bump.sigma = sigma
            bump.shell_constants = margins
            break
        sigma /= 2
    else:
        raise ShellVerificationFailed("no aperture with positive shell margins", witness=best[2],
                                      best_sigma=best[0], margins=best[1])
    region = Cone(1.0, 1.0, "fixed", xi=slope, aperture=sigma)
    z = region.sample(n, seed + 17)
    bump.c = 0.99 * float(np.min(bump.decay_ratio(z)))
    return bump


def verify_cone_bump(Pi, bump, deltas=DELTAS, n=4000, seed=101):
    """Fresh-sample margins: decay (H - c |ell|^mu |s|^{2k-mu}) and Levi on shells."""
    region = Cone(1.0, 1.0, "fixed", xi=bump.slope, aperture=bump.sigma)
    z = region.sample(n, seed)
    ratio = bump.decay_ratio(z)
    i = int(np.argmin(ratio))
    decay_margin = float(ratio[i] - bump.c)
    shells, wit = _shell_margins(PolyJetEvaluator(Pi), bump, bump.sigma, deltas, n, seed)
    ok = decay_margin > 0 and min(shells.values()) > 0
    return {
        "passed": bool(ok),
        "decay_margin": decay_margin,
        "decay_argmin": [float(z[i, 0].real), float(z[i, 0].imag), float(z[i, 1].real), float(z[i, 1].imag)],
        "shell_margins": {str(k): v for k, v in shells.items()},
        "witness": wit,
    }


def sample_cone_points(bump, n, seed):
    return Cone(1.0, 1.0, "fixed", xi=bump.slope, aperture=bump.sigma).sample(n, seed)
