"""One-variable radial bump for homogeneous subharmonic polynomials.

Given U homogeneous of degree 2m on C with Laplacian r^{2m-2} L(theta), L >= 0,
we build a periodic profile h with 0 < h <= 1 such that U - delta r^{2m} h
keeps a quantified Laplacian lower bound.  In polar form

    Laplacian(r^{2m} h(theta)) = r^{2m-2} (4 m^2 h + h'').

Where L vanishes, h must be strongly concave, so the profile carries narrow
peaks at the zeros of L on top of a flat floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.optimize import minimize_scalar

from .errors import Harmonic, NotSubharmonic, SearchFailed
from .polyalg import MixedPolynomial, laplacian_1d

TWO_PI = 2 * math.pi
DELTAS = (1.0, 0.5, 0.125)


def _as_univariate(U):
    if any(k[2] or k[3] for k in U.terms):
        raise ValueError("expected a polynomial in a single complex variable")
    return U


def trig_coefficients(p):
    """p(e^{i theta}) as {frequency: complex coefficient} for a univariate p."""
    out = {}
    for (a, b, _, _), c in p.terms.items():
        n = a - b
        cr, ci = out.get(n, (Fraction(0), Fraction(0)))
        out[n] = (cr + c[0], ci + c[1])
    return {n: c for n, c in out.items() if c[0] != 0 or c[1] != 0}


def eval_trig(coeffs, theta, deriv=0):
    theta = np.asarray(theta, dtype=float)
    out = np.zeros(theta.shape, dtype=complex)
    for n, (cr, ci) in coeffs.items():
        out += complex(float(cr), float(ci)) * (1j * n) ** deriv * np.exp(1j * n * theta)
    return out.real


def _eval_trig_exact(coeffs, cs):
    """Exact value at (cos theta, sin theta) = cs given as Fractions."""
    c, s = cs
    tr, ti = Fraction(0), Fraction(0)
    for n, (cr, ci) in coeffs.items():
        er, ei = Fraction(1), Fraction(0)
        br, bi = (c, s) if n >= 0 else (c, -s)
        for _ in range(abs(n)):
            er, ei = er * br - ei * bi, er * bi + ei * br
        tr += cr * er - ci * ei
        ti += cr * ei + ci * er
    return tr


_SPECIAL = {
    0.0: (1, 0), math.pi / 2: (0, 1), math.pi: (-1, 0), 3 * math.pi / 2: (0, -1),
}


def _exact_point(theta):
    for ang, cs in _SPECIAL.items():
        if abs(theta - ang) < 1e-12:
            return tuple(Fraction(x) for x in cs)
    # Pythagorean angles would go here; generic zeros are certified numerically
    return None


@dataclass
class CircleProfile:
    two_m: int
    laplacian: dict  # frequency -> exact complex coefficient
    zeros: list
    zero_certificates: list = field(default_factory=list)

    @property
    def m(self):
        return self.two_m // 2

    def L(self, theta, deriv=0):
        return eval_trig(self.laplacian, theta, deriv)

    def scale(self):
        return sum(abs(complex(float(c[0]), float(c[1]))) for c in self.laplacian.values())


def circle_profile(U, grid=8192):
    """Laplacian of U on the unit circle, its zeros and a subharmonicity check."""
    U = _as_univariate(U)
    if not U.is_homogeneous() or U.degree() % 2:
        raise ValueError("U must be homogeneous of even degree")
    two_m = U.degree()
    lap = laplacian_1d(U)
    coeffs = trig_coefficients(lap)
    if not coeffs:
        raise Harmonic("U is harmonic: all mixed coefficients vanish")
    theta = np.arange(grid) * TWO_PI / grid
    vals = eval_trig(coeffs, theta)
    scale = sum(abs(complex(float(c[0]), float(c[1]))) for c in coeffs.values())
    i = int(np.argmin(vals))
    if vals[i] < -1e-12 * scale:
        raise NotSubharmonic("Laplacian is negative on the circle", witness={"theta": float(theta[i]), "value": float(vals[i])})
    zeros, certs = [], []
    h = TWO_PI / grid
    # candidates: discrete local minima that are small relative to the scale
    is_min = (vals <= np.roll(vals, 1)) & (vals <= np.roll(vals, -1)) & (vals < 1e-3 * scale)
    for j in np.flatnonzero(is_min):
        t0 = theta[j]
        res = minimize_scalar(lambda t: float(eval_trig(coeffs, t)), bounds=(t0 - h, t0 + h), method="bounded",
                              options={"xatol": 1e-13})
        t = float(res.x) % TWO_PI
        v = float(eval_trig(coeffs, t))
        if v > 1e-10 * scale:
            continue
        if any(min(abs(t - z), TWO_PI - abs(t - z)) < 1e-6 for z in zeros):
            continue
        ex = _exact_point(t)
        if ex is not None:
            if _eval_trig_exact(coeffs, ex) != 0:
                continue
            t = math.atan2(float(ex[1]), float(ex[0])) % TWO_PI
            certs.append("exact")
        else:
            certs.append(f"numeric:{v:.3e}")
        zeros.append(t)
    order = np.argsort(zeros)
    return CircleProfile(two_m, coeffs, [zeros[k] for k in order], [certs[k] for k in order])


def cap(x):
    """Smooth bump exp(1 - 1/(1 - x^2)) on |x| < 1, with derivatives."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1
    xx = np.where(inside, x, 0.0)
    q = 1 - xx * xx
    b = np.where(inside, np.exp(1 - 1 / q), 0.0)
    b1 = np.where(inside, b * (-2 * xx / q ** 2), 0.0)
    b2 = np.where(inside, b * (4 * xx * xx / q ** 4 - (2 + 6 * xx * xx) / q ** 3), 0.0)
    return b, b1, b2


def _wrap(d):
    return (d + math.pi) % TWO_PI - math.pi


def shape(theta, zeros, amp, width):
    """s = (1 - amp) + amp * sum_k B((theta - theta_k)/width) and its derivatives."""
    theta = np.asarray(theta, dtype=float)
    s = np.full(theta.shape, 1.0 - amp)
    s1 = np.zeros(theta.shape)
    s2 = np.zeros(theta.shape)
    for z in zeros:
        b, b1, b2 = cap(_wrap(theta - z) / width)
        s = s + amp * b
        s1 = s1 + amp * b1 / width
        s2 = s2 + amp * b2 / width ** 2
    return s, s1, s2


@dataclass
class RadialBump:
    """Periodic profile h stored on a uniform grid with a periodic quintic spline."""

    two_m: int
    values: np.ndarray
    C1: float
    C2: float
    sigma: float
    zeros: list = field(default_factory=list)
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self._spline = None

    @property
    def m(self):
        return self.two_m // 2

    @property
    def constant(self):
        return bool(np.all(self.values == self.values[0]))

    def spline(self):
        if self._spline is None:
            n = len(self.values)
            x = np.arange(n + 1) * TWO_PI / n
            y = np.append(self.values, self.values[0])
            self._spline = make_interp_spline(x, y, k=5, bc_type="periodic")
        return self._spline

    def h(self, theta, deriv=0):
        theta = np.asarray(theta, dtype=float)
        if self.constant:
            return np.full(theta.shape, self.values[0]) if deriv == 0 else np.zeros(theta.shape)
        return self.spline()(np.mod(theta, TWO_PI), nu=deriv)

    def floor(self):
        return float(np.min(self.values))

    # F(s) = |s|^{2m} h(arg s) and its Wirtinger data
    def F(self, s):
        return np.abs(s) ** self.two_m * self.h(np.angle(s))

    def Fs(self, s):
        """dF/ds = (1/2) r^{2m-1} (2m h - i h') e^{-i theta}."""
        r, th = np.abs(s), np.angle(s)
        return 0.5 * r ** (self.two_m - 1) * (self.two_m * self.h(th) - 1j * self.h(th, 1)) * np.exp(-1j * th)

    def Fss(self, s):
        """d^2F/ds dsbar = (1/4) r^{2m-2} (4 m^2 h + h'')."""
        r, th = np.abs(s), np.angle(s)
        return 0.25 * r ** (self.two_m - 2) * (self.two_m ** 2 * self.h(th) + self.h(th, 2))

    def laplacian_on_circle(self, theta):
        return self.two_m ** 2 * self.h(theta) + self.h(theta, 2)

    def to_json(self):
        return {
            "degree": self.two_m,
            "grid": self.values.tolist(),
            "C1": self.C1,
            "C2": self.C2,
            "sigma": self.sigma,
            "zeros": list(self.zeros),
            "params": self.params,
        }

    @classmethod
    def from_json(cls, d):
        return cls(int(d["degree"]), np.asarray(d["grid"], dtype=float), float(d["C1"]), float(d["C2"]),
                   float(d["sigma"]), list(d.get("zeros", [])), dict(d.get("params", {})))


def _sector_mask(theta, zeros, sigma):
    mask = np.zeros(np.shape(theta), dtype=bool)
    for z in zeros:
        mask |= np.abs(_wrap(theta - z)) < sigma
    return mask


def _margins(L, K, theta, zeros, sigma):
    C1 = float(np.min(L - K))
    off = ~_sector_mask(theta, zeros, sigma)
    C2 = float(np.min(np.minimum(L, L - K)[off])) if off.any() else math.inf
    return C1, C2


def construct_radial_bump(prof, sigma=0.2, grid=4096, check_grid=8192, safety=0.95):
    """Build h for ``prof`` with verified constants C1 and C2(sigma).

    Parameters are searched in the order width x amp x c0-factor; c0 is a
    multiple of the largest admissible scale min{L / K_s : K_s > 0}.
    """
    zeros = list(prof.zeros)
    if len(zeros) > 1:
        gaps = np.diff(sorted(zeros) + [sorted(zeros)[0] + TWO_PI])
        if sigma >= gaps.min() / 2:
            raise ValueError("sectors around the zeros overlap; reduce sigma")
    four_m2 = prof.two_m ** 2
    theta_c = np.arange(check_grid) * TWO_PI / check_grid
    L = prof.L(theta_c)
    theta_g = np.arange(grid) * TWO_PI / grid
    if not zeros:
        Lmin = float(np.min(L))
        c = min(1.0, Lmin / (2 * four_m2))
        bump = RadialBump(prof.two_m, np.full(grid, c), 0.0, 0.0, sigma, [], {"mode": "constant", "c0": c})
        C1, C2 = _margins(L, four_m2 * c, theta_c, [], sigma)
        bump.C1, bump.C2 = safety * C1, safety * C2
        return bump
    best = None
    for wf in (2, 4, 8):
        width = sigma / wf
        for amp in (0.9, 0.5, 0.1):
            s, _, s2 = shape(theta_c, zeros, amp, width)
            Ks = four_m2 * s + s2
            pos = Ks > 0
            if np.any(Ks[_sector_mask(theta_c, zeros, 1e-9 + TWO_PI / check_grid)] >= 0):
                continue  # peaks not concave enough to beat the vanishing Laplacian
            c0max = float(np.min(L[pos] / Ks[pos])) if pos.any() else math.inf
            for factor in (1.0, 0.5, 0.1):
                c0 = min(1.0, factor * c0max)
                if factor == 1.0 and c0 == c0max:
                    c0 *= 0.999  # strict inequality at the binding point
                if c0 <= 0:
                    continue
                C1, C2 = _margins(L, c0 * Ks, theta_c, zeros, sigma)
                if best is None or min(C1, C2) > best[0]:
                    best = (min(C1, C2), width, amp, factor)
                if C1 <= 0 or C2 <= 0:
                    continue
                vals = c0 * shape(theta_g, zeros, amp, width)[0]
                bump = RadialBump(prof.two_m, vals, safety * C1, safety * C2, sigma, zeros,
                                  {"mode": "caps", "c0": c0, "amp": amp, "width": width, "factor": factor})
                rep = verify_radial_bump(prof, bump, DELTAS, check_grid)
                if rep["passed"]:
                    return bump
    raise SearchFailed("no (width, amp, c0) triple verified", best_margin=best)


def verify_radial_bump(U_or_prof, bump, deltas=DELTAS, grid=8192):
    """Re-derive the Laplacian margins of U - delta r^{2m} h from the spline payload.

    For each delta the reported margin is min over the grid of
    (Lap composite - delta C1 r^{2m-2}) / r^{2m-2}, plus the off-sector
    margin against C2.
    """
    prof = U_or_prof if isinstance(U_or_prof, CircleProfile) else circle_profile(U_or_prof)
    theta = np.arange(grid) * TWO_PI / grid
    L = prof.L(theta)
    K = bump.laplacian_on_circle(theta)
    hv = bump.h(theta)
    off = ~_sector_mask(theta, bump.zeros, bump.sigma)
    per_delta = {}
    ok = bool(np.all(hv > 0) and np.all(hv <= 1 + 1e-12))
    worst = None
    for d in deltas:
        comp = L - d * K
        m1 = comp - d * bump.C1
        m2 = comp[off] - bump.C2 if off.any() else np.array([0.0])
        i = int(np.argmin(m1))
        entry = {"margin_C1": float(m1[i]), "argmin_theta": float(theta[i]), "margin_C2": float(np.min(m2))}
        per_delta[str(d)] = entry
        if m1[i] < 0 or entry["margin_C2"] < 0:
            ok = False
            if worst is None:
                worst = {"delta": d, "theta": float(theta[i])}
    return {
        "passed": ok and bump.C1 > 0 and bump.C2 > 0,
        "h_min": float(hv.min()),
        "h_max": float(hv.max()),
        "per_delta": per_delta,
        "witness": worst,
    }


def laplacian_composite(prof, bump, theta, delta):
    """Lap(U - delta r^{2m} h) on the unit circle."""
    return prof.L(theta) - delta * bump.laplacian_on_circle(theta)


def radial_function(bump):
    """Callable s -> |s|^{2m} h(arg s) as a plain function (for slices and tests)."""
    return bump.F


def univariate(text_or_terms):
    """Convenience: build a univariate MixedPolynomial from {(i, j): coeff} on t^i tbar^j."""
    return MixedPolynomial({(i, j, 0, 0): c for (i, j), c in text_or_terms.items()})
