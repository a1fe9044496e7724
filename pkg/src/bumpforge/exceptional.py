"""Exceptional harmonic curves, separation of the Levi-degenerate set, contact orders.

Everything runs on the pullback Pi = P o Psi, which is homogeneous of degree
nu.  A complex line {t1 = omega t2} carries a harmonic restriction exactly when
every mixed coefficient of Pi(omega s, s) vanishes; since P has no
pluriharmonic terms this means the restriction is identically zero.  The
mixed coefficients are polynomials in (Re omega, Im omega), solved by interval
subdivision and then verified in exact arithmetic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np
from scipy.optimize import least_squares, minimize
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import InfiniteType, NotWeightedHomogeneous, SearchFailed
from .levi import PolyJetEvaluator, eig2, hessian
from .polyalg import (
    MixedPolynomial,
    WeightSignature,
    is_harmonic_1d,
    linear_form,
    pluriharmonic_strip,
    pullback,
    restrict_to_line,
    substitute,
    univariate_order,
    weighted_decompose,
)
from .sampling import rng_for, unit_sphere

INF = "inf"


# ------------------------------------------------------------ slopes

@dataclass(frozen=True)
class Slope:
    """A point of the Riemann sphere: finite complex value or the axis ``inf``.

    ``exact`` holds a pair of Fractions when the slope is rational, or a
    string (sympy expression) for verified algebraic slopes.
    """

    value: complex | str
    exact: tuple | str | None = None

    @property
    def is_inf(self):
        return self.value == INF

    def as_complex(self):
        return None if self.is_inf else complex(self.value)

    @classmethod
    def from_fraction(cls, re, im=Fraction(0)):
        re, im = Fraction(re), Fraction(im)
        return cls(complex(float(re), float(im)), (re, im))

    @classmethod
    def infinity(cls):
        return cls(INF, INF)

    def to_json(self):
        if self.is_inf:
            return {"inf": True}
        out = {"re": self.value.real, "im": self.value.imag}
        if isinstance(self.exact, tuple):
            out["exact"] = [str(self.exact[0]), str(self.exact[1])]
        elif isinstance(self.exact, str):
            out["algebraic"] = self.exact
        return out

    @classmethod
    def from_json(cls, d):
        if d.get("inf"):
            return cls.infinity()
        if "exact" in d:
            return cls.from_fraction(Fraction(d["exact"][0]), Fraction(d["exact"][1]))
        return cls(complex(d["re"], d["im"]), d.get("algebraic"))

    def sphere_point(self):
        """Unit vector (t1, t2) spanning the line."""
        if self.is_inf:
            return np.array([1.0 + 0j, 0.0 + 0j])
        v = np.array([complex(self.value), 1.0 + 0j])
        return v / np.linalg.norm(v)


def fs_distance(u, v):
    """Fubini-Study angle between the lines spanned by u and v."""
    c = abs(np.vdot(u, v)) / (np.linalg.norm(u) * np.linalg.norm(v))
    return math.acos(min(1.0, c))


# ------------------------------------------------------------ restriction system

def restriction_equations(Pi, chart="A"):
    """Mixed coefficients of Pi restricted to lines, as polynomials in omega.

    Chart A: line t1 = omega t2.  Chart B: line t2 = omega t1.
    Returns a list of dicts {(p, q): (re, im)} meaning sum c omega^p conj(omega)^q.
    """
    eqs = {}
    for (a1, b1, a2, b2), c in Pi.terms.items():
        i, j = a1 + a2, b1 + b2
        if i == 0 or j == 0:
            continue
        p, q = (a1, b1) if chart == "A" else (a2, b2)
        bucket = eqs.setdefault((i, j), {})
        old = bucket.get((p, q), (Fraction(0), Fraction(0)))
        bucket[(p, q)] = (old[0] + c[0], old[1] + c[1])
    return [e for _, e in sorted(eqs.items()) if any(v[0] != 0 or v[1] != 0 for v in e.values())]


def _binom_expand(p, q):
    """(x+iy)^p (x-iy)^q as {(ex, ey): complex Fraction pair}."""
    out = {}
    for i in range(p + 1):
        ci = math.comb(p, i)
        for j in range(q + 1):
            cj = math.comb(q, j)
            # (x)^(p-i) (iy)^i (x)^(q-j) (-iy)^j
            ey = i + j
            ex = p + q - ey
            phase = (1j) ** i * (-1j) ** j
            re, im = round(phase.real), round(phase.imag)
            val = ci * cj
            old = out.get((ex, ey), (0, 0))
            out[(ex, ey)] = (old[0] + val * re, old[1] + val * im)
    return out


def realify(eq):
    """Split a polynomial in (omega, conj omega) into two real polynomials in (x, y)."""
    re_part, im_part = {}, {}
    for (p, q), (cr, ci) in eq.items():
        for (ex, ey), (br, bi) in _binom_expand(p, q).items():
            r = cr * br - ci * bi
            i = cr * bi + ci * br
            if r:
                re_part[(ex, ey)] = re_part.get((ex, ey), 0) + r
            if i:
                im_part[(ex, ey)] = im_part.get((ex, ey), 0) + i
    out = []
    for part in (re_part, im_part):
        part = {k: Fraction(v) for k, v in part.items() if v != 0}
        if part:
            out.append(part)
    return out


class RealSystem:
    """Real polynomial system in (x, y) with vectorized interval evaluation."""

    def __init__(self, polys):
        self.polys = polys
        self.deg = max((max(ex + ey for ex, ey in p) for p in polys), default=0)
        self._arr = []
        for p in polys:
            keys = np.array(list(p.keys()), dtype=int).reshape(-1, 2)
            coef = np.array([float(v) for v in p.values()])
            self._arr.append((keys, coef))

    def values(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = []
        for keys, coef in self._arr:
            out.append(np.sum(coef * x[..., None] ** keys[:, 0] * y[..., None] ** keys[:, 1], axis=-1))
        return np.stack(out, axis=-1) if out else np.zeros(x.shape + (0,))

    def jacobian(self, x, y):
        J = []
        for keys, coef in self._arr:
            ex, ey = keys[:, 0], keys[:, 1]
            dx = np.sum(np.where(ex > 0, coef * ex * x ** np.maximum(ex - 1, 0) * y ** ey, 0.0))
            dy = np.sum(np.where(ey > 0, coef * ey * x ** ex * y ** np.maximum(ey - 1, 0), 0.0))
            J.append([dx, dy])
        return np.array(J)

    @staticmethod
    def _ipow(lo, hi, n):
        if n == 0:
            one = np.ones_like(lo)
            return one, one
        a, b = lo ** n, hi ** n
        if n % 2:
            return a, b
        plo = np.where((lo <= 0) & (hi >= 0), 0.0, np.minimum(a, b))
        return plo, np.maximum(a, b)

    def excludes(self, x0, x1, y0, y1):
        """Boolean array: True where some equation provably has no zero in the box.

        Natural interval extension in floating point; the enclosure is
        widened by a bound on accumulated rounding error so that exclusion is
        never claimed for a box that contains a root.
        """
        xp = [self._ipow(x0, x1, n) for n in range(self.deg + 1)]
        yp = [self._ipow(y0, y1, n) for n in range(self.deg + 1)]
        excl = np.zeros(x0.shape, dtype=bool)
        eps = np.finfo(float).eps
        for keys, coef in self._arr:
            lo = np.zeros_like(x0)
            hi = np.zeros_like(x0)
            mag = np.zeros_like(x0)
            for (ex, ey), c in zip(keys, coef):
                a, b = xp[ex]
                cc, d = yp[ey]
                prods = np.stack([a * cc, a * d, b * cc, b * d])
                mlo, mhi = prods.min(axis=0), prods.max(axis=0)
                if c >= 0:
                    lo += c * mlo
                    hi += c * mhi
                else:
                    lo += c * mhi
                    hi += c * mlo
                mag += abs(c) * np.maximum(np.abs(mlo), np.abs(mhi))
            slack = 4 * (self.deg + len(coef) + 2) * eps * mag + 1e-300
            excl |= (lo - slack > 0) | (hi + slack < 0)
        return excl


def subdivide(system, box, min_width=1e-7, max_boxes=200000):
    """Boxes that survive interval exclusion, as an (n, 4) array.

    Stops at width < min_width, or earlier once more than ``max_boxes``
    survive: near a multiple root (a squared modulus) interval bounds cannot
    exclude boxes within roughly sqrt(width) of the root, so the count blows up
    without adding information.  Callers polish and verify exactly anyway.
    """
    x0 = np.array([box[0]])
    x1 = np.array([box[1]])
    y0 = np.array([box[2]])
    y1 = np.array([box[3]])
    while True:
        keep = ~system.excludes(x0, x1, y0, y1)
        x0, x1, y0, y1 = x0[keep], x1[keep], y0[keep], y1[keep]
        if not len(x0):
            return np.zeros((0, 4))
        if (x1 - x0).max() < min_width or len(x0) > max_boxes:
            return np.stack([x0, x1, y0, y1], axis=1)
        xm, ym = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
        x0, x1, y0, y1 = (
            np.concatenate([x0, xm, x0, xm]),
            np.concatenate([xm, x1, xm, x1]),
            np.concatenate([y0, y0, ym, ym]),
            np.concatenate([ym, ym, y1, y1]),
        )


def _cluster_boxes(boxes, max_clusters=500):
    """Connected groups of touching boxes; returns a list of (k, 2) center arrays."""
    centers = np.stack([(boxes[:, 0] + boxes[:, 1]) / 2, (boxes[:, 2] + boxes[:, 3]) / 2], axis=1)
    width = float(np.max(boxes[:, 1] - boxes[:, 0]))
    pairs = cKDTree(centers).query_pairs(1.5 * width, output_type="ndarray")
    n = len(centers)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n)) if len(pairs) else \
        coo_matrix((n, n))
    k, labels = connected_components(graph, directed=False)
    if k > max_clusters:
        raise SearchFailed("subdivision did not isolate finitely many roots", clusters=int(k),
                           witness=[float(centers[0, 0]), float(centers[0, 1])])
    return [centers[labels == i] for i in range(k)]


def eval_exact(eq, omega):
    """Exact value of sum c omega^p conj(omega)^q at a Gaussian-rational omega."""
    xr, xi = omega
    total_r, total_i = Fraction(0), Fraction(0)
    for (p, q), (cr, ci) in eq.items():
        vr, vi = Fraction(1), Fraction(0)
        for _ in range(p):
            vr, vi = vr * xr - vi * xi, vr * xi + vi * xr
        for _ in range(q):
            vr, vi = vr * xr + vi * xi, -vr * xi + vi * xr
        total_r += cr * vr - ci * vi
        total_i += cr * vi + ci * vr
    return total_r, total_i


def verify_slope_exact(eqs, omega):
    return all(eval_exact(e, omega) == (0, 0) for e in eqs)


def _snap_rational(x, y, eqs):
    for den in (1, 2, 3, 4, 5, 6, 8, 10, 12, 16, 100, 1000, 10 ** 4, 10 ** 6):
        cand = (Fraction(round(x * den), den), Fraction(round(y * den), den))
        if abs(float(cand[0]) - x) + abs(float(cand[1]) - y) > 1e-6:
            continue
        if verify_slope_exact(eqs, cand):
            return cand
    return None


def _zero_dim_solve(sp, exprs, X, Y):
    try:
        return sp.solve_poly_system(exprs, X, Y)
    except Exception:  # sympy raises NotImplementedError for positive-dimensional systems
        return None


def _algebraic_verify(polys, x, y):
    """Exact check at an algebraic root near (x, y) via sympy; returns an expression string."""
    import sympy as sp

    X, Y = sp.symbols("x y", real=True)
    exprs = [sum(sp.Rational(c.numerator, c.denominator) * X ** ex * Y ** ey for (ex, ey), c in p.items()) for p in polys]
    sols = _zero_dim_solve(sp, exprs, X, Y)
    if sols is None:
        # multiple roots of a sum of squares: the gradient vanishes there too
        grads = [sp.diff(e, v) for e in exprs for v in (X, Y)]
        sols = _zero_dim_solve(sp, exprs + grads, X, Y)
    for sx, sy in sols or []:
        try:
            fx, fy = complex(sp.N(sx, 30)), complex(sp.N(sy, 30))
        except TypeError:
            continue
        if abs(fx.imag) > 1e-12 or abs(fy.imag) > 1e-12:
            continue
        if abs(fx.real - x) + abs(fy.real - y) > 1e-6:
            continue
        if all(sp.simplify(e.subs({X: sx, Y: sy})) == 0 for e in exprs):
            return (float(sp.N(sx, 30)), float(sp.N(sy, 30))), f"{sp.sstr(sx)} + I*({sp.sstr(sy)})"
    return None


def solve_harmonic_slopes(Pi, chart="A", radius=1.0, min_width=1e-7):
    """Slopes omega with |omega| <= radius in the given chart with harmonic restriction."""
    eqs = restriction_equations(Pi, chart)
    if not eqs:
        return None  # every line is harmonic
    polys = [rp for e in eqs for rp in realify(e)]
    system = RealSystem(polys)
    pad = radius * 1.0001
    boxes = subdivide(system, (-pad, pad * 1.0000001, -pad, pad * 1.0000003), min_width=min_width)
    found = []
    if not len(boxes):
        return found
    rng = np.random.default_rng(0)
    for group in _cluster_boxes(boxes):
        starts = [group.mean(axis=0)]
        if len(group) > 1:
            starts += list(group[rng.choice(len(group), min(8, len(group)), replace=False)])
        roots = []
        for c in starts:
            sol = least_squares(lambda v: system.values(v[0], v[1]), c, jac=lambda v: system.jacobian(v[0], v[1]),
                                xtol=1e-15, ftol=1e-15, gtol=1e-15)
            if not any(abs(sol.x[0] - r[0]) + abs(sol.x[1] - r[1]) < 1e-6 for r in roots):
                roots.append(sol.x)
        for x, y in roots:
            if x * x + y * y > radius * radius * (1 + 1e-6):
                continue
            snap = _snap_rational(x, y, eqs)
            if snap is not None:
                found.append(Slope.from_fraction(*snap))
                continue
            alg = _algebraic_verify(polys, x, y)
            if alg is not None:
                (sx, sy), expr = alg
                found.append(Slope(complex(sx, sy), expr))
    return _dedupe(found)


def _dedupe(slopes):
    out = []
    for s in slopes:
        if not any(fs_distance(s.sphere_point(), o.sphere_point()) < 1e-8 for o in out):
            out.append(s)
    return out


def harmonic_lines(Pi):
    """All complex lines through 0 along which Pi restricts harmonically."""
    a = solve_harmonic_slopes(Pi, "A", 1.0)
    b = solve_harmonic_slopes(Pi, "B", 1.0)
    if a is None or b is None:
        raise NotWeightedHomogeneous("every line is harmonic; P has no non-pluriharmonic part")
    lines = list(a)
    for s in b:
        if s.exact is not None and isinstance(s.exact, tuple) and s.exact == (0, 0):
            lines.append(Slope.infinity())
        elif isinstance(s.exact, tuple):
            re, im = s.exact
            n = re * re + im * im
            lines.append(Slope.from_fraction(re / n, -im / n))
        else:
            v = 1 / complex(s.value)
            lines.append(Slope(v, f"1/({s.exact})"))
    return _dedupe(lines)


def line_restriction(Pi, slope):
    if slope.is_inf:
        return restrict_to_line(Pi, axis=True)
    if isinstance(slope.exact, tuple):
        return restrict_to_line(Pi, xi=slope.exact)
    return restrict_to_line(Pi.to_float(), xi=complex(slope.value))


def is_harmonic_line(Pi, slope):
    if isinstance(slope.exact, str) and not slope.is_inf:
        return _algebraic_harmonic(Pi, slope.exact)
    return is_harmonic_1d(line_restriction(Pi, slope))


def _algebraic_harmonic(Pi, expr):
    """Exact test at an algebraic slope: every restriction equation simplifies to 0."""
    import sympy as sp

    om = sp.sympify(expr)
    omc = sp.conjugate(om)
    for eq in restriction_equations(Pi, "A"):
        val = sum((sp.Rational(c[0].numerator, c[0].denominator) + sp.I * sp.Rational(c[1].numerator, c[1].denominator))
                  * om ** p * omc ** q for (p, q), c in eq.items())
        if sp.simplify(sp.expand(val)) != 0:
            return False
    return True


# ------------------------------------------------------------ curves

@dataclass
class PullbackLine:
    slope: Slope
    rotation: tuple  # (l, m): this line is R^{lm} applied to the representative

    def to_json(self):
        return {"slope": self.slope.to_json(), "rotation": list(self.rotation)}


@dataclass
class ExceptionalCurve:
    xi: Slope
    lines: list
    mu: int | None = None
    twoM: int | None = None
    star_verdict: str | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def representative(self):
        return self.lines[0].slope

    @property
    def is_axis(self):
        return self.xi.is_inf

    def to_json(self):
        return {
            "xi": self.xi.to_json(),
            "lines": [ln.to_json() for ln in self.lines],
            "mu": self.mu,
            "twoM": self.twoM,
            "star_first_part": self.star_verdict,
        }

    @classmethod
    def from_json(cls, d):
        lines = [PullbackLine(Slope.from_json(x["slope"]), tuple(x["rotation"])) for x in d["lines"]]
        return cls(Slope.from_json(d["xi"]), lines, d.get("mu"), d.get("twoM"), d.get("star_first_part"))


def rotate_slope(omega, l, m, w):
    """Image of the line t1 = omega t2 under (t1, t2) -> (z1 t1, z2 t2) with roots of unity."""
    ang = 2 * math.pi * (l / w.sigma1 - m / w.sigma2)
    return omega * cmath.exp(1j * ang)


def _xi_of(slope, w):
    if slope.is_inf:
        return Slope.infinity()
    n = w.sigma1 * w.sigma2
    if isinstance(slope.exact, tuple):
        re, im = slope.exact
        vr, vi = Fraction(1), Fraction(0)
        for _ in range(n):
            vr, vi = vr * re - vi * im, vr * im + vi * re
        return Slope.from_fraction(vr, vi)
    expr = f"({slope.exact})**{n}" if isinstance(slope.exact, str) else None
    return Slope(complex(slope.value) ** n, expr)


def group_into_curves(lines, w):
    """Group harmonic pullback lines into curves z1^s2 = xi z2^s1."""
    curves = []
    used = [False] * len(lines)
    order = sorted(range(len(lines)), key=lambda i: (not isinstance(lines[i].exact, tuple), i))
    for i in order:
        if used[i]:
            continue
        rep = lines[i]
        used[i] = True
        xi = _xi_of(rep, w)
        members = [PullbackLine(rep, (0, 0))]
        if not rep.is_inf and abs(complex(rep.value)) > 0:
            seen = {round(0.0, 9)}
            for l, m in product(range(w.sigma1), range(w.sigma2)):
                if (l, m) == (0, 0):
                    continue
                om = rotate_slope(complex(rep.value), l, m, w)
                key = round(cmath.phase(om / complex(rep.value)) % (2 * math.pi), 9)
                if key in seen:
                    continue
                seen.add(key)
                match = None
                for j, other in enumerate(lines):
                    if not used[j] and not other.is_inf and abs(complex(other.value) - om) < 1e-8 * (1 + abs(om)):
                        match = j
                        break
                if match is None:
                    raise RuntimeError(f"deck image {om} of a harmonic line was not found by the solver")
                used[match] = True
                members.append(PullbackLine(lines[match], (l, m)))
            if len(members) != w.sigma1 * w.sigma2:
                raise RuntimeError("line count of a curve differs from sigma1*sigma2")
        curves.append(ExceptionalCurve(xi, members))
    return curves


def find_exceptional(P, w):
    """E(P) as a list of ExceptionalCurve (invariants mu / twoM not yet filled)."""
    comps = weighted_decompose(P, w)
    if len(comps) != 1 or comps[0].eta != 1:
        raise NotWeightedHomogeneous("P must be weighted homogeneous of weight one")
    Pi = pullback(P, w)
    lines = harmonic_lines(Pi)
    for s in lines:
        if not is_harmonic_line(Pi, s):
            raise RuntimeError("candidate failed exact re-verification")
    return group_into_curves(lines, w)


def brute_force_lines(Pi, w=None, n=2001, box=2.0, threshold=1e-9):
    """Oracle: grid scan of slopes plus both axes, exact test at near-zero grid points.

    The grid is in the curve parameter xi (with w given) or directly in the
    line slope.  Returns the set of xi values (Slope) found.
    """
    eqs_a = restriction_equations(Pi, "A")
    nroot = 1 if w is None else w.sigma1 * w.sigma2
    found = []
    grid = np.linspace(-box, box, n)
    step = Fraction(2 * box).limit_denominator(10 ** 6) / (n - 1)
    X, Y = np.meshgrid(grid, grid, indexing="ij")

    def residual(xi_vals):
        om = xi_vals ** (1.0 / nroot) if nroot > 1 else xi_vals
        res = np.zeros(om.shape)
        scale = np.zeros(om.shape)
        for e in eqs_a:
            val = np.zeros(om.shape, dtype=complex)
            mag = np.zeros(om.shape)
            for (p, q), c in e.items():
                term = complex(float(c[0]), float(c[1])) * om ** p * np.conj(om) ** q
                val += term
                mag += np.abs(term)
            res += np.abs(val) ** 2
            scale += mag ** 2
        return res / (scale + 1e-300)

    for chart in ("A", "B"):
        xi = X + 1j * Y
        if chart == "B":
            with np.errstate(divide="ignore", invalid="ignore"):
                xi = np.where(np.abs(xi) > 0, 1.0 / xi, np.inf)
        with np.errstate(all="ignore"):
            r = residual(np.where(np.isfinite(xi), xi, 0))
        r = np.where(np.isfinite(xi), r, np.inf)
        idx = np.argwhere(r < threshold)
        for i, j in idx:
            gx = Fraction(-box).limit_denominator(10 ** 6) + i * step
            gy = Fraction(-box).limit_denominator(10 ** 6) + j * step
            if chart == "B":
                nrm = gx * gx + gy * gy
                if nrm == 0:
                    continue
                gx, gy = gx / nrm, -gy / nrm
            cand = Slope.from_fraction(gx, gy)
            if nroot == 1:
                if verify_slope_exact(eqs_a, cand.exact):
                    found.append(cand)
            else:
                om = complex(cand.value) ** (1.0 / nroot)
                u = restrict_to_line(Pi.to_float(), xi=om)
                if is_harmonic_1d(u):
                    found.append(cand)
    # axes
    if is_harmonic_line(Pi, Slope.from_fraction(0)):
        found.append(Slope.from_fraction(0))
    if is_harmonic_line(Pi, Slope.infinity()):
        found.append(Slope.infinity())
    return _dedupe(found)


# ------------------------------------------------------------ degeneracy / classification

def _sphere_params(t):
    a = math.atan2(abs(t[1]), abs(t[0]))
    return np.array([a, cmath.phase(t[0]), cmath.phase(t[1])])


def _from_params(v):
    a, b, c = v
    return np.array([math.cos(a) * cmath.exp(1j * b), math.sin(a) * cmath.exp(1j * c)])


def degenerate_directions(Pi, n=6000, seed=0, flag=1e-3, tol=1e-9, max_starts=64):
    """Approximate Levi-degenerate directions of a homogeneous Pi on the unit sphere.

    Returns (points, scale) where points are unit vectors t with scaled minimal
    eigenvalue <= tol*scale after local minimization.
    """
    ev = PolyJetEvaluator(Pi)
    z = unit_sphere(rng_for(seed, 0, 31), n)
    lmin, lmax = eig2(ev(z).L)
    scale = float(np.max(lmax))
    if scale <= 0:
        return [], 0.0
    f = lmin / scale
    cand = z[np.argsort(f)]
    fl = np.sort(f)
    starts = []
    for t, v in zip(cand, fl):
        if v > flag and starts:
            break
        u = t / np.linalg.norm(t)
        if all(fs_distance(u, s) > 0.15 for s in starts):
            starts.append(u)
        if len(starts) >= max_starts:
            break

    def obj(v):
        t = _from_params(v)[None, :]
        lo, _ = eig2(ev(t).L)
        return float(lo[0]) / scale

    pts = []
    for s in starts:
        res = minimize(obj, _sphere_params(s), method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-22, "maxiter": 4000, "maxfev": 8000})
        if res.fun <= tol:
            pts.append(_from_params(res.x))
    return pts, scale


def cluster_directions(pts, radius=0.1):
    clusters = []
    for p in pts:
        for cl in clusters:
            if fs_distance(cl[0], p) < radius:
                cl.append(p)
                break
        else:
            clusters.append([p])
    out = []
    for cl in clusters:
        M = sum(np.outer(p, np.conj(p)) for p in cl)
        vals, vecs = np.linalg.eigh(M)
        c = vecs[:, -1]
        spread = max(fs_distance(c, p) for p in cl)
        out.append({"center": c, "spread": spread, "count": len(cl)})
    return out


@dataclass
class Classification:
    verdict: str
    separating_wedge: dict | None = None
    failure_witness: list | None = None
    off_curve_clusters: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_json(self):
        return {
            "verdict": self.verdict,
            "separating_wedge": self.separating_wedge,
            "failure_witness": self.failure_witness,
            "off_curve_clusters": [
                {"center": [c["center"][0].real, c["center"][0].imag, c["center"][1].real, c["center"][1].imag],
                 "spread": c["spread"], "count": c["count"]}
                for c in self.off_curve_clusters
            ],
            "notes": self.notes,
        }


def _line_vectors(curves):
    return [ln.slope.sphere_point() for c in curves for ln in c.lines]


def _is_branch_artifact(P, w, t):
    """Degeneracy of Pi on an axis produced by the branched map, not by P."""
    z1 = t[0] ** w.sigma1
    z2 = t[1] ** w.sigma2
    art = (w.sigma1 > 1 and abs(t[0]) < 1e-6) or (w.sigma2 > 1 and abs(t[1]) < 1e-6)
    if not art:
        return False
    H = hessian(P)
    z = np.array([[z1, z2]])
    lam = PolyJetEvaluator(P)(z)
    lmin, lmax = eig2(lam.L)
    return bool(lmin[0] > 1e-9 * max(lmax[0], 1e-300)) and H is not None


def separation_check(P, w, curves, n=6000, seed=0, eps=0.15):
    """Classify the domain and propose wedge apertures around each curve."""
    H = hessian(P)
    if H.det().is_zero():
        return Classification("NOT_APPLICABLE", failure_witness=[1.0, 0.0, 1.0, 0.0],
                              notes=["Levi determinant vanishes identically (rank-one Hessian everywhere)"])
    Pi = pullback(P, w)
    pts, _ = degenerate_directions(Pi, n=n, seed=seed)
    lines = _line_vectors(curves)
    off = []
    for p in pts:
        if lines and min(fs_distance(p, v) for v in lines) < eps:
            continue
        if _is_branch_artifact(P, w, p):
            continue
        off.append(p)
    clusters = cluster_directions(off)
    if not curves:
        return Classification("H_EXTENDIBLE", off_curve_clusters=clusters)
    wedge = {}
    for ci, c in enumerate(curves):
        gaps = [fs_distance(ln.slope.sphere_point(), cl["center"]) - cl["spread"] for ln in c.lines for cl in clusters]
        others = [fs_distance(ln.slope.sphere_point(), v) for ln in c.lines
                  for cj, d in enumerate(curves) if cj != ci for v in (x.slope.sphere_point() for x in d.lines)]
        # lines of one curve are separated from each other as well
        own = [fs_distance(a.slope.sphere_point(), b.slope.sphere_point()) for a in c.lines for b in c.lines if a is not b]
        room = min(gaps + [x / 2 for x in others + own] + [0.6])
        if room <= 0.05:
            witness = None
            if clusters:
                cc = clusters[0]["center"]
                witness = [cc[0].real, cc[0].imag, cc[1].real, cc[1].imag]
            return Classification("NOT_APPLICABLE", failure_witness=witness, off_curve_clusters=clusters,
                                  notes=["degenerate set is not wedge-separated from an exceptional curve"])
        alpha = math.tan(room) / 4
        wedge[str(ci)] = {"W1": alpha, "W2": 2 * alpha}
    return Classification("ALMOST_H_EXTENDIBLE", separating_wedge=wedge, off_curve_clusters=clusters)


# ------------------------------------------------------------ invariants

def local_frame(poly, slope):
    """Polynomial in local coordinates (ell, s) with the line at {ell = 0}.

    Finite slope xi: (ell, s) = (t1 - xi t2, t2), so poly(ell + xi s, s).
    Axis: (ell, s) = (t2, t1).
    """
    if slope.is_inf:
        return poly.swap()
    xi = slope.exact if isinstance(slope.exact, tuple) else complex(slope.value)
    src = poly if isinstance(xi, tuple) else poly.to_float()
    return substitute(src, linear_form(0, 1, xi), linear_form(0, 0, 1))


def _base_points(count=17, seed=1):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        re = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6)))
        im = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6)))
        if re == 0 and im == 0:
            re = Fraction(1)
        out.append((re, im))
    return out


def _normal_order(local, c):
    u = substitute(local, linear_form(0, 1, 0), linear_form(c, 0, 0))
    u = u - MixedPolynomial.constant(u.coeff((0, 0, 0, 0)))
    if not u.exact:
        u = u.filter(lambda k: True).map_coeffs(lambda v: v if abs(complex(float(v[0]), float(v[1]))) > 1e-11 else (0.0, 0.0))
    return univariate_order(u)


def curve_invariants(P, Q, w, curve, base_count=17):
    """(mu, twoM, verdict) for one curve, all computed in the pullback frame."""
    Pi = pullback(P, w)
    R = pullback(P + Q, w)
    rep = curve.representative
    locP = local_frame(Pi, rep)
    locR = local_frame(R, rep)
    bases = _base_points(base_count)
    orders = [_normal_order(locP, c) for c in bases]
    counts = {}
    for o in orders:
        counts[o] = counts.get(o, 0) + 1
    mu = max(counts, key=lambda o: (counts[o], -o if o != math.inf else 0))
    notes = []
    if len(counts) > 1:
        more = [_normal_order(locP, c) for c in _base_points(4 * base_count, seed=7)]
        for o in more:
            counts[o] = counts.get(o, 0) + 1
        mu = max(counts, key=lambda o: counts[o])
        notes.append("normal-line orders disagreed across base points; widened sample used")
    r_orders = [_normal_order(locR, c) for c in bases]
    verdict = "PASS" if all(o >= mu for o in r_orders) else "FAIL"
    D = R.degree()
    _, rho = pluriharmonic_strip(R, None, D)
    twoM = None
    for n in range(w.nu, D + 1):
        part = rho.homogeneous_part(n)
        if part.is_zero():
            continue
        if not is_harmonic_line(part, rep):
            twoM = n
            break
    if twoM is None:
        raise InfiniteType("no homogeneous part of the pulled-back defining function is non-harmonic on the curve")
    curve.mu = int(mu)
    curve.twoM = int(twoM)
    curve.star_verdict = verdict
    curve.diagnostics = {"normal_orders": [o if o != math.inf else None for o in orders], "notes": notes}
    return curve.mu, curve.twoM, verdict


def analyze(P, Q, w, seed=0, n=6000):
    """Full analysis: curves with invariants plus the classification."""
    if hessian(P).det().is_zero():
        # rank-one Levi form everywhere: every line through a degenerate point is
        # degenerate and the harmonic-line system has no isolated roots
        return [], separation_check(P, w, [], n=n, seed=seed)
    curves = find_exceptional(P, w)
    for c in curves:
        curve_invariants(P, Q, w, c)
    cls = separation_check(P, w, curves, n=n, seed=seed)
    return curves, cls


def contact_exponents(curves, w):
    if not curves:
        return None
    delta = max(c.twoM for c in curves)
    return {"Delta": delta, "Delta_over_nu": str(Fraction(delta, w.nu))}
