"""Complex Hessians, Levi forms and sampled plurisubharmonicity checks.

Composite functions (cutoffs, radial profiles, products) are differentiated
with *Levi jets*: for a real function f the jet stores f, the holomorphic
gradient (d f/d z1, d f/d z2) and the complex Hessian d^2 f/d z_j d zbar_k.
Sums, products and compositions with real one-variable functions only need
these three pieces, so the Levi form of every building block is exact up to
rounding (no finite differences).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import RegionEmpty
from .polyalg import MixedPolynomial, wirtinger
from .sampling import sharded


@dataclass(frozen=True)
class HessianField:
    h11: MixedPolynomial
    h12: MixedPolynomial
    h22: MixedPolynomial

    @property
    def h21(self):
        return self.h12.conj()

    def det(self):
        return self.h11 * self.h22 - self.h12 * self.h21

    def trace(self):
        return self.h11 + self.h22

    def matrix(self, z):
        z = np.atleast_2d(z)
        out = np.empty((len(z), 2, 2), dtype=complex)
        a = self.h11.compile().eval_complex(z[:, 0], z[:, 1])
        b = self.h12.compile().eval_complex(z[:, 0], z[:, 1])
        d = self.h22.compile().eval_complex(z[:, 0], z[:, 1])
        out[:, 0, 0], out[:, 0, 1], out[:, 1, 0], out[:, 1, 1] = a, b, np.conj(b), d
        return out

    def levi(self, z, v):
        m = self.matrix(z)
        v = np.atleast_2d(v)
        return np.einsum("ni,nij,nj->n", v, m, np.conj(v))


def hessian(p):
    """Exact mixed Wirtinger Hessian; h12 = d^2 p / dz1 dzbar2."""
    d1 = wirtinger(p, 1, "holo")
    d2 = wirtinger(p, 2, "holo")
    return HessianField(wirtinger(d1, 1, "anti"), wirtinger(d1, 2, "anti"), wirtinger(d2, 2, "anti"))


def eig2(L):
    """Eigenvalues (min, max) of a stack of 2x2 Hermitian matrices, closed form."""
    a = L[..., 0, 0].real
    d = L[..., 1, 1].real
    b = L[..., 0, 1]
    tr = a + d
    disc = np.sqrt((a - d) ** 2 + 4 * np.abs(b) ** 2)
    lmax = 0.5 * (tr + disc)
    lmin_direct = 0.5 * (tr - disc)
    det = a * d - np.abs(b) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        lmin_stable = np.where(lmax > 0, det / lmax, lmin_direct)
    lmin = np.where(tr > 0, lmin_stable, lmin_direct)
    lmin = np.where(np.isfinite(lmin), lmin, lmin_direct)
    return lmin, lmax


# ---------------------------------------------------------------- jets

class Jet:
    """Value, holomorphic gradient and complex Hessian of a real function."""

    __slots__ = ("val", "d", "L")

    def __init__(self, val, d, L):
        self.val = val
        self.d = d
        self.L = L

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros(n), np.zeros((n, 2), dtype=complex), np.zeros((n, 2, 2), dtype=complex))

    @classmethod
    def constant(cls, c, n):
        j = cls.zeros(n)
        j.val = j.val + c
        return j

    def __add__(self, o):
        if isinstance(o, Jet):
            return Jet(self.val + o.val, self.d + o.d, self.L + o.L)
        return Jet(self.val + o, self.d, self.L)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.val, -self.d, -self.L)

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, Jet):
            f, g = self, o
            outer = f.d[:, :, None] * np.conj(g.d)[:, None, :] + g.d[:, :, None] * np.conj(f.d)[:, None, :]
            return Jet(f.val * g.val, f.val[:, None] * g.d + g.val[:, None] * f.d,
                       f.val[:, None, None] * g.L + g.val[:, None, None] * f.L + outer)
        o = np.asarray(o)
        if o.ndim == 1:
            return Jet(self.val * o, self.d * o[:, None], self.L * o[:, None, None])
        return Jet(self.val * o, self.d * o, self.L * o)

    __rmul__ = __mul__

    def compose(self, phi, dphi, ddphi):
        """phi(f) for a real C^2 function phi given with its first two derivatives."""
        f = self.val
        p1, p2 = dphi(f), ddphi(f)
        outer = self.d[:, :, None] * np.conj(self.d)[:, None, :]
        return Jet(phi(f), p1[:, None] * self.d, p1[:, None, None] * self.L + p2[:, None, None] * outer)

    def reciprocal(self):
        return self.compose(lambda x: 1.0 / x, lambda x: -1.0 / x ** 2, lambda x: 2.0 / x ** 3)

    def levi(self, v):
        return np.einsum("ni,nij,nj->n", v, self.L, np.conj(v)).real

    def eig(self):
        return eig2(self.L)

    def take(self, idx):
        return Jet(self.val[idx], self.d[idx], self.L[idx])


class HoloJet:
    """Value and gradient of a holomorphic function (its Levi form vanishes)."""

    __slots__ = ("val", "d")

    def __init__(self, val, d):
        self.val = val
        self.d = d

    @classmethod
    def linear(cls, c1, c2, z):
        n = len(z)
        d = np.empty((n, 2), dtype=complex)
        d[:, 0], d[:, 1] = c1, c2
        return cls(c1 * z[:, 0] + c2 * z[:, 1], d)

    @classmethod
    def coordinate(cls, i, z):
        return cls.linear(1.0 if i == 0 else 0.0, 1.0 if i == 1 else 0.0, z)

    def __mul__(self, o):
        if isinstance(o, HoloJet):
            return HoloJet(self.val * o.val, self.val[:, None] * o.d + o.val[:, None] * self.d)
        return HoloJet(self.val * o, self.d * o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        inv = HoloJet(1.0 / o.val, -o.d / (o.val ** 2)[:, None])
        return self * inv

    def __pow__(self, k):
        if k == 0:
            return HoloJet(np.ones_like(self.val), np.zeros_like(self.d))
        return HoloJet(self.val ** k, k * (self.val ** (k - 1))[:, None] * self.d)

    def compose_real(self, F, Fs, Fss):
        """F(g) for real F on C given F, dF/ds and d^2F/ds dsbar at s = g."""
        g = self.val
        fs = Fs(g)
        fss = Fss(g)
        outer = self.d[:, :, None] * np.conj(self.d)[:, None, :]
        return Jet(F(g), fs[:, None] * self.d, fss[:, None, None] * outer)

    def abs2(self):
        """|g|^2 as a real jet."""
        g = self.val
        return Jet(np.abs(g) ** 2, np.conj(g)[:, None] * self.d, self.d[:, :, None] * np.conj(self.d)[:, None, :])


class PolyJetEvaluator:
    """Compiled jet evaluator for a real MixedPolynomial."""

    def __init__(self, p):
        self.p = p
        d1 = wirtinger(p, 1, "holo")
        d2 = wirtinger(p, 2, "holo")
        H = hessian(p)
        self._c = [q.compile() for q in (p, d1, d2, H.h11, H.h12, H.h22)]

    def __call__(self, z):
        z1, z2 = z[:, 0], z[:, 1]
        v, a, b, h11, h12, h22 = (c.eval_complex(z1, z2) for c in self._c)
        n = len(z)
        L = np.empty((n, 2, 2), dtype=complex)
        L[:, 0, 0], L[:, 0, 1], L[:, 1, 0], L[:, 1, 1] = h11.real, h12, np.conj(h12), h22.real
        return Jet(v.real, np.stack([a, b], axis=1), L)


def poly_jet(p, z):
    return PolyJetEvaluator(p)(z)


def norm2_jet(z):
    """Jet of |z1|^2 + |z2|^2."""
    n = len(z)
    L = np.zeros((n, 2, 2), dtype=complex)
    L[:, 0, 0] = L[:, 1, 1] = 1.0
    return Jet(np.sum(np.abs(z) ** 2, axis=1), np.conj(z), L)


def norm_power_jet(z, k):
    """Jet of ||z||^{2k}."""
    return norm2_jet(z).compose(lambda x: x ** k, lambda x: k * x ** (k - 1), lambda x: k * (k - 1) * x ** (k - 2))


# ---------------------------------------------------------------- checks

def as_jet_function(f):
    if isinstance(f, MixedPolynomial):
        return PolyJetEvaluator(f)
    if hasattr(f, "jet"):
        return f.jet
    return f


@dataclass
class PshReport:
    verdict: str
    min_scaled_eigenvalue: float
    witness: dict | None
    n_samples: int
    seed: int
    tol: float
    extra: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.verdict == "PASS"

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "min_scaled_eigenvalue": float(self.min_scaled_eigenvalue),
            "witness": self.witness,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "tol": self.tol,
            **self.extra,
        }


def point_to_list(z):
    return [float(z[0].real), float(z[0].imag), float(z[1].real), float(z[1].imag)]


def _degree_scale(f, degree):
    if degree is not None:
        return degree
    if isinstance(f, MixedPolynomial) and f.is_homogeneous() and f.degree() % 2 == 0:
        return f.degree()
    return None


def scaled_min_eigenvalues(f, region, n, seed, degree=None, scale=None):
    """Iterate shards of (points, scaled minimal Levi eigenvalue)."""
    fn = as_jet_function(f)
    deg = _degree_scale(f, degree)
    for _, z in sharded(region, n, seed):
        jet = fn(z)
        lmin, _ = eig2(jet.L)
        if scale is not None:
            sc = scale(z)
        elif deg is not None:
            sc = np.linalg.norm(z, axis=1) ** (deg - 2)
        else:
            sc = np.ones(len(z))
        yield z, lmin / sc


def check_psh(f, region, n=2000, seed=0, tol=1e-9, degree=None, scale=None):
    """Sampled plurisubharmonicity test; PASS iff min eigenvalue >= -tol*scale."""
    best = np.inf
    wit = None
    count = 0
    for z, s in scaled_min_eigenvalues(f, region, n, seed, degree, scale):
        count += len(z)
        i = int(np.argmin(s))
        if s[i] < best:
            best = float(s[i])
            wit = point_to_list(z[i])
    if count == 0:
        raise RegionEmpty("no samples")
    verdict = "PASS" if best >= -tol else "FAIL"
    if not np.isfinite(best):
        verdict = "INCONCLUSIVE"
    return PshReport(verdict, best, wit if verdict != "PASS" else None, count, seed, tol,
                     {"region": region.describe() if hasattr(region, "describe") else None, "argmin": wit})


def strict_psh_lower_bound(f, region, n=2000, seed=0, degree=None):
    """B = max(0, min scaled eigenvalue) over samples, plus the raw minimum."""
    best = np.inf
    wit = None
    for z, s in scaled_min_eigenvalues(f, region, n, seed, degree):
        i = int(np.argmin(s))
        if s[i] < best:
            best, wit = float(s[i]), point_to_list(z[i])
    return max(0.0, best), {"raw_min": best, "argmin": wit}


def fd_levi_matrix(fun, z, h=1e-4, richardson=True):
    """Complex Hessian d^2 f / dz_j dzbar_k by central differences of values.

    ``fun`` maps an (n, 2) complex array to real values.  Uses
    d^2/dz_j dzbar_k = (1/4)[(f_xjxk + f_yjyk) + i(f_xjyk - f_yjxk)], with one
    Richardson step (steps h and 2h) unless ``richardson`` is False.
    """
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    base = h * (1 + np.linalg.norm(z, axis=1))[:, None]
    if not richardson:
        return _fd_levi(fun, z, base)
    return (4 * _fd_levi(fun, z, base) - _fd_levi(fun, z, 2 * base)) / 3


def _fd_levi(fun, z, step):
    n = len(z)
    e0 = np.array([1, 0], dtype=complex)
    e1 = np.array([0, 1], dtype=complex)
    dirs = {("x", 0): e0, ("y", 0): 1j * e0, ("x", 1): e1, ("y", 1): 1j * e1}

    def d2(u, v):
        pp = fun(z + step * (u + v))
        pm = fun(z + step * (u - v))
        mp = fun(z + step * (-u + v))
        mm = fun(z - step * (u + v))
        return (pp - pm - mp + mm) / (4 * step[:, 0] ** 2)

    L = np.empty((n, 2, 2), dtype=complex)
    for j in range(2):
        for k in range(2):
            xx = d2(dirs[("x", j)], dirs[("x", k)])
            yy = d2(dirs[("y", j)], dirs[("y", k)])
            xy = d2(dirs[("x", j)], dirs[("y", k)])
            yx = d2(dirs[("y", j)], dirs[("x", k)])
            L[:, j, k] = 0.25 * ((xx + yy) + 1j * (xy - yx))
    return L
