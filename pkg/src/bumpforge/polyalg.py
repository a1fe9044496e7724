"""Exact algebra for polynomials in z1, conj(z1), z2, conj(z2).

A :class:`MixedPolynomial` maps exponent quadruples ``(a1, b1, a2, b2)`` to
complex coefficients; the monomial is ``z1^a1 zb1^b1 z2^a2 zb2^b2`` where
``zb`` denotes the conjugate.  Coefficients are pairs of ``Fraction`` when
exact; floats are accepted as a fallback and flip the ``exact`` flag.

Univariate polynomials in (t, conj t) reuse the same class with ``a2 = b2 = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import product

import numpy as np

from .errors import NoCandidate, NonLatticeMonomial

Z1, Z1B, Z2, Z2B = 0, 1, 2, 3


def _q(x):
    """Coerce a real scalar to Fraction when it is exact, float otherwise."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    return float(x)


def as_coeff(c):
    """Return ``(re, im)`` for ints, Fractions, floats, complex or pairs."""
    if isinstance(c, tuple):
        return (_q(c[0]), _q(c[1]))
    if isinstance(c, (complex, np.complexfloating)):
        return (float(c.real), float(c.imag))
    return (_q(c), Fraction(0))


def _cmul(x, y):
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _cadd(x, y):
    return (x[0] + y[0], x[1] + y[1])


def _is_zero(c):
    return c[0] == 0 and c[1] == 0


def _conj(c):
    return (c[0], -c[1])


def _exact(c):
    return isinstance(c[0], Fraction) and isinstance(c[1], Fraction)


def coeff_to_complex(c):
    return complex(float(c[0]), float(c[1]))


class MixedPolynomial:
    """Sparse polynomial in z1, z1bar, z2, z2bar with exact coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for key, c in terms.items():
                key = tuple(int(k) for k in key)
                if len(key) != 4 or min(key) < 0:
                    raise ValueError(f"bad exponent {key}")
                c = as_coeff(c)
                if not _is_zero(c):
                    clean[key] = c
        self.terms = dict(sorted(clean.items()))
        self._hash = None

    # constructors
    @classmethod
    def constant(cls, c):
        return cls({(0, 0, 0, 0): c})

    @classmethod
    def monomial(cls, a1=0, b1=0, a2=0, b2=0, coeff=1):
        return cls({(a1, b1, a2, b2): coeff})

    @classmethod
    def var(cls, name):
        idx = {"z1": Z1, "z1bar": Z1B, "z2": Z2, "z2bar": Z2B, "t": Z1, "tbar": Z1B}[name]
        e = [0, 0, 0, 0]
        e[idx] = 1
        return cls({tuple(e): 1})

    # basic queries
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    @property
    def exact(self):
        return all(_exact(c) for c in self.terms.values())

    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def coeff(self, key):
        return self.terms.get(tuple(key), (Fraction(0), Fraction(0)))

    def degree(self):
        return max((sum(k) for k in self.terms), default=0)

    def low_degree(self):
        return min((sum(k) for k in self.terms), default=0)

    def degree_in(self, var):
        """Total degree in (z_var, conj z_var), var in {1, 2}."""
        i = 0 if var == 1 else 2
        return max((k[i] + k[i + 1] for k in self.terms), default=0)

    def is_homogeneous(self):
        return len({sum(k) for k in self.terms}) <= 1

    def is_univariate(self):
        return all(k[2] == 0 and k[3] == 0 for k in self.terms)

    def is_real(self):
        for (a1, b1, a2, b2), c in self.terms.items():
            d = self.terms.get((b1, a1, b2, a2))
            if d is None or d[0] != c[0] or d[1] != -c[1]:
                if _exact(c):
                    return False
                d = d or (0.0, 0.0)
                if abs(d[0] - c[0]) + abs(d[1] + c[1]) > 1e-12 * (1 + abs(c[0]) + abs(c[1])):
                    return False
        return True

    def is_holomorphic(self):
        return all(k[1] == 0 and k[3] == 0 for k in self.terms)

    # algebra
    def __eq__(self, other):
        if not isinstance(other, MixedPolynomial):
            other = MixedPolynomial.constant(other)
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self.terms.items()))
        return self._hash

    def _coerce(self, other):
        if isinstance(other, MixedPolynomial):
            return other
        return MixedPolynomial.constant(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = _cadd(out[k], c) if k in out else c
        return MixedPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return MixedPolynomial({k: (-c[0], -c[1]) for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MixedPolynomial):
            c = as_coeff(other)
            return MixedPolynomial({k: _cmul(v, c) for k, v in self.terms.items()})
        out = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = (k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2], k1[3] + k2[3])
                p = _cmul(c1, c2)
                out[k] = _cadd(out[k], p) if k in out else p
        return MixedPolynomial(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = as_coeff(other)
        den = c[0] * c[0] + c[1] * c[1]
        return self * (c[0] / den, -c[1] / den)

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        result = MixedPolynomial.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def conj(self):
        """Complex conjugate of the function z -> p(z)."""
        return MixedPolynomial({(b1, a1, b2, a2): _conj(c) for (a1, b1, a2, b2), c in self.terms.items()})

    def real_part(self):
        return (self + self.conj()) * Fraction(1, 2)

    def imag_part(self):
        return (self - self.conj()) * (Fraction(0), Fraction(-1, 2))

    def filter(self, pred):
        return MixedPolynomial({k: c for k, c in self.terms.items() if pred(k)})

    def homogeneous_part(self, n):
        return self.filter(lambda k: sum(k) == n)

    def swap(self):
        """Exchange the roles of z1 and z2."""
        return MixedPolynomial({(a2, b2, a1, b1): c for (a1, b1, a2, b2), c in self.terms.items()})

    def map_coeffs(self, fn):
        return MixedPolynomial({k: fn(c) for k, c in self.terms.items()})

    def to_float(self):
        return self.map_coeffs(lambda c: (float(c[0]), float(c[1])))

    # evaluation
    def compile(self):
        return CompiledPoly(self)

    def __call__(self, z1, z2=0.0):
        return self.compile()(z1, z2)

    def max_abs_coeff(self):
        return max((abs(coeff_to_complex(c)) for c in self.terms.values()), default=0.0)

    # serialization
    def to_json_terms(self):
        out = []
        for (a1, b1, a2, b2), c in sorted(self.terms.items()):
            if not _exact(c):
                raise ValueError("inexact coefficient cannot be serialized exactly")
            out.append([a1, b1, a2, b2, c[0].numerator, c[0].denominator, c[1].numerator, c[1].denominator])
        return out

    @classmethod
    def from_json_terms(cls, rows):
        terms = {}
        for row in rows:
            if len(row) != 8:
                raise ValueError("term rows have 8 entries")
            a1, b1, a2, b2, rn, rd, im_n, im_d = (int(v) for v in row)
            key = (a1, b1, a2, b2)
            c = (Fraction(rn, rd), Fraction(im_n, im_d))
            terms[key] = _cadd(terms[key], c) if key in terms else c
        return cls(terms)

    def __repr__(self):
        return f"MixedPolynomial({to_text(self)})"

    def __str__(self):
        return to_text(self)


def _frac_text(x):
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return repr(float(x))


def coeff_text(c):
    re, im = c
    if im == 0:
        return f"({_frac_text(re)})"
    if re == 0:
        return f"({_frac_text(im)}*i)"
    return f"({_frac_text(re)}+{_frac_text(im)}*i)"


def to_text(p, names=("z1", "z2")):
    """Canonical text form accepted by the expression parser."""
    if not p.terms:
        return "0"
    parts = []
    for (a1, b1, a2, b2), c in sorted(p.terms.items()):
        factors = [coeff_text(c)]
        for e, base in ((a1, names[0]), (b1, f"conj({names[0]})"), (a2, names[1]), (b2, f"conj({names[1]})")):
            if e == 1:
                factors.append(base)
            elif e > 1:
                factors.append(f"{base}^{e}")
        parts.append("*".join(factors))
    return " + ".join(parts)


class CompiledPoly:
    """Vectorized numerical evaluator for a MixedPolynomial."""

    def __init__(self, p):
        self.poly = p
        keys = list(p.terms)
        self.exps = np.array(keys, dtype=int).reshape(-1, 4)
        self.coef = np.array([coeff_to_complex(c) for c in p.terms.values()], dtype=complex)
        self.maxdeg = int(self.exps.max()) if len(keys) else 0
        self.real = p.is_real()

    def eval_complex(self, z1, z2=0.0):
        z1, z2 = np.broadcast_arrays(np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex))
        shape = z1.shape
        z1, z2 = z1.ravel(), z2.ravel()
        if not len(self.coef):
            return np.zeros(shape, dtype=complex)
        d = self.maxdeg
        k = np.arange(d + 1)
        p1 = z1[:, None] ** k
        p2 = z2[:, None] ** k
        e = self.exps
        mon = p1[:, e[:, 0]] * np.conj(p1[:, e[:, 1]]) * p2[:, e[:, 2]] * np.conj(p2[:, e[:, 3]])
        return (mon @ self.coef).reshape(shape)

    def __call__(self, z1, z2=0.0):
        v = self.eval_complex(z1, z2)
        return v.real if self.real else v


# Wirtinger calculus

def wirtinger(p, variable, kind="holo"):
    """Formal derivative d/dz_j (kind 'holo') or d/dzbar_j (kind 'anti')."""
    v = {"z1": 1, "z2": 2, 1: 1, 2: 2}[variable]
    idx = (0 if v == 1 else 2) + (0 if kind == "holo" else 1)
    out = {}
    for k, c in p.terms.items():
        e = k[idx]
        if e == 0:
            continue
        nk = list(k)
        nk[idx] -= 1
        out[tuple(nk)] = (c[0] * e, c[1] * e)
    return MixedPolynomial(out)


def laplacian_1d(u):
    """Euclidean Laplacian 4 d/dt d/dtbar of a univariate polynomial."""
    return wirtinger(wirtinger(u, 1, "holo"), 1, "anti") * 4


# Weights

@dataclass(frozen=True)
class WeightSignature:
    m1: int
    m2: int

    def __post_init__(self):
        if self.m1 < 1 or self.m2 < 1:
            raise ValueError("weights must be positive")

    @property
    def nu(self):
        return self.m1 * self.m2 // math.gcd(self.m1, self.m2)

    @property
    def sigma1(self):
        return self.nu // self.m1

    @property
    def sigma2(self):
        return self.nu // self.m2

    @property
    def sigma(self):
        return (self.sigma1, self.sigma2)

    def eta(self, key):
        a1, b1, a2, b2 = key
        return Fraction(a1 + b1, self.m1) + Fraction(a2 + b2, self.m2)

    def weighted_norm(self, z1, z2):
        return np.abs(z1) ** self.m1 + np.abs(z2) ** self.m2

    def to_list(self):
        return [self.m1, self.m2]

    @classmethod
    def parse(cls, text):
        a, b = (int(s) for s in str(text).replace(" ", "").split(","))
        return cls(a, b)


@dataclass(frozen=True)
class WeightedComponent:
    eta: Fraction
    part: MixedPolynomial


def weighted_decompose(p, w):
    """Split p into weighted-homogeneous components sorted by weighted degree."""
    groups = {}
    for k, c in p.terms.items():
        groups.setdefault(w.eta(k), {})[k] = c
    return [WeightedComponent(eta, MixedPolynomial(t)) for eta, t in sorted(groups.items())]


def has_pluriharmonic_terms(p):
    """True if p contains a nonconstant purely (anti)holomorphic monomial."""
    return any((k[1] == 0 and k[3] == 0 or k[0] == 0 and k[2] == 0) and sum(k) > 0 for k in p.terms)


def infer_weights(p, bound=None):
    """Heuristic multitype guess; returns (WeightSignature, 'NON_AUTHORITATIVE').

    Takes m1 as large as possible, then m2, subject to every term having
    weighted degree >= 1 and the weight-one part carrying a mixed term.
    """
    if not p.terms:
        raise NoCandidate("zero polynomial")
    bound = bound or max(2, p.degree())
    for m1 in range(bound, 0, -1):
        for m2 in range(bound, m1 - 1, -1):
            w = WeightSignature(m1, m2)
            comps = [c for c in weighted_decompose(p, w) if c.eta > 0]
            if not comps or comps[0].eta != 1:
                continue
            mixed = [k for k in comps[0].part.terms if (k[0] + k[2]) > 0 and (k[1] + k[3]) > 0]
            if mixed:
                return w, "NON_AUTHORITATIVE"
    raise NoCandidate("no integer weight pair makes the weight-one part non-pluriharmonic")


def pluriharmonic_strip(p, w=None, max_degree=None):
    """Remove pluriharmonic monomials of degree <= D.

    Returns ``(q, rho)`` with ``q`` holomorphic and ``rho = p - Re(q)``.
    Degree is total degree, or nu*eta when a weight signature is given.
    """
    q = {}
    for k, c in p.terms.items():
        a1, b1, a2, b2 = k
        deg = sum(k) if w is None else w.nu * w.eta(k)
        if b1 == 0 and b2 == 0 and sum(k) > 0 and (max_degree is None or deg <= max_degree):
            q[k] = (2 * c[0], 2 * c[1])
    qp = MixedPolynomial(q)
    return qp, p - qp.real_part()


# Substitution machinery

def substitute(p, s1, s2):
    """Compose p with z1 -> s1, z2 -> s2 where s1, s2 are holomorphic polynomials."""
    c1, c2 = s1.conj(), s2.conj()
    caches = [{0: MixedPolynomial.constant(1)} for _ in range(4)]
    bases = [s1, c1, s2, c2]

    def power(i, e):
        cache = caches[i]
        if e not in cache:
            cache[e] = power(i, e - 1) * bases[i]
        return cache[e]

    acc = {}
    for (a1, b1, a2, b2), c in p.terms.items():
        term = power(0, a1) * power(1, b1) * power(2, a2) * power(3, b2)
        for k, v in term.terms.items():
            v = _cmul(v, c)
            acc[k] = _cadd(acc[k], v) if k in acc else v
    return MixedPolynomial(acc)


def linear_form(c0=0, c1=0, c2=0):
    """Holomorphic affine polynomial c0 + c1*z1 + c2*z2."""
    return MixedPolynomial({(0, 0, 0, 0): c0, (1, 0, 0, 0): c1, (0, 0, 1, 0): c2})


def restrict_to_line(p, xi=None, axis=False, base=None, direction=None):
    """Restrict p to a complex line; result is univariate in (t, tbar).

    * ``xi`` given: the line {z1 = xi z2}, parametrized by t -> (xi t, t);
    * ``axis=True``: the line {z2 = 0}, parametrized by t -> (t, 0);
    * ``base``/``direction``: the affine line t -> base + t*direction.
    """
    if base is not None:
        d = direction if direction is not None else (1, 0)
        s1 = linear_form(base[0], d[0], 0)
        s2 = linear_form(base[1], d[1], 0)
    elif axis:
        s1, s2 = linear_form(0, 1, 0), linear_form(0, 0, 0)
    else:
        s1, s2 = linear_form(0, xi, 0), linear_form(0, 1, 0)
    return substitute(p, s1, s2)


def pullback(p, w):
    """p composed with (t1, t2) -> (t1^sigma1, t2^sigma2)."""
    s1, s2 = w.sigma
    return MixedPolynomial({(a1 * s1, b1 * s1, a2 * s2, b2 * s2): c for (a1, b1, a2, b2), c in p.terms.items()})


def pushdown(p, w):
    """Inverse of :func:`pullback` on lattice-supported polynomials."""
    s1, s2 = w.sigma
    out = {}
    for (a1, b1, a2, b2), c in p.terms.items():
        if a1 % s1 or b1 % s1 or a2 % s2 or b2 % s2:
            raise NonLatticeMonomial(f"monomial {(a1, b1, a2, b2)} not on the (sigma1, sigma2) lattice")
        out[(a1 // s1, b1 // s1, a2 // s2, b2 // s2)] = c
    return MixedPolynomial(out)


def shear(p, xi):
    """p(z1 + xi z2, z2): moves the line {z1 = xi z2} to {z1 = 0}."""
    return substitute(p, linear_form(0, 1, xi), linear_form(0, 0, 1))


def mixed_coefficients(u):
    """Coefficients of a univariate polynomial on monomials t^i tbar^j with i, j >= 1."""
    return {k: c for k, c in u.terms.items() if k[0] >= 1 and k[1] >= 1}


def is_harmonic_1d(u):
    return not any(not _is_zero(c) for c in mixed_coefficients(u).values()) if u.exact else all(
        abs(coeff_to_complex(c)) <= 1e-12 * (1 + u.max_abs_coeff()) for c in mixed_coefficients(u).values()
    )


def univariate_order(u):
    """Vanishing order at 0 of a univariate polynomial minus its constant term."""
    degs = [sum(k) for k in u.terms if sum(k) > 0]
    return min(degs) if degs else math.inf


def random_real_polynomial(rng, degree, n_terms=6, homogeneous=False, denominators=(1, 2, 3, 5, 7)):
    """Random real-valued MixedPolynomial with small rational coefficients (for tests)."""
    p = MixedPolynomial()
    for _ in range(n_terms):
        d = degree if homogeneous else int(rng.integers(1, degree + 1))
        parts = rng.multinomial(d, [0.25] * 4)
        key = tuple(int(x) for x in parts)
        re = Fraction(int(rng.integers(-5, 6)), int(rng.choice(denominators)))
        im = Fraction(int(rng.integers(-5, 6)), int(rng.choice(denominators)))
        p = p + MixedPolynomial({key: (re, im)})
    return p.real_part()


def lcm(*xs):
    return reduce(lambda a, b: a * b // math.gcd(a, b), xs, 1)


def monomials_of_degree(n):
    for key in product(range(n + 1), repeat=4):
        if sum(key) == n:
            yield key
