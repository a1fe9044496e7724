"""Deck rotations of the branched cover t -> (t1^sigma1, t2^sigma2) and branch averaging."""

from __future__ import annotations

import cmath
import math

import numpy as np

from .levi import Jet


def roots_of_unity(n):
    return np.exp(2j * np.pi * np.arange(n) / n)


def rotation_factors(l, m, w, inverse=False):
    """Diagonal entries of R^{lm}: (t1, t2) -> (zeta1^l t1, zeta2^m t2)."""
    sgn = -1 if inverse else 1
    return (cmath.exp(sgn * 2j * math.pi * l / w.sigma1), cmath.exp(sgn * 2j * math.pi * m / w.sigma2))


def apply_diag(t, a):
    return np.stack([t[:, 0] * a[0], t[:, 1] * a[1]], axis=1)


def transport_jet(jet, a):
    """Jet of f(A t) from the jet of f evaluated at A t, for A = diag(a)."""
    a = np.asarray(a, dtype=complex)
    d = jet.d * a[None, :]
    L = jet.L * (a[:, None] * np.conj(a)[None, :])[None, :, :]
    return Jet(jet.val, d, L)


def branch_points(z, w):
    """All sigma1*sigma2 preimages of z as an array (n_branches, n, 2)."""
    s1, s2 = w.sigma
    r1 = z[:, 0] ** (1.0 / s1) if s1 > 1 else z[:, 0]
    r2 = z[:, 1] ** (1.0 / s2) if s2 > 1 else z[:, 1]
    out = []
    for a in roots_of_unity(s1):
        for b in roots_of_unity(s2):
            out.append(np.stack([r1 * a, r2 * b], axis=1))
    return np.array(out)


def push(t, w):
    return np.stack([t[:, 0] ** w.sigma1, t[:, 1] ** w.sigma2], axis=1)


def symmetrize_values(F, z, w):
    """(1 / sigma1 sigma2) sum over branches of F(t_b)."""
    pts = branch_points(z, w)
    return np.mean([F(t) for t in pts], axis=0)


def symmetrize_levi(jet_fn, z, w):
    """Complex Hessian in z of the branch average, from t-space jets.

    L_z[p, q] = mean_b L_t[p, q] / (D_p conj(D_q)) with D_i = sigma_i t_i^{sigma_i - 1}.
    """
    pts = branch_points(z, w)
    acc = np.zeros((len(z), 2, 2), dtype=complex)
    vals = np.zeros(len(z))
    for t in pts:
        jet = jet_fn(t)
        D = np.stack([w.sigma1 * t[:, 0] ** (w.sigma1 - 1), w.sigma2 * t[:, 1] ** (w.sigma2 - 1)], axis=1)
        inv = 1.0 / D
        acc += jet.L * (inv[:, :, None] * np.conj(inv)[:, None, :])
        vals += jet.val
    return vals / len(pts), acc / len(pts)


def deck_defect(F, t, w):
    """max |F(R t) - F(t)| over all rotations R, with the worst rotation."""
    base = F(t)
    worst, arg = 0.0, None
    for l in range(w.sigma1):
        for m in range(w.sigma2):
            if (l, m) == (0, 0):
                continue
            v = F(apply_diag(t, rotation_factors(l, m, w)))
            err = float(np.max(np.abs(v - base) / (1 + np.abs(base))))
            if err > worst:
                worst, arg = err, (l, m)
    return worst, arg
