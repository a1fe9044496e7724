"""Independent sympy oracle for the derived constants frozen into the tests.

Works in real coordinates (x1, y1, x2, y2) and shares no code with bumpforge.
Run ``python tools/oracles.py`` to regenerate; output is JSON.
"""

import json

import sympy as sp

x1, y1, x2, y2 = sp.symbols("x1 y1 x2 y2", real=True)
X, Y = sp.symbols("X Y", real=True)
r, th = sp.symbols("r theta", positive=True)
z1, z2 = x1 + sp.I * y1, x2 + sp.I * y2
a1 = x1 ** 2 + y1 ** 2
a2 = x2 ** 2 + y2 ** 2


def ddbar(f, x, y):
    return sp.simplify((sp.diff(f, x, 2) + sp.diff(f, y, 2)) / 4)


def mixed(f, xa, ya, xb, yb):
    # d^2 f / dz_a dzbar_b
    return sp.expand((sp.diff(f, xa, xb) + sp.diff(f, ya, yb) + sp.I * (sp.diff(f, xa, yb) - sp.diff(f, ya, xb))) / 4)


def hessian_det(f):
    h11 = ddbar(f, x1, y1)
    h22 = ddbar(f, x2, y2)
    h12 = mixed(f, x1, y1, x2, y2)
    return sp.factor(sp.expand(h11 * h22 - h12 * sp.conjugate(h12)))


def order_in(expr, t):
    """Lowest total degree in (tx, ty) of a polynomial."""
    p = sp.Poly(sp.expand(expr), *t)
    return min(sum(m) for m in p.monoms())


def main():
    out = {}
    # Hessian oracle
    f = a1 ** 4 + a1 ** 2 * a2
    out["det_hessian_z1^8+z1^4z2^2"] = str(hessian_det(f))
    out["h11_z1^8+z1^4z2^2"] = str(sp.factor(ddbar(f, x1, y1)))
    out["h22_z1^8+z1^4z2^2"] = str(sp.factor(ddbar(f, x2, y2)))

    # FS unit: Laplacian on the circle
    s = X + sp.I * Y
    u = (X ** 2 + Y ** 2) ** 3 + sp.Rational(9, 8) * (X ** 2 + Y ** 2) ** 2 * sp.re(sp.expand(s ** 2))
    lap = sp.expand(sp.diff(u, X, 2) + sp.diff(u, Y, 2))
    polar = sp.simplify(sp.expand_trig(lap.subs({X: r * sp.cos(th), Y: r * sp.sin(th)})))
    out["fs_unit_laplacian_polar"] = str(sp.simplify(polar / r ** 4))
    on_circle = sp.simplify(polar.subs(r, 1))
    zeros = sp.solveset(sp.Eq(on_circle, 0), th, sp.Interval.Ropen(0, 2 * sp.pi))
    out["fs_unit_zeros"] = [str(z) for z in sorted(zeros, key=lambda v: float(v))]
    out["fs_unit_laplacian_min"] = str(sp.minimum(on_circle, th, sp.Interval(0, 2 * sp.pi)))

    # model domain along the normal line (t, c) to {z1 = 0}
    tx, ty = sp.symbols("tx ty", real=True)
    c = sp.Rational(3, 2) + sp.I / 3
    t = tx + sp.I * ty
    at = tx ** 2 + ty ** 2
    ac = sp.Abs(c) ** 2
    re_t6 = sp.re(sp.expand(t ** 6))
    P_line = ac * at ** 3 + at ** 4 + sp.Rational(15, 7) * at * re_t6
    out["model_mu"] = order_in(P_line, (tx, ty))
    # the curve z1 = 0: P vanishes there, and the first non-harmonic block of P + Q on it
    # is the lowest-degree term of the restriction
    P_full = a1 ** 3 * a2 + a1 ** 4 + sp.Rational(15, 7) * a1 * sp.re(sp.expand(z1 ** 6)) + a2 ** 5
    on_line = sp.expand(P_full.subs({x1: 0, y1: 0}))
    out["model_P_on_line_z1_0"] = str(sp.expand((P_full - a2 ** 5).subs({x1: 0, y1: 0})))
    out["model_twoM"] = order_in(on_line, (x2, y2))
    # weighted fixture, normal line to {t2 = 0} at (c, 0) in the pullback frame (t1 -> t1^2)
    Pi_line = at ** 4 + at ** 2 * sp.Abs(c) ** 4
    out["weighted_mu"] = order_in(Pi_line, (tx, ty))
    b1 = (x1 ** 2 + y1 ** 2) ** 2  # |t1|^2 under t1 -> t1^2
    weighted_full = a2 ** 4 + a2 ** 2 * b1 + b1 ** 3
    out["weighted_twoM"] = order_in(sp.expand(weighted_full.subs({x2: 0, y2: 0})), (x1, y1))

    # line profile u = |s|^10: Laplacian 100 |s|^8, constant profile min(1, 100 / (8 * 25))
    u10 = (X ** 2 + Y ** 2) ** 5
    lap10 = sp.expand(sp.diff(u10, X, 2) + sp.diff(u10, Y, 2))
    L10 = sp.simplify(lap10.subs({X: 1, Y: 0}))
    out["model_u_laplacian_on_circle"] = str(L10)
    h = sp.Min(1, L10 / (8 * 5 ** 2))
    out["model_h_constant"] = str(h)
    # cone bump: lowest block |ell|^6 |s|^2 = U(ell^3 s) with U = |x|^2, gamma = min Lap U / 4
    U = X ** 2 + Y ** 2
    gamma = sp.simplify(sp.diff(U, X, 2) + sp.diff(U, Y, 2)) / 4
    m = 1
    coef = gamma / (2 * m ** 2)
    out["model_cone_gamma"] = str(gamma)
    out["model_cone_coefficient"] = str(coef)
    # on the wedge core rho - G = delta (cone H + h u) >= delta * min(coef, h) * (|z1|^6|z2|^2 + |z2|^10)
    out["model_wedge_ratio_over_delta"] = str(sp.Min(coef, h))
    return out


if __name__ == "__main__":
    print(json.dumps(main(), indent=1))
