"""Command line front end: analyze, bump, verify, slice.

Exit codes: 0 success, 1 not applicable (or no certificate could be built),
2 verification failure, 3 parse or schema error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .errors import BumpforgeError, NotApplicable, ParseError, SchemaError, SliceOutsideBall
from .exceptional import analyze
from .parser import load_domain_document
from .pipeline import BumpCertificate, ModelDomain, ZSpaceG, bump, validate_domain
from .polyalg import WeightSignature, infer_weights
from .verifier import load_certificate, verify_certificate

EXIT_OK, EXIT_NOT_APPLICABLE, EXIT_FAIL, EXIT_INPUT = 0, 1, 2, 3

# ------------------------------------------------------------ slices


def _vector(v):
    v = list(v)
    if len(v) == 4:
        return np.array([complex(v[0], v[1]), complex(v[2], v[3])])
    return np.array([complex(x) for x in v])


def _evaluator(obj):
    """(R, columns) for a certificate or a bare domain."""
    if isinstance(obj, ModelDomain):
        full = obj.full.compile()
        return 1.0, {"rho": lambda z: full(z[:, 0], z[:, 1])}
    cert = obj if isinstance(obj, BumpCertificate) else load_certificate(obj)
    zg = ZSpaceG(cert.assembled, cert.domain, cert.f)
    return cert.R, {"rho": zg.rho, "G": zg.value, "rho_minus_G": zg.gap}


def export_slice(obj, spec, resolution=200):
    """Table of (parameters, rho, G, rho - G) along a ray or on a real plane through 0.

    spec: {"kind": "ray", "direction": [...], "t_max": T} or
          {"kind": "plane", "u": [...], "v": [...], "extent": E}.
    Directions are [z1, z2] complex pairs or [re1, im1, re2, im2].
    """
    R, cols = _evaluator(obj)
    kind = spec.get("kind", "ray")
    if kind == "ray":
        d = _vector(spec["direction"])
        t_max = float(spec.get("t_max", R / max(np.linalg.norm(d), 1e-300)))
        if t_max <= 0 or np.linalg.norm(d) == 0:
            raise SliceOutsideBall("slice has zero length")
        params = np.linspace(t_max / resolution, t_max, resolution)
        z = params[:, None] * d[None, :]
        names = ["t"]
        pcols = [params]
    elif kind == "plane":
        u, v = _vector(spec["u"]), _vector(spec["v"])
        e = float(spec.get("extent", 0))
        if e <= 0 or np.linalg.norm(u) == 0 or np.linalg.norm(v) == 0:
            raise SliceOutsideBall("slice has zero extent")
        g = np.linspace(-e, e, resolution)
        a, b = np.meshgrid(g, g, indexing="ij")
        a, b = a.ravel(), b.ravel()
        z = a[:, None] * u[None, :] + b[:, None] * v[None, :]
        names = ["a", "b"]
        pcols = [a, b]
    else:
        raise SchemaError(f"unknown slice kind {kind!r}")
    norms = np.linalg.norm(z, axis=1)
    if np.any(norms > R * (1 + 1e-12)):
        i = int(np.argmax(norms))
        raise SliceOutsideBall(f"slice leaves B(0, {R})", witness=[float(norms[i])])
    nonzero = norms > 0
    z = z[nonzero]
    pcols = [p[nonzero] for p in pcols]
    table = {n: p for n, p in zip(names, pcols)}
    for name, fn in cols.items():
        table[name] = np.asarray(fn(z), dtype=float)
    return [dict(zip(table, map(float, row))) for row in zip(*table.values())]


def rows_to_csv(rows):
    buf = io.StringIO()
    if rows:
        wr = csv.DictWriter(buf, fieldnames=list(rows[0]))
        wr.writeheader()
        for r in rows:
            wr.writerow({k: repr(v) for k, v in r.items()})
    return buf.getvalue()


# ------------------------------------------------------------ commands


def _weights(args, doc, poly):
    if args.weights:
        try:
            return WeightSignature.parse(args.weights)
        except ValueError as e:
            raise SchemaError(f"bad weights {args.weights!r}") from e
    if doc.weights is not None:
        return doc.weights
    if args.infer_weights:
        w = infer_weights(poly)
        return w[0] if isinstance(w, tuple) else w
    raise SchemaError("weights are required (--weights m1,m2 or --infer-weights)")


def _domain(args):
    doc = load_domain_document(args.domain)
    poly = doc.polynomial()
    w = _weights(args, doc, poly)
    return validate_domain(poly, w, Q=doc.q_polynomial(), name=doc.name, source=args.domain)


def _emit(args, payload, text):
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def cmd_analyze(args):
    dom = _domain(args)
    curves, cls = analyze(dom.P, dom.Q, dom.weights, seed=args.seed)
    payload = {"classification": cls.to_json(), "curves": [c.to_json() for c in curves],
               "weights": dom.weights.to_list()}
    lines = [f"classification: {cls.verdict}"]
    for c in curves:
        xi = "inf" if c.xi.is_inf else c.xi.to_json().get("exact") or c.xi.value
        lines.append(f"curve xi={xi}: mu={c.mu} 2M={c.twoM} lines={len(c.lines)} (**)={c.star_verdict}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if cls.verdict in ("ALMOST_H_EXTENDIBLE", "H_EXTENDIBLE") else EXIT_NOT_APPLICABLE


def cmd_bump(args):
    dom = _domain(args)
    cert = bump(dom, seed=args.seed)
    d = cert.to_json()
    if args.out:
        Path(args.out).write_text(json.dumps(d, indent=1))
    summary = {"R": cert.R, "K": cert.K, "curves": len(cert.curves), "delta": cert.assembled.delta,
               "margin": cert.constants["margin"], "out": args.out}
    _emit(args, summary if args.out else d,
          f"certificate: R={cert.R:.6g} K={cert.K:g} curves={len(cert.curves)} margin={cert.constants['margin']:.3g}"
          + (f" -> {args.out}" if args.out else ""))
    if not args.out and not args.json:
        print(json.dumps(d))
    return EXIT_OK


def cmd_verify(args):
    raw = Path(args.cert).read_text()
    rep = verify_certificate(raw, samples=args.samples, seed=args.seed, tol=args.tol)
    lines = [f"{c.index} {c.name}: {'PASS' if c.passed else 'FAIL'} margin={c.margin}" for c in rep.checks]
    lines.append(f"verdict: {rep.verdict} ({rep.seconds:.1f}s)")
    _emit(args, rep.to_json(), "\n".join(lines))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_slice(args):
    raw = Path(args.cert).read_text()
    cert = load_certificate(raw)
    if args.plane:
        u, v = args.plane.split(";")
        spec = {"kind": "plane", "u": _parse_vec(u), "v": _parse_vec(v), "extent": args.extent}
    else:
        spec = {"kind": "ray", "direction": _parse_vec(args.ray)}
        if args.t_max is not None:
            spec["t_max"] = args.t_max
    rows = export_slice(cert, spec, args.resolution)
    text = json.dumps(rows) if (args.format == "json" or args.json) else rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return EXIT_OK


def _parse_vec(s):
    try:
        return [complex(x.strip().replace("i", "j")) for x in s.split(",")]
    except ValueError as e:
        raise ParseError(f"bad vector {s!r}") from e


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--samples", type=int, default=100000)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    dom = argparse.ArgumentParser(add_help=False)
    dom.add_argument("domain", help="expression, text file, or JSON domain document")
    dom.add_argument("--weights", help="m1,m2")
    dom.add_argument("--infer-weights", action="store_true")

    p = argparse.ArgumentParser(prog="bumpforge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common, dom], help="exceptional curves and classification")
    b = sub.add_parser("bump", parents=[common, dom], help="build a certificate")
    b.add_argument("--out")
    v = sub.add_parser("verify", parents=[common], help="re-verify a certificate")
    v.add_argument("cert")
    s = sub.add_parser("slice", parents=[common], help="export rho, G along a ray or plane")
    s.add_argument("cert")
    s.add_argument("--ray", default="1,1", help="direction z1,z2 (complex literals allowed)")
    s.add_argument("--t-max", type=float)
    s.add_argument("--plane", help="u1,u2;v1,v2")
    s.add_argument("--extent", type=float, default=0.0)
    s.add_argument("--resolution", type=int, default=200)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--out")
    return p


COMMANDS = {"analyze": cmd_analyze, "bump": cmd_bump, "verify": cmd_verify, "slice": cmd_slice}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ParseError, SchemaError, FileNotFoundError, json.JSONDecodeError) as e:
        _report_error(args, e)
        return EXIT_INPUT
    except NotApplicable as e:
        _report_error(args, e)
        return EXIT_NOT_APPLICABLE
    except SliceOutsideBall as e:
        _report_error(args, e)
        return EXIT_INPUT
    except BumpforgeError as e:
        _report_error(args, e)
        return EXIT_NOT_APPLICABLE


def _report_error(args, e):
    payload = e.to_dict() if isinstance(e, BumpforgeError) else {"error": type(e).__name__, "message": str(e)}
    if getattr(args, "json", False):
        print(json.dumps(payload))
    else:
        print(f"error: {payload['error']}: {payload['message']}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
