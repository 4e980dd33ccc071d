"""Command-line surface: geometry files, star products, check suites.

Geometry files are JSON:

    { "kind": "flat" | "darboux" | "cotangent" | "kaehler",
      "n": 1, "order": 9,
      "base_point": ["1/2", "1/3"],
      "metric": [["4/(1+q1^2+q2^2)^2", "0"], ...]   (cotangent)
      "potential": "z1*zb1"                          (kaehler)
      "gamma": {"111": "q1", ...}                    (darboux, 1-based) }

Reports go to stdout as an aligned table plus optional JSON (--json PATH).
Exit codes: 0 all checks pass, 1 check failure, 2 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction

from . import __version__
from .exprparse import ParseError, jet_of
from .jets import Chart, Jet, JetError
from .geometry import (GeometryError, ValidationFailure, build_darboux,
                       build_flat, build_kaehler, complex_chart,
                       lift_cotangent, phase_chart, validate_connection)
from .fedosov import FedosovError, solve_r, star
from .quantization import (QuantizationError, gq_kaehler,
                           kinetic_energy_observable, rho_extend)
from .suites import SUITES


class InputError(Exception):
    pass


def _rational(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {text!r}: {exc}") from None


def _fmt_rat(c):
    """CRat as 'p/q' or 'p/q+r/s*i'; deterministic and float-free."""
    return str(c)


def _jet_table(jet):
    out = {}
    for key in sorted(jet.coeffs):
        out[",".join(str(e) for e in key)] = _fmt_rat(jet.coeffs[key])
    return out


def load_geometry(path):
    """Parse and validate a geometry file into a ChartGeometry."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from None
    try:
        kind = doc["kind"]
        n = int(doc["n"])
        order = int(doc["order"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: missing or bad field: {exc}") from None
    base = tuple(_rational(b) for b in doc.get("base_point", ["0"] * n))
    if len(base) != n:
        raise InputError(f"{path}: base_point needs {n} entries")

    def elaborate(src, chart):
        try:
            return jet_of(src, chart, order)
        except (ParseError, JetError) as exc:
            raise InputError(f"{path}: in {src!r}: {exc}") from None

    try:
        if kind == "flat":
            return build_flat(n, order)
        if kind == "darboux":
            chart = phase_chart(n, base)
            gl = {}
            for key, src in doc.get("gamma", {}).items():
                if len(key) != 3 or not key.isdigit():
                    raise InputError(
                        f"{path}: gamma key {key!r} is not three 1-based "
                        "indices")
                idx = tuple(int(ch) - 1 for ch in key)
                if any(not 0 <= i < 2 * n for i in idx):
                    raise InputError(f"{path}: gamma index {key!r} out of "
                                     "range")
                gl[idx] = elaborate(src, chart)
            return build_darboux(n, gl, order, base)
        if kind == "cotangent":
            chart = Chart(tuple(f"q{i+1}" for i in range(n)), base)
            rows = doc["metric"]
            if len(rows) != n or any(len(r) != n for r in rows):
                raise InputError(f"{path}: metric must be {n}x{n}")
            metric = [[elaborate(src, chart) for src in row] for row in rows]
            return lift_cotangent(metric, order)
        if kind == "kaehler":
            chart = complex_chart(n, base)
            return build_kaehler(elaborate(doc["potential"], chart), order)
    except KeyError as exc:
        raise InputError(f"{path}: missing field {exc}") from None
    except ValidationFailure as exc:
        raise InputError(f"{path}: geometry fails validation:\n{exc}") \
            from None
    except (GeometryError, JetError) as exc:
        raise InputError(f"{path}: {exc}") from None
    raise InputError(f"{path}: unknown kind {kind!r}")


def _digest(path):
    try:
        with open(path, "rb") as fh:
            return hashlib.sha256(fh.read()).hexdigest()[:16]
    except OSError:
        return ""


class Report:
    """Ordered check verdicts plus coefficient dumps, JSON-serializable."""

    def __init__(self, command, geometry_digest=""):
        self.doc = {"command": command, "engine": f"fedquant {__version__}",
                    "geometry": geometry_digest, "checks": [],
                    "coefficients": {}}

    def add_check(self, name, passed, location=""):
        self.doc["checks"].append(
            {"name": name, "passed": bool(passed), "location": location})

    def add_coefficients(self, label, table):
        self.doc["coefficients"][label] = table

    @property
    def passed(self):
        return all(c["passed"] for c in self.doc["checks"])

    def table(self):
        lines = [self.doc["engine"] + "  " + self.doc["command"]]
        if self.doc["geometry"]:
            lines.append(f"geometry {self.doc['geometry']}")
        width = max((len(c["name"]) for c in self.doc["checks"]), default=0)
        for c in self.doc["checks"]:
            mark = "ok  " if c["passed"] else "FAIL"
            loc = f"  {c['location']}" if c["location"] else ""
            lines.append(f"  {mark} {c['name']:<{width}}{loc}")
        for label, tab in self.doc["coefficients"].items():
            lines.append(label)
            for key in tab:
                lines.append(f"  [{key}] {tab[key]}")
        return "\n".join(lines)

    def emit(self, args):
        if not args.quiet:
            print(self.table())
        if args.json:
            with open(args.json, "w") as fh:
                json.dump(self.doc, fh, indent=2, sort_keys=True)
                fh.write("\n")


def cmd_validate(args):
    geom = load_geometry(args.geometry)
    rep = Report(f"validate {args.geometry}", _digest(args.geometry))
    vrep = validate_connection(geom)
    for entry in vrep.checks:
        rep.add_check(entry.name, entry.passed, entry.detail)
    rep.emit(args)
    return 0 if vrep.passed else 1


def _star_series_dump(rep, series):
    for k in range(series.valid_hbar_order + 1):
        rep.add_coefficients(f"hbar^{k}", _jet_table(series.coefficient(k)))


def cmd_star(args):
    geom = load_geometry(args.geometry)
    n = args.order if args.order is not None else 2
    try:
        f = jet_of(args.f, geom.chart, geom.order)
        g = jet_of(args.g, geom.chart, geom.order)
    except (ParseError, JetError) as exc:
        raise InputError(str(exc)) from None
    try:
        state = solve_r(geom, n)
    except FedosovError as exc:
        raise InputError(str(exc)) from None
    series = star(f, g, state)
    rep = Report(f"star {args.geometry} f={args.f!r} g={args.g!r} N={n}",
                 _digest(args.geometry))
    rep.add_check("star series computed", True)
    _star_series_dump(rep, series)
    rep.emit(args)
    return 0


def cmd_check(args):
    fn = SUITES.get(args.suite)
    if fn is None:
        raise InputError(f"unknown suite {args.suite!r}; choose from "
                         + ", ".join(sorted(SUITES)))
    kwargs = {"seed": args.seed}
    if args.order is not None:
        kwargs["order"] = args.order
    if args.geometry:
        geom = load_geometry(args.geometry)
        if args.suite in ("associativity", "correspondence"):
            n_hbar = 3 if args.suite == "associativity" else 1
            kwargs["state"] = solve_r(geom, n_hbar)
            kwargs.pop("order", None)
        else:
            raise InputError(
                f"suite {args.suite!r} builds its own seeded geometries; "
                "omit the geometry file")
    result = fn(**kwargs)
    rep = Report(f"check {args.suite} seed={args.seed}",
                 _digest(args.geometry) if args.geometry else "")
    for entry in result.entries:
        rep.add_check(entry.name, entry.passed, entry.location)
    rep.emit(args)
    return 0 if rep.passed else 1


def cmd_quantize(args):
    geom = load_geometry(args.geometry)
    rep = Report(f"quantize {args.geometry} f={args.f!r}",
                 _digest(args.geometry))
    try:
        if args.f.strip() == "kinetic":
            if geom.kind not in ("flat", "cotangent"):
                raise InputError(
                    "the kinetic shorthand needs a cotangent geometry")
            f = kinetic_energy_observable(geom)
        else:
            f = jet_of(args.f, geom.chart, geom.order)
        if geom.kind == "kaehler":
            op = gq_kaehler(f, geom)
        else:
            n = args.order if args.order is not None else 3
            state = solve_r(geom, n)
            op = rho_extend(f, state)
    except (ParseError, JetError, FedosovError, QuantizationError) as exc:
        raise InputError(str(exc)) from None
    rep.add_check("operator computed", True)
    for idx in sorted(op.terms):
        label = "d^(" + ",".join(str(e) for e in idx) + ")"
        series = op.terms[idx]
        tab = {}
        for k in sorted(series.coeffs):
            tab[f"hbar^{k}"] = _jet_table(series.coeffs[k])
        rep.add_coefficients(label, tab)
    rep.emit(args)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="fedquant",
        description="exact star products and quantization operators on "
                    "symplectic charts")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p, geometry=True):
        if geometry:
            p.add_argument("geometry", help="geometry JSON file")
        p.add_argument("--order", type=int, default=None,
                       help="hbar order (star/quantize) or jet order "
                            "(check suites)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--json", metavar="PATH",
                       help="also write the report as JSON")
        p.add_argument("--quiet", action="store_true",
                       help="suppress the stdout table")

    p = sub.add_parser("validate", help="validate a geometry file")
    common(p)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("star", help="star product coefficient dump")
    common(p)
    p.add_argument("--f", required=True, help="first factor expression")
    p.add_argument("--g", required=True, help="second factor expression")
    p.set_defaults(fn=cmd_star)

    p = sub.add_parser("check", help="run a named check suite")
    p.add_argument("suite", help="one of: " + ", ".join(sorted(SUITES)))
    p.add_argument("--geometry", default=None,
                   help="optional geometry file (associativity and "
                        "correspondence only)")
    common(p, geometry=False)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("quantize", help="polarization operator dump")
    common(p)
    p.add_argument("--f", required=True,
                   help="observable expression, or 'kinetic'")
    p.set_defaults(fn=cmd_quantize)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
