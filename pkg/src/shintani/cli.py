"""Batch command line front end.

``shintani run jobs.toml`` reads a declarative job file (TOML or JSON, by
extension), validates it, runs the jobs in order and writes a JSON result
document.  Rationals go in and out as "p/q" strings.  Exit codes: 0 success,
2 malformed input, 3 computation error, 4 failed verification.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import jsonschema

from . import __version__
from .errors import SchemaError, ShintaniError
from .fixtures import FIXTURES, fixture_field, fixture_units
from .numfield import FieldLattice, TotallyRealField, UnitSystem, fundamental_unit_quadratic

__all__ = ["main", "run_file", "run_document", "load_jobfile", "JOB_SCHEMA", "fmt"]

EXIT_OK, EXIT_SCHEMA, EXIT_COMPUTE, EXIT_VERIFY = 0, 2, 3, 4

_RAT = {"oneOf": [{"type": "integer"},
                  {"type": "string", "pattern": r"^\s*-?[0-9]+\s*(/\s*[0-9]+\s*)?$"}]}
_VEC = {"type": "array", "items": _RAT, "minItems": 1}
_MAT = {"type": "array", "items": _VEC, "minItems": 1}
_INTVEC = {"type": "array", "items": {"type": "integer"}, "minItems": 1}
_INTMAT = {"type": "array", "items": _INTVEC, "minItems": 1}
_KS = {"oneOf": [{"type": "integer", "minimum": 0},
                 {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1}]}

_ZETA_PROPS = {
    "f": {"type": "string"},
    "c": {"type": "string"},
    "k": _KS,
    "classes": {"type": "array", "items": {"type": "string"}, "minItems": 1},
    "action": {"type": "array", "items": {"type": "integer", "minimum": 0}},
    "twist": _INTMAT,
}

JOB_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "field": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "fixture": {"enum": sorted(FIXTURES)},
                "minpoly": {"type": "array", "items": {"type": "integer"}, "minItems": 2},
                "units": _MAT,
            },
        },
        "ideals": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "additionalProperties": False,
                "properties": {"basis": _MAT, "principal": _VEC},
                "oneOf": [{"required": ["basis"]}, {"required": ["principal"]}],
            },
        },
        "jobs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind"],
                "properties": {"kind": {"enum": ["zeta", "smooth-zeta", "dedekind", "domain",
                                                 "sczech-verify", "verify"]},
                               "name": {"type": "string"}},
                "allOf": [
                    {"if": {"properties": {"kind": {"enum": ["zeta", "smooth-zeta"]}}},
                     "then": {"required": ["c", "k"], "properties": _ZETA_PROPS}},
                    {"if": {"properties": {"kind": {"const": "dedekind"}}},
                     "then": {"required": ["sigma", "e", "Q", "v"],
                              "properties": {"sigma": _INTMAT, "e": _INTVEC, "Q": _VEC,
                                             "v": _VEC,
                                             "ell": {"type": "integer", "minimum": 2}}}},
                    {"if": {"properties": {"kind": {"const": "domain"}}},
                     "then": {"properties": {"count": {"type": "integer", "minimum": 0},
                                             "points": _MAT}}},
                    {"if": {"properties": {"kind": {"const": "sczech-verify"}}},
                     "then": {"required": ["n"],
                              "properties": {"n": {"type": "integer", "minimum": 2,
                                                   "maximum": 5}}}},
                    {"if": {"properties": {"kind": {"const": "verify"}}},
                     "then": {"required": ["suite"], "properties": {"suite": {"type": "string"}}}},
                ],
            },
        },
    },
    "required": ["jobs"],
}

_NEEDS_FIELD = {"zeta", "smooth-zeta", "domain"}


def fmt(x) -> str:
    """Exact "p/q" string (plain integer when q = 1)."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else "%d/%d" % (x.numerator, x.denominator)


def parse_rational(s) -> Fraction:
    if isinstance(s, bool) or isinstance(s, float):
        raise SchemaError("rationals must be integers or 'p/q' strings, got %r" % (s,))
    try:
        return Fraction(str(s).replace(" ", ""))
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError("bad rational %r" % (s,)) from exc


def load_jobfile(path) -> dict:
    path = Path(path)
    text = path.read_bytes()
    suffix = path.suffix.lower()
    try:
        if suffix == ".toml":
            try:
                import tomllib
            except ModuleNotFoundError:  # Python < 3.11
                import tomli as tomllib
            return tomllib.loads(text.decode("utf-8"))
        if suffix == ".json":
            return json.loads(text)
    except (ValueError, UnicodeDecodeError) as exc:
        raise SchemaError("cannot parse %s: %s" % (path.name, exc)) from exc
    raise SchemaError("unknown job file extension %r (use .toml or .json)" % suffix)


class _Context:
    """Field, units and named ideals of a job file."""

    def __init__(self, doc: dict):
        self.field = None
        self.units = None
        self.ideals: dict = {}
        spec = doc.get("field")
        if spec is None:
            if any(j["kind"] in _NEEDS_FIELD for j in doc["jobs"]):
                raise SchemaError("a field is required for zeta and domain jobs")
            return
        if ("fixture" in spec) == ("minpoly" in spec):
            raise SchemaError("give exactly one of field.fixture and field.minpoly")
        if "fixture" in spec:
            self.field = fixture_field(spec["fixture"])
        else:
            self.field = TotallyRealField(spec["minpoly"])
        if "units" in spec:
            try:
                self.units = UnitSystem([self.field.elem([parse_rational(x) for x in u])
                                         for u in spec["units"]])
            except ValueError as exc:
                raise SchemaError("units: %s" % exc) from exc
        elif self.field.n == 2:
            self.units = UnitSystem([fundamental_unit_quadratic(self.field)])
        else:
            try:
                self.units = fixture_units(self.field)
            except KeyError as exc:
                raise SchemaError("field.units is required for this field") from exc
        self.ideals["O"] = FieldLattice.ring(self.field)
        for name, ispec in sorted(doc.get("ideals", {}).items()):
            if name == "O":
                raise SchemaError("the ideal name 'O' is reserved for the ring of integers")
            try:
                if "principal" in ispec:
                    x = self._elem(ispec["principal"])
                    if x.is_zero():
                        raise SchemaError("ideal %r: generator is zero" % name)
                    self.ideals[name] = FieldLattice.principal(x)
                else:
                    cols = [[parse_rational(c) for c in row] for row in ispec["basis"]]
                    if any(len(c) != self.field.n for c in cols):
                        raise SchemaError("ideal %r: basis vectors need %d coordinates"
                                          % (name, self.field.n))
                    self.ideals[name] = FieldLattice.from_matrix(self.field, cols)
            except ValueError as exc:
                raise SchemaError("ideal %r: %s" % (name, exc)) from exc
        for job in doc["jobs"]:
            if job["kind"] in ("zeta", "smooth-zeta"):
                for key in ("f", "c"):
                    if key in job:
                        self.ideal(job[key])
                for nm in job.get("classes", []):
                    self.ideal(nm)

    def _elem(self, coords):
        if len(coords) != self.field.n:
            raise SchemaError("element needs %d coordinates" % self.field.n)
        return self.field.elem([parse_rational(c) for c in coords])

    def ideal(self, name: str) -> FieldLattice:
        if name not in self.ideals:
            raise SchemaError("unknown ideal %r" % name)
        return self.ideals[name]


def validate(doc) -> _Context:
    try:
        jsonschema.validate(doc, JOB_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError("%s: %s" % (where, exc.message)) from exc
    return _Context(doc)


def _ks(job) -> list[int]:
    k = job["k"]
    return [k] if isinstance(k, int) else list(k)


def _zeta(ctx: _Context, job: dict, unsmooth: bool, parallel: bool) -> dict:
    from .eisenstein import ZetaJob, integrality_check, smoothed_zeta, unsmooth_solve

    f = ctx.ideal(job.get("f", "O"))
    c = ctx.ideal(job["c"])
    classes = [ctx.ideal(nm) for nm in job.get("classes", ["O"])]
    action = job.get("action", list(range(len(classes))))
    out = {"ell": None, "values": {}}
    for k in _ks(job):
        zj = ZetaJob(ctx.field, f, c, k, ctx.units, classes, action, job.get("twist"))
        out["ell"] = zj.ell
        if parallel and len(classes) > 1:
            with ThreadPoolExecutor() as pool:
                smoothed = list(pool.map(lambda a: smoothed_zeta(zj, a), classes))
        else:
            smoothed = [smoothed_zeta(zj, a) for a in classes]
        entry = {"smoothed": [fmt(s) for s in smoothed],
                 "integral": integrality_check(smoothed, zj.ell)["pass"]}
        if unsmooth:
            z = unsmooth_solve(smoothed, action, zj.ell, k)
            entry["zeta"] = [fmt(x) for x in z]
            entry["sum"] = fmt(sum(z))
        out["values"][str(k)] = entry
    return out


def _dedekind(job: dict) -> dict:
    from .conegeom import PerturbationVector
    from .eisenstein import dedekind_D, dedekind_D_ell

    Q = PerturbationVector([parse_rational(x) for x in job["Q"]])
    v = [parse_rational(x) for x in job["v"]]
    n = len(job["sigma"])
    if any(len(r) != n for r in job["sigma"]) or len(job["e"]) != n or len(Q) != n or len(v) != n:
        raise SchemaError("dedekind: sigma, e, Q and v must have matching sizes")
    if "ell" in job:
        return {"value": fmt(dedekind_D_ell(job["sigma"], job["e"], Q, v, job["ell"]))}
    return {"value": fmt(dedekind_D(job["sigma"], job["e"], Q, v))}


def _domain(ctx: _Context, job: dict, rng: random.Random) -> dict:
    from .conegeom import signed_fundamental_domain

    field = ctx.field
    dom = signed_fundamental_domain(ctx.units, field.power_basis())
    pts = [ctx._elem(p) for p in job.get("points", [])]
    for _ in range(job.get("count", 0 if "points" in job else 10)):
        while True:
            xi = field.elem([Fraction(rng.randint(-20, 20), rng.randint(1, 9))
                             for _ in range(field.n)])
            if xi.is_totally_positive():
                break
        pts.append(xi)
    for xi in pts:
        if not xi.is_totally_positive():
            raise SchemaError("domain: point %s is not totally positive" % (xi,))
    sums = [dom.orbit_sum(xi) for xi in pts]
    return {"points": len(sums), "orbit_sums": sums, "pass": all(s == 1 for s in sums)}


def _run_job(ctx, job, seed, parallel) -> tuple[dict, bool]:
    """(result, verification passed)."""
    kind = job["kind"]
    if kind in ("zeta", "smooth-zeta"):
        return _zeta(ctx, job, kind == "zeta", parallel), True
    if kind == "dedekind":
        return _dedekind(job), True
    if kind == "domain":
        res = _domain(ctx, job, random.Random("domain:%d" % seed))
        return res, res["pass"]
    if kind == "sczech-verify":
        from .sczech import verify_coboundary

        res = verify_coboundary(job["n"])
        return res, res["pass"]
    from .verify import SUITES, run_suite

    if job["suite"] != "all" and job["suite"] not in SUITES:
        raise SchemaError("unknown suite %r" % job["suite"])
    res = run_suite(job["suite"], seed)
    return res, res["pass"]


def run_document(doc, seed: int = 0, parallel: bool = False,
                 timings: bool = False) -> tuple[dict, int]:
    """Validate and run a parsed job document; (ResultDoc, exit code)."""
    result = {"version": __version__, "seed": seed, "jobs": []}
    try:
        ctx = validate(doc)
    except ShintaniError as exc:
        result["error"] = {"code": exc.code, "message": str(exc)}
        return result, EXIT_SCHEMA
    if ctx.field is not None:
        result["field"] = {"minpoly": list(ctx.field.minpoly),
                           "units": [[fmt(c) for c in u.coords] for u in ctx.units]}
    code = EXIT_OK
    total = {}
    for i, job in enumerate(doc["jobs"]):
        entry = {"name": job.get("name", "job%d" % i), "kind": job["kind"]}
        t0 = time.perf_counter()
        try:
            res, ok = _run_job(ctx, job, seed, parallel)
            entry["status"] = "ok" if ok else "failed"
            entry["result"] = res
            if not ok and code == EXIT_OK:
                code = EXIT_VERIFY
        except SchemaError as exc:
            entry["status"] = "error"
            entry["error"] = {"code": exc.code, "message": str(exc)}
            return dict(result, jobs=result["jobs"] + [entry]), EXIT_SCHEMA
        except (ShintaniError, ValueError, ArithmeticError) as exc:
            entry["status"] = "error"
            entry["error"] = {"code": getattr(exc, "code", "computation"), "message": str(exc)}
            code = EXIT_COMPUTE
        if timings:
            total[entry["name"]] = round(time.perf_counter() - t0, 3)
        result["jobs"].append(entry)
    if timings:
        result["timings"] = total
    return result, code


def run_file(path, seed: int = 0, parallel: bool = False,
             timings: bool = False) -> tuple[dict, int]:
    try:
        doc = load_jobfile(path)
    except (OSError, ShintaniError) as exc:
        return ({"version": __version__, "seed": seed, "jobs": [],
                 "error": {"code": getattr(exc, "code", "io"), "message": str(exc)}},
                EXIT_SCHEMA)
    return run_document(doc, seed, parallel, timings)


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=True) + "\n"


def _emit(doc: dict, out: str | None) -> None:
    text = dumps(doc)
    if out:
        Path(out).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shintani", description="Exact Shintani cone computations.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a TOML or JSON job file")
    r.add_argument("file")
    r.add_argument("--parallel", action="store_true", help="evaluate ray classes concurrently")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", help="write the result document here instead of stdout")
    r.add_argument("--timings", action="store_true",
                   help="include wall-clock timings (makes output non-reproducible)")
    v = sub.add_parser("verify", help="run a seeded property suite")
    v.add_argument("suite", help="exactmath, cones, domains, genfun, eisenstein, sczech or all")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        doc, code = run_file(args.file, args.seed, args.parallel, args.timings)
        _emit(doc, args.out)
        if "error" in doc:
            print("error: %s" % doc["error"]["message"], file=sys.stderr)
        for job in doc["jobs"]:
            if job["status"] == "error":
                print("%s: %s" % (job["name"], job["error"]["message"]), file=sys.stderr)
        return code
    from .verify import run_suite

    try:
        rep = run_suite(args.suite, args.seed)
    except KeyError as exc:
        print("error: %s" % exc.args[0], file=sys.stderr)
        return EXIT_SCHEMA
    _emit(rep, args.out)
    return EXIT_OK if rep["pass"] else EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
