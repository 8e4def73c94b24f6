"""Command-line front end.

Exit status: 0 when every check passes, 1 when a mathematical verdict
fails, 2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time

import numpy as np

from . import __version__
from ._backend import BACKEND
from .agw import (
    DiagramSpec,
    build_construction_1,
    build_construction_2,
    certify_base_mode,
    certify_fiber_mode,
    construction_2_fiber_diagram,
)
from .errors import (
    DegreeOutOfRange,
    GF2to1Error,
    IndexOutOfRange,
    InvalidParams,
    NoClosedForm,
    ParseError,
    ReducibleModulus,
)
from .families import (
    FamilyParams,
    construct_family,
    closed_form_involution,
    enumerate_family,
    odd_field_involution,
    odd_field_map,
    resolve_row6_offset,
    resultant_identity_check,
    run_sweep,
    sample_family,
    validate_family,
)
from .field import create_context, fmt_elem, is_irreducible, parse_elem, set_modulus_override
from .mapping import (
    DomainSet,
    MappingSpec,
    PairingTable,
    brute_force_derivers,
    count_derivers,
    derive_involution,
    derivers_formula,
    preimage_profile,
    two_to_one_verdict,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FULL_TABLE_MAX_DEGREE = 8


class UsageError(Exception):
    pass


class Reporter:
    """Collects one report (or a stream of records) and renders it."""

    def __init__(self, args, command: str):
        self.args = args
        self.command = command
        self.timings: dict[str, float] = {}
        self._t = time.perf_counter()

    def phase(self, name: str):
        now = time.perf_counter()
        self.timings[name] = round(now - self._t, 6)
        self._t = now

    def header(self, ctx=None) -> dict:
        out = {"command": self.command, "version": __version__}
        if ctx is not None:
            out["field"] = {"n": ctx.n, "modulus": fmt_elem(ctx.modulus)}
        return out

    def emit(self, report: dict):
        if self.args.timings:
            report["timings"] = self.timings
        if self.args.csv:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["key", "value"])
            for k, v in _flatten(report):
                w.writerow([k, v])
            sys.stdout.write(buf.getvalue())
        else:
            sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")


def _flatten(d, prefix=""):
    if isinstance(d, dict):
        for k in sorted(d):
            yield from _flatten(d[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(d, list) and not all(isinstance(x, (str, int, float, bool)) or x is None for x in d):
        for i, x in enumerate(d):
            yield from _flatten(x, f"{prefix}[{i}]")
    else:
        yield prefix, json.dumps(d) if isinstance(d, list) else d


def _load_json(text: str):
    """Inline JSON, or @path to read it from a file."""
    try:
        if text.startswith("@"):
            with open(text[1:], encoding="utf-8") as fh:
                return json.load(fh)
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read JSON: {exc}") from None


def _ctx(args, n=None):
    n = args.n if n is None else n
    if n is None:
        raise UsageError("--n is required")
    return create_context(n, args.modulus)


def parse_domain(text: str | None, args):
    """JSON, or the shorthands full[:n=N], trace:m=M,gamma=0x.., mu:d=D[,star], list:0x..,0x.."""
    if text is None:
        return _ctx(args), None
    text = text.strip()
    if text.startswith("{"):
        ctx = _ctx(args)
        return ctx, DomainSet.from_json(ctx, _load_json(text))
    kind, _, rest = text.partition(":")
    opts: dict[str, str] = {}
    items = [s for s in rest.split(",") if s] if rest else []
    if kind == "list":
        ctx = _ctx(args)
        return ctx, DomainSet.explicit(ctx, [parse_elem(s, ctx) for s in items])
    for s in items:
        key, eq, val = s.partition("=")
        opts[key] = val if eq else "1"
    try:
        n = int(opts.pop("n")) if "n" in opts else None
        ctx = _ctx(args, n)
        if kind == "full" and not opts:
            return ctx, DomainSet.full(ctx)
        if kind == "trace":
            return ctx, DomainSet.trace_slice(ctx, int(opts["m"]), parse_elem(opts["gamma"], ctx))
        if kind == "mu":
            return ctx, DomainSet.mu(ctx, int(opts["d"]), "star" in opts)
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad domain {text!r}: {exc}") from None
    raise ParseError(f"unknown domain {text!r}")


def _family(args) -> FamilyParams:
    return FamilyParams.from_json(_load_json(args.family), getattr(args, "allow_zero_c", False))


def _table_digest(tbl: PairingTable) -> str:
    return hashlib.sha256(tbl.partner.astype("<u4").tobytes()).hexdigest()


# -- subcommands ------------------------------------------------------------------


def cmd_field_info(args, rep: Reporter) -> int:
    ctx = _ctx(args)
    subfields = [d for d in range(1, ctx.n + 1) if ctx.n % d == 0]
    report = rep.header(ctx)
    report.update(order=ctx.order, irreducible=is_irreducible(ctx.modulus), generator=fmt_elem(ctx.generator),
                  subfields=subfields, backend=BACKEND)
    rep.phase("total")
    rep.emit(report)
    return EXIT_OK


def cmd_check(args, rep: Reporter) -> int:
    if args.family:
        p = _family(args)
        spec = construct_family(p)
        ctx = spec.ctx
        dom = DomainSet.full(ctx)
        inputs = {"family": p.to_json()}
    elif args.map:
        ctx, dom = parse_domain(args.domain, args)
        spec = MappingSpec.from_json(ctx, _load_json(args.map))
        dom = dom or DomainSet.full(ctx)
        inputs = {"map": spec.to_json(), "domain": dom.to_json() if dom.kind != "list" else {"kind": "list"}}
    else:
        raise UsageError("check needs --map or --family")
    prof = preimage_profile(spec, dom)
    rep.phase("profile")
    verdict = two_to_one_verdict(prof)
    report = rep.header(ctx)
    report.update(inputs=inputs, profile=prof.to_json(), verdict=verdict)
    if verdict and prof.domain_size % 2 == 0:
        tbl = derive_involution(spec, dom)
        report["involution"] = {"pairs": len(tbl) // 2, "fixed_points": len(tbl.fixed_points()),
                                "is_involution": tbl.is_involution(), "sha256": _table_digest(tbl)}
        rep.phase("involution")
    rep.emit(report)
    return EXIT_OK if verdict else EXIT_FAIL


TABLE1_COLUMNS = ["No", "k", "m", "s", "conditions", "verdict", "involution status"]


def cmd_sweep(args, rep: Reporter) -> int:
    row = args.row if args.row.startswith("odd-") else int(args.row)
    if args.sample:
        params = sample_family(row, args.m, args.sample, args.seed, args.i)
    else:
        params = enumerate_family(row, args.m, args.i, args.allow_zero_c)
    note = None
    if not params:
        probe = FamilyParams(row, args.m, args.i, 0, 1, args.allow_zero_c)
        note = validate_family(probe).violations or ["no admissible (delta, c)"]
    records = run_sweep(params, jobs=args.jobs, involution=not args.no_involution)
    rep.phase("sweep")
    passed = sum(1 for r in records if r["verdict"] and r.get("involution_ok", True))
    summary = {"summary": True, "row": row, "m": args.m, "i": args.i, "instances": len(records),
               "passed": passed, "failed": len(records) - passed}
    if note:
        summary["note"] = note
    if args.timings:
        summary["timings"] = rep.timings
    if args.csv:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(TABLE1_COLUMNS + ["delta", "c"])
        for r in records:
            status = "n/a" if "involution" not in r else ("ok" if r["involution_ok"] else "FAIL")
            w.writerow([row, r["k"], args.m, r["s"], "ok", r["verdict"], status,
                        r["params"].get("delta", ""), r["params"].get("c", "")])
    else:
        for r in records:
            sys.stdout.write(json.dumps(r, sort_keys=True) + "\n")
        sys.stdout.write(json.dumps(summary, sort_keys=True) + "\n")
    return EXIT_OK if summary["failed"] == 0 else EXIT_FAIL


def cmd_involution(args, rep: Reporter) -> int:
    table = None
    closed = None
    note = None
    if args.odd:
        f = odd_field_map(args.odd, args.m, repaired=args.repaired)
        closed = odd_field_involution(args.odd, args.m)
        ctx = f.ctx
        inputs = {"odd": args.odd, "m": args.m, "repaired": args.repaired}
        if args.odd == 2 and not args.repaired:
            note = "the listed item 2 collapses to x^2 + x; pass --repaired for the reconstructed map"
    elif args.family:
        p = _family(args)
        f = construct_family(p)
        ctx = f.ctx
        inputs = {"family": p.to_json()}
        if args.mode in ("closed", "both"):
            try:
                closed = closed_form_involution(p, args.row6_offset)
            except NoClosedForm as exc:
                note = str(exc)
                if table is None:
                    table = derive_involution(f)
    elif args.map:
        ctx, dom = parse_domain(args.domain, args)
        f = MappingSpec.from_json(ctx, _load_json(args.map))
        inputs = {"map": f.to_json()}
        if dom is not None and not dom.is_full():
            table = derive_involution(f, dom)
    else:
        raise UsageError("involution needs --family, --odd or --map")
    report = rep.header(ctx)
    report["inputs"] = inputs
    ok = True
    if table is None and (args.mode in ("table", "both") or closed is None):
        table = derive_involution(f)
    rep.phase("derive")
    if table is not None:
        report["table"] = {"pairs": len(table) // 2, "is_involution": table.is_involution(),
                           "fixed_points": len(table.fixed_points()), "sha256": _table_digest(table)}
        if ctx.n <= FULL_TABLE_MAX_DEGREE:
            report["table"]["pairs_list"] = table.to_json()
        ok &= report["table"]["is_involution"] and not report["table"]["fixed_points"]
    if closed is not None:
        chk = closed.check(f)
        entry = {"form": closed.to_json(), "checks": chk}
        if table is not None and len(table) == ctx.order:
            entry["matches_table"] = bool(np.array_equal(closed.eval_all(), table.partner))
            ok &= entry["matches_table"]
        ok &= all(chk.values())
        report["closed_form"] = entry
    if note:
        report["note"] = note
    report["ok"] = bool(ok)
    rep.phase("checks")
    rep.emit(report)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_count(args, rep: Reporter) -> int:
    ctx = _ctx(args)
    if args.involution:
        tbl = PairingTable.from_json(ctx, _load_json(args.involution))
    else:
        xs = ctx.elements()
        tbl = PairingTable(ctx, xs, xs ^ np.uint32(1), "x+1")
    count = count_derivers(tbl)
    rep.phase("count")
    report = rep.header(ctx)
    report.update(involution=tbl.to_json(), count=count, formula=derivers_formula(ctx.n))
    ok = count == report["formula"]
    if args.oracle:
        report["oracle"] = brute_force_derivers(tbl)
        ok &= report["oracle"] == count
        rep.phase("oracle")
    report["ok"] = ok
    rep.emit(report)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_resultant(args, rep: Reporter) -> int:
    r = resultant_identity_check(args.which, args.m, samples=args.samples, seed=args.seed,
                                 exhaustive=args.exhaustive or None)
    rep.phase("resultant")
    report = rep.header()
    report.update(r.to_json())
    report["ok"] = r.mismatches == 0
    rep.emit(report)
    return EXIT_OK if report["ok"] else EXIT_FAIL


def cmd_agw(args, rep: Reporter) -> int:
    report = rep.header()
    if args.diagram:
        d = DiagramSpec.from_json(_load_json(args.diagram), None if args.n is None else _ctx(args))
    elif args.construction:
        params = _load_json(args.params) if args.params else {}
        try:
            if args.construction == 1:
                f, cr = build_construction_1(int(params["n"]), int(params["m"]), parse_elem(params["a"]), strict=False)
            elif args.construction == 2:
                f, cr = build_construction_2(int(params["k"]), int(params["n"]), parse_elem(params["b"]),
                                             parse_elem(params["a"]), strict=False)
            else:
                raise UsageError("--construction takes 1 or 2")
        except KeyError as exc:
            raise ParseError(f"construction parameters are missing {exc}") from None
        report["construction"] = cr.to_json()
        if cr.diagram is None:
            rep.emit(report)
            return EXIT_FAIL
        d = cr.diagram
        if args.mode == "fiber" and args.construction == 2:
            d = construction_2_fiber_diagram(f, int(params["k"]), d)
    else:
        raise UsageError("agw needs --diagram or --construction")
    cert = (certify_base_mode if args.mode == "base" else certify_fiber_mode)(d)
    rep.phase("certify")
    report["field"] = {"n": d.ctx.n, "modulus": fmt_elem(d.ctx.modulus)}
    report["certificate"] = cert.to_json()
    if args.dump_diagram:
        report["diagram"] = d.to_json()
    rep.emit(report)
    return EXIT_OK if cert.certified and cert.direct else EXIT_FAIL


def cmd_row6(args, rep: Reporter) -> int:
    res = resolve_row6_offset(tuple(args.ms))
    rep.phase("resolve")
    report = rep.header()
    report.update(res)
    rep.emit(report)
    return EXIT_OK if res["winner"] else EXIT_FAIL


# -- argument parsing ---------------------------------------------------------------


def _hex(s: str) -> int:
    try:
        return parse_elem(s)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _global_flags(p: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--n", type=int, default=d(None), help="field degree")
    p.add_argument("--modulus", type=_hex, default=d(None), help="override the tabulated modulus (hex)")
    p.add_argument("--jobs", type=int, default=d(1), help="worker processes for sweeps")
    p.add_argument("--seed", type=int, default=d(0), help="seed for sampling commands")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", default=d(False), help="JSON output (default)")
    fmt.add_argument("--csv", action="store_true", default=d(False), help="CSV output")
    p.add_argument("--timings", action="store_true", default=d(False), help="include wall-clock timings")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gf2to1", description="2-to-1 maps and fixed-point-free involutions over GF(2^n)")
    parser.add_argument("--version", action="version", version=__version__)
    _global_flags(parser, suppress=False)
    common = _Parser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("field-info", parents=[common], help="describe GF(2^n)")
    p.set_defaults(func=cmd_field_info)

    p = sub.add_parser("check", parents=[common], help="2-to-1 verdict for a map or family instance")
    p.add_argument("--map", help="MappingSpec JSON (or @file)")
    p.add_argument("--domain", help="domain JSON or shorthand (full, trace:m=,gamma=, mu:d=[,star], list:...)")
    p.add_argument("--family", help='family parameters, e.g. {"row":3,"m":2,"delta":"0x8","c":"0x1"}')
    p.add_argument("--allow-zero-c", action="store_true", help="admit c = 0 in row 6")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", parents=[common], help="verify every admissible instance of a row")
    p.add_argument("--row", required=True, help="1..8 or odd-1..odd-5")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--i", type=int)
    p.add_argument("--sample", type=int, default=0, help="draw this many random instances instead")
    p.add_argument("--allow-zero-c", action="store_true", help="admit c = 0 in row 6")
    p.add_argument("--no-involution", action="store_true", help="skip involution checks")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("involution", parents=[common], help="closed-form and table-derived involutions")
    p.add_argument("--family")
    p.add_argument("--odd", type=int, help="odd-degree catalogue index 1..5")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--repaired", "--repair", action="store_true", help="use the reconstructed item-2 map")
    p.add_argument("--map")
    p.add_argument("--domain")
    p.add_argument("--mode", choices=["closed", "table", "both"], default="both")
    p.add_argument("--row6-offset", choices=["proof", "printed"], default="proof")
    p.add_argument("--allow-zero-c", action="store_true")
    p.set_defaults(func=cmd_involution)

    p = sub.add_parser("count", parents=[common], help="count 2-to-1 maps deriving an involution (n <= 3)")
    p.add_argument("--involution", help="pairs JSON [[a, b], ...]; default x -> x+1")
    p.add_argument("--oracle", action="store_true", help="also scan all functions (n = 2)")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("resultant", parents=[common], help="numeric check of a resultant factorization")
    p.add_argument("--which", choices=["eq19", "eq25"], required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--exhaustive", action="store_true")
    p.set_defaults(func=cmd_resultant)

    p = sub.add_parser("agw", parents=[common], help="certify a commutative square")
    p.add_argument("--diagram", help="DiagramSpec JSON (or @file)")
    p.add_argument("--construction", type=int, help="build construction 1 or 2 from --params")
    p.add_argument("--params", help='e.g. {"n":6,"m":2,"a":"0x3a"} or {"k":2,"n":3,"a":"0x1","b":"0x0"}')
    p.add_argument("--mode", choices=["base", "fiber"], default="base")
    p.add_argument("--dump-diagram", action="store_true")
    p.set_defaults(func=cmd_agw)

    p = sub.add_parser("row6", parents=[common], help="decide between the two row-6 offsets")
    p.add_argument("--ms", type=int, nargs="+", default=[1, 2, 3])
    p.set_defaults(func=cmd_row6)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.modulus is not None:
            if args.n is None:
                raise UsageError("--modulus needs --n")
            set_modulus_override(args.n, args.modulus)
        return args.func(args, Reporter(args, args.command))
    except (UsageError, ParseError, InvalidParams, IndexOutOfRange, DegreeOutOfRange, ReducibleModulus) as exc:
        sys.stderr.write(f"gf2to1: error: {exc}\n")
        return EXIT_USAGE
    except GF2to1Error as exc:
        sys.stderr.write(f"gf2to1: {type(exc).__name__}: {exc}\n")
        return EXIT_FAIL
    finally:
        if args.modulus is not None and args.n is not None:
            set_modulus_override(args.n, None)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
