"""``valdef`` command line.

Exit codes: 0 accept/pass, 1 reject/fail, 3 unknown, 2 bad input.  Verdicts are
one line on stdout (a word followed by a compact JSON summary); diagnostics go
to stderr.
"""

import argparse
import json
import sys
import time
from fractions import Fraction

from . import __version__
from .definable import (CHI_SCHEMA, ChiCertificate, REFUTATION_SCHEMA, Refutation, chi_decide, set_membership,
                        verify_certificate)
from .finite_field import parse_field_spec
from .formulas import (count_quantifiers, dumps, emit_chi, folkloric_formula, formula_to_json, atoms,
                       h10_reduce, parse_multipoly, parse_val_formula, pretty, translate_val_to_ring)
from .laurent import Region, in_region, parse_series
from .local_solver import DEFAULT_PRECISION, HenselCertificate, LocalPoly, is_lth_power, verify_hensel
from .suites import SUITES, default_l, run_suite

HENSEL_SCHEMA = "valdef.hensel-certificate/1"
REPORT_SCHEMA = "valdef.suite-report/1"

ACCEPT, REJECT, BAD, UNKNOWN = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _die(msg):
    raise UsageError(msg)


def _verdict(word, **summary):
    print(word, json.dumps(summary, sort_keys=True, ensure_ascii=False, separators=(",", ":")))


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _input_text(args):
    if args.in_file:
        with open(args.in_file, encoding="utf-8") as fh:
            return fh.read().strip()
    if args.input is None:
        _die("an input is required (--in or --in-file)")
    return args.input


def _config(args, field, **extra):
    out = {"field": str(field), "ram": args.ram, "seed": args.seed}
    out.update(extra)
    return out


# ---------------------------------------------------------------------------

def cmd_emit(args, field):
    style = args.style
    if style == "folkloric":
        l = args.l or default_l(field)
        formula = folkloric_formula(l, field)
    else:
        formula = emit_chi(field, style)
    text = pretty(formula)
    if args.out:
        extra = {"config": _config(args, field, style=style), "text": text}
        _write(args.out, dumps(formula_to_json(formula, extra)))
    print(text)
    print(f"quantified variables: {count_quantifiers(formula)}, atoms: {len(list(atoms(formula)))}",
          file=sys.stderr)
    return ACCEPT


def _region(text, field, ram):
    kind, _, rest = text.partition(":")
    n, _, center = rest.partition(":")
    try:
        r = Fraction(n)
    except ValueError:
        _die(f"bad region {text!r}; expected KIND:n[:center]")
    c = parse_series(center, field, ram) if center else None
    return Region(kind, r, c)


def cmd_decide(args, field):
    pred = args.predicate
    x = parse_series(_input_text(args), field, args.ram)
    summary = {"predicate": pred, "field": str(field), "x": str(x)}
    if pred == "chi":
        res = chi_decide(x, args.ram)
        if res:
            doc = res.certificate.to_dict()
            summary["y"] = doc["y"]
        else:
            doc = res.refutation.to_dict()
            summary["exponent"] = doc["exponent"]
        code = ACCEPT if res else REJECT
    elif pred == "folkloric":
        l = args.l or default_l(field)
        t = parse_series("t", field)
        res = is_lth_power(1 + x ** l * t, l, args.precision, args.ram)
        summary["l"] = l
        doc = {"schema": HENSEL_SCHEMA, "claim": "folkloric", "l": l, "x": str(x),
               "certificate": res.certificate.to_dict() if res else None,
               "failed_test": res.failed_test}
        if not res:
            summary["failed_test"] = res.failed_test
        code = ACCEPT if res else REJECT
    elif pred.startswith("stage:"):
        stage = pred.partition(":")[2]
        if stage not in ("V", "W", "X", "Y"):
            _die(f"unknown stage {stage!r}; expected V, W, X or Y")
        m = set_membership(x, stage, args.ram)
        summary["verdict"] = m.verdict
        summary["reason"] = m.reason
        doc = None
        code = {"In": ACCEPT, "Out": REJECT}.get(m.verdict, UNKNOWN)
    elif pred == "region":
        if not args.region:
            _die("decide region needs --region KIND:n[:center]")
        reg = _region(args.region, field, args.ram)
        summary["region"] = args.region
        doc = None
        code = ACCEPT if in_region(x, reg) else REJECT
    else:
        _die(f"unknown predicate {pred!r}")
    if args.cert:
        if doc is None:
            print(f"note: {pred} produces no certificate file", file=sys.stderr)
        else:
            doc["config"] = _config(args, field, precision=args.precision, predicate=pred)
            _write(args.cert, dumps(doc))
    _verdict({ACCEPT: "Accept", REJECT: "Reject", UNKNOWN: "Unknown"}[code], **summary)
    return code


def cmd_verify(args, field):
    if not args.cert:
        _die("verify needs --cert FILE")
    try:
        with open(args.cert, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _die(f"cannot read certificate: {exc}")
    if not isinstance(doc, dict) or "schema" not in doc:
        _die("certificate has no schema tag")
    try:
        ok, what = _verify_doc(doc, args)
    except (KeyError, TypeError) as exc:
        _die(f"schema violation: missing or malformed {exc}")
    _verdict("Pass" if ok else "Fail", schema=doc["schema"], check=what)
    return ACCEPT if ok else REJECT


def _verify_doc(doc, args):
    schema = doc["schema"]
    field = parse_field_spec(doc.get("field") or doc["certificate"]["field"])
    x = parse_series(_input_text(args), field, args.ram)
    if schema == CHI_SCHEMA:
        cert = ChiCertificate.from_dict(doc)
        return verify_certificate(x, cert), "chi"
    if schema == REFUTATION_SCHEMA:
        ref = Refutation(parse_series(doc["x"], field, int(doc["ram"])), Fraction(doc["exponent"]),
                         field.parse_element(doc["coefficient"]))
        return ref.x == x and ref.check(), "refutation"
    if schema == HENSEL_SCHEMA:
        if doc["certificate"] is None:
            return False, "folkloric"
        cert = HenselCertificate.from_dict(doc["certificate"], field)
        l = int(doc["l"])
        e = cert.poly.ram
        t = parse_series("t", field)
        u = (1 + x ** l * t).with_ram(e)
        one = parse_series("1", field, e)
        zero = parse_series("0", field, e)
        expected = LocalPoly([-u] + [zero] * (l - 1) + [one], field, e)
        return cert.poly == expected and verify_hensel(cert), "folkloric"
    _die(f"unknown schema {schema!r}")


def cmd_suite(args, field):
    samples = args.samples if args.samples is not None else 100
    seed = args.seed if args.seed is not None else 0
    start = time.perf_counter()
    report = run_suite(args.suite, field, samples, seed, args.window, args.ram, args.precision)
    wall = time.perf_counter() - start
    report = {"schema": REPORT_SCHEMA, "command": f"suite {args.suite}", **report}
    out = args.out or f"valdef-{args.suite}-report.json"
    _write(out, dumps(report))
    ok = report["failed"] == 0
    _verdict("Pass" if ok else "Fail", suite=args.suite, passed=report["passed"], failed=report["failed"],
             report=out)
    print(f"wall time: {wall:.2f} s", file=sys.stderr)
    return ACCEPT if ok else REJECT


def cmd_reduce(args, field):
    text = _input_text(args)
    if args.kind == "h10":
        f = parse_multipoly(text, field)
        red = h10_reduce(f)
        formula = red.formula
        summary = {"kind": "h10", "variables": list(f.vars), "disjuncts": red.disjuncts}
    else:
        alpha = parse_val_formula(text, field)
        formula = translate_val_to_ring(alpha, field)
        summary = {"kind": "val2ring", "free": list(formula.free),
                   "quantified": count_quantifiers(formula), "atoms": len(list(atoms(formula)))}
    if args.out:
        extra = {"config": _config(args, field, kind=args.kind), "input": text}
        _write(args.out, dumps(formula_to_json(formula, extra)))
    _verdict("Done", **summary)
    if not args.out:
        print(pretty(formula), file=sys.stderr)
    return ACCEPT


# ---------------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--field", default="2^1", help='field spec "p^k" or "q" (default 2^1)')
    common.add_argument("--ram", type=int, default=1, help="ramification index e of t^(1/e)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION)
    common.add_argument("--in", dest="input", default=None, help="input text")
    common.add_argument("--in-file", default=None, help="read the input from a file")
    common.add_argument("--out", default=None, help='output file ("-" for stdout)')
    common.add_argument("--cert", default=None, help="certificate file to write (decide) or read (verify)")
    common.add_argument("--l", type=int, default=None, help="exponent l for the folkloric formula")

    ap = argparse.ArgumentParser(prog="valdef", description="Certified existential definitions of F_q[[t]].")
    ap.add_argument("--version", action="version", version=f"valdef {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("emit", parents=[common], help="print the chi formula")
    p.add_argument("--style", default="pipeline", choices=["pipeline", "explicit-fp", "explicit_fp", "folkloric"])

    p = sub.add_parser("decide", parents=[common], help="decide chi, folkloric, a stage or a region")
    p.add_argument("predicate", help="chi | folkloric | stage:V|W|X|Y | region")
    p.add_argument("--region", default=None, help="KIND:n[:center], KIND one of S, B, Bbar")

    sub.add_parser("verify", parents=[common], help="re-check a certificate file against an input")

    p = sub.add_parser("suite", parents=[common], help="run a seeded property suite")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--window", type=int, default=None, help="valuation window [-V, V]")

    p = sub.add_parser("reduce", parents=[common], help="H10 reduction or valued-to-ring translation")
    p.add_argument("kind", choices=["h10", "val2ring"])
    return ap


def _check_config(args):
    if args.ram < 1:
        _die("--ram must be positive")
    if args.precision < 1:
        _die("--precision must be positive")
    for name in ("samples", "window", "l"):
        v = getattr(args, name, None)
        if v is not None and v < 1:
            _die(f"--{name} must be positive")


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    handlers = {"emit": cmd_emit, "decide": cmd_decide, "verify": cmd_verify,
                "suite": cmd_suite, "reduce": cmd_reduce}
    try:
        _check_config(args)
        field = parse_field_spec(args.field)
        return handlers[args.command](args, field)
    except (UsageError, ValueError, ZeroDivisionError) as exc:
        print(f"valdef: error: {exc}", file=sys.stderr)
        return BAD


if __name__ == "__main__":
    sys.exit(main())
