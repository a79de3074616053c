"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 complexity cap,
3 internal invariant violation, 4 selftest failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from . import coverbuilder, formulas, oracle, ringmodel, sieve
from .arith import INF, ArithError
from .specparser import SpecError, format_spec, parse

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_INTERNAL, EXIT_SELFTEST = 0, 1, 2, 3, 4

GRAMMAR_HELP = """ring descriptions:
  F(q)          the field with q elements          F(q)^t  t copies
  M(n,q)        n x n matrices over F_q
  Id(q[,lam])   F_q (+) F_q^lam, lam defaults to 2
  A(n,q1,q2)    block ring [[M_n(q1), F_q^n], [0, F_q2]], q = q1 (x) q2
  Z(p,k)        F_p^k with zero multiplication
  terms are joined with '+'; any term may be raised to ^t (t copies)
environment: SIGMA_THREADS (worker count, 0 = auto), SIGMA_ORACLE_CAP (subspace-count cap)
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _ext(v):
    if v is None:
        return None
    return "Infinity" if v == INF else int(v)


def _emit(obj, args):
    print(json.dumps(obj, indent=2 if getattr(args, "pretty", False) else None))


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    return int(os.environ.get("SIGMA_THREADS", "0") or 0)


# ------------------------------------------------------------ subcommands


def cmd_eval(args) -> int:
    spec = parse(args.spec)
    rep = formulas.classify(spec)
    out = {"spec": format_spec(spec)}
    out.update(rep.to_dict())
    out["value"] = out["sigma_u"] if args.unital else out["sigma"]
    if args.table:
        for k, v in out.items():
            print(f"{k:16} {json.dumps(v)}")
    else:
        _emit(out, args)
    return EXIT_OK


def cmd_oracle(args) -> int:
    spec = parse(args.spec)
    ring = ringmodel.build(spec, max_order=args.max_order)
    if args.unital and ring.unity is None:
        raise UsageError("--unital needs a ring with unity")
    res = oracle.oracle_cover(ring, unital=args.unital, cap=args.cap, reduce_universe=not args.full_universe)
    key = "sigma_u" if args.unital else "sigma"
    out = {
        "spec": format_spec(spec),
        key: _ext(res.value),
        "subrings": res.n_subrings,
        "maximal_subrings": res.n_maximal,
        "universe": res.universe_size,
    }
    if res.certificate is not None:
        cert = res.certificate
        out["certificate"] = cert.to_dict()
        if not (cert.proper and cert.covering and cert.irredundant):
            _emit(out, args)
            return EXIT_INTERNAL
        if args.certificate:
            with open(args.certificate, "w") as fh:
                fh.write(oracle.certificate_to_json(ring, cert))
    _emit(out, args)
    return EXIT_OK


def cmd_cover(args) -> int:
    cover = coverbuilder.build_A_cover(args.n, args.q1, args.q2)
    out = {
        "params": cover.to_dict()["params"],
        "size": cover.size,
        "conjugates": len(cover.conjugates),
        "stabilizers": len(cover.stabilizers),
        "subfields": cover.subfields,
        "extra": cover.extra,
        "sigma_A": _ext(formulas.sigma_A(args.n, args.q1, args.q2).value),
    }
    ok = True
    for mode in args.verify or []:
        if mode == "raw":
            res = coverbuilder.verify_cover_raw(cover, cap=args.raw_cap)
            out["raw"] = {"covered": res.covered, "elements": res.elements, "uncovered": res.uncovered}
            ok &= res.covered
        else:
            res = coverbuilder.verify_cover_reduced(cover, cap=args.reduced_cap)
            out["reduced"] = res
            ok &= res
    if args.irredundancy:
        rep = coverbuilder.irredundancy(cover, cap=args.raw_cap)
        out["irredundancy"] = rep.to_dict()
        ok &= rep.irredundant
    if args.export:
        with open(args.export, "w") as fh:
            fh.write(coverbuilder.export_json(cover, indent=1))
    if args.certificate:
        with open(args.certificate, "w") as fh:
            fh.write(coverbuilder.certificate_json(cover))
    _emit(out, args)
    return EXIT_OK if ok else EXIT_INTERNAL


def cmd_enumerate(args) -> int:
    s = sieve.enumerate_covering_numbers(args.N, provenance=args.provenance)
    if args.format == "json":
        print(sieve.format_json(s, include_gaps=args.gaps))
    elif args.format == "intervals":
        if args.gaps:
            print("\n".join(str(g) for g in s.gaps()))
        else:
            print(sieve.format_intervals(s))
    else:
        vals = s.gaps() if args.gaps else s.values().tolist()
        print("\n".join(str(int(v)) for v in vals))
        if args.provenance:
            for m, fams in sorted(s.provenance.items()):
                print(f"# {m}: {','.join(fams)}", file=sys.stderr)
    return EXIT_OK


def cmd_member(args) -> int:
    if args.M < 0:
        raise UsageError("M must be nonnegative")
    ok, wit = sieve.member(args.M)
    _emit({"m": args.M, "member": ok, "witnesses": [format_spec(w) for w in wit]}, args)
    return EXIT_OK


def cmd_gaps(args) -> int:
    _emit({"N": args.N, "gaps": sieve.gaps(args.N)}, args)
    return EXIT_OK


def cmd_density(args) -> int:
    if args.N < 5:
        raise UsageError("density needs N >= 5")
    rep = sieve.density_report(args.N)
    _emit(rep.to_dict(), args)
    return EXIT_OK if rep.pass_ else EXIT_INTERNAL


def cmd_selftest(args) -> int:
    from . import acceptance

    results = acceptance.run_all(args.only)
    for r in results:
        print(r.line())
        if args.verbose or not r.passed:
            for d in r.details:
                print(f"    {d}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_SELFTEST


# ------------------------------------------------------------ wiring


def build_parser() -> argparse.ArgumentParser:
    base = _Parser(add_help=False)
    base.add_argument("--pretty", action="store_true", help="indent JSON output")
    base.add_argument("--threads", type=int, default=None, help="worker count (0 = auto); overrides SIGMA_THREADS")
    common = _Parser(add_help=False, parents=[base])
    common.add_argument("--json", action="store_true", help="report errors as JSON on stderr")

    ap = _Parser(prog="ringcover", description="Covering numbers of finite rings.",
                 epilog=GRAMMAR_HELP, formatter_class=argparse.RawDescriptionHelpFormatter, parents=[common])
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("eval", parents=[common], help="covering number from the formulas",
                       epilog=GRAMMAR_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("spec")
    p.add_argument("--unital", action="store_true")
    p.add_argument("--table", action="store_true", help="key/value table instead of JSON")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("oracle", parents=[common], help="brute-force covering number with a certificate",
                       epilog=GRAMMAR_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("spec")
    p.add_argument("--unital", action="store_true")
    p.add_argument("--cap", type=int, default=None, help="subspace-count cap; overrides SIGMA_ORACLE_CAP")
    p.add_argument("--max-order", type=int, default=ringmodel.DEFAULT_MAX_ORDER, help="largest ring order to build")
    p.add_argument("--full-universe", action="store_true", help="cover every element, not one per cyclic subring")
    p.add_argument("--certificate", metavar="FILE", help="write the ring and cover as JSON")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("cover", parents=[common], help="explicit cover of A(n,q1,q2)")
    p.add_argument("n", type=int)
    p.add_argument("q1", type=int)
    p.add_argument("q2", type=int)
    p.add_argument("--verify", action="append", choices=["raw", "reduced"])
    p.add_argument("--irredundancy", action="store_true")
    p.add_argument("--export", metavar="FILE", help="write the symbolic cover as JSON")
    p.add_argument("--certificate", metavar="FILE", help="write member bases in the oracle certificate format")
    p.add_argument("--raw-cap", type=int, default=coverbuilder.RAW_CAP)
    p.add_argument("--reduced-cap", type=int, default=coverbuilder.REDUCED_CAP)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("enumerate", parents=[base], help="all covering numbers up to N")
    p.add_argument("N", type=int)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--list", dest="format", action="store_const", const="list")
    fmt.add_argument("--intervals", dest="format", action="store_const", const="intervals")
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    p.add_argument("--gaps", action="store_true", help="print the non-members in [3, N] instead")
    p.add_argument("--provenance", action="store_true", help="record which families produce each value")
    p.set_defaults(func=cmd_enumerate, format="list")

    p = sub.add_parser("member", parents=[common], help="is M a covering number?")
    p.add_argument("M", type=int)
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("gaps", parents=[common], help="integers in [3, N] that are not covering numbers")
    p.add_argument("N", type=int)
    p.set_defaults(func=cmd_gaps)

    p = sub.add_parser("density", parents=[common], help="check N/log N < |E(N)| < 128 N/log N")
    p.add_argument("N", type=int)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    p.add_argument("--only", action="append", metavar="PREFIX", help="run checks whose name starts with PREFIX")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_selftest)
    return ap


def _error(kind: str, message: str, code: int, want_json: bool) -> int:
    if want_json:
        print(json.dumps({"error": kind, "message": message, "exit_code": code}), file=sys.stderr)
    else:
        print(f"error: {message}", file=sys.stderr)
    return code


def run(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    want_json = "--json" in argv
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        if args.command == "enumerate":
            # in enumerate, --json selects the output format
            want_json = False
        _threads(args)  # validated here; execution is sequential
        return args.func(args)
    except UsageError as exc:
        return _error("usage", str(exc), EXIT_USAGE, want_json)
    except SpecError as exc:
        return _error(type(exc).__name__, str(exc), EXIT_USAGE, want_json)
    except (oracle.ComplexityCap, ringmodel.DimensionCap, sieve.MemoryCap) as exc:
        return _error(type(exc).__name__, str(exc), EXIT_CAP, want_json)
    except (AssertionError, ringmodel.NotAssociative) as exc:
        return _error("invariant", str(exc) or "internal invariant violated", EXIT_INTERNAL, want_json)
    except (coverbuilder.UnsupportedParameters, ArithError, ringmodel.RingError) as exc:
        return _error(type(exc).__name__, str(exc), EXIT_USAGE, want_json)
    except ValueError as exc:
        return _error("usage", str(exc), EXIT_USAGE, want_json)


def main() -> None:
    sys.exit(run())
