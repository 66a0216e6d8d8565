"""Command line entry point: ``metasplit <command> ...``.

JSON goes to stdout, a one-line summary to stderr.  Exit status is 0 when
every check passes, 1 when a mathematical check fails and 2 for bad input or
exhausted precision.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import traceback

from . import cohomology as coh
from .errors import MetasplitError
from .hilbert import conic_verdict, hilbert_q2, hilbert_report, hilbert_tame
from .metaplectic import Mat2E, cocycle_report
from .padic import DEFAULT_PRECISION, FieldDesc, format_element, parse_element
from .quaternion import QuatAlg, conjugator_for, conjugator_stable, embed_m2e, splitting_over_Lx
from .suites import SUITES, RunConfig, run_suite


def _field(args):
    ext = getattr(args, "ext", None)
    return FieldDesc(args.p, ext, prec=args.precision)


def cmd_hilbert(args):
    K = _field(args)
    x, y = parse_element(args.x, K), parse_element(args.y, K)
    if args.backend == "auto":
        out = hilbert_report(x, y, K)
    elif args.backend == "oracle":
        v = conic_verdict(x, y, K)
        out = {"backend": "conic-oracle", "sign": v.sign, "certification_depth": v.certification_depth, "nodes": v.nodes}
    elif args.backend == "tame":
        out = {"backend": "tame", "sign": hilbert_tame(x, y, K), "certification_depth": 1}
    else:
        out = {"backend": "q2-formula", "sign": hilbert_q2(x, y), "certification_depth": 3}
    out.update(field=str(K), x=format_element(x), y=format_element(y))
    return out, f"({args.x}, {args.y})_{K} = {out['sign']:+d}", True


def cmd_cocycle(args):
    E = _field(args)
    g1, g2 = Mat2E.parse(args.g1, E), Mat2E.parse(args.g2, E)
    out = cocycle_report(g1, g2, args.group)
    out.update(field=str(E), g1=repr(g1), g2=repr(g2))
    return out, f"beta_{args.group}(g1, g2) = {out['sign']:+d} over {E}", True


def _quat_alg(args):
    F = FieldDesc(args.p, prec=args.precision)
    if args.constants:
        a, b = (int(t) for t in args.constants.split(","))
        return QuatAlg.make(F, a, b)
    return QuatAlg.standard(args.p, prec=args.precision)


def cmd_quaternion(args):
    D = _quat_alg(args)
    head = {"p": D.F.p, "a": D.a, "b": D.b, "division": D.is_division()}
    if args.action == "embed":
        coords = [parse_element(t.strip(), D.F) for t in args.q.split(",")]
        if len(coords) != 4:
            raise ValueError("--q needs four coordinates x,y,z,w")
        q = D.quat(*coords)
        m = embed_m2e(q)
        ok = (m.det() - D.splitting_field.element(q.nrd())).is_zero()
        head.update(q=args.q, image=repr(m), nrd=format_element(q.nrd()), det_equals_nrd=ok)
        return head, f"embed into M2({D.splitting_field}): det = Nrd is {ok}", ok
    if args.d is None:
        raise ValueError(f"{args.action} needs --d")
    if args.action == "conjugator":
        t, e1, e2 = conjugator_for(D, args.d)
        ok = (t @ e1.in_m2e(D)).is_close(e2.in_m2e(D) @ t) and conjugator_stable(D, args.d)
        head.update(d=args.d, conjugator=repr(t), image_of_sqrt_d=repr(e2.image), verified=ok)
        return head, f"conjugator for d = {args.d}: verified = {ok}", ok
    cert = splitting_over_Lx(D, args.d, args.samples, random.Random(f"{args.seed}:split-torus:{args.d}"))
    head.update(d=args.d, conjugator=repr(cert.conjugator), sampled_pairs=len(cert.pairs), all_passed=cert.all_passed)
    return head, f"split-torus d = {args.d}: {len(cert.pairs)} pairs, all_passed = {cert.all_passed}", cert.all_passed


def cmd_cohomology(args):
    if args.action == "gprime":
        h = coh.assemble_h2_gprime(args.q, args.coeffs)
        out = {"q": args.q, "coeffs": args.coeffs, **h.to_json()}
        return out, f"H^2(F_q2^x semidirect Z, {args.coeffs}) = {h.describe()}", True
    if args.action == "lemma-l":
        r = coh.restrict_h1(coh.dual_module(coh.frobenius_module(args.q)), 2)
        out = {"q": args.q, **r.to_json()}
        return out, f"restriction bijective on 2-torsion: {r.bijective_on_2_torsion}", r.bijective_on_2_torsion
    h = coh.brute_force_h2(coh.group_table(args.group))
    out = {"group": args.group, **h.to_json()}
    return out, f"H^2({args.group}, Z/2) = {h.describe()}", True


def cmd_verify(args):
    cfg = RunConfig(
        suite=args.suite,
        p=args.p,
        ext_d=args.ext,
        q=args.q,
        precision=args.precision,
        seed=args.seed,
        samples=args.samples,
        group=args.group,
    )
    report = run_suite(cfg)
    return report.to_json(), report.summary(), report.passed


def build_parser():
    # global options are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=argparse.SUPPRESS, help="p-adic digits (default from METASPLIT_PRECISION)")
    common.add_argument("--compact", action="store_true", default=argparse.SUPPRESS, help="single-line JSON")
    ap = argparse.ArgumentParser(prog="metasplit", description="Hilbert symbols, metaplectic cocycles and splitting checks.", parents=[common])
    ap.set_defaults(precision=DEFAULT_PRECISION, compact=False)
    sub = ap.add_subparsers(dest="command", required=True)

    h = sub.add_parser("hilbert", parents=[common], help="quadratic Hilbert symbol")
    h.add_argument("--p", type=int, required=True)
    h.add_argument("--ext", type=int, help="work in Q_p(sqrt ext)")
    h.add_argument("--x", required=True)
    h.add_argument("--y", required=True)
    h.add_argument("--backend", choices=["auto", "tame", "q2", "oracle"], default="auto")
    h.set_defaults(func=cmd_hilbert)

    c = sub.add_parser("cocycle", parents=[common], help="Kubota cocycle of two matrices")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--ext", type=int, required=True)
    c.add_argument("--g1", required=True, help='rows separated by ";", entries by ","')
    c.add_argument("--g2", required=True)
    c.add_argument("--group", choices=["gl2", "sl2"], default="gl2")
    c.set_defaults(func=cmd_cocycle)

    q = sub.add_parser("quaternion", parents=[common], help="quaternion embeddings and torus splittings")
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--constants", help="a,b (default: standard division algebra)")
    q.add_argument("action", choices=["embed", "conjugator", "split-torus"])
    q.add_argument("--q", help="x,y,z,w for embed")
    q.add_argument("--d", type=int)
    q.add_argument("--samples", type=int, default=100)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=cmd_quaternion)

    co = sub.add_parser("cohomology", parents=[common], help="group cohomology computations")
    co.add_argument("action", choices=["gprime", "lemma-l", "brute"])
    co.add_argument("--q", type=int, default=3)
    co.add_argument("--coeffs", choices=["z2", "qz"], default="z2")
    co.add_argument("--group", default="cyclic:2", help="cyclic:n | product:cyclic:n,cyclic:m | semidirect:q")
    co.set_defaults(func=cmd_cohomology)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=list(SUITES) + ["all"])
    v.add_argument("--p", type=int)
    v.add_argument("--ext", type=int)
    v.add_argument("--q", type=int)
    v.add_argument("--samples", type=int)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--group", choices=["sl2", "gl2", "both"], default="both")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    indent = None if args.compact else 2
    try:
        out, summary, ok = args.func(args)
    except (MetasplitError, ValueError, ZeroDivisionError) as exc:
        code = getattr(exc, "exit_code", 2)
        frames = traceback.extract_tb(exc.__traceback__)
        where = os.path.splitext(os.path.basename(frames[-1].filename))[0] if frames else "cli"
        err = {
            "schema": 1,
            "error": type(exc).__name__,
            "module": where,
            "command": args.command,
            "message": str(exc),
            "argv": sys.argv[1:] if argv is None else list(argv),
        }
        print(json.dumps(err, indent=indent))
        print(f"error: {exc}", file=sys.stderr)
        return code
    print(json.dumps(out, indent=indent, default=str))
    print(summary, file=sys.stderr)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
