"""Named verification suites and their JSON reports.

Every random draw comes from ``random.Random(f"{seed}:{stream}:{index}")`` so
a sample depends only on (seed, stream, index) and never on evaluation order.
"""

from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass, field

from . import cohomology as coh
from .errors import ConfigOutOfRange, MetasplitError, UnknownSuite
from .hilbert import (
    base_class_ints,
    hilbert,
    hilbert_conic_oracle,
    hilbert_q2,
    hilbert_report,
    hilbert_tame,
    lemma_f_witness,
    norm_group,
    symbol_table,
)
from .metaplectic import (
    cocycle_gl2,
    cocycle_sl2,
    meta_mul,
    random_diag_e1,
    random_gl2,
    random_sl2,
    splitting_gl2f,
    torus,
    verify_cocycle_identity,
)
from .padic import DEFAULT_PRECISION, FieldDesc, class_index, is_prime, random_base, random_element, square_classes
from .quaternion import (
    QuatAlg,
    conjugator_for,
    conjugator_stable,
    embed_m2e,
    random_quat,
    sample_sl1,
    splitting_over_Lx,
)

SCHEMA = 1
FIELD_PRIMES = (2, 3, 5)
SUITES = (
    "lemma-b",
    "prop-a",
    "cocycle-identity",
    "symbol-backends",
    "lemma-f",
    "torus-splitting",
    "prop-h",
    "lemma-l",
    "hilbert90",
    "bockstein",
)


@dataclass
class RunConfig:
    suite: str = "all"
    p: int | None = None
    ext_d: int | None = None
    q: int | None = None
    precision: int = DEFAULT_PRECISION
    seed: int = 0
    samples: int | None = None
    group: str = "both"

    def validate(self):
        if self.suite != "all" and self.suite not in SUITES:
            raise UnknownSuite(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES + ('all',))}")
        if self.p is not None and not is_prime(self.p):
            raise ConfigOutOfRange(f"p = {self.p} is not prime")
        floor = 7 if self.p in (None, 2) else 3
        if not floor <= self.precision <= 400:
            raise ConfigOutOfRange(f"precision {self.precision} outside [{floor}, 400]")
        if self.samples is not None and self.samples < 1:
            raise ConfigOutOfRange("samples must be positive")
        if self.q is not None and (self.q < 3 or self.q % 2 == 0):
            raise ConfigOutOfRange("q must be an odd prime power")
        if self.group not in ("sl2", "gl2", "both"):
            raise ConfigOutOfRange(f"unknown group {self.group!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigOutOfRange("seed must fit in 64 bits")
        return self


@dataclass
class Record:
    name: str
    inputs: dict
    expected: object
    got: object
    status: str
    certification_depth: int | None = None


@dataclass
class Report:
    suite: str
    config: dict
    records: list = field(default_factory=list)
    wall_time_s: float = 0.0

    @property
    def passed(self):
        return all(r.status == "pass" for r in self.records)

    @property
    def exit_code(self):
        return 0 if self.passed else 1

    def to_json(self, timing=True):
        out = {
            "schema": SCHEMA,
            "suite": self.suite,
            "config": self.config,
            "passed": self.passed,
            "records": [asdict(r) for r in sorted(self.records, key=lambda r: r.name)],
        }
        if timing:
            out["wall_time_s"] = round(self.wall_time_s, 3)
        return out

    def summary(self):
        n_fail = sum(r.status != "pass" for r in self.records)
        verdict = "PASS" if self.passed else "FAIL"
        return f"{self.suite}: {verdict} ({len(self.records) - n_fail}/{len(self.records)} checks, {self.wall_time_s:.1f}s)"


class _Tally:
    """Counts failures of one named check over many samples."""

    def __init__(self, report, name, inputs, expected):
        self.report, self.name, self.inputs, self.expected = report, name, inputs, expected
        self.n = 0
        self.failures = 0
        self.first = None
        self.depth = None

    def add(self, ok, witness=None, depth=None):
        self.n += 1
        if depth is not None:
            self.depth = depth if self.depth is None else min(self.depth, depth)
        if not ok:
            self.failures += 1
            if self.first is None:
                self.first = witness
        return ok

    def close(self):
        got = {"checked": self.n, "failures": self.failures}
        if self.first is not None:
            got["first_failure"] = self.first
        ok = self.failures == 0 and self.n > 0
        self.report.records.append(
            Record(self.name, self.inputs, self.expected, got, "pass" if ok else "fail", self.depth)
        )


def _rng(cfg, stream, index):
    return random.Random(f"{cfg.seed}:{stream}:{index}")


def _n(cfg, default):
    return default if cfg.samples is None else cfg.samples


def _bases(cfg, primes=FIELD_PRIMES):
    ps = primes if cfg.p is None else (cfg.p,)
    return [FieldDesc(p, prec=max(cfg.precision, 7 if p == 2 else 3)) for p in ps]


def _extensions(cfg, primes=FIELD_PRIMES):
    out = []
    for F in _bases(cfg, primes):
        ds = base_class_ints(F)[1:] if cfg.ext_d is None else [cfg.ext_d]
        out += [F.ext(d) for d in ds]
    return out


def _base_elt(E, rng):
    return E.element(random_base(E.base, rng))


# field suites -----------------------------------------------------------------------


def suite_base_pairs(cfg, report):
    for E in _extensions(cfg):
        n = _n(cfg, 500)
        stream = f"lemma-b:{E}"
        t = _Tally(report, f"base-pairs-trivial/{E}", {"field": str(E), "samples": n}, "+1")
        proj = _Tally(report, f"projection/{E}", {"field": str(E), "samples": n}, "(a,b)_E = (a,N b)_F")
        for i in range(n):
            rng = _rng(cfg, stream, i)
            a, b = _base_elt(E, rng), _base_elt(E, rng)
            t.add(hilbert(a, b, E) == 1, [repr(a), repr(b)], hilbert_report(a, b, E)["certification_depth"])
            a2, b2 = _base_elt(E, rng), random_element(E, rng)
            lhs = hilbert(a2, b2, E)
            rhs = hilbert(a2.a, b2.norm(), E.base)
            proj.add(lhs == rhs, [repr(a2), repr(b2)])
        t.close()
        proj.close()


def suite_gl2f_trivial(cfg, report):
    for E in _extensions(cfg):
        n = _n(cfg, 1000)
        t = _Tally(report, f"gl2f-trivial/{E}", {"field": str(E), "samples": n}, "beta = +1 on GL2(F)")
        sec = _Tally(report, f"gl2f-section/{E}", {"field": str(E), "samples": n}, "s(g)s(h) = s(gh)")
        for i in range(n):
            rng = _rng(cfg, f"prop-a:{E}", i)
            g, h = random_gl2(E, rng, base=True), random_gl2(E, rng, base=True)
            gh = g @ h
            t.add(cocycle_gl2(g, h, product=gh) == 1, [repr(g), repr(h)])
            m = meta_mul(splitting_gl2f(g), splitting_gl2f(h))
            s = splitting_gl2f(gh)
            sec.add(m.zeta == s.zeta and m.g.is_close(s.g), [repr(g), repr(h)])
        t.close()
        sec.close()


def suite_cocycle_identity(cfg, report):
    groups = ("sl2", "gl2") if cfg.group == "both" else (cfg.group,)
    for E in _extensions(cfg):
        for grp in groups:
            n = _n(cfg, 500)
            sampler = random_sl2 if grp == "sl2" else random_gl2
            t = _Tally(report, f"cocycle-identity-{grp}/{E}", {"field": str(E), "samples": n}, "identity holds")
            for i in range(n):
                rng = _rng(cfg, f"cocycle:{grp}:{E}", i)
                gs = [sampler(E, rng) for _ in range(3)]
                t.add(verify_cocycle_identity(*gs, group=grp), [repr(g) for g in gs])
            t.close()
        n = _n(cfg, 200)
        res = _Tally(report, f"gl2-restricts-to-sl2/{E}", {"field": str(E), "samples": n}, "equal")
        diag = _Tally(report, f"diag-e1-trivial/{E}", {"field": str(E), "samples": n}, "+1")
        for i in range(n):
            rng = _rng(cfg, f"restrict:{E}", i)
            g, h = random_sl2(E, rng), random_sl2(E, rng)
            res.add(cocycle_gl2(g, h) == cocycle_sl2(g, h), [repr(g), repr(h)])
            e, f = random_diag_e1(E, rng), random_diag_e1(E, rng)
            diag.add(cocycle_gl2(e, f) == 1, [repr(e), repr(f)])
        res.close()
        diag.close()
        n = _n(cfg, 300)
        tor = _Tally(report, f"torus-law/{E}", {"field": str(E), "samples": n}, "beta = (a,b)_E")
        for i in range(n):
            rng = _rng(cfg, f"torus:{E}", i)
            a, b = random_element(E, rng), random_element(E, rng)
            tor.add(cocycle_sl2(torus(a), torus(b)) == hilbert(a, b, E), [repr(a), repr(b)])
        tor.close()


def suite_symbol_backends(cfg, report):
    n = _n(cfg, 200)
    for p in (3, 5, 7):
        if cfg.p not in (None, p):
            continue
        F = FieldDesc(p, prec=cfg.precision)
        t = _Tally(report, f"tame-vs-oracle/Q{p}", {"p": p, "samples": n}, "agree")
        for i in range(n):
            rng = _rng(cfg, f"tame:{p}", i)
            x, y = random_base(F, rng), random_base(F, rng)
            t.add(hilbert_tame(x, y, F) == hilbert_conic_oracle(x, y, F), [repr(x), repr(y)], 1)
        t.close()
    if cfg.p in (None, 2):
        F = FieldDesc(2, prec=max(cfg.precision, 7))
        reps = square_classes(F)
        t = _Tally(report, "q2-formula-vs-oracle", {"pairs": len(reps) ** 2}, "agree on all class pairs")
        for x in reps:
            for y in reps:
                t.add(hilbert_q2(x, y) == hilbert_conic_oracle(x, y, F), [repr(x), repr(y)], 3)
        t.close()
    fields = _bases(cfg, (2, 3, 5, 7)) + _extensions(cfg)
    for K in fields:
        n = _n(cfg, 500)
        t = _Tally(report, f"steinberg/{K}", {"field": str(K), "samples": n}, "(x, 1-x) = +1")
        i = 0
        while t.n < n:
            rng = _rng(cfg, f"steinberg:{K}", i)
            i += 1
            x = random_element(K, rng)
            y = 1 - x
            if y.is_zero():
                continue
            t.add(hilbert(x, y, K) == 1, [repr(x)])
        t.close()


def suite_norm_groups(cfg, report):
    if cfg.p not in (None, 2):
        return
    F = FieldDesc(2, prec=max(cfg.precision, 7))
    reps = base_class_ints(F)
    report.records.append(
        Record("norm-groups/square-classes", {"field": "Q2"}, 8, len(square_classes(F)), "pass" if len(square_classes(F)) == 8 else "fail")
    )
    table = symbol_table(F)
    t = _Tally(report, "norm-groups/witnesses", {"pairs": 36}, "both classes in the norm group")
    for i, f1 in enumerate(reps):
        for f2 in reps[i:]:
            d = lemma_f_witness(f1, f2, F)
            cd = class_index(F.element(d), F)
            ok = cd != 0 and all(table(cd, class_index(F.element(f), F)) == 1 for f in (f1, f2))
            t.add(ok, [f1, f2, d])
    t.close()
    n = _n(cfg, 50)
    spot = _Tally(report, "norm-groups/norm-realization", {"samples": n}, "N(x) lies in the norm group")
    for i in range(n):
        rng = _rng(cfg, "lemma-f", i)
        d = rng.choice(reps[1:])
        E = F.ext(d)
        x = random_element(E, rng)
        spot.add(x.norm() in norm_group(F, d), [d, repr(x)])
    spot.close()


def suite_torus_splitting(cfg, report):
    for F in _bases(cfg):
        D = QuatAlg.standard(F.p, prec=F.prec)
        tag = f"Q{F.p}"
        report.records.append(
            Record(f"quaternion-division/{tag}", {"a": D.a, "b": D.b}, -1, hilbert(D.a, D.b, F), "pass" if D.is_division() else "fail")
        )
        n = _n(cfg, 500)
        det = _Tally(report, f"det-embed-nrd/{tag}", {"samples": n}, "det(embed q) = Nrd q")
        hom = _Tally(report, f"embed-homomorphism/{tag}", {"samples": n}, "embed(q1 q2) = embed(q1) embed(q2)")
        E = D.splitting_field
        for i in range(n):
            rng = _rng(cfg, f"quat:{tag}", i)
            q1, q2 = random_quat(D, rng), random_quat(D, rng)
            m1, m2 = embed_m2e(q1), embed_m2e(q2)
            det.add((m1.det() - E.element(q1.nrd())).is_zero(), [repr(q1)])
            hom.add(embed_m2e(q1 * q2).is_close(m1 @ m2), [repr(q1), repr(q2)])
        det.close()
        hom.close()
        sl1 = _Tally(report, f"sl1-samples/{tag}", {"samples": 20}, "Nrd = 1 and det embed = 1")
        for q in sample_sl1(D, 20, _rng(cfg, f"sl1:{tag}", 0)):
            sl1.add((q.nrd() - 1).is_zero() and (embed_m2e(q).det() - 1).is_zero(), [repr(q)])
        sl1.close()
        ds = base_class_ints(F)[1:] if cfg.ext_d is None else [cfg.ext_d]
        for d in ds:
            conj = _Tally(report, f"skolem-noether/{tag}/d={d}", {"d": d}, "t C t^-1 = j(sqrt d), also at 2N")
            t, e1, e2 = conjugator_for(D, d)
            ok = (t @ e1.in_m2e(D)).is_close(e2.in_m2e(D) @ t)
            conj.add(ok and conjugator_stable(D, d), [d, repr(t)])
            conj.close()
            n = _n(cfg, 100)
            cert = splitting_over_Lx(D, d, n, _rng(cfg, f"split:{tag}:{d}", 0))
            report.records.append(
                Record(
                    f"split-torus/{tag}/d={d}",
                    {"d": d, "samples": n},
                    "beta is a coboundary on sampled L^x",
                    {"sampled_pairs": len(cert.pairs), "all_passed": cert.all_passed},
                    "pass" if cert.all_passed else "fail",
                )
            )


# cohomology suites ------------------------------------------------------------------


def _qs(cfg, default):
    return default if cfg.q is None else (cfg.q,)


def _record(report, name, inputs, expected, got):
    report.records.append(Record(name, inputs, expected, got, "pass" if expected == got else "fail"))


def suite_semidirect_h2(cfg, report):
    for q in _qs(cfg, (3, 5, 7, 9)):
        h = coh.assemble_h2_gprime(q, "z2")
        _record(report, f"h2-semidirect-z2/q={q}", {"q": q}, {"factors": [2, 2], "order": 4}, {"factors": list(h.factors), "order": h.order})
    for q in _qs(cfg, (3, 5)):
        k = coh.kunneth_h2_mx(q)
        _record(report, f"kunneth/q={q}", {"q": q}, [2, 2], list(k.factors))
    if cfg.q in (None, 3):
        full, corr, answer = coh.kunneth_truncation_check(3)
        _record(report, "kunneth-truncation-brute/q=3", {"group": "Z/8 x Z/4"}, answer, full - corr)
        b = coh.brute_force_h2(coh.group_table("semidirect:3"))
        _record(report, "semidirect-quotient-brute/q=3", {"group": "semidirect:3"}, 2, len(b.factors))
    z2 = coh.ModAut.cyclic(2)
    for n in range(1, 17):
        want = coh.brute_force_h2(coh.group_table(f"cyclic:{n}"))
        got = coh.cyclic_cohomology(n, z2, 2)
        _record(report, f"cyclic-vs-brute/n={n:02d}", {"n": n}, list(want.factors), list(got.factors))
    kun = 2 * len(coh.cyclic_trivial(2, 2, 2).factors) + len(coh._tensor(coh.cyclic_trivial(2, 2, 1), coh.cyclic_trivial(2, 2, 1)).factors)
    b = coh.brute_force_h2(coh.group_table("product:cyclic:2,cyclic:2"))
    _record(report, "kunneth-vs-brute/Z2xZ2", {"group": "Z/2 x Z/2"}, kun, len(b.factors))


def suite_restriction(cfg, report):
    for q in _qs(cfg, (3, 5, 7)):
        M = coh.dual_module(coh.frobenius_module(q))
        r = coh.restrict_h1(M, 2)
        _record(report, f"restriction-2-torsion/q={q}", {"q": q}, True, r.bijective_on_2_torsion)
        s = M.sigma[0][0]
        _record(report, f"dual-inverse-action/q={q}", {"q": q}, 1, s * q % (q * q - 1))


def suite_hilbert90(cfg, report):
    for q in _qs(cfg, (3, 5, 7, 9)):
        h1, kn, im = coh.hilbert90(q)
        _record(report, f"hilbert90/q={q}", {"q": q}, {"h1": [], "ker_norm_eq_im": True}, {"h1": list(h1.factors), "ker_norm_eq_im": kn == im})


def suite_bockstein(cfg, report):
    for q in _qs(cfg, (3, 5, 7)):
        b = coh.bockstein_check(q)
        _record(report, f"bockstein/q={q}", {"q": q}, "4 = 2*2", f"{b['h2_z2']} = {b['h1_mod_2']}*{b['h2_qz_2tors']}")
        d = coh.bockstein_check(q, direct=True)
        _record(report, f"bockstein-direct/q={q}", {"q": q}, "4 = 2*2", f"{d['h2_z2']} = {d['h1_mod_2']}*{d['h2_qz_2tors']}")


RUNNERS = {
    "lemma-b": suite_base_pairs,
    "prop-a": suite_gl2f_trivial,
    "cocycle-identity": suite_cocycle_identity,
    "symbol-backends": suite_symbol_backends,
    "lemma-f": suite_norm_groups,
    "torus-splitting": suite_torus_splitting,
    "prop-h": suite_semidirect_h2,
    "lemma-l": suite_restriction,
    "hilbert90": suite_hilbert90,
    "bockstein": suite_bockstein,
}


def run_suite(cfg: RunConfig) -> Report:
    cfg.validate()
    names = SUITES if cfg.suite == "all" else (cfg.suite,)
    report = Report(cfg.suite, asdict(cfg))
    start = time.perf_counter()
    for name in names:
        try:
            RUNNERS[name](cfg, report)
        except MetasplitError as exc:
            if exc.exit_code == 2:
                raise
            report.records.append(Record(f"{name}/error", {}, "no error", str(exc), "fail"))
    report.wall_time_s = time.perf_counter() - start
    return report


__all__ = ["Record", "Report", "RunConfig", "SUITES", "run_suite"]
