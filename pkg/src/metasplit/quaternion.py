"""Quaternion algebras over Q_p, their splitting over E = F(sqrt a), and
effective splittings of the metaplectic cocycle over tori L^x.

A quaternion x + y i + z j + w ij has i^2 = a, j^2 = b, ji = -ij.  With
E = F(sqrt a) the map

    q -> [[x + y sqrt(a), z + w sqrt(a)], [b (z - w sqrt(a)), x - y sqrt(a)]]

is an isomorphism D (x) E = M2(E) with det = Nrd.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import (
    ExtensionMismatch,
    InsufficientPrecision,
    NoEmbedding,
    NoInvertibleSolution,
    NotInvertible,
    SamplingBudgetExceeded,
    SystemInconsistent,
)
from .hilbert import hilbert
from .metaplectic import CochainCert, Mat2E, conjugation_transport
from .padic import INF, FieldDesc, PadicF, class_index, is_square, random_base, smallest_nonresidue, sqrt


@dataclass(frozen=True)
class QuatAlg:
    F: FieldDesc
    a: int
    b: int

    @classmethod
    def standard(cls, p, prec=None):
        """Division algebra (u, p) for odd p, (-1, -1) for p = 2."""
        F = FieldDesc(p) if prec is None else FieldDesc(p, prec=prec)
        a, b = (-1, -1) if p == 2 else (smallest_nonresidue(p), p)
        return cls.make(F, a, b)

    @classmethod
    def make(cls, F, a, b, division=True):
        D = cls(F.base, a, b)
        if division and hilbert(a, b, D.F) != -1:
            raise ValueError(f"({a}, {b}) is split over {D.F}")
        return D

    @property
    def splitting_field(self) -> FieldDesc:
        return self.F.ext(self.a)

    def with_prec(self, prec):
        return QuatAlg(self.F.with_prec(prec), self.a, self.b)

    def quat(self, x=0, y=0, z=0, w=0):
        return Quat(self, *(self.F.element(t) for t in (x, y, z, w)))

    def one(self):
        return self.quat(1)

    def i(self):
        return self.quat(0, 1)

    def j(self):
        return self.quat(0, 0, 1)

    def k(self):
        return self.quat(0, 0, 0, 1)

    def is_division(self):
        return hilbert(self.a, self.b, self.F) == -1


class Quat:
    __slots__ = ("alg", "x", "y", "z", "w")

    def __init__(self, alg, x, y, z, w):
        self.alg = alg
        self.x, self.y, self.z, self.w = x, y, z, w

    def coords(self):
        return (self.x, self.y, self.z, self.w)

    def __add__(self, o):
        return Quat(self.alg, *(s + t for s, t in zip(self.coords(), o.coords())))

    def __sub__(self, o):
        return Quat(self.alg, *(s - t for s, t in zip(self.coords(), o.coords())))

    def __neg__(self):
        return Quat(self.alg, *(-s for s in self.coords()))

    def __mul__(self, o):
        if not isinstance(o, Quat):
            return Quat(self.alg, *(s * o for s in self.coords()))
        a, b = self.alg.a, self.alg.b
        x1, y1, z1, w1 = self.coords()
        x2, y2, z2, w2 = o.coords()
        return Quat(
            self.alg,
            x1 * x2 + a * (y1 * y2) + b * (z1 * z2) - (a * b) * (w1 * w2),
            x1 * y2 + y1 * x2 - b * (z1 * w2) + b * (w1 * z2),
            x1 * z2 + z1 * x2 + a * (y1 * w2) - a * (w1 * y2),
            x1 * w2 + w1 * x2 + y1 * z2 - z1 * y2,
        )

    __rmul__ = __mul__  # only used with scalars, which are central

    def conj(self):
        return Quat(self.alg, self.x, -self.y, -self.z, -self.w)

    def nrd(self) -> PadicF:
        a, b = self.alg.a, self.alg.b
        return self.x * self.x - a * (self.y * self.y) - b * (self.z * self.z) + (a * b) * (self.w * self.w)

    def invert(self):
        n = self.nrd()
        if n.is_zero():
            raise NotInvertible("reduced norm is zero")
        return self.conj() * n.inverse()

    def is_zero(self):
        return all(c.is_zero() for c in self.coords())

    def is_close(self, o):
        return (self - o).is_zero()

    def __repr__(self):
        return "Quat(" + ", ".join(repr(c) for c in self.coords()) + ")"


def random_quat(D: QuatAlg, rng, vmin=-3, vmax=3, nonzero=True) -> Quat:
    F = D.F
    while True:
        cs = [random_base(F, rng, vmin, vmax) if rng.random() < 0.85 else PadicF.exact_zero(F.p) for _ in range(4)]
        q = Quat(D, *cs)
        if not nonzero or not q.is_zero():
            return q


def embed_m2e(q: Quat, E: FieldDesc | None = None) -> Mat2E:
    D = q.alg
    if E is None:
        E = D.splitting_field
    elif E.is_base or E.p != D.F.p or E.d != D.a:
        raise ExtensionMismatch(f"{E} is not F(sqrt {D.a})")
    zero = PadicF.exact_zero(E.p)
    x, y, z, w = (E.element(t) for t in q.coords())
    ya = E.element(zero, y.a)  # y * sqrt(a)
    wa = E.element(zero, w.a)
    return Mat2E(x + ya, z + wa, (z - wa) * D.b, x - ya)


# embeddings of L = F(sqrt d) ------------------------------------------------------


@dataclass(frozen=True)
class EmbeddingDesc:
    """Image of sqrt(d) under one of the two routes."""

    target: str  # "M2F" or "D"
    d: int
    image: object  # Mat2E (M2F) or Quat (D)

    def in_m2e(self, D: QuatAlg) -> Mat2E:
        if self.target == "D":
            return embed_m2e(self.image)
        E = D.splitting_field
        m = self.image
        return Mat2E(*(E.element(t) for t in m.entries()))


def _pure_search(D, d, bound=6):
    """Small integers (y, z, w) with a y^2 + b z^2 - ab w^2 in the class of d."""
    F = D.F
    target = class_index(F.element(d), F)
    a, b = D.a, D.b
    rng = range(-bound, bound + 1)
    for y, z, w in sorted(itertools.product(rng, rng, rng), key=lambda t: sum(map(abs, t))):
        v = a * y * y + b * z * z - a * b * w * w
        if v and class_index(F.element(v), F) == target:
            return y, z, w, v
    return None


def embed_L(d, D: QuatAlg, route="via_D") -> EmbeddingDesc:
    """An element squaring to d in M2(F) (companion matrix) or in D."""
    F = D.F
    if is_square(F.element(d), F):
        raise NoEmbedding(f"{d} is a square, F(sqrt {d}) is not a field")
    if route == "via_M2F":
        return EmbeddingDesc("M2F", d, Mat2E.of(F.ext(D.a), 0, d, 1, 0))
    if route != "via_D":
        raise ValueError(f"unknown route {route!r}")
    if d == D.a:
        return EmbeddingDesc("D", d, D.i())
    found = _pure_search(D, d)
    if found is None:
        raise NoEmbedding(f"F(sqrt {d}) does not embed in the quaternion algebra ({D.a}, {D.b})")
    y, z, w, v = found
    s = sqrt(F.element(d) / v)
    q = D.quat(0, y, z, w) * s
    if not (q * q).is_close(D.quat(d)):
        raise InsufficientPrecision("pure quaternion does not square to d at working precision")
    return EmbeddingDesc("D", d, q)


# Skolem-Noether -------------------------------------------------------------------


def _nullspace(rows, E):
    """Basis of {v : rows . v = 0} over E by elimination with valuation pivoting."""
    m = [list(r) for r in rows]
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        best, best_v = None, INF
        for i in range(r, len(m)):
            if not m[i][c].is_zero():
                v = E.valuation(m[i][c])
                if v < best_v:
                    best, best_v = i, v
        if best is None:
            continue
        m[r], m[best] = m[best], m[r]
        inv = m[r][c].inverse()
        m[r] = [t * inv for t in m[r]]
        for i in range(len(m)):
            if i != r and not m[i][c].is_exact_zero():
                f = m[i][c]
                m[i] = [s - f * t for s, t in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [E.zero() for _ in range(ncols)]
        v[fc] = E.one()
        for row, pc in zip(m, pivots):
            v[pc] = -row[fc]
        basis.append(v)
    return basis


def skolem_noether_conjugator(e1: Mat2E, e2: Mat2E) -> Mat2E:
    """Invertible g with g e1 g^-1 = e2, from the linear system g e1 = e2 g."""
    E = e1.field
    a1, b1, c1, d1 = e1.entries()
    a2, b2, c2, d2 = e2.entries()
    z = E.zero()
    # unknowns (g11, g12, g21, g22); row for each entry of g e1 - e2 g
    rows = [
        [a1 - a2, c1, -b2, z],
        [b1, d1 - a2, z, -b2],
        [-c2, z, a1 - d2, c1],
        [z, -c2, b1, d1 - d2],
    ]
    basis = _nullspace(rows, E)
    if not basis:
        raise SystemInconsistent("only the zero matrix intertwines the two embeddings")
    cands = list(basis)
    if len(basis) >= 2:
        cands += [[s + t for s, t in zip(basis[0], basis[1])], [s - t for s, t in zip(basis[0], basis[1])]]
    best, best_v = None, INF
    for v in cands:
        g = Mat2E(*v)
        det = g.det()
        if det.is_zero():
            continue
        val = E.valuation(det)
        if val < best_v:
            best, best_v = g, val
    if best is None:
        raise NoInvertibleSolution("no certified-invertible conjugator in the solution space")
    if not (best @ e1).is_close(e2 @ best):
        raise SystemInconsistent("conjugation identity fails for the selected solution")
    return best


def conjugator_for(D: QuatAlg, d, prec=None) -> tuple[Mat2E, EmbeddingDesc, EmbeddingDesc]:
    """Conjugator taking the companion embedding of sqrt d to the one through D."""
    if prec is not None:
        D = D.with_prec(prec)
    e1 = embed_L(d, D, "via_M2F")
    e2 = embed_L(d, D, "via_D")
    t = skolem_noether_conjugator(e1.in_m2e(D), e2.in_m2e(D))
    return t, e1, e2


def conjugator_stable(D: QuatAlg, d) -> bool:
    """Solve again at doubled precision and check the conjugation identity there."""
    t2, e1, e2 = conjugator_for(D, d, prec=2 * D.F.prec)
    D2 = D.with_prec(2 * D.F.prec)
    return (t2 @ e1.in_m2e(D2)).is_close(e2.in_m2e(D2) @ t2)


# splitting over tori ---------------------------------------------------------------


def _torus_sample(F, d, rng, n):
    """n elements x + s sqrt(d) of L^x as (x, s) pairs; a few lie in F^x."""
    out = []
    zero = PadicF.exact_zero(F.p)
    while len(out) < n:
        x = random_base(F, rng) if rng.random() < 0.9 else zero
        s = random_base(F, rng) if rng.random() < 0.85 else zero
        if x.is_exact_zero() and s.is_exact_zero():
            continue
        out.append((x, s))
    return out


def splitting_over_Lx(D: QuatAlg, d, sample_size, rng) -> CochainCert:
    """Certify that beta is a coboundary on a sample of j(L^x), L = F(sqrt d).

    Elements h = x + s C of GL2(F) (C the companion matrix of d) carry the trivial
    splitting; t moves them to x + s e2 inside the image of D^x.
    """
    F = D.F
    E = D.splitting_field
    t, e1, e2 = conjugator_for(D, d)
    C, M = e1.in_m2e(D), e2.in_m2e(D)
    ident = Mat2E.identity(E)

    def lin(x, s, m):
        return Mat2E(*(E.element(x) * i + E.element(s) * e for i, e in zip(ident.entries(), m.entries())))

    pairs_xs = _torus_sample(F, d, rng, sample_size)
    sample = [lin(x, s, C) for x, s in pairs_xs]

    def image(h):
        # h = x + s C has x = h.a and s = h.c
        return lin(h.a, h.c, M)

    n = len(sample)
    pairs = [(i, (i + 1) % n) for i in range(n)]
    return conjugation_transport(t, sample, image=image, pairs=pairs)


def sample_sl1(D: QuatAlg, n, rng, budget=None) -> list[Quat]:
    """Norm-one quaternions q / sqrt(Nrd q) from random integral q with square norm."""
    if not D.is_division():
        raise ValueError("sampling SL1 needs a division algebra")
    budget = 200 * n if budget is None else budget
    out = []
    tries = 0
    while len(out) < n:
        tries += 1
        if tries > budget:
            raise SamplingBudgetExceeded(f"found {len(out)} of {n} samples in {budget} tries")
        q = random_quat(D, rng, vmin=0, vmax=2)
        N = q.nrd()
        if not is_square(N, D.F):
            continue
        r = q * sqrt(N).inverse()
        if (r.nrd() - 1).is_zero():
            out.append(r)
    return out
