"""Cohomology of cyclic groups, of Z, and of F_{q^2}^x semidirect Z.

Finite abelian groups are products of cyclic factors Z/n_1 x ... x Z/n_r with
elements stored as tuples.  They are small here (at most a few hundred
elements), so kernels, images and quotients are computed by enumeration and
the structure of a quotient is read off from counts of m-torsion.

Coefficients are either a finite module or ``QZ``, the group Q/Z standing in
for the torsion of C^x.  Cohomology with QZ coefficients is tracked by
``CohResult.divisible``, the number of Q/Z summands.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

from .errors import ActionOrderMismatch, SizeLimitExceeded

QZ = "qz"
BRUTE_LIMIT = 64


def _prime_factors(n):
    out, k = [], 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class CohResult:
    """A finitely generated torsion group: invariant factors plus Q/Z summands."""

    factors: tuple = ()
    divisible: int = 0
    generators: tuple | None = field(default=None, compare=False)

    @property
    def order(self):
        return math.inf if self.divisible else math.prod(self.factors)

    @property
    def is_zero(self):
        return not self.factors and not self.divisible

    def torsion_order(self, m):
        """|A[m]|; each Q/Z summand contributes m."""
        return math.prod(math.gcd(f, m) for f in self.factors) * m**self.divisible

    def mod_order(self, m):
        """|A / mA|; Q/Z is divisible and contributes nothing."""
        return math.prod(math.gcd(f, m) for f in self.factors)

    def describe(self):
        parts = [f"Z/{f}" for f in self.factors] + ["Q/Z"] * self.divisible
        return " + ".join(parts) if parts else "0"

    def to_json(self):
        out = {"invariant_factors": list(self.factors), "order": None if self.divisible else self.order}
        if self.divisible:
            out["divisible_summands"] = self.divisible
        if self.generators is not None:
            out["generators"] = [list(g) if isinstance(g, tuple) else g for g in self.generators]
        return out


def invariant_factors(torsion_count, order):
    """Invariant factors of a finite abelian group from m -> |A[m]|."""
    if order == 1:
        return ()
    per_prime = []
    for p in _prime_factors(order):
        sizes = []  # sizes[k-1] = number of cyclic p-parts of order >= p^k
        prev, k = 1, 1
        while True:
            cur = torsion_count(p**k)
            r = round(math.log(cur // prev, p)) if cur > prev else 0
            if r == 0:
                break
            sizes.append(r)
            prev, k = cur, k + 1
        # exponents of the elementary divisors, largest first
        exps = []
        for k in range(len(sizes), 0, -1):
            nxt = sizes[k] if k < len(sizes) else 0
            exps += [k] * (sizes[k - 1] - nxt)
        per_prime.append((p, exps))
    width = max(len(e) for _, e in per_prime)
    factors = []
    for idx in range(width):
        f = 1
        for p, exps in per_prime:
            if idx < len(exps):
                f *= p ** exps[idx]
        factors.append(f)
    return tuple(sorted(factors))


class ModAut:
    """Finite abelian group sum Z/n_i with an automorphism sigma.

    ``sigma[i]`` is the image of the i-th generator as a tuple of coordinates.
    """

    def __init__(self, ns, sigma):
        self.ns = tuple(ns)
        self.sigma = tuple(tuple(c % n for c, n in zip(col, self.ns)) for col in sigma)
        if len(self.sigma) != len(self.ns):
            raise ValueError("sigma needs one image per generator")
        for i, n in enumerate(self.ns):
            if any(self.smul(n, self.sigma[i])):
                raise ValueError(f"sigma does not respect the order of generator {i}")
        if len(set(map(self.act, self.elements))) != self.order:
            raise ValueError("sigma is not bijective")

    @classmethod
    def cyclic(cls, n, s=1):
        """Z/n with sigma = multiplication by s."""
        return cls([n], [[s]])

    @classmethod
    def trivial(cls, ns):
        r = len(ns)
        return cls(ns, [[int(i == j) for j in range(r)] for i in range(r)])

    @cached_property
    def order(self):
        return math.prod(self.ns)

    @cached_property
    def elements(self):
        return list(itertools.product(*(range(n) for n in self.ns)))

    @property
    def zero(self):
        return tuple(0 for _ in self.ns)

    def add(self, x, y):
        return tuple((a + b) % n for a, b, n in zip(x, y, self.ns))

    def sub(self, x, y):
        return tuple((a - b) % n for a, b, n in zip(x, y, self.ns))

    def smul(self, k, x):
        return tuple(k * a % n for a, n in zip(x, self.ns))

    def act(self, x, times=1):
        for _ in range(times):
            out = self.zero
            for c, col in zip(x, self.sigma):
                out = self.add(out, self.smul(c, col))
            x = out
        return x

    def norm_map(self, x, k):
        """(1 + sigma + ... + sigma^(k-1)) x."""
        out, y = self.zero, x
        for _ in range(k):
            out = self.add(out, y)
            y = self.act(y)
        return out

    def power(self, k):
        """Same group with sigma replaced by sigma^k."""
        return ModAut(self.ns, [self.act(tuple(int(i == j) for j in range(len(self.ns))), k) for i in range(len(self.ns))])

    def action_order(self):
        k, x = 1, [self.act(g) for g in self.basis()]
        while x != self.basis():
            x = [self.act(g) for g in x]
            k += 1
        return k

    def basis(self):
        r = len(self.ns)
        return [tuple(int(i == j) for j in range(r)) for i in range(r)]

    def inverse_sigma(self):
        table = {self.act(x): x for x in self.elements}
        return [table[g] for g in self.basis()]

    # subgroup calculus ------------------------------------------------------

    def kernel(self, f):
        return frozenset(x for x in self.elements if f(x) == self.zero)

    def image(self, f):
        return frozenset(f(x) for x in self.elements)

    def quotient(self, K, I, with_generators=False):
        """Structure of K / I for subgroups I <= K."""
        if not I <= K:
            raise ValueError("quotient of non-nested subgroups")
        size = len(K) // len(I)

        def tors(m):
            return sum(1 for x in K if self.smul(m, x) in I) // len(I)

        gens = self._generators(K, I) if with_generators else None
        return CohResult(invariant_factors(tors, size), 0, gens)

    def _generators(self, K, I):
        span = set(I)
        gens = []
        for x in sorted(K):
            if x in span:
                continue
            gens.append(x)
            new = set(span)
            frontier = list(span)
            while frontier:
                y = self.add(frontier.pop(), x)
                if y not in new:
                    new.add(y)
                    frontier.append(y)
            span = new
        return tuple(gens)


def frobenius_module(q) -> ModAut:
    """F_{q^2}^x as Z/(q^2-1) (exponents of a primitive root), Frobenius = times q."""
    return ModAut.cyclic(q * q - 1, q)


def dual_module(M: ModAut) -> ModAut:
    """Hom(M, Q/Z) with the action f -> f o sigma^-1.

    A character f is stored as (f_i) with f(e_i) = f_i / n_i.
    """
    inv = M.inverse_sigma()
    ns = M.ns
    cols = []
    for i in range(len(ns)):
        # dual basis character e_i^*: value 1/n_i on e_i, 0 elsewhere
        col = []
        for j, nj in enumerate(ns):
            # (e_i^* o sigma^-1)(e_j) = coefficient of e_i in sigma^-1(e_j), over n_i
            num = inv[j][i] * nj
            if num % ns[i]:
                raise ValueError("dual action is not integral")
            col.append(num // ns[i])
        cols.append(col)
    return ModAut(ns, cols)


def _check_order(n, M):
    if n % M.action_order():
        raise ActionOrderMismatch(f"sigma has order {M.action_order()}, which does not divide {n}")


def cyclic_cohomology(n, M: ModAut, i, with_generators=False) -> CohResult:
    """H^i(Z/n, M) where the generator acts through sigma (i in 0, 1, 2)."""
    _check_order(n, M)
    fixed = M.kernel(lambda x: M.sub(M.act(x), x))
    if i == 0:
        return M.quotient(fixed, frozenset([M.zero]), with_generators)
    if i == 1:
        knorm = M.kernel(lambda x: M.norm_map(x, n))
        return M.quotient(knorm, M.image(lambda x: M.sub(M.act(x), x)), with_generators)
    if i == 2:
        return M.quotient(fixed, M.image(lambda x: M.norm_map(x, n)), with_generators)
    raise ValueError("only degrees 0, 1, 2 are supported")


def cyclic_trivial(n, coeff, i) -> CohResult:
    """H^i(Z/n, A) for trivial A = Z/a (given as an int) or A = QZ."""
    if coeff == QZ:
        if i == 0:
            return CohResult((), 1)
        return CohResult((n,) if i == 1 and n > 1 else ())
    return cyclic_cohomology(n, ModAut.cyclic(coeff), i)


def z_cohomology(M: ModAut):
    """(H^0, H^1) of Z acting through sigma: ker and coker of sigma - 1."""
    s1 = lambda x: M.sub(M.act(x), x)  # noqa: E731
    h0 = M.quotient(M.kernel(s1), frozenset([M.zero]))
    h1 = M.quotient(frozenset(M.elements), M.image(s1))
    return h0, h1


@dataclass
class RestrictionMap:
    """H^1(Z, M) -> H^1(kZ, M) on cokernels, x -> (1 + ... + sigma^(k-1)) x."""

    module: ModAut
    k: int
    source: CohResult
    target: CohResult
    kernel_order: int
    injective_on_2_torsion: bool
    bijective_on_2_torsion: bool

    def __call__(self, x):
        return self.module.norm_map(x, self.k)

    def to_json(self):
        return {
            "k": self.k,
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "kernel_order": self.kernel_order,
            "injective_on_2_torsion": self.injective_on_2_torsion,
            "bijective_on_2_torsion": self.bijective_on_2_torsion,
        }


def _cosets(M, I):
    seen, reps = set(), []
    for x in M.elements:
        if x not in seen:
            reps.append(x)
            seen.update(M.add(x, y) for y in I)
    return reps


def restrict_h1(M: ModAut, k) -> RestrictionMap:
    if k < 1:
        raise ValueError("k must be positive")
    allm = frozenset(M.elements)
    src_im = M.image(lambda x: M.sub(M.act(x), x))
    tgt_im = M.image(lambda x: M.sub(M.act(x, k), x))
    source = M.quotient(allm, src_im, with_generators=True)
    target = M.quotient(allm, tgt_im, with_generators=True)
    reps = _cosets(M, src_im)
    kernel = [x for x in reps if M.norm_map(x, k) in tgt_im]
    src_two = [x for x in reps if M.smul(2, x) in src_im]
    injective = all(x in src_im for x in src_two if M.norm_map(x, k) in tgt_im)
    tgt_two = {frozenset(M.add(y, z) for z in tgt_im) for y in M.elements if M.smul(2, y) in tgt_im}
    img_two = {frozenset(M.add(M.norm_map(x, k), z) for z in tgt_im) for x in src_two}
    return RestrictionMap(M, k, source, target, len(kernel), injective, injective and img_two == tgt_two)


# brute force H^2(G, Z/2) ------------------------------------------------------------


def group_table(spec: str):
    """Multiplication table for ``cyclic:n``, ``product:cyclic:n,cyclic:m`` or ``semidirect:q``.

    ``semidirect:q`` is the finite quotient Z/(q^2-1) x| Z/2 of F_{q^2}^x x| Z,
    the nontrivial element acting by multiplication by q.  Element 0 is the identity.
    """
    kind, _, rest = spec.partition(":")
    if kind == "cyclic":
        n = int(rest)
        return [[(i + j) % n for j in range(n)] for i in range(n)]
    if kind == "product":
        tables = [group_table(part) for part in rest.split(",")]
        sizes = [len(t) for t in tables]
        elems = list(itertools.product(*(range(s) for s in sizes)))
        index = {e: i for i, e in enumerate(elems)}
        return [[index[tuple(t[a][b] for t, a, b in zip(tables, x, y))] for y in elems] for x in elems]
    if kind == "semidirect":
        q = int(rest)
        m = q * q - 1
        elems = [(a, e) for e in range(2) for a in range(m)]
        index = {x: i for i, x in enumerate(elems)}

        def mul(x, y):
            return ((x[0] + (q ** x[1]) * y[0]) % m, (x[1] + y[1]) % 2)

        return [[index[mul(x, y)] for y in elems] for x in elems]
    raise ValueError(f"unknown group spec {spec!r}")


def _f2_rank(rows):
    pivots = {}
    for r in rows:
        while r:
            lead = r.bit_length() - 1
            if lead in pivots:
                r ^= pivots[lead]
            else:
                pivots[lead] = r
                break
    return len(pivots)


def brute_force_h2(table) -> CohResult:
    """dim H^2(G, Z/2) = dim Z^2 - dim B^2 from the raw cochain complex over F_2."""
    n = len(table)
    if n > BRUTE_LIMIT:
        raise SizeLimitExceeded(f"|G| = {n} exceeds {BRUTE_LIMIT}")

    def var(g, h):
        return 1 << (g * n + h)

    # delta f(g, h, k) = f(h, k) + f(gh, k) + f(g, hk) + f(g, h)
    rows = []
    for g in range(n):
        tg = table[g]
        for h in range(n):
            gh = tg[h]
            th = table[h]
            for k in range(n):
                rows.append(var(h, k) ^ var(gh, k) ^ var(g, th[k]) ^ var(g, h))
    dim_z2 = n * n - _f2_rank(rows)
    # delta c(g, h) = c(h) + c(gh) + c(g), as a map C^1 -> C^2
    cob = []
    for c in range(n):
        r = 0
        for g in range(n):
            for h in range(n):
                if (h == c) ^ (table[g][h] == c) ^ (g == c):
                    r |= var(g, h)
        cob.append(r)
    dim_b2 = _f2_rank(cob)
    return CohResult((2,) * (dim_z2 - dim_b2))


# F_{q^2}^x semidirect Z -----------------------------------------------------------


@dataclass(frozen=True)
class SemidirectDesc:
    """M x| Z with M = Z/m cyclic and the generator of Z acting by times s."""

    m: int
    s: int

    @classmethod
    def gprime(cls, q):
        return cls(q * q - 1, q % (q * q - 1))

    @classmethod
    def direct(cls, m):
        return cls(m, 1)

    def __post_init__(self):
        if (self.s * self.s - 1) % self.m and self.s != 1:
            raise ValueError("action must have order dividing 2")


def _induced_on_cyclic_cohomology(D: SemidirectDesc, coeff, i) -> ModAut | None:
    """H^i(M, A) with the action of the Z generator; None for the zero group.

    An automorphism x -> s x of M = Z/m acts on H^1 = Hom(M, A) and on
    H^2(M, A) = A (x) Hom(M, Q/Z) by precomposition with its inverse,
    i.e. as multiplication by s^-1.
    """
    h = cyclic_trivial(D.m, coeff, i)
    if h.is_zero:
        return None
    (g,) = h.factors
    return ModAut.cyclic(g, pow(D.s, -1, g) if g > 1 else 0)


def assemble_h2(D: SemidirectDesc, coeffs="z2") -> CohResult:
    """H^2(M x| Z, A) from 0 -> H^1(Z, H^1(M, A)) -> H^2(G, A) -> H^2(M, A)^Z -> 0."""
    coeff = QZ if coeffs == "qz" else 2
    h1 = _induced_on_cyclic_cohomology(D, coeff, 1)
    h2 = _induced_on_cyclic_cohomology(D, coeff, 2)
    left = z_cohomology(h1)[1] if h1 else CohResult()
    right = z_cohomology(h2)[0] if h2 else CohResult()
    if coeff == 2:
        # both ends are F_2-spaces, so the extension is elementary abelian
        if any(f != 2 for f in left.factors + right.factors):
            raise AssertionError("expected 2-torsion end terms")
        return CohResult(left.factors + right.factors)
    if not right.is_zero:
        raise AssertionError("H^2(M, Q/Z) should vanish for finite cyclic M")
    return left


def assemble_h2_gprime(q, coeffs="z2") -> CohResult:
    if q % 2 == 0:
        raise ValueError("q must be odd")
    return assemble_h2(SemidirectDesc.gprime(q), coeffs)


def _tensor(a: CohResult, b: CohResult) -> CohResult:
    return CohResult(tuple(sorted(math.gcd(x, y) for x in a.factors for y in b.factors if math.gcd(x, y) > 1)))


def kunneth_h2_mx(q) -> CohResult:
    """H^2(F_{q^2}^x x Z, Z/2) = H^2(M) + H^1(M) (x) H^1(Z)."""
    m = q * q - 1
    h2m = cyclic_trivial(m, 2, 2)
    h1m = cyclic_trivial(m, 2, 1)
    h1z = z_cohomology(ModAut.cyclic(2))[1]
    return CohResult(tuple(sorted(h2m.factors + _tensor(h1m, h1z).factors)))


def kunneth_truncation_check(q, t=4):
    """Brute force on M x Z/t; replacing Z by Z/t adds H^2(Z/t, Z/2) = Z/2 (t even).

    Returns (dim H^2(M x Z/t), dim H^2(Z/t), dim of the Kunneth answer).
    """
    m = q * q - 1
    full = brute_force_h2(group_table(f"product:cyclic:{m},cyclic:{t}"))
    corr = brute_force_h2(group_table(f"cyclic:{t}"))
    return len(full.factors), len(corr.factors), len(kunneth_h2_mx(q).factors)


def lemma_l_check(q) -> bool:
    """Restriction H^1(Z, dual) -> H^1(2Z, dual) is bijective on 2-torsion."""
    M = dual_module(frobenius_module(q))
    return restrict_h1(M, 2).bijective_on_2_torsion


def hilbert90(q):
    """(H^1(Z/2, F_{q^2}^x), |ker N|, |im(sigma - 1)|)."""
    M = frobenius_module(q)
    knorm = M.kernel(lambda x: M.norm_map(x, 2))
    im = M.image(lambda x: M.sub(M.act(x), x))
    return cyclic_cohomology(2, M, 1), len(knorm), len(im)


def h1_qz(D: SemidirectDesc) -> CohResult:
    """Hom(G^ab, Q/Z) with G^ab = M/(s-1)M x Z."""
    _, cok = z_cohomology(ModAut.cyclic(D.m, D.s))
    return CohResult(cok.factors, 1)


def bockstein_check(q, direct=False) -> dict:
    """|H^2(G, Z/2)| == |H^1(G, Q/Z) / 2| * |H^2(G, Q/Z)[2]|."""
    D = SemidirectDesc.direct(q * q - 1) if direct else SemidirectDesc.gprime(q)
    h2_z2 = assemble_h2(D, "z2")
    left = h1_qz(D).mod_order(2)
    right = assemble_h2(D, "qz").torsion_order(2)
    return {"h2_z2": h2_z2.order, "h1_mod_2": left, "h2_qz_2tors": right, "ok": h2_z2.order == left * right}
