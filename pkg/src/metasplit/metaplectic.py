"""Kubota's 2-cocycle on SL2(E) and GL2(E) and the metaplectic group law.

Matrices are 2 x 2 over a quadratic extension E; matrices "over F" are those
whose entries have an exactly-zero sqrt(d) coordinate.  The cocycle takes
values in {+1, -1} and is built from Hilbert symbols of E:

    x(g) = c if c != 0 else d                      for g = [[a, b], [c, d]]
    beta_SL(g, h) = (x(gh)/x(g), x(gh)/x(h))_E
    beta_GL(g, h) = (x(gh)/x(g), x(gh)/(x(h) det g))_E

Every function that needs the product ``g1 @ g2`` accepts it precomputed via
``product=``; callers use that when they know the product in closed form and
would otherwise lose an exact zero to cancellation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CertificationFailed, EntryNotInBaseField, InsufficientPrecision
from .hilbert import hilbert, hilbert_report
from .padic import FieldDesc, PadicE, format_element, parse_element, random_base, random_element


class Mat2E:
    """Invertible 2 x 2 matrix [[a, b], [c, d]] over E."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def of(cls, E: FieldDesc, a, b, c, d):
        return cls(*(E.element(v) for v in (a, b, c, d)))

    @classmethod
    def identity(cls, E):
        return cls.of(E, 1, 0, 0, 1)

    @classmethod
    def parse(cls, text, E):
        """Semicolon-separated rows of comma-separated element literals."""
        rows = [r.split(",") for r in text.split(";")]
        if len(rows) != 2 or any(len(r) != 2 for r in rows):
            raise ValueError(f"expected a 2x2 matrix, got {text!r}")
        return cls(*(E.element(parse_element(v.strip(), E)) for r in rows for v in r))

    @property
    def field(self):
        return self.a.field

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __matmul__(self, o):
        return Mat2E(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def __sub__(self, o):
        return Mat2E(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def scale(self, s):
        return Mat2E(self.a * s, self.b * s, self.c * s, self.d * s)

    def det(self):
        return self.a * self.d - self.b * self.c

    def inverse(self):
        inv = self.det().inverse()
        return Mat2E(self.d * inv, -self.b * inv, -self.c * inv, self.a * inv)

    def is_base(self):
        return all(x.in_base() for x in self.entries())

    def is_close(self, o):
        """Equal at the available precision."""
        return all(x.is_zero() for x in (self - o).entries())

    def __repr__(self):
        f = format_element
        return f"{f(self.a)}, {f(self.b)}; {f(self.c)}, {f(self.d)}"


@dataclass(frozen=True)
class MetaElem:
    g: Mat2E
    zeta: int


@dataclass
class CochainCert:
    """Finite witness that beta is a coboundary on a sampled set.

    ``mu[i]`` is the sign attached to ``elements[i]``; each triple (i, j, k) in
    ``pairs`` records a checked product elements[i] @ elements[j] = elements[k]
    with beta(g_i, g_j) * mu_k == mu_i * mu_j.
    """

    elements: list = field(default_factory=list)
    mu: list = field(default_factory=list)
    pairs: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    conjugator: Mat2E | None = None

    @property
    def all_passed(self):
        return bool(self.pairs) and not self.failures

    def add(self, g, mu):
        self.elements.append(g)
        self.mu.append(mu)
        return len(self.elements) - 1


def kubota_x(g: Mat2E) -> PadicE:
    """Lower-left entry if it is nonzero, else the lower-right entry."""
    c = g.c
    if c.is_exact_zero():
        return g.d
    if c.is_zero():
        raise InsufficientPrecision("lower-left entry is neither certified zero nor nonzero")
    return c


def _check_det_one(g):
    if not (g.det() - 1).is_zero():
        raise ValueError("matrix is not in SL2")


def cocycle_sl2(g1: Mat2E, g2: Mat2E, product: Mat2E | None = None) -> int:
    _check_det_one(g1)
    _check_det_one(g2)
    g12 = g1 @ g2 if product is None else product
    E = g1.field
    x12 = kubota_x(g12)
    return hilbert(x12 / kubota_x(g1), x12 / kubota_x(g2), E)


def cocycle_gl2(g1: Mat2E, g2: Mat2E, product: Mat2E | None = None) -> int:
    g12 = g1 @ g2 if product is None else product
    E = g1.field
    x12 = kubota_x(g12)
    return hilbert(x12 / kubota_x(g1), x12 / (kubota_x(g2) * g1.det()), E)


def cocycle_report(g1, g2, group="gl2") -> dict:
    """Sign with the two symbol arguments and the depth that certified it."""
    if group == "sl2":
        _check_det_one(g1)
        _check_det_one(g2)
    x12 = kubota_x(g1 @ g2)
    s = x12 / kubota_x(g1)
    t = x12 / kubota_x(g2) if group == "sl2" else x12 / (kubota_x(g2) * g1.det())
    rep = hilbert_report(s, t, g1.field)
    return {
        "group": group,
        "sign": rep["sign"],
        "symbol_args": [format_element(s), format_element(t)],
        "backend": rep["backend"],
        "certification_depth": rep["certification_depth"],
    }


def cocycle(g1, g2, group="gl2", product=None):
    if group == "sl2":
        return cocycle_sl2(g1, g2, product)
    return cocycle_gl2(g1, g2, product)


def meta_mul(m1: MetaElem, m2: MetaElem, product: Mat2E | None = None) -> MetaElem:
    g = m1.g @ m2.g if product is None else product
    return MetaElem(g, m1.zeta * m2.zeta * cocycle_gl2(m1.g, m2.g, product=g))


def verify_cocycle_identity(g1, g2, g3, group="gl2") -> bool:
    """beta(g1,g2) beta(g1g2,g3) == beta(g1,g2g3) beta(g2,g3)."""
    g12 = g1 @ g2
    g23 = g2 @ g3
    g123 = g12 @ g3
    lhs = cocycle(g1, g2, group, g12) * cocycle(g12, g3, group, g123)
    rhs = cocycle(g1, g23, group, g123) * cocycle(g2, g3, group, g23)
    return lhs == rhs


def splitting_gl2f(g: Mat2E) -> MetaElem:
    """The trivial section g -> (g, +1) over GL2(F)."""
    if not g.is_base():
        raise EntryNotInBaseField(f"{g!r} has entries outside the base field")
    return MetaElem(g, 1)


def conjugation_transport(t: Mat2E, sample, image=None, pairs=None) -> CochainCert:
    """Transport the trivial splitting on ``sample`` to its conjugate by t.

    ``sample`` holds matrices h on which beta is trivial; their conjugates
    g = t h t^-1 get mu(g) = beta(t, h) beta(th, t^-1) beta(t, t^-1)^-1.
    ``image(h)`` may supply t h t^-1 in closed form (it is checked against
    the matrix product).  ``pairs`` lists index pairs (i, j) to certify;
    by default consecutive pairs and every element squared.
    Raises CertificationFailed on the first violated pair.
    """
    E = t.field
    t_inv = t.inverse()
    ident = Mat2E.identity(E)
    b_tt = cocycle_gl2(t, t_inv, product=ident)
    cert = CochainCert(conjugator=t)

    def transport(h):
        g = image(h) if image is not None else t @ h @ t_inv
        th = t @ h
        if not th.is_close(g @ t):
            raise CertificationFailed("supplied image is not the conjugate", witness=h)
        mu = cocycle_gl2(t, h, product=th) * cocycle_gl2(th, t_inv, product=g) * b_tt
        return g, mu

    idx = [cert.add(*transport(h)) for h in sample]
    if pairs is None:
        n = len(sample)
        pairs = [(i, (i + 1) % n) for i in range(n)] + [(i, i) for i in range(n)]
    for i, j in pairs:
        h1, h2 = sample[i], sample[j]
        h12 = h1 @ h2
        if cocycle_gl2(h1, h2, product=h12) != 1:
            cert.failures.append((i, j, "beta nontrivial on the source pair"))
            raise CertificationFailed(f"beta nontrivial on source pair {(i, j)}", witness=(i, j))
        g12, mu12 = transport(h12)
        k = cert.add(g12, mu12)
        g1, g2 = cert.elements[idx[i]], cert.elements[idx[j]]
        if not (g1 @ g2).is_close(g12):
            raise CertificationFailed("product image mismatch", witness=(i, j))
        lhs = cocycle_gl2(g1, g2, product=g12) * mu12
        if lhs != cert.mu[idx[i]] * cert.mu[idx[j]]:
            cert.failures.append((i, j, "trivialisation violated"))
            raise CertificationFailed(f"beta is not trivialised on pair {(i, j)}", witness=(i, j))
        cert.pairs.append((idx[i], idx[j], k))
    return cert


# sampling ---------------------------------------------------------------------------


def _entry(E, rng, base=False):
    if base:
        return E.element(random_base(E.base, rng))
    return random_element(E, rng)


def random_gl2(E: FieldDesc, rng, base=False) -> Mat2E:
    """Random invertible matrix; about one in five is upper triangular."""
    while True:
        if rng.random() < 0.2:
            g = Mat2E(_entry(E, rng, base), _entry(E, rng, base), E.zero(), _entry(E, rng, base))
        else:
            g = Mat2E(*(_entry(E, rng, base) for _ in range(4)))
        if not g.det().is_zero():
            return g


def random_sl2(E: FieldDesc, rng, base=False) -> Mat2E:
    """Random SL2 element: u(s1) w h(t) u(s2) in the big cell, or h(t) u(s)."""
    t = _entry(E, rng, base)
    s1 = _entry(E, rng, base) if rng.random() < 0.9 else E.zero()
    s2 = _entry(E, rng, base) if rng.random() < 0.9 else E.zero()
    t_inv = 1 / t
    if rng.random() < 0.25:
        return Mat2E(t, t * s1, E.zero(), t_inv)
    return Mat2E(-(t * s1), t_inv - t * s1 * s2, -t, -(t * s2))


def random_diag_e1(E: FieldDesc, rng) -> Mat2E:
    return Mat2E(random_element(E, rng), E.zero(), E.zero(), E.one())


def torus(a) -> Mat2E:
    """diag(a, a^-1)."""
    E = a.field
    return Mat2E(a, E.zero(), E.zero(), 1 / a)
