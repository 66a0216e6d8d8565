"""Truncated arithmetic in Q_p and in quadratic extensions Q_p(sqrt d).

An element of Q_p is stored as ``p**val * unit`` with ``unit`` known modulo
``p**(absprec - val)``.  Zero comes in two flavours: the exact zero (``absprec``
is infinite, produced by literals and by products/sums of exact zeros) and a
zero known only modulo ``p**absprec``, produced by cancellation.  Callers that
must decide whether something vanishes distinguish the two.

An element of E = Q_p(sqrt d) is a pair of Q_p coordinates ``a + b*sqrt(d)``.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

from .errors import DivisionByZero, InsufficientPrecision, NotAUnit

INF = math.inf
DEFAULT_PRECISION = int(os.environ.get("METASPLIT_PRECISION", "24"))


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % k for k in range(2, math.isqrt(n) + 1))


def legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def smallest_nonresidue(p: int) -> int:
    return next(u for u in range(2, p) if legendre(u, p) == -1)


def _int_is_square(n: int, p: int) -> bool:
    v = vp(n, p)
    if v % 2:
        return False
    u = n // p**v
    if p == 2:
        return u % 8 == 1
    return legendre(u, p) == 1


class PadicF:
    """Element of Q_p at finite precision."""

    __slots__ = ("p", "val", "unit", "absprec")

    def __init__(self, p, val, unit, absprec):
        self.p = p
        self.val = val
        self.unit = unit
        self.absprec = absprec

    # construction -------------------------------------------------------

    @classmethod
    def exact_zero(cls, p):
        return cls(p, INF, 0, INF)

    @classmethod
    def zero_at(cls, p, absprec):
        if absprec == INF:
            return cls.exact_zero(p)
        return cls(p, INF, 0, absprec)

    @classmethod
    def from_rational(cls, value, p, prec=DEFAULT_PRECISION):
        """``value`` (int or Fraction) with ``prec`` significant digits."""
        value = Fraction(value)
        if value == 0:
            return cls.exact_zero(p)
        num, den = value.numerator, value.denominator
        v = vp(num, p) - vp(den, p)
        num //= p ** vp(num, p)
        den //= p ** vp(den, p)
        mod = p**prec
        return cls(p, v, num * pow(den, -1, mod) % mod, v + prec)

    @classmethod
    def _at(cls, p, n, shift, absprec):
        # the number n * p**shift, known modulo p**absprec
        rel = absprec - shift
        if rel <= 0:
            return cls.zero_at(p, absprec)
        n %= p**rel
        if n == 0:
            return cls.zero_at(p, absprec)
        v = vp(n, p)
        return cls(p, shift + v, n // p**v, absprec)

    # inspection ---------------------------------------------------------

    @property
    def prec(self):
        """Relative precision (significant digits); 0 for any zero."""
        if self.val == INF:
            return 0 if self.absprec != INF else INF
        return self.absprec - self.val

    def is_zero(self):
        return self.val == INF

    def is_exact_zero(self):
        return self.absprec == INF

    def _lower(self):
        # lower bound for the valuation
        return self.absprec if self.val == INF else self.val

    def to_int_mod(self, k):
        """Integer r with self = r mod p**k; self must be integral to that depth."""
        if self.absprec < k:
            raise InsufficientPrecision(f"need {k} digits, have absprec {self.absprec}")
        if self.val == INF:
            return 0
        if self.val < 0:
            raise NotAUnit("element is not integral")
        if self.val >= k:
            return 0
        return self.unit * self.p**self.val % self.p**k

    def lift(self):
        """Rational representative (the truncated digits)."""
        if self.val == INF:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def residue(self):
        if self.val != 0:
            raise NotAUnit(f"valuation {self.val} != 0")
        return self.unit % self.p

    # arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PadicF):
            if other.p != self.p:
                raise ValueError("operands live in different fields")
            return other
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return PadicF.exact_zero(self.p)
            if self.absprec == INF:
                digits = DEFAULT_PRECISION
            else:
                v = vp(Fraction(other).numerator, self.p) - vp(Fraction(other).denominator, self.p)
                digits = max(self.absprec - v, self.prec, 1)
            return PadicF.from_rational(other, self.p, digits)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.absprec == INF and self.val == INF:
            return other
        if other.absprec == INF and other.val == INF:
            return self
        absprec = min(self.absprec, other.absprec)
        m = min(self.val, other.val)
        if m == INF:
            return PadicF.zero_at(self.p, absprec)
        p = self.p
        total = 0
        if self.val != INF:
            total += self.unit * p ** (self.val - m)
        if other.val != INF:
            total += other.unit * p ** (other.val - m)
        return PadicF._at(p, total, m, absprec)

    __radd__ = __add__

    def __neg__(self):
        if self.val == INF:
            return self
        mod = self.p**self.prec
        return PadicF(self.p, self.val, -self.unit % mod, self.absprec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        if self.is_exact_zero() or other.is_exact_zero():
            return PadicF.exact_zero(p)
        if self.val == INF or other.val == INF:
            return PadicF.zero_at(p, self._lower() + other._lower())
        rel = min(self.prec, other.prec)
        val = self.val + other.val
        return PadicF(p, val, self.unit * other.unit % p**rel, val + rel)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_exact_zero():
            raise DivisionByZero("inverse of exact zero")
        if self.val == INF:
            raise InsufficientPrecision("inverse of an element indistinguishable from zero")
        rel = self.prec
        return PadicF(self.p, -self.val, pow(self.unit, -1, self.p**rel), rel - self.val)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = PadicF.from_rational(1, self.p, self.prec if self.prec != INF else DEFAULT_PRECISION)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        return format_element(self)


class PadicE:
    """Element a + b*sqrt(d) of a quadratic extension."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field, a, b):
        self.field = field
        self.a = a
        self.b = b

    def _coerce(self, other):
        if isinstance(other, PadicE):
            return other
        if isinstance(other, (PadicF, int, Fraction)):
            return self.field.element(other)
        return NotImplemented

    def is_zero(self):
        return self.a.is_zero() and self.b.is_zero()

    def is_exact_zero(self):
        return self.a.is_exact_zero() and self.b.is_exact_zero()

    def in_base(self):
        """True when the sqrt(d) coordinate is an exact zero."""
        return self.b.is_exact_zero()

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return PadicE(self.field, self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return PadicE(self.field, -self.a, -self.b)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return PadicE(self.field, self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d = self.field.d_elt
        a = self.a * other.a + d * (self.b * other.b)
        b = self.a * other.b + self.b * other.a
        return PadicE(self.field, a, b)

    __rmul__ = __mul__

    def conj(self):
        return PadicE(self.field, self.a, -self.b)

    def norm(self):
        return self.a * self.a - self.field.d_elt * (self.b * self.b)

    def inverse(self):
        if self.is_exact_zero():
            raise DivisionByZero("inverse of exact zero")
        n = self.norm()
        if n.is_zero():
            raise InsufficientPrecision("norm indistinguishable from zero")
        ninv = n.inverse()
        return PadicE(self.field, self.a * ninv, -(self.b * ninv))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        return format_element(self)


@dataclass(frozen=True)
class ResidueField:
    """F_p, or F_p[w]/(w^2 - t*w - n) when ``degree`` is 2.

    Prime-field elements are ints; degree-2 elements are pairs (x, y) = x + y*w.
    """

    p: int
    degree: int = 1
    t: int = 0
    n: int = 0

    @property
    def q(self):
        return self.p**self.degree

    def mul(self, x, y):
        if self.degree == 1:
            return x * y % self.p
        a, b = x
        c, d = y
        bd = b * d
        return ((a * c + bd * self.n) % self.p, (a * d + b * c + bd * self.t) % self.p)

    def power(self, x, k):
        result = 1 if self.degree == 1 else (1, 0)
        for _ in range(k % (self.q - 1)):
            result = self.mul(result, x)
        return result

    def norm(self, x):
        if self.degree == 1:
            return x % self.p
        a, b = x
        return (a * a + self.t * a * b - self.n * b * b) % self.p

    def chi(self, x):
        """Quadratic character of the multiplicative group."""
        if self.p == 2:
            return 1
        nx = self.norm(x)
        if nx == 0:
            raise NotAUnit("zero has no quadratic character")
        return legendre(nx, self.p)


@dataclass(frozen=True)
class FieldDesc:
    """Q_p (``d is None``) or Q_p(sqrt d), with a working precision in p-adic digits."""

    p: int
    d: int | None = None
    prec: int = DEFAULT_PRECISION

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.prec < (7 if self.p == 2 else 3):
            raise ValueError(f"precision {self.prec} below certification minimum")
        if self.d is not None:
            if self.d == 0 or vp(self.d, self.p) > 1:
                raise ValueError("d must have valuation 0 or 1")
            if _int_is_square(self.d, self.p):
                raise ValueError(f"{self.d} is a square in Q_{self.p}")

    def __str__(self):
        return f"Q{self.p}" if self.d is None else f"Q{self.p}(sqrt{self.d})"

    # structure ------------------------------------------------------------

    @property
    def is_base(self):
        return self.d is None

    @property
    def base(self):
        return FieldDesc(self.p, None, self.prec)

    def ext(self, d):
        return FieldDesc(self.p, d, self.prec)

    def with_prec(self, prec):
        return FieldDesc(self.p, self.d, prec)

    @property
    def unramified(self):
        if self.d is None:
            return False
        return self.d % self.p != 0 and (self.p != 2 or self.d % 4 == 1)

    @property
    def ramified(self):
        return self.d is not None and not self.unramified

    @property
    def e(self):
        return 2 if self.ramified else 1

    @property
    def f(self):
        return 2 if self.unramified else 1

    @property
    def v2(self):
        """Valuation of 2 in this field's normalisation."""
        return self.e if self.p == 2 else 0

    @property
    def half_integral(self):
        # ring of integers is Z_p[(1+sqrt d)/2]
        return self.p == 2 and self.d is not None and self.d % 4 == 1

    @property
    def omega(self):
        """(t, n) with w^2 = t*w + n for the integral generator w."""
        if self.d is None:
            return (0, 0)
        if self.half_integral:
            return (1, (self.d - 1) // 4)
        return (0, self.d)

    @property
    def key_digits(self):
        # p**M * O lies inside pi**(2*v(2)+1) * O
        return 3 if self.p == 2 else 1

    @cached_property
    def residue_field(self):
        if self.unramified:
            t, n = self.omega
            return ResidueField(self.p, 2, t % self.p, n % self.p)
        return ResidueField(self.p)

    @property
    def omega_residue(self):
        """For ramified E: the r in F_p with w = r mod pi."""
        return 0 if self.d % self.p == 0 else 1

    @property
    def uniformizer_coords(self):
        """Integral coordinates (A, B) of the chosen uniformizer A + B*w."""
        if self.ramified:
            return (0, 1) if self.d % self.p == 0 else (1, 1)
        return (self.p, 0)

    # elements -------------------------------------------------------------

    @cached_property
    def d_elt(self):
        return PadicF.from_rational(self.d, self.p, self.prec)

    def element(self, value, b=0):
        """Build an element; ``value`` may be int, Fraction, PadicF or PadicE."""
        if isinstance(value, PadicE):
            if self.is_base:
                if not value.in_base():
                    raise ValueError("element does not lie in the base field")
                return value.a
            return value
        a = value if isinstance(value, PadicF) else PadicF.from_rational(value, self.p, self.prec)
        if self.is_base:
            return a
        bb = b if isinstance(b, PadicF) else PadicF.from_rational(b, self.p, self.prec)
        return PadicE(self, a, bb)

    def from_integral(self, A, B=0):
        """Element A + B*w for integers A, B in the integral basis."""
        if self.half_integral:
            return self.element(Fraction(2 * A + B, 2), Fraction(B, 2))
        return self.element(A, B)

    def zero(self):
        return self.element(0)

    def one(self):
        return self.element(1)

    @cached_property
    def uniformizer(self):
        return self.from_integral(*self.uniformizer_coords)

    @cached_property
    def _uniformizer_inv(self):
        return 1 / self.uniformizer if not self.is_base else PadicF.from_rational(Fraction(1, self.p), self.p, self.prec)

    # valuation and unit parts ----------------------------------------------

    def valuation(self, x):
        if isinstance(x, PadicF):
            if self.is_base:
                return x.val
            x = self.element(x)
        if x.is_exact_zero():
            return INF
        if self.is_base:
            if x.val == INF:
                raise InsufficientPrecision("element indistinguishable from zero")
            return x.val
        n = x.norm()
        if n.is_zero():
            raise InsufficientPrecision("norm indistinguishable from zero")
        if self.unramified:
            return n.val // 2
        return n.val

    def unit_part(self, x):
        """(v, u) with x = pi**v * u, u a unit."""
        x = self.element(x)
        v = self.valuation(x)
        if v == INF:
            raise DivisionByZero("zero has no unit part")
        if self.is_base:
            return v, PadicF(self.p, 0, x.unit, x.absprec - x.val)
        if v == 0:
            return 0, x
        if v > 0:
            return v, x * self._uniformizer_inv**v
        return v, x * self.uniformizer ** (-v)

    def integral_coords(self, x):
        """Coordinates (A, B) of x in the integral basis (1, w)."""
        x = self.element(x)
        if self.is_base:
            return x, PadicF.exact_zero(self.p)
        if self.half_integral:
            return x.a - x.b, x.b * 2
        return x.a, x.b

    def unit_key(self, u, digits=None):
        """Integral coordinates of a unit reduced modulo p**digits, as ints."""
        k = self.key_digits if digits is None else digits
        A, B = self.integral_coords(u)
        return (A.to_int_mod(k), B.to_int_mod(k))

    def residue_image(self, x):
        """Image of a unit in the residue field (int for F_p, pair for F_{p^2})."""
        x = self.element(x)
        if self.valuation(x) != 0:
            raise NotAUnit("residue_image needs a unit")
        A, B = self.unit_key(x, 1)
        if self.unramified:
            return (A, B)
        if self.is_base:
            return A
        return (A + self.omega_residue * B) % self.p


# exact integral ring arithmetic (shared with the conic oracle) -----------------


def ring_mul(x, y, omega):
    t, n = omega
    a, b = x
    c, d = y
    bd = b * d
    return (a * c + bd * n, a * d + b * c + bd * t)


def ring_norm(x, omega):
    t, n = omega
    a, b = x
    return a * a + t * a * b - n * b * b


def ring_val(x, K):
    """Exact valuation of an integral element A + B*w given as ints."""
    if x == (0, 0):
        return INF
    v = vp(ring_norm(x, K.omega), K.p)
    return v if K.ramified else v // 2


# square classes -------------------------------------------------------------------


@dataclass(frozen=True)
class UnitClassData:
    digits: int
    classes: dict  # unit key -> unit class index
    rep_keys: tuple


def _candidate_keys(K, mod):
    p = K.p
    if p == 2:
        prefix = [1, -1, 5, -5]
    else:
        u = smallest_nonresidue(p)
        prefix = [1, u, -1, -u, 5, -5]
    half = mod // 2
    rng = range(-half, mod - half)
    rest = sorted(((A, B) for A in rng for B in (rng if not K.is_base else [0])),
                  key=lambda ab: (ab[1] != 0, abs(ab[1]), abs(ab[0]), ab[0] < 0, ab[1] < 0))
    seen = set()
    for A, B in [(a, 0) for a in prefix] + rest:
        key = (A % mod, B % mod)
        if key not in seen:
            seen.add(key)
            yield key, (A, B)


@lru_cache(maxsize=None)
def unit_class_data(p, d):
    """Cosets of unit squares in (O/p^M)^x, M = key digits."""
    K = FieldDesc(p, d)
    M = K.key_digits
    mod = p**M
    omega = K.omega
    units = [
        (A, B)
        for A in range(mod)
        for B in (range(mod) if d is not None else [0])
        if ring_norm((A, B), omega) % p
    ]
    squares = {tuple(c % mod for c in ring_mul(s, s, omega)) for s in units}
    classes = {}
    reps = []
    for key, small in _candidate_keys(K, mod):
        if key in classes or ring_norm(key, omega) % p == 0:
            continue
        idx = len(reps)
        reps.append(small)
        for s in squares:
            classes[tuple(c % mod for c in ring_mul(key, s, omega))] = idx
    return UnitClassData(M, classes, tuple(reps))


def square_classes(K):
    """Representatives of K^x/K^x2: units first, then uniformizer times units."""
    data = unit_class_data(K.p, K.d)
    units = [K.from_integral(A, B) for A, B in data.rep_keys]
    return units + [K.uniformizer * u for u in units]


def class_index(x, K):
    """Index into ``square_classes(K)`` of the class of x."""
    v, u = K.unit_part(x)
    data = unit_class_data(K.p, K.d)
    return (v % 2) * len(data.rep_keys) + data.classes[K.unit_key(u)]


def is_square(x, K=None):
    if K is None:
        K = x.field if isinstance(x, PadicE) else FieldDesc(x.p)
    x = K.element(x)
    if x.is_exact_zero():
        return True
    if x.is_zero():
        raise InsufficientPrecision("cannot decide squareness of an unresolved zero")
    return class_index(x, K) == 0


def norm(x):
    """N_{E/F}(x) = a^2 - d b^2."""
    return x.norm()


def sqrt(x):
    """Square root in Q_p of a square; precision drops by one digit when p = 2."""
    p = x.p
    if x.is_exact_zero():
        return x
    if x.is_zero():
        raise InsufficientPrecision("square root of an unresolved zero")
    if x.val % 2:
        raise ValueError("not a square (odd valuation)")
    rel = x.prec
    u = x.unit
    if p == 2:
        if rel < 3:
            raise InsufficientPrecision("need the unit modulo 8")
        if u % 8 != 1:
            raise ValueError("not a square")
        s = 1
        for m in range(3, rel):
            if (s * s - u) % 2 ** (m + 1):
                s += 2 ** (m - 1)
        out_rel = rel - 1
        s %= 2**out_rel
    else:
        s = next((r for r in range(1, p) if (r * r - u) % p == 0), None)
        if s is None:
            raise ValueError("not a square")
        k = 1
        while k < rel:
            k = min(2 * k, rel)
            mod = p**k
            s = (s - (s * s - u) * pow(2 * s, -1, mod)) % mod
        out_rel = rel
    return PadicF(p, x.val // 2, s, x.val // 2 + out_rel)


# sampling -------------------------------------------------------------------------


def random_base(K, rng, vmin=-3, vmax=3):
    p, N = K.p, K.prec
    unit = rng.randrange(1, p**N)
    while unit % p == 0:
        unit = rng.randrange(1, p**N)
    v = rng.randint(vmin, vmax)
    return PadicF(p, v, unit, v + N)


def random_element(K, rng, vmin=-3, vmax=3):
    """Random nonzero element; extension elements sometimes have a zero coordinate."""
    if K.is_base:
        return random_base(K, rng, vmin, vmax)
    roll = rng.random()
    zero = PadicF.exact_zero(K.p)
    if roll < 0.15:
        return PadicE(K, random_base(K, rng, vmin, vmax), zero)
    if roll < 0.25:
        return PadicE(K, zero, random_base(K, rng, vmin, vmax))
    return PadicE(K, random_base(K, rng, vmin, vmax), random_base(K, rng, vmin, vmax))


# text format ----------------------------------------------------------------------


def _format_base(x):
    if x.is_zero():
        return "0"
    return f"{x.p}^{x.val} * {x.unit}"


def format_element(x):
    """``p^k * u`` (plus ``+ (p^k * u) * sqrt(d)``); zero is ``0``."""
    if isinstance(x, PadicF):
        return _format_base(x)
    if x.b.is_zero():
        return _format_base(x.a)
    return f"{_format_base(x.a)} + ({_format_base(x.b)}) * sqrt({x.field.d})"


_TERM = r"\s*(?:(?P<{n}p>\d+)\s*\^\s*(?P<{n}k>-?\d+)\s*\*\s*(?P<{n}u>-?\d+)|(?P<{n}r>-?\d+(?:\s*/\s*\d+)?))\s*"
_ELEMENT_RE = re.compile(
    "^" + _TERM.format(n="a") + r"(?:\+\s*\(" + _TERM.format(n="b") + r"\)\s*\*\s*sqrt\(\s*(?P<d>-?\d+)\s*\)\s*)?$"
)


def _parse_term(m, tag, K):
    if m.group(tag + "r") is not None:
        return PadicF.from_rational(Fraction(m.group(tag + "r").replace(" ", "")), K.p, K.prec)
    base = int(m.group(tag + "p"))
    if base != K.p:
        raise ValueError(f"literal uses prime {base}, field has p = {K.p}")
    k = int(m.group(tag + "k"))
    u = int(m.group(tag + "u"))
    return PadicF.from_rational(Fraction(u) * Fraction(base) ** k, K.p, K.prec)


def parse_element(text, K):
    """Inverse of :func:`format_element` (rationals like ``1/3`` are accepted too)."""
    m = _ELEMENT_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse element literal {text!r}")
    a = _parse_term(m, "a", K)
    if m.group("d") is None:
        return K.element(a)
    if K.is_base or int(m.group("d")) != K.d:
        raise ValueError(f"literal mentions sqrt({m.group('d')}) but the field is {K}")
    return PadicE(K, a, _parse_term(m, "b", K))
