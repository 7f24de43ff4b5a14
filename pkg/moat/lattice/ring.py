"""
Coefficient rings.

A `CoefficientRing` is either ℤ or the maximal order ℤ[ω] of an imaginary
quadratic field, where ω² = t·ω − n. Elements are `RingElt` values a + b·ω with
exact rational coordinates, so that fractional multiples (for instance P⁻¹
applied to a vector) can be written down directly.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from itertools import product
from math import isqrt

from sympy.functions.combinatorial.numbers import legendre_symbol
from sympy.ntheory import factorint, isprime, sqrt_mod
from sympy.polys.domains import QQ

from .errors import (
    DyadicUnsupported,
    NoGeneratorFound,
    NonFundamentalDiscriminant,
    RealQuadraticUnsupported,
    RingMismatch,
    ValidationError,
)

logger = logging.getLogger(__name__)

__all__ = [
    "CoefficientRing",
    "RingElt",
    "PrimeIdealData",
    "ResidueField",
    "make_ring",
    "conj",
    "split_prime",
    "principal_generator",
    "residue_map",
]

RATIONAL = "rational-integers"
QUADRATIC = "imaginary-quadratic"

SPLIT = "split"
INERT = "inert"
RAMIFIED = "ramified"


def _squarefree(m: int) -> bool:
    return all(e == 1 for e in factorint(abs(m)).values())


def residue_int(x, p: int) -> int:
    """
    Reduce a p-integral rational modulo p.
    """
    num, den = int(x.numerator), int(x.denominator)
    if den % p == 0:
        raise ValidationError(f"{x} is not integral at {p}")
    return num * pow(den, -1, p) % p


@dataclass(frozen=True)
class CoefficientRing:
    """
    ℤ (``disc == 1``) or the maximal order of ℚ(√disc).

    ω satisfies ω² = t·ω − n; t is 1 iff disc ≡ 1 mod 4.
    """

    disc: int
    t: int = 0
    n: int = 0

    @property
    def kind(self) -> str:  # noqa:D102
        return RATIONAL if self.disc == 1 else QUADRATIC

    @property
    def d(self) -> int:
        "rank of the ring over ℤ"
        return 1 if self.disc == 1 else 2

    def __call__(self, a=0, b=0) -> RingElt:
        a = QQ.convert(a)
        b = QQ.convert(b)
        if b and self.d == 1:
            raise ValidationError("ℤ has no ω component")
        return RingElt(self, a, b)

    @property
    def omega(self) -> RingElt:  # noqa:D102
        return self(0, 1)

    def elements_of_norm(self, norm: int) -> list[RingElt]:
        """
        All elements of the given norm, found exhaustively.

        (2a + tb)² + |D|·b² = 4·norm bounds b, then a is a root of a quadratic.
        """
        res = []
        if self.d == 1:
            s = isqrt(norm)
            if s * s == norm:
                res = [self(s), self(-s)] if s else [self(0)]
            return res
        t, n = self.t, self.n
        bmax = isqrt(4 * norm // -self.disc)
        for b in range(-bmax, bmax + 1):
            dis = t * t * b * b - 4 * (n * b * b - norm)
            if dis < 0:
                continue
            s = isqrt(dis)
            if s * s != dis:
                continue
            for sq in {s, -s}:
                num = -t * b + sq
                if num % 2 == 0:
                    res.append(self(num // 2, b))
        return res

    @cached_property
    def units(self) -> list[RingElt]:
        "the unit group, in a fixed order"
        return sorted(self.elements_of_norm(1), key=_associate_key)

    def __str__(self):
        if self.d == 1:
            return "ℤ"
        return f"ℤ[ω] (D={self.disc}, ω²={self.t}ω-{self.n})"


def _associate_key(x: RingElt):
    return (abs(x.a), abs(x.b), x.a < 0, x.b < 0)


@dataclass(frozen=True)
class RingElt:
    """
    The element a + b·ω of a coefficient ring.
    """

    ring: CoefficientRing = field(repr=False)
    a: object
    b: object

    def _lift(self, other) -> RingElt:
        if isinstance(other, RingElt):
            if other.ring != self.ring:
                raise RingMismatch(f"{self.ring} vs {other.ring}")
            return other
        return self.ring(other)

    def __add__(self, other):
        other = self._lift(other)
        return RingElt(self.ring, self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return RingElt(self.ring, -self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        r = self.ring
        a, b, c, d = self.a, self.b, other.a, other.b
        return RingElt(r, a * c - r.n * b * d, a * d + b * c + r.t * b * d)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def conj(self) -> RingElt:
        "the image under the ring's involution"
        return RingElt(self.ring, self.a + self.ring.t * self.b, -self.b)

    def norm(self):
        "x·conj(x), a rational number"
        r = self.ring
        return self.a * self.a + r.t * self.a * self.b + r.n * self.b * self.b

    def trace(self):
        "x + conj(x), a rational number"
        return 2 * self.a + self.ring.t * self.b

    @property
    def is_integral(self) -> bool:  # noqa:D102
        return self.a.denominator == 1 and self.b.denominator == 1

    def __str__(self):
        if not self.b:
            return str(self.a)
        w = "ω" if self.b == 1 else "-ω" if self.b == -1 else f"{self.b}ω"
        if not self.a:
            return w
        return f"{w}{'+' if self.a > 0 else '-'}{abs(self.a)}"


@dataclass(frozen=True)
class PrimeIdealData:
    """
    A prime P = (p, π) of a coefficient ring.

    For f = 1 the residue field is 𝔽_p and ω ≡ ``root`` mod P.
    ``generator`` is a principal generator, if one has been certified.
    """

    ring: CoefficientRing = field(repr=False)
    p: int
    kind: str
    pi: RingElt = field(repr=False)
    f: int
    root: int | None = None
    generator: RingElt | None = field(default=None, compare=False, repr=False)

    @property
    def norm(self) -> int:
        "the absolute norm p^f"
        return self.p**self.f

    @property
    def self_conjugate(self) -> bool:  # noqa:D102
        return self.kind != SPLIT

    def conjugate(self) -> PrimeIdealData:
        "P̄"
        if self.self_conjugate:
            return self
        r = (self.ring.t - self.root) % self.p
        gen = self.generator.conj() if self.generator is not None else None
        return PrimeIdealData(self.ring, self.p, SPLIT, self.ring(-r, 1), 1, r, gen)

    @cached_property
    def field(self) -> ResidueField:  # noqa:D102
        return ResidueField(self)

    def __str__(self):
        if self.ring.d == 1 or self.kind == INERT:
            return f"({self.p})"
        return f"({self.p}, {self.pi})"


class ResidueField:
    """
    The residue field ℤ_L/P.

    Elements are tuples of length f over 𝔽_p; for f = 2 the tuple (a, b)
    stands for a + b·ω mod p.
    """

    def __init__(self, prime: PrimeIdealData):
        self.prime = prime
        self.p = prime.p
        self.f = prime.f
        self.zero = (0,) * self.f
        self.one = (1,) + (0,) * (self.f - 1)

    @property
    def size(self) -> int:  # noqa:D102
        return self.p**self.f

    def reduce(self, x: RingElt) -> tuple:
        "the residue map"
        p = self.p
        a = residue_int(x.a, p)
        b = residue_int(x.b, p)
        if self.f == 2:
            return (a, b)
        return ((a + b * self.prime.root) % p,)

    def scalar(self, c: int) -> tuple:  # noqa:D102
        return (c % self.p,) + (0,) * (self.f - 1)

    def lift(self, c: tuple) -> RingElt:
        "a ring element with residue ``c``"
        ring = self.prime.ring
        if self.f == 2:
            return ring(c[0], c[1])
        return ring(c[0])

    def elements(self):
        "all elements, zero first"
        return product(range(self.p), repeat=self.f)

    def add(self, x, y):  # noqa:D102
        p = self.p
        return tuple((u + v) % p for u, v in zip(x, y))

    def neg(self, x):  # noqa:D102
        return tuple(-u % self.p for u in x)

    def sub(self, x, y):  # noqa:D102
        return self.add(x, self.neg(y))

    def mul(self, x, y):  # noqa:D102
        p = self.p
        if self.f == 1:
            return (x[0] * y[0] % p,)
        ring = self.prime.ring
        a, b = x
        c, d = y
        return ((a * c - ring.n * b * d) % p, (a * d + b * c + ring.t * b * d) % p)

    def conj(self, x):
        """
        The involution on the residue field.

        This is Frobenius for inert primes and the identity when f = 1,
        which is only meaningful for self-conjugate primes.
        """
        if self.f == 1:
            return x
        a, b = x
        return ((a + self.prime.ring.t * b) % self.p, -b % self.p)

    def inv(self, x):  # noqa:D102
        p = self.p
        if self.f == 1:
            return (pow(x[0], -1, p),)
        ring = self.prime.ring
        a, b = x
        nm = (a * a + ring.t * a * b + ring.n * b * b) % p
        c = self.conj(x)
        s = pow(nm, -1, p)
        return (c[0] * s % p, c[1] * s % p)

    def is_zero(self, x) -> bool:  # noqa:D102
        return not any(x)


def make_ring(disc: int) -> CoefficientRing:
    """
    Build ℤ (disc = 1) or the maximal order of discriminant ``disc`` < 0.
    """
    if disc == 1:
        return CoefficientRing(1)
    if disc > 1:
        raise RealQuadraticUnsupported(disc)
    if disc % 4 == 1:
        ok = _squarefree(disc)
    elif disc % 4 == 0:
        m = disc // 4
        ok = m % 4 in (2, 3) and _squarefree(m)
    else:
        ok = False
    if not ok:
        raise NonFundamentalDiscriminant(disc)
    t = 1 if disc % 4 == 1 else 0
    return CoefficientRing(disc, t, (t * t - disc) // 4)


def conj(ring: CoefficientRing, x: RingElt) -> RingElt:
    "the involution"
    if x.ring != ring:
        raise RingMismatch(f"{x.ring} vs {ring}")
    return x.conj()


def split_prime(ring: CoefficientRing, p: int) -> list[PrimeIdealData]:
    """
    The primes above ``p``; a split pair is ordered by the residue of ω.

    Principal generators are attached where they exist.
    """
    if not isprime(p):
        raise ValidationError(f"{p} is not prime")
    if ring.d == 1:
        return [PrimeIdealData(ring, p, INERT, ring(p), 1, 0, ring(p))]

    disc, t, n = ring.disc, ring.t, ring.n
    if p == 2:
        if disc % 8 != 1:
            raise DyadicUnsupported(f"2 does not split in discriminant {disc}")
        kind, roots = SPLIT, [r for r in range(2) if (r * r - t * r + n) % 2 == 0]
    elif disc % p == 0:
        kind, roots = RAMIFIED, [t * pow(2, -1, p) % p]
    elif legendre_symbol(disc % p, p) == 1:
        inv2 = pow(2, -1, p)
        kind = SPLIT
        roots = sorted((t + s) * inv2 % p for s in sqrt_mod(disc % p, p, all_roots=True))
    else:
        return [PrimeIdealData(ring, p, INERT, ring(p), 2, None, ring(p))]

    res = []
    for r in roots:
        prime = PrimeIdealData(ring, p, kind, ring(-r, 1), 1, r)
        try:
            prime = replace(prime, generator=principal_generator(ring, prime))
        except NoGeneratorFound:
            logger.debug("%s is not principal", prime)
        res.append(prime)
    return res


def principal_generator(ring: CoefficientRing, prime: PrimeIdealData) -> RingElt:
    """
    A generator of ``prime``, normalized among its associates.

    The search over elements of norm p is exhaustive, so failure proves
    that the ideal is not principal.
    """
    if ring.d == 1 or prime.kind == INERT:
        return ring(prime.p)
    fld = prime.field
    cands = [x for x in ring.elements_of_norm(prime.p) if fld.reduce(x) == fld.zero]
    if not cands:
        raise NoGeneratorFound(str(prime))
    return min(cands, key=_associate_key)


def residue_map(ring: CoefficientRing, prime: PrimeIdealData, x: RingElt) -> tuple:
    "reduce ``x`` modulo ``prime``"
    if x.ring != ring or prime.ring != ring:
        raise RingMismatch(str(ring))
    return prime.field.reduce(x)
