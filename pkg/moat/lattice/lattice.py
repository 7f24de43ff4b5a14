"""
Hermitian spaces and lattices.

A lattice is stored as its underlying ℤ-module: a canonical ℤ-basis in
coordinates flattened over {1, ω}, so the ambient vector (x_1, …, x_n) with
x_i = a_i + b_i·ω is the row (a_1, b_1, …, a_n, b_n). Over ℤ the flattening is
the identity.

With this convention the form splits as φ(x, y) = x·A·yᵀ + (x·B·yᵀ)·ω for two
rational matrices A and B, and multiplication by ω is the block matrix
``[[0, 1], [-n, t]]`` acting on the right.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

from sympy import integer_log

from .errors import (
    DimensionMismatch,
    LatticesDifferAwayFromP,
    NotIntegral,
    RingMismatch,
    ValidationError,
    VerificationFailed,
)
from .linalg import (
    QQ,
    DomainMatrix,
    blockdiag,
    denominator,
    hnf_rows,
    identity,
    is_integral,
    ldl,
    qmatrix,
    same_matrix,
    std_dual,
    valuation,
)
from .ring import RAMIFIED, SPLIT, RingElt

from typing import TYPE_CHECKING  # isort:skip

if TYPE_CHECKING:
    from .ring import CoefficientRing, PrimeIdealData

logger = logging.getLogger(__name__)

__all__ = [
    "AmbientSpace",
    "HermLattice",
    "InvariantFactors",
    "standard_lattice",
    "lattice_from_generators",
    "phi_eval",
    "dual",
    "is_integral_lattice",
    "discriminant",
    "index",
    "contains",
    "module_sum",
    "module_intersect",
    "ideal_scale",
    "invariant_factors",
    "trace_forms",
    "transform",
]


@dataclass(frozen=True)
class AmbientSpace:
    """
    The space Lⁿ with a definite Hermitian form, given by its Gram matrix.

    Entries of ``gram`` are ring elements; plain numbers are accepted.
    """

    ring: CoefficientRing
    gram: tuple

    def __post_init__(self):
        ring = self.ring
        gram = tuple(
            tuple(x if isinstance(x, RingElt) else ring(*_pair(x)) for x in row)
            for row in self.gram
        )
        object.__setattr__(self, "gram", gram)
        n = len(gram)
        if n == 0 or any(len(row) != n for row in gram):
            raise DimensionMismatch("Gram matrix must be square")
        for i in range(n):
            for j in range(i, n):
                if gram[j][i] != gram[i][j].conj():
                    raise ValidationError(f"Gram matrix is not Hermitian at ({i},{j})")
        ldl(self.trace_matrices[0])

    @property
    def n(self) -> int:
        "rank over L"
        return len(self.gram)

    @property
    def d(self) -> int:  # noqa:D102
        return self.ring.d

    @property
    def dim(self) -> int:
        "rank over ℤ"
        return self.ring.d * self.n

    @cached_property
    def omega(self) -> DomainMatrix | None:
        "multiplication by ω on flattened coordinates"
        if self.d == 1:
            return None
        r = self.ring
        return blockdiag([[0, 1], [-r.n, r.t]], self.n)

    def scalar(self, alpha: RingElt) -> DomainMatrix:
        "multiplication by ``alpha`` on flattened coordinates"
        m = identity(self.dim) * QQ.convert(alpha.a)
        if alpha.b:
            m = m + self.omega * QQ.convert(alpha.b)
        return m

    def basis_vector(self, u: int) -> list[RingElt]:
        "the ambient vector behind flattened coordinate ``u``"
        r = self.ring
        v = [r(0)] * self.n
        i, s = divmod(u, self.d)
        v[i] = r(0, 1) if s else r(1)
        return v

    @cached_property
    def phi_parts(self) -> tuple[DomainMatrix, DomainMatrix]:
        "the matrices A, B with φ(x, y) = xAyᵀ + (xByᵀ)ω"
        dim = self.dim
        a = [[0] * dim for _ in range(dim)]
        b = [[0] * dim for _ in range(dim)]
        for u in range(dim):
            x = self.basis_vector(u)
            for v in range(dim):
                val = self.phi(x, self.basis_vector(v))
                a[u][v] = val.a
                b[u][v] = val.b
        return qmatrix(a), qmatrix(b)

    @cached_property
    def trace_matrices(self) -> list[DomainMatrix]:
        """
        The ℚ-bilinear forms tr(φ(x, y)) and tr(ω·φ(x, y)), or just the
        form itself over ℤ.
        """
        a, b = self.phi_parts
        if self.d == 1:
            return [a]
        t, n = self.ring.t, self.ring.n
        return [a * QQ(2) + b * QQ(t), a * QQ(t) + b * QQ(t * t - 2 * n)]

    def phi(self, x, y) -> RingElt:
        "evaluate the form on two ambient vectors"
        n = self.n
        if len(x) != n or len(y) != n:
            raise DimensionMismatch(f"vectors of length {len(x)}, {len(y)}; rank is {n}")
        ring = self.ring
        res = ring(0)
        for i in range(n):
            if not x[i]:
                continue
            for j in range(n):
                if y[j]:
                    res = res + x[i] * self.gram[i][j] * y[j].conj()
        return res

    def flatten(self, vec) -> list:
        "ambient vector to flattened rational coordinates"
        if len(vec) != self.n:
            raise DimensionMismatch(f"vector of length {len(vec)}; rank is {self.n}")
        ring = self.ring
        res = []
        for x in vec:
            if not isinstance(x, RingElt):
                x = ring(*_pair(x))
            res.append(x.a)
            if self.d == 2:
                res.append(x.b)
        return res

    def unflatten(self, row) -> list[RingElt]:
        "flattened coordinates to an ambient vector"
        ring = self.ring
        if self.d == 1:
            return [ring(x) for x in row]
        return [ring(row[2 * i], row[2 * i + 1]) for i in range(self.n)]


def _pair(x):
    if isinstance(x, (list, tuple)):
        if len(x) == 1:
            return (x[0],)
        if len(x) != 2:
            raise ValidationError(f"not a ring element: {x!r}")
        return tuple(x)
    return (x,)


@dataclass(frozen=True, eq=False)
class HermLattice:
    """
    A full-rank ℤ_L-lattice in an ambient space.

    ``hnf`` is an integer matrix in lower triangular Hermite form; its rows
    divided by ``den`` are the canonical ℤ-basis. Two lattices are equal iff
    they share space, ``den`` and ``hnf``.
    """

    space: AmbientSpace
    den: int
    hnf: DomainMatrix

    @classmethod
    def from_rows(cls, space: AmbientSpace, rows) -> HermLattice:
        """
        The ℤ-span of some rows, which must be closed under ω.
        """
        if not isinstance(rows, DomainMatrix):
            rows = qmatrix(rows)
        if rows.shape[1] != space.dim:
            raise DimensionMismatch(f"{rows.shape[1]} columns, need {space.dim}")
        den, hnf = hnf_rows(rows, full=space.dim)
        res = cls(space, den, hnf)
        if space.omega is not None and not is_integral(res.omega_action):
            raise ValidationError("not a ℤ_L-module: the ℤ-span is not closed under ω")
        return res

    @cached_property
    def key(self) -> tuple:
        "hashable canonical form"
        return (self.den, tuple(tuple(int(x) for x in r) for r in self.hnf.to_list()))

    def __eq__(self, other):
        if not isinstance(other, HermLattice):
            return NotImplemented
        return self.space == other.space and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"<HermLattice {self.ring} n={self.n} den={self.den} {self.key[1]}>"

    @property
    def ring(self) -> CoefficientRing:  # noqa:D102
        return self.space.ring

    @property
    def n(self) -> int:  # noqa:D102
        return self.space.n

    @property
    def dim(self) -> int:  # noqa:D102
        return self.space.dim

    @cached_property
    def basis(self) -> DomainMatrix:
        "canonical ℤ-basis, rows in flattened ambient coordinates"
        return self.hnf.convert_to(QQ) * QQ(1, self.den)

    @cached_property
    def basis_inv(self) -> DomainMatrix:  # noqa:D102
        return self.basis.inv()

    @cached_property
    def volume(self):
        "|det| of the basis"
        return abs(self.basis.det())

    def to_coords(self, m: DomainMatrix) -> DomainMatrix:
        "ambient rows to coordinates with respect to the basis"
        return m * self.basis_inv

    def action(self, m: DomainMatrix) -> DomainMatrix:
        "an ambient right action, written in lattice coordinates"
        return self.basis * m * self.basis_inv

    @cached_property
    def omega_action(self) -> DomainMatrix:
        "multiplication by ω in lattice coordinates"
        if self.space.omega is None:
            return identity(self.dim)
        return self.action(self.space.omega)

    def scalar_action(self, alpha: RingElt) -> DomainMatrix:
        "multiplication by ``alpha`` in lattice coordinates"
        return self.action(self.space.scalar(alpha))

    @cached_property
    def phi_gram(self) -> tuple[DomainMatrix, DomainMatrix]:
        "the parts A, B of φ in lattice coordinates"
        b = self.basis
        bt = b.transpose()
        pa, pb = self.space.phi_parts
        return b * pa * bt, b * pb * bt

    @cached_property
    def forms(self) -> list[DomainMatrix]:
        "Gram matrices of the trace forms in lattice coordinates"
        b = self.basis
        bt = b.transpose()
        return [b * f * bt for f in self.space.trace_matrices]

    def vector(self, coords) -> list[RingElt]:
        "the ambient vector with these lattice coordinates"
        row = qmatrix([coords]) * self.basis
        return self.space.unflatten(row.to_list()[0])


@dataclass(frozen=True)
class InvariantFactors:
    """
    Exponents of the invariant factors of Π relative to Λ at a prime.

    At a split prime each factor is P^a·P̄^b; ``at_prime`` and
    ``at_conjugate`` hold the sorted a and b sequences, and ``exponents``
    their positionwise sums.
    """

    prime: PrimeIdealData
    exponents: tuple[int, ...]
    at_prime: tuple[int, ...] | None = None
    at_conjugate: tuple[int, ...] | None = None


def _check_same(a: HermLattice, b: HermLattice):
    if a.ring != b.ring:
        raise RingMismatch(f"{a.ring} vs {b.ring}")
    if a.space != b.space:
        raise DimensionMismatch("lattices live in different ambient spaces")


def standard_lattice(space: AmbientSpace) -> HermLattice:
    "the ℤ_L-span of the unit vectors"
    return HermLattice.from_rows(space, identity(space.dim))


def lattice_from_generators(space: AmbientSpace, vectors) -> HermLattice:
    "the ℤ_L-span of some ambient vectors"
    rows = []
    for v in vectors:
        rows.append(space.flatten(v))
        if space.d == 2:
            rows.append(space.flatten([x * space.ring.omega for x in space.unflatten(rows[-1])]))
    if not rows:
        raise DimensionMismatch("no generators")
    return HermLattice.from_rows(space, rows)


def phi_eval(obj: AmbientSpace | HermLattice, x, y) -> RingElt:
    "φ(x, y) for ambient vectors"
    if isinstance(obj, HermLattice):
        obj = obj.space
    ring = obj.ring
    x = [v if isinstance(v, RingElt) else ring(*_pair(v)) for v in x]
    y = [v if isinstance(v, RingElt) else ring(*_pair(v)) for v in y]
    return obj.phi(x, y)


def dual(lam: HermLattice) -> HermLattice:
    "Λ^# = {y : φ(Λ, y) ⊆ ℤ_L}"
    pa, pb = lam.space.phi_parts
    cond = lam.basis * pa
    if lam.space.d == 2:
        cond = cond.vstack(lam.basis * pb)
    den, h = hnf_rows(cond, full=lam.dim)
    return HermLattice.from_rows(lam.space, std_dual(h.convert_to(QQ) * QQ(1, den)))


def is_integral_lattice(lam: HermLattice) -> bool:
    "φ(Λ, Λ) ⊆ ℤ_L"
    a, b = lam.phi_gram
    return is_integral(a) and is_integral(b)


def discriminant(lam: HermLattice) -> int:
    "the index [Λ^# : Λ]"
    if not is_integral_lattice(lam):
        raise NotIntegral(repr(lam))
    res = lam.volume / dual(lam).volume
    if res.denominator != 1:
        raise VerificationFailed(f"discriminant {res} is not integral")
    return int(res.numerator)


def index(lam: HermLattice, pi: HermLattice):
    "the generalized index [Λ : Π] = vol(Π)/vol(Λ), a positive rational"
    _check_same(lam, pi)
    return pi.volume / lam.volume


def contains(lam: HermLattice, pi: HermLattice) -> bool:
    "Π ⊆ Λ"
    _check_same(lam, pi)
    return is_integral(lam.to_coords(pi.basis))


def module_sum(lam: HermLattice, pi: HermLattice) -> HermLattice:  # noqa:D103
    _check_same(lam, pi)
    return HermLattice.from_rows(lam.space, lam.basis.vstack(pi.basis))


def module_intersect(lam: HermLattice, pi: HermLattice) -> HermLattice:
    "Λ ∩ Π, as the standard dual of the sum of standard duals"
    _check_same(lam, pi)
    den, h = hnf_rows(std_dual(lam.basis).vstack(std_dual(pi.basis)), full=lam.dim)
    return HermLattice.from_rows(lam.space, std_dual(h.convert_to(QQ) * QQ(1, den)))


def ideal_scale(prime: PrimeIdealData, lam: HermLattice, e: int = 1) -> HermLattice:
    """
    P^e·Λ for any integer e.

    P = (p, π) acts through its two generators. P⁻¹ is P̄/(P·P̄), where
    P·P̄ is N(P) over ℤ_L and p² over ℤ.
    """
    space = lam.space
    if prime.ring != space.ring:
        raise RingMismatch(f"{prime.ring} vs {space.ring}")
    res = lam
    if e > 0:
        ops = [QQ(prime.p), space.scalar(prime.pi)]
    else:
        nrm = QQ(1, prime.norm if space.d == 2 else prime.p**2)
        ops = [QQ(prime.p) * nrm, space.scalar(prime.pi.conj()) * nrm]
    for _ in range(abs(e)):
        b = res.basis
        res = HermLattice.from_rows(space, (b * ops[0]).vstack(b * ops[1]))
    return res


def _p_part_only(m: DomainMatrix, p: int) -> int:
    den = denominator(m)
    if den == 1:
        return 0
    v = valuation(den, p)
    if den != p**v:
        raise LatticesDifferAwayFromP(f"denominator {den} has primes other than {p}")
    return v


def _log(x, base: int) -> int:
    x = QQ.convert(x)
    if x.denominator != 1:
        raise VerificationFailed(f"index {x} is not an integer")
    e, exact = integer_log(int(x.numerator), base)
    if not exact:
        raise VerificationFailed(f"index is not a power of {base}")
    return e


def _exponents(lam: HermLattice, pi: HermLattice, prime: PrimeIdealData, lo: int, hi: int):
    # I(j) = log [Π : Π ∩ P^jΛ]; I(j+1) - I(j) counts exponents <= j
    idx = {}
    for j in range(lo - 1, hi + 2):
        inter = module_intersect(pi, ideal_scale(prime, lam, j))
        idx[j] = _log(index(pi, inter), prime.norm)
    upto = {j: idx[j + 1] - idx[j] for j in range(lo - 1, hi + 1)}
    if upto[lo - 1] != 0 or upto[hi] != lam.n:
        raise VerificationFailed(f"invariant factor count mismatch at {prime}")
    res = []
    for j in range(lo, hi + 1):
        res.extend([j] * (upto[j] - upto[j - 1]))
    return tuple(res)


def invariant_factors(
    lam: HermLattice, pi: HermLattice, prime: PrimeIdealData
) -> InvariantFactors:
    """
    The invariant factors of Π relative to Λ at ``prime``.

    Π and Λ must agree at every prime not above p.
    """
    _check_same(lam, pi)
    t = pi.basis * lam.basis_inv
    e1 = _p_part_only(t, prime.p)
    e2 = _p_part_only(t.inv(), prime.p)
    v = 2 if prime.kind == RAMIFIED else 1
    lo, hi = -v * e1, v * e2
    if prime.kind != SPLIT:
        return InvariantFactors(prime, _exponents(lam, pi, prime, lo, hi))
    a = _exponents(lam, pi, prime, lo, hi)
    b = _exponents(lam, pi, prime.conjugate(), lo, hi)
    return InvariantFactors(prime, tuple(x + y for x, y in zip(a, b)), a, b)


def trace_forms(lam: HermLattice) -> list[DomainMatrix]:
    "Gram matrices of tr φ(x, y) and tr φ(ωx, y) on Λ's canonical basis"
    return lam.forms


def transform(lam: HermLattice, g) -> HermLattice:
    """
    The image of Λ under the ambient isometry x ↦ x·g.

    ``g`` is an n×n matrix over L; it must preserve φ.
    """
    space = lam.space
    ring = space.ring
    if len(g) != space.n or any(len(r) != space.n for r in g):
        raise DimensionMismatch("transformation has the wrong shape")
    g = [[x if isinstance(x, RingElt) else ring(*_pair(x)) for x in r] for r in g]
    rows = []
    for u in range(space.dim):
        i, s = divmod(u, space.d)
        scale = ring.omega if s else ring(1)
        rows.append(space.flatten([scale * x for x in g[i]]))
    gm = qmatrix(rows)
    gt = gm.transpose()
    pa, pb = space.phi_parts
    if not (same_matrix(gm * pa * gt, pa) and same_matrix(gm * pb * gt, pb)):
        raise ValidationError("transformation does not preserve the form")
    return HermLattice.from_rows(space, lam.basis * gm)
