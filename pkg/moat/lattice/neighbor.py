"""
Isotropic subspaces and P^k-neighbors.

For a prime P the module Λ/PΛ is an n-dimensional space over 𝔽_P. A
`Reduction` fixes a frame v_1, …, v_n of it inside Λ, and dual vectors
w_1, …, w_n with φ(v_j, w_m) ≡ δ_jm mod P. Subspaces are handled as
reduced echelon matrices over 𝔽_P in that frame.

The neighbor attached to X is P⁻¹X + (Λ ∩ P̄X^#), where the second summand
is {y ∈ Λ : φ(X, y) ⊆ P}.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

from .errors import (
    BadPrime,
    KTooLarge,
    NotIsotropic,
    RingMismatch,
    ValidationError,
    VerificationFailed,
)
from .lattice import (
    HermLattice,
    discriminant,
    ideal_scale,
    index,
    invariant_factors,
    is_integral_lattice,
    module_intersect,
)
from .linalg import QQ, int_rows, inverse_mod, qmatrix, rref_mod, solve_mod
from .ring import RAMIFIED, SPLIT

from typing import TYPE_CHECKING  # isort:skip

if TYPE_CHECKING:
    from .ring import PrimeIdealData, ResidueField, RingElt

logger = logging.getLogger(__name__)

__all__ = [
    "IsotropicSubspace",
    "NeighborResult",
    "Reduction",
    "reduction",
    "isotropic_lines",
    "isotropic_subspaces",
    "isotropic_subspace",
    "neighbor",
    "neighbors",
    "neighbor_subspace",
    "neighbor_degree",
    "echelon",
    "check_prime",
]


@dataclass(frozen=True)
class IsotropicSubspace:
    """
    A k-dimensional subspace X/PX of Λ/PΛ.

    ``echelon`` is its reduced echelon matrix in the frame of the lattice's
    `Reduction`; ``lifts`` are vectors of Λ (in Λ's coordinates) spanning X
    with φ(x_i, x_j) ∈ P·P̄.
    """

    prime: PrimeIdealData
    k: int
    echelon: tuple
    lifts: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class NeighborResult:
    """
    A P^k-neighbor with the subspace it came from.

    ``index`` is N(P)^k = [Λ : Λ∩Π] = [Π : Λ∩Π].
    """

    lattice: HermLattice
    subspace: IsotropicSubspace
    index: int


def _bil(x, m, y):
    return sum(xi * sum(mij * yj for mij, yj in zip(row, y)) for xi, row in zip(x, m) if xi)


def echelon(field: ResidueField, rows) -> tuple:
    """
    Reduced row echelon form over a residue field; zero rows are dropped.
    """
    rows = [list(r) for r in rows]
    if not rows:
        return ()
    n = len(rows[0])
    top = 0
    for col in range(n):
        for r in range(top, len(rows)):
            if not field.is_zero(rows[r][col]):
                break
        else:
            continue
        rows[top], rows[r] = rows[r], rows[top]
        s = field.inv(rows[top][col])
        rows[top] = [field.mul(s, x) for x in rows[top]]
        for r in range(len(rows)):
            if r != top and not field.is_zero(rows[r][col]):
                f = rows[r][col]
                rows[r] = [field.sub(x, field.mul(f, y)) for x, y in zip(rows[r], rows[top])]
        top += 1
        if top == len(rows):
            break
    return tuple(tuple(r) for r in rows[:top])


def _pivots(field: ResidueField, ech) -> list[int]:
    return [next(j for j, x in enumerate(row) if not field.is_zero(x)) for row in ech]


class Reduction:
    """
    Λ/PΛ with a frame and dual vectors.

    All vectors are integer rows in Λ's coordinates.
    """

    def __init__(self, lam: HermLattice, prime: PrimeIdealData):
        if not is_integral_lattice(lam):
            raise ValidationError("neighbors need an integral lattice")
        self.lam = lam
        self.prime = prime
        self.field = prime.field
        self.ring = lam.ring
        p = prime.p
        n, dim = lam.n, lam.dim
        f = prime.f
        self.pa, self.pb = (int_rows(m) for m in lam.phi_gram)
        self.om = int_rows(lam.omega_action)

        sub = []
        if prime.pi != self.ring(p):
            sub, _ = rref_mod(int_rows(lam.scalar_action(prime.pi)), p)
        span = list(sub)
        rank = len(sub)
        self.vs = []
        for u in range(dim):
            e = [int(u == c) for c in range(dim)]
            new = [e, self.om[u]] if f == 2 else [e]
            r, _ = rref_mod(span + new, p)
            if len(r) == rank + len(new):
                self.vs.append(tuple(e))
                span += new
                rank += len(new)
                if len(self.vs) == n:
                    break
        if rank != dim:
            raise VerificationFailed(f"no frame for Λ/PΛ at {prime}")
        frame = []
        for v in self.vs:
            frame.append(list(v))
            if f == 2:
                frame.append(list(self.mul(self.ring.omega, v)))
        self.finv = inverse_mod(frame + [list(r) for r in sub], p)

        self.gram = [[self.res(self.phi(a, b)) for b in self.vs] for a in self.vs]

        lhs = []
        for v in self.vs:
            vals = [self.res(self.phi(v, [int(u == c) for c in range(dim)])) for u in range(dim)]
            for comp in range(f):
                lhs.append([x[comp] for x in vals])
        rhs = [[int(r == f * m) for m in range(n)] for r in range(f * n)]
        self.duals = [tuple(w) for w in solve_mod(lhs, rhs, p)]

    def phi(self, x, y) -> RingElt:
        "φ on Λ-coordinates"
        return self.ring(_bil(x, self.pa, y), _bil(x, self.pb, y))

    def res(self, x: RingElt) -> tuple:  # noqa:D102
        return self.field.reduce(x)

    def mul(self, alpha: RingElt, x) -> tuple:
        "α·x for an integral ring element"
        a, b = int(alpha.a), int(alpha.b)
        if not b:
            return tuple(a * c for c in x)
        wx = [sum(x[i] * self.om[i][j] for i in range(len(x))) for j in range(len(x))]
        return tuple(a * c + b * d for c, d in zip(x, wx))

    def coords(self, y) -> tuple:
        "the class of y in Λ/PΛ, as a vector over 𝔽_P"
        p = self.prime.p
        dim = len(y)
        c = [sum(int(y[u]) * self.finv[u][r] for u in range(dim)) % p for r in range(dim)]
        if self.field.f == 2:
            return tuple((c[2 * j], c[2 * j + 1]) for j in range(len(self.vs)))
        return tuple((c[j],) for j in range(len(self.vs)))

    def lift(self, row) -> tuple:
        "a vector of Λ with the given frame coordinates"
        res = (0,) * self.lam.dim
        for c, v in zip(row, self.vs):
            if not self.field.is_zero(c):
                res = _add(res, self.mul(self.field.lift(c), v))
        return res

    def form(self, a, b):
        "the residue of φ(x, y) for frame coordinates a and b; P must be self-conjugate"
        fld = self.field
        res = fld.zero
        for i, ai in enumerate(a):
            if fld.is_zero(ai):
                continue
            for j, bj in enumerate(b):
                if not fld.is_zero(bj):
                    res = fld.add(res, fld.mul(fld.mul(ai, self.gram[i][j]), fld.conj(bj)))
        return res

    def is_isotropic(self, ech) -> bool:  # noqa:D102
        if self.prime.kind == SPLIT:
            return True
        return all(
            self.field.is_zero(self.form(ech[i], ech[j]))
            for i in range(len(ech))
            for j in range(i, len(ech))
        )

    def adjusted(self, ech) -> tuple:
        """
        Lifts of the rows of ``ech`` with φ(x_i, x_j) ∈ P·P̄.
        """
        fld = self.field
        p = self.prime.p
        xs = [self.lift(r) for r in ech]
        ys = [self.duals[j] for j in _pivots(fld, ech)]
        k = len(xs)
        if self.prime.kind == SPLIT:
            pibar = fld.reduce(self.prime.pi.conj())[0]
            s = -pow(pibar, -1, p)
            a = [[s * self.res(self.phi(xs[i], xs[j]))[0] % p for j in range(k)] for i in range(k)]
            res = []
            for j in range(k):
                z = (0,) * len(xs[j])
                for l in range(k):
                    if a[l][j]:
                        z = _add(z, tuple(a[l][j] * c for c in ys[l]))
                res.append(_add(xs[j], self.mul(self.prime.pi, z)))
        else:
            inv2 = pow(2, -1, p)
            m = [[self.res(self.phi(xs[i], xs[j]) * QQ(1, p)) for j in range(k)] for i in range(k)]
            c = [[fld.zero] * k for _ in range(k)]
            for i in range(k):
                c[i][i] = fld.scalar(-m[i][i][0] * inv2)
                for j in range(i + 1, k):
                    c[j][i] = fld.neg(m[i][j])
            res = []
            for j in range(k):
                z = (0,) * len(xs[j])
                for l in range(k):
                    if not fld.is_zero(c[l][j]):
                        z = _add(z, self.mul(fld.lift(c[l][j]), ys[l]))
                res.append(_add(xs[j], tuple(p * v for v in z)))
        for i in range(k):
            for j in range(k):
                if not self.in_q(self.phi(res[i], res[j])):
                    raise VerificationFailed("lift adjustment failed")
        return tuple(res)

    def in_q(self, x: RingElt) -> bool:
        "membership in q = P·P̄"
        p = self.prime.p
        mod = p if self.prime.kind == SPLIT else p * p
        return x.a % mod == 0 and x.b % mod == 0

    def kernel_gens(self, ech) -> list[tuple]:
        "generators of {y ∈ Λ : φ(X, y) ⊆ P}"
        fld = self.field
        ring = self.ring
        p = self.prime.p
        dim = self.lam.dim
        piv = _pivots(fld, ech)
        res = []
        pibar = self.prime.pi.conj()
        for u in range(dim):
            e = tuple(int(u == c) for c in range(dim))
            res.append(tuple(p * c for c in e))
            if pibar != ring(p):
                res.append(self.mul(pibar, e))
        for m in range(len(self.vs)):
            if m in piv:
                continue
            um = self.duals[m]
            for i, pc in enumerate(piv):
                if not fld.is_zero(ech[i][m]):
                    coef = fld.lift(fld.neg(ech[i][m])).conj()
                    um = _add(um, self.mul(coef, self.duals[pc]))
            res.append(um)
            if ring.d == 2:
                res.append(self.mul(ring.omega, um))
        return res

    def inverse_gens(self, lifts) -> list[list]:
        "generators of P⁻¹X as rational rows"
        ring = self.ring
        p = self.prime.p
        nrm = QQ(1, self.prime.norm)
        pibar = self.prime.pi.conj()
        res = []
        for x in lifts:
            if self.prime.kind == SPLIT:
                px = self.mul(pibar, x)
                for v in (x, self.mul(ring.omega, x)):
                    res.append([QQ(c) for c in v])
                for v in (px, self.mul(ring.omega, px)):
                    res.append([QQ(c) * nrm for c in v])
            else:
                res.append([QQ(c, p) for c in x])
                if ring.d == 2:
                    res.append([QQ(c, p) for c in self.mul(ring.omega, x)])
        return res


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


@lru_cache(maxsize=128)
def reduction(lam: HermLattice, prime: PrimeIdealData) -> Reduction:
    "the reduction of Λ at P"
    return Reduction(lam, prime)


def check_prime(lam: HermLattice, prime: PrimeIdealData):
    "refuse primes that neighbors cannot be built at"
    if prime.ring != lam.ring:
        raise RingMismatch(f"{prime.ring} vs {lam.ring}")
    if prime.kind == RAMIFIED:
        raise BadPrime(f"{prime} is ramified")
    if prime.p == 2 and prime.self_conjugate:
        raise BadPrime("2 is only usable where it splits")
    if discriminant(lam) % prime.p == 0:
        raise BadPrime(f"{prime.p} divides the discriminant")


def _check_k(lam: HermLattice, prime: PrimeIdealData, k: int):
    if k < 1:
        raise ValidationError(f"k must be positive, not {k}")
    if k > lam.n or (prime.self_conjugate and 2 * k > lam.n):
        raise KTooLarge(f"k={k} at {prime} for rank {lam.n}")


def _echelons(field: ResidueField, n: int, k: int):
    elts = list(field.elements())
    for piv in combinations(range(n), k):
        free = [(i, j) for i in range(k) for j in range(piv[i] + 1, n) if j not in piv]
        for vals in product(elts, repeat=len(free)):
            m = [[field.zero] * n for _ in range(k)]
            for i, j in enumerate(piv):
                m[i][j] = field.one
            for (i, j), v in zip(free, vals):
                m[i][j] = v
            yield tuple(tuple(r) for r in m)


def isotropic_subspaces(
    lam: HermLattice, prime: PrimeIdealData, k: int
) -> list[IsotropicSubspace]:
    """
    All k-dimensional subspaces of Λ/PΛ that lift to X with φ(X, X) ⊆ P·P̄.

    At a split prime every subspace qualifies; otherwise the reduction of φ
    has to vanish on it. Order: pivot columns, then entries, lexicographically.
    """
    check_prime(lam, prime)
    _check_k(lam, prime, k)
    red = reduction(lam, prime)
    res = []
    for ech in _echelons(red.field, lam.n, k):
        if red.is_isotropic(ech):
            res.append(IsotropicSubspace(prime, k, ech, red.adjusted(ech)))
    logger.debug("%d isotropic %d-spaces at %s", len(res), k, prime)
    return res


def isotropic_lines(lam: HermLattice, prime: PrimeIdealData) -> list[IsotropicSubspace]:
    "the isotropic points of Λ/PΛ"
    return isotropic_subspaces(lam, prime, 1)


def isotropic_subspace(lam: HermLattice, prime: PrimeIdealData, rows) -> IsotropicSubspace:
    """
    The subspace spanned by some vectors over 𝔽_P, given in frame coordinates.

    Entries are residue field elements (tuples) or plain integers.
    """
    check_prime(lam, prime)
    red = reduction(lam, prime)
    fld = red.field
    rows = [[x if isinstance(x, tuple) else fld.scalar(x) for x in r] for r in rows]
    if any(len(r) != lam.n for r in rows):
        raise ValidationError(f"subspace vectors need {lam.n} entries")
    ech = echelon(fld, rows)
    _check_k(lam, prime, len(ech))
    if not red.is_isotropic(ech):
        raise NotIsotropic(repr(ech))
    return IsotropicSubspace(prime, len(ech), ech, red.adjusted(ech))


def neighbor(lam: HermLattice, prime: PrimeIdealData, x: IsotropicSubspace) -> NeighborResult:
    """
    The neighbor Λ(P, X) = P⁻¹X + (Λ ∩ P̄X^#), verified.
    """
    check_prime(lam, prime)
    if x.prime != prime:
        raise ValidationError(f"subspace belongs to {x.prime}, not {prime}")
    red = reduction(lam, prime)
    for a in x.lifts:
        for b in x.lifts:
            if not red.in_q(red.phi(a, b)):
                raise NotIsotropic(repr(x.echelon))

    rows = red.inverse_gens(x.lifts) + [[QQ(c) for c in g] for g in red.kernel_gens(x.echelon)]
    pi = HermLattice.from_rows(lam.space, qmatrix(rows) * lam.basis)

    want = prime.norm**x.k
    inter = module_intersect(lam, pi)
    if index(lam, inter) != want or index(pi, inter) != want:
        raise VerificationFailed(f"neighbor indices wrong at {prime}")
    if not is_integral_lattice(pi) or discriminant(pi) != discriminant(lam):
        raise VerificationFailed("neighbor left the genus")
    return NeighborResult(pi, x, want)


def neighbors(lam: HermLattice, prime: PrimeIdealData, k: int = 1) -> list[NeighborResult]:
    """
    All P^k-neighbors of Λ, one per isotropic subspace.
    """
    res = [neighbor(lam, prime, x) for x in isotropic_subspaces(lam, prime, k)]
    if len({r.lattice for r in res}) != len(res):
        raise VerificationFailed("two subspaces gave the same neighbor")
    return res


def neighbor_subspace(lam: HermLattice, pi: HermLattice, prime: PrimeIdealData) -> tuple:
    """
    The subspace X/PX that ``pi`` was built from: the image of Λ ∩ PΠ in Λ/PΛ.
    """
    red = reduction(lam, prime)
    inter = module_intersect(lam, ideal_scale(prime, pi, 1))
    rows = [red.coords(r) for r in int_rows(lam.to_coords(inter.basis))]
    return echelon(red.field, rows)


def neighbor_degree(lam: HermLattice, pi: HermLattice, prime: PrimeIdealData) -> int | None:
    """
    k if Π is a P^k-neighbor of Λ, otherwise None.
    """
    inv = invariant_factors(lam, pi, prime)
    n = lam.n
    if prime.kind == SPLIT:
        k = inv.at_prime.count(-1)
        lo = (-1,) * k + (0,) * (n - k)
        hi = (0,) * (n - k) + (1,) * k
        if inv.at_prime == lo and inv.at_conjugate == hi:
            return k or None
        return None
    k = inv.exponents.count(1)
    if inv.exponents == (-1,) * k + (0,) * (n - 2 * k) + (1,) * k:
        return k or None
    return None
