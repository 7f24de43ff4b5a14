"""
Hecke operators on functions on the classes of a genus.

Row i of T_{P,k} counts the P^k-neighbors of representative i by the class
they fall into, so a function f on the classes maps to (Tf)(i) = Σ_j T_ij·f(j)
and the constant function is an eigenvector.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from functools import partial
from itertools import combinations

from .errors import (
    IncompleteGenus,
    NonCommuting,
    NotInRegistry,
    UnsupportedCase,
    ValidationError,
    VerificationFailed,
)
from .genus import classify
from .linalg import QQ, DomainMatrix, identity, plain, qmatrix
from .neighbor import check_prime, neighbors
from .pool import WorkerPool
from .ring import SPLIT

from typing import TYPE_CHECKING  # isort:skip

if TYPE_CHECKING:
    from .genus import GenusRecord
    from .ring import PrimeIdealData, RingElt

logger = logging.getLogger(__name__)

__all__ = [
    "HeckeMatrix",
    "Eigensystem",
    "hecke_matrix",
    "degree",
    "eisenstein_eigenvalue",
    "endoscopic_eigenvalue",
    "check_commute",
    "weighted_column_sums",
    "eigensystems",
]

CONVENTION = "row=source,col=target"


@dataclass(frozen=True)
class HeckeMatrix:
    """
    The matrix of T_{P,k} on a genus.

    ``matrix[i][j]`` is the number of P^k-neighbors of class i in class j.
    """

    prime: PrimeIdealData
    k: int
    matrix: tuple[tuple[int, ...], ...]
    convention: str = CONVENTION
    seconds: float = field(default=0.0, compare=False)

    @property
    def name(self) -> str:
        "label of the operator, e.g. ``T(11, ω-5)``"
        return f"T{self.prime}" if self.k == 1 else f"T{self.prime}^{self.k}"

    @property
    def size(self) -> int:  # noqa:D102
        return len(self.matrix)

    @property
    def row_sums(self) -> list[int]:  # noqa:D102
        return [sum(r) for r in self.matrix]

    @property
    def kappa(self) -> int:
        "the common row sum"
        return sum(self.matrix[0])

    def as_matrix(self) -> DomainMatrix:  # noqa:D102
        return qmatrix(self.matrix)


@dataclass(frozen=True)
class Eigensystem:
    """
    A common eigenspace of some Hecke operators.

    ``eigenvalues`` maps operator names to a rational eigenvalue, or to the
    coefficients (leading first) of an irreducible polynomial when the
    eigenvalue is not rational. ``vectors`` span the eigenspace.
    """

    label: str
    eigenvalues: dict[str, object]
    multiplicity: int
    vectors: tuple[tuple, ...] = field(default=(), compare=False)


def _row(record: GenusRecord, prime: PrimeIdealData, k: int, witness: bool, i: int) -> list[int]:
    known = {r: j for j, r in enumerate(record.representatives)}
    row = [0] * record.h
    for nb in neighbors(record.representatives[i], prime, k):
        j = known.get(nb.lattice)
        if j is None:
            try:
                j, rep = classify(record, nb.lattice, witness)
            except NotInRegistry as exc:
                raise IncompleteGenus(f"a neighbor of class {i} at {prime}") from exc
            if rep is not None:
                logger.debug("%d → %d: %s", i, j, rep.witness.to_list())
        row[j] += 1
    return row


async def hecke_matrix(
    record: GenusRecord,
    prime: PrimeIdealData,
    k: int = 1,
    *,
    pool: WorkerPool | None = None,
    witness: bool = True,
) -> HeckeMatrix:
    """
    Build T_{P,k} by classifying the neighbors of every representative.
    """
    check_prime(record.representatives[0], prime)
    if pool is None:
        pool = WorkerPool()
    t0 = time.monotonic()
    rows = await pool.map(partial(_row, record, prime, k, witness), range(record.h))
    secs = time.monotonic() - t0

    sums = {sum(r) for r in rows}
    if len(sums) != 1:
        raise VerificationFailed(f"row sums {sorted(sums)} differ")
    res = HeckeMatrix(prime, k, tuple(tuple(r) for r in rows), seconds=secs)
    logger.info("%s: %d neighbors per class, %.2fs", res.name, res.kappa, secs)
    return res


def _norm(prime) -> int:
    return prime if isinstance(prime, int) else prime.norm


def degree(prime: PrimeIdealData | int, k: int, n: int, case: str = SPLIT) -> int:
    """
    The number of P^k-neighbors of a lattice of rank n, in the split case:
    the number of k-dimensional subspaces of 𝔽_q^n with q = N(P).
    """
    if case != SPLIT:
        raise UnsupportedCase(f"no closed form for {case} primes")
    if not 0 <= k <= n:
        raise ValidationError(f"k={k} for rank {n}")
    q = _norm(prime)
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (k - i) - 1
    return num // den


def eisenstein_eigenvalue(prime: PrimeIdealData | int, n: int = 3) -> int:
    "the eigenvalue of T_{P,1} on constant functions, (qⁿ-1)/(q-1)"
    q = _norm(prime)
    res = (q**n - 1) // (q - 1)
    if res != degree(q, 1, n):
        raise VerificationFailed("degree mismatch")
    return res


def endoscopic_eigenvalue(pi: RingElt) -> int:
    """
    tr(π)² − N(π), i.e. π² + ππ̄ + π̄² for a generator π of P.

    The value does not depend on the choice of generator.
    """
    ring = pi.ring
    vals = set()
    for u in ring.units:
        for x in (u * pi, (u * pi).conj()):
            vals.add(x.trace() ** 2 - x.norm())
    if len(vals) != 1:
        raise VerificationFailed(f"generator dependence: {sorted(vals)}")
    return plain(vals.pop())


def check_commute(t1: HeckeMatrix, t2: HeckeMatrix) -> bool:
    "T₁T₂ = T₂T₁"
    if t1.size != t2.size:
        raise ValidationError("operators on different genera")
    a, b = t1.as_matrix(), t2.as_matrix()
    return (a * b).to_list() == (b * a).to_list()


def weighted_column_sums(t: HeckeMatrix, aut_orders: list[int]) -> list:
    """
    Σ_i T_ij/|Aut(Λ_i)| for every j.

    For a complete genus this is κ/|Aut(Λ_j)|.
    """
    if len(aut_orders) != t.size:
        raise ValidationError("need one automorphism order per class")
    return [
        sum((QQ(t.matrix[i][j], aut_orders[i]) for i in range(t.size)), QQ(0))
        for j in range(t.size)
    ]


def _restrict(s: DomainMatrix, t: DomainMatrix) -> DomainMatrix:
    # T·S = S·M on an invariant subspace spanned by the columns of S
    st = s.transpose()
    return (st * s).inv() * st * t * s


def _value(coeffs):
    if len(coeffs) == 2:
        return plain(-coeffs[1] / coeffs[0])
    return tuple(plain(c / coeffs[0]) for c in coeffs)


def _has_ones(s: DomainMatrix) -> bool:
    ones = qmatrix([[1]] * s.shape[0])
    return s.rank() == s.hstack(ones).rank()


def eigensystems(mats: list[HeckeMatrix]) -> list[Eigensystem]:
    """
    Split ℚ^h into common eigenspaces of commuting Hecke operators.

    Each operator's characteristic polynomial on the current pieces is
    factored over ℚ; the generalized kernels of the factors are the new
    pieces. The piece containing the constant function comes first and is
    labelled ``eisenstein``.
    """
    if not mats:
        raise ValidationError("no operators")
    for a, b in combinations(mats, 2):
        if not check_commute(a, b):
            raise NonCommuting(f"{a.name} and {b.name}")

    pieces = [(identity(mats[0].size), {}, 1)]
    for t in mats:
        tm = t.as_matrix()
        nxt = []
        for s, vals, deg in pieces:
            m = _restrict(s, tm)
            for coeffs, e in m.charpoly_factor_list():
                ker = (m.eval_poly(coeffs) ** e).nullspace()
                sub = s * ker.transpose()
                nxt.append((sub, {**vals, t.name: _value(coeffs)}, max(deg, len(coeffs) - 1)))
        pieces = nxt

    res = []
    rest = []
    for s, vals, deg in pieces:
        vecs = tuple(tuple(plain(x) for x in r) for r in s.transpose().to_list())
        if _has_ones(s):
            for t in mats:
                if vals[t.name] != t.kappa:
                    raise VerificationFailed(f"constant function is not a {t.name} eigenvector")
            res.append(Eigensystem("eisenstein", vals, s.shape[1] // deg, vecs))
        else:
            rest.append((vals, s.shape[1] // deg, vecs))
    for i, (vals, mult, vecs) in enumerate(rest, 1):
        res.append(Eigensystem(f"s{i}", vals, mult, vecs))
    return res
