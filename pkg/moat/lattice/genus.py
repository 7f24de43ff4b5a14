"""
Genus enumeration by walking the neighbor graph.

Starting from Λ, every P-neighbor of every known class is generated and
sorted into the registry; a neighbor that matches no known class becomes a
new one. The walk stops when no class is left unexplored.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import partial

from sympy.ntheory import factorint

from .errors import (
    HypothesesUnverifiable,
    NonPrincipalTraversalPrime,
    NotInRegistry,
    VerificationFailed,
)
from .isometry import VERIFY_LIMIT, IsometryReport, automorphisms, is_isometric
from .lattice import discriminant
from .linalg import QQ
from .neighbor import check_prime, neighbors
from .pool import WorkerPool
from .ring import SPLIT
from .shortvec import default_cutoff, fingerprint

from typing import TYPE_CHECKING  # isort:skip

if TYPE_CHECKING:
    from .lattice import HermLattice
    from .ring import PrimeIdealData
    from .shortvec import Fingerprint

logger = logging.getLogger(__name__)

__all__ = [
    "GenusRecord",
    "check_hypotheses",
    "genus_enumerate",
    "mass",
    "classify",
]


@dataclass
class GenusRecord:
    """
    Representatives of the classes in a genus, in discovery order.

    ``traversal_log`` holds (parent index, subspace echelon, child index)
    for the step that found each class after the first.
    """

    representatives: list[HermLattice]
    fingerprints: list[Fingerprint]
    primes: list[PrimeIdealData]
    cutoff: int
    aut_orders: list[int] = field(default_factory=list)
    traversal_log: list[tuple[int, tuple, int]] = field(default_factory=list)

    @property
    def h(self) -> int:
        "the class number"
        return len(self.representatives)

    def bucket(self, fp: Fingerprint) -> list[int]:
        "classes whose fingerprint equals ``fp``"
        return [i for i, f in enumerate(self.fingerprints) if f == fp]


def check_hypotheses(lam: HermLattice, primes: list[PrimeIdealData], force: bool = False):
    """
    Refuse inputs for which the neighbor graph might not reach the whole genus.
    """
    if not primes:
        raise HypothesesUnverifiable("no traversal primes")
    disc = discriminant(lam)
    if lam.ring.d == 1:
        if lam.n < 3:
            raise HypothesesUnverifiable(f"rank {lam.n} < 3")
        if any(e > 1 for e in factorint(disc).values()):
            raise HypothesesUnverifiable(f"discriminant {disc} is not squarefree")
    else:
        if lam.n < 2:
            raise HypothesesUnverifiable(f"rank {lam.n} < 2")
        if lam.n % 2 == 0:
            if not force:
                raise HypothesesUnverifiable(
                    "even rank: niceness at the ramified primes is not checked"
                )
            logger.warning("Even rank %d: assuming niceness at the ramified primes", lam.n)

    for prime in primes:
        check_prime(lam, prime)
        if lam.ring.d == 1:
            continue
        if prime.kind != SPLIT:
            raise HypothesesUnverifiable(f"traversal prime {prime} does not split")
        if prime.generator is None:
            raise NonPrincipalTraversalPrime(str(prime))


def _neighbors_of(job: tuple[HermLattice, PrimeIdealData]):
    return neighbors(*job)


def _isometric_pair(reps: list[HermLattice], ab: tuple[int, int]) -> IsometryReport:
    return is_isometric(reps[ab[0]], reps[ab[1]])


async def _lookup(record: GenusRecord, pool: WorkerPool, lam: HermLattice, fp: Fingerprint):
    bucket = record.bucket(fp)
    if not bucket:
        return None, None
    reps = [record.representatives[j] for j in bucket]
    reports = await pool.map(partial(is_isometric, lam), reps)
    for j, rep in zip(bucket, reports):
        if rep:
            return j, rep
    return None, None


async def genus_enumerate(
    lam: HermLattice,
    primes: list[PrimeIdealData],
    *,
    pool: WorkerPool | None = None,
    cutoff: int | None = None,
    force: bool = False,
    verify_limit: int = VERIFY_LIMIT,
) -> GenusRecord:
    """
    Enumerate the classes in the genus of Λ using neighbors at ``primes``.
    """
    check_hypotheses(lam, primes, force)
    if pool is None:
        pool = WorkerPool()
    if cutoff is None:
        cutoff = default_cutoff(lam)
    fp = partial(fingerprint, cutoff=cutoff)

    record = GenusRecord([lam], [fp(lam)], list(primes), cutoff)
    seen: dict[HermLattice, int] = {lam: 0}
    frontier = [0]
    while frontier:
        logger.info("Genus: %d classes, %d to explore", record.h, len(frontier))
        jobs = [(i, prime) for i in frontier for prime in primes]
        found = await pool.map(
            _neighbors_of, [(record.representatives[i], prime) for i, prime in jobs]
        )
        todo = [(i, nb) for (i, _), res in zip(jobs, found) for nb in res]
        fresh = [(i, nb) for i, nb in todo if nb.lattice not in seen]
        fps = await pool.map(fp, [nb.lattice for _, nb in fresh])

        frontier = []
        for (i, nb), nfp in zip(fresh, fps):
            if nb.lattice in seen:
                continue
            j, _ = await _lookup(record, pool, nb.lattice, nfp)
            if j is None:
                j = record.h
                record.representatives.append(nb.lattice)
                record.fingerprints.append(nfp)
                record.traversal_log.append((i, nb.subspace.echelon, j))
                frontier.append(j)
                logger.info("Genus: class %d found as neighbor of %d", j, i)
            seen[nb.lattice] = j

    auts = await pool.map(
        partial(automorphisms, verify_limit=verify_limit), record.representatives
    )
    record.aut_orders = [a.order for a in auts]
    record.fingerprints = [f.with_aut(o) for f, o in zip(record.fingerprints, record.aut_orders)]

    pairs = [(a, b) for a in range(record.h) for b in range(a + 1, record.h)]
    reps = record.representatives
    checks = await pool.map(partial(_isometric_pair, reps), pairs)
    for (a, b), rep in zip(pairs, checks):
        if rep:
            raise VerificationFailed(f"classes {a} and {b} are isometric")
    logger.info("Genus: h=%d, mass %s", record.h, mass(record))
    return record


def mass(record: GenusRecord):
    "Σ 1/|Aut(Λ_i)| as an exact rational"
    if len(record.aut_orders) != record.h:
        raise VerificationFailed("automorphism orders are missing")
    return sum((QQ(1, o) for o in record.aut_orders), QQ(0))


def classify(
    record: GenusRecord, lam: HermLattice, witness: bool = True
) -> tuple[int, IsometryReport | None]:
    """
    The index of the class containing ``lam``, and an isometry report.

    Without ``witness`` a fingerprint that matches exactly one class is
    accepted as is.
    """
    fp = fingerprint(lam, record.cutoff)
    bucket = record.bucket(fp)
    if len(bucket) == 1 and not witness:
        return bucket[0], None
    for j in bucket:
        rep = is_isometric(lam, record.representatives[j])
        if rep:
            return j, rep
    raise NotInRegistry(repr(lam))
