"""
Isometries and automorphism groups.

Two ℤ_L-lattices are isometric iff there is a ℤ-basis change that preserves
every trace form, so the search runs over ℤ: the images of a reduced basis
of the source are picked among short vectors of the target, level by level,
pruning on all inner products with the images already fixed.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

from .errors import DimensionMismatch, RingMismatch, VerificationFailed
from .lattice import HermLattice, discriminant, is_integral_lattice
from .linalg import QQ, DomainMatrix, plain, qmatrix, same_matrix, zmatrix
from .shortvec import reduce_gram, short_vectors

logger = logging.getLogger(__name__)

__all__ = [
    "IsometryReport",
    "AutGroup",
    "is_isometric",
    "automorphisms",
    "verify_isometry",
]

VERIFY_LIMIT = 10**6


@dataclass(frozen=True)
class IsometryReport:
    """
    Outcome of an isometry search.

    ``witness`` maps Λ-coordinates to Π-coordinates: x ↦ x·g.
    """

    isometric: bool
    witness: DomainMatrix | None = None
    nodes: int = 0

    def __bool__(self):
        return self.isometric


@dataclass(frozen=True)
class AutGroup:
    """
    Generators and order of an automorphism group.

    ``verified`` is set when the order was confirmed by listing every element.
    """

    generators: tuple[DomainMatrix, ...]
    order: int
    verified: bool = False


def _lists(m) -> list[list]:
    if isinstance(m, DomainMatrix):
        m = m.to_list()
    return [[plain(x) for x in r] for r in m]


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _mul(v, m):
    return tuple(_dot(v, [row[j] for row in m]) for j in range(len(m[0])))


class _Search:
    """
    Backtracking state: images of source basis vectors among candidates.

    ``src`` holds the source Gram matrices (reduced basis), ``tgt`` the target
    forms in the coordinates the candidates are written in.
    """

    def __init__(self, src: list[list[list]], tgt: list[list[list]], cands: list[tuple]):
        self.src = src
        self.cands = cands
        self.nforms = len(src)
        self.dim = len(src[0])
        self.cf = [[_mul(c, f) for f in tgt] for c in cands]
        norms = [
            tuple(_dot(self.cf[i][k], c) for k in range(self.nforms)) for i, c in enumerate(cands)
        ]
        self.level = []
        for i in range(self.dim):
            want = tuple(src[k][i][i] for k in range(self.nforms))
            self.level.append([ci for ci, nm in enumerate(norms) if nm == want])
        self.order = sorted(range(self.dim), key=lambda i: (len(self.level[i]), i))
        self.nodes = 0

    def fits(self, lvl: int, ci: int, chosen: dict[int, int]) -> bool:
        "does candidate ``ci`` at level ``lvl`` match all earlier choices"
        c = self.cands[ci]
        cf = self.cf[ci]
        for j, cj in chosen.items():
            d = self.cands[cj]
            df = self.cf[cj]
            for k in range(self.nforms):
                f = self.src[k]
                if _dot(cf[k], d) != f[lvl][j] or _dot(df[k], c) != f[j][lvl]:
                    return False
        return True

    def solutions(self, fixed: dict[int, int] | None = None):
        """
        Yield every complete unimodular assignment, as a matrix of rows.

        ``fixed`` pins some levels to given candidates.
        """
        fixed = fixed or {}
        chosen: dict[int, int] = {}

        def rec(depth):
            if depth == self.dim:
                rows = [list(self.cands[chosen[i]]) for i in range(self.dim)]
                if abs(zmatrix(rows).det()) == 1:
                    yield rows
                return
            lvl = self.order[depth]
            opts = [fixed[lvl]] if lvl in fixed else self.level[lvl]
            for ci in opts:
                self.nodes += 1
                if not self.fits(lvl, ci, chosen):
                    continue
                chosen[lvl] = ci
                yield from rec(depth + 1)
                del chosen[lvl]

        yield from rec(0)

    def first(self, fixed: dict[int, int] | None = None):  # noqa:D102
        for sol in self.solutions(fixed):
            return sol
        return None


def _prepared(lam: HermLattice):
    u, g = reduce_gram(lam.forms[0])
    um = qmatrix(u)
    umt = um.transpose()
    src = [_lists(g)] + [_lists(um * f * umt) for f in lam.forms[1:]]
    return u, src


def _cands_of(gram_rows, bound) -> list[tuple]:
    return [v for v, _ in short_vectors(gram_rows, bound).signed()]


def _invariants_differ(lam: HermLattice, pi: HermLattice) -> bool:
    if lam.forms[0].det() != pi.forms[0].det():
        return True
    if is_integral_lattice(lam) != is_integral_lattice(pi):
        return True
    return is_integral_lattice(lam) and discriminant(lam) != discriminant(pi)


def is_isometric(lam: HermLattice, pi: HermLattice) -> IsometryReport:
    """
    Decide whether Λ and Π are isometric, with a witness if they are.
    """
    if lam.ring != pi.ring:
        raise RingMismatch(f"{lam.ring} vs {pi.ring}")
    if lam.dim != pi.dim:
        raise DimensionMismatch(f"ranks {lam.dim} and {pi.dim}")
    if _invariants_differ(lam, pi):
        return IsometryReport(False)

    us, src = _prepared(lam)
    ut, h = reduce_gram(pi.forms[0])
    bound = max(src[0][i][i] for i in range(lam.dim))
    cands = [_mul(v, ut) for v in _cands_of(_lists(h), bound)]
    search = _Search(src, [_lists(f) for f in pi.forms], cands)
    sol = search.first()
    if sol is None:
        logger.debug("not isometric after %d nodes", search.nodes)
        return IsometryReport(False, nodes=search.nodes)
    g = qmatrix(us).inv() * qmatrix(sol)
    if not verify_isometry(g, lam, pi):
        raise VerificationFailed("isometry witness does not verify")
    logger.debug("isometric after %d nodes", search.nodes)
    return IsometryReport(True, g, search.nodes)


def _orbit(start: tuple, gens: list[list[list[int]]]) -> set[tuple]:
    seen = {start}
    todo = [start]
    while todo:
        v = todo.pop()
        for h in gens:
            w = _mul(v, h)
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def automorphisms(lam: HermLattice, verify_limit: int = VERIFY_LIMIT) -> AutGroup:
    """
    The automorphism group of Λ, by a stabilizer chain along a reduced basis.

    Generators are matrices in Λ's canonical coordinates. If the order does
    not exceed ``verify_limit``, it is confirmed by enumerating the group.
    """
    u, src = _prepared(lam)
    dim = lam.dim
    bound = max(src[0][i][i] for i in range(dim))
    cands = _cands_of(src[0], bound)
    search = _Search(src, src, cands)
    pos = {c: i for i, c in enumerate(cands)}
    unit = [tuple(int(i == j) for j in range(dim)) for i in range(dim)]

    gens: list[list[list[int]]] = []
    order = 1
    for depth in range(dim - 1, -1, -1):
        lvl = search.order[depth]
        fixed = {search.order[e]: pos[unit[search.order[e]]] for e in range(depth)}
        orbit = _orbit(unit[lvl], gens)
        for ci in search.level[lvl]:
            if search.cands[ci] in orbit or not search.fits(lvl, ci, fixed):
                continue
            sol = search.first({**fixed, lvl: ci})
            if sol is not None:
                gens.append(sol)
                orbit = _orbit(unit[lvl], gens)
        order *= len(orbit)
        logger.debug("level %d: orbit %d", lvl, len(orbit))

    um = qmatrix(u)
    umi = um.inv()
    res = []
    for h in gens:
        g = umi * qmatrix(h) * um
        if not verify_isometry(g, lam, lam):
            raise VerificationFailed("automorphism does not verify")
        res.append(g)

    verified = False
    if order <= verify_limit:
        count = sum(1 for _ in _Search(src, src, cands).solutions())
        if count != order:
            raise VerificationFailed(f"stabilizer chain gives {order}, enumeration {count}")
        verified = True
    logger.debug("automorphism group of order %d, %d generators", order, len(res))
    return AutGroup(tuple(res), order, verified)


def verify_isometry(g, lam: HermLattice, pi: HermLattice) -> bool:
    """
    Check that x ↦ x·g maps Λ's basis onto a basis of Π preserving φ.
    """
    if not isinstance(g, DomainMatrix):
        g = qmatrix(g)
    g = g.convert_to(QQ)
    if g.shape != (lam.dim, pi.dim) or lam.dim != pi.dim or lam.ring != pi.ring:
        return False
    if any(QQ.convert(x).denominator != 1 for r in g.to_list() for x in r):
        return False
    if abs(g.det()) != 1:
        return False
    gt = g.transpose()
    for fl, fp in zip(lam.forms, pi.forms):
        if not same_matrix(g * fp * gt, fl):
            return False
    return same_matrix(lam.omega_action * g, g * pi.omega_action)
