"""
Short vectors, theta series and fingerprints.

Enumeration is Fincke-Pohst over an exact LDLᵀ decomposition, so counts
are complete regardless of the size of the entries.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from math import isqrt

from .errors import NotIntegral, ValidationError
from .lattice import HermLattice, discriminant
from .linalg import QQ, DomainMatrix, ldl, plain, qmatrix

logger = logging.getLogger(__name__)

__all__ = [
    "ShortVectorList",
    "Fingerprint",
    "short_vectors",
    "theta_coeffs",
    "reduce_gram",
    "successive_minima",
    "default_cutoff",
    "fingerprint",
]


@dataclass(frozen=True)
class ShortVectorList:
    """
    All nonzero x with Q(x) ≤ bound, one of each pair ±x.

    The listed representative has a positive first nonzero coordinate;
    vectors are sorted by coordinates.
    """

    bound: object
    vectors: tuple[tuple[int, ...], ...]
    norms: tuple

    def __len__(self):
        return len(self.vectors)

    def pairs(self):  # noqa:D102
        return zip(self.vectors, self.norms)

    def signed(self):
        "both members of every pair"
        for v, nm in self.pairs():
            yield v, nm
            yield tuple(-x for x in v), nm


@dataclass(frozen=True)
class Fingerprint:
    """
    Cheap isometry invariants of a lattice.

    ``aut_order`` is filled in later and does not take part in comparisons.
    """

    disc: int
    rank: int
    theta: tuple[int, ...]
    minima: tuple[int, ...]
    aut_order: int | None = field(default=None, compare=False)

    def with_aut(self, order: int) -> Fingerprint:  # noqa:D102
        return replace(self, aut_order=order)


def _gram_rows(gram) -> list[list]:
    if isinstance(gram, DomainMatrix):
        gram = gram.convert_to(QQ).to_list()
    return [[QQ.convert(x) for x in r] for r in gram]


def _floor(x) -> int:
    return int(x.numerator) // int(x.denominator)


def short_vectors(gram, bound) -> ShortVectorList:
    """
    Enumerate the short vectors of a positive definite form.
    """
    rows = _gram_rows(gram)
    bound = QQ.convert(bound)
    q, qq = ldl(qmatrix(rows))
    n = len(q)
    x = [0] * n
    found = []

    def rec(i, rem):
        c = -sum((qq[i][j] * x[j] for j in range(i + 1, n)), QQ(0))
        s = isqrt(_floor(rem / q[i])) + 1
        lo = _floor(c) - s
        for xi in range(lo, lo + 2 * s + 2):
            y = xi - c
            v = q[i] * y * y
            if v > rem:
                continue
            x[i] = xi
            if i == 0:
                found.append((tuple(x), bound - (rem - v)))
            else:
                rec(i - 1, rem - v)
        x[i] = 0

    if n:
        rec(n - 1, bound)

    res = []
    for v, nm in found:
        first = next((c for c in v if c), 0)
        if first > 0:
            res.append((v, plain(nm)))
    res.sort()
    return ShortVectorList(
        plain(bound), tuple(v for v, _ in res), tuple(nm for _, nm in res)
    )


def theta_coeffs(obj: HermLattice | DomainMatrix | list, cutoff: int) -> list[int]:
    """
    Coefficients of the theta series of the first trace form, up to ``cutoff``.
    """
    if cutoff < 0:
        raise ValidationError(f"cutoff must not be negative, not {cutoff}")
    gram = obj.forms[0] if isinstance(obj, HermLattice) else obj
    res = [0] * (cutoff + 1)
    res[0] = 1
    for _, nm in short_vectors(gram, cutoff).pairs():
        if not isinstance(nm, int):
            raise NotIntegral(f"vector of norm {nm}")
        res[nm] += 2
    return res


def _round(x) -> int:
    return _floor(x + QQ(1, 2))


def _pairwise(g, u):
    n = len(g)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(n):
                if i == j or not g[i][j]:
                    continue
                r = _round(g[i][j] / g[j][j])
                if not r or g[i][i] - 2 * r * g[i][j] + r * r * g[j][j] >= g[i][i]:
                    continue
                for k in range(n):
                    g[i][k] -= r * g[j][k]
                for k in range(n):
                    g[k][i] -= r * g[k][j]
                u[i] = [a - r * b for a, b in zip(u[i], u[j])]
                changed = True


def _exchange(g, u) -> bool:
    n = len(g)
    bound = max(g[i][i] for i in range(n))
    sv = sorted(short_vectors(g, bound).pairs(), key=lambda vn: (vn[1], vn[0]))
    for v, nm in sv:
        for i in sorted(range(n), key=lambda i: -g[i][i]):
            if abs(v[i]) != 1 or nm >= g[i][i]:
                continue
            if v[i] < 0:
                v = tuple(-c for c in v)
            newrow = [sum(v[k] * g[k][j] for k in range(n)) for j in range(n)]
            nii = sum(v[k] * newrow[k] for k in range(n))
            for j in range(n):
                g[i][j] = newrow[j]
                g[j][i] = newrow[j]
            g[i][i] = nii
            u[i] = [sum(v[k] * u[k][c] for k in range(n)) for c in range(n)]
            return True
    return False


def reduce_gram(gram) -> tuple[list[list[int]], DomainMatrix]:
    """
    A basis change U with short rows: U·gram·Uᵀ has small diagonal.

    Pairwise size reduction alternates with replacing a basis vector by a
    shorter short vector that keeps the basis unimodular. The result is
    sorted by norm. This is not a canonical form.
    """
    g = _gram_rows(gram)
    n = len(g)
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    while True:
        _pairwise(g, u)
        if not _exchange(g, u):
            break
    perm = sorted(range(n), key=lambda i: (g[i][i], i))
    u = [u[i] for i in perm]
    g = [[g[i][j] for j in perm] for i in perm]
    return u, qmatrix(g)


def successive_minima(gram) -> tuple:
    "the successive minima of a positive definite form"
    _, g = reduce_gram(gram)
    rows = _gram_rows(g)
    n = len(rows)
    bound = max(rows[i][i] for i in range(n))
    chosen = []
    res = []
    for v, nm in sorted(short_vectors(rows, bound).pairs(), key=lambda vn: (vn[1], vn[0])):
        if qmatrix([*chosen, v]).rank() > len(chosen):
            chosen.append(v)
            res.append(nm)
            if len(res) == n:
                break
    return tuple(res)


def default_cutoff(lam: HermLattice) -> int:
    "twice the largest successive minimum of the first trace form"
    return 2 * int(max(successive_minima(lam.forms[0])))


def fingerprint(lam: HermLattice, cutoff: int | None = None) -> Fingerprint:
    """
    Isometry invariants: discriminant, ℤ-rank, theta series, successive minima.
    """
    disc = discriminant(lam)
    _, g = reduce_gram(lam.forms[0])
    minima = successive_minima(g)
    if cutoff is None:
        cutoff = 2 * int(max(minima))
    theta = theta_coeffs(g, cutoff)
    return Fingerprint(disc, lam.dim, tuple(theta), tuple(int(m) for m in minima))
