"""
Exact matrix helpers on top of sympy's DomainMatrix.

Matrices act on row vectors throughout: a lattice basis is a matrix whose
rows are the basis vectors, and a map x ↦ x·g is given by g.
"""
from __future__ import annotations

import logging
from math import lcm

from sympy.ntheory import multiplicity
from sympy.polys.domains import GF, QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import hermite_normal_form

from .errors import DimensionMismatch, NotPositiveDefinite, VerificationFailed

logger = logging.getLogger(__name__)

__all__ = [
    "QQ",
    "ZZ",
    "DomainMatrix",
    "qmatrix",
    "zmatrix",
    "identity",
    "rows_of",
    "int_rows",
    "denominator",
    "is_integral",
    "hnf_rows",
    "std_dual",
    "ldl",
    "valuation",
    "rref_mod",
    "solve_mod",
    "inverse_mod",
    "blockdiag",
    "same_matrix",
    "plain",
]


def qmatrix(rows) -> DomainMatrix:
    "a rational matrix from nested lists"
    rows = [[QQ.convert(x) for x in r] for r in rows]
    ncols = len(rows[0]) if rows else 0
    return DomainMatrix(rows, (len(rows), ncols), QQ)


def zmatrix(rows) -> DomainMatrix:
    "an integer matrix from nested lists"
    rows = [[ZZ.convert(x) for x in r] for r in rows]
    ncols = len(rows[0]) if rows else 0
    return DomainMatrix(rows, (len(rows), ncols), ZZ)


def identity(n: int, dom=QQ) -> DomainMatrix:  # noqa:D103
    return DomainMatrix.eye(n, dom)


def blockdiag(block, count: int) -> DomainMatrix:
    "``count`` copies of the square list ``block`` on the diagonal"
    b = len(block)
    rows = [[0] * (b * count) for _ in range(b * count)]
    for k in range(count):
        for i in range(b):
            for j in range(b):
                rows[k * b + i][k * b + j] = block[i][j]
    return qmatrix(rows)


def rows_of(m: DomainMatrix) -> list[list]:  # noqa:D103
    return m.to_list()


def int_rows(m: DomainMatrix) -> list[list[int]]:
    "integer entries as plain ints; the matrix must be integral"
    res = []
    for r in m.to_list():
        row = []
        for x in r:
            if QQ.convert(x).denominator != 1:
                raise VerificationFailed(f"non-integral entry {x}")
            row.append(int(QQ.convert(x).numerator))
        res.append(row)
    return res


def denominator(m: DomainMatrix) -> int:
    "lcm of the entries' denominators"
    if m.domain.is_ZZ:
        return 1
    return lcm(1, *(int(x.denominator) for r in m.to_list() for x in r))


def is_integral(m: DomainMatrix) -> bool:  # noqa:D103
    return denominator(m) == 1


def hnf_rows(m: DomainMatrix, full: int | None = None) -> tuple[int, DomainMatrix]:
    """
    Canonical basis of the ℤ-span of the rows of ``m``.

    Returns ``(den, H)``: H is an integer matrix in lower triangular
    Hermite form whose rows, divided by ``den``, are a basis of the span.
    ``den`` is the least common denominator of ``m``.

    If ``full`` is given, the span must have that rank.
    """
    m = m.convert_to(QQ)
    den = denominator(m)
    z = (m * QQ(den)).convert_to(ZZ)
    h = hermite_normal_form(z.transpose()).transpose()
    if full is not None and h.shape[0] != full:
        raise DimensionMismatch(f"rank {h.shape[0]}, expected {full}")
    return den, h


def std_dual(b: DomainMatrix) -> DomainMatrix:
    "basis of the dual lattice with respect to the standard dot product"
    return b.convert_to(QQ).inv().transpose()


def ldl(gram: DomainMatrix) -> tuple[list, list[list]]:
    """
    Decompose a positive definite form as Σ q_i (x_i + Σ_{j>i} q_ij x_j)².

    Returns ``(q, qq)`` with the diagonal in ``q`` and the (upper) off-diagonal
    coefficients in ``qq``. All arithmetic is exact.
    """
    n = gram.shape[0]
    if gram.shape != (n, n):
        raise DimensionMismatch(gram.shape)
    a = [[QQ.convert(x) for x in r] for r in gram.convert_to(QQ).to_list()]
    for i in range(n):
        for j in range(i):
            if a[i][j] != a[j][i]:
                raise NotPositiveDefinite("form is not symmetric")
    for i in range(n):
        if a[i][i] <= 0:
            raise NotPositiveDefinite(f"pivot {i} is {a[i][i]}")
        for j in range(i + 1, n):
            a[j][i] = a[i][j]
            a[i][j] = a[i][j] / a[i][i]
        for k in range(i + 1, n):
            for j in range(k, n):
                a[k][j] -= a[k][i] * a[i][j]
    q = [a[i][i] for i in range(n)]
    qq = [[a[i][j] if j > i else QQ(0) for j in range(n)] for i in range(n)]
    return q, qq


def valuation(x: int, p: int) -> int:
    "p-adic valuation of a nonzero integer"
    x = abs(int(x))
    if x == 0:
        raise ValueError("valuation of zero")
    return multiplicity(p, x)


def _gf(rows, p: int) -> DomainMatrix:
    k = GF(p, symmetric=False)
    ncols = len(rows[0]) if rows else 0
    return DomainMatrix([[k(int(x) % p) for x in r] for r in rows], (len(rows), ncols), k)


def _ints(m: DomainMatrix) -> list[list[int]]:
    k = m.domain
    return [[int(k.to_int(x)) % k.mod for x in r] for r in m.to_list()]


def rref_mod(rows: list[list[int]], p: int) -> tuple[list[list[int]], tuple[int, ...]]:
    "reduced row echelon form over 𝔽_p; zero rows are dropped"
    if not rows:
        return [], ()
    r, piv = _gf(rows, p).rref()
    return _ints(r)[: len(piv)], tuple(piv)


def inverse_mod(rows: list[list[int]], p: int) -> list[list[int]]:  # noqa:D103
    return _ints(_gf(rows, p).inv())


def solve_mod(a: list[list[int]], rhs: list[list[int]], p: int) -> list[list[int]]:
    """
    Particular solutions of ``a · y = rhs[:, c]`` over 𝔽_p, one per column.

    Free variables are set to zero. Raises `VerificationFailed` if some
    system is inconsistent.
    """
    ncols = len(a[0])
    aug = [list(ra) + list(rb) for ra, rb in zip(a, rhs)]
    red, piv = rref_mod(aug, p)
    if piv and piv[-1] >= ncols:
        raise VerificationFailed("inconsistent system mod %d" % p)
    res = []
    for c in range(len(rhs[0])):
        y = [0] * ncols
        for row, pc in zip(red, piv):
            y[pc] = row[ncols + c]
        res.append(y)
    return res


def plain(x):
    "a rational as int when it is integral"
    x = QQ.convert(x)
    return int(x.numerator) if x.denominator == 1 else x


def same_matrix(a: DomainMatrix, b: DomainMatrix) -> bool:
    "entrywise equality, regardless of domain and storage format"
    return a.shape == b.shape and a.to_list() == b.to_list()
