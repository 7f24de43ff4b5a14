"""
Isotropic subspaces and neighbors
"""
from __future__ import annotations

from itertools import product

import pytest
from sympy.ntheory import multiplicity

from moat.lattice._test import A2, E8, identity_gram, lambda1, lambda2, prime_above, zlattice
from moat.lattice.errors import BadPrime, KTooLarge, NotIsotropic, ValidationError
from moat.lattice.isometry import is_isometric
from moat.lattice.lattice import (
    contains,
    discriminant,
    index,
    is_integral_lattice,
    module_intersect,
)
from moat.lattice.neighbor import (
    isotropic_lines,
    isotropic_subspace,
    isotropic_subspaces,
    neighbor,
    neighbor_degree,
    neighbor_subspace,
    neighbors,
)
from moat.lattice.ring import split_prime


def _p(lam, p):
    return split_prime(lam.ring, p)[0]


def _brute_isotropic_planes(p: int, n: int) -> int:
    "totally isotropic 2-spaces of the sum of n squares over 𝔽_p, counted by echelon form"

    def dot(x, y):
        return sum(a * b for a, b in zip(x, y)) % p

    count = 0
    for i, j in ((i, j) for i in range(n) for j in range(i + 1, n)):
        free1 = [c for c in range(i + 1, n) if c != j]
        free2 = list(range(j + 1, n))
        for v1 in product(range(p), repeat=len(free1)):
            x = [0] * n
            x[i] = 1
            for c, v in zip(free1, v1):
                x[c] = v
            for v2 in product(range(p), repeat=len(free2)):
                y = [0] * n
                y[j] = 1
                for c, v in zip(free2, v2):
                    y[c] = v
                if dot(x, x) == dot(x, y) == dot(y, y) == 0:
                    count += 1
    return count


def test_hermitian_lines():
    "at a split prime every line of Λ/PΛ is isotropic"
    lam = lambda1()
    P = prime_above(2)
    assert len(isotropic_lines(lam, P)) == 7
    assert len(isotropic_subspaces(lam, P, 2)) == 7
    assert len(isotropic_subspaces(lam, P, 3)) == 1
    assert [x.echelon for x in isotropic_subspaces(lam, P, 1)] == [
        x.echelon for x in isotropic_lines(lam, P)
    ]
    with pytest.raises(KTooLarge):
        isotropic_subspaces(lam, P, 4)


def test_inert_lines():
    "isotropic points of a Hermitian plane over 𝔽_9: 3³+1"
    lam = lambda1()
    (P,) = split_prime(lam.ring, 3)
    assert len(isotropic_lines(lam, P)) == 28
    with pytest.raises(KTooLarge):
        isotropic_subspaces(lam, P, 2)


@pytest.mark.parametrize("n,count", [(3, 4), (2, 0), (4, 16)])
def test_orthogonal_lines(n, count):
    "x₁²+…+xₙ² ≡ 0 mod 3 on projective space"
    lam = zlattice(identity_gram(n))
    assert len(isotropic_lines(lam, _p(lam, 3))) == count


def test_orthogonal_planes():
    "totally isotropic planes in 𝔽_3⁴ against a Grassmannian scan"
    lam = zlattice(identity_gram(4))
    res = isotropic_subspaces(lam, _p(lam, 3), 2)
    assert len(res) == _brute_isotropic_planes(3, 4) == 8
    assert len(isotropic_subspaces(zlattice(identity_gram(5)), _p(lam, 3), 2)) == (
        _brute_isotropic_planes(3, 5)
    )


def test_bad_primes():  # noqa:D103
    with pytest.raises(BadPrime):
        isotropic_lines(lambda1(), split_prime(lambda1().ring, 7)[0])
    a2 = zlattice(A2)
    with pytest.raises(BadPrime):
        isotropic_lines(a2, _p(a2, 3))
    z3 = zlattice(identity_gram(3))
    with pytest.raises(BadPrime):
        isotropic_lines(z3, _p(z3, 2))
    with pytest.raises(ValidationError):
        isotropic_subspaces(z3, _p(z3, 3), 0)
    with pytest.raises(KTooLarge):
        isotropic_subspaces(z3, _p(z3, 3), 2)


def test_explicit_subspace():
    "subspaces given by spanning vectors"
    z3 = zlattice(identity_gram(3))
    P = _p(z3, 3)
    x = isotropic_subspace(z3, P, [[1, 1, 1], [2, 2, 2]])
    assert x.k == 1
    assert x.echelon == (((1,), (1,), (1,)),)
    with pytest.raises(NotIsotropic):
        isotropic_subspace(z3, P, [[1, 0, 0]])
    with pytest.raises(ValidationError):
        isotropic_subspace(z3, P, [[1, 1]])
    nb = neighbor(z3, P, x)
    assert nb.index == 3
    assert discriminant(nb.lattice) == 1


def test_hermitian_neighbors():
    "the second class is a neighbor of ℤ_L³ above 2"
    lam = lambda1()
    P = prime_above(2)
    res = neighbors(lam, P)
    assert len(res) == 7
    assert any(is_isometric(nb.lattice, lambda2()) for nb in res)
    for nb in res:
        assert nb.index == 2
        assert discriminant(nb.lattice) == 1
        assert nb.lattice != lam
        inter = module_intersect(lam, nb.lattice)
        assert contains(lam, inter)
        assert contains(nb.lattice, inter)
        assert neighbor_degree(lam, nb.lattice, P) == 1
        assert neighbor_subspace(lam, nb.lattice, P) == nb.subspace.echelon
    assert neighbor_degree(lam, lam, P) is None


def test_hermitian_neighbors_k():
    "P²-neighbors have index 4"
    lam = lambda1()
    P = prime_above(2)
    res = neighbors(lam, P, 2)
    assert len(res) == 7
    for nb in res:
        assert nb.index == 4
        assert neighbor_degree(lam, nb.lattice, P) == 2
    (whole,) = neighbors(lam, P, 3)
    assert neighbor_degree(lam, whole.lattice, P) == 3


def test_other_primes():
    "neighbors at 11 and at the inert prime 3"
    lam = lambda1()
    res = neighbors(lam, prime_above(11))
    assert len(res) == 133
    (P3,) = split_prime(lam.ring, 3)
    res = neighbors(lam, P3)
    assert len(res) == 28
    for nb in res[:5]:
        assert nb.index == 9
        assert neighbor_degree(lam, nb.lattice, P3) == 1


def test_cubic_neighbors():
    "ℤ³ at 3 has four neighbors, all isometric to ℤ³"
    z3 = zlattice(identity_gram(3))
    res = neighbors(z3, _p(z3, 3))
    assert len(res) == 4
    for nb in res:
        assert is_isometric(z3, nb.lattice)


def test_e8_neighbors():
    "E8 is alone in its genus, so its neighbors are copies of it"
    e8 = zlattice(E8)
    P = _p(e8, 3)
    lines = isotropic_lines(e8, P)
    assert len(lines) == 1120
    for x in (lines[0], lines[len(lines) // 2], lines[-1]):
        nb = neighbor(e8, P, x)
        assert discriminant(nb.lattice) == 1
        assert is_isometric(e8, nb.lattice)


def test_wrong_prime():  # noqa:D103
    lam = lambda1()
    P = prime_above(2)
    x = isotropic_lines(lam, P)[0]
    with pytest.raises(ValidationError):
        neighbor(lam, P.conjugate(), x)


# disc 21, nonsquare at 5
D21 = [[2, 1, 0, 0], [1, 2, 0, 0], [0, 0, 2, 1], [0, 0, 1, 4]]


def _only_p(m, p: int) -> bool:
    "all denominators of m are powers of p"
    for row in m.to_list():
        for x in row:
            d = int(x.denominator)
            if d != p ** multiplicity(p, d):
                return False
    return True


def _agree_away_from(lam, pi, p: int) -> bool:
    return _only_p(pi.basis * lam.basis_inv, p) and _only_p(lam.basis * pi.basis_inv, p)


def _check_neighbor(lam, P, nb):
    assert nb.index == P.norm
    assert nb.lattice != lam
    assert index(lam, nb.lattice) == 1
    assert discriminant(nb.lattice) == discriminant(lam)
    assert is_integral_lattice(nb.lattice)
    assert _agree_away_from(lam, nb.lattice, P.p)


def _cases():
    z3 = zlattice(identity_gram(3))
    d21 = zlattice(D21)
    lam = lambda1()
    (P3,) = split_prime(lam.ring, 3)
    return [
        (z3, _p(z3, 3)),
        (z3, _p(z3, 5)),
        (z3, _p(z3, 7)),
        (d21, _p(d21, 5)),
        (lam, prime_above(2)),
        (lam, prime_above(11)),
        (lam, P3),
        (lam, prime_above(23)),
    ]


def test_neighbor_invariants():
    "every neighbor keeps the discriminant and differs from Λ only at p"
    total = 0
    counts = []
    for lam, P in _cases():
        res = neighbors(lam, P)
        counts.append(len(res))
        for nb in res:
            _check_neighbor(lam, P, nb)
        total += len(res)
    assert counts == [4, 6, 8, 36, 7, 133, 28, 553]
    assert total >= 500


@pytest.mark.parametrize("p", [3, 5, 7])
def test_orthogonal_symmetry(p):
    "Λ is a p-neighbor of each of its p-neighbors"
    for lam in (zlattice(identity_gram(3)), zlattice(D21)):
        if p != 5 and lam.n == 4:
            continue
        P = _p(lam, p)
        for nb in neighbors(lam, P):
            back = [x.lattice for x in neighbors(nb.lattice, P)]
            assert lam in back
            assert neighbor_degree(nb.lattice, lam, P) == 1


def test_hermitian_symmetry():
    "Λ is a P̄-neighbor of each of its P-neighbors"
    lam = lambda1()
    (P3,) = split_prime(lam.ring, 3)
    for P, step in ((prime_above(2), 1), (prime_above(11), 29), (P3, 3)):
        Q = P.conjugate()
        for nb in neighbors(lam, P)[::step]:
            assert lam in [x.lattice for x in neighbors(nb.lattice, Q)]
            assert neighbor_degree(nb.lattice, lam, Q) == 1
            if P.self_conjugate:
                continue
            assert neighbor_degree(nb.lattice, lam, P) is None
