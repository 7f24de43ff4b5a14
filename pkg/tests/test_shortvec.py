"""
Short vectors, theta series and fingerprints against brute force
"""
from __future__ import annotations

import random

import pytest

from moat.lattice._test import (
    A2,
    E8,
    box_theta,
    box_vectors,
    congruent,
    e8_theta_box,
    identity_gram,
    lambda1,
    lambda2,
    random_gram,
    random_unimodular,
    zlattice,
)
from moat.lattice.errors import NotPositiveDefinite, ValidationError
from moat.lattice.lattice import transform
from moat.lattice.linalg import qmatrix
from moat.lattice.shortvec import (
    default_cutoff,
    fingerprint,
    reduce_gram,
    short_vectors,
    successive_minima,
    theta_coeffs,
)


@pytest.mark.parametrize(
    "gram,bound,pairs",
    [(identity_gram(2), 1, 2), (A2, 2, 3), (E8, 2, 120), (identity_gram(3), 2, 9)],
)
def test_counts(gram, bound, pairs):  # noqa:D103
    sv = short_vectors(gram, bound)
    assert len(sv) == pairs
    assert len(list(sv.signed())) == 2 * pairs


def test_shape():
    "one of each ±x, sorted, with exact norms"
    sv = short_vectors(A2, 2)
    assert sv.vectors == ((0, 1), (1, 0), (1, 1))
    assert sv.norms == (2, 2, 2)
    assert sv.bound == 2


def test_not_definite():  # noqa:D103
    with pytest.raises(NotPositiveDefinite):
        short_vectors([[1, 2], [2, 1]], 3)


def test_random_against_box():
    "agreement with a plain box scan on random forms"
    rng = random.Random(4711)
    for _ in range(200):
        n = rng.choice((2, 3))
        g = random_gram(rng, n, 4)
        bound = rng.randint(1, 8)
        sv = short_vectors(g, bound)
        assert dict(sv.pairs()) == box_vectors(g, bound), g


@pytest.mark.parametrize(
    "gram,cutoff,theta",
    [
        (identity_gram(2), 2, [1, 4, 4]),
        (A2, 3, [1, 0, 6, 0]),
        (E8, 2, [1, 0, 240]),
        (identity_gram(3), 3, [1, 6, 12, 8]),
    ],
)
def test_theta(gram, cutoff, theta):  # noqa:D103
    assert theta_coeffs(zlattice(gram), cutoff) == theta
    assert theta_coeffs(gram, cutoff) == box_theta(gram, cutoff)


def test_theta_e8():
    "E8 against its even coordinate model"
    assert theta_coeffs(zlattice(E8), 4) == [1, 0, 240, 0, 2160]
    assert e8_theta_box(4) == [1, 0, 240, 0, 2160]


def test_theta_hermitian():
    "the trace form of ℤ_L³ counts the six units times eᵢ at norm 2"
    assert theta_coeffs(lambda1(), 2)[2] == 6
    assert theta_coeffs(lambda2(), 2)[2] == 0


def test_theta_cutoff():
    "cutoff 0 is just the zero vector; negative cutoffs are refused"
    assert theta_coeffs(zlattice(A2), 0) == [1]
    for lam in (zlattice(A2), lambda1()):
        with pytest.raises(ValidationError):
            theta_coeffs(lam, -1)


def test_reduce():
    "a scrambled basis comes back short and congruent"
    rng = random.Random(17)
    for _ in range(30):
        g = random_gram(rng, 3, 3)
        u = random_unimodular(rng, 3, 10)
        h = congruent(g, u)
        v, r = reduce_gram(h)
        vm = qmatrix(v)
        assert abs(vm.det()) == 1
        assert (vm * qmatrix(h) * vm.transpose()).to_list() == r.to_list()
        diag = [r.to_list()[i][i] for i in range(3)]
        assert diag == sorted(diag)
        assert successive_minima(h) == successive_minima(g)


def test_minima():  # noqa:D103
    assert successive_minima(E8) == (2,) * 8
    assert successive_minima([[1, 0], [0, 5]]) == (1, 5)
    assert successive_minima([[2, 1], [1, 5]]) == (2, 5)
    assert default_cutoff(zlattice(A2)) == 4


def test_fingerprint():
    "fingerprints are invariant and cheap to compare"
    f1 = fingerprint(lambda1())
    f2 = fingerprint(lambda2())
    assert f1.disc == f2.disc == 1
    assert f1.rank == 6
    assert f1 != f2

    g = [[0, 1, 0], [-1, 0, 0], [0, 0, 1]]
    assert fingerprint(transform(lambda2(), g)) == f2

    rng = random.Random(99)
    for _ in range(20):
        gram = random_gram(rng, 3, 4)
        other = congruent(gram, random_unimodular(rng, 3))
        assert fingerprint(zlattice(gram), 6) == fingerprint(zlattice(other), 6)

    a3 = [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]
    fz, fa = fingerprint(zlattice(identity_gram(3))), fingerprint(zlattice(a3))
    assert (fz.disc, fa.disc) == (1, 4)
    assert fingerprint(zlattice(A2), 4).with_aut(12) == fingerprint(zlattice(A2), 4)
