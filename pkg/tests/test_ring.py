"""
Coefficient rings and their primes
"""
from __future__ import annotations

import pytest

from moat.lattice.errors import (
    DyadicUnsupported,
    NonFundamentalDiscriminant,
    RealQuadraticUnsupported,
    RingMismatch,
    ValidationError,
)
from moat.lattice.ring import (
    INERT,
    RAMIFIED,
    SPLIT,
    conj,
    make_ring,
    principal_generator,
    residue_map,
    split_prime,
)


@pytest.mark.parametrize(
    "disc,t,n",
    [(-7, 1, 2), (-4, 0, 1), (-3, 1, 1), (-8, 0, 2), (-23, 1, 6)],
)
def test_make_ring(disc, t, n):
    "ω² = tω - n"
    r = make_ring(disc)
    assert (r.t, r.n, r.d) == (t, n, 2)
    w = r.omega
    assert w * w == t * w - n


def test_rational_ring():
    "ℤ is the degenerate case"
    r = make_ring(1)
    assert r.d == 1
    assert len(r.units) == 2
    with pytest.raises(ValidationError):
        r(1, 1)


@pytest.mark.parametrize("disc", [-12, -28, -1, -16])
def test_not_fundamental(disc):
    "only maximal orders"
    with pytest.raises(NonFundamentalDiscriminant):
        make_ring(disc)


def test_real_quadratic():  # noqa:D103
    with pytest.raises(RealQuadraticUnsupported):
        make_ring(5)


@pytest.mark.parametrize("disc,units", [(-7, 2), (-4, 4), (-3, 6)])
def test_units(disc, units):  # noqa:D103
    r = make_ring(disc)
    assert len(r.units) == units
    for u in r.units:
        assert u.norm() == 1


def test_arithmetic():
    "norm and trace in ℤ[(1+√-7)/2]"
    r = make_ring(-7)
    w = r.omega
    assert (1 + 2 * w).norm() == 11
    assert (3 + 2 * w).norm() == 23
    assert w.conj() == 1 - w
    assert w.trace() == 1
    assert (w * w.conj()).norm() == 4
    x = 3 - 5 * w
    assert conj(r, conj(r, x)) == x
    assert (x * x.conj()).b == 0
    assert len(r.elements_of_norm(2)) == 4
    assert str(w - 5) == "ω-5"


def test_mixed_rings():  # noqa:D103
    with pytest.raises(RingMismatch):
        make_ring(-7).omega + make_ring(-4).omega


def test_split_primes():
    "the primes of ℤ[ω], D = -7, in their documented order"
    r = make_ring(-7)
    p2 = split_prime(r, 2)
    assert [P.root for P in p2] == [0, 1]
    assert all(P.kind == SPLIT and P.norm == 2 for P in p2)
    assert p2[0].conjugate() == p2[1]
    assert p2[0].generator == r.omega

    p11 = split_prime(r, 11)
    assert str(p11[0]) == "(11, ω-5)"
    p23 = split_prime(r, 23)
    assert str(p23[0]) == "(23, ω-10)"
    for P in (*p2, *p11, *p23):
        g = P.generator
        assert g is not None
        assert g.norm() == P.p
        assert residue_map(r, P, g) == P.field.zero
        assert residue_map(r, P, P.pi) == P.field.zero

    (P7,) = split_prime(r, 7)
    assert P7.kind == RAMIFIED
    assert P7.self_conjugate
    (P3,) = split_prime(r, 3)
    assert P3.kind == INERT
    assert P3.norm == 9


def test_dyadic():
    "2 is only supported when it splits"
    with pytest.raises(DyadicUnsupported):
        split_prime(make_ring(-3), 2)
    with pytest.raises(DyadicUnsupported):
        split_prime(make_ring(-4), 2)


def test_not_prime():  # noqa:D103
    with pytest.raises(ValidationError):
        split_prime(make_ring(-7), 9)


def test_generator_is_exhaustive():
    "a principal generator is found wherever an element of norm p exists"
    r = make_ring(-7)
    for p in (2, 11, 23, 29, 37, 43):
        for P in split_prime(r, p):
            assert principal_generator(r, P) == P.generator


def test_residue_field():
    "𝔽_9 from the inert prime 3"
    r = make_ring(-7)
    (P,) = split_prime(r, 3)
    fld = P.field
    elts = list(fld.elements())
    assert len(elts) == 9
    for x in elts[1:]:
        assert fld.mul(x, fld.inv(x)) == fld.one
        assert fld.conj(fld.conj(x)) == x
    x = r(2, 1)
    assert fld.reduce(x.conj()) == fld.conj(fld.reduce(x))
