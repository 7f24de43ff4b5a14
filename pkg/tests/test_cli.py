"""
Command line and file formats
"""
from __future__ import annotations

import json

import asyncclick as click
import pytest

from moat.util import yprint
from moat.src.test import run
from moat.lattice._main import catch_errors
from moat.lattice._test import (
    LAMBDA2,
    lambda1,
    lambda2,
    prime_above,
    sample,
    write_lattice,
    zlattice,
)
from moat.lattice.errors import (
    EXIT_REFUSED,
    EXIT_VALIDATION,
    DimensionMismatch,
    HypothesesUnverifiable,
    ParseError,
)
from moat.lattice.genus import genus_enumerate
from moat.lattice.hecke import CONVENTION
from moat.lattice.isometry import is_isometric
from moat.lattice.lattice import discriminant
from moat.lattice.linalg import QQ
from moat.lattice.pool import WorkerPool
from moat.lattice.util import (
    GenusCache,
    cache_key,
    dumps,
    genus_from_data,
    genus_to_data,
    lattice_from_data,
    lattice_to_data,
    parse_primes,
    parse_rational,
)

pytestmark = pytest.mark.anyio


def _cfg(tmp_path, **kw):
    cfg = {"lattice": {"jobs": 1, "cache": str(tmp_path / "cache"), **kw}}
    fn = tmp_path / "test.cfg"
    with fn.open("w") as f:
        yprint(cfg, f)
    return str(fn)


async def _run(cfg, *args):
    res = await run("-c", cfg, "lattice", *(str(a) for a in args), do_stdout=True)
    return json.loads(res.stdout)


async def test_theta(tmp_path):  # noqa:D103
    cfg = _cfg(tmp_path)
    assert await _run(cfg, "theta", sample("e8"), "-c", 4) == [1, 0, 240, 0, 2160]
    assert await _run(cfg, "theta", sample("a2"), "-c", 3) == [1, 0, 6, 0]


async def test_isometry_aut(tmp_path):
    "the two sample Hermitian lattices"
    cfg = _cfg(tmp_path)
    res = await _run(cfg, "isometry", sample("hermitian_m7_n3"), sample("lambda2_m7"))
    assert res == {"isometric": False, "witness": None}
    res = await _run(cfg, "isometry", sample("lambda2_m7"), sample("lambda2_m7"))
    assert res["isometric"] is True
    assert len(res["witness"]) == 6

    res = await _run(cfg, "aut", sample("cubic3"))
    assert res["order"] == 48
    assert res["verified"] is True
    res = await _run(cfg, "aut", sample("hermitian_m7_n3"), "-l", 10)
    assert res["order"] == 48
    assert res["verified"] is False


async def test_neighbors(tmp_path):  # noqa:D103
    cfg = _cfg(tmp_path)
    res = await _run(cfg, "neighbors", sample("hermitian_m7_n3"), "-p", 2)
    assert res["count"] == len(res["neighbors"]) == 7
    assert res["prime"] == "(2, ω)"
    gram = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    nb = lattice_from_data({"disc": -7, "gram": gram, **res["neighbors"][0]})
    assert discriminant(nb) == 1

    res = await _run(cfg, "neighbors", sample("hermitian_m7_n3"), "-p", 2, "-s", "conj", "-k", 3)
    assert res["count"] == 1


async def test_genus_hecke(tmp_path):
    "genus file, cache and Hecke table"
    cfg = _cfg(tmp_path)
    out = tmp_path / "genus.json"
    herm = str(sample("hermitian_m7_n3"))
    await run("-c", cfg, "lattice", "genus", herm, "-p", "2", "-o", str(out))
    data = json.loads(out.read_text())
    assert data["h"] == 2
    assert data["classes"][0]["aut_order"] == 48
    assert (tmp_path / "cache" / f"genus-{data['key']}.json").exists()

    again = await _run(cfg, "genus", sample("hermitian_m7_n3"), "-p", 2)
    assert again["key"] == data["key"]
    assert again["mass"] == data["mass"]

    res = await _run(cfg, "hecke", out, "-p", "2,11", "--no-witness")
    assert res["convention"] == CONVENTION
    assert [op["norm"] for op in res["operators"]] == [2, 11]
    eis = res["eigensystems"][0]
    assert eis["label"] == "eisenstein"
    assert sorted(eis["eigenvalues"].values()) == [7, 133]

    tab = await run("-c", cfg, "lattice", "hecke", str(out), "-p", "2", "-t", do_stdout=True)
    lines = tab.stdout.splitlines()
    assert lines[0].split()[:3] == ["N(p)", "eisenstein", "s1"]
    assert lines[1].split()[:3] == ["2", "7", "-1"]


async def test_catch_errors():
    "our errors become click errors with their own exit status"

    @catch_errors
    async def refuse():
        raise HypothesesUnverifiable("rank 2")

    with pytest.raises(click.ClickException) as exc:
        await refuse()
    assert exc.value.exit_code == EXIT_REFUSED
    assert "HypothesesUnverifiable" in exc.value.message


def test_lattice_file(tmp_path):
    "the three ways of giving a lattice"
    lam = lambda2()
    data = lattice_to_data(lam)
    assert data["rank"] == 3
    assert len(data["basis"]) == 6
    assert lattice_from_data(data) == lam
    assert lattice_from_data({"disc": -7, "gram": data["gram"], "basis": LAMBDA2}) == lam
    assert lattice_from_data({"disc": -7, "gram": data["gram"], "generators": LAMBDA2}) == lam
    assert lattice_from_data({"disc": -7, "gram": data["gram"]}) == lambda1()

    fn = write_lattice(tmp_path / "l.json", lam)
    assert is_isometric(lattice_from_data(json.loads(fn.read_text())), lam)

    with pytest.raises(DimensionMismatch):
        lattice_from_data({"gram": [[1, 0], [0, 1]], "rank": 3})
    with pytest.raises(DimensionMismatch):
        lattice_from_data({"gram": [[1, 0], [0, 1]], "basis": [[1, 0, 0]]})
    with pytest.raises(ParseError):
        lattice_from_data({"gram": [[1]], "basis": [[1]], "generators": [[1]]})
    with pytest.raises(ParseError):
        lattice_from_data({"disc": -7})


def test_rationals():  # noqa:D103
    assert parse_rational("-3/2") == QQ(-3, 2)
    assert parse_rational(5) == 5
    for bad in ("x", "1/0", True, None):
        with pytest.raises(ParseError):
            parse_rational(bad)


async def test_genus_cache(tmp_path):
    "records survive the trip to disk"
    rec = await genus_enumerate(lambda1(), [prime_above(2)])
    data = genus_to_data(rec)
    back = genus_from_data(json.loads(dumps(data)))
    assert back.h == rec.h
    assert back.aut_orders == rec.aut_orders
    assert back.fingerprints == rec.fingerprints
    assert back.representatives == rec.representatives

    cache = GenusCache(tmp_path)
    key = cache_key({"lattice": lattice_to_data(lambda1()), "primes": [[2, 0]]})
    assert cache.get(key) is None
    cache.put(key, rec)
    assert cache.get(key).h == 2
    assert not GenusCache()
    assert cache_key({"a": QQ(1, 2)}) == cache_key({"a": "1/2"})
    assert cache_key({"a": 1}) != cache_key({"a": 2})

    z = zlattice([[2, 1], [1, 2]])
    assert lattice_from_data(lattice_to_data(z)) == z


def test_bad_numbers():
    "non-numeric integers in input files are parse errors"
    gram = [[1, 0], [0, 1]]
    for data in (
        {"disc": "x", "gram": gram},
        {"disc": None, "gram": gram},
        {"disc": True, "gram": gram},
        {"gram": gram, "rank": "two"},
    ):
        with pytest.raises(ParseError):
            lattice_from_data(data)
    ring = lambda1().ring
    with pytest.raises(ParseError):
        parse_primes(ring, ["x"])
    with pytest.raises(ParseError):
        parse_primes(ring, "2,x")
    assert [P.norm for P in parse_primes(ring, ["2", 11])] == [2, 11]


async def test_bad_jobs():
    "a worker count below one is a validation error"

    @catch_errors
    async def start():
        WorkerPool(0)

    with pytest.raises(click.ClickException) as exc:
        await start()
    assert exc.value.exit_code == EXIT_VALIDATION
