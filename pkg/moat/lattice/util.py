"""
File formats, hashing and the genus cache.

Lattice files are JSON::

    {"disc": -7, "gram": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
     "basis": [[[1, -1], 0, 0], [1, 1, 0], ["-3/2", ...]]}

``disc`` defaults to 1 (ℤ) and ``rank``, if present, must match ``gram``. A
ring element is a number, a ``"p/q"`` string or a pair ``[a, b]`` meaning
a + b·ω. Rows of ``basis`` with d·n rational entries are a ℤ-basis in
flattened coordinates; rows with n ring elements are a ℤ_L-basis. The
lattice may also be the ℤ_L-span of ``generators``. Without either it is
the standard lattice.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
from pathlib import Path

from moat.util import packer, yload

from .errors import DimensionMismatch, ParseError, ValidationError
from .genus import GenusRecord, mass
from .lattice import AmbientSpace, HermLattice, lattice_from_generators, standard_lattice
from .linalg import QQ, plain
from .ring import RingElt, make_ring, split_prime
from .shortvec import Fingerprint

from typing import TYPE_CHECKING  # isort:skip

if TYPE_CHECKING:
    from .ring import CoefficientRing, PrimeIdealData

logger = logging.getLogger(__name__)

__all__ = [
    "hash256",
    "parse_rational",
    "to_json",
    "dumps",
    "read_data",
    "lattice_from_data",
    "lattice_to_data",
    "genus_from_data",
    "genus_to_data",
    "parse_primes",
    "prime_of",
    "cache_key",
    "GenusCache",
]


def hash256(data: bytes) -> bytes:
    "SHA-256 of a chunk of bytes"
    h = hashlib.sha256()
    h.update(data)
    return h.digest()


def parse_rational(x):
    "an int, a rational or a 'p/q' string, as an exact rational"
    if isinstance(x, bool):
        raise ParseError(f"not a number: {x!r}")
    if isinstance(x, str):
        num, _, den = x.strip().partition("/")
        try:
            return QQ(int(num), int(den) if den else 1)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"not a rational: {x!r}") from None
    if isinstance(x, int):
        return QQ(x)
    try:
        return QQ.convert(x)
    except Exception:
        raise ParseError(f"not a number: {x!r}") from None


def _elt(ring: CoefficientRing, x) -> RingElt:
    if isinstance(x, RingElt):
        return x
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ParseError(f"ring elements are [a, b], not {x!r}")
        return ring(parse_rational(x[0]), parse_rational(x[1]))
    return ring(parse_rational(x))


def to_json(x):
    "convert to something `json` can write: rationals become ints or 'p/q'"
    if isinstance(x, dict):
        return {str(k): to_json(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_json(v) for v in x]
    if isinstance(x, RingElt):
        return to_json([x.a, x.b]) if x.b else to_json(x.a)
    if isinstance(x, (bool, str, float)) or x is None:
        return x
    x = plain(x)
    if isinstance(x, int):
        return x
    return f"{int(x.numerator)}/{int(x.denominator)}"


def dumps(data) -> str:
    "deterministic JSON"
    return json.dumps(to_json(data), sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def read_data(path) -> dict:
    "read a JSON (or YAML) file"
    try:
        with Path(path).open("r") as f:
            data = yload(f)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: not a mapping")
    return data


def _int(x, what: str) -> int:
    if isinstance(x, bool):
        raise ParseError(f"{what}: not an integer: {x!r}")
    try:
        return int(x)
    except (TypeError, ValueError):
        raise ParseError(f"{what}: not an integer: {x!r}") from None


def _space(data) -> AmbientSpace:
    ring = make_ring(_int(data.get("disc", 1), "disc"))
    try:
        gram = data["gram"]
    except KeyError:
        raise ParseError("no 'gram'") from None
    if not isinstance(gram, list) or not all(isinstance(r, list) for r in gram):
        raise ParseError("'gram' must be a list of rows")
    if "rank" in data and _int(data["rank"], "rank") != len(gram):
        raise DimensionMismatch(f"rank {data['rank']} but the Gram matrix has {len(gram)} rows")
    return AmbientSpace(ring, tuple(tuple(_elt(ring, x) for x in r) for r in gram))


def _flat(space: AmbientSpace, rows) -> bool:
    # a flattened ℤ-basis has d·n rational entries per row
    if space.d == 1:
        return True
    return all(len(r) == space.dim and not any(isinstance(x, list) for x in r) for r in rows)


def lattice_from_data(data: dict, space: AmbientSpace | None = None) -> HermLattice:
    "build a lattice from its file representation"
    if space is None:
        space = _space(data)
    ring = space.ring
    given = [k for k in ("basis", "generators") if k in data]
    if len(given) > 1:
        raise ParseError("both 'basis' and 'generators'")
    if not given:
        return standard_lattice(space)
    vecs = data[given[0]]
    if not isinstance(vecs, list) or not all(isinstance(r, list) for r in vecs):
        raise ParseError(f"'{given[0]}' must be a list of rows")
    if given[0] == "basis" and _flat(space, vecs):
        if len(vecs) != space.dim or any(len(r) != space.dim for r in vecs):
            raise DimensionMismatch(f"a ℤ-basis is {space.dim}×{space.dim}")
        return HermLattice.from_rows(space, [[parse_rational(x) for x in r] for r in vecs])
    if any(len(r) != space.n for r in vecs):
        raise DimensionMismatch(f"vectors need {space.n} entries")
    vecs = [[_elt(ring, x) for x in v] for v in vecs]
    if given[0] == "basis" and len(vecs) != space.n:
        raise ValidationError(f"a basis needs {space.n} vectors, not {len(vecs)}")
    return lattice_from_generators(space, vecs)


def _space_data(space: AmbientSpace) -> dict:
    return {"disc": space.ring.disc, "rank": space.n, "gram": [list(r) for r in space.gram]}


def lattice_to_data(lam: HermLattice) -> dict:
    "the file representation, with the canonical ℤ-basis"
    res = _space_data(lam.space)
    res["basis"] = lam.basis.to_list()
    return res


def parse_primes(ring: CoefficientRing, primes, side: str = "p") -> list[PrimeIdealData]:
    """
    One prime ideal above each rational prime.

    At a split prime this is the first of the pair, or its conjugate if
    ``side`` is ``"conj"``.
    """
    if isinstance(primes, str):
        try:
            primes = [int(p) for p in primes.split(",") if p.strip()]
        except ValueError:
            raise ParseError(f"not a list of primes: {primes!r}") from None
    if side not in ("p", "conj"):
        raise ValidationError(f"side must be 'p' or 'conj', not {side!r}")
    res = []
    for p in primes:
        prime = split_prime(ring, _int(p, "prime"))[0]
        if side == "conj":
            prime = prime.conjugate()
        res.append(prime)
    return res


def prime_of(ring: CoefficientRing, data) -> PrimeIdealData:
    "the prime ideal behind a ``[p, root]`` entry"
    p, root = data
    for prime in split_prime(ring, int(p)):
        if prime.root == root or prime.f == 2:
            return prime
    raise ParseError(f"no prime above {p} with root {root}")


def genus_to_data(record: GenusRecord) -> dict:
    "the genus file contents"
    lam = record.representatives[0]
    res = _space_data(lam.space)
    res["primes"] = [[P.p, P.root] for P in record.primes]
    res["cutoff"] = record.cutoff
    res["h"] = record.h
    res["classes"] = [
        {
            "basis": r.basis.to_list(),
            "aut_order": o,
            "fingerprint": {
                "disc": f.disc,
                "rank": f.rank,
                "theta": list(f.theta),
                "minima": list(f.minima),
            },
        }
        for r, o, f in zip(record.representatives, record.aut_orders, record.fingerprints)
    ]
    res["traversal"] = [list(e) for e in record.traversal_log]
    res["mass"] = mass(record)
    return res


def genus_from_data(data: dict) -> GenusRecord:
    "rebuild a genus record from a genus file"
    space = _space(data)
    try:
        reps, orders, fps = [], [], []
        for c in data["classes"]:
            reps.append(lattice_from_data({"basis": c["basis"]}, space))
            orders.append(int(c["aut_order"]))
            f = c["fingerprint"]
            fps.append(
                Fingerprint(
                    int(f["disc"]),
                    int(f["rank"]),
                    tuple(f["theta"]),
                    tuple(f["minima"]),
                    orders[-1],
                )
            )
        primes = [prime_of(space.ring, p) for p in data["primes"]]
        log = [(int(a), _tuples(e), int(b)) for a, e, b in data.get("traversal", ())]
        cutoff = int(data["cutoff"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad genus file: {exc!r}") from exc
    if _int(data.get("h", len(reps)), "h") != len(reps):
        raise ParseError("class count does not match 'h'")
    return GenusRecord(reps, fps, primes, cutoff, orders, log)


def _tuples(x):
    if isinstance(x, list):
        return tuple(_tuples(v) for v in x)
    return x


def cache_key(data) -> str:
    "hex SHA-256 of the msgpack encoding of some canonical data"
    return hash256(packer(to_json(data))).hex()


class GenusCache:
    """
    Genus files on disk, named by a hash of the input that produced them.

    The directory comes from ``NEIGHBOR_CACHE_DIR`` or the config; without
    either the cache is disabled.
    """

    def __init__(self, path: str | os.PathLike | None = None):
        path = os.environ.get("NEIGHBOR_CACHE_DIR") or path
        self.path = Path(path) if path else None

    def __bool__(self):
        return self.path is not None

    def _file(self, key: str) -> Path:
        return self.path / f"genus-{key}.json"

    def get(self, key: str) -> GenusRecord | None:
        "a cached record, if any"
        if self.path is None:
            return None
        fn = self._file(key)
        if not fn.exists():
            return None
        logger.debug("Cache hit: %s", fn)
        return genus_from_data(read_data(fn))

    def put(self, key: str, record: GenusRecord):
        "store a record"
        if self.path is None:
            return
        try:
            self.path.mkdir(parents=True, exist_ok=True)
            self._file(key).write_text(dumps(genus_to_data(record)))
        except OSError as exc:
            logger.warning("Could not write the genus cache: %r", exc)
