"""
Command-line code for moat.lattice
"""

# pylint: disable=import-outside-toplevel
from __future__ import annotations

import logging
from functools import wraps
from pathlib import Path

from moat.util import combine_dict
from moat.util.main import load_subgroup

from .errors import LatticeError, VerificationFailed
from .linalg import QQ
from .pool import WorkerPool
from .util import (
    GenusCache,
    cache_key,
    dumps,
    genus_from_data,
    genus_to_data,
    lattice_from_data,
    lattice_to_data,
    parse_primes,
    read_data,
)

import asyncclick as click

logger = logging.getLogger(__name__)


def catch_errors(fn):
    """
    Wrapper for commands so that our errors don't cause a stack trace
    and exit with their own status.
    """

    @wraps(fn)
    async def wrapper(*a, **k):
        try:
            return await fn(*a, **k)
        except LatticeError as e:
            exc = click.ClickException(f"{type(e).__name__}: {e}")
            exc.exit_code = e.exit_code
            raise exc from e

    return wrapper


def _split(ctx, kw):
    src = {k: ctx.get_parameter_source(k) for k in kw}
    default = {k: v for k, v in kw.items() if src[k] == click.core.ParameterSource.DEFAULT}
    param = {k: v for k, v in kw.items() if src[k] != click.core.ParameterSource.DEFAULT}
    return param, default


def _settings(ctx, kw, **cfgvals):
    "command line, then config, then option defaults"
    param, default = _split(ctx, kw)
    cfgvals = {k: v for k, v in cfgvals.items() if v is not None}
    return combine_dict(param, cfgvals, default)


def _emit(obj, data, output=None):
    text = dumps(data)
    if output:
        Path(output).write_text(text)
    else:
        print(text, end="", file=obj.stdout)


def _pool(cfg, jobs) -> WorkerPool:
    return WorkerPool(jobs, processes=bool(cfg.get("processes", False)))


def _lattice(path):
    return lattice_from_data(read_data(path))


@load_subgroup(
    prefix="moat.lattice",
    epilog="""
        Lattice files are JSON: "disc" (1 for ℤ, else a negative
        fundamental discriminant), "gram" (the Hermitian Gram matrix) and
        optionally "basis" (a ℤ-basis in flattened coordinates, or a
        ℤ_L-basis) or "generators". A ring element is a number, a "p/q"
        string or a pair [a, b] meaning a+bω.

        \b
        Exit status
        ===========
        0  ok
        2  invalid input
        3  refused: a hypothesis is not met or cannot be checked
        4  internal verification failed
        """,
)
@click.pass_context
async def cli(ctx):
    """Definite lattices: genera, isometries and Hecke operators

    'moat lattice' enumerates genera of definite quadratic and Hermitian
    lattices with Kneser neighbors, and computes Hecke operators on them."""
    obj = ctx.obj
    obj.ocfg = obj.cfg["lattice"]


@cli.command(name="genus", short_help="Enumerate a genus")
@click.pass_context
@click.argument("lattice", type=click.Path(exists=True, dir_okay=False))
@click.option("-p", "--primes", type=str, required=True, help="traversal primes, e.g. 2,11")
@click.option("-f", "--force", is_flag=True, help="accept unchecked hypotheses")
@click.option("-j", "--jobs", type=int, default=1, help="number of workers")
@click.option("-c", "--cutoff", type=int, default=None, help="theta cutoff for fingerprints")
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="write the genus file here")
@catch_errors
async def genus_(ctx, lattice, **kw):
    """
    Enumerate the classes in the genus of LATTICE.

    The result is a genus file: representatives, automorphism orders,
    fingerprints, the traversal log and the mass.
    """
    from .genus import genus_enumerate

    obj = ctx.obj
    cfg = obj.ocfg
    st = _settings(ctx, kw, jobs=cfg.get("jobs"), cutoff=cfg.get("theta", {}).get("cutoff"))
    lam = _lattice(lattice)
    primes = parse_primes(lam.ring, st["primes"])

    cache = GenusCache(cfg.get("cache"))
    key = cache_key(
        {
            "lattice": lattice_to_data(lam),
            "primes": [[P.p, P.root] for P in primes],
            "cutoff": st["cutoff"],
            "force": st["force"],
        }
    )
    record = cache.get(key)
    if record is None:
        record = await genus_enumerate(
            lam,
            primes,
            pool=_pool(cfg, st["jobs"]),
            cutoff=st["cutoff"],
            force=st["force"],
            verify_limit=cfg.get("aut", {}).get("verify_limit", 10**6),
        )
        cache.put(key, record)
    data = genus_to_data(record)
    data["key"] = key
    _emit(obj, data, st["output"])


def _format(v) -> str:
    if isinstance(v, tuple):
        return "poly" + str(list(v))
    return str(v)


def _table(mats, systems) -> str:
    labels = [s.label for s in systems]
    w = max([8] + [len(x) + 1 for x in labels])
    lines = [f"{'N(p)':>6}" + "".join(f"{x:>{w}}" for x in labels) + f"{'time':>10}"]
    for t in mats:
        vals = "".join(f"{_format(s.eigenvalues[t.name]):>{w}}" for s in systems)
        lines.append(f"{t.prime.norm:>6}{vals}{t.seconds:>9.2f}s")
    return "\n".join(lines) + "\n"


@cli.command(name="hecke", short_help="Hecke matrices and eigensystems")
@click.pass_context
@click.argument("genus", type=click.Path(exists=True, dir_okay=False))
@click.option("-p", "--primes", type=str, required=True, help="primes, e.g. 2,11,23")
@click.option("-k", "--k", "k", type=int, default=1, help="dimension of the subspaces")
@click.option("-s", "--side", type=click.Choice(["p", "conj"]), default="p", help="P or P̄")
@click.option("-t", "--table", is_flag=True, help="print a table of eigenvalues")
@click.option("-W/-w", "--witness/--no-witness", default=True, help="certify each class match")
@click.option("-j", "--jobs", type=int, default=1, help="number of workers")
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="write JSON here")
@catch_errors
async def hecke_(ctx, genus, **kw):
    """
    Compute T_{P,k} on the genus in GENUS for each prime and split the
    space of functions on the classes into eigensystems.
    """
    from .hecke import eigensystems, hecke_matrix, weighted_column_sums

    obj = ctx.obj
    cfg = obj.ocfg
    st = _settings(ctx, kw, jobs=cfg.get("jobs"), witness=cfg.get("hecke", {}).get("witness"))
    record = genus_from_data(read_data(genus))
    primes = parse_primes(record.representatives[0].ring, st["primes"], st["side"])
    pool = _pool(cfg, st["jobs"])

    mats = []
    for P in primes:
        t = await hecke_matrix(record, P, st["k"], pool=pool, witness=st["witness"])
        want = [QQ(t.kappa, o) for o in record.aut_orders]
        if weighted_column_sums(t, record.aut_orders) != want:
            raise VerificationFailed(f"{t.name}: weighted column sums are off")
        mats.append(t)
    systems = eigensystems(mats)

    if st["table"]:
        print(_table(mats, systems), end="", file=obj.stdout)
        return
    data = {
        "convention": mats[0].convention,
        "operators": [
            {"name": t.name, "p": t.prime.p, "norm": t.prime.norm, "k": t.k, "matrix": t.matrix}
            for t in mats
        ],
        "eigensystems": [
            {"label": s.label, "eigenvalues": s.eigenvalues, "multiplicity": s.multiplicity}
            for s in systems
        ],
    }
    _emit(obj, data, st["output"])


@cli.command(name="neighbors", short_help="List neighbors")
@click.pass_obj
@click.argument("lattice", type=click.Path(exists=True, dir_okay=False))
@click.option("-p", "--prime", type=int, required=True, help="the rational prime")
@click.option("-s", "--side", type=click.Choice(["p", "conj"]), default="p", help="P or P̄")
@click.option("-k", "--k", "k", type=int, default=1, help="dimension of the subspaces")
@catch_errors
async def neighbors_(obj, lattice, prime, side, k):
    """
    Print every P^k-neighbor of LATTICE with the subspace it comes from.
    """
    from .neighbor import neighbors

    lam = _lattice(lattice)
    (P,) = parse_primes(lam.ring, [prime], side)
    res = neighbors(lam, P, k)
    _emit(
        obj,
        {
            "prime": str(P),
            "k": k,
            "count": len(res),
            "neighbors": [
                {"subspace": nb.subspace.echelon, "basis": nb.lattice.basis.to_list()}
                for nb in res
            ],
        },
    )


@cli.command(name="isometry", short_help="Test two lattices for isometry")
@click.pass_obj
@click.argument("first", type=click.Path(exists=True, dir_okay=False))
@click.argument("second", type=click.Path(exists=True, dir_okay=False))
@catch_errors
async def isometry_(obj, first, second):
    """
    Decide whether FIRST and SECOND are isometric.

    The witness maps coordinates on FIRST's canonical basis to coordinates
    on SECOND's.
    """
    from .isometry import is_isometric

    rep = is_isometric(_lattice(first), _lattice(second))
    wit = rep.witness.to_list() if rep.witness is not None else None
    _emit(obj, {"isometric": rep.isometric, "witness": wit})


@cli.command(name="aut", short_help="Automorphism group")
@click.pass_obj
@click.argument("lattice", type=click.Path(exists=True, dir_okay=False))
@click.option("-l", "--verify-limit", type=int, default=None, help="enumerate groups up to this")
@catch_errors
async def aut_(obj, lattice, verify_limit):
    """
    Print generators and order of the automorphism group of LATTICE.
    """
    from .isometry import automorphisms

    if verify_limit is None:
        verify_limit = obj.ocfg.get("aut", {}).get("verify_limit", 10**6)
    grp = automorphisms(_lattice(lattice), verify_limit)
    _emit(
        obj,
        {
            "order": grp.order,
            "verified": grp.verified,
            "generators": [g.to_list() for g in grp.generators],
        },
    )


@cli.command(name="theta", short_help="Theta series")
@click.pass_obj
@click.argument("lattice", type=click.Path(exists=True, dir_okay=False))
@click.option("-c", "--cutoff", type=int, default=None, help="last coefficient")
@catch_errors
async def theta_(obj, lattice, cutoff):
    """
    Print the theta series of LATTICE's trace form up to CUTOFF.
    """
    from .shortvec import default_cutoff, theta_coeffs

    lam = _lattice(lattice)
    if cutoff is None:
        cutoff = obj.ocfg.get("theta", {}).get("cutoff") or default_cutoff(lam)
    _emit(obj, theta_coeffs(lam, cutoff))
