"""
A bounded worker pool for the synchronous lattice arithmetic.
"""
from __future__ import annotations

import anyio
import logging
from functools import partial

from .errors import ValidationError

from typing import TYPE_CHECKING  # isort:skip

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable

logger = logging.getLogger(__name__)

__all__ = ["WorkerPool"]


class WorkerPool:
    """
    Runs blocking jobs in worker threads (or processes), at most ``jobs``
    at a time. With ``jobs == 1`` everything runs inline.

    Results of `map` are returned in submission order regardless of
    completion order.
    """

    def __init__(self, jobs: int = 1, processes: bool = False):
        if jobs < 1:
            raise ValidationError(f"need at least one worker, not {jobs}")
        self.jobs = jobs
        self.processes = processes
        self.limiter = anyio.CapacityLimiter(jobs)

    def __repr__(self):
        return f"<WorkerPool jobs={self.jobs}{' proc' if self.processes else ''}>"

    async def run(self, fn: Callable, *args):
        "run one job"
        if self.jobs == 1:
            return fn(*args)
        if self.processes:
            return await anyio.to_process.run_sync(partial(fn, *args), limiter=self.limiter)
        return await anyio.to_thread.run_sync(partial(fn, *args), limiter=self.limiter)

    async def map(self, fn: Callable, items: Iterable) -> list:
        "run ``fn`` on every item, results in input order"
        items = list(items)
        if self.jobs == 1:
            return [fn(x) for x in items]
        res = [None] * len(items)

        async def one(i, x):
            res[i] = await self.run(fn, x)

        async with anyio.create_task_group() as tg:
            for i, x in enumerate(items):
                tg.start_soon(one, i, x)
        return res
