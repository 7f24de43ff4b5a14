# noqa:D100 pylint: disable=missing-module-docstring,missing-function-docstring
from __future__ import annotations

import logging

import pytest


def pytest_addoption(parser):
    parser.addoption("--slow", action="store_true", help="also run long enumerations")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--slow"):
        return
    skip = pytest.mark.skip(reason="needs --slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture()
def anyio_backend():  # noqa:D103
    return "trio"


@pytest.fixture(autouse=True)
def _no_cache(monkeypatch):
    monkeypatch.delenv("NEIGHBOR_CACHE_DIR", raising=False)


@pytest.fixture(autouse=True)
def _enable_loggers():
    # moat.util's CLI setup calls logging.config.dictConfig, which disables
    # every logger that already exists; undo that between tests.
    for name, lg in logging.root.manager.loggerDict.items():
        if name.startswith("moat.lattice") and isinstance(lg, logging.Logger):
            lg.disabled = False
