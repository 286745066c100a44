from __future__ import annotations

from pathlib import Path

import pytest

PROBLEMS = Path(__file__).resolve().parents[1] / "problems"


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run tests marked slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="slow; pass --runslow to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def problems() -> Path:
    return PROBLEMS
