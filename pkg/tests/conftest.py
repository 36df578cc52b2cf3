from __future__ import annotations

import pathlib

import pytest
from hypothesis import HealthCheck, settings

from lexpath import fixtures

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

FIXTURES_DIR = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture()
def demo_bundle():
    return fixtures.demo_bundle()


@pytest.fixture()
def mini_bundle():
    return fixtures.mini_lateness_bundle()


@pytest.fixture(scope="session")
def fixtures_dir() -> pathlib.Path:
    return FIXTURES_DIR
