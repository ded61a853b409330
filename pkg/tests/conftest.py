import os
import sys
import time

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

from vitaslam.config import Config  # noqa: E402
from vitaslam.pipeline import RunConfig, run  # noqa: E402
from vitaslam.simulator import Simulator  # noqa: E402

settings.register_profile("repro", derandomize=True)
settings.load_profile("repro")

DATA = os.path.join(os.path.dirname(__file__), "data")


def _timed_run(mode, seed=42):
    t0 = time.perf_counter()
    report = run(RunConfig(mode, seed))
    return report, time.perf_counter() - t0


@pytest.fixture(scope="session")
def visual_run():
    """Full-script visual-only run on seed 42 and its wall time."""
    return _timed_run("visual_only")


@pytest.fixture(scope="session")
def vita_run():
    return _timed_run("vita")


@pytest.fixture(scope="session")
def sim42():
    return Simulator(Config(), 42)


@pytest.fixture(scope="session")
def frames42(sim42):
    return list(sim42.frames())


# criterion number -> summary line, filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
