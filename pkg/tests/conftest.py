import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from qdtbench.instances import FIXTURE_BUILDERS

FIXTURE_DIR = Path(__file__).resolve().parents[1] / "src" / "qdtbench" / "fixtures"


@pytest.fixture(scope="session")
def min2():
    return FIXTURE_BUILDERS["min2"]()


@pytest.fixture(scope="session")
def std6():
    return FIXTURE_BUILDERS["std6"]()


@pytest.fixture(scope="session")
def std8():
    return FIXTURE_BUILDERS["std8"]()


@pytest.fixture(scope="session")
def overlap2():
    return FIXTURE_BUILDERS["overlap2"]()


@pytest.fixture(scope="session")
def irrev6():
    return FIXTURE_BUILDERS["irrev6"]()


def cli(*args, env=None, timeout=300):
    """Run the command-line tool in a subprocess and capture everything."""
    exe = shutil.which("qdt")
    cmd = [exe] + list(args) if exe else \
        [sys.executable, "-m", "qdtbench.cli"] + list(args)
    return subprocess.run(cmd, capture_output=True, env=env, timeout=timeout)


@pytest.fixture(scope="session")
def fixture_path():
    def path_of(name: str) -> str:
        return str(FIXTURE_DIR / f"{name}.json")
    return path_of
