import json
import pathlib
import sys

import pytest
from hypothesis import HealthCheck, settings

HERE = pathlib.Path(__file__).parent
sys.path.insert(0, str(HERE))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def frozen():
    return json.loads((HERE / "fixtures" / "oracles.json").read_text())


ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def record(criterion: str, ok: bool, note: str = ""):
    """Store one acceptance outcome; the summary hook prints one line per criterion."""
    ACCEPTANCE[criterion] = (ok, note)
    print(f"{criterion}: {'PASS' if ok else 'FAIL'} {note}")


@pytest.fixture(scope="session")
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[1:])):
        ok, note = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key}: {'PASS' if ok else 'FAIL'}  {note}")
