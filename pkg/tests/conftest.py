import json
import sys
from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ORACLES = json.loads((Path(__file__).parent / "data" / "oracles.json").read_text())


@pytest.fixture(scope="session")
def oracle():
    return ORACLES



def pytest_terminal_summary(terminalreporter):
    # One PASS/FAIL line per acceptance criterion that ran in this session.
    mod = next((m for m in list(sys.modules.values())
                if getattr(m, "__file__", "") and m.__file__.endswith("test_acceptance.py")), None)
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.summary_line(n))
