import json
import pathlib
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(pathlib.Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def golden():
    return json.loads(pathlib.Path(__file__).with_name("golden.json").read_text())


def pytest_configure(config):
    config.acceptance = {}


def pytest_terminal_summary(terminalreporter, config):
    verdicts = getattr(config, "acceptance", {})
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(verdicts):
        terminalreporter.write_line(verdicts[k])
