import json
import os

import pytest

from orthoqkd.include import PACKAGE_PATH


SCENARIO_DIR = os.path.join(PACKAGE_PATH, "scenarios")


@pytest.fixture
def out_dir(tmp_path):
    return tmp_path / "out"


@pytest.fixture
def write_scenario(tmp_path):
    """Write a scenario dict to a JSON file and return its path."""

    def _write(scenario, name="scenario.json"):
        path = tmp_path / name
        path.write_text(json.dumps(scenario))
        return str(path)

    return _write


@pytest.fixture
def bundled_scenario():
    def _path(name):
        return os.path.join(SCENARIO_DIR, name)

    return _path
