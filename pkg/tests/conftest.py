from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from celx.dsl import Scenario, parse_scenario  # noqa: E402

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def load(name: str) -> Scenario:
    return parse_scenario((SCENARIOS / name).read_text())


@pytest.fixture
def scenario_dir() -> Path:
    return SCENARIOS
