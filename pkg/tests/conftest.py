from __future__ import annotations

import sys
from pathlib import Path

import pytest


def pytest_configure(config) -> None:
    project_root = Path(__file__).resolve().parents[1]
    root_str = str(project_root)
    if root_str not in sys.path:
        sys.path.insert(0, root_str)

    config.addinivalue_line("markers", "slow: wave-packet propagation runs that take several seconds")


@pytest.fixture
def reference_barrier():
    """V0 = 2, b = 1, E = 1: k = kappa = 1, T = 1 / (1 + sinh^2(1))."""
    from engine.barrier_model import BarrierConfig

    return BarrierConfig(v0=2.0, b=1.0, e_incident=1.0)


@pytest.fixture
def circle_barrier():
    """V1 = 1, omega = 0.25 around E_N = 5: N = 4, nine channels."""
    from engine.barrier_model import BarrierConfig

    return BarrierConfig(v0=10.0, b=1.0, e_incident=5.0, v1=1.0, omega=0.25)


@pytest.fixture
def write_config(tmp_path):
    """Write a run-config dict to a temporary JSON file and return its path."""
    import json

    def _write(data, name="run.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return _write
