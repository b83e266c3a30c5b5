"""Shared fixtures for the rotorsim tests."""
import json
import logging

import numpy as np
import pytest

from rotorsim.physics import AngularDistribution, RotorGeometry


@pytest.fixture(autouse=True)
def restore_root_logging():
    """The CLI reconfigures the root logger; put it back after every test."""
    root = logging.getLogger()
    handlers = root.handlers[:]
    level = root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def geometry():
    """Two 40Ca+ ions in a 2 pi x 845 kHz in-plane trap."""
    return RotorGeometry.from_trap()


@pytest.fixture
def cold_ring():
    """Sideband-cooled rotor, sigma_l = 45.6 around an integer l0."""
    return AngularDistribution.gaussian(7780.0, 45.6)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def write_config(tmp_path):
    """Write a RunConfig dict as JSON and return its path."""

    def _write(payload, name="run.json"):
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)

    return _write
