"""Shared fixtures and the exact scalar test plant.

The controller tests need a plant whose response is known in closed form.
For dy/dt = f0 + alpha * u with u held constant over a period dt (zero-order
hold), the update is exactly

    y(t + dt) = y(t) + (f0 + alpha * u) * dt

so every expectation about the loop can be computed by hand, with no
integration error muddying the estimator tolerances.
"""

from __future__ import annotations

from pathlib import Path

import pytest


class ScalarZohPlant:
    """Exact integrator for dy/dt = f0 + alpha*u under zero-order hold."""

    def __init__(self, f0: float, alpha: float, y0: float):
        self.f0 = f0
        self.alpha = alpha
        self.y = y0

    def step(self, u: float, dt: float) -> float:
        self.y += (self.f0 + self.alpha * u) * dt
        return self.y


@pytest.fixture
def scalar_plant():
    return ScalarZohPlant


@pytest.fixture
def config_file(tmp_path: Path):
    """Write config text to a temp file and hand back its path."""

    def write(text: str, name: str = "scenario.cfg") -> Path:
        path = tmp_path / name
        path.write_text(text)
        return path

    return write
