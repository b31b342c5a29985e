"""Shared fixtures and the acceptance-line reporter.

``acceptance`` is a session fixture used by the acceptance gate to emit one
``ACCEPTANCE nn name: PASS/FAIL (...)`` line per criterion; the lines are
repeated in a terminal-summary section so they stay visible even when pytest
captures test output.
"""

from __future__ import annotations

import numpy as np
import pytest

from bubbles.geometry import BubbleShape, Cluster
from bubbles.physics import ContrastLaw
from bubbles.quadrature import build_quadrature
from bubbles.runconfig import parse_config

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def acceptance():
    """Record one pass/fail line per criterion; returns the boolean."""

    def record(number: int, name: str, ok: bool, detail: str) -> bool:
        line = f"ACCEPTANCE {number:02d} {name}: {'PASS' if ok else 'FAIL'} ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


@pytest.fixture()
def unit_sphere_shape():
    return BubbleShape(kind="sphere", center=(0.0, 0.0, 0.0), radius=1.0)


@pytest.fixture()
def unit_sphere_quad(unit_sphere_shape):
    return build_quadrature(unit_sphere_shape, order=2)


@pytest.fixture()
def standard_contrast():
    return ContrastLaw(c_rho=1.0, beta=2.0, speed_ratio=1.0)


def single_sphere_cluster(a: float, center=(0.5, 0.5, 0.5)) -> Cluster:
    bubble = BubbleShape(kind="sphere", center=np.asarray(center, float), radius=0.5, scale=a)
    return Cluster(bubbles=[bubble], a=a, d=float("inf"), spec=None)


def config_dict(
    a: float = 0.01,
    centers=None,
    frequency=None,
    contrast=None,
    **top_level,
):
    """Convenient nested-dict builder for parse_config-based tests."""
    cluster = {"a": a, "s": 0.0, "t": 0.0, "seed": 0, "shapeKind": "sphere"}
    if centers is not None:
        cluster["centers"] = [list(map(float, c)) for c in centers]
    data = {
        "cluster": cluster,
        "contrast": contrast or {"cRho": 1.0, "beta": 2.0, "speedRatio": 1.0},
        "frequency": frequency or {"mode": "fixed", "omega": 1.0},
    }
    data.update(top_level)
    return data


@pytest.fixture()
def make_config():
    def build(**kwargs):
        return parse_config(config_dict(**kwargs))

    return build
