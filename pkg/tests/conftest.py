"""Shared solver runs and the acceptance summary.

Expensive solves are session-scoped so the unit tests and the acceptance
suite reuse them.
"""

from __future__ import annotations

import numpy as np
import pytest

from monoground.efie import solve_image_ground, solve_mesh
from monoground.experiment import FrequencyPlan, Scenario, pattern_at, run_scenario
from monoground.fom import far_field
from monoground.geometry import EdgeMountedSphere, Planar, Sphere, dipole_mesh, \
    monopole_element_mesh

F0 = 1.3e9
BAND = FrequencyPlan(1.1e9, 1.5e9, 9)

_ACCEPTANCE: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    _ACCEPTANCE[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[n])


@pytest.fixture(scope="session")
def dipole_coarse():
    return solve_mesh(dipole_mesh(F0, edge_wl=0.1), F0)


@pytest.fixture(scope="session")
def dipole_fine():
    return solve_mesh(dipole_mesh(F0, edge_wl=0.05), F0)


@pytest.fixture(scope="session")
def image_monopole():
    sol = solve_image_ground(monopole_element_mesh(F0, edge_wl=0.1), F0)
    return sol, far_field(sol)


@pytest.fixture(scope="session")
def planar_run():
    return run_scenario(Scenario(Planar(), plan=BAND, name="planar"), persist=False)


@pytest.fixture(scope="session")
def sphere_run():
    return run_scenario(Scenario(Sphere(), plan=BAND, name="sphere"), persist=False)


@pytest.fixture(scope="session")
def edge_pattern():
    return pattern_at(Scenario(EdgeMountedSphere(), name="edge"), F0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
