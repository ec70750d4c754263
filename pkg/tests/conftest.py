from __future__ import annotations

import pytest

from mirrorgv.anomaly import AnomalySolver
from mirrorgv.picardfuchs import CYModel
from mirrorgv.refdata import reference_zero_cells


@pytest.fixture(scope="session")
def model():
    return CYModel.builtin()


@pytest.fixture(scope="session")
def solver_g2(model):
    """Small-order pipeline solved through genus 2 (fast, shared)."""
    solver = AnomalySolver(
        model,
        q_order=16,
        s_order=14,
        max_genus=2,
        max_degree_x=9,
        max_degree_z=7,
        zero_cells=reference_zero_cells,
    )
    solver.run()
    return solver


@pytest.fixture(scope="session")
def full_solver(model):
    """The production run: default orders, genus 5, full table degrees."""
    solver = AnomalySolver(
        model,
        q_order=26,
        s_order=20,
        max_genus=5,
        max_degree_x=18,
        max_degree_z=13,
        zero_cells=reference_zero_cells,
    )
    solver.run()
    return solver
