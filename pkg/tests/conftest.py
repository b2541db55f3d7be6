"""Shared fixtures and acceptance-summary reporting."""

from __future__ import annotations

import numpy as np
import pytest

import hdmd

# (criterion id, passed, detail) tuples registered by tests/test_acceptance.py
_ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def record_criterion(name: str, passed: bool, detail: str) -> None:
    _ACCEPTANCE_RESULTS.append((name, passed, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE_RESULTS:
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status}  {name}: {detail}")


def _benchmark_run(grid_points: int):
    """Full benchmark pipeline at the given per-axis grid resolution."""
    problem = hdmd.HarmonicOscillatorProblem()
    quad = hdmd.tensor_trapezoid(problem.domain, (grid_points, grid_points))
    features = hdmd.generate_snapshots(problem, quad)
    pair = hdmd.assemble_gram_pair(features, quad)
    operator = hdmd.hermitian_dmd(pair)
    eig = hdmd.eigendecompose(operator)
    samples = hdmd.evaluate_function_samples(quad.nodes, hdmd.reference_observable)
    observable = hdmd.project_observable(samples, features, quad, pair=pair)
    measure = hdmd.spectral_measure(eig, observable)
    return {
        "quad": quad,
        "features": features,
        "pair": pair,
        "operator": operator,
        "eig": eig,
        "observable": observable,
        "measure": measure,
    }


@pytest.fixture(scope="session")
def bench75():
    """Benchmark at the reduced 75x75 snapshot grid (N = 400 Gaussians)."""
    return _benchmark_run(75)


@pytest.fixture(scope="session")
def bench100():
    """Benchmark at the 100x100 snapshot grid used for eigenvalue recovery."""
    return _benchmark_run(100)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
