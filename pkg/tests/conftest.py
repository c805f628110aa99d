import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from selfaffine.geometry import AffineMap2

settings.register_profile("repo", deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


def random_map(rng: np.random.Generator, min_det: float = 0.1) -> AffineMap2:
    """A well-conditioned random affine map (either orientation)."""
    while True:
        a = rng.uniform(-2, 2, size=6)
        f = AffineMap2(*a)
        if abs(f.det) > min_det:
            return f


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def close(p, q, tol=1e-9):
    return math.hypot(p[0] - q[0], p[1] - q[1]) < tol


# -- full sweeps shared by the report and acceptance suites ----------------------

SWEEP_SECONDS: dict[str, float] = {}


@pytest.fixture(scope="session")
def catalogue_c():
    """Template-C sweep over all 512 triples, seed 0, 2000 starts per triple."""
    import os
    import time

    from selfaffine.solver import SolverConfig, sweep_all

    t0 = time.perf_counter()
    cat = sweep_all("C", SolverConfig(seed=0, starts=2000, jobs=os.cpu_count() or 1))
    SWEEP_SECONDS["C"] = time.perf_counter() - t0
    return cat


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
