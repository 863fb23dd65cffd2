"""Shared solver runs.  The long trajectories are expensive enough to reuse.

Build wall times are recorded so the acceptance tests can count fixture
construction against their runtime budgets no matter which test triggers it.
"""

import math
import time

import pytest

from gflab.config import RunConfig
from gflab.model import LogGaussian, LogHeaviside, ModelParams
from gflab.solver import build_grid, solve_n

LOG2 = math.log(2.0)
RAYS_A2 = (-2.0 * LOG2, -LOG2, -0.5 * LOG2)

BUILD_SECONDS: dict[str, float] = {}


def run_solver(profile, alpha, t_end, dt, snapshots, rays, m=64, label=None):
    cfg = RunConfig(profile=profile, params=ModelParams(alpha=alpha),
                    t_end=t_end, rays=tuple(rays) if rays else ())
    grid = build_grid(profile, alpha, cfg.resolved_y_min(), cfg.resolved_y_max(), m)
    start = time.perf_counter()
    traj = solve_n(grid, t_end, dt, snapshot_times=snapshots, probe_rays=rays)
    if label is not None:
        BUILD_SECONDS[label] = time.perf_counter() - start
    return traj


@pytest.fixture(scope="session")
def gauss01():
    return LogGaussian(mu=0.0, sigma=0.1, mass=1.0)


@pytest.fixture(scope="session")
def traj_g01(gauss01):
    """Gaussian sigma=0.1, alpha=2, to t=100 with the three standard rays."""
    return run_solver(gauss01, 2.0, 100.0, 0.01,
                      snapshots=[1.0, 5.0, 10.0, 20.0, 40.0, 60.0, 100.0],
                      rays=RAYS_A2, label="g01")


@pytest.fixture(scope="session")
def traj_g02():
    return run_solver(LogGaussian(0.0, 0.2, 1.0), 2.0, 50.0, 0.01,
                      snapshots=[40.0], rays=[-LOG2], label="g02")


@pytest.fixture(scope="session")
def traj_g05():
    return run_solver(LogGaussian(0.0, 0.5, 1.0), 2.0, 50.0, 0.01,
                      snapshots=[40.0], rays=[-LOG2], label="g05")


@pytest.fixture(scope="session")
def traj_h10():
    return run_solver(LogHeaviside(-1.0, 0.0, 1.0), 2.0, 45.0, 0.01,
                      snapshots=[40.0], rays=[-LOG2], label="h10")


@pytest.fixture(scope="session")
def traj_a3(gauss01):
    return run_solver(gauss01, 3.0, 100.0, 0.01, snapshots=[100.0],
                      rays=[-math.log(3.0)], label="a3")
