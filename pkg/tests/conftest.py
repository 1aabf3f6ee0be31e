import math
import time

import pytest

from conecapture.cone_spectra import vertex_angle_delta
from conecapture.oracles import FDGrid, fd_triangle_eigen
from conecapture.pursuit_mc import (PursuitConfig, fit_tail_exponent,
                                    simulate, survival_curve)
from conecapture.sinc_galerkin import convergence_study

# grid shared by the oracle-equivalence checks
ORACLE_NS = (2, 3, 4)
ORACLE_LAMBDAS = (1.0, 2.25, 5.102, 8.0)
ORACLE_RADII = (1.8, 2.0, vertex_angle_delta(2), vertex_angle_delta(3))


@pytest.fixture(scope="session")
def sinc_ladder():
    """Convergence study at the reference dimensions, with wall times."""
    rows = []
    elapsed = {}
    for dim in (16, 100, 1024):
        t0 = time.perf_counter()
        rows += convergence_study([dim])
        elapsed[dim] = time.perf_counter() - t0
    return {"rows": rows, "elapsed": elapsed}


@pytest.fixture(scope="session")
def fd_reference():
    """Richardson-extrapolated finite-difference triangle eigenvalue."""
    return fd_triangle_eigen(FDGrid(nr=200, ntheta=200))


@pytest.fixture(scope="session")
def mc_runs():
    """Acceptance-scale pursuit runs, n = 1..4, with total wall time."""
    runs = {}
    t0 = time.perf_counter()
    for n in (1, 2, 3, 4):
        cfg = PursuitConfig(predators=n, dt=0.05, t_max=1000.0,
                            paths=200_000, seed=1234 + n)
        curve = survival_curve(simulate(cfg))
        runs[n] = (curve, fit_tail_exponent(curve))
    return {"runs": runs, "elapsed": time.perf_counter() - t0}
