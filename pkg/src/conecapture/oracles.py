"""Independent brute-force references for the eigenvalue machinery.

Three deliberately low-tech solvers used to cross-validate the production
paths and to freeze regression constants:

* :func:`ode_shooting_eigen` integrates the separated radial ODE with a
  fixed-step RK4 scheme and bisects the eigenvalue on the terminal sign;
* :func:`fd_triangle_eigen` assembles a five-point Laplace-Beltrami
  stencil on a polar grid masked to the triangle and inverse-power
  iterates, Richardson-extrapolating two grids;
* :func:`highprec_2f1` sums the Gauss series in wide mpmath floats.

None of them share code with the hypergeometric root-finding they check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from mpmath import mp
from numba import njit
from scipy.sparse import csr_matrix
from scipy.sparse.linalg import splu

from .hyperfun import HyperParams, HypergeometricError

_SECTOR = 2.0 * math.pi / 3.0


@dataclass(frozen=True)
class ShootingProblem:
    """Radial eigenvalue problem sin^2 r R'' + (n-1) sin r cos r R'
    + (mu sin^2 r - lam) R = 0 on (0, r0), R ~ sin^m r at 0, R(r0) = 0."""

    n: int
    lam: float
    r0: float
    mu_bracket: tuple[float, float] | None = None
    step: float = 1e-5

    def __post_init__(self):
        if self.n < 1 or self.lam <= 0.0 or not 0.0 < self.r0 < math.pi:
            raise ValueError(f"invalid shooting problem {self}")
        if not 0.0 < self.step <= 1e-5:
            raise ValueError("step must be in (0, 1e-5]")


@dataclass(frozen=True)
class FDGrid:
    """Polar finite-difference grid masked to a spherical domain.

    ``boundary`` maps theta to the radial extent; None selects the
    triangle's boundary arc.  ``periodic_theta`` wraps the angular
    direction (with pole-through coupling at r = 0) for rotationally
    symmetric calibration domains such as spherical caps; the default is
    a sector with Dirichlet sides.
    """

    nr: int
    ntheta: int
    theta_max: float = _SECTOR
    boundary: Callable[[np.ndarray], np.ndarray] | None = None
    periodic_theta: bool = False

    def __post_init__(self):
        if self.nr < 8 or self.ntheta < 8:
            raise ValueError("grid too coarse")
        if self.periodic_theta and self.ntheta % 2:
            raise ValueError("periodic grids need an even ntheta")


@njit(cache=True)
def _shoot_terminal(n: float, lam: float, mu: float, r0: float,
                    step: float, eps: float) -> float:
    """R(r0) for the radial ODE, RK4 from the regular Frobenius start
    R = sin^m r, R' = m sin^(m-1) r cos r at r = eps."""
    m = (2.0 - n) / 2.0 + math.sqrt((2.0 - n) ** 2 / 4.0 + lam)
    r = eps
    sr = math.sin(eps)
    y0 = sr ** m
    y1 = m * sr ** (m - 1.0) * math.cos(eps)
    nsteps = int(math.ceil((r0 - eps) / step))
    h = (r0 - eps) / nsteps
    for _ in range(nsteps):
        s1 = math.sin(r)
        c1 = math.cos(r)
        k0a = y1
        k0b = (lam / (s1 * s1) - mu) * y0 - (n - 1.0) * (c1 / s1) * y1
        rh = r + 0.5 * h
        s2 = math.sin(rh)
        c2 = math.cos(rh)
        ya = y0 + 0.5 * h * k0a
        yb = y1 + 0.5 * h * k0b
        k1a = yb
        k1b = (lam / (s2 * s2) - mu) * ya - (n - 1.0) * (c2 / s2) * yb
        ya = y0 + 0.5 * h * k1a
        yb = y1 + 0.5 * h * k1b
        k2a = yb
        k2b = (lam / (s2 * s2) - mu) * ya - (n - 1.0) * (c2 / s2) * yb
        r2 = r + h
        s3 = math.sin(r2)
        c3 = math.cos(r2)
        ya = y0 + h * k2a
        yb = y1 + h * k2b
        k3a = yb
        k3b = (lam / (s3 * s3) - mu) * ya - (n - 1.0) * (c3 / s3) * yb
        y0 += h * (k0a + 2.0 * k1a + 2.0 * k2a + k3a) / 6.0
        y1 += h * (k0b + 2.0 * k1b + 2.0 * k2b + k3b) / 6.0
        r = r2
    return y0


def ode_shooting_eigen(p: ShootingProblem, tol: float = 1e-7,
                       eps: float = 1e-6) -> float:
    """First radial eigenvalue by shooting: bisect mu on the sign of R(r0)."""
    if p.mu_bracket is not None:
        lo, hi = p.mu_bracket
    else:
        m = (2.0 - p.n) / 2.0 + math.sqrt((2.0 - p.n) ** 2 / 4.0 + p.lam)
        lo, hi = m + p.lam, 3.0 * m + p.lam + p.n
    flo = _shoot_terminal(p.n, p.lam, lo + 1e-9, p.r0, p.step, eps)
    fhi = _shoot_terminal(p.n, p.lam, hi, p.r0, p.step, eps)
    if not (flo > 0.0 > fhi or flo < 0.0 < fhi):
        raise RuntimeError(
            f"no sign change in mu bracket ({lo}, {hi}) for {p}: "
            f"R(r0) = {flo:.3e}, {fhi:.3e}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = _shoot_terminal(p.n, p.lam, mid, p.r0, p.step, eps)
        if (flo > 0.0 > fm) or (flo < 0.0 < fm):
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def _fd_matrix(grid: FDGrid, nr: int, ntheta: int):
    """Sparse -Laplacian on the masked cell-centred polar grid.

    Neighbours outside the domain are dropped (nearest-node Dirichlet);
    periodic grids wrap theta and couple r -> -r through the pole with a
    half-turn shift.
    """
    rb_fn = grid.boundary
    if rb_fn is None:
        from .perturbed_domain import stereo_inv, t2_boundary_beta

        def rb_fn(th):
            return stereo_inv(t2_boundary_beta(th))

    theta = (np.arange(ntheta) + 0.5) * (grid.theta_max / ntheta)
    rb = np.asarray(rb_fn(theta), dtype=float)
    if np.any(rb <= 0.0) or np.any(rb > math.pi):
        raise ValueError("boundary radius outside (0, pi]")
    r_max = float(np.max(rb))
    dr = r_max / nr
    dth = grid.theta_max / ntheta
    r = (np.arange(nr) + 0.5) * dr

    inside = r[:, None] < rb[None, :]
    index = -np.ones((nr, ntheta), dtype=np.int64)
    index[inside] = np.arange(int(inside.sum()))
    ndof = int(inside.sum())

    rows, cols, vals = [], [], []
    cot = 1.0 / np.tan(r)
    csc2 = 1.0 / np.sin(r) ** 2
    coef_rp = 1.0 / dr ** 2 + cot / (2.0 * dr)
    coef_rm = 1.0 / dr ** 2 - cot / (2.0 * dr)
    diag_r = 2.0 / dr ** 2
    for i in range(nr):
        for j in range(ntheta):
            k = index[i, j]
            if k < 0:
                continue
            rows.append(k)
            cols.append(k)
            vals.append(diag_r + 2.0 * csc2[i] / dth ** 2)
            if i + 1 < nr and index[i + 1, j] >= 0:
                rows.append(k)
                cols.append(index[i + 1, j])
                vals.append(-coef_rp[i])
            if i > 0:
                if index[i - 1, j] >= 0:
                    rows.append(k)
                    cols.append(index[i - 1, j])
                    vals.append(-coef_rm[i])
            elif grid.periodic_theta:
                # ghost across the pole: u(-dr/2, theta) = u(dr/2, theta+pi)
                jj = (j + ntheta // 2) % ntheta
                if index[0, jj] >= 0:
                    rows.append(k)
                    cols.append(index[0, jj])
                    vals.append(-coef_rm[i])
            for jj in (j - 1, j + 1):
                if grid.periodic_theta:
                    jj %= ntheta
                elif not 0 <= jj < ntheta:
                    continue
                if index[i, jj] >= 0:
                    rows.append(k)
                    cols.append(index[i, jj])
                    vals.append(-csc2[i] / dth ** 2)
    return csr_matrix((vals, (rows, cols)), shape=(ndof, ndof))


def _fd_smallest_eigen(grid: FDGrid, nr: int, ntheta: int,
                       tol: float = 1e-10, max_iter: int = 400) -> float:
    a = _fd_matrix(grid, nr, ntheta).tocsc()
    lu = splu(a)
    rng = np.random.default_rng(7)
    x = rng.random(a.shape[0]) + 0.5
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = lu.solve(x)
        y /= np.linalg.norm(y)
        lam_new = float(y @ (a @ y))
        if abs(lam_new - lam) < tol * max(1.0, abs(lam_new)):
            return lam_new
        lam, x = lam_new, y
    raise RuntimeError("inverse power iteration did not converge")


def fd_triangle_eigen(grid: FDGrid) -> float:
    """Smallest Dirichlet eigenvalue, Richardson-extrapolated from the
    given grid and its refinement (the nearest-node boundary treatment is
    first order, so the extrapolation is 2*fine - coarse)."""
    coarse = _fd_smallest_eigen(grid, grid.nr, grid.ntheta)
    fine = _fd_smallest_eigen(grid, 2 * grid.nr, 2 * grid.ntheta)
    return 2.0 * fine - coarse


def highprec_2f1(p: HyperParams, digits: int = 30) -> str:
    """Gauss series summed in wide mpmath floats; returns a decimal string.

    Provenance source for frozen constants and the float64 evaluator's
    accuracy checks.
    """
    if digits < 10:
        raise ValueError("digits must be >= 10")
    with mp.workdps(digits + 15):
        a, b, c, z = (mp.mpf(v) for v in (p.alpha, p.beta, p.gamma, p.z))
        total = mp.mpf(1)
        term = mp.mpf(1)
        cutoff = mp.mpf(10) ** (-(digits + 10))
        small = 0
        for k in range(200_000):
            term *= (a + k) * (b + k) / ((c + k) * (1 + k)) * z
            total += term
            if abs(term) < cutoff * (1 + abs(total)):
                small += 1
                if small >= 2:
                    return mp.nstr(total, digits)
            else:
                small = 0
        raise HypergeometricError(
            f"high-precision series did not converge for {p}",
            partial_sum=float(total), terms=200_000)
