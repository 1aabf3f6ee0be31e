"""Monte Carlo simulation of the Brownian pursuit process.

One prey and n predators run independent standard Brownian motions on a
line; capture is the first time a predator reaches the prey.  Euler steps
with a Brownian-bridge correction (the exact within-step crossing
probability for each prey-predator gap, which has variance 2 per unit
time) remove most of the discretisation bias toward late captures.

Randomness contract: path p draws its position increments from the
counter-based stream ``Generator(Philox(key=(seed, 2p)))`` (n+1 standard
normals per step) and its crossing uniforms from
``Generator(Philox(key=(seed, 2p+1)))`` (one per step).  Path outcomes
therefore depend only on (seed, path index); aggregation is
order-independent, and chunked or parallel execution reproduces the same
capture times bit for bit regardless of chunk or block sizes.

The estimated survival curves are compared against the spectral
prediction: P(capture later than t) ~ t^(-a), with a derived from the
cone eigenvalues (0.5 and 0.75 exactly for one and two predators, the
triangle estimate for three, the chained cone bound for four).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cone_spectra import (ConeSpec, decay_exponent, double_cone_eigen,
                           hat_t_table, truncated_cone_eigen,
                           vertex_angle_delta)
from .sinc_galerkin import TRIANGLE_LAMBDA1_ESTIMATE


class InsufficientTailData(RuntimeError):
    """Too few usable survival points in the fit window."""


@dataclass(frozen=True)
class PursuitConfig:
    """Simulation parameters.

    ``x0`` is the initial prey-predator gap; ``origin`` shifts every
    initial position rigidly (capture statistics must not depend on it).
    ``chunk_size`` and ``block_steps`` only shape memory use, never
    results.
    """

    predators: int
    dt: float
    t_max: float
    paths: int
    seed: int
    x0: float = 1.0
    origin: float = 0.0
    bridge: bool = True
    chunk_size: int = 16384
    block_steps: int = 256

    def __post_init__(self):
        if self.predators < 1:
            raise ValueError("need at least one predator")
        if self.dt <= 0.0 or self.t_max <= 0.0:
            raise ValueError("dt and t_max must be positive")
        if self.t_max / self.dt > 1e8:
            raise ValueError("more than 1e8 steps per path")
        if self.paths < 1:
            raise ValueError("paths must be >= 1")
        if self.chunk_size < 1 or self.block_steps < 1:
            raise ValueError("chunk_size and block_steps must be >= 1")


@dataclass
class SimulationResult:
    """Capture times (censored entries hold t_max) and censoring flags."""

    times: np.ndarray
    censored: np.ndarray
    config: PursuitConfig

    @property
    def truncated_mean(self) -> float:
        """Mean of min(capture time, t_max); the honest summary when some
        paths are censored."""
        return float(np.mean(self.times))


@dataclass
class SurvivalCurve:
    """Empirical survival on a geometric time grid with fixed-horizon
    censoring (all censoring happens at t_max, so the Kaplan-Meier
    estimate coincides with the empirical tail fraction)."""

    times: np.ndarray
    survival: np.ndarray
    stderr: np.ndarray
    censored: int
    n_paths: int
    t_max: float


@dataclass
class ExponentFit:
    a_hat: float
    ci_low: float
    ci_high: float
    window: tuple[float, float]
    r_squared: float
    n_points: int


def simulate(config: PursuitConfig) -> SimulationResult:
    """Run the pursuit and return capture times, censored at t_max."""
    n = config.predators
    dt = config.dt
    sq = math.sqrt(dt)
    steps_total = int(round(config.t_max / config.dt))
    times = np.full(config.paths, config.t_max)
    censored = np.ones(config.paths, dtype=bool)

    for start in range(0, config.paths, config.chunk_size):
        stop = min(start + config.chunk_size, config.paths)
        size = stop - start
        gens_n = [np.random.Generator(
            np.random.Philox(key=[config.seed, 2 * p]))
            for p in range(start, stop)]
        gens_u = [np.random.Generator(
            np.random.Philox(key=[config.seed, 2 * p + 1]))
            for p in range(start, stop)]
        prey = np.full(size, config.x0 + config.origin)
        preds = np.full((size, n), config.origin)
        active = np.arange(size)
        done_steps = 0
        while done_steps < steps_total and active.size:
            block = min(config.block_steps, steps_total - done_steps)
            na = active.size
            normals = np.empty((na, block, n + 1))
            ucross = np.empty((na, block))
            for i, lane in enumerate(active):
                normals[i] = gens_n[lane].standard_normal((block, n + 1))
                ucross[i] = gens_u[lane].random(block)
            prey_a = prey[active]
            preds_a = preds[active]
            alive = np.ones(na, dtype=bool)
            gaps = prey_a[:, None] - preds_a
            for s in range(block):
                prey_a = prey_a + sq * normals[:, s, 0]
                preds_a = preds_a + sq * normals[:, s, 1:]
                new_gaps = prey_a[:, None] - preds_a
                hit = new_gaps.min(axis=1) <= 0.0
                if config.bridge:
                    # exact no-crossing probability of the bridge between
                    # positive endpoint gaps; gap variance is 2 dt per step
                    p_no = np.prod(
                        -np.expm1(-np.clip(gaps * new_gaps, 0.0, None) / dt),
                        axis=1)
                    hit |= ucross[:, s] >= p_no
                newly = alive & hit
                if newly.any():
                    ids = active[newly] + start
                    times[ids] = (done_steps + s + 1) * dt
                    censored[ids] = False
                    alive &= ~hit
                gaps = new_gaps
            prey[active] = prey_a
            preds[active] = preds_a
            active = active[alive]
            done_steps += block
    return SimulationResult(times=times, censored=censored, config=config)


def survival_curve(result: SimulationResult,
                   points_per_decade: int = 40,
                   t_min: float | None = None) -> SurvivalCurve:
    """Empirical survival probabilities on a geometric grid."""
    cfg = result.config
    if t_min is None:
        t_min = 10.0 * cfg.dt
    t_min = min(t_min, cfg.t_max / 10.0)
    decades = math.log10(cfg.t_max / t_min)
    npts = max(2, int(round(points_per_decade * decades)) + 1)
    grid = np.geomspace(t_min, cfg.t_max, npts)
    # censored paths survive past every grid point, including t_max itself
    effective = np.where(result.censored, np.inf, result.times)
    sorted_times = np.sort(effective)
    n = sorted_times.size
    below = np.searchsorted(sorted_times, grid, side="right")
    surv = 1.0 - below / n
    stderr = np.sqrt(np.clip(surv * (1.0 - surv), 0.0, None) / n)
    return SurvivalCurve(times=grid, survival=surv, stderr=stderr,
                         censored=int(result.censored.sum()),
                         n_paths=n, t_max=cfg.t_max)


def _tail_slope(log_t: np.ndarray, log_s: np.ndarray) -> tuple[float, float]:
    slope, intercept = np.polyfit(log_t, log_s, 1)
    pred = slope * log_t + intercept
    ss_res = float(np.sum((log_s - pred) ** 2))
    ss_tot = float(np.sum((log_s - np.mean(log_s)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return float(slope), r2


def fit_tail_exponent(curve: SurvivalCurve,
                      window: tuple[float, float] | None = None,
                      n_boot: int = 200, seed: int = 0,
                      min_points: int = 10,
                      max_rel_stderr: float = 0.2) -> ExponentFit:
    """Least-squares slope of log survival against log time.

    The default window [t_max/100, t_max/3] dodges both the early
    transient and censoring bias; the confidence interval is a percentile
    bootstrap over paths (resampling the binned capture counts, which is
    equivalent to resampling paths).
    """
    if window is None:
        window = (curve.t_max / 100.0, curve.t_max / 3.0)
    in_win = (curve.times >= window[0]) & (curve.times <= window[1])
    usable = in_win & (curve.survival > 0.0) \
        & (curve.stderr <= max_rel_stderr * np.clip(curve.survival, 1e-300, None))
    if int(usable.sum()) < min_points:
        raise InsufficientTailData(
            f"only {int(usable.sum())} usable points in window {window}; "
            f"need {min_points}")
    log_t = np.log(curve.times[usable])
    slope, r2 = _tail_slope(log_t, np.log(curve.survival[usable]))

    # bin the capture counts between grid points; multinomial resampling
    # of the bins is an exact path bootstrap for the survival estimates
    n = curve.n_paths
    counts = np.empty(curve.times.size + 1, dtype=np.int64)
    below = np.rint((1.0 - curve.survival) * n).astype(np.int64)
    counts[0] = below[0]
    counts[1:-1] = np.diff(below)
    counts[-1] = n - below[-1]
    rng = np.random.default_rng(seed)
    boots = []
    for _ in range(n_boot):
        resampled = rng.multinomial(n, counts / n)
        surv_b = 1.0 - np.cumsum(resampled[:-1]) / n
        mask = usable & (surv_b > 0.0)
        if int(mask.sum()) < 3:
            continue
        slope_b, _ = _tail_slope(np.log(curve.times[mask]),
                                 np.log(surv_b[mask]))
        boots.append(-slope_b)
    if len(boots) < max(10, n_boot // 4):
        raise InsufficientTailData("bootstrap produced too few usable fits")
    lo, hi = np.percentile(boots, [2.5, 97.5])
    return ExponentFit(a_hat=-slope, ci_low=float(lo), ci_high=float(hi),
                       window=window, r_squared=r2,
                       n_points=int(usable.sum()))


def predicted_exponent(n: int) -> float:
    """Spectral prediction of the survival exponent for n predators.

    Exact cone eigenvalues for n <= 2, the collocation triangle estimate
    for n = 3, the chained truncated-cone relation on top of it for
    n = 4, and the comparison-cone table bound beyond.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return decay_exponent(1, 1.0)
    if n == 2:
        return decay_exponent(2, double_cone_eigen(2, 9.0 / 4.0).mu)
    if n == 3:
        return decay_exponent(
            3, double_cone_eigen(3, TRIANGLE_LAMBDA1_ESTIMATE).mu)
    if n == 4:
        mu_t3 = truncated_cone_eigen(
            ConeSpec(3, TRIANGLE_LAMBDA1_ESTIMATE, vertex_angle_delta(3))).mu
        return decay_exponent(4, double_cone_eigen(4, mu_t3).mu)
    return hat_t_table(n)[-1].a_lower
