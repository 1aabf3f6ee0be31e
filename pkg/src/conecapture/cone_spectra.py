"""First Dirichlet eigenvalues of spherical cone domains.

A cone over a base domain with eigenvalue ``lam`` inside the sphere S^n
separates into a radial problem whose regular solution is
sin(r)^m * 2F1(a1, b1; g1; (1-cos r)/2), with the separation exponent m
solving m^2 + m(n-2) = lam.  Everything here is built from that fact:

* the full double cone (truncation radius pi) has the closed form
  mu = lam + m;
* a truncated cone's eigenvalue is the first zero in mu of the
  hypergeometric factor at the truncation radius, which we bracket inside
  (m + lam, 3m + lam + n) and bisect;
* iterating the truncated relation along the simplex-face radii delta(k)
  produces the comparison-cone table, and the decay exponent converts
  cone eigenvalues into survival-tail exponents for the pursuit process.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .hyperfun import HyperParams, gauss_2f1

_TWO_THIRDS_PI = 2.0 * math.pi / 3.0


class BracketError(RuntimeError):
    """No sign change in the root bracket; carries the scan trace."""

    def __init__(self, message: str, scan: list[tuple[float, float]] | None = None):
        super().__init__(message)
        self.scan = scan or []


@dataclass(frozen=True)
class ConeSpec:
    """A spherical cone: ambient sphere dimension, base eigenvalue, radius.

    ``n`` is the dimension of the sphere containing the cone (the base
    domain lives in the equatorial S^{n-1}), ``lam`` the first Dirichlet
    eigenvalue of the base, ``r0`` the truncation radius in radians.
    """

    n: int
    lam: float
    r0: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n={self.n} must be >= 1")
        if not self.lam > 0.0:
            raise ValueError(f"lam={self.lam} must be positive")
        if not 0.0 < self.r0 <= math.pi:
            raise ValueError(f"r0={self.r0} outside (0, pi]")


@dataclass
class EigenResult:
    """First cone eigenvalue with root-finding diagnostics.

    ``bracket`` is the final interval certified to contain the root
    (degenerate for closed-form results) and ``evals`` counts
    hypergeometric evaluations.
    """

    mu: float
    m: float
    bracket: tuple[float, float]
    evals: int


@dataclass
class HatTableRow:
    n: int
    lambda_hat: float
    a_lower: float


@dataclass
class ChainStep:
    label: str
    value: float
    source: str


@dataclass
class Verdict:
    n: int
    finite: bool
    chain: list[ChainStep] = field(default_factory=list)


def m_exponent(n: int, lam: float) -> float:
    """Separation exponent m > 0 with m^2 + m(n-2) = lam."""
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    return (2.0 - n) / 2.0 + math.sqrt((2.0 - n) ** 2 / 4.0 + lam)


def double_cone_eigen(n: int, lam: float) -> EigenResult:
    """Closed-form first eigenvalue of the full double cone: mu = lam + m."""
    m = m_exponent(n, lam)
    mu = lam + m
    return EigenResult(mu=mu, m=m, bracket=(mu, mu), evals=0)


def second_mode_eigen(n: int, lam: float) -> float:
    """Eigenvalue of the sin^m(r) cos(r) radial branch: lam + 3m + n."""
    return lam + 3.0 * m_exponent(n, lam) + n


def vertex_angle_delta(k: int) -> float:
    """Vertex-to-opposite-face-center distance of a regular simplex face
    on S^k: arccos(-sqrt(k / (2(k+1))))."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return math.acos(-math.sqrt(k / (2.0 * (k + 1.0))))


def truncated_cone_eigen(spec: ConeSpec, tol: float = 1e-10,
                         scan_points: int = 64) -> EigenResult:
    """First eigenvalue of the truncated cone by hypergeometric root-finding.

    The radial factor sin^m(r) f(a1(mu), b1(mu); g1; (1-cos r)/2)
    vanishes at r0 exactly at the cone eigenvalues; the first zero in mu
    sits in (m + lam, 3m + lam + n) whenever r0 >= pi/2, and above that
    interval for smaller radii (the scan extends upward in that case).
    At r0 = pi the closed double-cone form is returned; the series
    argument would be exactly 1 there.
    """
    n, lam, r0 = spec.n, spec.lam, spec.r0
    if r0 == math.pi:
        return double_cone_eigen(n, lam)
    m = m_exponent(n, lam)
    s = math.sqrt((n - 2.0) ** 2 + 4.0 * lam)
    gamma1 = (2.0 + s) / 2.0
    z0 = (1.0 - math.cos(r0)) / 2.0
    evals = 0

    def f(mu: float) -> float:
        nonlocal evals
        evals += 1
        q = math.sqrt((n - 1.0) ** 2 + 4.0 * mu)
        return gauss_2f1(HyperParams((1.0 + s + q) / 2.0,
                                     (1.0 + s - q) / 2.0, gamma1, z0))

    lo = m + lam
    hi = 3.0 * m + lam + n
    # At mu = lo the upper series parameter vanishes and f == 1, so the
    # left endpoint carries a known positive sign without evaluation.
    scan: list[tuple[float, float]] = [(lo, 1.0)]
    width = hi - lo
    bracket = None
    mus = np.linspace(lo, hi, scan_points + 2)[1:]
    prev_mu, prev_f = lo, 1.0
    for mu in mus:
        val = f(float(mu))
        scan.append((float(mu), val))
        if prev_f > 0.0 >= val or prev_f < 0.0 <= val:
            bracket = (prev_mu, float(mu), prev_f, val)
            break
        prev_mu, prev_f = float(mu), val
    if bracket is None:
        if r0 > math.pi / 2.0:
            raise BracketError(
                f"no sign change in ({lo}, {hi}) for {spec}", scan)
        # small radii push the first zero above the second separated mode
        step = width / scan_points
        mu = hi
        for _ in range(64 * scan_points):
            mu_next = mu + step
            val = f(mu_next)
            scan.append((mu_next, val))
            if prev_f > 0.0 >= val or prev_f < 0.0 <= val:
                bracket = (mu, mu_next, prev_f, val)
                break
            prev_mu, prev_f, mu = mu, val, mu_next
            step *= 1.05
        if bracket is None:
            raise BracketError(
                f"upward scan found no sign change for {spec}", scan)
    a, b, fa, fb = bracket
    while b - a > tol:
        mid = 0.5 * (a + b)
        fm = f(mid)
        if fa > 0.0 >= fm or fa < 0.0 <= fm:
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    return EigenResult(mu=0.5 * (a + b), m=m, bracket=(a, b), evals=evals)


def decay_exponent(n: int, lambda_d: float) -> float:
    """Survival-tail exponent a(n) from the cone eigenvalue lambda_d:
    2a = sqrt(((n-1)/2)^2 + lambda_d) - (n-1)/2.

    a > 1 exactly when lambda_d > 2n + 2 (finite expected capture time).
    """
    if lambda_d <= 0.0:
        raise ValueError("lambda_d must be positive")
    half = (n - 1.0) / 2.0
    return (math.sqrt(half * half + lambda_d) - half) / 2.0


def hat_t_table(max_n: int) -> list[HatTableRow]:
    """Comparison-cone table: lambda_1 of the iterated cones and the
    induced lower bound for the survival exponent a(n), n = 2..max_n.

    The iteration seeds with the arc eigenvalue 9/4 and cones over the
    previous domain with radius delta(k) at every step.
    """
    if max_n < 2:
        raise ValueError("max_n must be >= 2")
    rows = []
    lam_hat = 9.0 / 4.0
    for n in range(2, max_n + 1):
        a_lower = decay_exponent(n, double_cone_eigen(n, lam_hat).mu)
        rows.append(HatTableRow(n=n, lambda_hat=lam_hat, a_lower=a_lower))
        if n < max_n:
            lam_hat = truncated_cone_eigen(
                ConeSpec(n=n, lam=lam_hat, r0=vertex_angle_delta(n))).mu
    return rows


@lru_cache(maxsize=8)
def lambda_critical(tol: float = 1e-9) -> float:
    """Base eigenvalue lambda with mu(3, lambda, delta(3)) = 8.

    Outer bisection on lambda around the known crossing, inner
    truncated-cone solve; the defining residual ends below ``tol``.
    """
    d3 = vertex_angle_delta(3)

    def g(lam: float) -> float:
        return truncated_cone_eigen(ConeSpec(3, lam, d3)).mu - 8.0

    lo, hi = 4.8, 5.4
    glo, ghi = g(lo), g(hi)
    if not glo < 0.0 < ghi:
        raise BracketError(f"lambda_critical bracket failed: g({lo})={glo}, "
                           f"g({hi})={ghi}")
    while hi - lo > 1e-11:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    lam_cr = 0.5 * (lo + hi)
    if abs(g(lam_cr)) > tol:
        raise BracketError(f"lambda_critical residual {g(lam_cr)} > {tol}")
    return lam_cr


def _triangle_distance_grid(r: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Distance to the nearest side of the equilateral 2pi/3-triangle, on a
    polar grid centred at one vertex.

    Each side lies on a great circle; the distance to a great circle with
    unit pole v is |arcsin(p . v)|, and inside the triangle the minimum
    over the three sides is attained by the genuinely nearest side.
    """
    from .perturbed_domain import arc_pole

    sin_r, cos_r = np.sin(r), np.cos(r)
    px = sin_r * np.cos(theta)
    py = sin_r * np.sin(theta)
    pz = cos_r
    # meridian theta = 0 has pole (0, 1, 0); theta = 2pi/3 has pole at
    # azimuth 2pi/3 - pi/2; the far side's pole comes from the boundary arc
    d1 = np.abs(np.arcsin(np.clip(py, -1, 1)))
    d2 = np.abs(np.arcsin(np.clip(
        sin_r * np.cos(theta - math.pi / 6.0), -1, 1)))
    v = arc_pole()
    d3 = np.abs(np.arcsin(np.clip(px * v[0] + py * v[1] + pz * v[2], -1, 1)))
    return np.minimum(np.minimum(d1, d2), d3)


def rayleigh_bound_T2(n_theta: int = 1536, n_r: int = 1024) -> float:
    """Rayleigh quotient of sin(dist(., boundary)) over the triangle.

    Midpoint quadrature in vertex polar coordinates (area element
    sin r dr dtheta, radial extent from the boundary arc); |df|^2 = 1 - f^2
    away from the focal set, so the quotient is
    (area - int f^2) / int f^2.  Matches (2 pi + sqrt 3)/(pi - sqrt 3).
    """
    from .perturbed_domain import stereo_inv, t2_boundary_beta

    theta = (np.arange(n_theta) + 0.5) * (_TWO_THIRDS_PI / n_theta)
    r_b = stereo_inv(t2_boundary_beta(theta))
    # per-column radial midpoints scaled to (0, r_b(theta))
    frac = (np.arange(n_r) + 0.5) / n_r
    r = r_b[None, :] * frac[:, None]
    dist = _triangle_distance_grid(r, theta[None, :])
    f2 = np.sin(dist) ** 2
    w = np.sin(r) * (r_b[None, :] / n_r) * (_TWO_THIRDS_PI / n_theta)
    area = float(np.sum(w))
    int_f2 = float(np.sum(f2 * w))
    return (area - int_f2) / int_f2


def verdict(n: int) -> Verdict:
    """Assemble the finiteness chain for n pursuing predators.

    Expected capture time is finite exactly when the decay exponent
    exceeds 1; the chain records every numeric step and its source.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    chain: list[ChainStep] = []
    if n == 1:
        # the spherical angle is an interval of length pi, eigenvalue 1
        chain.append(ChainStep("lambda1(D_1)", 1.0, "interval of length pi"))
        a = decay_exponent(1, 1.0)
        chain.append(ChainStep("a(1)", a, "decay_exponent"))
        return Verdict(n, False, chain)
    if n == 2:
        lam = 9.0 / 4.0
        chain.append(ChainStep("lambda1(T_1)", lam, "arc of length 2pi/3"))
        mu = double_cone_eigen(2, lam).mu
        chain.append(ChainStep("lambda1(D_2)", mu, "double_cone_eigen"))
        a = decay_exponent(2, mu)
        chain.append(ChainStep("a(2)", a, "decay_exponent"))
        return Verdict(n, False, chain)
    if n == 3:
        q = rayleigh_bound_T2()
        chain.append(ChainStep("lambda1(T_2) upper bound", q,
                               "rayleigh_bound_T2"))
        mu = double_cone_eigen(3, q).mu
        chain.append(ChainStep("lambda1(D_3) upper bound", mu,
                               "double_cone_eigen"))
        a = decay_exponent(3, mu)
        chain.append(ChainStep("a(3) upper bound", a, "decay_exponent"))
        return Verdict(n, False, chain)
    if n == 4:
        lam_g2 = 5.102
        chain.append(ChainStep("lambda1(G_2)", lam_g2,
                               "perturbed nodal domain (verified containment)"))
        mu_t3 = truncated_cone_eigen(
            ConeSpec(3, lam_g2, vertex_angle_delta(3))).mu
        chain.append(ChainStep("lambda1(T_3) lower bound", mu_t3,
                               "truncated_cone_eigen"))
        mu_d4 = double_cone_eigen(4, mu_t3).mu
        chain.append(ChainStep("lambda1(D_4) lower bound", mu_d4,
                               "double_cone_eigen"))
        a = decay_exponent(4, mu_d4)
        chain.append(ChainStep("a(4) lower bound", a, "decay_exponent"))
        return Verdict(n, True, chain)
    row = hat_t_table(n)[-1]
    chain.append(ChainStep(f"lambda1(hat T_{n - 1})", row.lambda_hat,
                           "hat_t_table"))
    chain.append(ChainStep(f"a({n}) lower bound", row.a_lower,
                           "hat_t_table"))
    return Verdict(n, row.a_lower > 1.0, chain)
