"""Perturbed nodal domain enclosing the equilateral 2pi/3-triangle.

The triangle T2 (all angles 2pi/3, a face of the tetrahedral tessellation
of S^2) sits, by construction, inside the nodal domain G2 of the mode
superposition

    Phi(r, theta) = sin(r)^{3/2} u1(r) sin(3 theta / 2)
                    - c sin(r)^{9/2} u3(r) sin(9 theta / 2)

built at a common eigenvalue mu, where u_l is the hypergeometric radial
factor of the l-th angular mode on the sector 0 < theta < 2pi/3.  Because
both modes share mu, Phi is an exact eigenfunction, so the first
eigenvalue of G2 equals mu.  Containment of T2 is checked by marching
along T2's outer boundary arc and certifying H > 0, where
Phi = sin(r)^{3/2} sin(3 theta/2) H(r, theta).

The checks here are floating-point with a safety multiplier on sampled
derivative bounds, not interval arithmetic; certificates say so.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hyperfun import HyperParams, gauss_2f1, gauss_2f1_grid

_SECTOR = 2.0 * math.pi / 3.0
# spot-check angles along the arc, mixing the two shoulders and the
# symmetry axis
CHECKPOINT_THETAS = (0.0, 0.5, 2.0 / 3.0, 2.0 * math.pi / 9.0, math.pi / 3.0)


@dataclass(frozen=True)
class NodalDomainSpec:
    """A two-mode superposition defining the perturbed domain.

    ``mu`` must exceed the critical eigenvalue (the whole point of the
    perturbation); the coefficient ``c`` is *checked* by the containment
    verification, never assumed small enough.
    """

    mu: float = 5.102
    c: float = 0.0003
    modes: tuple[int, int] = (1, 3)

    def __post_init__(self):
        from .cone_spectra import lambda_critical
        if self.modes != (1, 3):
            raise ValueError("only the (1, 3) mode pair is supported")
        if not self.mu > lambda_critical():
            raise ValueError(
                f"mu={self.mu} does not exceed the critical eigenvalue")


@dataclass
class ContainmentCertificate:
    """Record of the boundary-arc positivity march.

    ``passed`` requires the march to cover [0, pi/3] (symmetry supplies
    the other half) with a positive lower bound on every interval and
    positive values at all checkpoint angles.
    """

    checkpoints: list[tuple[float, float]] = field(default_factory=list)
    intervals: list[tuple[float, float, float]] = field(default_factory=list)
    derivative_bound: float = 0.0
    passed: bool = False
    note: str = ("floating-point verification with a safety multiplier on "
                 "a sampled derivative bound; not interval arithmetic")
    failure: str | None = None


def stereo(r):
    """Stereographic radius of the polar angle r: rho = tan(r/2)."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0.0) or np.any(r >= math.pi):
        raise ValueError("r outside [0, pi)")
    out = np.tan(r / 2.0)
    return float(out) if out.ndim == 0 else out


def stereo_inv(rho):
    """Inverse stereographic radius: r = 2 arctan(rho)."""
    rho = np.asarray(rho, dtype=float)
    out = 2.0 * np.arctan(rho)
    return float(out) if out.ndim == 0 else out


def t2_boundary_beta(theta):
    """Stereographic radius of the triangle's far side at azimuth theta.

    Positive root of rho^2 - sqrt(2) cos(theta - pi/3) rho - 1 = 0, i.e. the
    circle through the two far vertices; symmetric about theta = pi/3.
    """
    theta = np.asarray(theta, dtype=float)
    c = np.cos(theta - math.pi / 3.0)
    out = (math.sqrt(2.0) * c + np.sqrt(2.0 * c * c + 4.0)) / 2.0
    return float(out) if out.ndim == 0 else out


def arc_pole() -> np.ndarray:
    """Unit pole of the great circle carrying the far boundary side.

    In Cartesian coordinates with the r = 0 vertex at (0, 0, 1) and
    rho = tan(r/2) stereographic projection, the arc's circle
    x^2 + y^2 - (sqrt2/2)x - (sqrt6/2)y - 1 = 0 pulls back to the plane
    with this normal.
    """
    a = np.array([math.sqrt(2.0) / 4.0, math.sqrt(6.0) / 4.0, 1.0])
    return a / np.linalg.norm(a)


def radial_mode_u(l: int, mu: float, r):
    """Hypergeometric radial factor of the l-th sector mode.

    u_l(r) = 2F1(3l/2 + 1/2 + s, 3l/2 + 1/2 - s; 1 + 3l/2; (1-cos r)/2)
    with s = sqrt(1/4 + mu); u_l(0) = 1.
    """
    if l < 1:
        raise ValueError("l must be a positive integer")
    s = math.sqrt(0.25 + mu)
    a = 1.5 * l + 0.5 + s
    b = 1.5 * l + 0.5 - s
    g = 1.0 + 1.5 * l
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0.0) or np.any(r_arr >= math.pi):
        raise ValueError("r outside [0, pi)")
    z = (1.0 - np.cos(r_arr)) / 2.0
    if r_arr.ndim == 0:
        return gauss_2f1(HyperParams(a, b, g, float(z)))
    return gauss_2f1_grid(a, b, g, z)


def g2_eigenfunction(spec: NodalDomainSpec, r, theta):
    """The defining mode superposition Phi(r, theta) of the domain.

    Vanishes on the sector sides theta = 0, 2pi/3 and at r = 0; its
    positive nodal component is the perturbed domain.
    """
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    sin_r = np.sin(r)
    u1 = radial_mode_u(1, spec.mu, r)
    u3 = radial_mode_u(3, spec.mu, r)
    out = (sin_r ** 1.5 * u1 * np.sin(1.5 * theta)
           - spec.c * sin_r ** 4.5 * u3 * np.sin(4.5 * theta))
    return float(out) if out.ndim == 0 else out


def h_function(spec: NodalDomainSpec, r, theta):
    """Reduced profile H with Phi = sin(r)^{3/2} sin(3 theta/2) H.

    The angular ratio sin(9t/2)/sin(3t/2) is evaluated as the polynomial
    3 - 4 sin^2(3t/2), which is finite at theta in {0, 2pi/3}.
    """
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    u1 = radial_mode_u(1, spec.mu, r)
    u3 = radial_mode_u(3, spec.mu, r)
    ratio = 3.0 - 4.0 * np.sin(1.5 * theta) ** 2
    out = u1 - spec.c * np.sin(r) ** 3 * u3 * ratio
    return float(out) if out.ndim == 0 else out


def _h_on_arc(spec: NodalDomainSpec, theta: np.ndarray) -> np.ndarray:
    """H evaluated along the boundary arc r = 2 arctan(beta(theta))."""
    r = stereo_inv(t2_boundary_beta(theta))
    return h_function(spec, r, theta)


def verify_containment(spec: NodalDomainSpec,
                       safety: float = 2.0,
                       derivative_grid: int = 4096,
                       min_step: float = 1e-8) -> ContainmentCertificate:
    """March along the boundary arc certifying H > 0 on [0, pi/3].

    At each anchor theta0 the march advances by H(theta0) / M, where M is
    ``safety`` times the sampled supremum of |dH/dtheta| along the arc
    (total derivative through the composite r(theta)).  The guaranteed
    lower bound on each interval is H(theta0) (1 - 1/safety), so a strict
    certificate needs safety > 1.  Symmetry about theta = pi/3 covers the
    rest of the arc.
    """
    if safety < 1.0:
        raise ValueError("safety must be >= 1")
    cert = ContainmentCertificate()

    theta_fine = np.linspace(0.0, math.pi / 3.0, derivative_grid)
    h_fine = _h_on_arc(spec, theta_fine)
    dh = np.gradient(h_fine, theta_fine)
    M = safety * float(np.max(np.abs(dh)))
    cert.derivative_bound = M

    for t in CHECKPOINT_THETAS:
        cert.checkpoints.append((t, float(_h_on_arc(spec, np.array([t]))[0])))

    margin = 1.0 - 1.0 / safety
    theta0 = 0.0
    end = math.pi / 3.0
    max_anchors = 1_000_000
    for _ in range(max_anchors):
        h0 = float(_h_on_arc(spec, np.array([theta0]))[0])
        if h0 <= 0.0:
            cert.failure = f"H({theta0:.6f}) = {h0:.3e} <= 0"
            cert.passed = False
            return cert
        step = h0 / M if M > 0.0 else end - theta0
        if step < min_step:
            cert.failure = (f"march stalled at theta = {theta0:.6f} "
                            f"(step {step:.2e}); H nearly vanishes there")
            cert.passed = False
            return cert
        theta1 = min(theta0 + step, end)
        cert.intervals.append((theta0, theta1, h0 * margin))
        theta0 = theta1
        if theta0 >= end:
            break
    else:
        cert.failure = "anchor budget exhausted"
        cert.passed = False
        return cert

    cert.passed = (all(b > 0.0 for _, _, b in cert.intervals)
                   and all(h > 0.0 for _, h in cert.checkpoints))
    if not cert.passed and cert.failure is None:
        cert.failure = "nonpositive interval bound or checkpoint"
    return cert


def eigen_residual_check(spec: NodalDomainSpec, samples: int, h: float,
                         mu_test: float | None = None,
                         seed: int = 0) -> float:
    """Max |Laplacian Phi + mu Phi| over random interior points, by
    second-order central differences of the polar Laplacian
    u_rr + cot(r) u_r + csc^2(r) u_tt.

    O(h^2) for the exact eigenfunction; stays bounded away from zero when
    ``mu_test`` differs from the construction eigenvalue.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if not 1e-5 < h < 1e-2:
        raise ValueError("h outside (1e-5, 1e-2)")
    mu = spec.mu if mu_test is None else mu_test
    rng = np.random.default_rng(seed)
    r = rng.uniform(0.3, 2.7, samples)
    theta = rng.uniform(0.15, _SECTOR - 0.15, samples)

    def phi(rr, tt):
        return g2_eigenfunction(spec, rr, tt)

    u0 = phi(r, theta)
    u_rr = (phi(r + h, theta) - 2.0 * u0 + phi(r - h, theta)) / h ** 2
    u_r = (phi(r + h, theta) - phi(r - h, theta)) / (2.0 * h)
    u_tt = (phi(r, theta + h) - 2.0 * u0 + phi(r, theta - h)) / h ** 2
    lap = u_rr + u_r / np.tan(r) + u_tt / np.sin(r) ** 2
    return float(np.max(np.abs(lap + mu * u0)))
