"""Gauss hypergeometric series machinery for the spherical-cone eigenvalue relations.

The entry point is :func:`gauss_2f1`, a float64 evaluation of the standard
Gauss series

    2F1(a, b; c; z) = sum_k (a)_k (b)_k / ((c)_k k!) z^k

for real parameters and 0 <= z < 1.  Every eigenvalue relation in this
package reduces to locating zeros of this function in one of its upper
parameters, so the evaluator favours robustness over raw speed:

* direct summation uses compensated (Kahan) accumulation, so alternating
  series with a negative upper parameter keep full float64 accuracy;
* for arguments beyond ``Z_SWITCH`` the sum is re-expressed around 1 - z
  via the standard linear transformation, which keeps truncated-cone
  root-finding usable all the way to vanishing truncation (z -> 1-).

A vectorised same-parameter evaluator (:func:`gauss_2f1_grid`) serves the
contour/quadrature paths that sweep the argument along a radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import rgamma

DEFAULT_TOL = 1e-13
MAX_TERMS = 10_000
# beyond this argument the direct sum is slow and loses digits; switch to
# the 1-z expansion
Z_SWITCH = 0.95


class HypergeometricError(ArithmeticError):
    """Series failed to converge (or a transformation is degenerate).

    Carries the partial sum and the number of accumulated terms so callers
    can report how far the evaluation got.
    """

    def __init__(self, message: str, partial_sum: float | None = None,
                 terms: int | None = None):
        super().__init__(message)
        self.partial_sum = partial_sum
        self.terms = terms


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


@dataclass(frozen=True)
class HyperParams:
    """Parameters (alpha, beta; gamma; z) of the Gauss series."""

    alpha: float
    beta: float
    gamma: float
    z: float

    def __post_init__(self):
        if _is_nonpositive_integer(self.gamma):
            raise ValueError(
                f"gamma={self.gamma} is zero or a negative integer; "
                "the series is undefined")
        if not 0.0 <= self.z < 1.0:
            raise ValueError(f"z={self.z} outside [0, 1)")


def _direct_sum(alpha: float, beta: float, gamma: float, z: float,
                tol: float, max_terms: int) -> tuple[float, int]:
    """Kahan-compensated direct summation of the Gauss series.

    Stops once two consecutive terms fall below ``tol * (1 - z)``, which
    bounds the geometric tail by ~tol; the double-term check survives
    isolated near-zero terms of alternating series.
    """
    total = 1.0
    comp = 0.0
    term = 1.0
    small = 0
    cutoff = tol * (1.0 - z)
    for k in range(max_terms):
        term *= (alpha + k) * (beta + k) / ((gamma + k) * (1.0 + k)) * z
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if abs(term) < cutoff:
            small += 1
            if small >= 2:
                return total, k + 1
        else:
            small = 0
    raise HypergeometricError(
        f"2F1({alpha}, {beta}; {gamma}; {z}) did not converge in "
        f"{max_terms} terms", partial_sum=total, terms=max_terms)


def _near_one_sum(alpha: float, beta: float, gamma: float, z: float,
                  tol: float, max_terms: int) -> float:
    """Evaluate via the linear transformation around w = 1 - z.

    Degenerates when gamma - alpha - beta is an integer (the two branches
    collide); the cone relations never hit that case because the quantity
    only depends on (n, lambda), and the caller gets a hard error rather
    than a silently wrong value.
    """
    cab = gamma - alpha - beta
    if abs(cab - round(cab)) < 1e-8:
        raise HypergeometricError(
            f"1-z expansion degenerate: gamma-alpha-beta={cab} is "
            "(nearly) an integer")
    w = 1.0 - z
    coeff_a = math.gamma(gamma) * math.gamma(cab) \
        * rgamma(gamma - alpha) * rgamma(gamma - beta)
    coeff_b = math.gamma(gamma) * math.gamma(-cab) \
        * rgamma(alpha) * rgamma(beta)
    f1, _ = _direct_sum(alpha, beta, alpha + beta - gamma + 1.0, w,
                        tol, max_terms)
    f2, _ = _direct_sum(gamma - alpha, gamma - beta, cab + 1.0, w,
                        tol, max_terms)
    return coeff_a * f1 + coeff_b * w ** cab * f2


def gauss_2f1(p: HyperParams, tol: float = DEFAULT_TOL,
              max_terms: int = MAX_TERMS) -> float:
    """Evaluate 2F1(alpha, beta; gamma; z) for the given parameters."""
    if p.z == 0.0:
        return 1.0
    if p.z <= Z_SWITCH:
        value, _ = _direct_sum(p.alpha, p.beta, p.gamma, p.z, tol, max_terms)
        return value
    return _near_one_sum(p.alpha, p.beta, p.gamma, p.z, tol, max_terms)


def gauss_2f1_grid(alpha: float, beta: float, gamma: float,
                   z: np.ndarray, tol: float = DEFAULT_TOL,
                   max_terms: int = MAX_TERMS) -> np.ndarray:
    """Vectorised 2F1 over an array of arguments with fixed parameters.

    Arguments above ``Z_SWITCH`` fall back to the scalar path element-wise.
    """
    if _is_nonpositive_integer(gamma):
        raise ValueError(f"gamma={gamma} is zero or a negative integer")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0.0) or np.any(z >= 1.0):
        raise ValueError("arguments outside [0, 1)")
    out = np.ones_like(z)
    easy = z <= Z_SWITCH
    ze = z[easy]
    if ze.size:
        total = np.ones_like(ze)
        term = np.ones_like(ze)
        cutoff = tol * (1.0 - ze)
        small = np.zeros_like(ze, dtype=int)
        for k in range(max_terms):
            term *= (alpha + k) * (beta + k) / ((gamma + k) * (1.0 + k)) * ze
            total += term
            small = np.where(np.abs(term) < cutoff, small + 1, 0)
            if np.all(small >= 2):
                break
        else:
            raise HypergeometricError(
                f"2F1 grid sum did not converge in {max_terms} terms",
                terms=max_terms)
        out[easy] = total
    for idx in np.flatnonzero(~easy):
        out[idx] = _near_one_sum(alpha, beta, gamma, float(z[idx]),
                                 tol, max_terms)
    return out


def series_partial_sums(p: HyperParams, terms: int) -> np.ndarray:
    """Partial sums S_0..S_{terms} of the series, for diagnostics/tests."""
    sums = np.empty(terms + 1)
    sums[0] = 1.0
    term = 1.0
    for k in range(terms):
        term *= (p.alpha + k) * (p.beta + k) / ((p.gamma + k) * (1.0 + k)) * p.z
        sums[k + 1] = sums[k] + term
    return sums
