"""Spherical t-design certification of point sets on the unit sphere.

A point set is a t-design iff every spherical-harmonic moment
sum_i Y_l^m(x_i) vanishes for 1 <= l <= t; the moments are the primary test
and :func:`polynomial_average_check` gives a sampling witness for the
polynomial-average definition.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.special import gammaln, sph_harm_y

from .majorana import Constellation

__all__ = [
    "spherical_harmonic",
    "harmonic_moments",
    "moment_residuals",
    "design_order",
    "polynomial_average_check",
    "sphere_monomial_average",
    "DESIGN_EPS",
]

DESIGN_EPS = 1e-8


def spherical_harmonic(l: int, m: int, theta, phi):
    """Orthonormal Y_l^m with the Condon-Shortley phase (theta polar)."""
    if l < 0 or abs(m) > l:
        raise ValueError(f"need l >= 0 and |m| <= l, got l={l}, m={m}")
    return sph_harm_y(l, m, theta, phi)


def harmonic_moments(c: Constellation, l: int) -> np.ndarray:
    """sum_i Y_l^m(theta_i, phi_i) for m = -l..l."""
    ms = np.arange(-l, l + 1)
    Y = sph_harm_y(l, ms[:, None], c.theta[None, :], c.phi[None, :])
    return Y.sum(axis=1)


def moment_residuals(c: Constellation, t_max: int) -> list[float]:
    """max_m |sum_i Y_l^m| for l = 1..t_max."""
    return [float(np.max(np.abs(harmonic_moments(c, l)))) for l in range(1, t_max + 1)]


def design_order(c: Constellation, t_max: int = 12, eps: float = DESIGN_EPS) -> int:
    """Largest t <= t_max such that the point set is a spherical t-design.

    The moment test at degree l is |sum_i Y_l^m| < eps * N for all m.
    """
    if len(c) == 0:
        raise ValueError("empty constellation")
    bound = eps * len(c)
    t = 0
    for l in range(1, t_max + 1):
        if np.max(np.abs(harmonic_moments(c, l))) >= bound:
            break
        t = l
    return t


def sphere_monomial_average(a: int, b: int, c: int) -> float:
    """Average of x^a y^b z^c over the unit sphere."""
    if a % 2 or b % 2 or c % 2:
        return 0.0
    # integral = 2 G(A) G(B) G(C) / G(A + B + C), A = (a + 1) / 2, ...
    A, B, C = (a + 1) / 2, (b + 1) / 2, (c + 1) / 2
    log_integral = math.log(2.0) + gammaln(A) + gammaln(B) + gammaln(C) - gammaln(A + B + C)
    return math.exp(log_integral) / (4 * math.pi)


def _exponents(degree: int) -> list[tuple[int, int, int]]:
    return [
        (a, b, d - a - b)
        for d in range(degree + 1)
        for a, b in itertools.product(range(d + 1), repeat=2)
        if a + b <= d
    ]


def polynomial_average_check(
    c: Constellation, degree: int, trials: int = 100, seed: int | None = 0
) -> float:
    """Largest |point average - sphere average| over random polynomials.

    Each trial draws standard-normal coefficients for every monomial of total
    degree <= ``degree`` in (x, y, z).
    """
    if degree < 0:
        raise ValueError("degree must be non-negative")
    exps = _exponents(degree)
    xyz = c.cartesian()
    pts = np.array(
        [np.prod(xyz ** np.array(e), axis=1).mean() for e in exps]
    )
    sphere = np.array([sphere_monomial_average(*e) for e in exps])
    rng = np.random.default_rng(seed)
    coeffs = rng.normal(size=(trials, len(exps)))
    # degree 0: constants average identically
    if degree == 0:
        return 0.0
    return float(np.max(np.abs(coeffs @ (pts - sphere))))
