"""Majorana polynomial, constellations and the SU(2) Q-function.

Sphere convention: a polynomial root z is placed at
``theta = 2 arctan(1/|z|)``, ``phi = arg(-z)``, roots at infinity at the north
pole (theta = 0) and z = 0 at the south pole.  With this choice the
constellation of ``coherent_state(S, theta, phi)`` collapses exactly onto
``(theta, phi)``.  Coherent-state labels are the mean spin vector reflected
through the equatorial plane, so a state rotation R moves the constellation by
the reflected rotation returned by :func:`constellation_rotation`.  The zeros
of the Q-function sit at the antipodes of the constellation points.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import linear_sum_assignment

from .angular import EulerAngles, HalfInt, half
from .spinstate import SpinState, coherent_state

__all__ = [
    "MajoranaPolynomial",
    "Constellation",
    "state_to_polynomial",
    "polynomial_to_constellation",
    "constellation",
    "constellation_to_state",
    "polynomial_roots",
    "q_function",
    "q_grid",
    "constellation_rotation",
    "constellation_match",
    "DEGREE_TOL",
]

DEGREE_TOL = 1e-14
CLUSTER_TOL = 1e-8
MULTIPLICITY_TOL = 1e-11

# reflection through the equatorial plane
_SIGMA_Z = np.diag([1.0, 1.0, -1.0])


def _binomial_weights(twice_s: int) -> np.ndarray:
    return np.sqrt([float(math.comb(twice_s, k)) for k in range(twice_s + 1)])


@dataclass(frozen=True, eq=False)
class MajoranaPolynomial:
    """Coefficients c_k of alpha^k, k = 0..2S (ascending powers)."""

    S: HalfInt
    coeffs: np.ndarray

    def __post_init__(self):
        S = half(self.S)
        coeffs = np.array(self.coeffs, dtype=complex).reshape(-1)
        if coeffs.size != S.twice + 1:
            raise ValueError(f"need {S.twice + 1} coefficients for S = {S}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "coeffs", coeffs)

    def __call__(self, alpha):
        return np.polynomial.polynomial.polyval(alpha, self.coeffs)


@dataclass(frozen=True, eq=False)
class Constellation:
    """2S points on the unit sphere; ``points[i] = (theta_i, phi_i)``."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        pts = pts.copy()
        pts[:, 1] = np.mod(pts[:, 1], 2 * math.pi)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    @property
    def S(self) -> HalfInt:
        return HalfInt(len(self.points))

    @property
    def theta(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def phi(self) -> np.ndarray:
        return self.points[:, 1]

    def cartesian(self) -> np.ndarray:
        th, ph = self.theta, self.phi
        return np.column_stack(
            [np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)]
        )

    @classmethod
    def from_cartesian(cls, xyz) -> "Constellation":
        xyz = np.asarray(xyz, dtype=float).reshape(-1, 3)
        xyz = xyz / np.linalg.norm(xyz, axis=1, keepdims=True)
        theta = np.arccos(np.clip(xyz[:, 2], -1.0, 1.0))
        phi = np.arctan2(xyz[:, 1], xyz[:, 0])
        return cls(np.column_stack([theta, phi]))

    def rotated(self, rot) -> "Constellation":
        """Apply a rotation (3x3 matrix or EulerAngles) to every point."""
        if isinstance(rot, EulerAngles):
            rot = rot.matrix()
        return Constellation.from_cartesian(self.cartesian() @ np.asarray(rot).T)

    def __repr__(self):
        return f"Constellation({len(self)} points)"


def state_to_polynomial(state: SpinState) -> MajoranaPolynomial:
    """c_{S+m} = sqrt((2S)! / ((S-m)! (S+m)!)) psi_m."""
    return MajoranaPolynomial(state.S, _binomial_weights(state.S.twice) * state.amps)


def _root_to_sphere(z: complex) -> tuple[float, float]:
    if z == 0:
        return math.pi, 0.0
    theta = 2.0 * math.atan2(1.0, abs(z))
    phi = math.atan2(-z.imag, -z.real) % (2 * math.pi)
    return theta, phi


def _sphere_to_root(theta: float, phi: float) -> complex | None:
    """Inverse of the root map; None stands for the root at infinity."""
    if theta <= 0.0:
        return None
    t = math.tan(theta / 2.0)
    if theta >= math.pi or t == 0.0:
        return 0j if theta >= math.pi else None
    return -complex(math.cos(phi), math.sin(phi)) / t


@lru_cache(maxsize=None)
def _binomial_table(degree: int) -> tuple[np.ndarray, np.ndarray]:
    i = np.arange(degree + 1)
    binom = np.array(
        [[float(math.comb(int(b), int(a))) for b in i] for a in i]
    )
    exponents = np.maximum(i[None, :] - i[:, None], 0)
    binom.setflags(write=False)
    exponents.setflags(write=False)
    return binom, exponents


def _taylor_matrix(degree: int, c: complex) -> np.ndarray:
    """B with (B @ a)[j] = p^{(j)}(c) / j! for p = sum a_i z^i."""
    binom, exponents = _binomial_table(degree)
    return binom * np.power(complex(c), exponents)


class _Chart:
    """Polynomial in the chart where the cluster under study has |w| <= 1."""

    def __init__(self, coeffs: np.ndarray, inverted: bool):
        self.coeffs = coeffs[::-1] if inverted else coeffs
        self.inverted = inverted
        self.degree = self.coeffs.size - 1

    def taylor(self, c: complex) -> tuple[np.ndarray, np.ndarray]:
        """Taylor coefficients at c together with their rounding scale."""
        B = _taylor_matrix(self.degree, c)
        return B @ self.coeffs, np.abs(B) @ np.abs(self.coeffs)

    def newton(self, w: complex, order: int, steps: int) -> complex:
        """Newton iterations on the (order-1)-th derivative."""
        poly = np.polynomial.Polynomial(self.coeffs)
        f = poly.deriv(order - 1) if order > 1 else poly
        df = f.deriv()
        for _ in range(steps):
            fw, dfw = f(w), df(w)
            if dfw == 0 or not np.isfinite(fw):
                break
            step = fw / dfw
            if not np.isfinite(step) or abs(step) > 0.1 * (1 + abs(w)):
                break
            w = w - step
        return w


def _is_multiple(chart: _Chart, w: complex, k: int) -> bool:
    b, scale = chart.taylor(w)
    tiny = np.finfo(float).tiny
    return bool(np.all(np.abs(b[:k]) <= MULTIPLICITY_TOL * scale[:k] + tiny))


def polynomial_roots(coeffs, tol: float = DEGREE_TOL):
    """Roots of sum_k c_k z^k with multiplicities.

    Returns ``(roots, n_infinite)``: the finite roots (repeated according to
    multiplicity) and the number of roots at infinity implied by the degree
    deficiency relative to ``len(coeffs) - 1``.  Coefficients below
    ``tol * max|c|`` at either end are treated as exact zeros.  Eigenvalues of
    the companion matrix are grouped into clusters, each cluster accepted as a
    multiple root when the Taylor coefficients at its centroid vanish to
    rounding accuracy, then polished by Newton's method.
    """
    c = np.array(coeffs, dtype=complex).reshape(-1)
    n = c.size - 1
    mags = np.abs(c)
    big = float(np.max(mags)) if c.size else 0.0
    if big == 0.0:
        raise ValueError("zero polynomial has no constellation")
    floor = tol * big
    low, high = 0, n
    # an end coefficient is dropped only if it is negligible both globally and
    # relative to its neighbour, i.e. its root would sit within ~tol of a pole
    while high > low and mags[high] <= floor and mags[high] <= tol * mags[high - 1]:
        high -= 1
    while low < high and mags[low] <= floor and mags[low] <= tol * mags[low + 1]:
        low += 1
    if mags[high] <= floor and high == low:
        raise ValueError("zero polynomial has no constellation")
    n_infinite = n - high
    core = c[low : high + 1] / big
    roots = [0j] * low
    if core.size > 1:
        roots.extend(_cluster_roots(core))
    return np.array(roots, dtype=complex), n_infinite


def _cluster_roots(core: np.ndarray) -> list[complex]:
    degree = core.size - 1
    raw = np.roots(core[::-1])
    xyz = np.array([_unit(z) for z in raw])
    unassigned = list(range(degree))
    charts = {False: _Chart(core, False), True: _Chart(core, True)}
    out: list[complex] = []
    while unassigned:
        i = unassigned[0]
        order = sorted(unassigned, key=lambda j: np.linalg.norm(xyz[j] - xyz[i]))
        members, value = [i], None
        for k in range(2, len(order) + 1):
            group = order[:k]
            if np.linalg.norm(xyz[group[-1]] - xyz[i]) > 1.0:
                break
            centre = np.mean(raw[group])
            inverted = abs(centre) > 1.0
            w = np.mean(1.0 / raw[group]) if inverted else centre
            chart = charts[inverted]
            if _is_multiple(chart, w, k):
                w = chart.newton(w, k, steps=3)
                members, value = group, (1.0 / w if inverted else w)
            elif k == 2 and np.linalg.norm(xyz[group[1]] - xyz[i]) < CLUSTER_TOL:
                members, value = group, centre
        if value is None:
            z = raw[i]
            inverted = abs(z) > 1.0
            chart = charts[inverted]
            w = chart.newton(1.0 / z if inverted else z, 1, steps=1)
            value = 1.0 / w if inverted else w
        out.extend([complex(value)] * len(members))
        unassigned = [j for j in unassigned if j not in members]
    return out


def _unit(z: complex) -> np.ndarray:
    theta, phi = _root_to_sphere(complex(z))
    return np.array(
        [math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)]
    )


def polynomial_to_constellation(p: MajoranaPolynomial) -> Constellation:
    """The 2S sphere points of the roots of p (roots at infinity at theta = 0)."""
    roots, n_infinite = polynomial_roots(p.coeffs)
    points = [(0.0, 0.0)] * n_infinite + [_root_to_sphere(complex(z)) for z in roots]
    return Constellation(np.array(points, dtype=float).reshape(-1, 2))


def constellation(state: SpinState) -> Constellation:
    """Majorana constellation of a state."""
    return polynomial_to_constellation(state_to_polynomial(state))


def constellation_to_state(c: Constellation) -> SpinState:
    """Rebuild the state (up to global phase) whose constellation is ``c``."""
    twice_s = len(c)
    if twice_s < 1:
        raise ValueError("a constellation needs at least one point")
    poly = np.array([1.0 + 0j])
    for theta, phi in c.points:
        z = _sphere_to_root(float(theta), float(phi))
        if z is None:
            continue
        # normalized linear factor keeps the coefficients well scaled
        if abs(z) <= 1.0:
            factor = np.array([-z, 1.0])
        else:
            factor = np.array([-1.0, 1.0 / z])
        poly = np.convolve(poly, factor)
    coeffs = np.zeros(twice_s + 1, dtype=complex)
    coeffs[: poly.size] = poly
    return SpinState(HalfInt(twice_s), coeffs / _binomial_weights(twice_s))


def q_function(state: SpinState, theta: float, phi: float) -> float:
    """Q(theta, phi) = |<theta, phi|psi>|^2."""
    return abs(np.vdot(coherent_state(state.S, theta, phi).amps, state.amps)) ** 2


def q_grid(state: SpinState, n_theta: int, n_phi: int) -> np.ndarray:
    """Q sampled at theta_j = pi (j + 1/2) / n_theta, phi_k = 2 pi k / n_phi."""
    if n_theta < 2 or n_phi < 2:
        raise ValueError("grid sizes must be at least 2")
    twice_s = state.S.twice
    theta = np.pi * (np.arange(n_theta) + 0.5) / n_theta
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    k = np.arange(twice_s + 1)
    weighted = _binomial_weights(twice_s) * state.amps
    cos_pow = np.power(np.cos(theta / 2)[:, None], twice_s - k)
    sin_pow = np.power(np.sin(theta / 2)[:, None], k)
    radial = cos_pow * sin_pow * weighted  # (n_theta, 2S+1)
    phases = np.exp(1j * np.outer(k, phi))  # (2S+1, n_phi)
    return np.abs(radial @ phases) ** 2


def constellation_rotation(R: EulerAngles) -> EulerAngles:
    """Rotation of the constellation induced by rotating the state with R."""
    return EulerAngles.from_matrix(_SIGMA_Z @ R.matrix() @ _SIGMA_Z)


def _frame(u: np.ndarray, v: np.ndarray) -> np.ndarray | None:
    e1 = u / np.linalg.norm(u)
    w = v - np.dot(v, e1) * e1
    nw = np.linalg.norm(w)
    if nw < 1e-6:
        return None
    e2 = w / nw
    return np.column_stack([e1, e2, np.cross(e1, e2)])


def _minimal_rotation(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Some rotation taking unit vector u onto unit vector v."""
    axis = np.cross(u, v)
    s, c = np.linalg.norm(axis), float(np.dot(u, v))
    if s < 1e-15:
        if c > 0:
            return np.eye(3)
        perp = np.cross(u, [1.0, 0.0, 0.0])
        if np.linalg.norm(perp) < 1e-6:
            perp = np.cross(u, [0.0, 1.0, 0.0])
        perp /= np.linalg.norm(perp)
        return 2.0 * np.outer(perp, perp) - np.eye(3)
    k = axis / s
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + s * K + (1 - c) * (K @ K)


def _assignment_residual(moved: np.ndarray, target: np.ndarray) -> float:
    # atan2 keeps small angles accurate where arccos of a dot product cannot
    dots = moved @ target.T
    cross = np.linalg.norm(np.cross(moved[:, None, :], target[None, :, :]), axis=-1)
    cost = np.arctan2(cross, dots)
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols]))


def constellation_match(
    a: Constellation, b: Constellation, tol: float = 1e-6
) -> EulerAngles | None:
    """Find a rotation carrying ``a`` onto ``b`` as multisets, or None.

    Candidate rotations align an anchor pair of ``a`` (two non-parallel points)
    with every ordered pair of ``b`` at the same angular separation; points are
    then assigned optimally and the worst angular error compared with ``tol``.
    Degenerate ``a`` (all points on one axis) falls back to aligning a single
    anchor point.
    """
    if len(a) != len(b):
        return None
    xa, xb = a.cartesian(), b.cartesian()
    p0 = xa[0]
    sep = np.linalg.norm(np.cross(xa, p0), axis=1)
    i1 = int(np.argmax(sep))
    # loose prefilter on pair separation; the final residual decides
    pair_tol = max(10.0 * tol, 1e-9)
    if sep[i1] < 1e-6:
        for j in range(len(xb)):
            rot = _minimal_rotation(p0, xb[j])
            if _assignment_residual(xa @ rot.T, xb) < tol:
                return EulerAngles.from_matrix(rot)
        return None
    p1 = xa[i1]
    fa = _frame(p0, p1)
    target_dot = float(np.dot(p0, p1))
    for j, k in itertools.permutations(range(len(xb)), 2):
        if abs(float(np.dot(xb[j], xb[k])) - target_dot) > pair_tol:
            continue
        fb = _frame(xb[j], xb[k])
        if fb is None:
            continue
        rot = fb @ fa.T
        if _assignment_residual(xa @ rot.T, xb) < tol:
            return EulerAngles.from_matrix(rot)
    return None
