"""Rotation sensing: overlap decay, orthogonality angles and directional sensitivity.

Rotations act as U = exp(-i angle n.S).  With this convention the N00N state
(|S,S> - |S,-S>)/sqrt(2) becomes orthogonal to itself after a z rotation by
pi/(2S).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .angular import EulerAngles
from .spinstate import SpinState, stokes_expectation, stokes_matrices

__all__ = [
    "AxisAngle",
    "generator",
    "rotation_unitary",
    "rotation_overlap",
    "orthogonality_angle",
    "sensitivity",
    "fibonacci_axes",
    "scan_axes",
    "sensitivity_scan",
    "ScanResult",
]


def _unit_axis(axis) -> np.ndarray:
    n = np.asarray(axis, dtype=float).reshape(3)
    norm = np.linalg.norm(n)
    if not np.isfinite(norm) or norm == 0.0:
        raise ValueError("rotation axis must be a nonzero finite vector")
    return n / norm


@dataclass(frozen=True)
class AxisAngle:
    """Rotation by ``angle`` radians about the unit vector ``axis``.

    The axis is normalized on construction.
    """

    axis: tuple
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "axis", tuple(float(v) for v in _unit_axis(self.axis)))
        object.__setattr__(self, "angle", float(self.angle))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.axis)


def generator(S, axis) -> np.ndarray:
    """n.S as a Hermitian matrix."""
    n = _unit_axis(axis)
    sx, sy, sz = stokes_matrices(S)
    return n[0] * sx + n[1] * sy + n[2] * sz


def rotation_unitary(S, r: AxisAngle) -> np.ndarray:
    """exp(-i angle n.S) from the eigendecomposition of n.S."""
    w, V = np.linalg.eigh(generator(S, r.axis))
    return (V * np.exp(-1j * r.angle * w)) @ V.conj().T


def rotation_overlap(state: SpinState, r: AxisAngle) -> float:
    """|<psi| exp(-i angle n.S) |psi>|^2."""
    w, V = np.linalg.eigh(generator(state.S, r.axis))
    weights = np.abs(V.conj().T @ state.amps) ** 2
    return float(abs(np.sum(weights * np.exp(-1j * r.angle * w))) ** 2)


def orthogonality_angle(
    state: SpinState, axis, eps: float = 1e-10, samples: int = 4096
) -> float | None:
    """Smallest angle in (0, 2 pi] where the rotated state (nearly) loses overlap.

    The overlap is sampled on a uniform grid; the first sample below ``eps``
    (or the first local minimum under ``eps`` between two samples) is refined
    by a bounded scalar minimization of the overlap.  Returns None when the
    overlap never drops below ``eps``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    n = _unit_axis(axis)
    w, V = np.linalg.eigh(generator(state.S, n))
    weights = np.abs(V.conj().T @ state.amps) ** 2

    def overlap(t):
        return float(abs(np.sum(weights * np.exp(-1j * t * w))) ** 2)

    grid = np.linspace(0.0, 2 * math.pi, samples + 1)[1:]
    values = np.abs(np.exp(-1j * np.outer(grid, w)) @ weights) ** 2
    step = grid[0]
    for k in range(len(grid)):
        left = values[k - 1] if k > 0 else 1.0
        right = values[k + 1] if k + 1 < len(grid) else np.inf
        local_min = values[k] <= left and values[k] <= right
        if not (values[k] < eps or local_min):
            continue
        lo, hi = max(grid[k] - step, 1e-12), min(grid[k] + step, 2 * math.pi)
        res = minimize_scalar(overlap, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-14})
        t_best, f_best = (res.x, res.fun) if res.fun < values[k] else (grid[k], values[k])
        if f_best < eps:
            return float(t_best)
    return None


def sensitivity(state: SpinState, axis) -> float:
    """Var(n.S) = <(n.S)^2> - <n.S>^2."""
    G = generator(state.S, axis)
    Gpsi = G @ state.amps
    mean = float(np.vdot(state.amps, Gpsi).real)
    return float(np.vdot(Gpsi, Gpsi).real - mean**2)


def fibonacci_axes(n_axes: int) -> np.ndarray:
    """Quasi-uniform unit vectors on the golden-angle spiral."""
    if n_axes < 1:
        raise ValueError("n_axes must be at least 1")
    k = np.arange(n_axes) + 0.5
    z = 1.0 - 2.0 * k / n_axes
    r = np.sqrt(1.0 - z * z)
    angle = math.pi * (3.0 - math.sqrt(5.0)) * k
    return np.column_stack([r * np.cos(angle), r * np.sin(angle), z])


def _tetrahedral_group() -> np.ndarray:
    cyc = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=float)
    flips = [np.diag(d) for d in ([1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1])]
    perms = [np.eye(3), cyc, cyc @ cyc]
    return np.array([p @ f for p in perms for f in flips])


def scan_axes(n_axes: int) -> np.ndarray:
    """Fibonacci lattice of ceil(n_axes / 12) points closed under the 12
    rotations of a tetrahedron.

    Averaging n n^T over any orbit of this group gives exactly I/3, so the
    mean of a quadratic form over the returned axes is its sphere average up
    to rounding.
    """
    base = fibonacci_axes(-(-n_axes // 12))
    return np.concatenate([base @ g.T for g in _tetrahedral_group()])


@dataclass(frozen=True)
class ScanResult:
    min: float
    max: float
    mean: float
    axes: np.ndarray
    values: np.ndarray

    def summary(self) -> dict:
        return {"min": self.min, "max": self.max, "mean": self.mean, "n_axes": len(self.values)}


def sensitivity_scan(state: SpinState, n_axes: int = 2000, seed: int | None = 0) -> ScanResult:
    """Sensitivity over the axes of :func:`scan_axes` (at least ``n_axes`` of them).

    The lattice is fixed; ``seed`` only applies a random overall rotation to it
    (``seed=None`` leaves it unrotated).
    """
    axes = scan_axes(n_axes)
    if seed is not None:
        R = EulerAngles.random(np.random.default_rng(seed)).matrix()
        axes = axes @ R.T
    ops = stokes_matrices(state.S)
    psi = state.amps
    mean_vec = stokes_expectation(state)
    # second-moment matrix C_ij = Re <S_i S_j>; Var(n.S) = n.C.n - (n.<S>)^2
    vecs = [op @ psi for op in ops]
    C = np.array([[np.vdot(a, b).real for b in vecs] for a in vecs])
    values = np.einsum("ai,ij,aj->a", axes, C, axes) - (axes @ mean_vec) ** 2
    return ScanResult(
        min=float(values.min()),
        max=float(values.max()),
        mean=float(values.mean()),
        axes=axes,
        values=values,
    )

