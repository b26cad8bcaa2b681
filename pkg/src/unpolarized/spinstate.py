"""Pure spin-S states, Stokes operators and rotations.

Amplitude vectors are indexed by ``i = m + S``, i.e. from m = -S up to m = S.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .angular import EulerAngles, HalfInt, half, wigner_D_matrix

__all__ = [
    "SpinState",
    "basis_state",
    "ladder_matrices",
    "stokes_matrices",
    "coherent_state",
    "noon_state",
    "table1_state",
    "rotate",
    "stokes_expectation",
    "random_state",
]


@dataclass(frozen=True, eq=False)
class SpinState:
    """Normalized pure state of a spin S (N = 2S photons).

    ``amps[i]`` is the amplitude of |S, m = i - S>.  The vector is normalized
    on construction; the global phase is left untouched.
    """

    S: HalfInt
    amps: np.ndarray

    def __post_init__(self):
        S = half(self.S)
        if S.twice < 1:
            raise ValueError(f"spin must be at least 1/2, got {S}")
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if amps.size != S.twice + 1:
            raise ValueError(f"spin {S} needs {S.twice + 1} amplitudes, got {amps.size}")
        norm = np.linalg.norm(amps)
        if not np.isfinite(norm) or norm == 0.0:
            raise ValueError("cannot normalize a zero or non-finite amplitude vector")
        amps = amps / norm
        amps.setflags(write=False)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return self.S.twice + 1

    @property
    def ms(self) -> np.ndarray:
        """Projections m = -S..S as floats."""
        return _ms(self.S.twice)

    def amp(self, m) -> complex:
        m = half(m)
        i = (m.twice + self.S.twice) // 2
        if (m.twice + self.S.twice) % 2 or not 0 <= i < self.dim:
            raise ValueError(f"m = {m} is not a valid projection for S = {self.S}")
        return complex(self.amps[i])

    def inner(self, other: "SpinState") -> complex:
        """<self|other>."""
        if other.S != self.S:
            raise ValueError("states have different spin")
        return complex(np.vdot(self.amps, other.amps))

    def fidelity(self, other: "SpinState") -> float:
        """|<self|other>|, insensitive to global phase."""
        return abs(self.inner(other))

    def density_matrix(self) -> np.ndarray:
        return np.outer(self.amps, self.amps.conj())

    def __repr__(self):
        return f"SpinState(S={self.S}, amps={np.array2string(self.amps, precision=4)})"


@lru_cache(maxsize=None)
def _ms(twice_s: int) -> np.ndarray:
    ms = (2.0 * np.arange(twice_s + 1) - twice_s) / 2.0
    ms.setflags(write=False)
    return ms


def basis_state(S, m) -> SpinState:
    """The eigenstate |S, m> of S_z."""
    S, m = half(S), half(m)
    if (S.twice - m.twice) % 2 or abs(m.twice) > S.twice:
        raise ValueError(f"m = {m} is not a valid projection for S = {S}")
    amps = np.zeros(S.twice + 1, dtype=complex)
    amps[(m.twice + S.twice) // 2] = 1.0
    return SpinState(S, amps)


@lru_cache(maxsize=None)
def _ladder(twice_s: int) -> tuple[np.ndarray, np.ndarray]:
    S = twice_s / 2.0
    ms = _ms(twice_s)
    raise_elems = np.sqrt(S * (S + 1) - ms[:-1] * (ms[:-1] + 1))
    s_plus = np.diag(raise_elems, k=-1).astype(complex)
    s_minus = s_plus.T.copy()
    for mat in (s_plus, s_minus):
        mat.setflags(write=False)
    return s_plus, s_minus


def ladder_matrices(S) -> tuple[np.ndarray, np.ndarray]:
    """Matrices of S_+ and S_- (row index m', column index m)."""
    S = half(S)
    if S.twice < 1:
        raise ValueError(f"spin must be at least 1/2, got {S}")
    return _ladder(S.twice)


@lru_cache(maxsize=None)
def _stokes(twice_s: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    s_plus, s_minus = _ladder(twice_s)
    sx = (s_plus + s_minus) / 2.0
    sy = (s_plus - s_minus) / 2.0j
    sz = np.diag(_ms(twice_s)).astype(complex)
    for mat in (sx, sy, sz):
        mat.setflags(write=False)
    return sx, sy, sz


def stokes_matrices(S) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stokes operators (S_x, S_y, S_z) in the |S, m> basis."""
    S = half(S)
    if S.twice < 1:
        raise ValueError(f"spin must be at least 1/2, got {S}")
    return _stokes(S.twice)


def coherent_state(S, theta: float, phi: float) -> SpinState:
    """SU(2) coherent state |theta, phi>, proportional to exp(alpha S_+)|S, -S>
    with alpha = tan(theta/2) exp(-i phi).

    theta = 0 gives |S, -S>; theta = pi gives |S, S> exactly.  The mean spin
    vector points along (sin theta cos phi, sin theta sin phi, -cos theta).
    """
    S = half(S)
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    n = S.twice
    if theta == math.pi:
        c, s = 0.0, 1.0
    else:
        c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    k = np.arange(n + 1)
    binom = np.sqrt([float(math.comb(n, int(j))) for j in k])
    amps = binom * np.power(c, n - k) * np.power(s, k) * np.exp(-1j * k * phi)
    return SpinState(S, amps)


def noon_state(S) -> SpinState:
    """(|S, S> - |S, -S>) / sqrt(2)."""
    S = half(S)
    amps = np.zeros(S.twice + 1, dtype=complex)
    amps[-1] = 1.0
    amps[0] = -1.0
    return SpinState(S, amps)


def table1_state(S, variant: int = 0) -> tuple[SpinState, int]:
    """Tabulated maximally unpolarized state and its claimed order M."""
    from .fixtures import load_fixture

    if variant != 0:
        raise ValueError(f"only variant 0 is tabulated, got {variant}")
    record = load_fixture(S)
    return record.state(), record.claimed_M


def rotate(state: SpinState, R: EulerAngles) -> SpinState:
    """Apply D^S(R): amps'_{m'} = sum_m D_{m' m}(R) amps_m."""
    return SpinState(state.S, wigner_D_matrix(state.S, R) @ state.amps)


def stokes_expectation(state: SpinState) -> np.ndarray:
    """(<S_x>, <S_y>, <S_z>)."""
    psi = state.amps
    return np.array([np.vdot(psi, op @ psi).real for op in stokes_matrices(state.S)])


def random_state(S, rng: np.random.Generator) -> SpinState:
    """Haar-random pure state."""
    S = half(S)
    n = S.twice + 1
    return SpinState(S, rng.normal(size=n) + 1j * rng.normal(size=n))
