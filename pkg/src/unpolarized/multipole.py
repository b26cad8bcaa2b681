"""State multipoles and the cumulative multipole distribution A_M.

Three independent routes to A_M are provided and cross-checked in the tests:

* :func:`cumulative` on the spectrum from :func:`multipoles`, which traces
  the density matrix against explicit tensor-operator matrices;
* :func:`cumulative_pure`, the Clebsch-Gordan double sum over amplitude pairs;
* :func:`cumulative_projector`, the expectation of the coupled-spin projectors
  Pi_K in the product state |psi> (x) |psi~>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .angular import HalfInt, clebsch_gordan, half
from .spinstate import SpinState

__all__ = [
    "MultipoleSpectrum",
    "tensor_operator",
    "multipoles",
    "cumulative",
    "cumulative_table",
    "cumulative_pure",
    "max_value",
    "coherent_cumulative_cg",
    "tilde_state",
    "coupled_projector",
    "cumulative_projector",
    "unpolarization_order",
    "ZERO_TOL",
]

ZERO_TOL = 1e-10


def _check_order(S: HalfInt, M: int) -> int:
    if isinstance(M, bool) or int(M) != M:
        raise ValueError(f"multipole order must be an integer, got {M!r}")
    M = int(M)
    if not 1 <= M <= S.twice:
        raise ValueError(f"multipole order M must satisfy 1 <= M <= 2S = {S.twice}, got {M}")
    return M


@lru_cache(maxsize=None)
def _tensor_operator(twice_s: int, K: int, q: int) -> np.ndarray:
    S = HalfInt(twice_s)
    n = twice_s + 1
    scale = math.sqrt((2 * K + 1) / (twice_s + 1))
    T = np.zeros((n, n))
    for i in range(n):
        m = HalfInt(2 * i - twice_s)
        j = i + q
        if 0 <= j < n:
            T[j, i] = scale * clebsch_gordan(S, m, K, q, S, HalfInt(2 * j - twice_s))
    T.setflags(write=False)
    return T


def tensor_operator(S, K: int, q: int) -> np.ndarray:
    """Irreducible tensor T_Kq as a real (2S+1) x (2S+1) matrix.

    Entry (m', m) is sqrt((2K+1)/(2S+1)) <S m; K q | S m'>.
    """
    S = half(S)
    if not 0 <= K <= S.twice or abs(q) > K:
        raise ValueError(f"need 0 <= K <= 2S and |q| <= K, got K={K}, q={q} for S={S}")
    return _tensor_operator(S.twice, int(K), int(q))


@dataclass(frozen=True, eq=False)
class MultipoleSpectrum:
    """Multipoles rho_Kq for K = 0..2S, stored densely per K shell.

    ``shells[K][q + K]`` holds rho_Kq.
    """

    S: HalfInt
    shells: tuple

    def __getitem__(self, key) -> complex:
        K, q = key
        if not 0 <= K <= self.S.twice or abs(q) > K:
            raise KeyError(key)
        return complex(self.shells[K][q + K])

    @property
    def max_rank(self) -> int:
        return self.S.twice

    def shell_power(self, K: int) -> float:
        """sum_q |rho_Kq|^2."""
        return float(np.sum(np.abs(self.shells[K]) ** 2))

    def items(self):
        for K, shell in enumerate(self.shells):
            for q in range(-K, K + 1):
                yield K, q, complex(shell[q + K])


def multipoles(state) -> MultipoleSpectrum:
    """rho_Kq = Tr[rho T_Kq^dagger] for a pure state or a density matrix.

    A density matrix must be passed together with its spin as ``(S, rho)``.
    """
    if isinstance(state, SpinState):
        S, rho = state.S, state.density_matrix()
    else:
        S, rho = state
        S = half(S)
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (S.twice + 1, S.twice + 1):
            raise ValueError("density matrix has the wrong shape")
    shells = []
    for K in range(S.twice + 1):
        shell = np.array(
            [np.sum(rho * _tensor_operator(S.twice, K, q)) for q in range(-K, K + 1)],
            dtype=complex,
        )
        shell.setflags(write=False)
        shells.append(shell)
    return MultipoleSpectrum(S, tuple(shells))


def reconstruct_density(spec: MultipoleSpectrum) -> np.ndarray:
    """sum_Kq rho_Kq T_Kq."""
    n = spec.S.twice + 1
    rho = np.zeros((n, n), dtype=complex)
    for K, q, value in spec.items():
        rho += value * _tensor_operator(spec.S.twice, K, q)
    return rho


def cumulative(spec: MultipoleSpectrum, M: int) -> float:
    """A_M = sum_{K=1..M} sum_q |rho_Kq|^2."""
    M = _check_order(spec.S, M)
    return float(sum(spec.shell_power(K) for K in range(1, M + 1)))


def cumulative_table(spec: MultipoleSpectrum) -> np.ndarray:
    """A_M for M = 1..2S, accumulated in order so it is monotone as computed."""
    powers = [spec.shell_power(K) for K in range(1, spec.S.twice + 1)]
    return np.cumsum(powers)


@lru_cache(maxsize=None)
def _shift_weights(twice_s: int) -> tuple:
    """CG weights for the amplitude-pair sums, grouped by q.

    Entry ``q + 2S`` is a matrix W of shape (2S + 1 - |q|, 2S + 1 - |q|):
    row K - |q|, column i (over the valid m) holds
    sqrt((2K+1)/(2S+1)) <S m; K q | S m+q>, with m = i - S for q >= 0 and
    m = i - S - q for q < 0.
    """
    S = HalfInt(twice_s)
    n = twice_s + 1
    out = []
    for q in range(-twice_s, twice_s + 1):
        aq = abs(q)
        lo = max(0, -q)
        W = np.zeros((n - aq, n - aq))
        for K in range(aq, twice_s + 1):
            scale = math.sqrt((2 * K + 1) / (twice_s + 1))
            for col in range(n - aq):
                i = lo + col
                m = HalfInt(2 * i - twice_s)
                W[K - aq, col] = scale * clebsch_gordan(S, m, K, q, S, m + q)
        W.setflags(write=False)
        out.append(W)
    return tuple(out)


def _pair_products(psi: np.ndarray, q: int) -> np.ndarray:
    # u[i] = psi_{m+q} conj(psi_m) over the valid m
    n = psi.size
    if q >= 0:
        return psi[q:] * psi[: n - q].conj()
    return psi[: n + q] * psi[-q:].conj()


def _rows(weights, twice_s: int, q: int, M: int) -> np.ndarray:
    # ranks K = max(1, |q|)..M; the monopole is excluded
    aq = abs(q)
    return weights[q + twice_s][max(1, aq) - aq : M - aq + 1]


def _quartic(psi: np.ndarray, twice_s: int, M: int) -> float:
    weights = _shift_weights(twice_s)
    total = 0.0
    for q in range(-M, M + 1):
        W = _rows(weights, twice_s, q, M)
        r = W @ _pair_products(psi, q)
        total += float(np.vdot(r, r).real)
    return total


def _quartic_and_grad(psi: np.ndarray, twice_s: int, M: int) -> tuple[float, np.ndarray]:
    """Unnormalized quartic form and its conjugate Wirtinger derivative."""
    weights = _shift_weights(twice_s)
    n = psi.size
    total = 0.0
    g = np.zeros(n, dtype=complex)
    for q in range(-M, M + 1):
        W = _rows(weights, twice_s, q, M)
        r = W @ _pair_products(psi, q)
        total += float(np.vdot(r, r).real)
        v = W.T @ r
        if q >= 0:
            # d r / d conj(psi_m) at index i = m, d conj(r) / d conj(psi_{m+q})
            g[: n - q] += psi[q:] * v.conj()
            g[q:] += psi[: n - q] * v
        else:
            g[-q:] += psi[: n + q] * v.conj()
            g[: n + q] += psi[-q:] * v
    return total, g


def cumulative_pure(state: SpinState, M: int) -> float:
    """A_M of a pure state from the Clebsch-Gordan double sum over amplitudes."""
    M = _check_order(state.S, M)
    return _quartic(state.amps, state.S.twice, M)


def max_value(S, M: int) -> float:
    """Largest possible A_M at spin S, attained by every SU(2) coherent state.

    2S/(2S+1) - Gamma(2S+1)^2 / (Gamma(2S-M) Gamma(2S+M+2)); at M = 2S the
    Gamma(0) pole sends the second term to zero.
    """
    S = half(S)
    M = _check_order(S, M)
    n = S.twice
    ceiling = Fraction(n, n + 1)
    if M == n:
        return float(ceiling)
    f = math.factorial
    return float(ceiling - Fraction(f(n) ** 2, f(n - M - 1) * f(n + M + 1)))


def coherent_cumulative_cg(S, M: int) -> float:
    """A_M of |S, -S> as the single-CG sum sum_K (2K+1)/(2S+1) <S -S; K 0|S -S>^2."""
    S = half(S)
    M = _check_order(S, M)
    return float(
        sum(
            (2 * K + 1) / (S.twice + 1) * clebsch_gordan(S, -S, K, 0, S, -S) ** 2
            for K in range(1, M + 1)
        )
    )


def tilde_state(state: SpinState) -> SpinState:
    """|psi~> with amplitudes (-1)^(S+m) conj(psi_{-m})."""
    n = state.dim
    signs = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)  # (-1)^(S+m), S+m = i
    return SpinState(state.S, signs * state.amps[::-1].conj())


@lru_cache(maxsize=None)
def _coupled_vectors(twice_s: int, K: int) -> np.ndarray:
    """Rows |K, Q> = sum C^{KQ}_{S m, S m'} |m>|m'> in the product basis."""
    S = HalfInt(twice_s)
    n = twice_s + 1
    V = np.zeros((2 * K + 1, n * n))
    for a in range(n):
        ma = HalfInt(2 * a - twice_s)
        for b in range(n):
            mb = HalfInt(2 * b - twice_s)
            Q = ma + mb
            if abs(Q.twice) <= 2 * K:
                V[Q.twice // 2 + K, a * n + b] = clebsch_gordan(S, ma, S, mb, K, Q)
    V.setflags(write=False)
    return V


@lru_cache(maxsize=None)
def _projector(twice_s: int, K: int) -> np.ndarray:
    V = _coupled_vectors(twice_s, K)
    P = V.T @ V
    P.setflags(write=False)
    return P


def coupled_projector(S, K: int) -> np.ndarray:
    """Projector Pi_K onto total spin K inside H_S (x) H_S (trace 2K+1)."""
    S = half(S)
    if not 0 <= K <= S.twice:
        raise ValueError(f"need 0 <= K <= 2S, got {K}")
    return _projector(S.twice, int(K))


def cumulative_projector(state: SpinState, M: int) -> float:
    """A_M = sum_{K=1..M} <psi|<psi~| Pi_K |psi>|psi~>."""
    M = _check_order(state.S, M)
    x = np.kron(state.amps, tilde_state(state).amps)
    return float(
        sum(np.vdot(x, _projector(state.S.twice, K) @ x).real for K in range(1, M + 1))
    )


def unpolarization_order(state: SpinState, eps: float = ZERO_TOL) -> int:
    """Largest M with A_M < eps (0 when already A_1 >= eps)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    order = 0
    for M in range(1, state.S.twice + 1):
        if _quartic(state.amps, state.S.twice, M) >= eps:
            break
        order = M
    return order
