"""Multistart minimization of A_M over pure spin-S states.

States are parameterized by an unconstrained real vector (a, b) with
psi = (a + i b) / |a + i b|, so the objective is a smooth ratio of a quartic
and the squared norm, and any local optimizer for unconstrained problems
applies.  Each start draws its initial point from its own counter-based
stream keyed by (seed, start index), which keeps results independent of the
order or number of workers.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .angular import HalfInt, half
from .multipole import _check_order, _quartic_and_grad, unpolarization_order
from .spinstate import SpinState

__all__ = [
    "SearchConfig",
    "SearchResult",
    "objective_and_gradient",
    "state_to_params",
    "params_to_state",
    "start_point",
    "minimize",
    "max_killable_order",
    "SEARCH_EPS",
    "THREADS_ENV",
]

SEARCH_EPS = 1e-8
THREADS_ENV = "UNPOLARIZED_THREADS"


@dataclass(frozen=True)
class SearchConfig:
    S: HalfInt
    M: int
    multistarts: int = 64
    max_iters: int = 2000
    tol_value: float = 1e-12
    tol_grad: float = 1e-10
    rng_seed: int = 0

    def __post_init__(self):
        S = half(self.S)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "M", _check_order(S, self.M))
        if self.multistarts < 1:
            raise ValueError("multistarts must be at least 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be non-negative")

    def to_dict(self) -> dict:
        return {
            "S": str(self.S),
            "M": self.M,
            "multistarts": self.multistarts,
            "max_iters": self.max_iters,
            "tol_value": self.tol_value,
            "tol_grad": self.tol_grad,
            "rng_seed": self.rng_seed,
        }


@dataclass(frozen=True, eq=False)
class SearchResult:
    best_state: SpinState
    best_value: float
    certified_order: int
    starts_converged: int
    iterations_total: int
    seed: int
    start_values: tuple = ()

    @property
    def best_start(self) -> int:
        return int(np.argmin(self.start_values))


def _split(params, n: int) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    if params.shape != (2 * n,):
        raise ValueError(f"expected {2 * n} real parameters, got shape {params.shape}")
    return params[:n] + 1j * params[n:]


def objective_and_gradient(params, S, M: int) -> tuple[float, np.ndarray]:
    """A_M of (a + i b)/|a + i b| and its gradient with respect to (a, b)."""
    S = half(S)
    M = _check_order(S, M)
    n = S.twice + 1
    psi = _split(params, n)
    norm2 = float(np.vdot(psi, psi).real)
    if norm2 == 0.0:
        raise ValueError("parameter vector is zero")
    q, g = _quartic_and_grad(psi, S.twice, M)
    value = q / norm2**2
    # real gradient of a real function from its conjugate Wirtinger derivative:
    # d/da + i d/db = 2 d/d(conj psi)
    grad = 2.0 * g / norm2**2 - 4.0 * q * psi / norm2**3
    return value, np.concatenate([grad.real, grad.imag])


def state_to_params(state: SpinState) -> np.ndarray:
    return np.concatenate([state.amps.real, state.amps.imag])


def params_to_state(params, S) -> SpinState:
    S = half(S)
    return SpinState(S, _split(params, S.twice + 1))


def start_point(seed: int, index: int, n: int) -> np.ndarray:
    """Initial parameters for start ``index``: a Gaussian vector scaled to unit norm."""
    ss = np.random.SeedSequence(seed, spawn_key=(index,))
    rng = np.random.Generator(np.random.Philox(ss))
    x = rng.normal(size=2 * n)
    return x / np.linalg.norm(x)


class _Target:
    """Objective wrapper that stops the optimizer once ``tol_value`` is reached."""

    def __init__(self, cfg: SearchConfig):
        self.cfg = cfg
        self.best_x = None
        self.best_f = np.inf

    def __call__(self, x):
        f, g = objective_and_gradient(x, self.cfg.S, self.cfg.M)
        if f < self.best_f:
            self.best_f, self.best_x = f, x.copy()
        return f, g

    def callback(self, intermediate_result):
        if intermediate_result.fun < self.cfg.tol_value:
            raise StopIteration


def _run_start(cfg: SearchConfig, index: int) -> tuple[np.ndarray, float, int, bool]:
    n = cfg.S.twice + 1
    x0 = start_point(cfg.rng_seed, index, n)
    target = _Target(cfg)
    res = _scipy_minimize(
        target,
        x0,
        jac=True,
        method="L-BFGS-B",
        callback=target.callback,
        options={"maxiter": cfg.max_iters, "gtol": cfg.tol_grad, "ftol": 0.0},
    )
    x = target.best_x
    x = x / np.linalg.norm(x)
    value, grad = objective_and_gradient(x, cfg.S, cfg.M)
    converged = value < cfg.tol_value or float(np.max(np.abs(grad))) < cfg.tol_grad or res.success
    return x, value, int(res.nit), bool(converged)


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def minimize(cfg: SearchConfig, workers: int | None = None) -> SearchResult:
    """Lowest A_M over ``cfg.multistarts`` local descents.

    The outcome does not depend on ``workers``: every start is a pure function
    of (seed, index) and ties are broken by the smaller index.
    """
    workers = _default_workers() if workers is None else max(1, int(workers))
    indices = range(cfg.multistarts)
    if workers == 1:
        runs = [_run_start(cfg, i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(lambda i: _run_start(cfg, i), indices))
    values = np.array([r[1] for r in runs])
    best = int(np.argmin(values))
    state = params_to_state(runs[best][0], cfg.S)
    return SearchResult(
        best_state=state,
        best_value=float(values[best]),
        certified_order=unpolarization_order(state, SEARCH_EPS),
        starts_converged=sum(r[3] for r in runs),
        iterations_total=sum(r[2] for r in runs),
        seed=cfg.rng_seed,
        start_values=tuple(float(v) for v in values),
    )


def max_killable_order(S, base_cfg: SearchConfig | None = None, eps: float = SEARCH_EPS) -> int:
    """Largest M reached by scanning M = 1, 2, ... until a search fails to get below eps."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    S = half(S)
    if base_cfg is None:
        base_cfg = SearchConfig(S, 1)
    order = 0
    for M in range(1, S.twice + 1):
        cfg = replace(base_cfg, S=S, M=M)
        if minimize(cfg).best_value >= eps:
            break
        order = M
    return order
