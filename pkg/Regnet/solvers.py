"""Inexact ALM solvers for the self-representation X = XZ + E.

solve_lrr minimises ||Z||_* + lam * ||E||_{2,1} (nuclear norm, LRNR);
solve_lfr minimises ||Z||_F^2 + lam * ||E||_{2,1} (Frobenius relaxation, LFNR).
Both introduce the auxiliary J = Z and share the Z and E block updates.
"""
import logging
import os
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Tuple

import numpy as np
import scipy.linalg

from .error_codes import InputError, NumericalFailureError
from .kernels import as_matrix, l21_prox, svt

LRNR = 'lrnr'
LFNR = 'lfnr'

REGNET_LAMBDA = 'REGNET_LAMBDA'
REGNET_EPS = 'REGNET_EPS'
REGNET_MAX_ITER = 'REGNET_MAX_ITER'


@dataclass(frozen=True)
class SolverConfig:
    lam: float = 0.1
    mu0: float = 1e-6
    rho: float = 1.1
    mu_max: float = 1e10
    eps: float = 1e-8
    max_iter: int = 1000

    def __post_init__(self):
        if self.lam <= 0:
            raise InputError(f'lambda must be positive, got {self.lam}')
        if self.mu0 <= 0 or self.mu_max <= 0:
            raise InputError('mu0 and mu_max must be positive')
        if self.rho <= 1:
            raise InputError(f'rho must exceed 1, got {self.rho}')
        if self.eps <= 0:
            raise InputError(f'eps must be positive, got {self.eps}')
        if self.max_iter < 1:
            raise InputError(f'max_iter must be at least 1, got {self.max_iter}')

    @classmethod
    def from_env(cls, **overrides):
        values = {}
        if REGNET_LAMBDA in os.environ:
            values['lam'] = float(os.environ[REGNET_LAMBDA])
        if REGNET_EPS in os.environ:
            values['eps'] = float(os.environ[REGNET_EPS])
        if REGNET_MAX_ITER in os.environ:
            values['max_iter'] = int(os.environ[REGNET_MAX_ITER])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def to_dict(self):
        return asdict(self)


@dataclass
class SolverResult:
    z_star: np.ndarray
    e_star: np.ndarray
    iterations: int
    converged: bool
    final_residuals: Tuple[float, float]
    method: str = LRNR
    lam: float = 0.1
    elapsed_s: float = 0.0
    mu_history: Tuple[float, ...] = field(default_factory=tuple)

    def summary(self):
        return {
            'method': self.method,
            'lambda': self.lam,
            'iterations': self.iterations,
            'converged': self.converged,
            'residual_constraint': self.final_residuals[0],
            'residual_split': self.final_residuals[1],
        }


def frob_j_update(zy, mu: float) -> np.ndarray:
    """Exact minimiser of ||J||_F^2 + (mu/2) ||zy - J||_F^2."""
    if mu <= 0:
        raise InputError(f'mu must be positive, got {mu}')
    return (mu / (mu + 2.0)) * as_matrix(zy, 'zy')


def nuclear_j_update(zy, mu: float) -> np.ndarray:
    return svt(zy, 1.0 / mu)


def e_update_target(x, xz, y1, mu: float) -> np.ndarray:
    """Point whose l21 prox gives the E block: the merged form X - XZ + Y1/mu."""
    return x - xz + y1 / mu


def _ensure_finite(name, value, iteration):
    if not np.all(np.isfinite(value)):
        raise NumericalFailureError(iteration, f'non-finite entries in {name}')


def _validated_adjacency(x) -> np.ndarray:
    a = as_matrix(x, 'x')
    if a.shape[0] != a.shape[1]:
        raise InputError(f'x must be square, got shape {a.shape}')
    if a.shape[0] == 0:
        raise InputError('x is empty')
    if not np.allclose(a, a.T, rtol=0, atol=1e-12):
        raise InputError('x must be symmetric')
    return a


def _solve_alm(x, cfg: SolverConfig, j_update: Callable, method: str, logger) -> SolverResult:
    a = _validated_adjacency(x)
    n = a.shape[0]
    started = time.perf_counter()

    xtx = a.T @ a
    # X is fixed, so (X^T X + I) is factorised once for every Z update
    factor = scipy.linalg.cho_factor(xtx + np.eye(n))

    z = np.zeros((n, n))
    j = np.zeros((n, n))
    e = np.zeros((n, n))
    y1 = np.zeros((n, n))
    y2 = np.zeros((n, n))
    mu = cfg.mu0
    mu_history = [mu]
    converged = False
    residuals = (np.inf, np.inf)

    iteration = 0
    for iteration in range(1, cfg.max_iter + 1):
        j = j_update(z + y2 / mu, mu)
        _ensure_finite('J', j, iteration)

        z = scipy.linalg.cho_solve(factor, xtx - a.T @ e + j + (a.T @ y1 - y2) / mu)
        _ensure_finite('Z', z, iteration)

        xz = a @ z
        e = l21_prox(e_update_target(a, xz, y1, mu), cfg.lam / mu)

        leq1 = a - xz - e
        leq2 = z - j
        residuals = (float(np.max(np.abs(leq1))), float(np.max(np.abs(leq2))))
        if not np.all(np.isfinite(residuals)):
            raise NumericalFailureError(iteration, 'non-finite residual')
        if residuals[0] <= cfg.eps and residuals[1] <= cfg.eps:
            converged = True
            break

        y1 = y1 + mu * leq1
        y2 = y2 + mu * leq2
        mu = min(cfg.rho * mu, cfg.mu_max)
        mu_history.append(mu)

    elapsed = time.perf_counter() - started
    if converged:
        logger.info(f'{method} converged after {iteration} iterations ({elapsed:.3f}s, n={n})')
    else:
        logger.warning(f'{method} stopped at max_iter={cfg.max_iter} with residuals {residuals}')

    return SolverResult(
        z_star=z,
        e_star=e,
        iterations=iteration,
        converged=converged,
        final_residuals=residuals,
        method=method,
        lam=cfg.lam,
        elapsed_s=elapsed,
        mu_history=tuple(mu_history))


def solve_lrr(x, cfg: SolverConfig = SolverConfig(), logger=logging.getLogger()) -> SolverResult:
    return _solve_alm(x, cfg, nuclear_j_update, LRNR, logger)


def solve_lfr(x, cfg: SolverConfig = SolverConfig(), logger=logging.getLogger()) -> SolverResult:
    return _solve_alm(x, cfg, frob_j_update, LFNR, logger)


SOLVERS = {
    LRNR: solve_lrr,
    LFNR: solve_lfr,
}


def solve(x, method: str, cfg: SolverConfig = SolverConfig(), logger=logging.getLogger()) -> SolverResult:
    if method not in SOLVERS:
        raise InputError(f'Unknown solver {method!r}, expected one of {sorted(SOLVERS)}')
    return SOLVERS[method](x, cfg, logger=logger)
