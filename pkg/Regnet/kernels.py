"""Dense matrix primitives used by the ALM solvers and the regularity metric."""
import os
from typing import Tuple

import numpy as np
import scipy.linalg

from .error_codes import InputError

DEFAULT_RREF_TOL = 1e-6
REGNET_RREF_TOL = 'REGNET_RREF_TOL'


def rref_tol_from_env(tol=None) -> float:
    if tol is not None:
        return tol
    return float(os.environ.get(REGNET_RREF_TOL, DEFAULT_RREF_TOL))


def as_matrix(m, name='matrix') -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise InputError(f'{name} must be two-dimensional, got shape {a.shape}')
    if not np.all(np.isfinite(a)):
        raise InputError(f'{name} contains non-finite entries')
    return a


def _svd(m):
    try:
        return scipy.linalg.svd(m, full_matrices=False, check_finite=False)
    except np.linalg.LinAlgError:
        # gesdd occasionally fails to converge on near-degenerate spectra
        return scipy.linalg.svd(m, full_matrices=False, check_finite=False, lapack_driver='gesvd')


def soft_threshold(values, tau):
    return np.maximum(values - tau, 0.0)


def svt(m, tau: float) -> np.ndarray:
    """Singular value thresholding, the proximal map of tau * nuclear norm.

    Returns U diag(max(s - tau, 0)) V^T for the thin SVD m = U diag(s) V^T.
    """
    if tau < 0:
        raise InputError(f'svt threshold must be non-negative, got {tau}')
    a = as_matrix(m)
    if a.size == 0:
        return a.copy()
    u, s, vt = _svd(a)
    return (u * soft_threshold(s, tau)) @ vt


def l21_norm(m) -> float:
    return float(np.sum(np.linalg.norm(m, axis=0)))


def l21_prox(psi, tau: float) -> np.ndarray:
    """Column-wise shrinkage, the proximal map of tau * ||.||_{2,1}.

    Columns with norm <= tau are zeroed; the others are scaled by (norm - tau) / norm.
    """
    if tau < 0:
        raise InputError(f'l21_prox threshold must be non-negative, got {tau}')
    a = as_matrix(psi)
    norms = np.linalg.norm(a, axis=0)
    keep = norms > tau
    scale = np.zeros_like(norms)
    scale[keep] = (norms[keep] - tau) / norms[keep]
    return a * scale


def rref(m, tol: float = DEFAULT_RREF_TOL) -> Tuple[np.ndarray, list]:
    """Reduced row echelon form by Gauss-Jordan elimination with partial pivoting.

    Entries with magnitude <= tol * max|m| are treated as zero. Returns the
    reduced matrix and the list of pivot columns.
    """
    if tol <= 0:
        raise InputError(f'rref tolerance must be positive, got {tol}')
    a = as_matrix(m).copy()
    if a.size == 0:
        raise InputError('rref of an empty matrix is undefined')
    rows, cols = a.shape
    threshold = tol * np.max(np.abs(a))
    pivots = []
    if threshold == 0:
        return np.zeros_like(a), pivots
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r + int(np.argmax(np.abs(a[r:, c])))
        if abs(a[p, c]) <= threshold:
            a[r:, c] = 0.0
            continue
        if p != r:
            a[[r, p]] = a[[p, r]]
        a[r] /= a[r, c]
        others = np.arange(rows) != r
        a[others] -= np.outer(a[others, c], a[r])
        a[others, c] = 0.0
        pivots.append(c)
        r += 1
    a[np.abs(a) <= threshold] = 0.0
    for row, c in enumerate(pivots):
        a[row, c] = 1.0
    return a, pivots


def rref_stats(m, tol: float = DEFAULT_RREF_TOL) -> Tuple[int, int]:
    """(rank, nnz) of the reduced echelon form of m.

    Pivot entries always count towards nnz, so nnz >= rank.
    """
    reduced, pivots = rref(m, tol)
    return len(pivots), int(np.count_nonzero(reduced))


def svd_rank(m, tol: float = DEFAULT_RREF_TOL) -> int:
    a = as_matrix(m)
    if a.size == 0:
        return 0
    s = scipy.linalg.svdvals(a, check_finite=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))
