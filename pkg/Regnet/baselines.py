"""Neighbourhood-based link prediction scorers: common neighbours, resource allocation, local path."""
import os
from dataclasses import dataclass

import numpy as np

from .error_codes import InputError
from .graph import Graph
from .reconstruction import ScoreMatrix

CN, RA, LP = 'cn', 'ra', 'lp'
METHODS = (CN, RA, LP)

REGNET_LP_EPSILON = 'REGNET_LP_EPSILON'
DEFAULT_LP_EPSILON = 0.01


@dataclass(frozen=True)
class BaselineSpec:
    method: str = CN
    epsilon: float = DEFAULT_LP_EPSILON

    def __post_init__(self):
        if self.method not in METHODS:
            raise InputError(f'Unknown baseline {self.method!r}, expected one of {METHODS}')
        if self.epsilon < 0:
            raise InputError(f'LP epsilon must be non-negative, got {self.epsilon}')

    @classmethod
    def from_env(cls, method, epsilon=None):
        if epsilon is None:
            epsilon = float(os.environ.get(REGNET_LP_EPSILON, DEFAULT_LP_EPSILON))
        return cls(method, epsilon)

    def label(self):
        return f'lp(epsilon={self.epsilon:g})' if self.method == LP else self.method


def common_neighbours(a: np.ndarray) -> np.ndarray:
    return a @ a


def resource_allocation(a: np.ndarray) -> np.ndarray:
    deg = a.sum(axis=0)
    inv = np.zeros_like(deg)
    np.divide(1.0, deg, out=inv, where=deg > 0)
    return (a * inv) @ a


def local_path(a: np.ndarray, epsilon: float) -> np.ndarray:
    a2 = a @ a
    return a2 + epsilon * (a2 @ a)


def baseline_scores(g: Graph, spec: BaselineSpec = BaselineSpec()) -> ScoreMatrix:
    if g.get_node_count() == 0:
        raise InputError('baseline scores need at least one node')
    a = g.adjacency_matrix()
    if spec.method == CN:
        scores = common_neighbours(a)
    elif spec.method == RA:
        scores = resource_allocation(a)
    else:
        scores = local_path(a, spec.epsilon)
    np.fill_diagonal(scores, 0.0)
    return ScoreMatrix(scores, spec.label())
