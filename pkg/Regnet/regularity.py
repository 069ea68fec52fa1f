"""Network regularity, reconstruction importance and the regulation loop."""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .error_codes import DegenerateInputError, InputError
from .graph import REGULATION, EdgeSet, Graph, build_graph, perturb
from .kernels import DEFAULT_RREF_TOL, as_matrix, rref_stats
from .solvers import LRNR, SOLVERS, SolverConfig, solve

IRREGULAR, REGULAR, RANDOM = 'irregular', 'regular', 'random'
STRATEGIES = (IRREGULAR, REGULAR, RANDOM)

TRAJECTORY_HEADER = ['step', 'removed_count', 'sigma_r', 'converged']
LINK_IMPORTANCE_HEADER = ['i', 'j', 'link_importance']


@dataclass
class RegularityReport:
    sigma_r: float
    n: int
    r: int
    a: int

    def is_finite(self) -> bool:
        return math.isfinite(self.sigma_r)

    def to_dict(self):
        return {'sigma_r': self.sigma_r, 'n': self.n, 'r': self.r, 'a': self.a}


@dataclass
class ImportanceVector:
    rc: np.ndarray

    def __len__(self):
        return len(self.rc)


@dataclass
class LinkImportanceMap:
    values: Dict[Tuple[int, int], float] = field(default_factory=dict)

    def ascending(self) -> List[Tuple[int, int]]:
        return [p for p, _ in sorted(self.values.items(), key=lambda kv: (kv[1], kv[0]))]

    def descending(self) -> List[Tuple[int, int]]:
        return [p for p, _ in sorted(self.values.items(), key=lambda kv: (-kv[1], kv[0]))]

    def csv_rows(self):
        return [[i, j, self.values[(i, j)]] for i, j in self.ascending()]


@dataclass
class RegularityAnalysis:
    report: RegularityReport
    importance: ImportanceVector
    links: LinkImportanceMap
    method: str = LRNR

    def csv_header(self):
        return LINK_IMPORTANCE_HEADER

    def csv_rows(self):
        return self.links.csv_rows()

    def to_dict(self):
        return {
            'method': self.method,
            'regularity': self.report.to_dict(),
            'node_importance': [float(v) for v in self.importance.rc],
            'link_importance': [{'i': i, 'j': j, 'u': u} for i, j, u in self.links.csv_rows()]
        }


def sigma_from_counts(n: int, r: int, a: int) -> float:
    if r == n:
        return math.inf
    return 1.0 / (math.sqrt((n - r) / n) * math.sqrt(a / (n * r)))


def regularity_sigma(z_star, tol: float = DEFAULT_RREF_TOL) -> RegularityReport:
    """Regularity of a representation matrix; smaller means more regular.

    sigma_r = 1 / (sqrt((n - r) / n) * sqrt(a / (n r))) with r the rank and a the
    nonzero count of the reduced echelon form of Z*. Full rank gives +inf.
    """
    z = as_matrix(z_star, 'z_star')
    if z.shape[0] != z.shape[1]:
        raise InputError(f'z_star must be square, got shape {z.shape}')
    n = z.shape[0]
    r, a = rref_stats(z, tol)
    if r == 0:
        raise DegenerateInputError('regularity is undefined for a zero representation matrix')
    return RegularityReport(sigma_from_counts(n, r, a), n, r, a)


def node_importance(z_star) -> ImportanceVector:
    z = as_matrix(z_star, 'z_star')
    return ImportanceVector(np.mean(np.abs(z), axis=1))


def link_importance(rc: ImportanceVector, g: Graph) -> LinkImportanceMap:
    if len(rc) != g.get_node_count():
        raise InputError(f'importance vector has {len(rc)} entries for {g.get_node_count()} nodes')
    return LinkImportanceMap({(i, j): float(rc.rc[i] * rc.rc[j]) for i, j in g.sorted_edges()})


def analyse(g: Graph, method: str = LRNR, cfg: SolverConfig = SolverConfig(), tol: float = DEFAULT_RREF_TOL,
            logger=logging.getLogger()) -> RegularityAnalysis:
    result = solve(g.adjacency_matrix(), method, cfg, logger=logger)
    rc = node_importance(result.z_star)
    return RegularityAnalysis(regularity_sigma(result.z_star, tol), rc, link_importance(rc, g), method)


def select_links(g: Graph, strategy: str, fraction: float, importance: Optional[LinkImportanceMap] = None,
                 seed: Optional[int] = None) -> EdgeSet:
    """Pick round(fraction * |E|) edges to remove.

    irregular takes the lowest link importance first, regular the highest,
    random a seeded uniform sample.
    """
    if strategy not in STRATEGIES:
        raise InputError(f'Unknown strategy {strategy!r}, expected one of {STRATEGIES}')
    if not 0 <= fraction <= 1:
        raise InputError(f'fraction must lie in [0, 1], got {fraction}')
    count = int(round(fraction * g.edge_count()))
    if strategy == RANDOM:
        edges = g.sorted_edges()
        rng = np.random.default_rng(seed)
        picked = rng.choice(len(edges), size=count, replace=False) if count else []
        return EdgeSet([edges[k] for k in picked], REGULATION)
    if importance is None:
        raise InputError(f'strategy {strategy!r} needs link importances')
    order = importance.ascending() if strategy == IRREGULAR else importance.descending()
    return EdgeSet(order[:count], REGULATION)


@dataclass(frozen=True)
class RegulationConfig:
    solver: str = LRNR
    importance_solver: str = LRNR
    batch_fraction: float = 0.01
    max_remove_fraction: float = 0.12
    tol: float = DEFAULT_RREF_TOL
    solver_cfg: SolverConfig = SolverConfig()

    def __post_init__(self):
        for name in (self.solver, self.importance_solver):
            if name not in SOLVERS:
                raise InputError(f'Unknown solver {name!r}')
        if not 0 < self.batch_fraction <= self.max_remove_fraction <= 1:
            raise InputError('expected 0 < batch_fraction <= max_remove_fraction <= 1, '
                             f'got {self.batch_fraction} and {self.max_remove_fraction}')
        if self.tol <= 0:
            raise InputError(f'tol must be positive, got {self.tol}')


@dataclass
class RegulationStep:
    step: int
    removed: List[Tuple[int, int]]
    sigma_r: float
    converged: bool
    accepted: bool
    snapshot_id: str

    @property
    def removed_count(self) -> int:
        return len(self.removed)

    def to_dict(self):
        return {
            'step': self.step,
            'removed': [list(p) for p in self.removed],
            'sigma_r': self.sigma_r,
            'converged': self.converged,
            'accepted': self.accepted,
            'snapshot_id': self.snapshot_id
        }

    @classmethod
    def from_dict(cls, data):
        return cls(data['step'], [tuple(p) for p in data['removed']], data['sigma_r'],
                   data['converged'], data['accepted'], data['snapshot_id'])


@dataclass
class RegulationTrajectory:
    initial_sigma_r: float
    steps: List[RegulationStep]
    final_graph: Graph

    def removed_edges(self) -> List[Tuple[int, int]]:
        return [p for s in self.steps if s.accepted for p in s.removed]

    def final_sigma_r(self) -> float:
        accepted = [s.sigma_r for s in self.steps if s.accepted]
        return accepted[-1] if accepted else self.initial_sigma_r

    def csv_header(self):
        return TRAJECTORY_HEADER

    def csv_rows(self):
        return [[s.step, s.removed_count, s.sigma_r, s.converged] for s in self.steps]

    def to_dict(self):
        return {
            'initial_sigma_r': self.initial_sigma_r,
            'steps': [s.to_dict() for s in self.steps],
            'final_graph': self.final_graph.to_dict()
        }

    @classmethod
    def from_dict(cls, data):
        final = data['final_graph']
        return cls(data['initial_sigma_r'],
                   [RegulationStep.from_dict(s) for s in data['steps']],
                   build_graph([tuple(e) for e in final['edges']], node_count=final['node_count']))


def sigma_or_inf(z_star, tol) -> float:
    try:
        return regularity_sigma(z_star, tol).sigma_r
    except DegenerateInputError:
        return math.inf


def regulate(g: Graph, cfg: RegulationConfig = RegulationConfig(), logger=logging.getLogger()) -> RegulationTrajectory:
    """Remove the least important links batch by batch while regularity improves.

    Link importances come from one solve on the original graph; every probed
    batch is re-solved and kept only if sigma_r strictly decreases.
    """
    m = g.edge_count()
    if m == 0:
        raise InputError('cannot regulate a graph without edges')

    x = g.adjacency_matrix()
    base = solve(x, cfg.importance_solver, cfg.solver_cfg, logger=logger)
    order = link_importance(node_importance(base.z_star), g).ascending()
    if cfg.solver == cfg.importance_solver:
        base_z = base.z_star
    else:
        base_z = solve(x, cfg.solver, cfg.solver_cfg, logger=logger).z_star
    current_sigma = sigma_or_inf(base_z, cfg.tol)
    initial_sigma = current_sigma
    if not math.isfinite(initial_sigma):
        logger.warning(f'{cfg.solver} gives a full-rank or zero representation of {g} (sigma_r=inf); '
                       'no batch can lower it, try another solver or a larger lambda')

    batch = max(1, int(round(cfg.batch_fraction * m)))
    cap = max(batch, int(round(cfg.max_remove_fraction * m)))
    logger.info(f'Regulating {g}: batch={batch}, cap={cap}, initial sigma_r={initial_sigma:.6g}')

    current = g
    steps: List[RegulationStep] = []
    removed = 0
    while removed < cap and removed < len(order):
        chosen = order[removed:removed + min(batch, cap - removed)]
        candidate = perturb(current, remove=chosen)
        result = solve(candidate.adjacency_matrix(), cfg.solver, cfg.solver_cfg, logger=logger)
        sigma = sigma_or_inf(result.z_star, cfg.tol)
        accepted = result.converged and sigma < current_sigma
        steps.append(RegulationStep(len(steps) + 1, list(chosen), sigma, result.converged,
                                    accepted, candidate.snapshot_id()))
        if not result.converged:
            logger.warning(f'Regulation step {len(steps)} did not converge; stopping')
            break
        if not accepted:
            logger.info(f'Regulation step {len(steps)}: sigma_r {sigma:.6g} >= {current_sigma:.6g}; stopping')
            break
        current = candidate
        current_sigma = sigma
        removed += len(chosen)

    logger.info(f'Regulation finished: removed {removed} links, sigma_r {initial_sigma:.6g} -> {current_sigma:.6g}')
    return RegulationTrajectory(initial_sigma, steps, current)
