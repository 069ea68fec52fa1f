import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .error_codes import InputError
from .kernels import as_matrix
from .solvers import SolverConfig, SolverResult, solve

MISSING_DESC = 'missing-desc'
SPURIOUS_ASC = 'spurious-asc'

RANKED_LINKS_HEADER = ['i', 'j', 'score', 'rank']


@dataclass
class ScoreMatrix:
    entries: np.ndarray
    source: str = ''

    def dimension(self) -> int:
        return self.entries.shape[0]

    def scores_for(self, pairs) -> np.ndarray:
        if len(pairs) == 0:
            return np.zeros(0)
        rows, cols = np.array(pairs, dtype=int).T
        return self.entries[rows, cols]


@dataclass
class RankedLinks:
    pairs: List[Tuple[int, int]] = field(default_factory=list)
    scores: List[float] = field(default_factory=list)
    direction: str = MISSING_DESC

    def __len__(self):
        return len(self.pairs)

    def top(self, l: int) -> List[Tuple[int, int]]:
        return self.pairs[:l]

    def csv_header(self):
        return RANKED_LINKS_HEADER

    def csv_rows(self):
        return [[i, j, s, rank] for rank, ((i, j), s) in enumerate(zip(self.pairs, self.scores), start=1)]

    def to_dict(self):
        return {
            'direction': self.direction,
            'links': [{'i': i, 'j': j, 'score': s, 'rank': rank}
                      for i, j, s, rank in self.csv_rows()]
        }

    @classmethod
    def from_dict(cls, data):
        links = data['links']
        return cls(pairs=[(d['i'], d['j']) for d in links],
                   scores=[d['score'] for d in links],
                   direction=data['direction'])


def score_matrix(x, z_star, source: str = '') -> ScoreMatrix:
    a = as_matrix(x, 'x')
    z = as_matrix(z_star, 'z_star')
    if a.shape[0] != a.shape[1] or a.shape != z.shape:
        raise InputError(f'x {a.shape} and z_star {z.shape} must be square and equal in size')
    xz = a @ z
    return ScoreMatrix(xz + xz.T, source)


def _rank_upper_pairs(sm: ScoreMatrix, x, observed: bool, direction: str) -> RankedLinks:
    a = as_matrix(x, 'x')
    if a.shape != sm.entries.shape:
        raise InputError(f'score matrix {sm.entries.shape} and x {a.shape} differ in size')
    rows, cols = np.triu_indices(sm.dimension(), k=1)
    mask = (a[rows, cols] != 0) if observed else (a[rows, cols] == 0)
    rows, cols = rows[mask], cols[mask]
    scores = sm.entries[rows, cols]
    key = scores if direction == SPURIOUS_ASC else -scores
    # primary key last; ties fall back to lexicographic (i, j)
    order = np.lexsort((cols, rows, key))
    return RankedLinks(
        pairs=[(int(rows[k]), int(cols[k])) for k in order],
        scores=[float(scores[k]) for k in order],
        direction=direction)


def rank_missing(sm: ScoreMatrix, x) -> RankedLinks:
    """Non-observed pairs, highest score first."""
    return _rank_upper_pairs(sm, x, observed=False, direction=MISSING_DESC)


def rank_spurious(sm: ScoreMatrix, x) -> RankedLinks:
    """Observed pairs, lowest score first."""
    return _rank_upper_pairs(sm, x, observed=True, direction=SPURIOUS_ASC)


def reconstruct(x, method: str, cfg: SolverConfig = SolverConfig(), logger=logging.getLogger()) -> Tuple[SolverResult, ScoreMatrix]:
    result = solve(x, method, cfg, logger=logger)
    return result, score_matrix(x, result.z_star, source=f'{method}(lambda={cfg.lam:g})')
