import hashlib
from numbers import Integral
from typing import FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx
import numpy as np

from .error_codes import InputError

Pair = Tuple[int, int]

TRAINING, MISSING, SPURIOUS, PROBE, REGULATION = 'training', 'missing', 'spurious', 'probe', 'regulation'
EDGE_ROLES = (TRAINING, MISSING, SPURIOUS, PROBE, REGULATION)


def canonical(i, j) -> Pair:
    i, j = int(i), int(j)
    return (i, j) if i < j else (j, i)


def _check_index(value):
    if not isinstance(value, Integral) or isinstance(value, bool):
        raise InputError(f'Node index {value!r} is not an integer')
    if value < 0:
        raise InputError(f'Negative node index {value}')
    return int(value)


class Graph():
    """Undirected simple graph over nodes 0..node_count-1.

    Instances are immutable; use build_graph() to create one from raw pairs.
    """

    def __init__(self, node_count: int, edges: Iterable[Pair]):
        self.__node_count = int(node_count)
        self.__edges: FrozenSet[Pair] = frozenset(edges)

    def get_node_count(self) -> int:
        return self.__node_count

    def get_edges(self) -> FrozenSet[Pair]:
        return self.__edges

    def edge_count(self) -> int:
        return len(self.__edges)

    def sorted_edges(self) -> List[Pair]:
        return sorted(self.__edges)

    def has_edge(self, i, j) -> bool:
        return canonical(i, j) in self.__edges

    def adjacency_matrix(self) -> np.ndarray:
        n = self.__node_count
        a = np.zeros((n, n))
        if self.__edges:
            rows, cols = np.array(self.sorted_edges()).T
            a[rows, cols] = 1.0
            a[cols, rows] = 1.0
        return a

    def non_edges(self) -> List[Pair]:
        n = self.__node_count
        return [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in self.__edges]

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.__node_count, dtype=int)
        for i, j in self.__edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def snapshot_id(self) -> str:
        digest = hashlib.sha1(f'{self.__node_count}:{self.sorted_edges()}'.encode())
        return digest.hexdigest()[:12]

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.__node_count))
        g.add_edges_from(self.sorted_edges())
        return g

    def to_dict(self):
        return {
            'node_count': self.__node_count,
            'edges': [list(e) for e in self.sorted_edges()]
        }

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and \
            self.__node_count == other.get_node_count() and \
            self.__edges == other.get_edges()

    def __hash__(self):
        return hash((self.__node_count, self.__edges))

    def __repr__(self) -> str:
        return f'<Graph n={self.__node_count} m={len(self.__edges)}>'


class EdgeSet():
    """Ordered, duplicate-free list of canonical pairs tagged with a role."""

    def __init__(self, pairs: Iterable[Pair] = (), role: str = PROBE):
        if role not in EDGE_ROLES:
            raise InputError(f'Unknown edge role {role!r}')
        ordered = []
        seen = set()
        for i, j in pairs:
            p = canonical(_check_index(i), _check_index(j))
            if p not in seen:
                seen.add(p)
                ordered.append(p)
        self.__pairs: Tuple[Pair, ...] = tuple(ordered)
        self.__members = frozenset(seen)
        self.__role = role

    def get_pairs(self) -> Tuple[Pair, ...]:
        return self.__pairs

    def get_role(self) -> str:
        return self.__role

    def as_set(self) -> FrozenSet[Pair]:
        return self.__members

    def __contains__(self, pair) -> bool:
        return canonical(*pair) in self.__members

    def __iter__(self):
        return iter(self.__pairs)

    def __len__(self) -> int:
        return len(self.__pairs)

    def __eq__(self, other) -> bool:
        return isinstance(other, EdgeSet) and self.__pairs == other.get_pairs() and self.__role == other.get_role()

    def __repr__(self) -> str:
        return f'<EdgeSet {self.__role} size={len(self.__pairs)}>'


def build_graph(edge_pairs: Iterable[Pair], node_count: Optional[int] = None) -> Graph:
    if node_count is not None:
        node_count = _check_index(node_count)
    edges = set()
    max_index = -1
    for pair in edge_pairs:
        i, j = (_check_index(v) for v in pair)
        if node_count is not None and max(i, j) >= node_count:
            raise InputError(f'Node index {max(i, j)} out of range for node_count={node_count}')
        max_index = max(max_index, i, j)
        if i != j:
            edges.add(canonical(i, j))
    return Graph(node_count if node_count is not None else max_index + 1, edges)


def _as_pairs(edges) -> List[Pair]:
    if edges is None:
        return []
    return [canonical(_check_index(i), _check_index(j)) for i, j in edges]


def perturb(g: Graph, remove=None, add=None) -> Graph:
    to_remove = _as_pairs(remove)
    to_add = _as_pairs(add)
    current = g.get_edges()
    absent = [p for p in to_remove if p not in current]
    if absent:
        raise InputError(f'Cannot remove edges not present in the graph: {absent[:5]}')
    present = [p for p in to_add if p in current]
    if present:
        raise InputError(f'Cannot add edges already present in the graph: {present[:5]}')
    loops = [p for p in to_add if p[0] == p[1]]
    if loops:
        raise InputError(f'Cannot add self-loops: {loops[:5]}')
    out_of_range = [p for p in to_add if p[1] >= g.get_node_count()]
    if out_of_range:
        raise InputError(f'Added edges reference unknown nodes: {out_of_range[:5]}')
    return Graph(g.get_node_count(), (current - set(to_remove)) | set(to_add))


def from_networkx(nx_graph: nx.Graph) -> Graph:
    relabelled = nx.convert_node_labels_to_integers(nx.Graph(nx_graph), ordering='sorted')
    return build_graph(relabelled.edges(), node_count=relabelled.number_of_nodes())


def stochastic_block_model(sizes, p_in: float, p_out: float, seed: Optional[int] = None) -> Graph:
    """Planted-partition graph: blocks of the given sizes, density p_in inside, p_out across."""
    k = len(sizes)
    probs = [[p_in if a == b else p_out for b in range(k)] for a in range(k)]
    sbm = nx.stochastic_block_model(list(sizes), probs, seed=seed)
    return build_graph(sbm.edges(), node_count=int(sum(sizes)))
