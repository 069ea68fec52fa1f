import numpy as np
import pytest

from Regnet.graph import build_graph, stochastic_block_model


@pytest.fixture
def triangle():
    return build_graph([(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def path4():
    return build_graph([(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def clique_minus_edge():
    # 4-clique over 0..3 without (0, 1), padded with two isolated nodes
    edges = [(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    return build_graph(edges, node_count=6)


@pytest.fixture
def two_block_sbm():
    return stochastic_block_model([10, 10], 0.8, 0.05, seed=3)


@pytest.fixture
def twin_neighbourhoods():
    """10 nodes where 3 and 7 share exactly the same neighbours."""
    rng = np.random.default_rng(11)
    a = np.triu((rng.random((10, 10)) < 0.35).astype(float), 1)
    a = a + a.T
    a[3, :] = 0
    a[:, 3] = 0
    a[7, :] = 0
    a[:, 7] = 0
    for k in (0, 1, 5, 8):
        a[3, k] = a[k, 3] = 1
        a[7, k] = a[k, 7] = 1
    return a
