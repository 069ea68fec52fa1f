from dotenv import load_dotenv
import logging
import math
import numpy as np
import pytest

from Regnet.error_codes import DegenerateInputError, InputError
from Regnet.graph import build_graph, perturb, stochastic_block_model
from Regnet.regularity import (IRREGULAR, RANDOM, REGULAR, ImportanceVector, RegulationConfig, RegulationTrajectory,
                               analyse, link_importance, node_importance, regularity_sigma, regulate, select_links,
                               sigma_from_counts)
from Regnet.solvers import LFNR, LRNR, SolverConfig, solve

load_dotenv('.env.test')
logging.basicConfig(level=logging.INFO)

NOISE = [(0, 25), (3, 31), (7, 22), (11, 38), (14, 27)]


def noisy_two_blocks():
    """40-node two-block graph with a handful of injected cross-block links."""
    g = stochastic_block_model([20, 20], 0.5, 0.0, seed=2)
    return perturb(g, add=[(i, j) for i, j in NOISE if not g.has_edge(i, j)])


def grid_3x3():
    # node a * 3 + b sits at row a, column b; index 4 is the centre
    edges = [(a * 3 + b, a * 3 + b + 1) for a in range(3) for b in range(2)]
    edges += [(a * 3 + b, (a + 1) * 3 + b) for a in range(2) for b in range(3)]
    return build_graph(edges)


def test_sigma_from_counts():
    assert sigma_from_counts(4, 2, 4) == pytest.approx(2.0)
    assert sigma_from_counts(10, 5, 10) == pytest.approx(3.1623, abs=1e-4)
    assert math.isinf(sigma_from_counts(6, 6, 6))


def test_regularity_sigma_on_block_matrix():
    # rank 2, reduced echelon form has 4 nonzeros
    z = np.array([[1.0, 1.0, 0.0, 0.0],
                  [1.0, 1.0, 0.0, 0.0],
                  [0.0, 0.0, 1.0, 1.0],
                  [0.0, 0.0, 1.0, 1.0]])
    report = regularity_sigma(z)
    assert (report.n, report.r, report.a) == (4, 2, 4)
    assert report.sigma_r == pytest.approx(2.0)


def test_full_rank_is_infinitely_irregular():
    assert not regularity_sigma(np.eye(5)).is_finite()


def test_zero_representation_is_degenerate():
    with pytest.raises(DegenerateInputError):
        regularity_sigma(np.zeros((3, 3)))


def test_node_importance_is_row_mean_of_magnitudes():
    z = np.array([[0.5, -0.5, 0.0, 1.0],
                  [0.0, 0.0, 0.0, 0.0],
                  [1.0, 1.0, 1.0, 1.0],
                  [0.0, 0.0, 0.0, 0.0]])
    rc = node_importance(z).rc
    assert rc[0] == pytest.approx(0.5)
    assert rc[1] == 0
    assert rc[2] == pytest.approx(1.0)


def test_node_importance_follows_relabelling():
    rng = np.random.default_rng(5)
    z = rng.normal(size=(8, 8))
    perm = rng.permutation(8)
    assert np.allclose(node_importance(z[np.ix_(perm, perm)]).rc, node_importance(z).rc[perm], atol=1e-12)


@pytest.mark.parametrize('method', [LRNR, LFNR])
def test_grid_centre_outranks_corners(method):
    # the centre helps represent its four neighbours, a corner only two
    z = solve(grid_3x3().adjacency_matrix(), method, SolverConfig(lam=100.0)).z_star
    rc = node_importance(z).rc
    for corner in (0, 2, 6, 8):
        assert rc[4] > rc[corner] + 0.01


def test_link_importance_product():
    g = build_graph([(0, 1)])
    assert link_importance(ImportanceVector(np.array([0.2, 0.5])), g).values == {(0, 1): pytest.approx(0.1)}


def test_link_importance_zero_absorbs(triangle):
    links = link_importance(ImportanceVector(np.array([0.0, 2.0, 3.0])), triangle)
    assert links.values[(0, 1)] == 0
    assert links.values[(0, 2)] == 0


def test_link_importance_ordering(triangle):
    links = link_importance(ImportanceVector(np.array([1.0, 2.0, 3.0])), triangle)
    assert links.ascending() == [(0, 1), (0, 2), (1, 2)]
    assert links.descending() == [(1, 2), (0, 2), (0, 1)]


def test_link_importance_size_mismatch(triangle):
    with pytest.raises(InputError):
        link_importance(ImportanceVector(np.array([1.0, 2.0])), triangle)


def test_analyse_reports_every_edge(two_block_sbm):
    analysis = analyse(two_block_sbm, LRNR, SolverConfig(lam=1.0))
    assert len(analysis.importance) == 20
    assert set(analysis.links.values) == two_block_sbm.get_edges()
    assert analysis.report.r <= analysis.report.a
    assert [row[:2] for row in analysis.csv_rows()] == [list(p) for p in analysis.links.ascending()]


def test_select_links_strategies(triangle):
    links = link_importance(ImportanceVector(np.array([1.0, 2.0, 3.0])), triangle)
    assert list(select_links(triangle, IRREGULAR, 0.34, links)) == [(0, 1)]
    assert list(select_links(triangle, REGULAR, 0.34, links)) == [(1, 2)]
    picked = select_links(triangle, RANDOM, 0.67, seed=4)
    assert len(picked) == 2
    assert picked == select_links(triangle, RANDOM, 0.67, seed=4)
    assert picked.as_set() <= triangle.get_edges()


def test_select_links_needs_importance(triangle):
    with pytest.raises(InputError):
        select_links(triangle, IRREGULAR, 0.5)
    with pytest.raises(InputError):
        select_links(triangle, 'greedy', 0.5)


def test_regulation_config_validation():
    with pytest.raises(InputError):
        RegulationConfig(batch_fraction=0.2, max_remove_fraction=0.1)
    with pytest.raises(InputError):
        RegulationConfig(solver='svd')


def test_regulate_single_batch_cap(two_block_sbm):
    cfg = RegulationConfig(solver=LRNR, batch_fraction=0.01, max_remove_fraction=0.01)
    trajectory = regulate(two_block_sbm, cfg)
    assert len(trajectory.steps) <= 1
    assert len(trajectory.removed_edges()) <= 1


def test_regulate_trajectory_invariants():
    noisy = noisy_two_blocks()
    cfg = RegulationConfig(solver=LRNR, importance_solver=LRNR, batch_fraction=0.02, max_remove_fraction=0.12)
    trajectory = regulate(noisy, cfg)

    assert trajectory.final_sigma_r() < trajectory.initial_sigma_r
    accepted = [s for s in trajectory.steps if s.accepted]
    sigmas = [trajectory.initial_sigma_r] + [s.sigma_r for s in accepted]
    assert all(b < a for a, b in zip(sigmas, sigmas[1:]))
    assert trajectory.final_graph.get_edges() == noisy.get_edges() - set(trajectory.removed_edges())
    assert len(trajectory.removed_edges()) <= int(round(0.12 * noisy.edge_count()))
    # only the last probed step may be rejected
    assert all(s.accepted for s in trajectory.steps[:-1])


def test_regulate_default_config_removes_noise():
    noisy = noisy_two_blocks()
    trajectory = regulate(noisy)
    assert RegulationConfig().solver == LRNR
    assert len(trajectory.removed_edges()) >= 1
    assert trajectory.final_sigma_r() < trajectory.initial_sigma_r


def test_regulate_stops_after_one_step_when_removal_hurts():
    # a 4-cycle has a rank-2 representation; dropping any edge leaves a full-rank path
    cycle = build_graph([(0, 1), (1, 2), (2, 3), (0, 3)])
    cfg = RegulationConfig(batch_fraction=0.25, max_remove_fraction=0.5, solver_cfg=SolverConfig(lam=100.0))
    trajectory = regulate(cycle, cfg)
    assert math.isfinite(trajectory.initial_sigma_r)
    assert len(trajectory.steps) == 1
    assert not trajectory.steps[0].accepted
    assert trajectory.removed_edges() == []
    assert trajectory.final_graph == cycle
    assert trajectory.final_sigma_r() == trajectory.initial_sigma_r


def test_regulate_empty_graph_is_rejected():
    with pytest.raises(InputError):
        regulate(build_graph([], node_count=3))


def test_trajectory_dict_round_trip(two_block_sbm):
    cfg = RegulationConfig(solver=LRNR, batch_fraction=0.05, max_remove_fraction=0.1)
    trajectory = regulate(two_block_sbm, cfg)
    again = RegulationTrajectory.from_dict(trajectory.to_dict())
    assert again.final_graph == trajectory.final_graph
    assert again.steps == trajectory.steps
