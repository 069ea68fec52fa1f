from dotenv import load_dotenv
import logging
import networkx as nx
import numpy as np
import pytest

from Regnet.error_codes import InputError
from Regnet.evaluation import (ExperimentReport, accuracy_at_l, auc, make_observed, regularity_accuracy_correlation,
                               run_experiment, run_regulation_sweep)
from Regnet.graph import build_graph, from_networkx, perturb, stochastic_block_model
from Regnet.io_helper import JSON, render_report
from Regnet.reconstruction import RankedLinks, ScoreMatrix, rank_missing, reconstruct
from Regnet.run_manager import RunManager
from Regnet.solvers import LFNR

load_dotenv('.env.test')
logging.basicConfig(level=logging.INFO)

KARATE = 'karate'
NOISE = [(0, 25), (3, 31), (7, 22), (11, 38), (14, 27), (2, 36), (5, 20), (9, 33), (16, 29), (18, 24)]


def scores_on_pairs(values):
    n = 1 + max(max(p) for p in values)
    entries = np.zeros((n, n))
    for (i, j), s in values.items():
        entries[i, j] = entries[j, i] = s
    return ScoreMatrix(entries)


def test_make_observed_rounding():
    g = build_graph([(i, i + 1) for i in range(50)])
    split = make_observed(g, 0.1, 0.0, seed=1)
    assert g.edge_count() == 50
    assert len(split.missing) == 5
    assert len(split.spurious) == 0
    assert split.observed.edge_count() == 45


def test_make_observed_is_deterministic(two_block_sbm):
    a = make_observed(two_block_sbm, 0.1, 0.1, seed=9)
    b = make_observed(two_block_sbm, 0.1, 0.1, seed=9)
    assert a.missing == b.missing
    assert a.spurious == b.spurious
    assert a.observed == b.observed


def test_make_observed_membership():
    g = from_networkx(nx.karate_club_graph())
    split = make_observed(g, 0.1, 0.1, seed=0)
    observed = split.observed.get_edges()
    assert not (split.missing.as_set() & observed)
    assert split.spurious.as_set() <= observed
    assert split.missing.as_set() <= g.get_edges()
    assert not (split.spurious.as_set() & g.get_edges())


def test_make_observed_preconditions(triangle):
    with pytest.raises(InputError):
        make_observed(triangle, 0.0, 0.5, seed=0)
    with pytest.raises(InputError):
        make_observed(triangle, 1.0, 0.0, seed=0)


def test_auc_perfect_and_ties():
    sm = scores_on_pairs({(0, 1): 0.9, (0, 2): 0.8, (1, 2): 0.1, (2, 3): 0.2})
    assert auc(sm, [(0, 1), (0, 2)], [(1, 2), (2, 3)]).auc == 1.0
    flat = ScoreMatrix(np.ones((4, 4)))
    assert auc(flat, [(0, 1)], [(1, 2), (2, 3)]).auc == 0.5


def test_auc_brute_force_value():
    sm = scores_on_pairs({(0, 1): 0.9, (0, 2): 0.4, (1, 2): 0.5, (1, 3): 0.3, (2, 3): 0.1})
    result = auc(sm, [(0, 1), (0, 2)], [(1, 2), (1, 3), (2, 3)])
    assert result.auc == pytest.approx(5 / 6)
    assert result.n_comparisons == 6


def test_auc_lower_is_better_flips():
    sm = scores_on_pairs({(0, 1): 0.9, (0, 2): 0.4, (1, 2): 0.5, (1, 3): 0.3, (2, 3): 0.1})
    result = auc(sm, [(0, 1), (0, 2)], [(1, 2), (1, 3), (2, 3)], higher_is_better=False)
    assert result.auc == pytest.approx(1 / 6)


def test_sampled_auc_converges_to_exhaustive():
    rng = np.random.default_rng(5)
    entries = rng.normal(size=(30, 30))
    sm = ScoreMatrix(entries + entries.T)
    pairs = [(i, j) for i in range(30) for j in range(i + 1, 30)]
    positives, negatives = pairs[:60], pairs[60:]
    exact = auc(sm, positives, negatives).auc
    sampled = auc(sm, positives, negatives, mode='sampled', n=100000, seed=3)
    assert abs(sampled.auc - exact) <= 0.02
    assert sampled.n_comparisons == 100000


def test_auc_rejects_bad_sides():
    sm = ScoreMatrix(np.zeros((3, 3)))
    with pytest.raises(InputError):
        auc(sm, [], [(0, 1)])
    with pytest.raises(InputError):
        auc(sm, [(0, 1)], [(0, 1)])
    with pytest.raises(InputError):
        auc(sm, [(0, 1)], [(1, 2)], mode='sampled')


def test_accuracy_at_l():
    ranked = RankedLinks([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)], [5, 4, 3, 2, 1])
    assert accuracy_at_l(ranked, [(0, 2), (1, 3), (0, 3)], l=4).accuracy == pytest.approx(0.5)
    assert accuracy_at_l(ranked, [(0, 1), (0, 2)]).accuracy == 1.0
    with pytest.raises(InputError):
        accuracy_at_l(ranked, [(0, 1)], l=6)


def test_accuracy_matches_recount(two_block_sbm):
    split = make_observed(two_block_sbm, 0.1, 0.0, seed=2)
    x = split.observed.adjacency_matrix()
    _, sm = reconstruct(x, LFNR)
    ranked = rank_missing(sm, x)
    probe = split.missing.as_set()
    recount = len(set(ranked.pairs[:len(probe)]) & probe) / len(probe)
    assert accuracy_at_l(ranked, split.missing).accuracy == recount


def test_single_run_single_cell():
    report = run_experiment({'source': KARATE, 'methods': ['cn'], 'runs': 1, 'miss_fraction': 0.1},
                            manager=RunManager(1))
    assert len(report.rows) == 1
    assert report.rows[0]['seed'] == 0
    assert len(report.aggregates) == 1
    assert report.aggregate('cn', 'missing')['auc_std'] == 0.0
    assert report.aggregate('cn', 'missing')['runtime_s'] is None


def test_experiment_is_reproducible():
    config = {'source': KARATE, 'methods': ['cn', 'ra', 'lp'], 'runs': 4, 'seed': 7,
              'miss_fraction': 0.1, 'spur_fraction': 0.1}
    first = render_report(run_experiment(config, manager=RunManager(3)), JSON)
    second = render_report(run_experiment(config, manager=RunManager(1)), JSON)
    assert first == second


def test_experiment_report_round_trip():
    report = run_experiment({'source': KARATE, 'methods': ['ra'], 'runs': 2, 'seeds': [3, 11]})
    assert ExperimentReport.from_dict(report.to_dict()) == report
    assert [r['seed'] for r in report.rows] == [3, 11]


def test_experiment_config_errors():
    with pytest.raises(InputError):
        run_experiment({'source': KARATE})
    with pytest.raises(InputError):
        run_experiment({'source': KARATE, 'methods': ['cn'], 'runs': 2, 'seeds': [1]})


def test_correlation_needs_three_finite_points():
    variants = [{'strategy': 'irregular', 'fraction': f, 'sigma_r': s, 'accuracy_mean': a}
                for f, s, a in [(0.01, 1.0, 0.5), (0.02, 2.0, 0.4), (0.03, float('inf'), 0.3)]]
    assert regularity_accuracy_correlation(variants) is None
    variants.append({'strategy': 'irregular', 'fraction': 0.04, 'sigma_r': 3.0, 'accuracy_mean': 0.2})
    assert regularity_accuracy_correlation(variants) == pytest.approx(-1.0)
    # the unperturbed row is a reference point, not part of the trend
    variants.append({'strategy': 'irregular', 'fraction': 0.0, 'sigma_r': 0.5, 'accuracy_mean': 0.1})
    assert regularity_accuracy_correlation(variants) == pytest.approx(-1.0)


@pytest.mark.slow
def test_regulation_sweep_shape():
    g = stochastic_block_model([10, 10], 0.7, 0.05, seed=4)
    config = {'source': 'sbm', 'methods': ['cn', 'ra'], 'strategies': ['irregular', 'random'],
              'fractions': [0.05, 0.1], 'runs': 2}
    report = run_regulation_sweep(config, graph=g)
    assert [(v['strategy'], v['fraction']) for v in report.variants] == \
        [('irregular', 0.0), ('irregular', 0.05), ('irregular', 0.1),
         ('random', 0.0), ('random', 0.05), ('random', 0.1)]
    assert report.variant('random', 0.1)['removed_count'] == int(round(0.1 * g.edge_count()))

    baseline = report.variant('irregular', 0.0)
    assert baseline['removed_count'] == 0
    assert {k: v for k, v in report.variant('random', 0.0).items() if k != 'strategy'} == \
        {k: v for k, v in baseline.items() if k != 'strategy'}
    for v in report.variants:
        by_method = v['by_method']
        assert set(by_method) == {'cn', 'ra'}
        assert v['accuracy_mean'] == pytest.approx(
            (by_method['cn']['accuracy_mean'] + by_method['ra']['accuracy_mean']) / 2)

    assert report.csv_header()[-2:] == ['accuracy_mean_cn', 'accuracy_mean_ra']
    assert len(report.csv_rows()) == 6
    assert all(len(row) == len(report.csv_header()) for row in report.csv_rows())


def test_sweep_rejects_split_that_empties():
    g = build_graph([(0, 1), (1, 2), (2, 3), (3, 0)])
    with pytest.raises(InputError):
        run_regulation_sweep({'source': 'ring', 'methods': ['cn'], 'fractions': [0.25], 'probe_fraction': 0.1}, graph=g)


def test_split_must_select_links():
    g = build_graph([(0, 1), (1, 2), (2, 3), (3, 0)])
    with pytest.raises(InputError) as e:
        make_observed(g, 0.1, 0.0, seed=0)
    assert 'miss_fraction=0.1' in str(e.value)
    assert '4 edges' in str(e.value)
    with pytest.raises(InputError):
        make_observed(g, 0.0, 0.1, seed=0)
    assert len(make_observed(g, 0.25, 0.0, seed=0).missing) == 1


def test_experiment_checks_split_before_scheduling(triangle):
    manager = RunManager(1)
    with pytest.raises(InputError):
        run_experiment({'source': 'triangle', 'methods': ['cn'], 'miss_fraction': 0.1}, graph=triangle, manager=manager)
    assert manager.runs_info() == {'active': {}, 'old': {}}
    assert manager.wait() == {}


def noisy_modules():
    """Two 20-node modules with ten injected cross-module links (about 5% of |E|)."""
    g = stochastic_block_model([20, 20], 0.5, 0.0, seed=2)
    return perturb(g, add=[p for p in NOISE if not g.has_edge(*p)])


@pytest.mark.slow
def test_missing_and_spurious_tasks_on_two_blocks():
    g = stochastic_block_model([32, 32], 0.5, 0.05, seed=1)
    report = run_experiment({'source': 'sbm', 'methods': ['cn', 'ra', 'lrnr', 'lfnr'], 'runs': 20,
                             'miss_fraction': 0.1, 'spur_fraction': 0.1}, graph=g)
    for method in ('lrnr', 'lfnr'):
        missing = report.aggregate(method, 'missing')
        assert missing['auc_mean'] >= 0.70
        assert missing['auc_mean'] - 2 * missing['auc_std'] > 0.55
    assert report.aggregate('lfnr', 'missing')['auc_mean'] >= report.aggregate('cn', 'missing')['auc_mean'] - 0.05
    assert report.aggregate('lfnr', 'spurious')['auc_mean'] >= 0.65


@pytest.mark.slow
def test_irregular_removal_tracks_regularity():
    g = noisy_modules()
    config = {'source': 'sbm', 'methods': ['lrnr', 'lfnr'], 'strategies': ['irregular', 'random'],
              'runs': 20, 'lambda': 0.1, 'regularity_solver': 'lrnr', 'importance_solver': 'lrnr'}
    report = run_regulation_sweep(config, graph=g)

    baseline = report.variant('irregular', 0.0)['accuracy_mean']
    irregular = [report.variant('irregular', k / 100)['accuracy_mean'] for k in range(1, 13)]
    assert max(irregular) >= baseline
    assert report.variant('random', 0.12)['accuracy_mean'] <= report.variant('random', 0.01)['accuracy_mean']

    logging.info(f'sigma_r / accuracy correlation over irregular removals: {report.correlation}')
    assert report.correlation is not None
    assert report.correlation <= -0.5
