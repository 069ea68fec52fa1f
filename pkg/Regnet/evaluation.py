"""Probe splits, AUC / Accuracy and the multi-run experiment drivers."""
import copy
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.stats

from .baselines import BaselineSpec, baseline_scores
from .datasets import resolve_graph_source
from .error_codes import InputError
from .graph import MISSING, SPURIOUS, EdgeSet, Graph, perturb
from .helpers import run_seeds, validate_experiment_config, validate_sweep_config
from .reconstruction import RankedLinks, ScoreMatrix, rank_missing, rank_spurious, reconstruct
from .regularity import IRREGULAR, link_importance, node_importance, select_links, sigma_or_inf
from .run_manager import RunManager
from .solvers import SOLVERS, SolverConfig, solve

EXHAUSTIVE, SAMPLED = 'exhaustive', 'sampled'
TOP_L = 'top-l'
MISSING_TASK, SPURIOUS_TASK = 'missing', 'spurious'
AUC, ACCURACY = 'auc', 'accuracy'

EXPERIMENT_HEADER = ['method', 'task', 'metric', 'fraction', 'mean', 'std', 'runtime_s']
SWEEP_HEADER = ['strategy', 'fraction', 'removed_count', 'sigma_r',
                'accuracy_mean', 'accuracy_std', 'auc_mean', 'auc_std']


@dataclass
class EvalSplit:
    original: Graph
    observed: Graph
    missing: EdgeSet
    spurious: EdgeSet
    seed: int


@dataclass
class MetricResult:
    auc: Optional[float] = None
    accuracy: Optional[float] = None
    n_comparisons: int = 0
    mode: str = EXHAUSTIVE


def _sample(rng, population, count):
    if count == 0:
        return []
    return [population[k] for k in rng.choice(len(population), size=count, replace=False)]


def split_counts(m: int, miss_fraction: float, spur_fraction: float) -> Tuple[int, int]:
    """Links hidden and injected for a graph with m edges; a positive fraction must select at least one."""
    for name, value in (('miss_fraction', miss_fraction), ('spur_fraction', spur_fraction)):
        if not 0 <= value < 1:
            raise InputError(f'{name} must lie in [0, 1), got {value}')
    if m == 0:
        raise InputError('cannot build a probe split for a graph without edges')
    counts = int(round(miss_fraction * m)), int(round(spur_fraction * m))
    for name, value, count in (('miss_fraction', miss_fraction, counts[0]), ('spur_fraction', spur_fraction, counts[1])):
        if value > 0 and count == 0:
            raise InputError(f'{name}={value:g} selects no links on a graph with {m} edges; '
                             f'use a value above {0.5 / m:.3g}')
    return counts


def make_observed(g: Graph, miss_fraction: float, spur_fraction: float, seed: int) -> EvalSplit:
    """Hide round(miss_fraction |E|) links and inject round(spur_fraction |E|) non-links."""
    n_miss, n_spur = split_counts(g.edge_count(), miss_fraction, spur_fraction)
    non_edges = g.non_edges() if n_spur else []
    if n_spur > len(non_edges):
        raise InputError(f'{n_spur} spurious links requested but only {len(non_edges)} non-edges exist')

    rng = np.random.default_rng(seed)
    missing = EdgeSet(_sample(rng, g.sorted_edges(), n_miss), MISSING)
    spurious = EdgeSet(_sample(rng, non_edges, n_spur), SPURIOUS)
    return EvalSplit(g, perturb(g, remove=missing, add=spurious), missing, spurious, seed)


def auc(scores: ScoreMatrix, positives, negatives, mode: str = EXHAUSTIVE, n: Optional[int] = None,
        seed: Optional[int] = None, higher_is_better: bool = True) -> MetricResult:
    """Probability that a positive pair outscores a negative one, ties counted half.

    Exhaustive mode is the exact Mann-Whitney statistic over all |pos| |neg|
    comparisons; sampled mode draws n seeded comparisons. With
    higher_is_better=False a lower score counts as the win.
    """
    positives, negatives = list(positives), list(negatives)
    if not positives or not negatives:
        raise InputError('AUC needs at least one positive and one negative pair')
    if set(positives) & set(negatives):
        raise InputError('positive and negative pair sets overlap')
    sign = 1.0 if higher_is_better else -1.0
    pos = sign * scores.scores_for(positives)
    neg = sign * scores.scores_for(negatives)

    if mode == EXHAUSTIVE:
        p, q = len(pos), len(neg)
        ranks = scipy.stats.rankdata(np.concatenate([pos, neg]))
        u = ranks[:p].sum() - p * (p + 1) / 2.0
        return MetricResult(auc=float(u / (p * q)), n_comparisons=p * q, mode=EXHAUSTIVE)
    if mode == SAMPLED:
        if n is None or n < 1:
            raise InputError('sampled AUC needs an explicit positive sample count')
        rng = np.random.default_rng(seed)
        a = pos[rng.integers(0, len(pos), size=n)]
        b = neg[rng.integers(0, len(neg), size=n)]
        wins = np.count_nonzero(a > b)
        ties = np.count_nonzero(a == b)
        return MetricResult(auc=float((wins + 0.5 * ties) / n), n_comparisons=n, mode=SAMPLED)
    raise InputError(f'Unknown AUC mode {mode!r}')


def accuracy_at_l(ranked: RankedLinks, probe, l: Optional[int] = None) -> MetricResult:
    """Fraction of probe links among the top-l ranked candidates (l defaults to |probe|)."""
    probe_set = set(probe)
    if l is None:
        l = len(probe_set)
    if l < 1:
        raise InputError(f'l must be at least 1, got {l}')
    if l > len(ranked):
        raise InputError(f'l={l} exceeds the {len(ranked)} ranked candidates')
    hits = sum(1 for p in ranked.top(l) if p in probe_set)
    return MetricResult(accuracy=hits / l, n_comparisons=l, mode=TOP_L)


def score_observed(observed: Graph, method: str, lam: float, config, logger=logging.getLogger()):
    """Scores for every pair of the observed graph plus (converged, iterations, seconds)."""
    if method in SOLVERS:
        cfg = SolverConfig(lam=lam, eps=config['eps'], max_iter=config['max_iter'])
        result, sm = reconstruct(observed.adjacency_matrix(), method, cfg, logger=logger)
        return sm, result.converged, result.iterations, result.elapsed_s
    started = time.perf_counter()
    sm = baseline_scores(observed, BaselineSpec(method, config['lp_epsilon']))
    return sm, True, 0, time.perf_counter() - started


def task_metrics(split: EvalSplit, sm: ScoreMatrix, task: str, config) -> Dict[str, float]:
    observed = split.observed
    x = observed.adjacency_matrix()
    if task == MISSING_TASK:
        positives = list(split.missing)
        negatives = [p for p in observed.non_edges() if p not in split.missing]
        ranked = rank_missing(sm, x)
        higher_is_better = True
    else:
        positives = list(split.spurious)
        negatives = [p for p in observed.sorted_edges() if p not in split.spurious]
        ranked = rank_spurious(sm, x)
        higher_is_better = False
    a = auc(sm, positives, negatives, mode=config['auc_mode'], n=config.get('auc_samples'),
            seed=split.seed, higher_is_better=higher_is_better)
    acc = accuracy_at_l(ranked, positives)
    return {AUC: a.auc, ACCURACY: acc.accuracy, 'n_comparisons': a.n_comparisons}


def _method_variants(config):
    variants = []
    for method in config['methods']:
        if method in SOLVERS:
            grid = config['lambda_grid']
            for lam in grid:
                label = method if len(grid) == 1 else f'{method}(lambda={lam:g})'
                variants.append((label, method, lam))
        else:
            variants.append((BaselineSpec(method, config['lp_epsilon']).label(), method, None))
    return variants


def _experiment_run(graph: Graph, config, run: int, seed: int, logger):
    rows = []
    tasks = []
    if config['miss_fraction'] > 0:
        tasks.append((MISSING_TASK, make_observed(graph, config['miss_fraction'], 0.0, seed), config['miss_fraction']))
    if config['spur_fraction'] > 0:
        tasks.append((SPURIOUS_TASK, make_observed(graph, 0.0, config['spur_fraction'], seed), config['spur_fraction']))
    for task, split, fraction in tasks:
        for label, method, lam in _method_variants(config):
            sm, converged, iterations, elapsed = score_observed(split.observed, method, lam, config, logger)
            metrics = task_metrics(split, sm, task, config)
            rows.append({
                'method': label,
                'lambda': lam,
                'task': task,
                'run': run,
                'seed': seed,
                'fraction': fraction,
                'auc': metrics[AUC],
                'accuracy': metrics[ACCURACY],
                'n_comparisons': metrics['n_comparisons'],
                'converged': converged,
                'iterations': iterations,
                'runtime_s': elapsed if config['record_timing'] else None,
            })
    return rows


def _mean_std(values):
    if not values:
        return None, None
    arr = np.asarray(values, dtype=float)
    std = float(np.std(arr, ddof=1)) if len(arr) > 1 else 0.0
    return float(np.mean(arr)), std


@dataclass
class ExperimentReport:
    config: dict
    rows: List[dict] = field(default_factory=list)
    aggregates: List[dict] = field(default_factory=list)

    def aggregate(self, method: str, task: str) -> dict:
        for a in self.aggregates:
            if a['method'] == method and a['task'] == task:
                return a
        raise KeyError((method, task))

    def csv_header(self):
        return EXPERIMENT_HEADER

    def csv_rows(self):
        out = []
        for a in self.aggregates:
            for metric in (AUC, ACCURACY):
                out.append([a['method'], a['task'], metric, a['fraction'],
                            a[f'{metric}_mean'], a[f'{metric}_std'], a['runtime_s']])
        return out

    def to_dict(self):
        return {'config': self.config, 'rows': self.rows, 'aggregates': self.aggregates}

    @classmethod
    def from_dict(cls, data):
        return cls(data['config'], data['rows'], data['aggregates'])


def aggregate_rows(rows: List[dict], record_timing: bool) -> List[dict]:
    groups: Dict[tuple, List[dict]] = {}
    for row in sorted(rows, key=lambda r: (r['method'], r['task'], r['run'])):
        groups.setdefault((row['method'], row['task']), []).append(row)
    aggregates = []
    for (method, task), group in groups.items():
        ok = [r for r in group if r['converged']]
        auc_mean, auc_std = _mean_std([r['auc'] for r in ok])
        acc_mean, acc_std = _mean_std([r['accuracy'] for r in ok])
        runtime, _ = _mean_std([r['runtime_s'] for r in ok]) if record_timing else (None, None)
        aggregates.append({
            'method': method,
            'task': task,
            'fraction': group[0]['fraction'],
            'runs': len(group),
            'non_converged': len(group) - len(ok),
            'auc_mean': auc_mean,
            'auc_std': auc_std,
            'accuracy_mean': acc_mean,
            'accuracy_std': acc_std,
            'runtime_s': runtime,
        })
    return aggregates


def _collect(manager: RunManager):
    results = manager.wait()
    errors = manager.errors()
    if errors:
        raise next(iter(errors.values()))
    return results


def run_experiment(config, graph: Optional[Graph] = None, manager: Optional[RunManager] = None,
                   logger=logging.getLogger()) -> ExperimentReport:
    """Score every method on seeded probe splits and report per-method mean and std."""
    config = validate_experiment_config(config)
    if graph is None:
        graph = resolve_graph_source(config['source'], logger=logger)
    split_counts(graph.edge_count(), config['miss_fraction'], config['spur_fraction'])
    manager = manager or RunManager.from_env(logger=logger)
    for run, seed in enumerate(run_seeds(config)):
        manager.schedule_run(run, f'experiment_{run}', _experiment_run, graph, config, run, seed, logger)
    rows = [row for result in _collect(manager).values() for row in result]
    rows.sort(key=lambda r: (r['method'], r['task'], r['run']))
    logger.info(f'Experiment finished: {len(rows)} rows over {config["runs"]} runs')
    return ExperimentReport(config, rows, aggregate_rows(rows, config['record_timing']))


@dataclass
class SweepReport:
    config: dict
    variants: List[dict] = field(default_factory=list)
    correlation: Optional[float] = None

    def variant(self, strategy: str, fraction: float) -> dict:
        for v in self.variants:
            if v['strategy'] == strategy and math.isclose(v['fraction'], fraction):
                return v
        raise KeyError((strategy, fraction))

    def methods(self) -> List[str]:
        return list(self.config.get('methods', []))

    def csv_header(self):
        return SWEEP_HEADER + [f'accuracy_mean_{method}' for method in self.methods()]

    def csv_rows(self):
        return [[v[k] for k in SWEEP_HEADER] + [v['by_method'][method]['accuracy_mean'] for method in self.methods()]
                for v in self.variants]

    def to_dict(self):
        return {'config': self.config, 'variants': self.variants, 'correlation': self.correlation}

    @classmethod
    def from_dict(cls, data):
        return cls(data['config'], data['variants'], data['correlation'])


def _metric_summary(accuracies, aucs):
    acc_mean, acc_std = _mean_std(accuracies)
    auc_mean, auc_std = _mean_std(aucs)
    return {'accuracy_mean': acc_mean, 'accuracy_std': acc_std, 'auc_mean': auc_mean, 'auc_std': auc_std,
            'runs': len(accuracies)}


def _sweep_variant(graph: Graph, strategy: str, fraction: float, links, config, logger):
    """sigma_r of one perturbed graph and its missing-link scores, per method and averaged over methods.

    The cross-method figures average each run over the methods that converged
    on it, then take mean and std over runs.
    """
    removed = select_links(graph, strategy, fraction, links, seed=config['seed'])
    variant = perturb(graph, remove=removed)
    cfg = SolverConfig(lam=config['lambda'], eps=config['eps'], max_iter=config['max_iter'])
    sigma = sigma_or_inf(solve(variant.adjacency_matrix(), config['regularity_solver'], cfg, logger=logger).z_star,
                         config['tol'])
    eval_config = {'eps': config['eps'], 'max_iter': config['max_iter'], 'lp_epsilon': config['lp_epsilon'],
                   'auc_mode': EXHAUSTIVE}
    per_method = {method: ([], []) for method in config['methods']}
    run_accuracies, run_aucs = [], []
    for seed in run_seeds(config):
        split = make_observed(variant, config['probe_fraction'], 0.0, seed)
        accuracies, aucs = [], []
        for method in config['methods']:
            sm, converged, _, _ = score_observed(split.observed, method, config['lambda'], eval_config, logger)
            if not converged:
                logger.warning(f'{method} did not converge on {strategy} {fraction:g} (seed {seed}); run skipped')
                continue
            metrics = task_metrics(split, sm, MISSING_TASK, eval_config)
            per_method[method][0].append(metrics[ACCURACY])
            per_method[method][1].append(metrics[AUC])
            accuracies.append(metrics[ACCURACY])
            aucs.append(metrics[AUC])
        if accuracies:
            run_accuracies.append(float(np.mean(accuracies)))
            run_aucs.append(float(np.mean(aucs)))
    summary = _metric_summary(run_accuracies, run_aucs)
    summary.update({
        'strategy': strategy,
        'fraction': fraction,
        'removed_count': len(removed),
        'sigma_r': sigma,
        'by_method': {method: _metric_summary(*values) for method, values in per_method.items()},
    })
    return summary


def regularity_accuracy_correlation(variants: List[dict], strategy: str = IRREGULAR) -> Optional[float]:
    """Pearson correlation of sigma_r and mean accuracy over the perturbed variants of one strategy."""
    points = [(v['sigma_r'], v['accuracy_mean']) for v in variants
              if v['strategy'] == strategy and v['fraction'] > 0 and v['accuracy_mean'] is not None
              and math.isfinite(v['sigma_r'])]
    if len(points) < 3:
        return None
    sigmas, accs = zip(*points)
    if len(set(sigmas)) < 2 or len(set(accs)) < 2:
        return None
    return float(scipy.stats.pearsonr(sigmas, accs)[0])


def run_regulation_sweep(config, graph: Optional[Graph] = None, manager: Optional[RunManager] = None,
                         logger=logging.getLogger()) -> SweepReport:
    """Remove growing shares of links by each strategy and track sigma_r against reconstruction accuracy.

    The unperturbed graph is scored once and reported as the fraction 0 row of
    every strategy.
    """
    config = validate_sweep_config(config)
    if graph is None:
        graph = resolve_graph_source(config['source'], logger=logger)
    m = graph.edge_count()
    if m == 0:
        raise InputError('cannot sweep a graph without edges')
    fractions = sorted({f for f in config['fractions'] if f > 0})
    # the hidden set must stay non-empty on the most depleted variant
    split_counts(m - int(round(max(fractions, default=0.0) * m)), config['probe_fraction'], 0.0)
    cfg = SolverConfig(lam=config['lambda'], eps=config['eps'], max_iter=config['max_iter'])
    base = solve(graph.adjacency_matrix(), config['importance_solver'], cfg, logger=logger)
    links = link_importance(node_importance(base.z_star), graph)

    manager = manager or RunManager.from_env(logger=logger)
    baseline_id = manager.schedule_run(0, 'sweep_baseline', _sweep_variant,
                                       graph, config['strategies'][0], 0.0, links, config, logger)
    priority = 1
    for strategy in config['strategies']:
        for fraction in fractions:
            manager.schedule_run(priority, f'sweep_{strategy}_{fraction:g}', _sweep_variant,
                                 graph, strategy, fraction, links, config, logger)
            priority += 1
    results = _collect(manager)
    baseline = results.pop(baseline_id)
    variants = [dict(copy.deepcopy(baseline), strategy=s) for s in config['strategies']] + list(results.values())
    order = {s: k for k, s in enumerate(config['strategies'])}
    variants.sort(key=lambda v: (order[v['strategy']], v['fraction']))
    correlation = regularity_accuracy_correlation(variants)
    logger.info(f'Sweep finished: {len(variants)} variants, sigma_r/accuracy correlation {correlation}')
    return SweepReport(config, variants, correlation)
