import json
import logging

import click

from .baselines import BaselineSpec, baseline_scores
from .datasets import resolve_graph_source
from .error_codes import InputError
from .evaluation import run_experiment, run_regulation_sweep
from .helpers import ALL_METHODS, BASELINE_METHODS, SOLVER_METHODS
from .io_helper import CSV, REPORT_FORMATS, EdgeListFormat, render_report, save_edge_list, write_label_sidecar, write_report
from .kernels import rref_tol_from_env
from .reconstruction import rank_missing, rank_spurious, reconstruct
from .regularity import STRATEGIES, RegulationConfig, analyse, regulate
from .solvers import LFNR, LRNR, SolverConfig

logger = logging.getLogger('regnet')

RECONSTRUCT = 'reconstruct'
REGULARITY = 'regularity'
REGULATE = 'regulate'
EVALUATE = 'evaluate'
BASELINE = 'baseline'
SWEEP = 'sweep'


def input_options(f):
    f = click.option('--input', 'input_', required=True,
                     help="Edge list path, 'dataset:<name>', 'karate' or 'sbm:<size>x<blocks>:<p_in>:<p_out>[:<seed>]'.")(f)
    f = click.option('--format', 'delimiter', type=click.Choice(['whitespace', 'comma']), default='whitespace',
                     show_default=True, help='Edge list delimiter.')(f)
    f = click.option('--index-base', type=click.Choice(['0', '1']), default='0', show_default=True,
                     help='Index of the first node in the edge list.')(f)
    return f


def output_options(f):
    f = click.option('--out', type=click.Path(dir_okay=False), default=None, help='Report destination (stdout if omitted).')(f)
    f = click.option('--out-format', type=click.Choice(REPORT_FORMATS), default=CSV, show_default=True)(f)
    return f


def solver_options(f):
    f = click.option('--lambda', 'lam', type=float, default=None, help='Trade-off weight of the error term.')(f)
    f = click.option('--eps', type=float, default=None, help='Convergence tolerance on both residuals.')(f)
    f = click.option('--max-iter', type=int, default=None, help='Iteration cap of the ALM loop.')(f)
    return f


def _load_graph(input_, delimiter, index_base):
    fmt = EdgeListFormat(delimiter=delimiter, index_base=int(index_base))
    return resolve_graph_source(input_, fmt, logger=logger), fmt


def _emit(report, out, out_format, fmt=None, node_count=0):
    if out is None:
        click.echo(render_report(report, out_format), nl=False)
        return
    write_report(report, out, out_format)
    logger.info(f'Wrote {out_format} report to {out}')
    if fmt is not None and fmt.index_base == 1:
        write_label_sidecar(f'{out}.labels.csv', node_count, fmt.index_base)


def _solver_config(lam, eps, max_iter):
    return SolverConfig.from_env(lam=lam, eps=eps, max_iter=max_iter)


@click.command(RECONSTRUCT, help='Solve the self-representation and rank missing / spurious links.')
@input_options
@output_options
@solver_options
@click.option('--method', type=click.Choice(ALL_METHODS), default=LFNR, show_default=True)
@click.option('--epsilon', type=float, default=None, help='Path-3 weight of the LP baseline.')
@click.option('--spurious-out', type=click.Path(dir_okay=False), default=None,
              help='Also write observed links ranked as spurious candidates.')
def reconstruct_command(input_, delimiter, index_base, out, out_format, lam, eps, max_iter, method, epsilon, spurious_out):
    graph, fmt = _load_graph(input_, delimiter, index_base)
    x = graph.adjacency_matrix()
    if method in SOLVER_METHODS:
        result, sm = reconstruct(x, method, _solver_config(lam, eps, max_iter), logger=logger)
        if not result.converged:
            logger.warning(f'{method} did not converge; scores come from the last iterate')
    else:
        sm = baseline_scores(graph, BaselineSpec.from_env(method, epsilon))
    _emit(rank_missing(sm, x), out, out_format, fmt, graph.get_node_count())
    if spurious_out is not None:
        write_report(rank_spurious(sm, x), spurious_out, out_format)


@click.command(REGULARITY, help='Network regularity sigma_r with node and link reconstruction importance.')
@input_options
@output_options
@solver_options
@click.option('--method', type=click.Choice(SOLVER_METHODS), default=LRNR, show_default=True)
@click.option('--tol', type=float, default=None, help='Relative zero tolerance of the echelon form (REGNET_RREF_TOL).')
def regularity_command(input_, delimiter, index_base, out, out_format, lam, eps, max_iter, method, tol):
    graph, fmt = _load_graph(input_, delimiter, index_base)
    analysis = analyse(graph, method, _solver_config(lam, eps, max_iter), rref_tol_from_env(tol), logger=logger)
    logger.info(f'sigma_r={analysis.report.sigma_r:.6g} (n={analysis.report.n}, r={analysis.report.r}, a={analysis.report.a})')
    _emit(analysis, out, out_format, fmt, graph.get_node_count())


@click.command(REGULATE, help='Remove low-importance links while regularity improves.')
@input_options
@output_options
@solver_options
@click.option('--method', type=click.Choice(SOLVER_METHODS), default=LRNR, show_default=True,
              help='Solver for the per-step re-solves.')
@click.option('--importance-method', type=click.Choice(SOLVER_METHODS), default=LRNR, show_default=True,
              help='Solver for the link importances of the original graph.')
@click.option('--batch-fraction', type=float, default=0.01, show_default=True)
@click.option('--max-remove-fraction', type=float, default=0.12, show_default=True)
@click.option('--tol', type=float, default=None, help='Relative zero tolerance of the echelon form (REGNET_RREF_TOL).')
@click.option('--graph-out', type=click.Path(dir_okay=False), default=None, help='Write the regulated edge list here.')
def regulate_command(input_, delimiter, index_base, out, out_format, lam, eps, max_iter, method, importance_method,
                     batch_fraction, max_remove_fraction, tol, graph_out):
    graph, fmt = _load_graph(input_, delimiter, index_base)
    cfg = RegulationConfig(solver=method, importance_solver=importance_method, batch_fraction=batch_fraction,
                           max_remove_fraction=max_remove_fraction, tol=rref_tol_from_env(tol),
                           solver_cfg=_solver_config(lam, eps, max_iter))
    trajectory = regulate(graph, cfg, logger=logger)
    _emit(trajectory, out, out_format, fmt, graph.get_node_count())
    if graph_out is not None:
        save_edge_list(trajectory.final_graph, graph_out, fmt)


def _read_config(path):
    if path is None:
        return {}
    try:
        with open(path) as f:
            config = json.load(f)
    except (OSError, ValueError) as e:
        raise InputError(f'Could not read config {path}: {e}')
    if not isinstance(config, dict):
        raise InputError(f'Config {path} must hold a JSON object')
    return config


def _parse_grid(text):
    try:
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise click.BadParameter(f'expected comma separated numbers, got {text!r}', param_hint='--lambda-grid')


def _put(config, key, value):
    if value is not None and value != ():
        config[key] = value


@click.command(EVALUATE, help='Seeded probe-split experiment reporting AUC and Accuracy per method.')
@input_options
@output_options
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None, help='Experiment config (JSON).')
@click.option('--method', 'methods', type=click.Choice(ALL_METHODS), multiple=True, help='Repeat for several methods.')
@click.option('--runs', type=int, default=None)
@click.option('--seed', type=int, default=None)
@click.option('--miss-fraction', type=float, default=None)
@click.option('--spur-fraction', type=float, default=None)
@click.option('--lambda', 'lam', type=float, default=None)
@click.option('--lambda-grid', default=None, help='Comma separated lambda values, e.g. 0.001,0.01,0.1,1,10.')
@click.option('--eps', type=float, default=None)
@click.option('--max-iter', type=int, default=None)
@click.option('--epsilon', type=float, default=None, help='Path-3 weight of the LP baseline.')
@click.option('--auc-mode', type=click.Choice(['exhaustive', 'sampled']), default=None)
@click.option('--auc-samples', type=int, default=None)
@click.option('--timing/--no-timing', default=None, help='Record wall-clock per solve (breaks byte-identical output).')
def evaluate_command(input_, delimiter, index_base, out, out_format, config_path, methods, runs, seed, miss_fraction,
                     spur_fraction, lam, lambda_grid, eps, max_iter, epsilon, auc_mode, auc_samples, timing):
    graph, fmt = _load_graph(input_, delimiter, index_base)
    config = _read_config(config_path)
    config['source'] = input_
    _put(config, 'methods', list(methods) or None)
    config.setdefault('methods', [LFNR])
    _put(config, 'runs', runs)
    _put(config, 'seed', seed)
    _put(config, 'miss_fraction', miss_fraction)
    _put(config, 'spur_fraction', spur_fraction)
    _put(config, 'lambda_grid', _parse_grid(lambda_grid) if lambda_grid else ([lam] if lam is not None else None))
    _put(config, 'eps', eps)
    _put(config, 'max_iter', max_iter)
    _put(config, 'lp_epsilon', epsilon)
    _put(config, 'auc_mode', auc_mode)
    _put(config, 'auc_samples', auc_samples)
    _put(config, 'record_timing', timing)
    report = run_experiment(config, graph=graph, logger=logger)
    _emit(report, out, out_format)


@click.command(BASELINE, help='Rank candidate links with a neighbourhood baseline (CN, RA or LP).')
@input_options
@output_options
@click.option('--method', type=click.Choice(BASELINE_METHODS), default='cn', show_default=True)
@click.option('--epsilon', type=float, default=None, help='Path-3 weight of the LP baseline.')
def baseline_command(input_, delimiter, index_base, out, out_format, method, epsilon):
    graph, fmt = _load_graph(input_, delimiter, index_base)
    sm = baseline_scores(graph, BaselineSpec.from_env(method, epsilon))
    _emit(rank_missing(sm, graph.adjacency_matrix()), out, out_format, fmt, graph.get_node_count())


@click.command(SWEEP, help='Accuracy and regularity after removing growing shares of links by strategy.')
@input_options
@output_options
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None, help='Sweep config (JSON).')
@click.option('--method', 'methods', type=click.Choice(ALL_METHODS), multiple=True,
              help='Reconstruction method being scored; repeat to average over several.')
@click.option('--strategy', 'strategies', type=click.Choice(STRATEGIES), multiple=True)
@click.option('--runs', type=int, default=None)
@click.option('--seed', type=int, default=None)
@click.option('--miss-fraction', type=float, default=None, help='Probe fraction hidden per run.')
@click.option('--max-remove-fraction', type=float, default=None, help='Largest removal share, swept in 1% steps.')
@click.option('--lambda', 'lam', type=float, default=None)
@click.option('--eps', type=float, default=None)
@click.option('--max-iter', type=int, default=None)
@click.option('--epsilon', type=float, default=None)
@click.option('--regularity-solver', type=click.Choice(SOLVER_METHODS), default=None)
@click.option('--tol', type=float, default=None)
def sweep_command(input_, delimiter, index_base, out, out_format, config_path, methods, strategies, runs, seed,
                  miss_fraction, max_remove_fraction, lam, eps, max_iter, epsilon, regularity_solver, tol):
    graph, fmt = _load_graph(input_, delimiter, index_base)
    config = _read_config(config_path)
    config['source'] = input_
    _put(config, 'methods', list(methods) or None)
    _put(config, 'strategies', list(strategies) or None)
    _put(config, 'runs', runs)
    _put(config, 'seed', seed)
    _put(config, 'probe_fraction', miss_fraction)
    if max_remove_fraction is not None:
        steps = max(1, int(round(max_remove_fraction * 100)))
        config['fractions'] = [k / 100 for k in range(1, steps + 1)]
    _put(config, 'lambda', lam)
    _put(config, 'eps', eps)
    _put(config, 'max_iter', max_iter)
    _put(config, 'lp_epsilon', epsilon)
    _put(config, 'regularity_solver', regularity_solver)
    _put(config, 'tol', tol)
    config.setdefault('tol', rref_tol_from_env())
    report = run_regulation_sweep(config, graph=graph, logger=logger)
    _emit(report, out, out_format)


router = [
    reconstruct_command,
    regularity_command,
    regulate_command,
    evaluate_command,
    baseline_command,
    sweep_command,
]
