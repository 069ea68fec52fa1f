import copy
import os

import jsonschema

from .error_codes import InputError

REGNET_RECORD_TIMING = 'REGNET_RECORD_TIMING'

SOLVER_METHODS = ['lrnr', 'lfnr']
BASELINE_METHODS = ['cn', 'ra', 'lp']
ALL_METHODS = SOLVER_METHODS + BASELINE_METHODS

_fraction = {'type': 'number', 'minimum': 0, 'exclusiveMaximum': 1}
_positive = {'type': 'number', 'exclusiveMinimum': 0}

EXPERIMENT_SCHEMA = {
    'type': 'object',
    'properties': {
        'source': {'type': 'string', 'minLength': 1},
        'methods': {'type': 'array', 'items': {'enum': ALL_METHODS}, 'minItems': 1, 'uniqueItems': True},
        'miss_fraction': _fraction,
        'spur_fraction': _fraction,
        'runs': {'type': 'integer', 'minimum': 1},
        'seed': {'type': 'integer', 'minimum': 0},
        'seeds': {'type': 'array', 'items': {'type': 'integer', 'minimum': 0}},
        'lambda_grid': {'type': 'array', 'items': _positive, 'minItems': 1},
        'eps': _positive,
        'max_iter': {'type': 'integer', 'minimum': 1},
        'lp_epsilon': {'type': 'number', 'minimum': 0},
        'auc_mode': {'enum': ['exhaustive', 'sampled']},
        'auc_samples': {'type': 'integer', 'minimum': 1},
        'record_timing': {'type': 'boolean'},
    },
    'additionalProperties': False,
}

EXPERIMENT_DEFAULTS = {
    'miss_fraction': 0.1,
    'spur_fraction': 0.0,
    'runs': 20,
    'seed': 0,
    'lambda_grid': [0.1],
    'eps': 1e-8,
    'max_iter': 1000,
    'lp_epsilon': 0.01,
    'auc_mode': 'exhaustive',
    'record_timing': False,
}

SWEEP_SCHEMA = {
    'type': 'object',
    'properties': {
        'source': {'type': 'string', 'minLength': 1},
        'methods': {'type': 'array', 'items': {'enum': ALL_METHODS}, 'minItems': 1, 'uniqueItems': True},
        'strategies': {'type': 'array', 'items': {'enum': ['irregular', 'regular', 'random']},
                       'minItems': 1, 'uniqueItems': True},
        'fractions': {'type': 'array', 'items': _fraction, 'minItems': 1},
        'probe_fraction': {'type': 'number', 'exclusiveMinimum': 0, 'exclusiveMaximum': 1},
        'runs': {'type': 'integer', 'minimum': 1},
        'seed': {'type': 'integer', 'minimum': 0},
        'lambda': _positive,
        'eps': _positive,
        'max_iter': {'type': 'integer', 'minimum': 1},
        'lp_epsilon': {'type': 'number', 'minimum': 0},
        'importance_solver': {'enum': SOLVER_METHODS},
        'regularity_solver': {'enum': SOLVER_METHODS},
        'tol': _positive,
    },
    'additionalProperties': False,
}

SWEEP_DEFAULTS = {
    'methods': ['lrnr', 'lfnr'],
    'strategies': ['irregular', 'regular', 'random'],
    'fractions': [k / 100 for k in range(1, 13)],
    'probe_fraction': 0.1,
    'runs': 20,
    'seed': 0,
    'lambda': 0.1,
    'eps': 1e-8,
    'max_iter': 1000,
    'lp_epsilon': 0.01,
    'importance_solver': 'lrnr',
    'regularity_solver': 'lrnr',
    'tol': 1e-6,
}


def record_timing_from_env():
    return os.environ.get(REGNET_RECORD_TIMING, 'False').lower() in ('1', 'true', 'yes')


def find_missing_keys(data, keys):
    return list(filter(lambda x: x not in data.keys(), keys))


def _validate(data, schema, required, defaults, what):
    if not isinstance(data, dict):
        raise InputError(f'{what} config must be a mapping')
    missing_keys = find_missing_keys(data, required)
    if len(missing_keys) > 0:
        raise InputError(f'{what} config is missing keys: {missing_keys}')
    try:
        jsonschema.validate(data, schema)
    except jsonschema.ValidationError as e:
        path = '.'.join(str(p) for p in e.absolute_path) or '<root>'
        raise InputError(f'invalid {what} config at {path}: {e.message}')
    config = copy.deepcopy(defaults)
    config.update(copy.deepcopy(data))
    return config


def validate_experiment_config(data):
    config = _validate(data, EXPERIMENT_SCHEMA, ['source', 'methods'], EXPERIMENT_DEFAULTS, 'experiment')
    if 'record_timing' not in data:
        config['record_timing'] = record_timing_from_env()
    if 'seeds' in config and len(config['seeds']) != config['runs']:
        raise InputError(f'{len(config["seeds"])} seeds given for {config["runs"]} runs')
    if config['miss_fraction'] == 0 and config['spur_fraction'] == 0:
        raise InputError('at least one of miss_fraction and spur_fraction must be positive')
    if config['auc_mode'] == 'sampled' and 'auc_samples' not in config:
        raise InputError('sampled AUC needs an explicit auc_samples count')
    return config


def validate_sweep_config(data):
    return _validate(data, SWEEP_SCHEMA, ['source'], SWEEP_DEFAULTS, 'sweep')


def run_seeds(config):
    if 'seeds' in config:
        return list(config['seeds'])
    return [config['seed'] + k for k in range(config['runs'])]
