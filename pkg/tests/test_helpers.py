from dotenv import load_dotenv
import logging
import pytest

from Regnet.datasets import DATASETS, dataset_path, load_dataset, resolve_graph_source
from Regnet.error_codes import DatasetUnavailableError, InputError
from Regnet.helpers import find_missing_keys, run_seeds, validate_experiment_config, validate_sweep_config

load_dotenv('.env.test')
logging.basicConfig(level=logging.INFO)


def test_find_missing_keys():
    assert find_missing_keys({'source': 'karate'}, ['source', 'methods']) == ['methods']


def test_experiment_defaults_are_filled():
    config = validate_experiment_config({'source': 'karate', 'methods': ['cn']})
    assert config['runs'] == 20
    assert config['miss_fraction'] == 0.1
    assert config['lambda_grid'] == [0.1]
    assert run_seeds(config) == list(range(20))


def test_experiment_schema_errors():
    with pytest.raises(InputError):
        validate_experiment_config({'source': 'karate', 'methods': ['pagerank']})
    with pytest.raises(InputError):
        validate_experiment_config({'source': 'karate', 'methods': ['cn'], 'miss_fraction': 1.5})
    with pytest.raises(InputError):
        validate_experiment_config({'source': 'karate', 'methods': ['cn'], 'colour': 'red'})
    with pytest.raises(InputError):
        validate_experiment_config({'source': 'karate', 'methods': ['cn'], 'miss_fraction': 0.0})
    with pytest.raises(InputError):
        validate_experiment_config({'source': 'karate', 'methods': ['cn'], 'auc_mode': 'sampled'})


def test_record_timing_from_env(monkeypatch):
    monkeypatch.setenv('REGNET_RECORD_TIMING', 'true')
    assert validate_experiment_config({'source': 'karate', 'methods': ['cn']})['record_timing'] is True
    assert validate_experiment_config({'source': 'karate', 'methods': ['cn'],
                                       'record_timing': False})['record_timing'] is False


def test_sweep_defaults():
    config = validate_sweep_config({'source': 'karate'})
    assert config['strategies'] == ['irregular', 'regular', 'random']
    assert config['fractions'][0] == 0.01
    assert len(config['fractions']) == 12
    assert config['methods'] == ['lrnr', 'lfnr']
    assert validate_sweep_config({'source': 'karate', 'fractions': [0.0, 0.05]})['fractions'] == [0.0, 0.05]
    with pytest.raises(InputError):
        validate_sweep_config({'source': 'karate', 'strategies': ['greedy']})
    with pytest.raises(InputError):
        validate_sweep_config({'source': 'karate', 'methods': []})
    with pytest.raises(InputError):
        validate_sweep_config({'source': 'karate', 'fractions': [-0.01]})


def test_resolve_karate():
    g = resolve_graph_source('karate')
    assert g.get_node_count() == 34
    assert g.edge_count() == 78


def test_resolve_sbm():
    g = resolve_graph_source('sbm:10x2:0.8:0.05:3')
    assert g.get_node_count() == 20
    assert g == resolve_graph_source('sbm:10x2:0.8:0.05:3')
    with pytest.raises(InputError):
        resolve_graph_source('sbm:10:0.8')
    with pytest.raises(InputError):
        resolve_graph_source('sbm:10x2:1.8:0.05')


def test_missing_dataset_names_the_path(monkeypatch, tmp_path):
    monkeypatch.setenv('REGNET_DATA_DIR', str(tmp_path))
    with pytest.raises(DatasetUnavailableError) as e:
        resolve_graph_source('dataset:jazz')
    assert str(tmp_path) in str(e.value)
    with pytest.raises(InputError):
        dataset_path('cora')


def test_dataset_is_read_one_based(tmp_path):
    (tmp_path / DATASETS['usair'][0]).write_text('1 2\n2 3\n')
    g = load_dataset('usair', directory=tmp_path)
    assert g.get_edges() == {(0, 1), (1, 2)}
