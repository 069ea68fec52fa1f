import logging
import os
from pathlib import Path

import networkx as nx

from .error_codes import DatasetUnavailableError, InputError
from .graph import Graph, from_networkx, stochastic_block_model
from .io_helper import EdgeListFormat, read_edge_list

REGNET_DATA_DIR = 'REGNET_DATA_DIR'
DEFAULT_DATA_DIR = 'data'

# name -> (file name, description); files are whitespace edge lists, 1-based
DATASETS = {
    'jazz': ('jazz.txt', 'collaboration network of jazz musicians'),
    'worldtrade': ('worldtrade.txt', 'trade of miscellaneous metal manufactures among 80 countries'),
    'contact': ('contact.txt', 'contacts between people carrying wireless devices'),
    'metabolic': ('metabolic.txt', 'metabolic network of C. elegans'),
    'mangwet': ('mangwet.txt', 'Mangrove Estuary food web, wet season'),
    'macaque': ('macaque.txt', 'cortical network of the macaque monkey'),
    'usair': ('usair.txt', 'US air transportation network'),
    'facebook': ('facebook.txt', 'wall posts between Facebook users, directions and weights dropped'),
    'router': ('router.txt', 'autonomous-system level Internet snapshot'),
    'yeast': ('yeast.txt', 'protein-protein interactions in budding yeast'),
}
DATASET_FORMAT = EdgeListFormat(index_base=1)


def data_dir() -> Path:
    return Path(os.environ.get(REGNET_DATA_DIR, DEFAULT_DATA_DIR))


def dataset_path(name, directory=None) -> Path:
    if name not in DATASETS:
        raise InputError(f'Unknown dataset {name!r}, expected one of {sorted(DATASETS)}')
    return Path(directory or data_dir()) / DATASETS[name][0]


def load_dataset(name, directory=None, logger=logging.getLogger()) -> Graph:
    path = dataset_path(name, directory)
    if not path.exists():
        raise DatasetUnavailableError(
            f'Dataset {name!r} not found at {path}; download it and place the edge list there '
            f'(or point {REGNET_DATA_DIR} at its directory)')
    return read_edge_list(path, DATASET_FORMAT, logger=logger)


def _parse_sbm(source) -> Graph:
    # sbm:<block_size>x<blocks>:<p_in>:<p_out>[:<seed>]
    parts = source.split(':')[1:]
    try:
        block_size, blocks = (int(v) for v in parts[0].lower().split('x'))
        p_in, p_out = float(parts[1]), float(parts[2])
        seed = int(parts[3]) if len(parts) > 3 else 0
    except (ValueError, IndexError):
        raise InputError(f'Malformed SBM source {source!r}, expected sbm:<size>x<blocks>:<p_in>:<p_out>[:<seed>]')
    if not (0 <= p_in <= 1 and 0 <= p_out <= 1) or block_size < 1 or blocks < 1:
        raise InputError(f'SBM parameters out of range in {source!r}')
    return stochastic_block_model([block_size] * blocks, p_in, p_out, seed=seed)


def resolve_graph_source(source: str, fmt: EdgeListFormat = EdgeListFormat(), logger=logging.getLogger()) -> Graph:
    """Graph from a file path, 'dataset:<name>', 'karate' or an 'sbm:...' description."""
    if source == 'karate':
        return from_networkx(nx.karate_club_graph())
    if source.startswith('dataset:'):
        return load_dataset(source.split(':', 1)[1], logger=logger)
    if source.startswith('sbm:'):
        return _parse_sbm(source)
    return read_edge_list(source, fmt, logger=logger)
