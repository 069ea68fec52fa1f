"""Edge-list parsing and report writing."""
import csv
import io
import json
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .error_codes import InputError, ParseError, ReportWriteError
from .graph import Graph, build_graph

WHITESPACE, COMMA = 'whitespace', 'comma'
JSON, CSV = 'json', 'csv'
REPORT_FORMATS = (JSON, CSV)


@dataclass(frozen=True)
class EdgeListFormat:
    delimiter: str = WHITESPACE
    index_base: int = 0
    comment_prefix: str = '#'

    def __post_init__(self):
        if self.delimiter not in (WHITESPACE, COMMA):
            raise InputError(f'Unknown delimiter {self.delimiter!r}')
        if self.index_base not in (0, 1):
            raise InputError(f'index_base must be 0 or 1, got {self.index_base}')

    def separator(self):
        return ',' if self.delimiter == COMMA else ' '

    def split(self, line):
        if self.delimiter == COMMA:
            return [t.strip() for t in line.split(',') if t.strip()]
        return line.split()


@dataclass
class ParseStats:
    lines: int = 0
    edges: int = 0
    ignored_weights: int = 0


def _read_text(stream) -> str:
    data = stream.read() if hasattr(stream, 'read') else stream
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode('utf-8')
        except UnicodeDecodeError as e:
            line_no = data.count(b'\n', 0, e.start) + 1
            raise ParseError(line_no, f'undecodable byte at offset {e.start}: {e.reason}')
    return data


def parse_edge_list_with_stats(stream, fmt: EdgeListFormat = EdgeListFormat(), node_count=None,
                               logger=logging.getLogger()) -> Tuple[Graph, ParseStats]:
    stats = ParseStats()
    pairs = []
    for line_no, raw in enumerate(_read_text(stream).splitlines(), start=1):
        stats.lines += 1
        line = raw.strip()
        if not line or line.startswith(fmt.comment_prefix):
            continue
        tokens = fmt.split(line)
        if len(tokens) < 2:
            raise ParseError(line_no, f'expected two node indices, got {line!r}')
        try:
            i, j = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise ParseError(line_no, f'non-integer node index in {line!r}')
        if len(tokens) > 2:
            stats.ignored_weights += 1
        i, j = i - fmt.index_base, j - fmt.index_base
        if i < 0 or j < 0:
            raise ParseError(line_no, f'node index below base {fmt.index_base}')
        pairs.append((i, j))
    if stats.ignored_weights:
        logger.warning(f'Ignored extra columns (weights) on {stats.ignored_weights} lines')
    graph = build_graph(pairs, node_count=node_count)
    stats.edges = graph.edge_count()
    return graph, stats


def parse_edge_list(stream, fmt: EdgeListFormat = EdgeListFormat(), logger=logging.getLogger()) -> Graph:
    graph, _ = parse_edge_list_with_stats(stream, fmt, logger=logger)
    return graph


def read_edge_list(path, fmt: EdgeListFormat = EdgeListFormat(), logger=logging.getLogger()) -> Graph:
    try:
        with open(path, 'rb') as f:
            graph = parse_edge_list(f, fmt, logger=logger)
    except OSError as e:
        raise InputError(f'Could not read edge list {path}: {e}')
    logger.info(f'Loaded {graph} from {path}')
    return graph


def write_edge_list(g: Graph, stream, fmt: EdgeListFormat = EdgeListFormat()):
    sep = fmt.separator()
    for i, j in g.sorted_edges():
        stream.write(f'{i + fmt.index_base}{sep}{j + fmt.index_base}\n')


def save_edge_list(g: Graph, path, fmt: EdgeListFormat = EdgeListFormat()):
    try:
        with open(path, 'w') as f:
            write_edge_list(g, f, fmt)
    except OSError as e:
        raise ReportWriteError(path, e)


def write_label_sidecar(path, node_count: int, index_base: int):
    try:
        with open(path, 'w', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(['internal', 'original'])
            for k in range(node_count):
                writer.writerow([k, k + index_base])
    except OSError as e:
        raise ReportWriteError(path, e)


def format_value(value):
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return 'nan'
        if math.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return f'{value:.6g}'
    return str(value)


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f'Object of type {type(value).__name__} is not JSON serialisable')


def render_report(report, fmt: str = CSV) -> str:
    """Serialise a report object exposing to_dict() and csv_header()/csv_rows()."""
    if fmt not in REPORT_FORMATS:
        raise InputError(f'Unknown report format {fmt!r}, expected one of {REPORT_FORMATS}')
    if fmt == JSON:
        return json.dumps(report.to_dict(), indent=2, default=_json_default) + '\n'
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(report.csv_header())
    for row in report.csv_rows():
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def write_report(report, path, fmt: str = CSV):
    text = render_report(report, fmt)
    try:
        with open(path, 'w', newline='') as f:
            f.write(text)
    except OSError as e:
        raise ReportWriteError(path, e)
