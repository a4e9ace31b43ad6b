import json
import logging

import numpy as np

from .. import constants
from ..errors import DatasetParseError, FormatVersionError
from .dataset import TransitionDataset

LOGGER = logging.getLogger(__name__)

__all__ = ['save_dataset', 'load_dataset']


def save_dataset(dataset, path):
    """One JSON metadata line, then "s a s_next" per record."""
    with open(path, 'w', encoding='utf-8', newline='\n') as stream:
        stream.write(json.dumps(dataset.metadata, sort_keys=True) + '\n')
        for s, a, s_next in dataset.records.tolist():
            stream.write('{} {} {}\n'.format(s, a, s_next))
    LOGGER.debug("Saved {!r} to {}.".format(dataset, path))


def load_dataset(path):
    with open(path, 'rb') as stream:
        raw = stream.read()
    try:
        lines = raw.decode('utf-8').split('\n')
    except UnicodeDecodeError as error:
        raise DatasetParseError(path, raw.count(b'\n', 0, error.start) + 1, 'invalid UTF-8')
    if lines and lines[-1] == '':
        lines.pop()
    if not lines:
        raise DatasetParseError(path, 1, 'missing metadata header')
    try:
        metadata = json.loads(lines[0])
    except ValueError as error:
        raise DatasetParseError(path, 1, 'invalid metadata header ({})'.format(error))
    if not isinstance(metadata, dict):
        raise DatasetParseError(path, 1, 'metadata header should be an object')
    version = metadata.get('format_version')
    if version != constants.FORMAT_VERSION:
        raise FormatVersionError('dataset', constants.FORMAT_VERSION, version)

    records = np.empty((len(lines) - 1, 3), dtype=np.int64)
    for number, line in enumerate(lines[1:], start=2):
        fields = line.split(' ')
        if len(fields) != 3:
            raise DatasetParseError(path, number, 'expected 3 fields, found {}'.format(len(fields)))
        try:
            records[number - 2] = [int(field) for field in fields]
        except ValueError:
            raise DatasetParseError(path, number, 'non-integer field in {!r}'.format(line))

    expected = metadata.get('n')
    if expected is not None and expected != records.shape[0]:
        raise DatasetParseError(
            path, records.shape[0] + 2,
            'expected {} records, found {}'.format(expected, records.shape[0]))
    try:
        return TransitionDataset(records, metadata)
    except (IndexError, ValueError) as error:
        raise DatasetParseError(path, 1, str(error))
