import json
import logging
from collections import OrderedDict

import numpy as np

from .. import constants
from ..errors import FormatVersionError
from ..nn import params_to_arrays, params_from_arrays
from .abstract import DESIGNS, ReferenceSet

LOGGER = logging.getLogger(__name__)

__all__ = ['model_header', 'save_model', 'load_model']

_HEADER = '__header__'
_ENCODING = '__encoding__'


def model_header(model):
    return {
        'format_version': constants.FORMAT_VERSION,
        'design': model.design,
        'gamma': model.gamma,
        'num_actions': model.num_actions,
        'reference_points': [[p.s, p.a] for p in model.reference_set.points],
        'requested_m': model.reference_set.requested_m,
        'nets': OrderedDict(),
        'extra': model.header(),
    }


def save_model(model, path):
    header = model_header(model)
    arrays = {_ENCODING: model.encoding}
    for name, net in model.nets.items():
        net_arrays, net_header = params_to_arrays(net, 'net.{}.'.format(name))
        arrays.update(net_arrays)
        header['nets'][name] = net_header
    for name, array in model.extra_arrays().items():
        arrays['extra.{}'.format(name)] = array
    arrays[_HEADER] = np.array(json.dumps(header))
    with open(path, 'wb') as stream:
        np.savez(stream, **arrays)
    LOGGER.debug("Saved {!r} to {}.".format(model, path))


def load_model(path):
    with np.load(path) as archive:
        header = json.loads(str(archive[_HEADER]))
        if header.get('format_version') != constants.FORMAT_VERSION:
            raise FormatVersionError('model checkpoint', constants.FORMAT_VERSION,
                                     header.get('format_version'))
        reference_set = ReferenceSet(
            header['reference_points'], header['num_actions'], header['requested_m'])
        nets = OrderedDict(
            (name, params_from_arrays(archive, net_header, 'net.{}.'.format(name)))
            for name, net_header in header['nets'].items())
        extra = {key[len('extra.'):]: np.array(archive[key])
                 for key in archive.files if key.startswith('extra.')}
        encoding = np.array(archive[_ENCODING])
    cls = DESIGNS.get(header['design'])
    return cls.from_nets(reference_set, header['gamma'], encoding, nets, header['extra'], extra)
