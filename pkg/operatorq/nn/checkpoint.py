import json

import numpy as np

from .mlp import MlpParams

__all__ = ['params_to_arrays', 'params_from_arrays', 'save_params', 'load_params']

_HEADER = '__header__'


def params_to_arrays(params, prefix=''):
    arrays = {}
    for i, array in enumerate(params.arrays()):
        arrays['{}{}'.format(prefix, i)] = array
    return arrays, {'layer_sizes': params.layer_sizes, 'activation': params.activation}


def params_from_arrays(arrays, header, prefix=''):
    count = 2 * (len(header['layer_sizes']) - 1)
    return MlpParams.from_arrays(
        header['layer_sizes'],
        [np.array(arrays['{}{}'.format(prefix, i)]) for i in range(count)],
        header['activation'])


def save_params(params, path):
    arrays, header = params_to_arrays(params)
    arrays[_HEADER] = np.array(json.dumps(header))
    with open(path, 'wb') as stream:
        np.savez(stream, **arrays)


def load_params(path):
    with np.load(path) as archive:
        header = json.loads(str(archive[_HEADER]))
        return params_from_arrays(archive, header)
