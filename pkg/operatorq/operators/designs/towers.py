from collections import OrderedDict

import numpy as np

from ... import constants
from ...errors import DimensionError
from ...nn import init_mlp, mlp_forward_cached
from ..abstract import OperatorModel

__all__ = ['TwoTowerOperator']


class TwoTowerOperator(OperatorModel):
    """Weights w(xi_j | x) built from f(xi_j) and g(x)."""

    def __init__(self, reference_set, gamma, encoding, f, g):
        super(TwoTowerOperator, self).__init__(reference_set, gamma, encoding)
        self._check_towers(f, g)
        self._f = f
        self._g = g

    def _check_towers(self, f, g):
        in_dim = self.encoding.shape[1]
        for name, net in (('f', f), ('g', g)):
            if net.layer_sizes[0] != in_dim:
                raise DimensionError('{} input'.format(name), in_dim, net.layer_sizes[0])
        if f.layer_sizes[-1] != g.layer_sizes[-1]:
            raise DimensionError('g output', f.layer_sizes[-1], g.layer_sizes[-1])

    @classmethod
    def initialize(cls, reference_set, gamma, encoding, rng, hidden_sizes=None,
                   embed_dim=constants.EMBED_DIM, activation='relu',
                   final_scale=constants.OUTPUT_INIT_SCALE):
        hidden_sizes = constants.HIDDEN_SIZES if hidden_sizes is None else hidden_sizes
        sizes = [np.shape(encoding)[1]] + list(hidden_sizes) + [embed_dim]
        f = init_mlp(sizes, rng, activation, final_scale)
        g = init_mlp(sizes, rng, activation, final_scale)
        return cls(reference_set, gamma, encoding, f, g)

    @property
    def f(self):
        return self._f

    @property
    def g(self):
        return self._g

    @property
    def nets(self):
        return OrderedDict([('f', self._f), ('g', self._g)])

    def set_parameters(self, arrays):
        arrays = list(arrays)
        split = len(self._f.arrays())
        f = self._f.with_arrays(arrays[:split])
        g = self._g.with_arrays(arrays[split:])
        self._check_towers(f, g)
        self._f, self._g = f, g

    def _towers(self, xs):
        F, f_cache = mlp_forward_cached(self._f, self.encoding[self.reference_set.indices])
        G, g_cache = mlp_forward_cached(self._g, self.encoding[xs])
        return F, G, f_cache, g_cache
