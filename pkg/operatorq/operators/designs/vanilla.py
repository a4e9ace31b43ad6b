from collections import OrderedDict

import numpy as np

from ... import constants
from ...errors import DimensionError
from ...nn import init_mlp, mlp_forward_cached, mlp_backward
from ..abstract import OperatorModel, design_name

__all__ = ['VanillaOperator']


@design_name('vanilla')
class VanillaOperator(OperatorModel):
    """Two-stream G[r](x) = phi(r(xi_1..m)) . psi(x), no further structure."""

    def __init__(self, reference_set, gamma, encoding, phi, psi):
        super(VanillaOperator, self).__init__(reference_set, gamma, encoding)
        self._check_streams(phi, psi)
        self._phi = phi
        self._psi = psi

    def _check_streams(self, phi, psi):
        if phi.layer_sizes[0] != self.reference_set.m:
            raise DimensionError('phi input', self.reference_set.m, phi.layer_sizes[0])
        if psi.layer_sizes[0] != self.encoding.shape[1]:
            raise DimensionError('psi input', self.encoding.shape[1], psi.layer_sizes[0])
        if phi.layer_sizes[-1] != psi.layer_sizes[-1]:
            raise DimensionError('psi output', phi.layer_sizes[-1], psi.layer_sizes[-1])

    @classmethod
    def initialize(cls, reference_set, gamma, encoding, rng, hidden_sizes=None,
                   embed_dim=constants.EMBED_DIM, activation='relu'):
        hidden_sizes = constants.HIDDEN_SIZES if hidden_sizes is None else hidden_sizes
        phi = init_mlp([reference_set.m] + list(hidden_sizes) + [embed_dim], rng, activation)
        psi = init_mlp([np.shape(encoding)[1]] + list(hidden_sizes) + [embed_dim], rng, activation)
        return cls(reference_set, gamma, encoding, phi, psi)

    @property
    def phi(self):
        return self._phi

    @property
    def psi(self):
        return self._psi

    @property
    def nets(self):
        return OrderedDict([('phi', self._phi), ('psi', self._psi)])

    def set_parameters(self, arrays):
        arrays = list(arrays)
        split = len(self._phi.arrays())
        self._phi = self._phi.with_arrays(arrays[:split])
        self._psi = self._psi.with_arrays(arrays[split:])

    def forward(self, reward_vector, xs):
        P, phi_cache = mlp_forward_cached(self._phi, reward_vector[None, :])
        Psi, psi_cache = mlp_forward_cached(self._psi, self.encoding[xs])
        return Psi @ P[0], (P, Psi, phi_cache, psi_cache)

    def backward(self, cache, grad_out):
        P, Psi, phi_cache, psi_cache = cache
        grad_phi, _ = mlp_backward(self._phi, phi_cache, (grad_out @ Psi)[None, :])
        grad_psi, _ = mlp_backward(self._psi, psi_cache, np.outer(grad_out, P[0]))
        return grad_phi.arrays() + grad_psi.arrays()
