import numpy as np

from ...errors import DimensionError
from ..abstract import OperatorModel, design_name

__all__ = ['WeightTableOperator']


@design_name('weight-table')
class WeightTableOperator(OperatorModel):
    """Explicit weights w(xi_j | x) per pair, no trainable parameters.
    Used for exact oracles and best-fit diagnostics."""

    def __init__(self, reference_set, gamma, encoding, weights):
        super(WeightTableOperator, self).__init__(reference_set, gamma, encoding)
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (self.num_pairs, reference_set.m):
            raise DimensionError('weight table', (self.num_pairs, reference_set.m), weights.shape)
        self._weights = weights

    def weights(self, xs):
        return self._weights[self._check_xs(xs)]

    def set_parameters(self, arrays):
        if list(arrays):
            raise ValueError("A weight table has no trainable parameters.")

    def forward(self, reward_vector, xs):
        return self._weights[xs] @ reward_vector / (1.0 - self.gamma), None

    def backward(self, cache, grad_out):
        return []

    def extra_arrays(self):
        return {'weights': self._weights}

    @classmethod
    def from_nets(cls, reference_set, gamma, encoding, nets, header, arrays):
        return cls(reference_set, gamma, encoding, arrays['weights'])
