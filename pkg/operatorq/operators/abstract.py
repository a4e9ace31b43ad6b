import abc
import copy
import logging
from collections import OrderedDict

import numpy as np

from ..errors import DimensionError, NonFiniteError
from ..mdp import StateAction
from ..registry import Registry

LOGGER = logging.getLogger(__name__)

__all__ = ['DESIGNS', 'design_name', 'ReferenceSet', 'OperatorModel', 'softmax']

DESIGNS = Registry('operator design', '__design_name__')
design_name = DESIGNS.name


def softmax(logits):
    """Row-wise softmax with max-logit subtraction."""
    shifted = logits - logits.max(axis=-1, keepdims=True)
    weights = np.exp(shifted)
    return weights / weights.sum(axis=-1, keepdims=True)


class ReferenceSet(object):
    """Reference points Xi, fixed after construction."""

    def __init__(self, points, num_actions, requested=None):
        super(ReferenceSet, self).__init__()
        points = [StateAction(int(s), int(a)) for s, a in points]
        if not points:
            raise ValueError("A reference set needs at least one point.")
        self._points = tuple(points)
        self._num_actions = int(num_actions)
        self._indices = np.array([p.index(num_actions) for p in points], dtype=int)
        self._indices.flags.writeable = False
        self._requested = len(points) if requested is None else int(requested)

    @classmethod
    def from_indices(cls, indices, num_actions, requested=None):
        return cls([StateAction.from_index(i, num_actions) for i in indices], num_actions, requested)

    @property
    def points(self):
        return self._points

    @property
    def indices(self):
        return self._indices

    @property
    def num_actions(self):
        return self._num_actions

    @property
    def m(self):
        return len(self._points)

    @property
    def requested_m(self):
        return self._requested

    def __len__(self):
        return len(self._points)

    def __eq__(self, other):
        return isinstance(other, ReferenceSet) and self._points == other._points \
            and self._num_actions == other._num_actions

    def __repr__(self):
        return "ReferenceSet(m={}, requested={})".format(self.m, self._requested)


class OperatorModel(metaclass=abc.ABCMeta):
    """G_theta[r](x) from the reward values r(xi_j) on the reference set.

    Pairs x are flat indices into `encoding`, the (|X|, d) network input table.
    """

    def __init__(self, reference_set, gamma, encoding):
        super(OperatorModel, self).__init__()
        if not 0.0 < gamma < 1.0:
            raise ValueError("Parameter 'gamma' should be in (0, 1) instead of {}.".format(gamma))
        self._reference_set = reference_set
        self._gamma = float(gamma)
        self._encoding = np.asarray(encoding, dtype=float)

    @property
    def design(self):
        return DESIGNS.get_name(self)

    @property
    def reference_set(self):
        return self._reference_set

    @property
    def gamma(self):
        return self._gamma

    @property
    def encoding(self):
        return self._encoding

    @property
    def num_pairs(self):
        return self._encoding.shape[0]

    @property
    def num_actions(self):
        return self._reference_set.num_actions

    @property
    def nets(self):
        """Trainable sub-networks by name, in parameter order."""
        return OrderedDict()

    def parameters(self):
        result = []
        for net in self.nets.values():
            result += net.arrays()
        return result

    @abc.abstractmethod
    def set_parameters(self, arrays):
        raise NotImplementedError()

    def copy(self):
        clone = self._clone()
        clone.set_parameters([a.copy() for a in self.parameters()])
        return clone

    def _clone(self):
        return copy.copy(self)

    def reward_vector(self, r):
        """r(xi_1), ..., r(xi_m) for a RewardFn or a full value table."""
        if hasattr(r, 'evaluate_many'):
            values = r.evaluate_many(self._reference_set.indices, self.num_actions)
        else:
            table = np.asarray(r, dtype=float)
            if table.shape != (self.num_pairs,):
                raise DimensionError('reward table', (self.num_pairs,), table.shape)
            values = table[self._reference_set.indices]
        if not np.all(np.isfinite(values)):
            raise NonFiniteError('reward values on the reference set')
        return values

    def _check_xs(self, xs):
        xs = np.atleast_1d(np.asarray(xs, dtype=int))
        if xs.size and (xs.min() < 0 or xs.max() >= self.num_pairs):
            raise IndexError("Pair indices should be in [0, {}).".format(self.num_pairs))
        return xs

    @abc.abstractmethod
    def forward(self, reward_vector, xs):
        """Returns (outputs over xs, cache for backward)."""
        raise NotImplementedError()

    @abc.abstractmethod
    def backward(self, cache, grad_out):
        """Gradient list aligned with parameters()."""
        raise NotImplementedError()

    def predict(self, reward_vector, xs):
        outputs, _ = self.forward(np.asarray(reward_vector, dtype=float), self._check_xs(xs))
        return outputs

    def predict_table(self, r):
        """G_theta[r] over every pair."""
        return self.predict(self.reward_vector(r), np.arange(self.num_pairs))

    def header(self):
        """Design-specific checkpoint fields."""
        return {}

    def extra_arrays(self):
        """Non-network arrays a checkpoint has to carry."""
        return {}

    @classmethod
    def from_nets(cls, reference_set, gamma, encoding, nets, header, arrays):
        return cls(reference_set, gamma, encoding, *nets.values())

    def __repr__(self):
        return "{}(m={}, gamma={})".format(type(self).__name__, self._reference_set.m, self._gamma)
