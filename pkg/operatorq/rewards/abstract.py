import abc
import logging
import math

import numpy as np

from ..errors import ConfigError
from ..registry import Registry

LOGGER = logging.getLogger(__name__)

__all__ = [
    'FAMILIES', 'family_name', 'RewardFn', 'RewardFamily',
    'tabular_reward', 'constant_reward', 'evaluate_reward', 'tabularize', 'SPLITS']

FAMILIES = Registry('reward family', '__family_name__')
family_name = FAMILIES.name

SPLITS = ['train', 'test']


class RewardFn(object):
    """Deterministic reward r: S x A -> R.

    `evaluator(states, actions)` is vectorized over index arrays. An
    `index_free` reward ignores the pair, so flat indices need no `num_actions`.
    """

    def __init__(self, evaluator, kind='parametric', num_actions=None, table=None,
                 params=None, family_id=None, split=None, options=None, reward_bound=None,
                 index_free=False):
        super(RewardFn, self).__init__()
        if kind not in ['tabular', 'parametric']:
            raise ValueError(
                "Parameter 'kind' must be 'tabular' or 'parametric' "
                "instead of '{}'.".format(kind))
        self._evaluator = evaluator
        self._kind = kind
        self._num_actions = num_actions
        self._table = table
        self._params = None if params is None else np.asarray(params, dtype=float)
        self._family_id = family_id
        self._split = split
        self._options = dict(options or {})
        self._reward_bound = reward_bound
        self._index_free = index_free

    @property
    def kind(self):
        return self._kind

    @property
    def table(self):
        return self._table

    @property
    def params(self):
        return self._params

    @property
    def family_id(self):
        return self._family_id

    @property
    def split(self):
        return self._split

    @property
    def options(self):
        return self._options

    @property
    def reward_bound(self):
        return self._reward_bound

    def _split_index(self, indices, num_actions):
        num_actions = num_actions or self._num_actions
        if num_actions is None and self._index_free:
            indices = np.asarray(indices, dtype=int)
            return indices, np.zeros_like(indices)
        if num_actions is None:
            raise ValueError("This reward needs 'num_actions' to decode flat pair indices.")
        return np.divmod(np.asarray(indices, dtype=int), num_actions)

    def evaluate(self, x, num_actions=None):
        if isinstance(x, tuple):
            states, actions = np.array([x[0]]), np.array([x[1]])
        else:
            states, actions = self._split_index(np.array([x]), num_actions)
        return float(self._evaluator(states, actions)[0])

    def evaluate_many(self, indices, num_actions=None):
        states, actions = self._split_index(indices, num_actions)
        return np.asarray(self._evaluator(states, actions), dtype=float)

    def tabularize(self, mdp):
        if self._kind == 'tabular':
            return self._table
        return self.evaluate_many(np.arange(mdp.num_pairs), mdp.num_actions)

    def scaled(self, alpha, shift=0.0):
        """Returns alpha * r + shift."""
        evaluator = self._evaluator
        return RewardFn(lambda s, a: alpha * evaluator(s, a) + shift,
                        num_actions=self._num_actions, index_free=self._index_free)

    def __repr__(self):
        if self._family_id:
            return "RewardFn({}, params={})".format(self._family_id, self._params.tolist())
        return "RewardFn({})".format(self._kind)


def tabular_reward(table, num_actions):
    table = np.array(table, dtype=float)
    table.flags.writeable = False
    return RewardFn(lambda s, a: table[s * num_actions + a], kind='tabular',
                    num_actions=num_actions, table=table,
                    reward_bound=float(np.max(np.abs(table))) if table.size else 0.0)


def constant_reward(c):
    c = float(c)
    return RewardFn(lambda s, a: np.full(np.shape(s), c), reward_bound=abs(c), index_free=True)


def evaluate_reward(r, x, num_actions=None):
    return r.evaluate(x, num_actions)


def tabularize(r, mdp):
    return r.tabularize(mdp)


class RewardFamily(metaclass=abc.ABCMeta):
    """A parametric family of rewards on one MDP with separate train and test
    parameter ranges. The test range strictly contains the train range."""

    def __init__(self, mdp, **options):
        super(RewardFamily, self).__init__()
        self._mdp = mdp
        self._options = options
        train, test = self.param_range('train'), self.param_range('test')
        if not (np.all(test[0] <= train[0]) and np.all(test[1] >= train[1])) \
                or (np.array_equal(test[0], train[0]) and np.array_equal(test[1], train[1])):
            raise ValueError(
                "The test range of family '{}' should strictly contain "
                "its train range.".format(self.name))

    @property
    def name(self):
        return FAMILIES.get_name(self)

    @property
    def mdp(self):
        return self._mdp

    @property
    def options(self):
        return dict(self._options)

    @abc.abstractmethod
    def param_range(self, split):
        """Returns (low, high) parameter arrays for the split."""
        raise NotImplementedError()

    @abc.abstractmethod
    def draw_params(self, rng, split):
        raise NotImplementedError()

    @abc.abstractmethod
    def table(self, params):
        """Reward values over all pairs for the given parameters."""
        raise NotImplementedError()

    @abc.abstractmethod
    def reward_bound(self):
        raise NotImplementedError()

    def feature_map(self):
        """Basis features over X for the successor-feature baseline."""
        from .families.feature_linear import gaussian_features
        return gaussian_features(self._mdp, seed=self._options.get('feature_seed', 0))

    def make(self, params, split=None):
        params = np.asarray(params, dtype=float)
        table = np.array(self.table(params), dtype=float)
        table.flags.writeable = False
        num_actions = self._mdp.num_actions
        return RewardFn(lambda s, a: table[s * num_actions + a],
                        num_actions=num_actions, params=params,
                        family_id=self.name, split=split, options=self._options,
                        reward_bound=self.reward_bound())

    def _train_states(self, mdp, fraction):
        """Number of leading states used for training; at least one state
        is always held out for the test split."""
        num_states = mdp.num_states
        if num_states < 2:
            raise ConfigError(
                'family', "'{}' needs at least two states to hold one out".format(self.name))
        return min(max(1, int(math.ceil(fraction * num_states))), num_states - 1)

    @staticmethod
    def _check_split(split):
        if split not in SPLITS:
            raise ValueError(
                "Parameter 'split' must be 'train' or 'test' instead of '{}'.".format(split))
