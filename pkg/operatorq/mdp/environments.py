import abc
import logging

import numpy as np

from .. import constants
from ..registry import Registry
from .core import TabularMdp, optimal_policy

LOGGER = logging.getLogger(__name__)

__all__ = ['ENVIRONMENTS', 'env_name', 'Environment', 'GridWorld', 'names', 'get', 'build']

ENVIRONMENTS = Registry('environment', '__env_name__')
env_name = ENVIRONMENTS.name

# up, right, down, left
GRID_MOVES = [(-1, 0), (0, 1), (1, 0), (0, -1)]


class Environment(metaclass=abc.ABCMeta):

    default_gamma = constants.DEFAULT_GAMMA

    @property
    def name(self):
        return ENVIRONMENTS.get_name(self)

    @abc.abstractmethod
    def transition(self):
        raise NotImplementedError()

    def initial_dist(self, num_states):
        dist = np.zeros(num_states)
        dist[0] = 1.0
        return dist

    def coords(self):
        return None

    def build(self, gamma=None):
        transition = self.transition()
        return TabularMdp(
            transition,
            self.initial_dist(transition.shape[0]),
            self.default_gamma if gamma is None else gamma,
            env_id=self.name,
            coords=self.coords())

    def default_reward(self, mdp):
        """Reward the target policy is optimal for: 1 on the last state."""
        table = np.zeros(mdp.num_pairs)
        table[(mdp.num_states - 1) * mdp.num_actions:] = 1.0
        return table

    def target_policy(self, mdp):
        return optimal_policy(mdp, self.default_reward(mdp))


class GridWorld(Environment):
    """Rectangular grid, four moves, walls keep the agent in place. With
    probability `slip` the chosen move is replaced by a uniformly random one.
    Starts uniformly over cells."""

    height = 5
    width = 5
    slip = 0.0

    def coords(self):
        rows, cols = np.divmod(np.arange(self.height * self.width), self.width)
        return np.stack([rows, cols], axis=1).astype(float)

    def initial_dist(self, num_states):
        return np.full(num_states, 1.0 / num_states)

    def _move(self, s, a):
        row, col = divmod(s, self.width)
        d_row, d_col = GRID_MOVES[a]
        row = min(max(row + d_row, 0), self.height - 1)
        col = min(max(col + d_col, 0), self.width - 1)
        return row * self.width + col

    def transition(self):
        num_states, num_actions = self.height * self.width, len(GRID_MOVES)
        transition = np.zeros((num_states, num_actions, num_states))
        for s in range(num_states):
            for a in range(num_actions):
                transition[s, a, self._move(s, a)] += 1.0 - self.slip
                for other in range(num_actions):
                    transition[s, a, self._move(s, other)] += self.slip / num_actions
        return transition


@env_name('grid5')
class Grid5(GridWorld):
    pass


@env_name('grid5-slip')
class Grid5Slip(GridWorld):
    slip = 0.1


@env_name('chain2')
class Chain2(Environment):
    """0 -> 1 -> 1, one action."""
    default_gamma = 0.5

    def transition(self):
        return np.array([[[0.0, 1.0]], [[0.0, 1.0]]])


@env_name('loop1')
class Loop1(Environment):
    default_gamma = 0.5

    def transition(self):
        return np.ones((1, 1, 1))


@env_name('bandit2')
class Bandit2(Environment):
    """One state, two self-loop actions."""
    default_gamma = 0.5

    def transition(self):
        return np.ones((1, 2, 1))

    def default_reward(self, mdp):
        return np.array([0.0, 1.0])


def names():
    return ENVIRONMENTS.names()


def get(name):
    return ENVIRONMENTS.create(name)


def build(name, gamma=None):
    return get(name).build(gamma)
