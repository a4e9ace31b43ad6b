import numpy as np

from ...mdp import state_distance
from ..abstract import RewardFamily, family_name

__all__ = ['RbfBump']


@family_name('rbf-bump')
class RbfBump(RewardFamily):
    """r(s, a) = exp(-dist(s, c)^2 / (2 sigma^2)) around a center cell c.
    Actions are ignored; dist is the grid Manhattan distance."""

    def __init__(self, mdp, sigma=1.5, train_fraction=0.6, **options):
        self._sigma = float(sigma)
        self._distance = state_distance(mdp)
        self._train_high = self._train_states(mdp, train_fraction)
        options.update(sigma=sigma, train_fraction=train_fraction)
        super(RbfBump, self).__init__(mdp, **options)

    def param_range(self, split):
        self._check_split(split)
        high = self._train_high if split == 'train' else self.mdp.num_states
        return np.array([0.0]), np.array([float(high)])

    def draw_params(self, rng, split):
        low, high = self.param_range(split)
        return np.array([float(rng.integers(int(low[0]), int(high[0])))])

    def table(self, params):
        center = int(params[0])
        bump = np.exp(-self._distance[:, center] ** 2 / (2.0 * self._sigma ** 2))
        return np.repeat(bump, self.mdp.num_actions)

    def reward_bound(self):
        return 1.0
