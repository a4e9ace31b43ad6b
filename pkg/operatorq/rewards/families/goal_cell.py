import numpy as np

from ..abstract import RewardFamily, family_name

__all__ = ['GoalCell']


@family_name('goal-cell')
class GoalCell(RewardFamily):
    """r(s, a) = 1 if s is the goal cell g, else 0.

    Train goals are drawn from the first `train_fraction` of the cells, test
    goals from all cells.
    """

    def __init__(self, mdp, train_fraction=0.6, **options):
        self._train_high = self._train_states(mdp, train_fraction)
        options['train_fraction'] = train_fraction
        super(GoalCell, self).__init__(mdp, **options)

    def param_range(self, split):
        self._check_split(split)
        high = self._train_high if split == 'train' else self.mdp.num_states
        return np.array([0.0]), np.array([float(high)])

    def draw_params(self, rng, split):
        low, high = self.param_range(split)
        return np.array([float(rng.integers(int(low[0]), int(high[0])))])

    def table(self, params):
        goal = int(params[0])
        table = np.zeros((self.mdp.num_states, self.mdp.num_actions))
        table[goal, :] = 1.0
        return table.reshape(-1)

    def reward_bound(self):
        return 1.0
