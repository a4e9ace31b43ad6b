import numpy as np

from ..abstract import RewardFamily, family_name

__all__ = ['FeatureLinear', 'gaussian_features']

FEATURE_DIM = 8


def gaussian_features(mdp, dim=FEATURE_DIM, seed=0):
    """`dim` fixed standard-normal features per pair plus a constant one."""
    rng = np.random.default_rng(seed)
    features = rng.standard_normal((mdp.num_pairs, dim))
    return np.hstack([features, np.ones((mdp.num_pairs, 1))])


@family_name('feature-linear')
class FeatureLinear(RewardFamily):
    """r = phi . w with w uniform in a box."""

    def __init__(self, mdp, feature_seed=0, dim=FEATURE_DIM, train_scale=1.0, test_scale=1.5,
                 **options):
        self._phi = gaussian_features(mdp, dim, feature_seed)
        self._train_scale = float(train_scale)
        self._test_scale = float(test_scale)
        options.update(feature_seed=feature_seed, dim=dim,
                       train_scale=train_scale, test_scale=test_scale)
        super(FeatureLinear, self).__init__(mdp, **options)

    @property
    def phi(self):
        return self._phi

    def feature_map(self):
        return self._phi

    def param_range(self, split):
        self._check_split(split)
        scale = self._train_scale if split == 'train' else self._test_scale
        dim = self._phi.shape[1]
        return np.full(dim, -scale), np.full(dim, scale)

    def draw_params(self, rng, split):
        low, high = self.param_range(split)
        return rng.uniform(low, high)

    def table(self, params):
        return self._phi @ params

    def reward_bound(self):
        return float(np.max(np.abs(self._phi).sum(axis=1)) * max(self._train_scale, self._test_scale))
