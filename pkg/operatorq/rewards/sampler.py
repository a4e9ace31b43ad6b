import logging

import numpy as np

from .abstract import SPLITS

LOGGER = logging.getLogger(__name__)

__all__ = ['RewardSampler', 'RewardSet', 'sample_reward', 'freeze_rewards']


class RewardSampler(object):
    """Draws rewards from one split of a family. Owns its generator: the
    same (family, split, seed) always yields the same sequence."""

    def __init__(self, family, split='train', seed=0):
        super(RewardSampler, self).__init__()
        if split not in SPLITS:
            raise ValueError(
                "Parameter 'split' must be 'train' or 'test' instead of '{}'.".format(split))
        self._family = family
        self._split = split
        self._seed = seed
        self._rng = np.random.default_rng(seed)

    @property
    def family(self):
        return self._family

    @property
    def split(self):
        return self._split

    @property
    def seed(self):
        return self._seed

    def sample(self):
        params = self._family.draw_params(self._rng, self._split)
        return self._family.make(params, split=self._split)


class RewardSet(object):
    """A frozen list of rewards sampled uniformly."""

    def __init__(self, rewards, seed=0):
        super(RewardSet, self).__init__()
        if not rewards:
            raise ValueError("A reward set needs at least one reward.")
        self._rewards = list(rewards)
        self._rng = np.random.default_rng(seed)

    def __len__(self):
        return len(self._rewards)

    def __iter__(self):
        return iter(self._rewards)

    def __getitem__(self, index):
        return self._rewards[index]

    @property
    def rewards(self):
        return list(self._rewards)

    def sample(self):
        return self._rewards[int(self._rng.integers(len(self._rewards)))]


def sample_reward(sampler):
    return sampler.sample()


def freeze_rewards(sampler, count, seed=0):
    rewards = [sampler.sample() for _ in range(count)]
    LOGGER.debug("Froze {} {} rewards of family '{}'.".format(
        count, sampler.split, sampler.family.name))
    return RewardSet(rewards, seed=seed)
