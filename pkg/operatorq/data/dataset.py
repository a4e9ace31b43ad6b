import logging
import math

import numpy as np

from .. import constants
from ..errors import DimensionError
from ..mdp import PolicyTable

LOGGER = logging.getLogger(__name__)

__all__ = [
    'TransitionDataset', 'BehaviorSpec', 'generate_dataset', 'generate_final_buffer',
    'empirical_transitions']

NOT_APPLICABLE = 'n/a'


class TransitionDataset(object):
    """Logged (s, a, s') records. Rewards are never stored."""

    def __init__(self, records, metadata):
        super(TransitionDataset, self).__init__()
        records = np.asarray(records, dtype=np.int64).reshape(-1, 3)
        metadata = dict(metadata)
        for key in ['num_states', 'num_actions']:
            if key not in metadata:
                raise ValueError("Dataset metadata should carry '{}'.".format(key))
        num_states, num_actions = int(metadata['num_states']), int(metadata['num_actions'])
        if records.size and (records.min() < 0 or records[:, [0, 2]].max() >= num_states
                             or records[:, 1].max() >= num_actions):
            raise IndexError("Dataset records reference states or actions out of range.")
        metadata['n'] = int(records.shape[0])
        metadata.setdefault('format_version', constants.FORMAT_VERSION)
        records.flags.writeable = False
        self._records = records
        self._metadata = metadata

    @property
    def records(self):
        return self._records

    @property
    def metadata(self):
        return dict(self._metadata)

    @property
    def states(self):
        return self._records[:, 0]

    @property
    def actions(self):
        return self._records[:, 1]

    @property
    def next_states(self):
        return self._records[:, 2]

    @property
    def num_states(self):
        return int(self._metadata['num_states'])

    @property
    def num_actions(self):
        return int(self._metadata['num_actions'])

    @property
    def gamma(self):
        return self._metadata.get('gamma')

    @property
    def env_id(self):
        return self._metadata.get('env_id')

    def pair_indices(self):
        return self.states * self.num_actions + self.actions

    def check_mdp(self, mdp):
        """Sizes must match; env_id and gamma too when both sides record them."""
        if (self.num_states, self.num_actions) != (mdp.num_states, mdp.num_actions):
            raise DimensionError('dataset shape', (mdp.num_states, mdp.num_actions),
                                 (self.num_states, self.num_actions))
        if self.env_id is not None and mdp.env_id is not None and self.env_id != mdp.env_id:
            raise ValueError("Dataset was generated on '{}', not on '{}'.".format(
                self.env_id, mdp.env_id))
        if self.gamma is not None and not math.isclose(self.gamma, mdp.gamma, abs_tol=1e-12):
            raise ValueError("Dataset was generated with gamma={}, not gamma={}.".format(
                self.gamma, mdp.gamma))

    def __len__(self):
        return self._records.shape[0]

    def __eq__(self, other):
        return isinstance(other, TransitionDataset) \
            and np.array_equal(self._records, other._records) \
            and self._metadata == other._metadata

    def __repr__(self):
        return "TransitionDataset(env_id={!r}, n={})".format(self.env_id, len(self))


class BehaviorSpec(object):
    """Uniform random action with probability p, base policy otherwise."""

    def __init__(self, base_policy, p, name='target'):
        super(BehaviorSpec, self).__init__()
        if not 0.0 <= p <= 1.0:
            raise ValueError("Parameter 'p' should be in [0, 1] instead of {}.".format(p))
        self.base_policy = base_policy
        self.p = float(p)
        self.name = name

    def mixture(self):
        probs = self.base_policy.probs
        return PolicyTable((1.0 - self.p) * probs + self.p / probs.shape[1])

    def __repr__(self):
        return "BehaviorSpec({}, p={})".format(self.name, self.p)


def _draw(cumulative, rng):
    return min(int(np.searchsorted(cumulative, rng.random(), side='right')), cumulative.size - 1)


def _rollouts(mdp, behavior, n, rng, horizon):
    policy_cdf = np.cumsum(behavior.base_policy.probs, axis=1)
    transition_cdf = np.cumsum(mdp.transition, axis=2)
    initial_cdf = np.cumsum(mdp.initial_dist)
    records = np.empty((n, 3), dtype=np.int64)
    count, episodes = 0, 0
    while count < n:
        s = _draw(initial_cdf, rng)
        episodes += 1
        for _ in range(horizon):
            if rng.random() < behavior.p:
                a = int(rng.integers(mdp.num_actions))
            else:
                a = _draw(policy_cdf[s], rng)
            s_next = _draw(transition_cdf[s, a], rng)
            records[count] = (s, a, s_next)
            count += 1
            if count == n:
                break
            s = s_next
    LOGGER.debug("Collected {} transitions over {} episodes with {!r}.".format(n, episodes, behavior))
    return records


def _metadata(mdp, **fields):
    metadata = {
        'format_version': constants.FORMAT_VERSION,
        'env_id': mdp.env_id,
        'gamma': mdp.gamma,
        'num_states': mdp.num_states,
        'num_actions': mdp.num_actions,
        'sigma': NOT_APPLICABLE,
    }
    metadata.update(fields)
    return metadata


def generate_dataset(mdp, behavior, n, rng, seed=None, horizon=constants.EPISODE_HORIZON):
    """Episodes from the initial distribution under the behavior mixture,
    truncated at `horizon`, until n transitions are collected."""
    if n < 1:
        raise ValueError("Parameter 'n' should be at least 1 instead of {}.".format(n))
    records = _rollouts(mdp, behavior, n, rng, horizon)
    return TransitionDataset(records, _metadata(
        mdp, kind='behavior', policy=behavior.name, p=behavior.p, seed=seed))


def generate_final_buffer(mdp, base_policy, n, rng, seed=None,
                          probabilities=constants.FINAL_BUFFER_PROBABILITIES,
                          horizon=constants.EPISODE_HORIZON, name='target'):
    """Equal shares from one behavior per random-action probability,
    emulating the policy drift of a training replay buffer."""
    if n < len(probabilities):
        raise ValueError(
            "Parameter 'n' should be at least {} instead of {}.".format(len(probabilities), n))
    shares = [n // len(probabilities)] * len(probabilities)
    shares[0] += n - sum(shares)
    parts = [_rollouts(mdp, BehaviorSpec(base_policy, p, name), share, rng, horizon)
             for p, share in zip(probabilities, shares)]
    return TransitionDataset(np.concatenate(parts), _metadata(
        mdp, kind='final-buffer', policy=name, p=list(probabilities), seed=seed))


def empirical_transitions(dataset, mdp):
    """Empirical P^(s' | s, a) and the visit counts behind it. Unvisited
    (s, a) rows are zero."""
    dataset.check_mdp(mdp)
    counts = np.zeros(mdp.transition.shape)
    np.add.at(counts, (dataset.states, dataset.actions, dataset.next_states), 1.0)
    visits = counts.sum(axis=2)
    probs = np.divide(counts, visits[:, :, None], out=np.zeros_like(counts),
                      where=visits[:, :, None] > 0)
    return probs, visits
