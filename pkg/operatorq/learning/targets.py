import logging
from collections import namedtuple

import numpy as np

from ..errors import DimensionError, NonFiniteError
from ..mdp import sample_rows

LOGGER = logging.getLogger(__name__)

__all__ = [
    'Batch', 'TargetModel', 'soft_update', 'bellman_target_eval', 'bellman_target_opt',
    'bellman_loss']


class Batch(namedtuple('Batch', ['states', 'actions', 'next_states'])):
    """A minibatch of transitions as index arrays."""

    __slots__ = ()

    @classmethod
    def from_dataset(cls, dataset, rows=None):
        records = dataset.records if rows is None else dataset.records[rows]
        return cls(records[:, 0], records[:, 1], records[:, 2])

    def pairs(self, num_actions):
        return self.states * num_actions + self.actions

    def __len__(self):
        return self.states.shape[0]


class TargetModel(object):
    """Frozen parameter copy used for Bellman targets."""

    def __init__(self, model, copy=True):
        super(TargetModel, self).__init__()
        self._model = model.copy() if copy else model

    @property
    def model(self):
        return self._model

    def parameters(self):
        return self._model.parameters()

    def next_values(self, r, next_states):
        """(b, A) table of G_theta'[r](s', a') for every action."""
        model = self._model
        num_actions = model.num_actions
        xs = (next_states[:, None] * num_actions + np.arange(num_actions)[None, :]).reshape(-1)
        values = model.predict(model.reward_vector(r), xs)
        return values.reshape(len(next_states), num_actions)


def soft_update(target, live, alpha):
    """theta' <- (1 - alpha) theta' + alpha theta, elementwise."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError("Parameter 'alpha' should be in (0, 1] instead of {}.".format(alpha))
    old, new = target.parameters(), live.parameters()
    if len(old) != len(new):
        raise DimensionError('parameter list', len(old), len(new))
    mixed = []
    for i, (t, p) in enumerate(zip(old, new)):
        if t.shape != p.shape:
            raise DimensionError('parameter {}'.format(i), t.shape, p.shape)
        mixed.append(p.copy() if alpha == 1.0 else (1.0 - alpha) * t + alpha * p)
    model = target.model._clone()
    model.set_parameters(mixed)
    return TargetModel(model, copy=False)


def _immediate(r, batch, num_actions):
    return r.evaluate_many(batch.pairs(num_actions), num_actions)


def bellman_target_eval(target, r, batch, policy, rng=None, sampled=False):
    """y = r(s, a) + gamma E_{a' ~ pi(.|s')} G'[r](s', a'). With `sampled`,
    one a' per transition is drawn from pi instead."""
    model = target.model
    values = target.next_values(r, batch.next_states)
    probs = policy.probs[batch.next_states]
    if sampled:
        if rng is None:
            raise ValueError("Sampled targets need a random generator.")
        chosen = sample_rows(probs, rng)
        future = values[np.arange(len(batch)), chosen]
    else:
        future = (probs * values).sum(axis=1)
    return _immediate(r, batch, model.num_actions) + model.gamma * future


def bellman_target_opt(target, r, batch):
    """y = r(s, a) + gamma max_a' G'[r](s', a')."""
    model = target.model
    future = target.next_values(r, batch.next_states).max(axis=1)
    return _immediate(r, batch, model.num_actions) + model.gamma * future


def bellman_loss(model, target, rewards, batch, mode, policy=None, rng=None, sampled_targets=False):
    """Mean squared Bellman residual over the batch, averaged over `rewards`.
    Returns (loss, gradients aligned with model.parameters())."""
    if mode == 'evaluation' and policy is None:
        raise ValueError("Evaluation mode needs a target policy.")
    pairs = batch.pairs(model.num_actions)
    grads = [np.zeros_like(p) for p in model.parameters()]
    total = 0.0
    for r in rewards:
        if mode == 'evaluation':
            y = bellman_target_eval(target, r, batch, policy, rng, sampled_targets)
        else:
            y = bellman_target_opt(target, r, batch)
        outputs, cache = model.forward(model.reward_vector(r), pairs)
        residual = outputs - y
        loss = float(np.mean(residual ** 2))
        if not np.isfinite(loss):
            raise NonFiniteError('loss')
        total += loss
        grad_out = 2.0 * residual / (len(pairs) * len(rewards))
        for i, g in enumerate(model.backward(cache, grad_out)):
            grads[i] += g
    return total / len(rewards), grads
