import numpy as np

from ..mdp import StateAction, visitation_distribution
from .abstract import DESIGNS

__all__ = [
    'initialize_model', 'attention_weights', 'linear_weights', 'apply_operator',
    'apply_linear_fast', 'apply_linear_naive', 'maxout_active_head',
    'implied_visitation', 'reference_visitation', 'total_variation']


def initialize_model(design, reference_set, gamma, encoding, rng, **kwargs):
    """Fresh operator of the named design."""
    cls = DESIGNS.get(design)
    if not hasattr(cls, 'initialize'):
        raise ValueError("Design '{}' has no trainable initialization.".format(design))
    return cls.initialize(reference_set, gamma, encoding, rng, **kwargs)


def _pair(model, x):
    if isinstance(x, tuple):
        return StateAction(*x).index(model.num_actions)
    return int(x)


def _require(model, *designs):
    if model.design not in designs:
        raise ValueError(
            "Parameter 'model' should be of design {} instead of '{}'.".format(
                ' or '.join(repr(d) for d in designs), model.design))


def attention_weights(model, x, head=0):
    if model.design == 'maxout':
        model = model.heads[head]
    _require(model, 'attention')
    return model.weights([_pair(model, x)])[0]


def linear_weights(model, x):
    _require(model, 'linear')
    return model.weights([_pair(model, x)])[0]


def apply_operator(model, r, x):
    """G_theta[r](x) for a single pair, through the explicit weights where
    the design has them."""
    rv = model.reward_vector(r)
    index = _pair(model, x)
    if model.design == 'linear':
        return float(model.predict_naive(rv, [index])[0])
    return float(model.predict(rv, [index])[0])


def apply_linear_fast(model, r, xs):
    _require(model, 'linear')
    return model.predict(model.reward_vector(r), [_pair(model, x) for x in xs])


def apply_linear_naive(model, r, xs):
    _require(model, 'linear')
    return model.predict_naive(model.reward_vector(r), [_pair(model, x) for x in xs])


def maxout_active_head(model, r, x):
    _require(model, 'maxout')
    return int(model.active_heads(model.reward_vector(r), [_pair(model, x)])[0])


def implied_visitation(model, x):
    """Attention weights read as d_pi(. | x) restricted to Xi and renormalized."""
    weights = attention_weights(model, x)
    return weights / weights.sum()


def reference_visitation(mdp, policy, reference_set, x):
    """Exact d_pi(. | x) restricted to Xi and renormalized."""
    mass = visitation_distribution(mdp, policy, x)[reference_set.indices]
    total = mass.sum()
    if total <= 0.0:
        return np.full(reference_set.m, 1.0 / reference_set.m)
    return mass / total


def total_variation(p, q):
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())
