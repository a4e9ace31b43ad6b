import numpy as np

from .. import constants
from ..errors import DimensionError
from .mlp import MlpParams

__all__ = ['OptimizerState', 'init_optimizer', 'optimizer_step']


class OptimizerState(object):
    """Adam moments shaped like a list of parameter arrays."""

    def __init__(self, first_moment, second_moment, step=0,
                 learning_rate=constants.LEARNING_RATE, beta1=constants.BETA1,
                 beta2=constants.BETA2, epsilon=constants.ADAM_EPSILON):
        super(OptimizerState, self).__init__()
        if step < 0:
            raise ValueError("Parameter 'step' can't be negative.")
        if len(first_moment) != len(second_moment):
            raise DimensionError('moments', len(first_moment), len(second_moment))
        self.first_moment = list(first_moment)
        self.second_moment = list(second_moment)
        self.step = int(step)
        self.learning_rate = float(learning_rate)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.epsilon = float(epsilon)

    def copy(self):
        return OptimizerState(
            [m.copy() for m in self.first_moment],
            [v.copy() for v in self.second_moment],
            self.step, self.learning_rate, self.beta1, self.beta2, self.epsilon)


def _arrays(params):
    return params.arrays() if isinstance(params, MlpParams) else list(params)


def init_optimizer(params, learning_rate=constants.LEARNING_RATE, **kwargs):
    arrays = _arrays(params)
    return OptimizerState(
        [np.zeros_like(a) for a in arrays],
        [np.zeros_like(a) for a in arrays],
        learning_rate=learning_rate, **kwargs)


def optimizer_step(state, params, grad):
    """One bias-corrected Adam update. Inputs are not modified; returns the
    new parameters (same kind as `params`) and the new state."""
    arrays, grads = _arrays(params), _arrays(grad)
    if len(arrays) != len(grads) or len(arrays) != len(state.first_moment):
        raise DimensionError('parameter list', len(arrays), (len(grads), len(state.first_moment)))

    new_state = state.copy()
    new_state.step += 1
    t = new_state.step
    correction1 = 1.0 - state.beta1 ** t
    correction2 = 1.0 - state.beta2 ** t

    updated = []
    for i, (p, g) in enumerate(zip(arrays, grads)):
        if p.shape != g.shape:
            raise DimensionError('gradient {}'.format(i), p.shape, g.shape)
        m = state.beta1 * state.first_moment[i] + (1.0 - state.beta1) * g
        v = state.beta2 * state.second_moment[i] + (1.0 - state.beta2) * g * g
        new_state.first_moment[i] = m
        new_state.second_moment[i] = v
        updated.append(p - state.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + state.epsilon))

    if isinstance(params, MlpParams):
        return params.with_arrays(updated), new_state
    return updated, new_state
