import logging

import numpy as np

from ..errors import DimensionError, NonFiniteError

LOGGER = logging.getLogger(__name__)

__all__ = [
    'MlpParams', 'init_mlp', 'mlp_forward', 'mlp_forward_cached', 'mlp_backward',
    'loss_gradient', 'value_and_gradient', 'mean_squared_loss']


def _relu(z):
    return np.maximum(z, 0.0)


def _relu_grad(z):
    return (z > 0).astype(float)


def _tanh_grad(z):
    return 1.0 - np.tanh(z) ** 2


_ACTIVATIONS = {
    'relu': (_relu, _relu_grad),
    'tanh': (np.tanh, _tanh_grad),
}


class MlpParams(object):
    """Dense layers y = a W + b; `activation` on hidden layers only.

    Weights are stored (fan_in, fan_out).
    """

    def __init__(self, layer_sizes, weights, biases, activation='relu'):
        super(MlpParams, self).__init__()
        layer_sizes = [int(size) for size in layer_sizes]
        if len(layer_sizes) < 2:
            raise ValueError("An MLP needs at least an input and an output layer.")
        if activation not in _ACTIVATIONS:
            raise ValueError(
                "Parameter 'activation' must be one of {} instead of '{}'.".format(
                    ', '.join(sorted(_ACTIVATIONS)), activation))
        if len(weights) != len(layer_sizes) - 1 or len(biases) != len(layer_sizes) - 1:
            raise DimensionError('layers', len(layer_sizes) - 1, (len(weights), len(biases)))
        weights = [np.asarray(w, dtype=float) for w in weights]
        biases = [np.asarray(b, dtype=float) for b in biases]
        for layer, (w, b) in enumerate(zip(weights, biases)):
            shape = (layer_sizes[layer], layer_sizes[layer + 1])
            if w.shape != shape:
                raise DimensionError('weights of layer {}'.format(layer), shape, w.shape)
            if b.shape != (shape[1],):
                raise DimensionError('biases of layer {}'.format(layer), (shape[1],), b.shape)
        self._layer_sizes = layer_sizes
        self._weights = weights
        self._biases = biases
        self._activation = activation

    @property
    def layer_sizes(self):
        return list(self._layer_sizes)

    @property
    def weights(self):
        return self._weights

    @property
    def biases(self):
        return self._biases

    @property
    def activation(self):
        return self._activation

    @property
    def num_layers(self):
        return len(self._weights)

    def arrays(self):
        """[W0, b0, W1, b1, ...]; the arrays are shared, not copied."""
        result = []
        for w, b in zip(self._weights, self._biases):
            result += [w, b]
        return result

    @classmethod
    def from_arrays(cls, layer_sizes, arrays, activation='relu'):
        arrays = list(arrays)
        return cls(layer_sizes, arrays[0::2], arrays[1::2], activation)

    def with_arrays(self, arrays):
        return MlpParams.from_arrays(self._layer_sizes, arrays, self._activation)

    def copy(self):
        return self.with_arrays([a.copy() for a in self.arrays()])

    def zeros_like(self):
        return self.with_arrays([np.zeros_like(a) for a in self.arrays()])

    def is_finite(self):
        return all(np.all(np.isfinite(a)) for a in self.arrays())

    def __repr__(self):
        return "MlpParams({}, activation={!r})".format(self._layer_sizes, self._activation)


def init_mlp(layer_sizes, rng, activation='relu', final_scale=1.0):
    """Uniform fan-in initialization, U(-1/sqrt(fan_in), 1/sqrt(fan_in)); the
    last layer is multiplied by `final_scale`."""
    weights, biases = [], []
    for layer, (fan_in, fan_out) in enumerate(zip(layer_sizes[:-1], layer_sizes[1:])):
        bound = 1.0 / np.sqrt(fan_in)
        w = rng.uniform(-bound, bound, size=(fan_in, fan_out))
        b = rng.uniform(-bound, bound, size=fan_out)
        if layer == len(layer_sizes) - 2:
            w, b = w * final_scale, b * final_scale
        weights.append(w)
        biases.append(b)
    return MlpParams(layer_sizes, weights, biases, activation)


def _as_batch(params, inputs):
    inputs = np.asarray(inputs, dtype=float)
    single = inputs.ndim == 1
    batch = inputs[None, :] if single else inputs
    if batch.ndim != 2 or batch.shape[1] != params.layer_sizes[0]:
        raise DimensionError('MLP input', params.layer_sizes[0], inputs.shape)
    return batch, single


def mlp_forward_cached(params, inputs):
    """Forward pass over a (n, d_in) batch. Returns the outputs and the
    per-layer (layer input, pre-activation) cache for mlp_backward."""
    batch, _ = _as_batch(params, inputs)
    activate, _ = _ACTIVATIONS[params.activation]
    cache = []
    a = batch
    last = params.num_layers - 1
    for layer, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ w + b
        cache.append((a, z))
        a = z if layer == last else activate(z)
    return a, cache


def mlp_forward(params, inputs):
    batch, single = _as_batch(params, inputs)
    outputs, _ = mlp_forward_cached(params, batch)
    return outputs[0] if single else outputs


def mlp_backward(params, cache, grad_out):
    """Reverse pass. Returns (gradient as MlpParams, gradient w.r.t. inputs)."""
    _, derivative = _ACTIVATIONS[params.activation]
    grad = np.asarray(grad_out, dtype=float)
    last = params.num_layers - 1
    grad_weights = [None] * params.num_layers
    grad_biases = [None] * params.num_layers
    for layer in range(last, -1, -1):
        a, z = cache[layer]
        if layer != last:
            grad = grad * derivative(z)
        grad_weights[layer] = a.T @ grad
        grad_biases[layer] = grad.sum(axis=0)
        if not (np.all(np.isfinite(grad_weights[layer])) and np.all(np.isfinite(grad_biases[layer]))):
            raise NonFiniteError('gradient', layer)
        grad = grad @ params.weights[layer].T
    return MlpParams(params.layer_sizes, grad_weights, grad_biases, params.activation), grad


def value_and_gradient(params, loss, batch):
    """`loss(outputs)` returns (mean batch loss, d loss / d outputs)."""
    outputs, cache = mlp_forward_cached(params, batch)
    value, grad_out = loss(outputs)
    if not np.isfinite(value):
        raise NonFiniteError('loss')
    grads, _ = mlp_backward(params, cache, grad_out)
    return float(value), grads


def loss_gradient(params, loss, batch):
    return value_and_gradient(params, loss, batch)[1]


def mean_squared_loss(targets):
    targets = np.asarray(targets, dtype=float)

    def loss(outputs):
        residual = outputs - targets.reshape(outputs.shape)
        value = np.mean(np.sum(residual ** 2, axis=1))
        return value, 2.0 * residual / outputs.shape[0]

    return loss
