import numpy as np

from ...errors import NonFiniteError
from ...nn import mlp_backward
from ..abstract import design_name, softmax
from .towers import TwoTowerOperator

__all__ = ['AttentionOperator']


@design_name('attention')
class AttentionOperator(TwoTowerOperator):
    """w(xi_j | x) = softmax_j(f(xi_j) . g(x)); the weights lie on the
    simplex for any parameters."""

    def _weights(self, xs):
        F, G, f_cache, g_cache = self._towers(xs)
        logits = G @ F.T
        if not np.all(np.isfinite(logits)):
            raise NonFiniteError('attention logits')
        return softmax(logits), F, G, f_cache, g_cache

    def logits(self, xs):
        F, G, _, _ = self._towers(self._check_xs(xs))
        return G @ F.T

    def weights(self, xs):
        return self._weights(self._check_xs(xs))[0]

    def forward(self, reward_vector, xs):
        W, F, G, f_cache, g_cache = self._weights(xs)
        outputs = W @ reward_vector / (1.0 - self.gamma)
        return outputs, (reward_vector, W, F, G, f_cache, g_cache)

    def backward(self, cache, grad_out):
        reward_vector, W, F, G, f_cache, g_cache = cache
        grad_w = np.outer(grad_out, reward_vector) / (1.0 - self.gamma)
        grad_logits = W * (grad_w - (W * grad_w).sum(axis=1, keepdims=True))
        grad_f, _ = mlp_backward(self.f, f_cache, grad_logits.T @ G)
        grad_g, _ = mlp_backward(self.g, g_cache, grad_logits @ F)
        return grad_f.arrays() + grad_g.arrays()
