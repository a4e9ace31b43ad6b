import numpy as np

from ...nn import mlp_backward
from ..abstract import design_name
from .towers import TwoTowerOperator

__all__ = ['LinearOperator']


@design_name('linear')
class LinearOperator(TwoTowerOperator):
    """w(xi_j | x) = f(xi_j) . g(x). Unnormalized, may be negative.

    The forward pass groups the sum as (sum_j r(xi_j) f(xi_j) / (1 - gamma)) . g(x),
    which costs O(b + m) for a batch of b pairs.
    """

    def weights(self, xs):
        F, G, _, _ = self._towers(self._check_xs(xs))
        return G @ F.T

    def forward(self, reward_vector, xs):
        F, G, f_cache, g_cache = self._towers(xs)
        v = F.T @ reward_vector / (1.0 - self.gamma)
        return G @ v, (reward_vector, v, F, G, f_cache, g_cache)

    def predict_naive(self, reward_vector, xs):
        """The O(bm) evaluation through the explicit weight matrix."""
        return self.weights(xs) @ np.asarray(reward_vector, dtype=float) / (1.0 - self.gamma)

    def backward(self, cache, grad_out):
        reward_vector, v, F, G, f_cache, g_cache = cache
        grad_v = G.T @ grad_out
        grad_f, _ = mlp_backward(self.f, f_cache, np.outer(reward_vector, grad_v) / (1.0 - self.gamma))
        grad_g, _ = mlp_backward(self.g, g_cache, np.outer(grad_out, v))
        return grad_f.arrays() + grad_g.arrays()
