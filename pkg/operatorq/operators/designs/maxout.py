from collections import OrderedDict

import numpy as np

from ... import constants
from ..abstract import DESIGNS, OperatorModel, design_name

__all__ = ['MaxoutOperator']


@design_name('maxout')
class MaxoutOperator(OperatorModel):
    """G[r](x) = max_k G_k[r](x) over K heads of one design.

    Gradients reach only the head attaining the maximum, the lowest index
    on ties.
    """

    def __init__(self, heads):
        heads = list(heads)
        if not heads:
            raise ValueError("A maxout operator needs at least one head.")
        first = heads[0]
        for head in heads[1:]:
            if head.reference_set != first.reference_set or head.gamma != first.gamma:
                raise ValueError("Maxout heads should share the reference set and gamma.")
        super(MaxoutOperator, self).__init__(first.reference_set, first.gamma, first.encoding)
        self._heads = heads

    @classmethod
    def initialize(cls, reference_set, gamma, encoding, rng, heads=constants.MAXOUT_HEADS,
                   head_design='attention', **kwargs):
        if head_design not in ['attention', 'linear']:
            raise ValueError(
                "Parameter 'head_design' must be 'attention' or 'linear' "
                "instead of '{}'.".format(head_design))
        head_cls = DESIGNS.get(head_design)
        return cls([head_cls.initialize(reference_set, gamma, encoding, rng, **kwargs)
                    for _ in range(heads)])

    @property
    def heads(self):
        return list(self._heads)

    @property
    def num_heads(self):
        return len(self._heads)

    @property
    def head_design(self):
        return self._heads[0].design

    @property
    def nets(self):
        nets = OrderedDict()
        for k, head in enumerate(self._heads):
            for name, net in head.nets.items():
                nets['head{}.{}'.format(k, name)] = net
        return nets

    def set_parameters(self, arrays):
        arrays = list(arrays)
        heads, start = [], 0
        for head in self._heads:
            count = len(head.parameters())
            clone = head._clone()
            clone.set_parameters(arrays[start:start + count])
            heads.append(clone)
            start += count
        self._heads = heads

    def head_outputs(self, reward_vector, xs):
        """(K, b) head predictions."""
        xs = self._check_xs(xs)
        reward_vector = np.asarray(reward_vector, dtype=float)
        return np.stack([head.forward(reward_vector, xs)[0] for head in self._heads])

    def active_heads(self, reward_vector, xs):
        return np.argmax(self.head_outputs(reward_vector, xs), axis=0)

    def forward(self, reward_vector, xs):
        results = [head.forward(reward_vector, xs) for head in self._heads]
        outputs = np.stack([out for out, _ in results])
        active = np.argmax(outputs, axis=0)
        chosen = outputs[active, np.arange(outputs.shape[1])]
        return chosen, (active, [cache for _, cache in results])

    def backward(self, cache, grad_out):
        active, caches = cache
        grads = []
        for k, (head, head_cache) in enumerate(zip(self._heads, caches)):
            grads += head.backward(head_cache, grad_out * (active == k))
        return grads

    def header(self):
        return {'heads': self.num_heads, 'head_design': self.head_design}

    @classmethod
    def from_nets(cls, reference_set, gamma, encoding, nets, header, arrays):
        head_cls = DESIGNS.get(header['head_design'])
        heads = []
        for k in range(header['heads']):
            prefix = 'head{}.'.format(k)
            head_nets = OrderedDict(
                (name[len(prefix):], net) for name, net in nets.items() if name.startswith(prefix))
            heads.append(head_cls.from_nets(reference_set, gamma, encoding, head_nets, {}, arrays))
        return cls(heads)
