from .attention import AttentionOperator
from .linear import LinearOperator
from .vanilla import VanillaOperator
from .maxout import MaxoutOperator
from .weight_table import WeightTableOperator

__all__ = [
    'AttentionOperator', 'LinearOperator', 'VanillaOperator', 'MaxoutOperator',
    'WeightTableOperator']
