from dataclasses import dataclass, field, asdict
from typing import List, Optional

from .. import constants

__all__ = ['TrainConfig']


@dataclass
class TrainConfig(object):
    """Settings of one operator deep Q-learning run."""

    mode: str = 'evaluation'
    design: str = 'attention'
    batch_size: int = constants.BATCH_SIZE
    learning_rate: float = constants.LEARNING_RATE
    target_rate: float = constants.TARGET_RATE
    steps: Optional[int] = None
    eval_every: int = constants.EVAL_EVERY
    m: int = constants.REFERENCE_POINTS
    heads: int = constants.MAXOUT_HEADS
    maxout_head: str = 'attention'
    hidden: List[int] = field(default_factory=lambda: list(constants.HIDDEN_SIZES))
    embed_dim: int = constants.EMBED_DIM
    activation: str = 'relu'
    seed: int = 0
    rewards_per_step: int = 1
    sampled_targets: bool = False
    timing: bool = True
    checkpoint_every: int = 0

    def __post_init__(self):
        if self.mode not in constants.MODES:
            raise ValueError(
                "Parameter 'mode' must be one of {} instead of '{}'.".format(
                    ', '.join(constants.MODES), self.mode))
        if self.steps is None:
            self.steps = constants.EVALUATION_STEPS if self.mode == 'evaluation' \
                else constants.OPTIMIZATION_STEPS
        if self.batch_size < 1:
            raise ValueError("Parameter 'batch_size' should be at least 1 instead of {}.".format(
                self.batch_size))
        if not 0.0 < self.target_rate <= 1.0:
            raise ValueError("Parameter 'target_rate' should be in (0, 1] instead of {}.".format(
                self.target_rate))
        if self.learning_rate < 0:
            raise ValueError("Parameter 'learning_rate' can't be negative.")
        if self.steps < 0:
            raise ValueError("Parameter 'steps' can't be negative.")
        for key in ['eval_every', 'm', 'heads', 'rewards_per_step']:
            if getattr(self, key) < 1:
                raise ValueError("Parameter '{}' should be at least 1 instead of {}.".format(
                    key, getattr(self, key)))
        if self.activation not in constants.ACTIVATIONS:
            raise ValueError("Parameter 'activation' must be one of {} instead of '{}'.".format(
                ', '.join(constants.ACTIVATIONS), self.activation))

    def model_options(self):
        """Keyword arguments for the design's initializer."""
        options = {'hidden_sizes': list(self.hidden), 'embed_dim': self.embed_dim,
                   'activation': self.activation}
        if self.design == 'maxout':
            options.update(heads=self.heads, head_design=self.maxout_head)
        return options

    def to_dict(self):
        return asdict(self)
