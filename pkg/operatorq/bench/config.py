import logging
import os
from collections import OrderedDict, namedtuple

import yaml

from .. import constants
from ..errors import ConfigError
from .. import rewards
from ..learning import TrainConfig
from ..mdp import environments
from ..operators import DESIGNS

LOGGER = logging.getLogger(__name__)

__all__ = [
    'Option', 'OPTIONS', 'OUTPUT_ENV', 'ExperimentConfig', 'load_config', 'option_flag',
    'parse_bool']

OUTPUT_ENV = 'OPERATORQ_OUTPUT'
DEFAULT_OUTPUT = 'runs'
DATASET_KINDS = ['behavior', 'final-buffer']
SF_FEATURES = ['family', 'train-rewards']


def parse_bool(value):
    if isinstance(value, bool):
        return value
    if str(value).lower() in ['true', 'yes', '1']:
        return True
    if str(value).lower() in ['false', 'no', '0']:
        return False
    raise ValueError("'{}' is not a boolean".format(value))


Option = namedtuple('Option', ['key', 'default', 'type', 'many', 'help'])

OPTIONS = OrderedDict((option.key, option) for option in [
    Option('env', 'grid5', str, False, "environment name"),
    Option('gamma', None, float, False, "discount factor (environment default if unset)"),
    Option('family', 'rbf-bump', str, False, "reward family"),
    Option('feature_seed', 0, int, False, "seed of the family's random features"),
    Option('n_train_rewards', constants.N_TRAIN_REWARDS, int, False, "training reward count"),
    Option('n_test_rewards', constants.N_TEST_REWARDS, int, False, "test reward count"),
    Option('reward_seed', 1234, int, False, "seed of the frozen reward sets"),
    Option('dataset_path', None, str, False, "dataset file, generated when missing"),
    Option('dataset_kind', 'behavior', str, False, "behavior or final-buffer"),
    Option('dataset_n', 50000, int, False, "transitions to generate"),
    Option('dataset_p', 0.3, float, False, "random-action probability of the behavior"),
    Option('dataset_seed', 0, int, False, "seed of dataset generation"),
    Option('designs', ['successor-feature', 'attention', 'linear', 'vanilla'], str, True,
           "designs to train"),
    Option('seeds', list(range(constants.N_SEEDS)), int, True, "training seeds"),
    Option('mode', 'evaluation', str, False, "evaluation or optimization"),
    Option('batch_size', constants.BATCH_SIZE, int, False, "minibatch size"),
    Option('learning_rate', constants.LEARNING_RATE, float, False, "Adam step size"),
    Option('target_rate', constants.TARGET_RATE, float, False, "target soft-update rate"),
    Option('steps', None, int, False, "training steps (mode default if unset)"),
    Option('eval_every', constants.EVAL_EVERY, int, False, "metric cadence in steps"),
    Option('m', constants.REFERENCE_POINTS, int, False, "reference points"),
    Option('heads', constants.MAXOUT_HEADS, int, False, "maxout width K"),
    Option('maxout_head', 'attention', str, False, "attention or linear maxout heads"),
    Option('hidden', list(constants.HIDDEN_SIZES), int, True, "hidden layer sizes"),
    Option('embed_dim', constants.EMBED_DIM, int, False, "tower output size"),
    Option('activation', 'relu', str, False, "relu or tanh"),
    Option('rewards_per_step', 1, int, False, "rewards averaged in one step"),
    Option('sampled_targets', False, parse_bool, False, "sample a' instead of the expectation"),
    Option('timing', True, parse_bool, False, "record wall-clock time"),
    Option('checkpoint_every', 0, int, False, "checkpoint cadence in steps, 0 to disable"),
    Option('sf_features', 'family', str, False, "family or train-rewards"),
    Option('sf_exact', False, parse_bool, False, "closed-form successor features"),
    Option('ridge', constants.RIDGE, float, False, "ridge term of the OLS readout"),
    Option('horizon', constants.EPISODE_HORIZON, int, False, "rollout horizon"),
    Option('mc_episodes', 100, int, False, "Monte-Carlo episodes per return"),
    Option('workers', 1, int, False, "parallel runs"),
    Option('output', None, str, False, "output root (${} if unset)".format(OUTPUT_ENV)),
])

TRAIN_KEYS = [
    'mode', 'batch_size', 'learning_rate', 'target_rate', 'steps', 'eval_every', 'm', 'heads',
    'maxout_head', 'hidden', 'embed_dim', 'activation', 'rewards_per_step', 'sampled_targets',
    'timing', 'checkpoint_every']


def option_flag(key):
    return '--' + key.replace('_', '-')


def _coerce(option, value):
    if value is None:
        return None
    try:
        if option.many:
            if not isinstance(value, (list, tuple)):
                value = [value]
            return [option.type(item) for item in value]
        if isinstance(value, (list, tuple, dict)):
            raise ValueError("expected a single value")
        return option.type(value)
    except (TypeError, ValueError) as error:
        raise ConfigError(option.key, str(error))


class ExperimentConfig(object):
    """Validated flat experiment settings; keys are attributes."""

    def __init__(self, values=None):
        super(ExperimentConfig, self).__init__()
        merged = OrderedDict((key, option.default) for key, option in OPTIONS.items())
        for key, value in (values or {}).items():
            if key not in OPTIONS:
                raise ConfigError(key, 'unknown key')
            merged[key] = _coerce(OPTIONS[key], value)
        self._values = merged
        self._validate()

    def _validate(self):
        values = self._values
        if values['env'] not in environments.names():
            raise ConfigError('env', "unknown environment '{}'".format(values['env']))
        if values['family'] not in rewards.names():
            raise ConfigError('family', "unknown reward family '{}'".format(values['family']))
        if values['mode'] not in constants.MODES:
            raise ConfigError('mode', "should be one of {}".format(', '.join(constants.MODES)))
        if not values['seeds']:
            raise ConfigError('seeds', 'should not be empty')
        if not values['designs']:
            raise ConfigError('designs', 'should not be empty')
        trainable = [d for d in DESIGNS.names() if d != 'weight-table']
        for design in values['designs']:
            if design != constants.SF_DESIGN and design not in trainable:
                raise ConfigError('designs', "unknown design '{}'".format(design))
        if values['mode'] == 'optimization' and constants.SF_DESIGN in values['designs']:
            raise ConfigError('designs', 'successor features only support evaluation mode')
        if values['dataset_kind'] not in DATASET_KINDS:
            raise ConfigError('dataset_kind', "should be one of {}".format(', '.join(DATASET_KINDS)))
        if values['sf_features'] not in SF_FEATURES:
            raise ConfigError('sf_features', "should be one of {}".format(', '.join(SF_FEATURES)))
        if values['workers'] < 1:
            raise ConfigError('workers', 'should be at least 1')
        try:
            self.train_config(values['designs'][0], values['seeds'][0])
        except ValueError as error:
            raise ConfigError('training', str(error))

    def __getattr__(self, key):
        try:
            return self.__dict__['_values'][key]
        except KeyError:
            raise AttributeError(key)

    @property
    def output_root(self):
        return self._values['output'] or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT

    def require(self, key):
        if self._values[key] is None:
            raise ConfigError(key, 'is required')
        return self._values[key]

    def train_config(self, design, seed):
        settings = {key: self._values[key] for key in TRAIN_KEYS}
        return TrainConfig(design=design, seed=seed, **settings)

    def with_values(self, **values):
        merged = dict(self._values)
        merged.update(values)
        return ExperimentConfig(merged)

    def to_dict(self):
        return dict(self._values)

    def __eq__(self, other):
        return isinstance(other, ExperimentConfig) and self._values == other._values


def load_config(path=None, overrides=None):
    """Reads a YAML mapping and applies `overrides`, ignoring None values."""
    values = {}
    if path is not None:
        with open(path) as stream:
            document = yaml.safe_load(stream)
        if document is None:
            document = {}
        if not isinstance(document, dict):
            raise ConfigError('<document>', 'should be a mapping of keys to values')
        values.update(document)
        LOGGER.debug("Loaded configuration from {}.".format(path))
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    return ExperimentConfig(values)
