import glob
import logging
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pandas as pd

from .. import constants, rewards
from ..data import BehaviorSpec, generate_dataset, generate_final_buffer, load_dataset, save_dataset
from ..errors import ConfigError, EmptyInputError
from ..learning import CURVE_COLUMNS, sf_as_linear_operator, sf_fit, train_operator
from ..mdp import environments
from ..nn import save_params
from ..operators import save_model
from .config import ExperimentConfig
from .metrics import ground_truth, initial_pairs, mse_eval, zero_shot_return

LOGGER = logging.getLogger(__name__)

__all__ = [
    'MetricsReport', 'RETURN_COLUMNS', 'AGGREGATE_METRICS', 'prepare_dataset', 'run_one',
    'run_experiment', 'aggregate_runs', 'write_aggregate']

RETURN_COLUMNS = ['design', 'seed', 'reward', 'return', 'optimal_return', 'ratio', 'mc_return']
AGGREGATE_METRICS = ['train_mse', 'test_mse', 'bellman_loss', 'test_return']
FLOAT_FORMAT = '%.17g'


class MetricsReport(object):
    """Curves and zero-shot returns of every finished run, plus failures."""

    def __init__(self, curves, returns, aggregate, failures):
        super(MetricsReport, self).__init__()
        self.curves = curves
        self.returns = returns
        self.aggregate = aggregate
        self.failures = list(failures)

    @property
    def exit_code(self):
        return 1 if self.failures else 0

    def __repr__(self):
        return "MetricsReport(runs={}, failures={})".format(
            self.curves.groupby(['design', 'seed']).ngroups if len(self.curves) else 0,
            len(self.failures))


class _Setting(object):
    """Everything a run derives from the configuration, rebuilt per process."""

    def __init__(self, config):
        self.config = config
        env = environments.get(config.env)
        self.mdp = env.build(config.gamma)
        self.policy = env.target_policy(self.mdp) if config.mode == 'evaluation' else None
        self.dataset = prepare_dataset(config, self.mdp, env)
        self.family = rewards.family(config.family, self.mdp, feature_seed=config.feature_seed)
        self.train_rewards = rewards.freeze_rewards(
            rewards.RewardSampler(self.family, 'train', config.reward_seed),
            config.n_train_rewards, seed=config.reward_seed)
        self.test_rewards = rewards.freeze_rewards(
            rewards.RewardSampler(self.family, 'test', config.reward_seed + 1),
            config.n_test_rewards, seed=config.reward_seed + 1)
        self.pairs = initial_pairs(self.mdp)
        self.train_truths = ground_truth(self.train_rewards, self.mdp, self.policy)
        self.test_truths = ground_truth(self.test_rewards, self.mdp, self.policy)

    def evaluate(self, model):
        scores = {
            'train_mse': mse_eval(model, self.train_rewards, self.mdp, self.policy, self.pairs,
                                  self.train_truths),
            'test_mse': mse_eval(model, self.test_rewards, self.mdp, self.policy, self.pairs,
                                 self.test_truths),
        }
        if self.config.mode == 'optimization':
            scores['test_return'] = float(np.mean(
                [zero_shot_return(model, r, self.mdp).ret for r in self.test_rewards]))
        return scores


def prepare_dataset(config, mdp, env):
    """Loads `dataset_path`, generating it first when the file is missing."""
    path = config.require('dataset_path')
    if os.path.exists(path):
        dataset = load_dataset(path)
        try:
            dataset.check_mdp(mdp)
        except ValueError as error:
            raise ConfigError('dataset_path', str(error))
        return dataset
    LOGGER.info("Generating {} dataset at {}.".format(config.dataset_kind, path))
    rng = np.random.default_rng(config.dataset_seed)
    base = env.target_policy(mdp)
    if config.dataset_kind == 'final-buffer':
        dataset = generate_final_buffer(mdp, base, config.dataset_n, rng, seed=config.dataset_seed)
    else:
        dataset = generate_dataset(mdp, BehaviorSpec(base, config.dataset_p), config.dataset_n,
                                   rng, seed=config.dataset_seed)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    save_dataset(dataset, path)
    return dataset


def _run_dir(config, design, seed):
    return os.path.join(config.output_root, design, 'seed-{}'.format(seed))


def _successor_run(setting, train_config, run_dir):
    config = setting.config
    if config.sf_features == 'train-rewards':
        features = np.stack([r.tabularize(setting.mdp) for r in setting.train_rewards], axis=1)
    else:
        features = setting.family.feature_map()

    def evaluator(sf_model):
        return setting.evaluate(sf_as_linear_operator(sf_model, setting.dataset, config.ridge))

    sf_model = sf_fit(setting.dataset, features, setting.policy, train_config, setting.mdp,
                      exact=config.sf_exact, evaluator=evaluator)
    if sf_model.psi_params is not None:
        save_params(sf_model.psi_params, os.path.join(run_dir, 'psi.npz'))
    return sf_as_linear_operator(sf_model, setting.dataset, config.ridge), sf_model.curve


def run_one(values, design, seed):
    """One (design, seed) run. Writes curve.csv and a checkpoint under the
    run directory and returns (curve, returns rows)."""
    config = ExperimentConfig(values)
    setting = _Setting(config)
    train_config = config.train_config(design, seed)
    run_dir = _run_dir(config, design, seed)
    os.makedirs(run_dir, exist_ok=True)
    LOGGER.info("Run {}/seed-{} started.".format(design, seed))

    if design == constants.SF_DESIGN:
        model, curve = _successor_run(setting, train_config, run_dir)
    else:
        model, curve = train_operator(
            train_config, setting.dataset, rewards.RewardSet(setting.train_rewards, seed=seed),
            setting.mdp, setting.policy, setting.evaluate,
            checkpoint_dir=run_dir)
        save_model(model, os.path.join(run_dir, 'model.npz'))
    curve.to_csv(os.path.join(run_dir, 'curve.csv'), index=False, float_format=FLOAT_FORMAT)

    returns = []
    if config.mode == 'optimization':
        rng = np.random.default_rng(seed)
        for index, r in enumerate(setting.test_rewards):
            result = zero_shot_return(model, r, setting.mdp, config.horizon, rng, config.mc_episodes)
            returns.append((design, seed, index, result.ret, result.optimal_return,
                            result.ratio, result.mc_return))
    LOGGER.info("Run {}/seed-{} finished.".format(design, seed))
    return curve, returns


def _guarded(values, design, seed):
    try:
        return run_one(values, design, seed), None
    except Exception as error:
        LOGGER.exception("Run {}/seed-{} failed: {}".format(design, seed, error))
        return None, str(error)


def run_experiment(config):
    """Trains every (design, seed), writes per-run curves, returns.csv and
    aggregate.csv under the output root. A failing run is recorded and the
    others continue."""
    values = config.to_dict()
    values['dataset_path'] = config.require('dataset_path')
    env = environments.get(config.env)
    prepare_dataset(config, env.build(config.gamma), env)

    jobs = [(design, seed) for design in config.designs for seed in config.seeds]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(_guarded, *zip(*[(values, d, s) for d, s in jobs])))
    else:
        outcomes = [_guarded(values, design, seed) for design, seed in jobs]

    curves, returns, failures, finished = [], [], [], []
    for (design, seed), (result, error) in zip(jobs, outcomes):
        if error is not None:
            failures.append((design, seed, error))
            continue
        curve, run_returns = result
        finished.append((design, seed))
        curves.append(curve.assign(design=design, seed=seed))
        returns += run_returns

    root = config.output_root
    returns_table = pd.DataFrame(returns, columns=RETURN_COLUMNS)
    if config.mode == 'optimization':
        returns_table.to_csv(os.path.join(root, 'returns.csv'), index=False,
                             float_format=FLOAT_FORMAT)
    aggregate = write_aggregate(root, finished) if curves else None
    all_curves = pd.concat(curves, ignore_index=True) if curves \
        else pd.DataFrame(columns=CURVE_COLUMNS + ['design', 'seed'])
    return MetricsReport(all_curves, returns_table, aggregate, failures)


def _curve_paths(runs_dir, runs):
    if runs is not None:
        return [(design, seed, os.path.join(runs_dir, design, 'seed-{}'.format(seed), 'curve.csv'))
                for design, seed in runs]
    paths = []
    for path in sorted(glob.glob(os.path.join(runs_dir, '*', 'seed-*', 'curve.csv'))):
        seed_dir = os.path.dirname(path)
        design = os.path.basename(os.path.dirname(seed_dir))
        paths.append((design, int(os.path.basename(seed_dir)[len('seed-'):]), path))
    return paths


def _read_curves(runs_dir, runs=None):
    frames = []
    for design, seed, path in _curve_paths(runs_dir, runs):
        # round_trip parses the %.17g values back to the exact floats written
        frame = pd.read_csv(path, float_precision='round_trip')
        frames.append(frame.reindex(columns=CURVE_COLUMNS).assign(design=design, seed=seed))
    if not frames:
        raise EmptyInputError("No run curves found under {}.".format(runs_dir))
    return pd.concat(frames, ignore_index=True)


def aggregate_runs(runs_dir, runs=None):
    """Per-(design, step) median, quartiles and mean of every metric across
    seeds, recomputed from the per-run curve files.

    `runs` restricts the table to those (design, seed) pairs; by default
    every curve file under `runs_dir` is read. Metrics missing from a
    curve file count as NaN.
    """
    curves = _read_curves(runs_dir, runs)
    grouped = curves.groupby(['design', 'step'], sort=True)[AGGREGATE_METRICS]
    parts = {
        'median': grouped.median(),
        'q25': grouped.quantile(0.25),
        'q75': grouped.quantile(0.75),
        'mean': grouped.mean(),
    }
    table = pd.concat(parts, axis=1)
    table.columns = ['{}_{}'.format(metric, stat) for stat, metric in table.columns]
    ordered = ['{}_{}'.format(metric, stat) for metric in AGGREGATE_METRICS for stat in parts]
    table = table[ordered]
    table.insert(0, 'runs', curves.groupby(['design', 'step'], sort=True)['seed'].count())
    return table.reset_index()


def write_aggregate(runs_dir, runs=None):
    table = aggregate_runs(runs_dir, runs)
    table.to_csv(os.path.join(runs_dir, 'aggregate.csv'), index=False, float_format=FLOAT_FORMAT)
    return table
