import logging
import os
import time

import numpy as np
import pandas as pd

from ..errors import EmptyInputError
from ..mdp import state_action_encoding
from ..nn import init_optimizer, optimizer_step
from ..operators import initialize_model, save_model, select_reference_points
from .targets import Batch, TargetModel, bellman_loss, soft_update

LOGGER = logging.getLogger(__name__)

__all__ = ['CURVE_COLUMNS', 'SCORE_COLUMNS', 'curve_row', 'run_streams', 'train_operator']

CURVE_COLUMNS = ['step', 'train_mse', 'test_mse', 'bellman_loss', 'wall_clock_s', 'test_return']
SCORE_COLUMNS = ['train_mse', 'test_mse', 'test_return']

_STREAMS = ['init', 'reference', 'batch', 'target']


def curve_row(step, evaluator, model, loss, elapsed):
    """One curve row. `evaluator(model)` returns a dict keyed by
    SCORE_COLUMNS; missing scores are NaN."""
    scores = evaluator(model) if evaluator is not None else {}
    train_mse, test_mse, test_return = [float(scores.get(name, np.nan)) for name in SCORE_COLUMNS]
    return (step, train_mse, test_mse, loss, elapsed, test_return)


def run_streams(seed):
    """Independent generators per concern, all derived from one seed."""
    children = np.random.SeedSequence(seed).spawn(len(_STREAMS))
    return {name: np.random.default_rng(child) for name, child in zip(_STREAMS, children)}


def train_operator(config, dataset, sampler, mdp, policy=None, evaluator=None,
                   encoding=None, checkpoint_dir=None):
    """Operator deep Q-learning on an offline dataset.

    Each step draws a uniform minibatch and `config.rewards_per_step`
    rewards from `sampler`, computes targets with the target model, takes an
    Adam step on the mean squared residual, then soft-updates the target.
    `evaluator(model)` returns a dict of curve scores at each cadence.

    Returns the trained model and the learning curve.
    """
    if len(dataset) == 0:
        raise EmptyInputError("Cannot train on an empty dataset.")
    dataset.check_mdp(mdp)
    if config.mode == 'evaluation' and policy is None:
        raise ValueError("Evaluation mode needs a target policy.")

    streams = run_streams(config.seed)
    encoding = state_action_encoding(mdp) if encoding is None else encoding
    reference_set = select_reference_points(dataset, config.m, streams['reference'])
    model = initialize_model(config.design, reference_set, mdp.gamma, encoding,
                             streams['init'], **config.model_options())
    target = TargetModel(model)
    optimizer = init_optimizer(model.parameters(), config.learning_rate)
    LOGGER.info("Training {!r} in {} mode for {} steps.".format(model, config.mode, config.steps))

    rows = []
    losses = []
    start = time.perf_counter()

    def record(step):
        loss = float(np.mean(losses)) if losses else np.nan
        elapsed = time.perf_counter() - start if config.timing else 0.0
        row = curve_row(step, evaluator, model, loss, elapsed)
        rows.append(row)
        losses.clear()
        LOGGER.info("step {}: train_mse={:.6g} test_mse={:.6g} bellman_loss={:.6g}".format(
            step, row[1], row[2], loss))

    record(0)
    for step in range(1, config.steps + 1):
        batch = Batch.from_dataset(dataset, streams['batch'].integers(len(dataset), size=config.batch_size))
        rewards = [sampler.sample() for _ in range(config.rewards_per_step)]
        loss, grads = bellman_loss(model, target, rewards, batch, config.mode, policy,
                                   streams['target'], config.sampled_targets)
        losses.append(loss)
        params, optimizer = optimizer_step(optimizer, model.parameters(), grads)
        model.set_parameters(params)
        target = soft_update(target, model, config.target_rate)
        if step % config.eval_every == 0 or step == config.steps:
            record(step)
        if checkpoint_dir and config.checkpoint_every and step % config.checkpoint_every == 0:
            save_model(model, os.path.join(checkpoint_dir, 'step-{}.npz'.format(step)))

    return model, pd.DataFrame(rows, columns=CURVE_COLUMNS)
