import logging
import time
from collections import OrderedDict

import numpy as np
import pandas as pd

from .. import constants
from ..errors import DimensionError, SingularSystemError
from ..mdp import exact_resolvent_matrix, state_action_encoding
from ..nn import (init_mlp, init_optimizer, mean_squared_loss, mlp_forward,
                  optimizer_step, value_and_gradient)
from ..operators import LinearOperator, OperatorModel, ReferenceSet
from .trainer import CURVE_COLUMNS, curve_row, run_streams

LOGGER = logging.getLogger(__name__)

__all__ = [
    'SfModel', 'SfLinearOperator', 'feature_table', 'sf_fit', 'ols_weights', 'sf_predict',
    'sf_as_linear_operator']

RIDGE_SUGGESTION = "use a positive ridge term"


def feature_table(phi, mdp):
    """phi as an (|X|, d) array; accepts a table or a family feature map."""
    table = phi.feature_map() if hasattr(phi, 'feature_map') else np.asarray(phi, dtype=float)
    if table.ndim == 1:
        table = table[:, None]
    if table.shape[0] != mdp.num_pairs:
        raise DimensionError('feature table', (mdp.num_pairs, 'd'), table.shape)
    return table


class SfModel(object):
    """Successor features psi over X, either an exact table or a network
    over the pair encoding."""

    def __init__(self, features, gamma, psi_table=None, psi_params=None, encoding=None, curve=None):
        super(SfModel, self).__init__()
        if (psi_table is None) == (psi_params is None):
            raise ValueError("Give either 'psi_table' or 'psi_params'.")
        self._features = np.asarray(features, dtype=float)
        self._gamma = float(gamma)
        self._psi_table = None if psi_table is None else np.asarray(psi_table, dtype=float)
        self._psi_params = psi_params
        self._encoding = encoding
        self.curve = curve
        if self.psi().shape != self._features.shape:
            raise DimensionError('psi table', self._features.shape, self.psi().shape)

    @property
    def features(self):
        return self._features

    @property
    def gamma(self):
        return self._gamma

    @property
    def dim(self):
        return self._features.shape[1]

    @property
    def is_exact(self):
        return self._psi_table is not None

    @property
    def psi_params(self):
        return self._psi_params

    def psi(self):
        if self._psi_table is not None:
            return self._psi_table
        return mlp_forward(self._psi_params, self._encoding)


def _fit_psi(dataset, features, policy, config, mdp, encoding, evaluator):
    streams = run_streams(config.seed)
    start = time.perf_counter()
    sizes = [encoding.shape[1]] + list(config.hidden) + [features.shape[1]]
    params = init_mlp(sizes, streams['init'], config.activation)
    target = params.copy()
    optimizer = init_optimizer(params, config.learning_rate)
    num_actions = mdp.num_actions
    gamma = mdp.gamma
    next_actions = np.arange(num_actions)
    rows, losses = [], []

    def record(step, params):
        model = SfModel(features, gamma, psi_params=params, encoding=encoding)
        loss = float(np.mean(losses)) if losses else np.nan
        elapsed = time.perf_counter() - start if config.timing else 0.0
        row = curve_row(step, evaluator, model, loss, elapsed)
        rows.append(row)
        losses.clear()
        LOGGER.info("psi step {}: test_mse={:.6g} bellman_loss={:.6g}".format(step, row[2], loss))

    record(0, params)

    for step in range(1, config.steps + 1):
        rows_idx = streams['batch'].integers(len(dataset), size=config.batch_size)
        records = dataset.records[rows_idx]
        pairs = records[:, 0] * num_actions + records[:, 1]
        next_pairs = records[:, 2][:, None] * num_actions + next_actions[None, :]
        future = mlp_forward(target, encoding[next_pairs.reshape(-1)]).reshape(
            len(pairs), num_actions, -1)
        expected = (policy.probs[records[:, 2]][:, :, None] * future).sum(axis=1)
        targets = features[pairs] + gamma * expected
        loss, grad = value_and_gradient(params, mean_squared_loss(targets), encoding[pairs])
        losses.append(loss)
        params, optimizer = optimizer_step(optimizer, params, grad)
        target = target.with_arrays([
            (1.0 - config.target_rate) * t + config.target_rate * p
            for t, p in zip(target.arrays(), params.arrays())])
        if step % config.eval_every == 0 or step == config.steps:
            record(step, params)
    return params, pd.DataFrame(rows, columns=CURVE_COLUMNS)


def sf_fit(dataset, phi, policy, config, mdp, exact=False, encoding=None, evaluator=None):
    """Fits psi_pi = (I - gamma P_pi)^-1 Phi.

    With `exact`, psi is the closed-form resolvent product; otherwise a
    network is fitted with the same target-network loop as the operators,
    on vector targets phi(x) + gamma E_pi psi'(x'). `evaluator(model)` returns
    the curve scores as a dict.
    """
    features = feature_table(phi, mdp)
    if exact:
        model = SfModel(features, mdp.gamma, psi_table=exact_resolvent_matrix(mdp, policy) @ features)
        model.curve = pd.DataFrame([curve_row(0, evaluator, model, 0.0, 0.0)], columns=CURVE_COLUMNS)
        return model
    dataset.check_mdp(mdp)
    encoding = state_action_encoding(mdp) if encoding is None else np.asarray(encoding, dtype=float)
    params, curve = _fit_psi(dataset, features, policy, config, mdp, encoding, evaluator)
    return SfModel(features, mdp.gamma, psi_params=params, encoding=encoding, curve=curve)


def _covariance(features, pairs, ridge):
    if ridge < 0:
        raise ValueError("Parameter 'ridge' can't be negative.")
    design = features[pairs]
    sigma = design.T @ design / len(pairs)
    if ridge == 0 and np.linalg.matrix_rank(sigma) < sigma.shape[0]:
        raise SingularSystemError('the feature covariance', RIDGE_SUGGESTION)
    return design, sigma + ridge * np.eye(sigma.shape[0])


def _solve(matrix, rhs):
    try:
        return np.linalg.solve(matrix, rhs)
    except np.linalg.LinAlgError:
        raise SingularSystemError('the feature covariance', RIDGE_SUGGESTION)


def _reward_values(r, pairs, num_actions):
    if hasattr(r, 'evaluate_many'):
        return r.evaluate_many(pairs, num_actions)
    return np.asarray(r, dtype=float)[pairs]


def ols_weights(dataset, phi, r, ridge=constants.RIDGE):
    """w = (Sigma_phi + ridge I)^-1 E[phi(x) r(x)] over the dataset pairs.
    `phi` is an (|X|, d) feature table."""
    features = np.asarray(phi, dtype=float)
    pairs = dataset.pair_indices()
    design, sigma = _covariance(features, pairs, ridge)
    moment = design.T @ _reward_values(r, pairs, dataset.num_actions) / len(pairs)
    return _solve(sigma, moment)


def sf_predict(model, weights):
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (model.dim,):
        raise DimensionError('coefficients', (model.dim,), weights.shape)
    return model.psi() @ weights


class SfLinearOperator(LinearOperator):
    """Linear-design operator with fixed f and g tables, Xi the dataset
    points (repeats included)."""

    def __init__(self, reference_set, gamma, encoding, f_table, g_table):
        OperatorModel.__init__(self, reference_set, gamma, encoding)
        f_table = np.asarray(f_table, dtype=float)
        g_table = np.asarray(g_table, dtype=float)
        if f_table.shape[0] != reference_set.m or f_table.shape[1] != g_table.shape[1]:
            raise DimensionError('f table', (reference_set.m, g_table.shape[1]), f_table.shape)
        self._f_table = f_table
        self._g_table = g_table

    @property
    def nets(self):
        return OrderedDict()

    def set_parameters(self, arrays):
        if list(arrays):
            raise ValueError("A successor-feature operator has no trainable parameters.")

    def _towers(self, xs):
        return self._f_table, self._g_table[xs], None, None

    def backward(self, cache, grad_out):
        return []


def sf_as_linear_operator(model, dataset, ridge=constants.RIDGE):
    """f(x_i) = (1 - gamma)(Sigma_phi + ridge I)^-1 phi(x_i) / n and g = psi,
    so the operator reproduces sf_predict(model, ols_weights(...)) for any
    reward."""
    pairs = dataset.pair_indices()
    design, sigma = _covariance(model.features, pairs, ridge)
    f_table = (1.0 - model.gamma) * _solve(sigma, design.T).T / len(pairs)
    reference_set = ReferenceSet.from_indices(pairs, dataset.num_actions)
    psi = model.psi()
    return SfLinearOperator(reference_set, model.gamma, np.zeros((psi.shape[0], 0)), f_table, psi)
