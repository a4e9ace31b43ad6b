import logging
import time
from collections import namedtuple

import numpy as np

from .. import constants
from ..mdp import (exact_q_pi, exact_q_star, episodic_returns, expected_return, greedy_policy,
                   sample_rows)
from ..operators import LinearOperator, ReferenceSet, reference_visitation, total_variation
from ..nn import init_mlp

LOGGER = logging.getLogger(__name__)

__all__ = [
    'ZeroShotResult', 'initial_pairs', 'pair_weights', 'ground_truth', 'mse_eval',
    'pair_returns', 'mse_eval_monte_carlo', 'zero_shot_return', 'visitation_gap',
    'linear_speedup']

ZeroShotResult = namedtuple('ZeroShotResult', ['ret', 'optimal_return', 'ratio', 'mc_return'])


def initial_pairs(mdp):
    """Every (s, a) with s in the support of the initial distribution."""
    states = np.flatnonzero(mdp.initial_dist > 0)
    return (states[:, None] * mdp.num_actions + np.arange(mdp.num_actions)[None, :]).reshape(-1)


def pair_weights(mdp, pairs):
    """initial_dist of each pair's state, normalized over `pairs`."""
    weights = mdp.initial_dist[np.asarray(pairs, dtype=int) // mdp.num_actions]
    total = weights.sum()
    if total <= 0.0:
        return np.full(weights.shape, 1.0 / max(weights.size, 1))
    return weights / total


def ground_truth(rewards, mdp, policy=None):
    """q_pi per reward, or q_star when no policy is given."""
    if policy is None:
        return [exact_q_star(mdp, r) for r in rewards]
    return [exact_q_pi(mdp, policy, r) for r in rewards]


def mse_eval(model, rewards, mdp, policy, initial_pairs, truths=None):
    """Squared error at the initial pairs, states weighted by initial_dist,
    averaged over rewards."""
    pairs = np.asarray(initial_pairs, dtype=int)
    weights = pair_weights(mdp, pairs)
    if truths is None:
        truths = ground_truth(rewards, mdp, policy)
    errors = [weights @ (model.predict(model.reward_vector(r), pairs) - q[pairs]) ** 2
              for r, q in zip(rewards, truths)]
    return float(np.mean(errors))


def pair_returns(mdp, policy, r, pairs, horizon, episodes, rng):
    """Monte-Carlo q(x) per pair: (means, standard errors)."""
    table = r.tabularize(mdp) if hasattr(r, 'tabularize') else np.asarray(r, dtype=float)
    pairs = np.repeat(np.asarray(pairs, dtype=int), episodes)
    states, actions = np.divmod(pairs, mdp.num_actions)
    totals = np.zeros(pairs.shape[0])
    discount = 1.0
    for t in range(horizon):
        if t > 0:
            actions = sample_rows(policy.probs[states], rng)
        totals += discount * table[states * mdp.num_actions + actions]
        states = sample_rows(mdp.transition[states, actions], rng)
        discount *= mdp.gamma
    totals = totals.reshape(-1, episodes)
    spread = totals.std(axis=1, ddof=1) if episodes > 1 else np.zeros(totals.shape[0])
    return totals.mean(axis=1), spread / np.sqrt(episodes)


def mse_eval_monte_carlo(model, rewards, mdp, policy, initial_pairs, rng,
                         episodes=100, horizon=constants.EPISODE_HORIZON):
    """mse_eval against rollout estimates of q_pi. Returns the MSE and its
    delta-method standard error."""
    pairs = np.asarray(initial_pairs, dtype=int)
    weights = pair_weights(mdp, pairs) / len(rewards)
    mse, variance = 0.0, 0.0
    for r in rewards:
        estimate, stderr = pair_returns(mdp, policy, r, pairs, horizon, episodes, rng)
        residual = model.predict(model.reward_vector(r), pairs) - estimate
        mse += weights @ residual ** 2
        variance += (weights ** 2) @ (4.0 * residual ** 2 * stderr ** 2)
    return float(mse), float(np.sqrt(variance))


def zero_shot_return(model, r, mdp, horizon=constants.EPISODE_HORIZON, rng=None, episodes=100):
    """Return of the greedy policy on G[r], its ratio to the optimal return
    and, given `rng`, a Monte-Carlo estimate of the same return."""
    policy = greedy_policy(model.predict_table(r), mdp.num_actions)
    ret = expected_return(mdp, policy, exact_q_pi(mdp, policy, r))
    q_star = exact_q_star(mdp, r)
    optimal = expected_return(mdp, greedy_policy(q_star, mdp.num_actions), q_star)
    ratio = ret / optimal if optimal != 0 else float('nan')
    mc_return = float('nan')
    if rng is not None:
        mc_return = float(np.mean(episodic_returns(mdp, policy, r, horizon, episodes, rng)))
    return ZeroShotResult(ret, optimal, ratio, mc_return)


def visitation_gap(model, mdp, policy, pairs=None):
    """Mean total variation, over `pairs` (the initial pairs by default),
    between the model's weights on its reference set, renormalized, and the
    exact d_pi(. | x) restricted to the same points.

    Only designs with explicit weights (attention, linear, weight-table)
    have an implied visitation.
    """
    if not hasattr(model, 'weights'):
        raise ValueError("Design '{}' has no explicit weights.".format(model.design))
    pairs = initial_pairs(mdp) if pairs is None else np.asarray(pairs, dtype=int)
    gaps = []
    for x in pairs:
        weights = model.weights([int(x)])[0]
        total = weights.sum()
        implied = weights / total if total != 0.0 else np.full(weights.shape, 1.0 / weights.size)
        exact = reference_visitation(mdp, policy, model.reference_set, int(x))
        gaps.append(total_variation(implied, exact))
    return float(np.mean(gaps))


def linear_speedup(
b, m, rng=None, embed_dim=constants.EMBED_DIM, repeats=3):
    """Times the regrouped linear forward against the explicit b x m weight
    matrix on random towers."""
    rng = np.random.default_rng(0) if rng is None else rng
    size = max(b, m)
    encoding = rng.standard_normal((size, 8))
    reference_set = ReferenceSet.from_indices(np.arange(m), 1)
    model = LinearOperator(
        reference_set, constants.DEFAULT_GAMMA, encoding,
        init_mlp([8, 64, embed_dim], rng), init_mlp([8, 64, embed_dim], rng))
    rv = rng.standard_normal(m)
    xs = np.arange(b)

    def best(run):
        timings = []
        for _ in range(repeats):
            start = time.perf_counter()
            run()
            timings.append(time.perf_counter() - start)
        return min(timings)

    fast = best(lambda: model.predict(rv, xs))
    naive = best(lambda: model.predict_naive(rv, xs))
    LOGGER.info("b={} m={}: fast {:.4g}s, naive {:.4g}s".format(b, m, fast, naive))
    return {'b': b, 'm': m, 'fast_s': fast, 'naive_s': naive,
            'speedup': naive / fast if fast > 0 else float('inf')}
