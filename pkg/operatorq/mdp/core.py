import logging
import math
from collections import namedtuple

import numpy as np

from ..errors import DimensionError, ConvergenceError, SingularSystemError

LOGGER = logging.getLogger(__name__)

__all__ = [
    'StateAction', 'TabularMdp', 'PolicyTable',
    'p_pi_matrix', 'apply_p_pi', 'apply_p_pi_adjoint', 'apply_p_max',
    'exact_resolvent_matrix', 'exact_q_pi', 'exact_q_star',
    'visitation_distribution', 'greedy_policy', 'optimal_policy',
    'state_value', 'expected_return', 'episodic_return', 'episodic_returns',
    'state_action_encoding', 'state_distance', 'sample_rows']

_STOCHASTIC_ATOL = 1e-12


class StateAction(namedtuple('StateAction', ['s', 'a'])):
    """A pair x = (s, a). Value tables are indexed by s * num_actions + a."""
    __slots__ = ()

    def index(self, num_actions):
        return self.s * num_actions + self.a

    @classmethod
    def from_index(cls, index, num_actions):
        s, a = divmod(int(index), num_actions)
        return cls(s, a)


def _readonly(array):
    array = np.array(array, dtype=float)
    array.flags.writeable = False
    return array


class TabularMdp(object):
    """Finite MDP with transition tensor P[s][a][s'], an initial state
    distribution and a discount factor in (0, 1).
    """

    def __init__(self, transition, initial_dist, gamma, env_id=None, coords=None):
        super(TabularMdp, self).__init__()
        transition = np.asarray(transition, dtype=float)
        if transition.ndim != 3 or transition.shape[0] != transition.shape[2]:
            raise DimensionError('transition', '(S, A, S)', transition.shape)
        num_states, num_actions = transition.shape[:2]
        if num_states < 1 or num_actions < 1:
            raise ValueError("An MDP needs at least one state and one action.")
        if np.any(transition < 0):
            raise ValueError("Transition probabilities can't be negative.")
        if not np.allclose(transition.sum(axis=2), 1.0, rtol=0, atol=_STOCHASTIC_ATOL):
            raise ValueError("Every row P[s][a][.] should sum to 1.")

        initial_dist = np.asarray(initial_dist, dtype=float)
        if initial_dist.shape != (num_states,):
            raise DimensionError('initial_dist', (num_states,), initial_dist.shape)
        if np.any(initial_dist < 0) or abs(initial_dist.sum() - 1.0) > _STOCHASTIC_ATOL:
            raise ValueError("Parameter 'initial_dist' should be a probability vector.")

        gamma = float(gamma)
        if not 0.0 < gamma < 1.0:
            raise ValueError(
                "Parameter 'gamma' should be in (0, 1) instead of {}.".format(gamma))

        if coords is not None:
            coords = np.asarray(coords, dtype=float)
            if coords.shape[0] != num_states:
                raise DimensionError('coords', (num_states, 2), coords.shape)
            coords = _readonly(coords)

        self._transition = _readonly(transition)
        self._initial_dist = _readonly(initial_dist)
        self._gamma = gamma
        self._env_id = env_id
        self._coords = coords

    @property
    def num_states(self):
        return self._transition.shape[0]

    @property
    def num_actions(self):
        return self._transition.shape[1]

    @property
    def num_pairs(self):
        return self.num_states * self.num_actions

    @property
    def transition(self):
        return self._transition

    @property
    def initial_dist(self):
        return self._initial_dist

    @property
    def gamma(self):
        return self._gamma

    @property
    def env_id(self):
        return self._env_id

    @property
    def coords(self):
        return self._coords

    def with_gamma(self, gamma):
        return TabularMdp(self._transition, self._initial_dist, gamma,
                          env_id=self._env_id, coords=self._coords)

    def pair_index(self, x):
        """Flat index of x, given as a StateAction or as an int."""
        if isinstance(x, tuple):
            s, a = x
            if not (0 <= s < self.num_states and 0 <= a < self.num_actions):
                raise IndexError("State-action pair {} is out of range.".format(tuple(x)))
            return s * self.num_actions + a
        index = int(x)
        if not 0 <= index < self.num_pairs:
            raise IndexError("Pair index {} is out of range.".format(index))
        return index

    def __repr__(self):
        return "TabularMdp(env_id={!r}, states={}, actions={}, gamma={})".format(
            self._env_id, self.num_states, self.num_actions, self._gamma)


class PolicyTable(object):
    """Stochastic policy pi[s][a]."""

    def __init__(self, probs):
        super(PolicyTable, self).__init__()
        probs = np.asarray(probs, dtype=float)
        if probs.ndim != 2:
            raise DimensionError('policy', '(S, A)', probs.shape)
        if np.any(probs < 0) or not np.allclose(probs.sum(axis=1), 1.0, rtol=0, atol=_STOCHASTIC_ATOL):
            raise ValueError("Every policy row should be a probability vector.")
        self._probs = _readonly(probs)

    @classmethod
    def deterministic(cls, actions, num_actions):
        actions = np.asarray(actions, dtype=int)
        probs = np.zeros((actions.shape[0], num_actions))
        probs[np.arange(actions.shape[0]), actions] = 1.0
        return cls(probs)

    @classmethod
    def uniform(cls, num_states, num_actions):
        return cls(np.full((num_states, num_actions), 1.0 / num_actions))

    @property
    def probs(self):
        return self._probs

    @property
    def num_states(self):
        return self._probs.shape[0]

    @property
    def num_actions(self):
        return self._probs.shape[1]

    def actions(self):
        """Most likely action per state (lowest index on ties)."""
        return np.argmax(self._probs, axis=1)

    def is_deterministic(self):
        return bool(np.all(self._probs.max(axis=1) == 1.0))


# ============
# input checks
# ============

def _check_table(mdp, table, what='value table'):
    table = np.asarray(table, dtype=float)
    if table.shape != (mdp.num_pairs,):
        raise DimensionError(what, (mdp.num_pairs,), table.shape)
    return table


def _check_policy(mdp, policy):
    if policy.probs.shape != (mdp.num_states, mdp.num_actions):
        raise DimensionError('policy', (mdp.num_states, mdp.num_actions), policy.probs.shape)
    return policy


def _reward_table(mdp, r):
    if hasattr(r, 'tabularize'):
        return r.tabularize(mdp)
    return _check_table(mdp, r, 'reward table')


# ================
# Bellman operators
# ================

def p_pi_matrix(mdp, policy):
    """Returns the |X| x |X| matrix p(s'|s,a) pi(a'|s')."""
    _check_policy(mdp, policy)
    matrix = mdp.transition[:, :, :, None] * policy.probs[None, None, :, :]
    return matrix.reshape(mdp.num_pairs, mdp.num_pairs)


def apply_p_pi(mdp, policy, f):
    """P_pi[f](s,a) = sum_{s',a'} p(s'|s,a) pi(a'|s') f(s',a')"""
    _check_policy(mdp, policy)
    f = _check_table(mdp, f)
    values = (policy.probs * f.reshape(mdp.num_states, mdp.num_actions)).sum(axis=1)
    return (mdp.transition @ values).reshape(-1)


def apply_p_pi_adjoint(mdp, policy, mu):
    """Transfer operator: pushes a measure over X one step forward."""
    mu = _check_table(mdp, mu, 'measure')
    return p_pi_matrix(mdp, policy).T @ mu


def apply_p_max(mdp, f):
    """P_max[f](s,a) = sum_{s'} p(s'|s,a) max_{a'} f(s',a')"""
    f = _check_table(mdp, f)
    values = f.reshape(mdp.num_states, mdp.num_actions).max(axis=1)
    return (mdp.transition @ values).reshape(-1)


# =======
# oracles
# =======

def _bellman_system(mdp, policy):
    return np.eye(mdp.num_pairs) - mdp.gamma * p_pi_matrix(mdp, policy)


def exact_resolvent_matrix(mdp, policy):
    """Returns (I - gamma P_pi)^-1."""
    system = _bellman_system(mdp, policy)
    try:
        return np.linalg.solve(system, np.eye(mdp.num_pairs))
    except np.linalg.LinAlgError:
        raise SingularSystemError('the resolvent I - gamma P_pi')


def exact_q_pi(mdp, policy, r):
    """Solves q = r + gamma P_pi q directly."""
    table = _reward_table(mdp, r)
    try:
        return np.linalg.solve(_bellman_system(mdp, policy), table)
    except np.linalg.LinAlgError:
        raise SingularSystemError('the Bellman equation for q_pi')


def exact_q_star(mdp, r, tol=1e-10, max_iterations=None):
    """Value iteration on q <- r + gamma P_max[q].

    Stops once the sup-norm change drops below tol * (1 - gamma), which bounds
    the Bellman residual of the returned table by tol.
    """
    if tol <= 0:
        raise ValueError("Parameter 'tol' should be positive instead of {}.".format(tol))
    table = _reward_table(mdp, r)
    gamma = mdp.gamma
    if max_iterations is None:
        max_iterations = int(math.ceil(100.0 / (1.0 - gamma)))

    q = np.zeros_like(table)
    change = float('inf')
    for iteration in range(1, max_iterations + 1):
        q_next = table + gamma * apply_p_max(mdp, q)
        change = float(np.max(np.abs(q_next - q)))
        q = q_next
        if change < tol * (1.0 - gamma):
            LOGGER.debug("Value iteration converged after {} iterations.".format(iteration))
            return q
    raise ConvergenceError(max_iterations, change)


def visitation_distribution(mdp, policy, x):
    """d_pi(.|x) = (1 - gamma) sum_{t>=0} gamma^t p_pi^t(.|x), with p^0 = delta_x."""
    index = mdp.pair_index(x)
    delta = np.zeros(mdp.num_pairs)
    delta[index] = 1.0
    try:
        row = np.linalg.solve(_bellman_system(mdp, policy).T, delta)
    except np.linalg.LinAlgError:
        raise SingularSystemError('the visitation equation')
    return (1.0 - mdp.gamma) * row


def greedy_policy(q, num_actions=None):
    """One-hot policy on argmax_a q(s,a), lowest action index on ties.

    `q` is either an (S, A) array or a flat value table with `num_actions`.
    """
    q = np.asarray(q, dtype=float)
    if q.ndim == 1:
        if num_actions is None:
            raise ValueError("Parameter 'num_actions' is required for a flat value table.")
        q = q.reshape(-1, num_actions)
    if not np.all(np.isfinite(q)):
        raise ValueError("Can't build a greedy policy from non-finite values.")
    return PolicyTable.deterministic(np.argmax(q, axis=1), q.shape[1])


def optimal_policy(mdp, r, tol=1e-10):
    return greedy_policy(exact_q_star(mdp, r, tol=tol), mdp.num_actions)


def state_value(mdp, policy, q):
    """V(s) = sum_a pi(a|s) q(s,a)"""
    q = _check_table(mdp, q)
    return (policy.probs * q.reshape(mdp.num_states, mdp.num_actions)).sum(axis=1)


def expected_return(mdp, policy, q):
    """Discounted return from the initial distribution, <initial_dist, V>."""
    return float(mdp.initial_dist @ state_value(mdp, policy, q))


# ===========
# Monte-Carlo
# ===========

def sample_rows(probs, rng):
    """Draws one index per row of a row-stochastic matrix."""
    cumulative = np.cumsum(probs, axis=1)
    u = rng.random(probs.shape[0])[:, None]
    return np.minimum((cumulative <= u).sum(axis=1), probs.shape[1] - 1)


def episodic_returns(mdp, policy, r, horizon, episodes, rng):
    """Discounted returns of `episodes` independent rollouts from the
    initial distribution, truncated after `horizon` steps."""
    if horizon < 1:
        raise ValueError("Parameter 'horizon' should be at least 1 instead of {}.".format(horizon))
    _check_policy(mdp, policy)
    table = _reward_table(mdp, r)
    num_actions = mdp.num_actions

    states = sample_rows(np.broadcast_to(mdp.initial_dist, (episodes, mdp.num_states)), rng)
    totals = np.zeros(episodes)
    discount = 1.0
    for _ in range(horizon):
        actions = sample_rows(policy.probs[states], rng)
        totals += discount * table[states * num_actions + actions]
        states = sample_rows(mdp.transition[states, actions], rng)
        discount *= mdp.gamma
    return totals


def episodic_return(mdp, policy, r, horizon, rng):
    return float(episodic_returns(mdp, policy, r, horizon, 1, rng)[0])


# =========
# geometry
# =========

def state_action_encoding(mdp):
    """Network input per pair: one-hot state, one-hot action and, for grids,
    coordinates scaled to [0, 1]."""
    num_states, num_actions = mdp.num_states, mdp.num_actions
    blocks = [np.repeat(np.eye(num_states), num_actions, axis=0),
              np.tile(np.eye(num_actions), (num_states, 1))]
    if mdp.coords is not None:
        span = np.maximum(mdp.coords.max(axis=0) - mdp.coords.min(axis=0), 1.0)
        scaled = (mdp.coords - mdp.coords.min(axis=0)) / span
        blocks.append(np.repeat(scaled, num_actions, axis=0))
    return np.hstack(blocks)


def state_distance(mdp):
    """Manhattan distance between grid cells, or the discrete metric."""
    if mdp.coords is None:
        return 1.0 - np.eye(mdp.num_states)
    return np.abs(mdp.coords[:, None, :] - mdp.coords[None, :, :]).sum(axis=2)
