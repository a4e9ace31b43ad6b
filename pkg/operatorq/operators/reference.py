import logging

import numpy as np

from ..errors import EmptyInputError
from ..mdp import exact_resolvent_matrix, state_action_encoding, state_distance
from .abstract import ReferenceSet
from .designs import WeightTableOperator

LOGGER = logging.getLogger(__name__)

__all__ = [
    'select_reference_points', 'full_reference_set', 'pair_distance', 'voronoi_cells',
    'voronoi_weights', 'voronoi_operator', 'covering_error_bound', 'exact_operator']

ACTION_MISMATCH_COST = 0.5


def select_reference_points(dataset, m, rng):
    """Draws m distinct (s, a) pairs of the dataset uniformly without
    replacement. If the dataset holds fewer distinct pairs, all of them are
    used and the requested size is kept on the set."""
    if m < 1:
        raise ValueError("Parameter 'm' should be at least 1 instead of {}.".format(m))
    if len(dataset) == 0:
        raise EmptyInputError("Cannot select reference points from an empty dataset.")
    distinct = np.unique(dataset.pair_indices())
    if m > distinct.size:
        LOGGER.warning(
            "Requested {} reference points but the dataset has only {} distinct pairs; "
            "using all of them.".format(m, distinct.size))
        chosen = distinct
    else:
        chosen = rng.choice(distinct, size=m, replace=False)
    return ReferenceSet.from_indices(chosen, dataset.num_actions, requested=m)


def full_reference_set(mdp):
    return ReferenceSet.from_indices(np.arange(mdp.num_pairs), mdp.num_actions)


def pair_distance(mdp):
    """d((s, a), (s', a')) = d_S(s, s') + 0.5 [a != a'] as an (|X|, |X|) array."""
    num_actions = mdp.num_actions
    mismatch = ACTION_MISMATCH_COST * (1.0 - np.eye(num_actions))
    distance = state_distance(mdp)[:, None, :, None] + mismatch[None, :, None, :]
    return distance.reshape(mdp.num_pairs, mdp.num_pairs)


def voronoi_cells(mdp, reference_set):
    """Index of the nearest reference point for every pair, lowest on ties."""
    return np.argmin(pair_distance(mdp)[:, reference_set.indices], axis=1)


def _visitation_rows(mdp, policy):
    return (1.0 - mdp.gamma) * exact_resolvent_matrix(mdp, policy)


def voronoi_weights(mdp, policy, reference_set):
    """w(xi_j | x): mass of d_pi(.|x) on the Voronoi cell of xi_j."""
    membership = np.zeros((mdp.num_pairs, reference_set.m))
    membership[np.arange(mdp.num_pairs), voronoi_cells(mdp, reference_set)] = 1.0
    return _visitation_rows(mdp, policy) @ membership


def voronoi_operator(mdp, policy, reference_set):
    return WeightTableOperator(
        reference_set, mdp.gamma, state_action_encoding(mdp),
        voronoi_weights(mdp, policy, reference_set))


def covering_error_bound(mdp, policy, reference_set):
    """Largest error of the Voronoi operator over 1-Lipschitz rewards:
    max_x sum_x' d_pi(x'|x) dist(x', Xi) / (1 - gamma)."""
    nearest = pair_distance(mdp)[:, reference_set.indices].min(axis=1)
    return float(np.max(_visitation_rows(mdp, policy) @ nearest) / (1.0 - mdp.gamma))


def exact_operator(mdp, policy):
    """Weight table with Xi = X and w(. | x) = d_pi(. | x); reproduces G_pi."""
    return WeightTableOperator(
        full_reference_set(mdp), mdp.gamma, state_action_encoding(mdp),
        _visitation_rows(mdp, policy))
