import logging

import numpy as np
import yaml

from .. import constants
from ..errors import FormatVersionError, DimensionError
from .core import TabularMdp

LOGGER = logging.getLogger(__name__)

__all__ = ['mdp_to_dict', 'mdp_from_dict', 'save_mdp', 'load_mdp']


def mdp_to_dict(mdp):
    document = {
        'format_version': constants.FORMAT_VERSION,
        'env_id': mdp.env_id,
        'num_states': mdp.num_states,
        'num_actions': mdp.num_actions,
        'gamma': mdp.gamma,
        'transition': [float(p) for p in mdp.transition.reshape(-1)],
        'initial_dist': [float(p) for p in mdp.initial_dist],
    }
    if mdp.coords is not None:
        document['coords'] = [[float(c) for c in row] for row in mdp.coords]
    return document


def mdp_from_dict(document):
    version = document.get('format_version')
    if version != constants.FORMAT_VERSION:
        raise FormatVersionError('MDP', constants.FORMAT_VERSION, version)
    num_states = int(document['num_states'])
    num_actions = int(document['num_actions'])
    transition = np.asarray(document['transition'], dtype=float)
    expected = num_states * num_actions * num_states
    if transition.size != expected:
        raise DimensionError('transition', expected, transition.size)
    return TabularMdp(
        transition.reshape(num_states, num_actions, num_states),
        document['initial_dist'],
        document['gamma'],
        env_id=document.get('env_id'),
        coords=document.get('coords'))


def save_mdp(mdp, path):
    with open(path, 'w') as stream:
        yaml.safe_dump(mdp_to_dict(mdp), stream, default_flow_style=None, sort_keys=False)
    LOGGER.debug("Saved {!r} to {}.".format(mdp, path))


def load_mdp(path):
    with open(path) as stream:
        return mdp_from_dict(yaml.safe_load(stream))
