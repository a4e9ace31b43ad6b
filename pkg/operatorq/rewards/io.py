import json
import logging

from ..errors import DatasetParseError
from .abstract import FAMILIES

LOGGER = logging.getLogger(__name__)

__all__ = ['reward_record', 'save_rewards', 'load_rewards']


def reward_record(reward):
    if reward.family_id is None:
        raise ValueError("Only family rewards can be written to a reward-set file.")
    return {
        'family_id': reward.family_id,
        'params': [float(p) for p in reward.params],
        'split': reward.split,
        'options': reward.options,
    }


def save_rewards(rewards, path):
    """One JSON record per line: {family_id, params, split, options}."""
    with open(path, 'w', encoding='utf-8') as stream:
        for reward in rewards:
            stream.write(json.dumps(reward_record(reward), sort_keys=True) + '\n')


def load_rewards(path, mdp):
    families = {}
    rewards = []
    with open(path, encoding='utf-8') as stream:
        for number, line in enumerate(stream, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                key = (record['family_id'], json.dumps(record.get('options', {}), sort_keys=True))
                if key not in families:
                    families[key] = FAMILIES.create(record['family_id'], mdp, **record.get('options', {}))
                rewards.append(families[key].make(record['params'], split=record.get('split')))
            except (ValueError, KeyError, TypeError) as e:
                raise DatasetParseError(path, number, str(e))
    return rewards
