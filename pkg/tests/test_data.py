import json

import numpy as np
import pytest

from operatorq import data, mdp
from operatorq.errors import DatasetParseError, DimensionError, FormatVersionError
from operatorq.mdp import environments


def target(grid):
    return environments.get(grid.env_id).target_policy(grid)


def behavior_dataset(grid, p=0.3, n=500, seed=0):
    return data.generate_dataset(grid, data.BehaviorSpec(target(grid), p), n,
                                 np.random.default_rng(seed), seed=seed)


def rewrite(path, edit):
    with open(path, encoding='utf-8') as stream:
        lines = stream.read().split('\n')
    with open(path, 'w', encoding='utf-8') as stream:
        stream.write('\n'.join(edit(lines)))


class TestBehaviorSpec:

    def test_mixture(self, grid5):
        policy = data.BehaviorSpec(mdp.PolicyTable.deterministic([1] * 25, 4), 0.4).mixture()
        np.testing.assert_allclose(policy.probs[0], [0.1, 0.7, 0.1, 0.1])

    @pytest.mark.parametrize('p', [-0.1, 1.5])
    def test_bad_probability(self, grid5, p):
        with pytest.raises(ValueError):
            data.BehaviorSpec(target(grid5), p)


class TestGenerateDataset:

    def test_metadata(self, grid5):
        dataset = behavior_dataset(grid5, p=0.1, n=300, seed=4)
        metadata = dataset.metadata
        assert len(dataset) == metadata['n'] == 300
        assert metadata['env_id'] == 'grid5'
        assert metadata['gamma'] == 0.9
        assert (metadata['p'], metadata['seed'], metadata['sigma']) == (0.1, 4, 'n/a')

    def test_uniform_actions_when_always_random(self, grid5):
        n = 100000
        dataset = behavior_dataset(grid5, p=1.0, n=n)
        counts = np.bincount(dataset.actions, minlength=4)
        bound = 3 * np.sqrt(n * 0.25 * 0.75)
        assert np.all(np.abs(counts - n / 4) < bound)

    def test_expert_actions_when_never_random(self, grid5):
        dataset = behavior_dataset(grid5, p=0.0, n=400)
        np.testing.assert_array_equal(dataset.actions, target(grid5).actions()[dataset.states])

    def test_transitions_follow_the_dynamics(self, grid5_slip):
        dataset = behavior_dataset(grid5_slip, n=2000)
        assert np.all(grid5_slip.transition[dataset.states, dataset.actions, dataset.next_states] > 0)

    def test_episodes_restart_after_the_horizon(self, chain2):
        policy = mdp.PolicyTable.uniform(2, 1)
        dataset = data.generate_dataset(chain2, data.BehaviorSpec(policy, 0.0), 9,
                                        np.random.default_rng(0), horizon=3)
        assert dataset.states.tolist() == [0, 1, 1] * 3

    def test_same_seed_same_file(self, grid5_slip, tmp_path):
        paths = [str(tmp_path / 'first.txt'), str(tmp_path / 'second.txt')]
        for path in paths:
            data.save_dataset(behavior_dataset(grid5_slip, seed=11), path)
        with open(paths[0], 'rb') as first, open(paths[1], 'rb') as second:
            assert first.read() == second.read()

    def test_empirical_transitions_converge(self, grid5):
        dataset = behavior_dataset(grid5, p=1.0, n=50000)
        probs, visits = data.empirical_transitions(dataset, grid5)
        assert np.all(visits > 0)
        assert np.max(np.abs(probs - grid5.transition)) < 0.02

    def test_unvisited_pairs_are_zero(self, chain2):
        dataset = data.TransitionDataset([(0, 0, 1)], {'num_states': 2, 'num_actions': 1})
        probs, visits = data.empirical_transitions(dataset, chain2)
        np.testing.assert_array_equal(visits, [[1.0], [0.0]])
        np.testing.assert_array_equal(probs[1, 0], [0.0, 0.0])

    def test_bad_size(self, grid5):
        with pytest.raises(ValueError):
            behavior_dataset(grid5, n=0)


class TestFinalBuffer:

    def test_equal_shares(self, grid5):
        dataset = data.generate_final_buffer(grid5, target(grid5), 301, np.random.default_rng(0), seed=0)
        assert len(dataset) == 301
        assert dataset.metadata['kind'] == 'final-buffer'
        assert dataset.metadata['p'] == [1.0, 0.3, 0.1]

    def test_too_small(self, grid5):
        with pytest.raises(ValueError):
            data.generate_final_buffer(grid5, target(grid5), 2, np.random.default_rng(0))


class TestTransitionDataset:

    def test_indices_out_of_range(self):
        with pytest.raises(IndexError):
            data.TransitionDataset([(0, 2, 0)], {'num_states': 1, 'num_actions': 2})

    def test_metadata_needs_sizes(self):
        with pytest.raises(ValueError):
            data.TransitionDataset([(0, 0, 0)], {'num_states': 1})

    def test_mdp_mismatch(self, chain2, grid5):
        with pytest.raises(DimensionError):
            behavior_dataset(grid5, n=10).check_mdp(chain2)

    def test_environment_and_discount_must_match(self, grid5, grid5_slip):
        dataset = behavior_dataset(grid5, n=10)
        dataset.check_mdp(grid5)
        with pytest.raises(ValueError, match='grid5-slip'):
            dataset.check_mdp(grid5_slip)
        with pytest.raises(ValueError, match='gamma'):
            dataset.check_mdp(grid5.with_gamma(0.5))

    def test_records_are_read_only(self, grid5):
        with pytest.raises(ValueError):
            behavior_dataset(grid5, n=10).records[0, 0] = 3


class TestDatasetFiles:

    def test_save_and_load(self, grid5_slip, tmp_path):
        dataset = behavior_dataset(grid5_slip)
        path = str(tmp_path / 'dataset.txt')
        data.save_dataset(dataset, path)
        loaded = data.load_dataset(path)
        assert loaded == dataset
        assert loaded.env_id == 'grid5-slip' and loaded.gamma == 0.9

    def test_layout(self, chain2, tmp_path):
        dataset = data.TransitionDataset([(0, 0, 1), (1, 0, 1)], {'num_states': 2, 'num_actions': 1})
        path = tmp_path / 'tiny.txt'
        data.save_dataset(dataset, str(path))
        lines = path.read_text(encoding='utf-8').split('\n')
        assert json.loads(lines[0])['n'] == 2
        assert lines[1:] == ['0 0 1', '1 0 1', '']

    def test_no_rewards_are_stored(self, grid5, tmp_path):
        path = tmp_path / 'dataset.txt'
        data.save_dataset(behavior_dataset(grid5), str(path))
        assert 'reward' not in path.read_text(encoding='utf-8')

    def test_missing_records(self, grid5, tmp_path):
        path = str(tmp_path / 'dataset.txt')
        data.save_dataset(behavior_dataset(grid5, n=20), path)
        rewrite(path, lambda lines: lines[:-3])
        with pytest.raises(DatasetParseError) as info:
            data.load_dataset(path)
        assert info.value.line == 20
        assert 'expected 20 records, found 18' in str(info.value)

    def test_invalid_utf8(self, grid5, tmp_path):
        path = tmp_path / 'dataset.txt'
        data.save_dataset(behavior_dataset(grid5, n=5), str(path))
        lines = path.read_bytes().split(b'\n')
        lines[3] = b'\xff\xfe 0 1'
        path.write_bytes(b'\n'.join(lines))
        with pytest.raises(DatasetParseError) as info:
            data.load_dataset(str(path))
        assert info.value.line == 4
        assert 'UTF-8' in str(info.value)

    def test_cut_line(self, grid5, tmp_path):
        path = str(tmp_path / 'dataset.txt')
        data.save_dataset(behavior_dataset(grid5, n=20), path)
        rewrite(path, lambda lines: lines[:5] + [lines[5].rsplit(' ', 1)[0]])
        with pytest.raises(DatasetParseError) as info:
            data.load_dataset(path)
        assert info.value.line == 6

    def test_non_integer_field(self, grid5, tmp_path):
        path = str(tmp_path / 'dataset.txt')
        data.save_dataset(behavior_dataset(grid5, n=5), path)
        rewrite(path, lambda lines: lines[:3] + ['1 x 2'] + lines[4:])
        with pytest.raises(DatasetParseError) as info:
            data.load_dataset(path)
        assert info.value.line == 4

    def test_bad_header(self, tmp_path):
        path = tmp_path / 'dataset.txt'
        path.write_text('not json\n0 0 0\n', encoding='utf-8')
        with pytest.raises(DatasetParseError) as info:
            data.load_dataset(str(path))
        assert info.value.line == 1

    def test_version_mismatch(self, grid5, tmp_path):
        path = str(tmp_path / 'dataset.txt')
        data.save_dataset(behavior_dataset(grid5, n=5), path)

        def bump(lines):
            header = json.loads(lines[0])
            header['format_version'] = 99
            return [json.dumps(header)] + lines[1:]

        rewrite(path, bump)
        with pytest.raises(FormatVersionError) as info:
            data.load_dataset(path)
        assert info.value.got == 99
