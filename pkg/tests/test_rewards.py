import json

import numpy as np
import pytest

from operatorq import rewards
from operatorq.errors import ConfigError, DatasetParseError, UnknownNameError
from operatorq.mdp import environments


class TestRewardFunctions:

    def test_tabular(self, chain2):
        r = rewards.tabular_reward([1.0, 0.0], 1)
        assert rewards.evaluate_reward(r, 0) == 1.0
        assert r.evaluate((1, 0)) == 0.0
        np.testing.assert_array_equal(rewards.tabularize(r, chain2), [1.0, 0.0])

    def test_constant(self, grid5):
        r = rewards.constant_reward(2.5)
        assert rewards.evaluate_reward(r, (7, 3)) == 2.5
        np.testing.assert_array_equal(r.tabularize(grid5), np.full(100, 2.5))

    def test_constant_on_flat_indices(self):
        r = rewards.constant_reward(3.0)
        assert rewards.evaluate_reward(r, 4) == 3.0
        np.testing.assert_array_equal(r.evaluate_many([0, 9, 41]), [3.0, 3.0, 3.0])
        assert rewards.evaluate_reward(r.scaled(2.0, -1.0), 4) == 5.0

    def test_pair_dependent_reward_needs_num_actions(self):
        r = rewards.RewardFn(lambda s, a: s + a)
        with pytest.raises(ValueError):
            r.evaluate(3)

    def test_scaled(self, grid5):
        r = rewards.tabular_reward(np.arange(100.0), 4).scaled(2.0, 1.0)
        assert r.evaluate(10, 4) == 21.0


class TestFamilies:

    def test_names(self):
        assert rewards.names() == ['feature-linear', 'goal-cell', 'rbf-bump']

    @pytest.mark.parametrize('name', ['goal-cell', 'rbf-bump'])
    def test_two_states_keep_one_held_out(self, chain2, name):
        family = rewards.family(name, chain2)
        assert family.param_range('train')[1].tolist() == [1.0]
        assert family.param_range('test')[1].tolist() == [2.0]

    @pytest.mark.parametrize('name', ['goal-cell', 'rbf-bump'])
    def test_single_state_has_nothing_to_hold_out(self, loop1, name):
        with pytest.raises(ConfigError) as info:
            rewards.family(name, loop1)
        assert info.value.key == 'family'

    def test_unknown_family(self, grid5):
        with pytest.raises(UnknownNameError):
            rewards.family('spiral', grid5)

    @pytest.mark.parametrize('name', ['goal-cell', 'feature-linear', 'rbf-bump'])
    def test_test_range_contains_train_range(self, grid5, name):
        family = rewards.family(name, grid5)
        (train_low, train_high), (test_low, test_high) = family.param_range('train'), family.param_range('test')
        assert np.all(test_low <= train_low) and np.all(test_high >= train_high)
        assert np.any(test_low < train_low) or np.any(test_high > train_high)

    def test_goal_cell(self, grid5):
        family = rewards.family('goal-cell', grid5)
        r = family.make([7.0])
        assert r.evaluate((7, 2)) == 1.0
        assert r.evaluate((8, 2)) == 0.0
        assert family.param_range('train')[1][0] == 15.0

    def test_feature_linear(self, grid5):
        family = rewards.family('feature-linear', grid5, feature_seed=3)
        np.testing.assert_array_equal(family.make(np.zeros(9)).tabularize(grid5), np.zeros(100))
        w = np.linspace(-1.0, 1.0, 9)
        np.testing.assert_allclose(family.make(w).tabularize(grid5), family.feature_map() @ w)
        assert family.feature_map().shape == (100, 9)

    def test_rbf_peak(self, grid5):
        family = rewards.family('rbf-bump', grid5)
        table = family.make([12.0]).tabularize(grid5)
        assert table[12 * 4 + 3] == 1.0
        assert table.max() == 1.0
        assert table[13 * 4] == pytest.approx(np.exp(-1.0 / (2 * 1.5 ** 2)))

    def test_bad_split(self, grid5):
        with pytest.raises(ValueError):
            rewards.family('goal-cell', grid5).param_range('valid')


class TestSampling:

    def test_same_seed_same_rewards(self, grid5):
        family = rewards.family('goal-cell', grid5)
        first, again = rewards.RewardSampler(family, 'train', 5), rewards.RewardSampler(family, 'train', 5)
        for _ in range(10):
            assert rewards.sample_reward(first).params[0] == again.sample().params[0]

    def test_train_split_stays_in_range(self, grid5):
        sampler = rewards.RewardSampler(rewards.family('goal-cell', grid5), 'train', 0)
        goals = [sampler.sample().params[0] for _ in range(200)]
        assert max(goals) < 15

    def test_frozen_counts(self, grid5):
        family = rewards.family('feature-linear', grid5)
        train = rewards.freeze_rewards(rewards.RewardSampler(family, 'train', 0), 32)
        test = rewards.freeze_rewards(rewards.RewardSampler(family, 'test', 1), 16)
        assert (len(train), len(test)) == (32, 16)
        assert all(r.split == 'test' for r in test)
        assert np.all(np.abs(np.stack([r.params for r in train])) <= 1.0)

    def test_reward_set_samples_members(self, grid5):
        family = rewards.family('goal-cell', grid5)
        frozen = rewards.freeze_rewards(rewards.RewardSampler(family, 'train', 0), 4)
        members = {id(r) for r in frozen}
        assert all(id(frozen.sample()) in members for _ in range(20))

    def test_empty_reward_set(self):
        with pytest.raises(ValueError):
            rewards.RewardSet([])


class TestRewardFiles:

    def test_save_and_load(self, grid5, tmp_path):
        family = rewards.family('rbf-bump', grid5, sigma=2.0)
        frozen = rewards.freeze_rewards(rewards.RewardSampler(family, 'test', 3), 5)
        path = str(tmp_path / 'test.jsonl')
        rewards.save_rewards(frozen, path)
        loaded = rewards.load_rewards(path, grid5)
        for original, restored in zip(frozen, loaded):
            np.testing.assert_array_equal(original.tabularize(grid5), restored.tabularize(grid5))
            assert restored.split == 'test'

    def test_malformed_line(self, grid5, tmp_path):
        path = tmp_path / 'broken.jsonl'
        record = {'family_id': 'goal-cell', 'params': [3.0], 'split': 'train', 'options': {}}
        path.write_text(json.dumps(record) + '\n{"family_id": "goal-cell"\n')
        with pytest.raises(DatasetParseError) as info:
            rewards.load_rewards(str(path), grid5)
        assert info.value.line == 2

    def test_only_family_rewards_are_written(self, tmp_path):
        with pytest.raises(ValueError):
            rewards.save_rewards([rewards.constant_reward(1.0)], str(tmp_path / 'c.jsonl'))
