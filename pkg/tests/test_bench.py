import os

import numpy as np
import pandas as pd
import pytest

from operatorq import bench, mdp, operators, rewards
from operatorq.errors import ConfigError, EmptyInputError
from operatorq.learning import CURVE_COLUMNS
from operatorq.mdp import environments


def tiny_values(tmp_path, **overrides):
    values = {
        'env': 'grid5',
        'gamma': 0.9,
        'family': 'goal-cell',
        'n_train_rewards': 4,
        'n_test_rewards': 2,
        'dataset_path': str(tmp_path / 'dataset.txt'),
        'dataset_n': 500,
        'designs': ['successor-feature', 'attention'],
        'seeds': [0, 1],
        'steps': 4,
        'eval_every': 2,
        'batch_size': 16,
        'm': 8,
        'hidden': [8],
        'embed_dim': 4,
        'timing': False,
        'output': str(tmp_path / 'runs'),
    }
    values.update(overrides)
    return values


def zero_operator(grid):
    reference_set = operators.full_reference_set(grid)
    return operators.WeightTableOperator(
        reference_set, grid.gamma, mdp.state_action_encoding(grid),
        np.zeros((grid.num_pairs, grid.num_pairs)))


class TestExperimentConfig:

    def test_defaults(self):
        config = bench.ExperimentConfig()
        assert config.designs == ['successor-feature', 'attention', 'linear', 'vanilla']
        assert config.seeds == list(range(10))
        assert (config.n_train_rewards, config.n_test_rewards) == (32, 16)
        assert config.dataset_path is None

    def test_unknown_key(self):
        with pytest.raises(ConfigError) as info:
            bench.ExperimentConfig({'learning_speed': 3})
        assert info.value.key == 'learning_speed'

    @pytest.mark.parametrize('key, value', [
        ('mode', 'control'),
        ('env', 'grid9'),
        ('family', 'spiral'),
        ('seeds', []),
        ('designs', ['transformer']),
        ('gamma', 'high'),
        ('workers', 0),
        ('dataset_kind', 'expert'),
    ])
    def test_invalid_values(self, key, value):
        with pytest.raises(ConfigError) as info:
            bench.ExperimentConfig({key: value})
        assert info.value.key == key

    def test_training_errors_name_the_training_key(self):
        with pytest.raises(ConfigError) as info:
            bench.ExperimentConfig({'batch_size': 0})
        assert info.value.key == 'training'

    def test_successor_features_need_evaluation_mode(self):
        with pytest.raises(ConfigError) as info:
            bench.ExperimentConfig({'mode': 'optimization'})
        assert info.value.key == 'designs'
        assert bench.ExperimentConfig({'mode': 'optimization', 'designs': ['maxout']}).mode \
            == 'optimization'

    def test_coercion(self):
        config = bench.ExperimentConfig({'seeds': 3, 'timing': 'false', 'gamma': '0.5'})
        assert config.seeds == [3]
        assert config.timing is False
        assert config.gamma == 0.5

    def test_file_and_overrides(self, tmp_path):
        path = tmp_path / 'config.yaml'
        path.write_text('batch_size: 32\nm: 16\ndesigns: [attention, maxout]\n')
        config = bench.load_config(str(path), {'batch_size': 64, 'm': None})
        assert (config.batch_size, config.m) == (64, 16)
        assert config.designs == ['attention', 'maxout']

    def test_document_should_be_a_mapping(self, tmp_path):
        path = tmp_path / 'config.yaml'
        path.write_text('- attention\n')
        with pytest.raises(ConfigError):
            bench.load_config(str(path))

    def test_every_option_has_a_flag(self):
        assert bench.option_flag('dataset_path') == '--dataset-path'
        assert len({bench.option_flag(key) for key in bench.OPTIONS}) == len(bench.OPTIONS)

    def test_output_root(self, monkeypatch):
        monkeypatch.delenv(bench.OUTPUT_ENV, raising=False)
        assert bench.ExperimentConfig().output_root == 'runs'
        monkeypatch.setenv(bench.OUTPUT_ENV, '/tmp/elsewhere')
        assert bench.ExperimentConfig().output_root == '/tmp/elsewhere'
        assert bench.ExperimentConfig({'output': 'here'}).output_root == 'here'

    def test_require(self):
        with pytest.raises(ConfigError) as info:
            bench.ExperimentConfig().require('dataset_path')
        assert info.value.key == 'dataset_path'

    def test_train_config(self):
        train = bench.ExperimentConfig({'steps': 7, 'hidden': [5, 5]}).train_config('linear', 3)
        assert (train.design, train.seed, train.steps, train.hidden) == ('linear', 3, 7, [5, 5])


class TestMseEval:

    def test_exact_operator(self, grid5_slip):
        policy = environments.get('grid5-slip').target_policy(grid5_slip)
        sampler = rewards.RewardSampler(rewards.family('rbf-bump', grid5_slip), 'test', 0)
        test = [sampler.sample() for _ in range(4)]
        model = operators.exact_operator(grid5_slip, policy)
        assert bench.mse_eval(model, test, grid5_slip, policy,
                              bench.initial_pairs(grid5_slip)) < 1e-12

    def test_constant_prediction(self, grid5):
        policy = environments.get('grid5').target_policy(grid5)
        r = rewards.family('goal-cell', grid5).make([7.0])
        pairs = bench.initial_pairs(grid5)
        q = mdp.exact_q_pi(grid5, policy, r)
        assert bench.mse_eval(zero_operator(grid5), [r], grid5, policy, pairs) == \
            pytest.approx(np.mean(q[pairs] ** 2))

    def test_states_weighted_by_initial_dist(self):
        loops = mdp.TabularMdp(np.eye(3)[:, None, :], [0.9, 0.1, 0.0], 0.5)
        policy = mdp.PolicyTable.uniform(3, 1)
        r = rewards.tabular_reward([0.0, 1.0, 0.0], 1)
        pairs = bench.initial_pairs(loops)
        assert pairs.tolist() == [0, 1]
        np.testing.assert_allclose(bench.pair_weights(loops, pairs), [0.9, 0.1])
        assert bench.mse_eval(zero_operator(loops), [r], loops, policy, pairs) == pytest.approx(0.4)
        estimate, stderr = bench.mse_eval_monte_carlo(
            zero_operator(loops), [r], loops, policy, pairs, np.random.default_rng(0), episodes=3)
        assert estimate == pytest.approx(0.4)
        assert stderr == pytest.approx(0.0, abs=1e-12)

    def test_attention_at_initialization_on_constant_rewards(self, grid5, rng):
        policy = environments.get('grid5').target_policy(grid5)
        reference_set = operators.ReferenceSet.from_indices(rng.choice(100, 10, replace=False), 4)
        model = operators.initialize_model(
            'attention', reference_set, grid5.gamma, mdp.state_action_encoding(grid5), rng)
        constants = [rewards.constant_reward(c) for c in [-2.0, 0.5, 3.0]]
        assert bench.mse_eval(model, constants, grid5, policy, bench.initial_pairs(grid5)) < 1e-20

    def test_initial_pairs(self, chain2, grid5):
        assert bench.initial_pairs(chain2).tolist() == [0]
        assert bench.initial_pairs(grid5).tolist() == list(range(100))

    def test_monte_carlo_agrees(self, grid5_slip):
        policy = environments.get('grid5-slip').target_policy(grid5_slip)
        r = rewards.family('rbf-bump', grid5_slip).make([12.0])
        pairs = bench.initial_pairs(grid5_slip)
        model = zero_operator(grid5_slip)
        exact = bench.mse_eval(model, [r], grid5_slip, policy, pairs)
        estimate, stderr = bench.mse_eval_monte_carlo(
            model, [r], grid5_slip, policy, pairs, np.random.default_rng(0), episodes=500)
        assert stderr > 0.0
        assert abs(estimate - exact) <= 3 * stderr

    def test_pair_returns_on_a_self_loop(self, loop1):
        means, stderrs = bench.pair_returns(loop1, mdp.PolicyTable.uniform(1, 1), [1.0], [0],
                                            50, 10, np.random.default_rng(0))
        np.testing.assert_allclose(means, [2.0 - 2.0 * 0.5 ** 50])
        np.testing.assert_allclose(stderrs, [0.0], atol=1e-12)


class TestZeroShotReturn:

    def test_exact_optimal_operator(self, grid5_slip):
        r = rewards.family('goal-cell', grid5_slip).make([18.0])
        q_star = mdp.exact_q_star(grid5_slip, r.tabularize(grid5_slip))
        model = operators.exact_operator(grid5_slip, mdp.greedy_policy(q_star, 4))
        result = bench.zero_shot_return(model, r, grid5_slip, rng=np.random.default_rng(0),
                                        episodes=200)
        assert result.ret == pytest.approx(result.optimal_return, abs=1e-6)
        assert result.ratio == pytest.approx(1.0, abs=1e-6)
        assert np.isfinite(result.mc_return)

    def test_zero_reward(self, grid5):
        result = bench.zero_shot_return(zero_operator(grid5), rewards.constant_reward(0.0), grid5)
        assert result.ret == 0.0
        assert np.isnan(result.mc_return)

    def test_ratio_is_a_fraction_for_nonnegative_rewards(self, grid5, rng):
        reference_set = operators.ReferenceSet.from_indices(rng.choice(100, 10, replace=False), 4)
        model = operators.initialize_model(
            'attention', reference_set, grid5.gamma, mdp.state_action_encoding(grid5), rng,
            final_scale=1.0)
        sampler = rewards.RewardSampler(rewards.family('rbf-bump', grid5), 'test', 1)
        for _ in range(3):
            ratio = bench.zero_shot_return(model, sampler.sample(), grid5).ratio
            assert -1e-9 <= ratio <= 1.0 + 1e-9


class TestVisitationGap:

    def test_exact_operator(self, grid5_slip):
        policy = environments.get('grid5-slip').target_policy(grid5_slip)
        model = operators.exact_operator(grid5_slip, policy)
        assert bench.visitation_gap(model, grid5_slip, policy) < 1e-9

    def test_uniform_weights(self, grid5_slip):
        policy = environments.get('grid5-slip').target_policy(grid5_slip)
        uniform = operators.WeightTableOperator(
            operators.full_reference_set(grid5_slip), grid5_slip.gamma,
            mdp.state_action_encoding(grid5_slip),
            np.ones((grid5_slip.num_pairs, grid5_slip.num_pairs)))
        gap = bench.visitation_gap(uniform, grid5_slip, policy)
        assert 0.05 < gap <= 1.0
        assert bench.visitation_gap(uniform, grid5_slip, policy, [0, 1]) > 0.05

    def test_design_without_weights(self, grid5, rng):
        reference_set = operators.ReferenceSet.from_indices(rng.choice(100, 10, replace=False), 4)
        model = operators.initialize_model(
            'maxout', reference_set, grid5.gamma, mdp.state_action_encoding(grid5), rng, heads=2)
        with pytest.raises(ValueError):
            bench.visitation_gap(model, grid5, environments.get('grid5').target_policy(grid5))


class TestLinearSpeedup:

    def test_timings(self):
        result = bench.linear_speedup(64, 200, repeats=1)
        assert result['b'] == 64 and result['m'] == 200
        assert result['fast_s'] >= 0.0 and result['naive_s'] >= 0.0


class TestRunExperiment:

    def test_files_and_aggregate(self, tmp_path):
        config = bench.ExperimentConfig(tiny_values(tmp_path))
        report = bench.run_experiment(config)
        assert report.exit_code == 0
        runs = tmp_path / 'runs'
        assert (tmp_path / 'dataset.txt').exists()
        for seed in [0, 1]:
            assert (runs / 'attention' / 'seed-{}'.format(seed) / 'model.npz').exists()
            assert (runs / 'successor-feature' / 'seed-{}'.format(seed) / 'psi.npz').exists()
        assert not (runs / 'returns.csv').exists()

        curve = pd.read_csv(str(runs / 'attention' / 'seed-0' / 'curve.csv'))
        assert list(curve.columns) == CURVE_COLUMNS
        assert curve['step'].tolist() == [0, 2, 4]
        assert (curve['test_mse'] >= 0).all()

        aggregate = pd.read_csv(str(runs / 'aggregate.csv'), float_precision='round_trip')
        curves = pd.concat([
            pd.read_csv(str(runs / design / 'seed-{}'.format(seed) / 'curve.csv'),
                        float_precision='round_trip').assign(design=design)
            for design in ['attention', 'successor-feature'] for seed in [0, 1]])
        for (design, step), group in curves.groupby(['design', 'step']):
            row = aggregate[(aggregate['design'] == design) & (aggregate['step'] == step)].iloc[0]
            assert row['runs'] == 2
            assert row['test_mse_median'] == np.median(group['test_mse'])
            assert row['train_mse_mean'] == group['train_mse'].mean()
        assert aggregate['test_return_median'].isna().all()

        written = (runs / 'aggregate.csv').read_bytes()
        bench.write_aggregate(str(runs))
        assert (runs / 'aggregate.csv').read_bytes() == written

    def test_aggregate_skips_stale_runs(self, tmp_path):
        bench.run_experiment(bench.ExperimentConfig(tiny_values(tmp_path, designs=['linear'])))
        report = bench.run_experiment(bench.ExperimentConfig(
            tiny_values(tmp_path, designs=['attention'], seeds=[1])))
        assert set(report.aggregate['design']) == {'attention'}
        assert (report.aggregate['runs'] == 1).all()
        aggregate = pd.read_csv(str(tmp_path / 'runs' / 'aggregate.csv'))
        assert set(aggregate['design']) == {'attention'}
        assert (aggregate['runs'] == 1).all()

    def test_rerun_is_identical(self, tmp_path):
        bench.run_experiment(bench.ExperimentConfig(tiny_values(tmp_path, designs=['linear'])))
        bench.run_experiment(bench.ExperimentConfig(
            tiny_values(tmp_path, designs=['linear'], output=str(tmp_path / 'again'))))
        first = (tmp_path / 'runs' / 'aggregate.csv').read_bytes()
        assert first == (tmp_path / 'again' / 'aggregate.csv').read_bytes()

    def test_optimization_returns(self, tmp_path):
        config = bench.ExperimentConfig(tiny_values(
            tmp_path, mode='optimization', designs=['maxout'], heads=2, seeds=[0], mc_episodes=5))
        report = bench.run_experiment(config)
        returns = pd.read_csv(str(tmp_path / 'runs' / 'returns.csv'))
        assert len(returns) == 2
        assert (returns['ratio'] <= 1.0 + 1e-9).all()
        assert len(report.returns) == 2

        curve = pd.read_csv(str(tmp_path / 'runs' / 'maxout' / 'seed-0' / 'curve.csv'))
        assert curve['step'].tolist() == [0, 2, 4]
        assert np.all(np.isfinite(curve['test_return']))
        final = returns['return'].mean()
        assert curve['test_return'].iloc[-1] == pytest.approx(final, rel=1e-9, abs=1e-12)
        assert np.all(np.isfinite(report.aggregate['test_return_median']))

    def test_failed_run_is_recorded(self, tmp_path, monkeypatch):
        original = bench.experiment.train_operator

        def flaky(config, *args, **kwargs):
            if config.seed == 1:
                raise RuntimeError('diverged')
            return original(config, *args, **kwargs)

        monkeypatch.setattr(bench.experiment, 'train_operator', flaky)
        report = bench.run_experiment(bench.ExperimentConfig(tiny_values(tmp_path, designs=['attention'])))
        assert report.exit_code == 1
        assert report.failures == [('attention', 1, 'diverged')]
        assert (tmp_path / 'runs' / 'attention' / 'seed-0' / 'curve.csv').exists()
        assert (tmp_path / 'runs' / 'aggregate.csv').exists()

    def test_missing_dataset_path(self, tmp_path):
        with pytest.raises(ConfigError) as info:
            bench.run_experiment(bench.ExperimentConfig(tiny_values(tmp_path, dataset_path=None)))
        assert info.value.key == 'dataset_path'

    def test_dataset_is_reused(self, tmp_path, grid5):
        config = bench.ExperimentConfig(tiny_values(tmp_path))
        env = environments.get('grid5')
        generated = bench.prepare_dataset(config, grid5, env)
        assert bench.prepare_dataset(config, grid5, env) == generated

    def test_reused_dataset_must_match_discount(self, tmp_path, grid5):
        env = environments.get('grid5')
        bench.prepare_dataset(bench.ExperimentConfig(tiny_values(tmp_path)), grid5, env)
        other = bench.ExperimentConfig(tiny_values(tmp_path, gamma=0.5))
        with pytest.raises(ConfigError) as info:
            bench.prepare_dataset(other, env.build(0.5), env)
        assert info.value.key == 'dataset_path'


class TestAggregate:

    def test_no_runs(self, tmp_path):
        with pytest.raises(EmptyInputError):
            bench.aggregate_runs(str(tmp_path))
        assert not (tmp_path / 'aggregate.csv').exists()

    def test_statistics(self, tmp_path):
        for seed, scale in enumerate([1.0, 2.0, 4.0]):
            run_dir = tmp_path / 'linear' / 'seed-{}'.format(seed)
            run_dir.mkdir(parents=True)
            pd.DataFrame({'step': [0, 10], 'train_mse': [scale, scale / 2],
                          'test_mse': [scale, scale], 'bellman_loss': [np.nan, 1.0],
                          'wall_clock_s': [0.0, 0.0]}).to_csv(str(run_dir / 'curve.csv'), index=False)
        table = bench.aggregate_runs(str(tmp_path))
        first = table[table['step'] == 0].iloc[0]
        assert first['runs'] == 3
        assert first['train_mse_median'] == 2.0
        assert first['train_mse_q25'] == 1.5
        assert first['train_mse_q75'] == 3.0
        assert first['train_mse_mean'] == pytest.approx(7.0 / 3.0)
        assert np.isnan(first['bellman_loss_median'])
        assert np.isnan(first['test_return_median'])
