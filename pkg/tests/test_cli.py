import pytest

from operatorq import OperatorQCLI, cli


def run(*argv):
    return OperatorQCLI(*argv).exit_code


class TestCommands:

    def test_registry(self):
        names = [cmd.name for cmd in cli.getcommands(OperatorQCLI)]
        assert names == ['dump-rewards', 'evaluate', 'gen-data', 'oracle', 'report', 'train']
        assert cli.getcommand(OperatorQCLI, 'gen-data').method_name == 'gen_data'
        assert cli.getcommand(OperatorQCLI, 'missing') is None

    def test_bad_command_name(self):
        with pytest.raises(ValueError):
            cli.command(name='x')(lambda self: None)

    def test_no_arguments(self, capsys):
        assert run() == 2
        assert 'COMMAND' in capsys.readouterr().out

    def test_unknown_flag(self):
        with pytest.raises(SystemExit) as info:
            run('train', '--learning-speed', '3')
        assert info.value.code == 2


class TestOracle:

    def test_chain(self, capsys):
        assert run('oracle', '--env', 'chain2', '--reward', '1', '0', '--gamma', '0.5') == 0
        assert capsys.readouterr().out == 's a q\n0 0 1\n1 0 0\n'

    def test_optimal_policy(self, capsys):
        assert run('oracle', '--env', 'bandit2', '--policy', 'optimal', '--reward', '0', '1') == 0
        rows = [line.split() for line in capsys.readouterr().out.strip().split('\n')[1:]]
        assert [float(q) for _, _, q in rows] == pytest.approx([1.0, 2.0])

    def test_reward_length(self, capsys):
        assert run('oracle', '--env', 'chain2', '--reward', '1') == 2
        assert "'reward'" in capsys.readouterr().err

    def test_unknown_environment(self, capsys):
        assert run('oracle', '--env', 'maze') == 2
        assert 'maze' in capsys.readouterr().err


class TestTrain:

    def test_missing_dataset_path(self, capsys, tmp_path):
        assert run('train', '--output', str(tmp_path)) == 2
        assert 'dataset_path' in capsys.readouterr().err

    def test_invalid_config_key(self, capsys, tmp_path):
        path = tmp_path / 'config.yaml'
        path.write_text('speed: 3\n')
        assert run('train', str(path)) == 2
        assert "'speed'" in capsys.readouterr().err


class TestReport:

    def test_no_runs(self, capsys, tmp_path):
        assert run('report', str(tmp_path)) == 1
        assert 'EmptyInputError' in capsys.readouterr().err
        assert not (tmp_path / 'aggregate.csv').exists()


class TestWorkflow:

    def test_generate_train_evaluate(self, capsys, tmp_path):
        dataset = str(tmp_path / 'dataset.txt')
        reward_dir = str(tmp_path / 'rewards')
        runs = str(tmp_path / 'runs')
        assert run('gen-data', '--env', 'grid5', '--gamma', '0.9', '--n', '300',
                   '--out', dataset) == 0
        assert run('dump-rewards', '--env', 'grid5', '--family', 'goal-cell', '--train', '3',
                   '--test', '2', '--out', reward_dir) == 0

        config = tmp_path / 'config.yaml'
        config.write_text('\n'.join([
            'env: grid5', 'gamma: 0.9', 'family: goal-cell', 'designs: [attention]',
            'seeds: [0]', 'steps: 50', 'm: 5', 'hidden: [8]', 'embed_dim: 4',
            'n_train_rewards: 3', 'n_test_rewards: 2', 'timing: false', '']))
        assert run('train', str(config), '--dataset-path', dataset, '--steps', '2',
                   '--eval-every', '1', '--batch-size', '8', '--output', runs) == 0
        out = capsys.readouterr().out
        assert 'attention' in out

        assert (tmp_path / 'runs' / 'aggregate.csv').exists()
        assert run('report', runs) == 0
        assert run('evaluate', '--checkpoint', str(tmp_path / 'runs' / 'attention' / 'seed-0' / 'model.npz'),
                   '--rewards', str(tmp_path / 'rewards' / 'test.jsonl'),
                   '--env', 'grid5', '--gamma', '0.9') == 0
        out = capsys.readouterr().out
        assert 'mean mse' in out
        assert 'visitation gap' in out
        assert out.count('\n') >= 4


class TestTableStr:

    def test_alignment(self):
        text = cli.helpers.table_str([{'name': 'ab', 'value': 1.5}, {'name': 'c', 'value': 10}])
        assert text == 'name value\nab     1.5\nc       10\n'

    def test_column_options(self):
        text = cli.helpers.table_str(
            [{'a': 1, 'b': 2}], columns={'b': {'title': 'B', 'order': 0}, 'a': {'order': 1}})
        assert text.split('\n')[0] == 'B a'
