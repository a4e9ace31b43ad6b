import sys, argparse, logging, os
import numpy as np
from . import cli, constants, mdp, rewards, nn, operators, learning, data, bench
from .errors import OperatorQError, ConfigError, UnknownNameError

__all__ = ['mdp', 'rewards', 'nn', 'operators', 'learning', 'data', 'bench', 'main']

LOGGER = logging.getLogger(__name__)

def main():
  sys.exit(OperatorQCLI(*sys.argv[1:]).exit_code)

# =============
# command class
# =============

class OperatorQCLI(object):
  """operatorq COMMAND [--help]

  Exit codes: 0 success, 1 failed or partially failed run, 2 usage or
  configuration error.
  """

  def __init__(self, *argv):
    super(OperatorQCLI, self).__init__()
    self.exit_code = 0

    parser = argparse.ArgumentParser(
      prog='operatorq',
      usage='%(prog)s [-v] COMMAND [--help]')
    parser.add_argument('-v', '--verbose', action='count', default=0,
      help='log progress (-vv for debug output)')
    subparsers = parser.add_subparsers(title='COMMAND', dest='command')
    subparsers.required = True

    # add subcommand for each method with @cli.command decorator
    for cmd in cli.getcommands(self.__class__):
      cmd.add_to(subparsers)
    self._add_train_flags(subparsers.choices['train'])

    if len(argv) == 0:
      parser.print_help()
      self.exit_code = 2
      return

    args = vars(parser.parse_args(argv))
    command = args.pop('command')
    verbose = args.pop('verbose')
    if verbose:
      logging.basicConfig(level=logging.DEBUG if verbose > 1 else logging.INFO,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s')

    try:
      result = command(self, **args)
      self.exit_code = result or 0
    except (ConfigError, UnknownNameError) as e:
      print(e, file=sys.stderr)
      self.exit_code = 2
    except OperatorQError as e:
      print(e, file=sys.stderr)
      self.exit_code = 1

  @staticmethod
  def _add_train_flags(subparser):
    # one flag per configuration key; None means "not given"
    for key, option in bench.OPTIONS.items():
      kwargs = {'dest': key, 'default': None, 'type': option.type, 'help': option.help}
      if option.many:
        kwargs['nargs'] = '+'
      subparser.add_argument(bench.option_flag(key), **kwargs)

  @staticmethod
  def _policy(env, model_mdp, name):
    if name == 'target':
      return env.target_policy(model_mdp)
    if name == 'uniform':
      return mdp.PolicyTable.uniform(model_mdp.num_states, model_mdp.num_actions)
    return None

  @cli.command(
    cli.argument('--env', default='grid5', help='environment name'),
    cli.argument('--gamma', type=float, help='discount factor'),
    cli.argument('--p', type=float, default=0.3, help='random-action probability'),
    cli.argument('--kind', choices=['behavior', 'final-buffer'], default='behavior'),
    cli.argument('--n', type=int, default=50000, help='number of transitions'),
    cli.argument('--seed', type=int, default=0),
    cli.argument('--out', required=True, help='dataset file to write'),
    description='Generate an offline dataset from the target policy with random actions.')
  def gen_data(self, env, gamma, p, kind, n, seed, out):
    environment = mdp.environments.get(env)
    model_mdp = environment.build(gamma)
    rng = np.random.default_rng(seed)
    base = environment.target_policy(model_mdp)
    if kind == 'final-buffer':
      dataset = data.generate_final_buffer(model_mdp, base, n, rng, seed=seed)
    else:
      dataset = data.generate_dataset(model_mdp, data.BehaviorSpec(base, p), n, rng, seed=seed)
    data.save_dataset(dataset, out)
    print("Wrote {} transitions to {}.".format(len(dataset), out))

  @cli.command(
    cli.argument('--env', default='grid5', help='environment name'),
    cli.argument('--family', default='rbf-bump', help='reward family'),
    cli.argument('--train', type=int, default=constants.N_TRAIN_REWARDS, help='training rewards'),
    cli.argument('--test', type=int, default=constants.N_TEST_REWARDS, help='test rewards'),
    cli.argument('--seed', type=int, default=1234),
    cli.argument('--feature-seed', type=int, default=0, dest='feature_seed'),
    cli.argument('--out', required=True, help='directory for train.jsonl and test.jsonl'),
    description='Freeze train and test reward sets of a family to files.')
  def dump_rewards(self, env, family, train, test, seed, feature_seed, out):
    model_mdp = mdp.environments.build(env)
    reward_family = rewards.family(family, model_mdp, feature_seed=feature_seed)
    os.makedirs(out, exist_ok=True)
    for split, count, split_seed in [('train', train, seed), ('test', test, seed + 1)]:
      frozen = rewards.freeze_rewards(rewards.RewardSampler(reward_family, split, split_seed), count)
      path = os.path.join(out, '{}.jsonl'.format(split))
      rewards.save_rewards(frozen, path)
      print("Wrote {} {} rewards to {}.".format(count, split, path))

  @cli.command(
    cli.argument('config', nargs='?', help='YAML configuration file'),
    description='Train every configured design and seed; flags override the file.')
  def train(self, config, **overrides):
    settings = bench.load_config(config, overrides)
    settings.require('dataset_path')
    report = bench.run_experiment(settings)
    for design, seed, error in report.failures:
      print("{}/seed-{} failed: {}".format(design, seed, error), file=sys.stderr)
    if report.aggregate is not None:
      last = report.aggregate.sort_values('step').groupby('design').tail(1)
      print(cli.helpers.frame_str(last[['design', 'step', 'runs', 'train_mse_median', 'test_mse_median']]), end='')
    return report.exit_code

  @cli.command(
    cli.argument('--checkpoint', required=True, help='model checkpoint (.npz)'),
    cli.argument('--rewards', required=True, dest='reward_file', help='reward-set file (.jsonl)'),
    cli.argument('--env', default='grid5', help='environment name'),
    cli.argument('--gamma', type=float, help='discount factor'),
    cli.argument('--policy', choices=['target', 'uniform', 'optimal'], default='target',
      help="ground truth q_pi of a policy, or q_star for 'optimal'"),
    description='Evaluate a checkpoint on a frozen reward set.')
  def evaluate(self, checkpoint, reward_file, env, gamma, policy):
    environment = mdp.environments.get(env)
    model_mdp = environment.build(gamma)
    model = operators.load_model(checkpoint)
    reward_list = rewards.load_rewards(reward_file, model_mdp)
    truth_policy = self._policy(environment, model_mdp, policy)
    pairs = bench.initial_pairs(model_mdp)
    rows = []
    for index, r in enumerate(reward_list):
      row = {'reward': index, 'mse': bench.mse_eval(model, [r], model_mdp, truth_policy, pairs)}
      if truth_policy is None:
        result = bench.zero_shot_return(model, r, model_mdp)
        row.update(ret=result.ret, optimal=result.optimal_return, ratio=result.ratio)
      rows.append(row)
    print(cli.helpers.table_str(rows), end='')
    print("mean mse: {:.6g}".format(np.mean([row['mse'] for row in rows])))
    if truth_policy is not None and hasattr(model, 'weights'):
      gap = bench.visitation_gap(model, model_mdp, truth_policy, pairs)
      print("visitation gap (tv): {:.6g}".format(gap))

  @cli.command(
    cli.argument('--env', default='chain2', help='environment name'),
    cli.argument('--policy', choices=['target', 'uniform', 'optimal'], default='target'),
    cli.argument('--reward', type=float, nargs='+', help='reward per pair, flat (s, a) order'),
    cli.argument('--gamma', type=float, help='discount factor'),
    description='Print the exact q table of a policy (or q_star) for a reward.')
  def oracle(self, env, policy, reward, gamma):
    environment = mdp.environments.get(env)
    model_mdp = environment.build(gamma)
    table = environment.default_reward(model_mdp) if reward is None else np.asarray(reward)
    if table.shape != (model_mdp.num_pairs,):
      raise ConfigError('reward', 'expected {} values, got {}'.format(model_mdp.num_pairs, table.size))
    truth_policy = self._policy(environment, model_mdp, policy)
    if truth_policy is None:
      q = mdp.exact_q_star(model_mdp, table)
    else:
      q = mdp.exact_q_pi(model_mdp, truth_policy, table)
    rows = [{'s': s, 'a': a, 'q': float(q[s * model_mdp.num_actions + a])}
      for s in range(model_mdp.num_states) for a in range(model_mdp.num_actions)]
    print(cli.helpers.table_str(rows, columns={'s': {}, 'a': {}, 'q': {'format': '.10g'}}), end='')

  @cli.command(
    cli.argument('runs_dir', help='output root of a training run'),
    description='Recompute aggregate.csv from the per-run curves.')
  def report(self, runs_dir):
    table = bench.write_aggregate(runs_dir)
    print(cli.helpers.frame_str(table[['design', 'step', 'runs', 'train_mse_median',
      'test_mse_median', 'bellman_loss_median']]), end='')
