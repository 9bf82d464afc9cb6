import os

from . import const
from . import ingest
from . import module_complete
from . import module_error
from . import obsgraph
from . import utils

################################################################################

class IngestCommand:
    name = 'ingest'
    help = 'profile a ratings dataset and compare it with random patterns'

    def configure(self, parser):
        parser.add_argument('dataset_path', help='ratings file (user, item, rating, ...)')
        parser.add_argument('--format', choices=sorted(ingest.RATINGS_FORMATS), default=ingest.TAB_SEPARATED,
                            help='tab: MovieLens 100K, dcolon: MovieLens 1M, csv: user,item,rating')
        parser.add_argument('--compare-er', type=int, default=0, metavar='K',
                            help='average the profile over K Erdos-Renyi patterns of equal density')
        parser.add_argument('--rank1-trials', type=int, default=0, metavar='T',
                            help='rank-one completion trials on the real and on random patterns')
        parser.add_argument('--subsample', action='store_true',
                            help='run rank-one trials on the 300 x 300 highest-degree subpattern')
        parser.add_argument('--seed', type=int, default=None)
        parser.add_argument('--jobs', type=int, default=const.get_const('jobs'))
        parser.add_argument('--out', default=None,
                            help='comparison CSV (default: next to the dataset, "-" for stdout)')
        module_complete.add_solver_arguments(parser)
        return

    def run(self, args):
        if args.compare_er < 0 or args.rank1_trials < 0:
            raise module_error.UsageError('--compare-er and --rank1-trials must be nonnegative')
        if args.jobs < 1:
            raise module_error.UsageError('--jobs must be at least 1')
        cfg = module_complete.solver_config_from_args(args)
        seed = const.get_const('default-seed') if args.seed is None else args.seed
        dataset = os.path.basename(args.dataset_path)
        pattern = ingest.parse_ratings(args.dataset_path, args.format)

        target = args.out or utils.derive_output_path(args.dataset_path, '.comparison.csv')
        comparison = None
        if args.compare_er > 0:
            comparison = ingest.compare_with_er(pattern, args.compare_er, seed, args.jobs)
            profile = comparison.real
            ingest.write_comparison_csv(target, dataset, comparison)
        else:
            profile = obsgraph.graph_profile(pattern)
            utils.write_table(target, ingest.COMPARISON_HEADER, [ingest.real_row(dataset, profile)])
        targets = ['stdout' if target == '-' else target]

        experiments = dict()
        if args.rank1_trials > 0:
            subsample = True if args.subsample else None
            experiments['real'] = ingest.rank1_pattern_experiment(
                pattern, args.rank1_trials, seed, cfg, subsample, args.jobs)
            experiments['er'] = ingest.rank1_er_experiment(
                pattern, args.rank1_trials, seed, cfg, subsample, args.jobs)
            stem = args.dataset_path if target == '-' else target
            experiment_target = utils.derive_output_path(stem, '.rank1.csv')
            ingest.write_experiment_csv(experiment_target, dataset, experiments)
            targets.append(experiment_target)

        utils.print_summary(utils.preprocess_summary(
            'ingest.txt', source=args.dataset_path, profile=profile, comparison=comparison,
            experiments=experiments, targets=targets), to_stderr=target == '-')
        return module_error.EXIT_SUCCESS
    pass
