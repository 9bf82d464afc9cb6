from . import bench
from . import const
from . import module_error
from . import utils

################################################################################

class SimulateCommand:
    name = 'simulate'
    help = 'run a simulation study from a JSON configuration'

    def configure(self, parser):
        parser.add_argument('config_path', help='JSON experiment configuration')
        parser.add_argument('--records', default=None,
                            help='records CSV (default: next to the configuration)')
        parser.add_argument('--aggregate', default=None,
                            help='aggregate CSV (default: next to the configuration)')
        parser.add_argument('--jobs', type=int, default=const.get_const('jobs'),
                            help='concurrent trials (default: $MCGRAPH_JOBS or 1)')
        parser.add_argument('--seed', type=int, default=None,
                            help='master seed, overriding the configuration')
        return

    def run(self, args):
        if args.jobs < 1:
            raise module_error.UsageError('--jobs must be at least 1')
        cfg = bench.load_config(args.config_path)
        if args.seed is not None:
            cfg.master_seed = args.seed
        records_path = args.records or utils.derive_output_path(args.config_path, '.records.csv')
        aggregate_path = args.aggregate or utils.derive_output_path(args.config_path, '.aggregate.csv')
        print('master seed %d, %d cells of %d trials' % (
            cfg.master_seed, len(list(cfg.cells())), cfg.trials_per_cell))

        def progress(cell, records):
            rank, sigma, pq, lo, hi = cell
            populated = [_ for _ in records if not _.skipped]
            successes = sum(_.success for _ in populated)
            print('cell rank=%d sigma=%s pq=%s bin=[%s, %s): %d/%d successes, %d skipped' % (
                rank, utils.format_number(sigma), utils.format_number(pq),
                utils.format_number(lo), utils.format_number(hi),
                successes, len(populated), len(records) - len(populated)), flush=True)
            return

        records, table = bench.run_experiment(cfg, records_path, aggregate_path,
                                              args.jobs, progress)
        trends = bench.trend_statistics(table)
        utils.print_summary(utils.preprocess_summary(
            'simulate.txt', source=args.config_path, records=records, table=table,
            seed=cfg.master_seed, trends=[row for _, row in trends.iterrows()],
            crossings=bench.rescaled_crossings(records),
            records_path=records_path, aggregate_path=aggregate_path))
        return module_error.EXIT_SUCCESS
    pass
