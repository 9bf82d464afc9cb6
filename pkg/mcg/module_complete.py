from . import certify
from . import module_error
from . import obsgraph
from . import solver
from . import utils

################################################################################

def add_solver_arguments(parser):
    group = parser.add_argument_group('solver')
    group.add_argument('--max-iters', type=int, default=None)
    group.add_argument('--tol-feas', type=float, default=None)
    group.add_argument('--tol-change', type=float, default=None)
    group.add_argument('--penalty-init', type=float, default=None)
    group.add_argument('--penalty-growth', type=float, default=None)
    return

def solver_config_from_args(args, delta=0.0):
    try:
        return solver.SolverConfig(delta, args.penalty_init, args.penalty_growth,
                                   args.max_iters, args.tol_feas, args.tol_change)
    except module_error.ConfigError as err:
        raise module_error.UsageError(str(err))

def parse_delta(text):
    """ A nonnegative number, or 'auto'. """
    if text == 'auto':
        return text
    try:
        value = float(text)
    except ValueError:
        raise module_error.UsageError('--delta must be a number or "auto", got %r' % text)
    if not value >= 0:
        raise module_error.UsageError('--delta must be nonnegative, got %r' % text)
    return value

class CompleteCommand:
    name = 'complete'
    help = 'complete a partially observed matrix by nuclear-norm minimization'

    def configure(self, parser):
        parser.add_argument('observed_path', help='dense observed matrix (CSV or .mtx)')
        parser.add_argument('pattern_path', help='Matrix Market coordinate pattern file')
        parser.add_argument('--symmetric', action='store_true')
        parser.add_argument('--delta', default='0',
                            help='noise radius, or "auto" for 4 sigma sqrt|Omega| + 2 sigma sqrt(log 1/eta)')
        parser.add_argument('--sigma', type=float, default=None, help='noise level, for --delta auto')
        parser.add_argument('--eta', type=float, default=0.05, help='failure probability, for --delta auto')
        parser.add_argument('--format', choices=['csv', 'mtx'], default=None,
                            help='estimate format (default: from --out, else csv)')
        parser.add_argument('--out', default=None,
                            help='estimate file (default: next to the observations, "-" for stdout)')
        add_solver_arguments(parser)
        return

    def run(self, args):
        delta = parse_delta(args.delta)
        if delta == 'auto' and args.sigma is None:
            raise module_error.UsageError('--delta auto needs --sigma')
        observed = utils.read_dense(args.observed_path)
        pattern = obsgraph.read_pattern(args.pattern_path, args.symmetric)
        if observed.shape != pattern.shape:
            raise module_error.DomainError('observations have shape %s, pattern is %s'
                                           % (observed.shape, pattern.shape))
        if delta == 'auto':
            delta = certify.recommended_delta(args.sigma, pattern.count, args.eta)
        cfg = solver_config_from_args(args, delta)
        result = solver.solve(observed, pattern, cfg)

        fmt = args.format or ('mtx' if (args.out or '').endswith('.mtx') else 'csv')
        target = args.out or utils.derive_output_path(args.observed_path, '.completed.' + fmt)
        utils.write_dense(target, result.estimate, fmt)
        stem = args.observed_path if target == '-' else target
        trace = utils.derive_output_path(stem, '.trace.csv')
        solver.write_trace_csv(trace, result)
        utils.print_summary(utils.preprocess_summary(
            'complete.txt', source=args.observed_path, delta=delta, result=result,
            target='stdout' if target == '-' else target, trace=trace), to_stderr=target == '-')
        return module_error.EXIT_SUCCESS
    pass
