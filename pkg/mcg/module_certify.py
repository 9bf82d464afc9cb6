from . import certify
from . import module_error
from . import obsgraph
from . import utils

################################################################################

class CertifyCommand:
    name = 'certify'
    help = 'evaluate the completion conditions on a pattern'

    def configure(self, parser):
        parser.add_argument('pattern_path', help='Matrix Market coordinate pattern file')
        parser.add_argument('--symmetric', action='store_true',
                            help='treat the pattern as a symmetric matrix with loops')
        parser.add_argument('--mu0', type=float, default=None,
                            help='incoherence of the unknown matrix')
        parser.add_argument('--rank', type=int, required=True, help='rank of the unknown matrix')
        parser.add_argument('--factors', default=None,
                            help='dense truth matrix (CSV or .mtx); mu0 and theta come from its rank-r SVD')
        parser.add_argument('--theorem', choices=certify.THEOREMS + ['all'], default=None,
                            help='condition to evaluate (default: the exact one for the pattern mode)')
        parser.add_argument('--theta', type=float, default=None,
                            help='deviation bound of the singular factors, for rectangular conditions')
        parser.add_argument('--theta-budget', type=int, default=None,
                            help='subsets enumerated or sampled when estimating theta')
        parser.add_argument('--seed', type=int, default=None)
        parser.add_argument('--out', default=None,
                            help='verdict CSV (default: next to the pattern, "-" for stdout)')
        return

    def run(self, args):
        if args.mu0 is None and args.factors is None:
            raise module_error.UsageError('Must provide --mu0 or --factors')
        if args.mu0 is not None and args.mu0 < 1:
            raise module_error.UsageError('--mu0 must be at least 1, got %r' % args.mu0)
        if args.theorem is None:
            args.theorem = certify.EXACT_SYMMETRIC if args.symmetric else certify.EXACT_RECTANGULAR
        theorems = certify.THEOREMS if args.theorem == 'all' else [args.theorem]
        rectangular = [_ for _ in theorems if _ in (certify.EXACT_RECTANGULAR, certify.APPROX_RECTANGULAR)]
        if args.theorem != 'all' and args.theorem not in rectangular and not args.symmetric:
            raise module_error.UsageError('%s needs --symmetric' % args.theorem)
        if args.theorem != 'all' and rectangular and args.theta is None and args.factors is None:
            raise module_error.UsageError('%s needs --theta or --factors' % args.theorem)

        pattern = obsgraph.read_pattern(args.pattern_path, args.symmetric)
        profile = obsgraph.graph_profile(pattern)
        factorization = None
        if args.factors is not None:
            truth = utils.read_dense(args.factors)
            if truth.shape != pattern.shape:
                raise module_error.UsageError('--factors has shape %s, pattern is %s'
                                              % (truth.shape, pattern.shape))
            factorization = certify.factorization_from_matrix(truth, args.rank)
        mu0 = args.mu0 if args.mu0 is not None else factorization.mu0
        theta, theta_exact = args.theta, True
        if theta is None and factorization is not None and rectangular:
            theta, theta_exact = certify.theta_estimate(factorization, pattern,
                                                        args.theta_budget, args.seed)

        verdicts = list()
        for theorem in theorems:
            if theorem in rectangular and theta is None:
                continue
            if theorem not in rectangular and not profile.symmetric:
                continue
            verdicts.append(certify.evaluate(theorem, profile, mu0, args.rank, theta))
        if not verdicts:
            raise module_error.UsageError('no condition applies: give --symmetric, --theta or --factors')

        target = args.out or utils.derive_output_path(args.pattern_path, '.verdict.csv')
        certify.write_verdict_csv(target, verdicts)
        utils.print_summary(utils.preprocess_summary(
            'certify.txt', source=args.pattern_path, verdicts=verdicts, mu0=mu0,
            mu0_source='given' if args.mu0 is not None else 'from --factors',
            rank=args.rank, omega=pattern.count, theta=theta, theta_exact=theta_exact,
            target='stdout' if target == '-' else target), to_stderr=target == '-')
        return exit_code(verdicts)
    pass

def exit_code(verdicts):
    """ 3 if any condition is violated, 4 if none is but one is
    indeterminate, 0 when all hold. """
    states = {_.satisfied for _ in verdicts}
    if certify.VIOLATED in states:
        return module_error.EXIT_VIOLATED
    if certify.INDETERMINATE in states:
        return module_error.EXIT_INDETERMINATE
    return module_error.EXIT_SUCCESS
