from . import module_error
from . import obsgraph
from . import utils

################################################################################

class AnalyzeCommand:
    name = 'analyze'
    help = 'profile the observation graph of a Matrix Market pattern'

    def configure(self, parser):
        parser.add_argument('pattern_path', help='Matrix Market coordinate pattern file')
        parser.add_argument('--symmetric', action='store_true',
                            help='treat the pattern as a symmetric matrix with loops')
        parser.add_argument('--out', default=None,
                            help='profile CSV (default: next to the pattern, "-" for stdout)')
        return

    def run(self, args):
        pattern = obsgraph.read_pattern(args.pattern_path, args.symmetric)
        profile = obsgraph.graph_profile(pattern)
        target = args.out or utils.derive_output_path(args.pattern_path, '.profile.csv')
        obsgraph.write_profile_csv(target, [profile])
        utils.print_summary(utils.preprocess_summary(
            'analyze.txt', source=args.pattern_path, profile=profile,
            quantity=obsgraph.theorem_quantity(profile),
            target='stdout' if target == '-' else target), to_stderr=target == '-')
        return module_error.EXIT_SUCCESS
    pass
