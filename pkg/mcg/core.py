import argparse
import logging
import sys

from . import const
from . import module_error

from . import module_analyze
from . import module_certify
from . import module_complete
from . import module_ingest
from . import module_simulate

COMMANDS = [
    module_analyze.AnalyzeCommand(),
    module_certify.CertifyCommand(),
    module_complete.CompleteCommand(),
    module_simulate.SimulateCommand(),
    module_ingest.IngestCommand(),
]

def build_parser():
    parser = argparse.ArgumentParser(
        prog='mcgraph',
        description='Certify and solve matrix completion under deterministic sampling patterns.')
    parser.add_argument('--version', action='version',
                        version='mcgraph %s' % const.get_const('version'))
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='log progress (-v) or every solver iteration (-vv)')
    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True
    for command in COMMANDS:
        subparser = subparsers.add_parser(command.name, help=command.help,
                                          description=command.help)
        command.configure(subparser)
        subparser.set_defaults(handler=command)
    return parser

def configure_logging(verbosity):
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(verbosity, 2)]
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')
    return

def run(argv=None):
    """ Parses 'argv', runs the command, and returns the exit code. """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return err.code if isinstance(err.code, int) else module_error.EXIT_USAGE
    configure_logging(args.verbose)
    try:
        return args.handler.run(args)
    except module_error.McgError as err:
        sys.stderr.write('mcgraph %s: error: %s\n' % (args.command, err))
        return err.exit_code
    except OSError as err:
        sys.stderr.write('mcgraph %s: error: %s\n' % (args.command, err))
        return module_error.EXIT_RUNTIME

def main():
    sys.exit(run(sys.argv[1:]))
