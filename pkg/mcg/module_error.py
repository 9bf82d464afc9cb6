""" Exceptions raised across mcgraph, and the exit codes the command line
maps them to. """

EXIT_SUCCESS       = 0
EXIT_USAGE         = 2
EXIT_VIOLATED      = 3
EXIT_INDETERMINATE = 4
EXIT_RUNTIME       = 5


class McgError(Exception):
    """ Root of every error mcgraph raises on purpose. """
    exit_code = EXIT_RUNTIME
    pass


class PatternError(McgError, ValueError):
    """ An observation pattern that breaks its invariants (index out of
    range, symmetric flag on a non-square shape, mismatched dimensions). """
    pass


class ParseError(McgError, ValueError):
    """ A malformed input file. Carries the path and the 1-based line number
    of the first offending line, when there is one. """
    def __init__(self, path, line_no, message):
        self.path = str(path)
        self.line_no = line_no
        self.message = message
        if line_no:
            text = '%s:%d: %s' % (self.path, line_no, message)
        else:
            text = '%s: %s' % (self.path, message)
        McgError.__init__(self, text)
        return
    pass


class UnsupportedSizeError(McgError):
    """ Dense eigensolver / SVD size caps exceeded. """
    pass


class FactorizationError(McgError, ValueError):
    """ Non-orthonormal factors, or a rank out of range. """
    pass


class ConfigError(McgError, ValueError):
    """ Experiment configuration violations, reported all at once. """
    def __init__(self, problems):
        self.problems = list(problems)
        McgError.__init__(self, 'invalid configuration:\n  ' + '\n  '.join(self.problems))
        return
    pass


class UsageError(McgError):
    exit_code = EXIT_USAGE
    pass


class StarvationError(McgError):
    """ Random replicates could not be accepted within the draw budget. """
    pass


class DomainError(McgError, ValueError):
    """ An argument outside an operation's domain (zero |Omega|, eta out of
    (0, 1], mismatched dimensions, negative thresholds). """
    pass
