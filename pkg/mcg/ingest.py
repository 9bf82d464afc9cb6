""" Rating datasets as observation patterns, and their comparison with
Erdos-Renyi patterns of the same density: graph properties, and rank-one
completion error. """

import logging
import math
import os
import re

import numpy as np
import pandas as pd

from . import async_session
from . import const
from . import module_error
from . import obsgraph
from . import solver
from . import synth
from . import utils

logger = logging.getLogger(__name__)

TAB_SEPARATED = 'tab'
DOUBLE_COLON = 'dcolon'
CSV_TRIPLES = 'csv'

# separator, pandas engine; user, item and rating lead every line
RATINGS_FORMATS = {
    TAB_SEPARATED: ('\t', 'c'),
    DOUBLE_COLON: ('::', 'python'),
    CSV_TRIPLES: (',', 'c'),
}

COMPARISON_HEADER = ['dataset', 'source', 'density', 'psi', 'xi1', 'xi2']
EXPERIMENT_HEADER = ['dataset', 'source', 'avg_rel_err', 'trials', 'failures']

################################################################################
# Parsing

def _positive_ids(column):
    values = pd.to_numeric(column, errors='coerce')
    return values.notna() & (values > 0) & (values == np.floor(values))

def parse_ratings(path, fmt):
    """ One observed entry per distinct (user, item) pair, whatever the
    rating. Ids are densified to 1..n1 and 1..n2 in order of first
    appearance. """
    if fmt not in RATINGS_FORMATS:
        raise module_error.UsageError('unknown ratings format "%s"' % fmt)
    path = str(path)
    if not os.path.exists(path):
        raise module_error.McgError('no such file: %s' % path)
    sep, engine = RATINGS_FORMATS[fmt]
    try:
        frame = pd.read_csv(path, sep=sep, engine=engine, header=None, dtype=str,
                            keep_default_na=False, skip_blank_lines=False)
    except pd.errors.EmptyDataError:
        raise module_error.ParseError(path, None, 'empty file')
    except pd.errors.ParserError as err:
        found = re.search(r'line (\d+)', str(err))
        raise module_error.ParseError(path, int(found.group(1)) if found else None,
                                      'inconsistent number of fields')
    except OSError as err:
        raise module_error.McgError('cannot read %s: %s' % (path, err))
    if frame.shape[1] < 3:
        raise module_error.ParseError(path, 1, 'expected user, item and rating fields')
    frame = frame.iloc[:, :3].fillna('')
    frame.columns = ['user', 'item', 'rating']
    frame = frame.apply(lambda column: column.str.strip())
    frame.index = np.arange(1, len(frame) + 1)
    frame = frame[~(frame == '').all(axis=1)]
    if fmt == CSV_TRIPLES and len(frame) and not _positive_ids(frame['user'].iloc[:1]).iloc[0] \
            and not _positive_ids(frame['item'].iloc[:1]).iloc[0]:
        # header line
        frame = frame.iloc[1:]
    if frame.empty:
        raise module_error.ParseError(path, None, 'empty file')
    valid = _positive_ids(frame['user']) & _positive_ids(frame['item']) \
        & pd.to_numeric(frame['rating'], errors='coerce').notna()
    if not valid.all():
        line_no = int(valid.index[np.argmin(valid.to_numpy())])
        raise module_error.ParseError(path, line_no, 'malformed ratings line')
    users, _ = pd.factorize(pd.to_numeric(frame['user']).astype(np.int64), sort=False)
    items, _ = pd.factorize(pd.to_numeric(frame['item']).astype(np.int64), sort=False)
    n1, n2 = int(users.max()) + 1, int(items.max()) + 1
    pattern = obsgraph.pattern_from_entries(np.column_stack([users + 1, items + 1]), n1, n2)
    logger.info('%s: %d ratings, %d users, %d items, %d distinct pairs',
                path, len(frame), n1, n2, pattern.count)
    expected = tuple(const.get_const('csv-subset-shape'))
    if fmt == CSV_TRIPLES and (n1, n2) != expected:
        logger.warning('%s: %d x %d pattern, the Flixster and Douban subsets are %d x %d',
                       path, n1, n2, expected[0], expected[1])
    return pattern

def subsample_top_degree(p, n_users=None, n_items=None):
    """ Induced pattern on the highest-degree rows and columns, ties broken
    by index. """
    n_users = min(p.n1, n_users or const.get_const('desk-subpattern-users'))
    n_items = min(p.n2, n_items or const.get_const('desk-subpattern-items'))
    left, right = obsgraph.degrees(p)
    rows = np.sort(np.argsort(-left, kind='stable')[:n_users]) + 1
    cols = np.sort(np.argsort(-right, kind='stable')[:n_items]) + 1
    return obsgraph.subpattern(p, rows, cols)

################################################################################
# Random-graph comparison

def real_row(dataset, profile):
    return [dataset, 'real', profile.density, profile.psi, profile.xi1, profile.xi2]

class ErComparison:
    def __init__(self, real, replicates, densities, draws):
        self.real = real
        self.replicates = list(replicates)
        self.densities = list(densities)
        self.draws = draws
        return
    def average(self, name):
        return float(np.mean([getattr(_, name) for _ in self.replicates]))
    def rows(self, dataset):
        return [
            real_row(dataset, self.real),
            [dataset, 'er-average', float(np.mean(self.densities)), self.average('psi'),
             self.average('xi1'), self.average('xi2')],
        ]
    pass

def compare_with_er(p, k, seed=None, jobs=None):
    """ Draws Erdos-Renyi patterns with inclusion probability equal to the
    density of p until k land within the density tolerance, and profiles
    them alongside p. Raises StarvationError after 50 k draws. """
    if k < 1:
        raise module_error.DomainError('k must be at least 1, got %r' % k)
    seed = const.get_const('default-seed') if seed is None else seed
    real = obsgraph.graph_profile(p)
    target = real.density
    tolerance = const.get_const('er-density-tolerance')
    max_draws = const.get_const('er-starvation-factor') * k
    accepted = list()
    draws = 0
    while len(accepted) < k:
        if draws >= max_draws:
            raise module_error.StarvationError(
                'only %d of %d ER patterns within %g of density %.4f after %d draws'
                % (len(accepted), k, tolerance, target, draws))
        candidate = synth.er_pattern(p.n1, p.n2, target, p.symmetric,
                                     utils.derive_seed(seed, 'er', draws))
        draws += 1
        density = candidate.count / float(p.n1 * p.n2)
        if abs(density - target) <= tolerance:
            accepted.append((candidate, density))
    replicates = async_session.map_sessions(
        obsgraph.graph_profile, [_[0] for _ in accepted], jobs)
    logger.info('accepted %d ER patterns in %d draws', k, draws)
    return ErComparison(real, replicates, [_[1] for _ in accepted], draws)

################################################################################
# Rank-one completion

class Rank1Result:
    def __init__(self, errors, failures, shape, variant):
        self.errors = list(errors)
        self.failures = int(failures)
        self.shape = shape
        # True when run on the highest-degree subpattern
        self.variant = bool(variant)
        return
    @property
    def trials(self):
        return len(self.errors)
    @property
    def avg_rel_err(self):
        return float(np.mean(self.errors))
    pass

def _rank1_trial(p, seed, cfg):
    rng = utils.get_rng(seed)
    M = np.outer(rng.standard_normal(p.n1), rng.standard_normal(p.n2))
    try:
        result = solver.solve(solver.project_omega(M, p), p, cfg)
        error = solver.relative_error(M, result.estimate)
    except (module_error.McgError, np.linalg.LinAlgError) as err:
        logger.warning('rank-one trial failed: %s', err)
        return 1.0, True
    if not math.isfinite(error):
        return 1.0, True
    return error, False

def _desk_scale(p, subsample):
    cap = const.get_const('svd-size-cap')
    if subsample is None:
        subsample = max(p.n1, p.n2) > cap
    if subsample:
        logger.info('using the highest-degree subpattern of %r', p)
        return subsample_top_degree(p), True
    return p, False

def _rank1_run(patterns, seeds, cfg, jobs, shape, variant):
    outcomes = async_session.map_sessions(
        lambda args: _rank1_trial(args[0], args[1], cfg), list(zip(patterns, seeds)), jobs)
    return Rank1Result([_[0] for _ in outcomes], sum(_[1] for _ in outcomes), shape, variant)

def rank1_pattern_experiment(p, trials, seed=None, cfg=None, subsample=None, jobs=None):
    """ Mean relative error of completing fresh rank-one Gaussian outer
    products observed on p. Patterns beyond the SVD cap (or any pattern when
    subsample is True) are replaced by their highest-degree subpattern.
    Failed solves count as error 1.0. """
    if trials < 1:
        raise module_error.DomainError('trials must be at least 1, got %r' % trials)
    cfg = cfg or solver.SolverConfig()
    seed = const.get_const('default-seed') if seed is None else seed
    p, variant = _desk_scale(p, subsample)
    seeds = [utils.derive_seed(seed, 'rank1', t) for t in range(trials)]
    return _rank1_run([p] * trials, seeds, cfg, jobs, p.shape, variant)

def rank1_er_experiment(p, trials, seed=None, cfg=None, subsample=None, jobs=None):
    """ The same experiment on a fresh Erdos-Renyi pattern per trial, with
    the shape and density of p (or of its subpattern). """
    if trials < 1:
        raise module_error.DomainError('trials must be at least 1, got %r' % trials)
    cfg = cfg or solver.SolverConfig()
    seed = const.get_const('default-seed') if seed is None else seed
    p, variant = _desk_scale(p, subsample)
    density = p.count / float(p.n1 * p.n2)
    patterns = [synth.er_pattern(p.n1, p.n2, density, p.symmetric,
                                 utils.derive_seed(seed, 'rank1-er-pattern', t))
                for t in range(trials)]
    seeds = [utils.derive_seed(seed, 'rank1', t) for t in range(trials)]
    return _rank1_run(patterns, seeds, cfg, jobs, p.shape, variant)

################################################################################
# Output

def write_comparison_csv(target, dataset, comparison):
    utils.write_table(target, COMPARISON_HEADER, comparison.rows(dataset))
    return

def write_experiment_csv(target, dataset, results):
    """ 'results' maps a source name ('real', 'er') to a Rank1Result. """
    rows = [[dataset, source, result.avg_rel_err, result.trials, result.failures]
            for source, result in results.items()]
    utils.write_table(target, EXPERIMENT_HEADER, rows)
    return
