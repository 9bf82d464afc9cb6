""" Simulation studies: success ratio against the graph quantity, relative
error under noise, and the rescaled-parameter collapse, run over a grid of
(rank, sigma, p + q, bin) cells and written as CSV. """

import json
import logging
import math
import os

import numpy as np
import pandas as pd
import scipy.stats

from . import async_session
from . import const
from . import module_error
from . import obsgraph
from . import solver
from . import synth
from . import utils

logger = logging.getLogger(__name__)

RECORDS_HEADER = ['mode', 'rank', 'sigma', 'pq', 'bin_lo', 'bin_hi', 'trial', 'omega',
                  'mu0', 'xi1', 'xi2', 'psi', 'quantity', 'rel_err', 'success', 'iters',
                  'wall_ms', 'skipped']
AGGREGATE_HEADER = ['mode', 'rank', 'sigma', 'pq', 'bin_lo', 'bin_hi', 'trials', 'successes',
                    'success_ratio', 'mean_rel_err', 'mean_quantity', 'mean_rescaled']
CELL_KEYS = ['mode', 'rank', 'sigma', 'pq', 'bin_lo', 'bin_hi']

SYMMETRIC = 'symmetric'
RECTANGULAR = 'rectangular'

################################################################################
# Configuration

class ExperimentConfig:
    def __init__(self, mode, n1, n2, ranks, sigmas, pq_levels, bins, trials_per_cell=10,
                 success_threshold=None, solver_config=None, master_seed=None,
                 search_attempts=None):
        self.mode = mode
        self.n1 = int(n1)
        self.n2 = int(n2)
        self.ranks = [int(_) for _ in ranks]
        # empty means noiseless
        self.sigmas = [float(_) for _ in sigmas] or [0.0]
        self.pq_levels = [float(_) for _ in pq_levels]
        self.bins = [(float(lo), float(hi)) for lo, hi in bins]
        self.trials_per_cell = int(trials_per_cell)
        if success_threshold is None:
            success_threshold = const.get_const('success-threshold')
        self.success_threshold = float(success_threshold)
        self.solver = solver_config or solver.SolverConfig()
        self.master_seed = const.get_const('default-seed') if master_seed is None else int(master_seed)
        if search_attempts is None:
            search_attempts = const.get_const('search-attempts')
        self.search_attempts = int(search_attempts)
        problems = validate_config(self)
        if problems:
            raise module_error.ConfigError(problems)
        return
    @property
    def symmetric(self):
        return self.mode == SYMMETRIC
    def cells(self):
        """ Every (rank, sigma, pq, bin) cell, in a fixed order. """
        for rank in self.ranks:
            for sigma in self.sigmas:
                for pq in self.pq_levels:
                    for lo, hi in self.bins:
                        yield (rank, sigma, pq, lo, hi)
    pass

def validate_config(cfg):
    problems = list()
    if cfg.mode not in (SYMMETRIC, RECTANGULAR):
        problems.append('mode must be "symmetric" or "rectangular", got %r' % cfg.mode)
    if cfg.n1 < 1 or cfg.n2 < 1:
        problems.append('dimensions must be positive')
    if cfg.mode == SYMMETRIC and cfg.n1 != cfg.n2:
        problems.append('symmetric mode needs n1 == n2')
    if not cfg.ranks:
        problems.append('ranks must not be empty')
    for r in cfg.ranks:
        if r < 1 or r > min(cfg.n1, cfg.n2):
            problems.append('rank %d out of range' % r)
    for sigma in cfg.sigmas:
        if sigma < 0:
            problems.append('sigma %r is negative' % sigma)
    if not cfg.pq_levels:
        problems.append('pq_levels must not be empty')
    for pq in cfg.pq_levels:
        if not 0.0 < pq <= 2.0:
            problems.append('p + q level %r outside (0, 2]' % pq)
    if not cfg.bins:
        problems.append('bins must not be empty')
    for lo, hi in cfg.bins:
        if not lo < hi:
            problems.append('bin [%r, %r) is empty' % (lo, hi))
    for (_, hi), (lo, _) in zip(cfg.bins, cfg.bins[1:]):
        if lo < hi:
            problems.append('bins must be sorted and disjoint, [.., %r) overlaps [%r, ..)' % (hi, lo))
    if cfg.trials_per_cell < 1:
        problems.append('trials_per_cell must be at least 1')
    if not 0.0 < cfg.success_threshold:
        problems.append('success_threshold must be positive')
    if cfg.search_attempts < 1:
        problems.append('search_attempts must be at least 1')
    return problems

CONFIG_KEYS = {'mode', 'n', 'n1', 'n2', 'ranks', 'sigmas', 'pq_levels', 'bins',
               'trials_per_cell', 'success_threshold', 'master_seed', 'search_attempts', 'solver'}
SOLVER_KEYS = {'penalty_init', 'penalty_growth', 'max_iters', 'tol_feas', 'tol_change'}

def config_from_dict(data):
    """ Builds an ExperimentConfig from the JSON document layout, collecting
    every schema problem before raising. """
    if not isinstance(data, dict):
        raise module_error.ConfigError(['configuration must be a JSON object'])
    problems = ['unknown key "%s"' % _ for _ in sorted(set(data) - CONFIG_KEYS)]
    for key in ('mode', 'ranks', 'pq_levels', 'bins'):
        if key not in data:
            problems.append('missing key "%s"' % key)
    if 'n' not in data and not ('n1' in data and 'n2' in data):
        problems.append('missing dimensions: give "n" or both "n1" and "n2"')
    solver_data = data.get('solver', dict())
    if not isinstance(solver_data, dict):
        problems.append('"solver" must be an object')
        solver_data = dict()
    problems += ['unknown solver key "%s"' % _ for _ in sorted(set(solver_data) - SOLVER_KEYS)]
    for key in ('ranks', 'sigmas', 'pq_levels', 'bins'):
        if key in data and not isinstance(data[key], list):
            problems.append('"%s" must be a list' % key)
    if isinstance(data.get('bins'), list):
        for item in data['bins']:
            if not (isinstance(item, list) and len(item) == 2):
                problems.append('bin %r must be a [lo, hi] pair' % (item,))
    if problems:
        raise module_error.ConfigError(problems)
    try:
        solver_config = solver.SolverConfig(**{_: solver_data[_] for _ in solver_data})
        n1 = data.get('n1', data.get('n'))
        n2 = data.get('n2', data.get('n'))
        return ExperimentConfig(data['mode'], n1, n2, data['ranks'], data.get('sigmas', []),
                                data['pq_levels'], data['bins'],
                                data.get('trials_per_cell', 10), data.get('success_threshold'),
                                solver_config, data.get('master_seed'), data.get('search_attempts'))
    except (TypeError, ValueError) as err:
        if isinstance(err, module_error.ConfigError):
            raise
        raise module_error.ConfigError([str(err)])

def load_config(path):
    try:
        with open(path, 'r', encoding='utf-8') as hfile:
            data = json.load(hfile)
    except OSError as err:
        raise module_error.McgError('cannot read %s: %s' % (path, err))
    except ValueError as err:
        raise module_error.ConfigError(['%s is not valid JSON: %s' % (path, err)])
    return config_from_dict(data)

################################################################################
# Trials

class TrialRecord:
    def __init__(self, mode, rank, sigma, pq, bin_lo, bin_hi, trial, omega=None, mu0=None,
                 xi1=None, xi2=None, psi=None, quantity=None, rel_err=None, success=False,
                 iters=None, wall_ms=None, skipped=False, converged=None):
        self.mode = mode
        self.rank = rank
        self.sigma = sigma
        self.pq = pq
        self.bin_lo = bin_lo
        self.bin_hi = bin_hi
        self.trial = trial
        self.omega = omega
        self.mu0 = mu0
        self.xi1 = xi1
        self.xi2 = xi2
        self.psi = psi
        self.quantity = quantity
        self.rel_err = rel_err
        self.success = bool(success)
        self.iters = iters
        self.wall_ms = wall_ms
        self.skipped = bool(skipped)
        self.converged = converged
        return
    @property
    def cell(self):
        return (self.rank, self.sigma, self.pq, self.bin_lo, self.bin_hi)
    def row(self):
        values = [getattr(self, _) for _ in RECORDS_HEADER]
        return [int(_) if isinstance(_, bool) else _ for _ in values]
    pass

def trial_seed(cfg, cell, trial_index):
    """ Seed of one trial. sigma is left out so that every noise level sees
    the same pattern, truth and noise direction. """
    rank, _, pq, lo, hi = cell
    return utils.derive_seed(cfg.master_seed, cfg.mode, rank, pq, lo, hi, trial_index)

def run_trial(cell, trial_index, cfg):
    """ Generate, mask, solve and score one trial. An unreachable bin gives a
    skipped record; non-convergence is recorded, not raised. """
    rank, sigma, pq, lo, hi = cell
    seed = trial_seed(cfg, cell, trial_index)
    record = TrialRecord(cfg.mode, rank, sigma, pq, lo, hi, trial_index)
    timer = utils.get_timer()
    match = synth.pattern_search((lo, hi), cfg.n1, cfg.n2, synth.sbm_grid(pq),
                                 cfg.search_attempts, cfg.symmetric,
                                 utils.derive_seed(seed, 'pattern'))
    if match is None:
        record.skipped = True
        record.wall_ms = utils.get_elapsed_ms(timer)
        return record
    pattern, profile = match.pattern, match.profile
    inst = synth.trial_instance(pattern, rank, sigma, seed, cfg.symmetric)
    delta = 4.0 * sigma * math.sqrt(pattern.count)
    record.omega = pattern.count
    record.mu0 = inst.factorization.mu0
    record.xi1, record.xi2, record.psi = profile.xi1, profile.xi2, profile.psi
    record.quantity = obsgraph.theorem_quantity(profile)
    try:
        result = solver.solve(inst.noisy_observation, pattern, cfg.solver.with_delta(delta))
    except np.linalg.LinAlgError as err:
        logger.warning('trial %d of cell %r failed in the solver: %s', trial_index, cell, err)
        record.rel_err = math.nan
        record.success = False
        record.converged = False
    else:
        record.rel_err = solver.relative_error(inst.ground_truth, result.estimate)
        record.success = record.rel_err < cfg.success_threshold
        record.iters = result.iterations
        record.converged = result.converged
    record.wall_ms = utils.get_elapsed_ms(timer)
    return record

################################################################################
# Reductions

def records_frame(records):
    """ Records as a DataFrame with the records CSV columns. """
    if isinstance(records, pd.DataFrame):
        return records.copy()
    frame = pd.DataFrame([_.row() for _ in records], columns=RECORDS_HEADER)
    # skipped trials leave None in the numeric columns
    for column in RECORDS_HEADER[1:]:
        frame[column] = pd.to_numeric(frame[column])
    return frame

def _field(record, name):
    if isinstance(record, (dict, pd.Series)):
        return record[name]
    return getattr(record, name)

def rescaled_parameter(record, mode=None):
    """ |Omega| / (mu0 r (2 xi + psi)) in symmetric mode, with xi1 + xi2 + psi
    in rectangular mode; infinite when the denominator vanishes. """
    mode = mode or _field(record, 'mode')
    xi1, xi2, psi = _field(record, 'xi1'), _field(record, 'xi2'), _field(record, 'psi')
    quantity = 2.0 * xi1 + psi if mode == SYMMETRIC else xi1 + xi2 + psi
    denominator = _field(record, 'mu0') * _field(record, 'rank') * quantity
    if denominator == 0:
        return math.inf
    return _field(record, 'omega') / denominator

def _populated(records):
    frame = records_frame(records)
    frame = frame[frame['skipped'].astype(int) == 0].copy()
    frame['success'] = frame['success'].astype(int)
    return frame.sort_values(CELL_KEYS + ['trial'], kind='mergesort')

def success_ratio(records, by=None):
    """ Fraction of successful trials per group, skipped trials excluded.
    Groups without any populated trial have no row. """
    by = list(by or CELL_KEYS)
    frame = _populated(records)
    return frame.groupby(by, sort=True)['success'].mean().rename('success_ratio').reset_index()

def aggregate(records):
    frame = _populated(records)
    if frame.empty:
        return pd.DataFrame(columns=AGGREGATE_HEADER)
    frame['rescaled'] = [rescaled_parameter(row) for _, row in frame.iterrows()]
    grouped = frame.groupby(CELL_KEYS, sort=True)
    table = pd.DataFrame({
        'trials': grouped['trial'].count(),
        'successes': grouped['success'].sum(),
        'mean_rel_err': grouped['rel_err'].mean(),
        'mean_quantity': grouped['quantity'].mean(),
        'mean_rescaled': grouped['rescaled'].mean(),
    }).reset_index()
    table['success_ratio'] = table['successes'] / table['trials']
    return table[AGGREGATE_HEADER]

def trend_statistics(aggregate_table, min_bins=4):
    """ Spearman correlation between bin midpoint and success ratio for every
    (mode, rank, sigma, pq) row with at least 'min_bins' populated bins. A row
    whose success ratio never changes has no correlation: it is kept, flagged
    'constant', with a NaN coefficient. """
    rows = list()
    keys = ['mode', 'rank', 'sigma', 'pq']
    for key, group in aggregate_table.groupby(keys, sort=True):
        if len(group) < min_bins:
            continue
        constant = group['success_ratio'].nunique() == 1
        if constant:
            logger.warning('success ratio is constant over the bins of %r', key)
            rho = math.nan
        else:
            midpoint = (group['bin_lo'] + group['bin_hi']) / 2.0
            rho = float(scipy.stats.spearmanr(midpoint, group['success_ratio'])[0])
        rows.append(list(key) + [len(group), rho, constant])
    return pd.DataFrame(rows, columns=keys + ['bins', 'spearman', 'constant'])

def rescaled_crossings(records, level=0.5):
    """ Per rank, the rescaled parameter at which the success ratio first
    reaches 'level', interpolated linearly between the neighbouring cells
    ordered by mean rescaled parameter. NaN when it never does. """
    table = aggregate(records)
    crossings = dict()
    for rank, group in table.groupby('rank', sort=True):
        group = group[np.isfinite(group['mean_rescaled'])]
        group = group.sort_values('mean_rescaled', kind='mergesort')
        xs = group['mean_rescaled'].to_numpy()
        ys = group['success_ratio'].to_numpy()
        crossing = math.nan
        for k in range(len(xs)):
            if ys[k] >= level:
                if k == 0 or ys[k] == ys[k - 1]:
                    crossing = float(xs[k])
                else:
                    t = (level - ys[k - 1]) / (ys[k] - ys[k - 1])
                    crossing = float(xs[k - 1] + t * (xs[k] - xs[k - 1]))
                break
        crossings[int(rank)] = crossing
    return crossings

################################################################################
# Experiments

def _cell_key(row):
    return (str(row['mode']), int(row['rank']), float(row['sigma']), float(row['pq']),
            float(row['bin_lo']), float(row['bin_hi']))

def read_records(path):
    try:
        frame = pd.read_csv(path)
    except (OSError, ValueError) as err:
        raise module_error.McgError('cannot read records %s: %s' % (path, err))
    if list(frame.columns) != RECORDS_HEADER:
        raise module_error.McgError('%s does not carry the records header' % path)
    return frame

def _resume_state(cfg, records_path):
    """ Cells already complete in the records file. Rows of incomplete cells
    are dropped from the file so they are rerun whole. """
    if not os.path.exists(records_path):
        return set()
    frame = read_records(records_path)
    counts = dict()
    for _, row in frame.iterrows():
        key = _cell_key(row)
        counts[key] = counts.get(key, 0) + 1
    done = {key for key, count in counts.items() if count >= cfg.trials_per_cell}
    keep = [_cell_key(row) in done for _, row in frame.iterrows()]
    if not all(keep):
        logger.info('dropping %d records of unfinished cells', len(keep) - sum(keep))
        kept = frame[keep]
        utils.write_table(records_path, RECORDS_HEADER, kept.values.tolist())
    return done

def run_experiment(cfg, records_path, aggregate_path, jobs=None, progress=None):
    """ Runs every cell not already complete in 'records_path', appending each
    cell's records once all its trials finish, then recomputes the aggregate
    from the records file. Returns (records, aggregate) as DataFrames. """
    done = _resume_state(cfg, records_path)
    jobs = jobs or const.get_const('jobs')
    for cell in cfg.cells():
        if (cfg.mode,) + cell in done:
            logger.info('cell %r already complete', cell)
            continue
        records = async_session.map_sessions(
            lambda trial: run_trial(cell, trial, cfg), range(cfg.trials_per_cell), jobs)
        records.sort(key=lambda _: _.trial)
        utils.write_table(records_path, RECORDS_HEADER, [_.row() for _ in records], append=True)
        if progress is not None:
            progress(cell, records)
    frame = read_records(records_path) if os.path.exists(records_path) else records_frame([])
    table = aggregate(frame)
    utils.write_table(aggregate_path, AGGREGATE_HEADER, table.values.tolist())
    return frame, table
