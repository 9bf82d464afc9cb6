""" Synthetic ground truths, noise, and observation patterns: two-block
stochastic block models, Erdos-Renyi and circulant patterns, and the search
that lands a pattern in a bin of the graph quantity. """

import json
import logging
import os

import numpy as np

from . import certify
from . import const
from . import module_error
from . import obsgraph
from . import solver
from . import utils

logger = logging.getLogger(__name__)

################################################################################
# Ground truth and noise

def random_low_rank(n1, n2, r, symmetric=False, seed=None):
    """ M = G G^T (symmetric) or G1 G2^T with standard normal factors; the
    returned factorization is the SVD of M. """
    if symmetric and n1 != n2:
        raise module_error.DomainError('symmetric ground truth needs n1 == n2, got %dx%d' % (n1, n2))
    if r < 1 or r > min(n1, n2):
        raise module_error.FactorizationError('rank %d out of range for %dx%d' % (r, n1, n2))
    rng = utils.get_rng(const.get_const('default-seed') if seed is None else seed)
    if symmetric:
        G = rng.standard_normal((n1, r))
        M = G @ G.T
        M = (M + M.T) / 2.0
        Q, R = np.linalg.qr(G)
        w, W = np.linalg.eigh(R @ R.T)
        w, W = w[::-1], W[:, ::-1]
        return M, certify.LowRankFactorization(Q @ W, w)
    G1 = rng.standard_normal((n1, r))
    G2 = rng.standard_normal((n2, r))
    M = G1 @ G2.T
    Q1, R1 = np.linalg.qr(G1)
    Q2, R2 = np.linalg.qr(G2)
    A, s, Bt = np.linalg.svd(R1 @ R2.T)
    return M, certify.LowRankFactorization(Q1 @ A, s, Q2 @ Bt.T)

def add_noise(M, sigma, seed=None):
    """ M plus i.i.d. N(0, sigma^2) entries; sigma = 0 returns a copy of M. """
    if sigma < 0:
        raise module_error.DomainError('sigma must be nonnegative, got %r' % sigma)
    M = np.asarray(M, dtype=np.float64)
    if sigma == 0:
        return M.copy()
    rng = utils.get_rng(const.get_const('default-seed') if seed is None else seed)
    return M + sigma * rng.standard_normal(M.shape)

################################################################################
# Patterns

def _check_probability(value, name):
    if not 0.0 <= value <= 1.0:
        raise module_error.DomainError('%s must lie in [0, 1], got %r' % (name, value))
    return

def _bernoulli_pattern(P, symmetric, rng):
    """ Independent inclusion with per-entry probabilities P. Symmetric mode
    draws the upper triangle, diagonal included, and mirrors it. """
    draws = rng.random(P.shape) < P
    if symmetric:
        draws = np.triu(draws)
    return obsgraph.pattern_from_mask(draws, symmetric)

def block_labels(n):
    """ Two blocks; the first gets the extra node when n is odd. """
    labels = np.ones(n, dtype=np.int64)
    labels[:(n + 1) // 2] = 0
    return labels

class SbmSpec:
    """ Two-block stochastic block model. p applies within a block (the
    diagonal blocks U1 x V1 and U2 x V2), q across blocks. """
    def __init__(self, n1, n2, p, q, symmetric=False, seed=None):
        self.n1 = int(n1)
        self.n2 = int(n2)
        self.p = float(p)
        self.q = float(q)
        self.symmetric = bool(symmetric)
        self.seed = const.get_const('default-seed') if seed is None else int(seed)
        _check_probability(self.p, 'p')
        _check_probability(self.q, 'q')
        if self.symmetric and self.n1 != self.n2:
            raise module_error.DomainError('symmetric SBM needs n1 == n2')
        return
    def block_probabilities(self):
        return {(0, 0): self.p, (0, 1): self.q, (1, 0): self.q, (1, 1): self.p}
    def probability_matrix(self):
        table = self.block_probabilities()
        rows, cols = block_labels(self.n1), block_labels(self.n2)
        P = np.empty((self.n1, self.n2))
        for (a, b), prob in table.items():
            P[np.ix_(rows == a, cols == b)] = prob
        return P
    pass

def sbm_pattern(spec):
    return _bernoulli_pattern(spec.probability_matrix(), spec.symmetric, utils.get_rng(spec.seed))

def er_pattern(n1, n2, prob, symmetric=False, seed=None):
    _check_probability(prob, 'prob')
    if symmetric and n1 != n2:
        raise module_error.DomainError('symmetric pattern needs n1 == n2')
    rng = utils.get_rng(const.get_const('default-seed') if seed is None else seed)
    return _bernoulli_pattern(np.full((n1, n2), float(prob)), symmetric, rng)

def circulant_pattern(n, offsets, symmetric=False):
    """ Entries (i, i + o mod n) for every offset o: a d-regular pattern with
    d = number of distinct offsets. Symmetric mode closes the offsets under
    negation first. """
    offsets = {int(o) % n for o in offsets}
    if symmetric:
        offsets |= {(-o) % n for o in offsets}
    rows = np.repeat(np.arange(n), len(offsets))
    cols = (rows + np.tile(sorted(offsets), n)) % n
    return obsgraph.ObservationPattern(n, n, rows * n + cols, symmetric)

################################################################################
# Search

def sbm_grid(pq_level, step=None):
    """ (p, q) pairs with p + q = pq_level, p swept from step to
    pq_level - step; pairs leaving [0, 1] are dropped. """
    step = step or const.get_const('search-step')
    grid = list()
    k = 1
    while k * step < pq_level - step / 2.0:
        p = round(k * step, 10)
        q = round(pq_level - p, 10)
        if 0.0 <= p <= 1.0 and 0.0 <= q <= 1.0:
            grid.append((p, q))
        k += 1
    return grid

class PatternMatch:
    def __init__(self, pattern, profile, p, q, attempt):
        self.pattern = pattern
        self.profile = profile
        self.p = p
        self.q = q
        self.attempt = attempt
        return
    @property
    def quantity(self):
        return obsgraph.theorem_quantity(self.profile)
    pass

def pattern_search(target_bin, n1, n2, grid, attempts=None, symmetric=False, seed=None):
    """ First SBM pattern, walking the (p, q) grid with 'attempts' draws per
    point, whose quantity (2 xi + psi, or xi1 + xi2 + psi) lies in
    [lo, hi). Returns a PatternMatch, or None when the budget runs out. """
    lo, hi = target_bin
    if not lo < hi:
        raise module_error.DomainError('empty bin [%r, %r)' % (lo, hi))
    attempts = attempts or const.get_const('search-attempts')
    seed = const.get_const('default-seed') if seed is None else seed
    for p, q in grid:
        for attempt in range(attempts):
            spec = SbmSpec(n1, n2, p, q, symmetric, utils.derive_seed(seed, 'search', p, q, attempt))
            pattern = sbm_pattern(spec)
            profile = obsgraph.graph_profile(pattern)
            quantity = obsgraph.theorem_quantity(profile)
            if lo <= quantity < hi:
                logger.debug('bin [%g, %g) hit at p=%g q=%g attempt %d (quantity %.4g)',
                             lo, hi, p, q, attempt, quantity)
                return PatternMatch(pattern, profile, p, q, attempt)
    logger.info('bin [%g, %g) not reached on %d grid points', lo, hi, len(grid))
    return None

################################################################################
# Trial instances

class TrialInstance:
    def __init__(self, ground_truth, factorization, pattern, noisy_observation, sigma, seed):
        self.ground_truth = ground_truth
        self.factorization = factorization
        self.pattern = pattern
        self.noisy_observation = noisy_observation
        self.sigma = float(sigma)
        self.seed = seed
        return
    pass

def trial_instance(pattern, r, sigma, seed, symmetric=None):
    """ Ground truth of rank r on the pattern's shape, noise of level sigma,
    masked to the pattern. The noise draw does not depend on sigma, so
    instances at different noise levels share truth and noise direction. """
    symmetric = pattern.symmetric if symmetric is None else symmetric
    M, f = random_low_rank(pattern.n1, pattern.n2, r, symmetric, utils.derive_seed(seed, 'truth'))
    noisy = add_noise(M, sigma, utils.derive_seed(seed, 'noise'))
    observed = solver.project_omega(noisy, pattern)
    return TrialInstance(M, f, pattern, observed, sigma, seed)

def save_instance(directory, inst, profile=None):
    """ Writes pattern.mtx, truth.csv, observed.csv and meta.json. """
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as err:
        raise module_error.McgError('cannot create %s: %s' % (directory, err))
    obsgraph.write_pattern(os.path.join(directory, 'pattern.mtx'), inst.pattern)
    utils.write_dense(os.path.join(directory, 'truth.csv'), inst.ground_truth)
    utils.write_dense(os.path.join(directory, 'observed.csv'), inst.noisy_observation)
    meta = dict(n1=inst.pattern.n1, n2=inst.pattern.n2, rank=inst.factorization.rank,
                sigma=inst.sigma, seed=inst.seed, symmetric=inst.pattern.symmetric,
                mu0=inst.factorization.mu0)
    if profile is not None:
        meta['profile'] = dict(zip(obsgraph.PROFILE_HEADER, obsgraph.profile_row(profile)))
    with open(os.path.join(directory, 'meta.json'), 'w', encoding='utf-8') as hfile:
        json.dump(meta, hfile, indent=2)
    return

def load_instance(directory):
    try:
        with open(os.path.join(directory, 'meta.json'), 'r', encoding='utf-8') as hfile:
            meta = json.load(hfile)
    except (OSError, ValueError) as err:
        raise module_error.McgError('cannot read instance meta in %s: %s' % (directory, err))
    pattern = obsgraph.read_pattern(os.path.join(directory, 'pattern.mtx'), meta['symmetric'])
    truth = utils.read_dense(os.path.join(directory, 'truth.csv'))
    observed = utils.read_dense(os.path.join(directory, 'observed.csv'))
    factorization = certify.factorization_from_matrix(truth, meta['rank'])
    return TrialInstance(truth, factorization, pattern, observed, meta['sigma'], meta['seed'])
