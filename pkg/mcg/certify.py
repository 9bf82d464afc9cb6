""" Incoherence, the assumption-two deviation theta, the condition constants
alpha and gamma, and verdicts on the four completion conditions. """

import itertools
import logging
import math

import numpy as np
import scipy.special

from . import const
from . import module_error
from . import obsgraph
from . import solver
from . import utils

logger = logging.getLogger(__name__)

EXACT_SYMMETRIC = 'exact-symmetric'
APPROX_SYMMETRIC = 'approx-symmetric'
EXACT_RECTANGULAR = 'exact-rectangular'
APPROX_RECTANGULAR = 'approx-rectangular'
THEOREMS = [EXACT_SYMMETRIC, APPROX_SYMMETRIC, EXACT_RECTANGULAR, APPROX_RECTANGULAR]

SATISFIED = 'Satisfied'
VIOLATED = 'Violated'
INDETERMINATE = 'Indeterminate'

VERDICT_HEADER = ['theorem', 'satisfied', 'alpha', 'gamma', 'theta', 'lhs', 'rhs',
                  'rescaled', 'margin']

THETA_CHUNK = 4096

################################################################################
# Factorizations

def _as_factor(X):
    X = np.asarray(X, dtype=np.float64)
    return X.reshape(-1, 1) if X.ndim == 1 else X

class LowRankFactorization:
    """ M = U diag(sigma) V^T with orthonormal U (n1 x r) and V (n2 x r).
    mu0 is computed on construction. """
    def __init__(self, U, sigma=None, V=None):
        U = _as_factor(U)
        self.symmetric = V is None
        V = U if V is None else _as_factor(V)
        if U.shape[1] != V.shape[1]:
            raise module_error.FactorizationError(
                'U and V must have the same rank, got %d and %d' % (U.shape[1], V.shape[1]))
        r = U.shape[1]
        if r < 1 or r > min(U.shape[0], V.shape[0]):
            raise module_error.FactorizationError('rank %d out of range' % r)
        sigma = np.ones(r) if sigma is None else np.asarray(sigma, dtype=np.float64).ravel()
        if sigma.size != r:
            raise module_error.FactorizationError('expected %d singular values, got %d' % (r, sigma.size))
        if np.any(sigma <= 0) or np.any(np.diff(sigma) > 0):
            raise module_error.FactorizationError('singular values must be positive and nonincreasing')
        self.U = U
        self.V = V
        self.sigma = sigma
        self.mu0 = incoherence(self)
        return
    @property
    def rank(self):
        return self.U.shape[1]
    @property
    def shape(self):
        return (self.U.shape[0], self.V.shape[0])
    def matrix(self):
        return (self.U * self.sigma) @ self.V.T
    pass

def _check_orthonormal(X, name):
    gram = X.T @ X
    deviation = np.max(np.abs(gram - np.eye(X.shape[1])))
    if deviation > const.get_const('orthonormal-tolerance'):
        raise module_error.FactorizationError(
            '%s columns are not orthonormal (Gram deviation %.3g)' % (name, deviation))
    return

def incoherence(f):
    """ Smallest mu0 with every row of U within mu0 r / n1 and every row of V
    within mu0 r / n2 in squared norm. """
    U, V = f.U, f.V
    _check_orthonormal(U, 'U')
    _check_orthonormal(V, 'V')
    r = U.shape[1]
    worst_u = U.shape[0] * np.max(np.sum(U ** 2, axis=1))
    worst_v = V.shape[0] * np.max(np.sum(V ** 2, axis=1))
    return float(max(worst_u, worst_v) / r)

def factorization_from_matrix(M, r):
    """ Rank-r truncated SVD of M. A symmetric positive semidefinite M keeps
    V = U. """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise module_error.FactorizationError('expected a matrix')
    if r < 1 or r > min(M.shape):
        raise module_error.FactorizationError('rank %d out of range for shape %s' % (r, M.shape))
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    U, s, V = U[:, :r], s[:r], Vt[:r, :].T
    if s[-1] <= const.get_const('tie-tolerance') * s[0]:
        raise module_error.FactorizationError('matrix has rank below %d' % r)
    if M.shape[0] == M.shape[1] and np.allclose(U, V, atol=1e-8):
        return LowRankFactorization(U, s)
    return LowRankFactorization(U, s, V)

################################################################################
# Theta

def _subset_count(n, sizes):
    return sum(int(scipy.special.comb(n, k, exact=True)) for k in sizes)

def _deviation(outer, subsets, scale):
    """ Spectral deviation ||scale * sum_{i in S} u_i u_i^T - I|| per subset,
    for a batch of equal-size subsets (rows of 'subsets'). """
    r = outer.shape[1]
    if subsets.shape[1] == 0:
        sums = np.zeros((subsets.shape[0], r, r))
    else:
        sums = outer[subsets].sum(axis=1)
    eig = np.linalg.eigvalsh(scale * sums - np.eye(r))
    return np.max(np.abs(eig), axis=1)

def _side_sizes(degrees_other):
    return range(int(degrees_other.min()), int(degrees_other.max()) + 1)

def _enumerate_side(factor, sizes, scale):
    outer = np.einsum('ik,il->ikl', factor, factor)
    n = factor.shape[0]
    best = 0.0
    for k in sizes:
        combos = itertools.combinations(range(n), k)
        while True:
            chunk = list(itertools.islice(combos, THETA_CHUNK))
            if not chunk:
                break
            subsets = np.asarray(chunk, dtype=np.int64).reshape(len(chunk), k)
            best = max(best, float(np.max(_deviation(outer, subsets, scale))))
    return best

def _sample_side(factor, sizes, scale, draws, rng):
    outer = np.einsum('ik,il->ikl', factor, factor)
    n = factor.shape[0]
    order = np.argsort(np.sum(factor ** 2, axis=1), kind='stable')
    best = 0.0
    sizes = list(sizes)
    # greedy extremes: highest and lowest leverage rows
    for k in sizes:
        subsets = np.stack([order[n - k:], order[:k]]) if k else np.zeros((2, 0), dtype=np.int64)
        best = max(best, float(np.max(_deviation(outer, subsets, scale))))
    for _ in range(draws):
        k = sizes[int(rng.integers(len(sizes)))]
        subset = rng.choice(n, size=k, replace=False).reshape(1, k)
        best = max(best, float(_deviation(outer, subset, scale)[0]))
    return best

def theta_estimate(f, p, budget=None, seed=None):
    """ Largest deviation ||(n1 n2 / |Omega|) sum_{i in S} U_i U_i^T - I_r||
    over row subsets S of U whose size lies between the smallest and largest
    column degree, and the mirrored quantity for V against the row degrees.
    Exhaustive (exact=True) when the subsets number at most 'budget';
    otherwise a lower bound from 'budget' random subsets plus the extreme
    leverage subsets of every size. Returns (theta, exact). """
    budget = const.get_const('theta-enumeration-cutoff') if budget is None else int(budget)
    if budget < 1:
        raise module_error.DomainError('budget must be at least 1, got %d' % budget)
    if f.shape != p.shape:
        raise module_error.DomainError('factorization shape %s does not match pattern %s' % (f.shape, p.shape))
    if p.count == 0:
        raise module_error.DomainError('theta undefined for an empty pattern')
    scale = p.n1 * p.n2 / float(p.count)
    left, right = obsgraph.degrees(p)
    u_sizes = _side_sizes(right)
    v_sizes = _side_sizes(left)
    total = _subset_count(p.n1, u_sizes) + _subset_count(p.n2, v_sizes)
    if total <= budget:
        theta = max(_enumerate_side(f.U, u_sizes, scale), _enumerate_side(f.V, v_sizes, scale))
        logger.debug('theta=%.6g by enumerating %d subsets', theta, total)
        return theta, True
    rng = utils.get_rng(const.get_const('default-seed') if seed is None else seed)
    theta = max(_sample_side(f.U, u_sizes, scale, (budget + 1) // 2, rng),
                _sample_side(f.V, v_sizes, scale, budget // 2, rng))
    logger.info('theta lower bound %.6g from %d sampled subsets (%d in total)', theta, budget, total)
    return theta, False

################################################################################
# Condition constants

def _check_omega(omega):
    if omega <= 0:
        raise module_error.DomainError('|Omega| must be positive, got %r' % omega)
    return

def alpha_symmetric(profile, mu0, r, n, omega):
    """ mu0 r n (2 xi + psi) / |Omega| """
    _check_omega(omega)
    return mu0 * r * n * (2.0 * profile.xi1 + profile.psi) / float(omega)

def gamma_rectangular(profile, mu0, r, n1, n2, omega):
    """ sqrt(n1 n2) mu0 r (xi1 + xi2 + psi) / |Omega| """
    _check_omega(omega)
    return math.sqrt(n1 * n2) * mu0 * r * (profile.xi1 + profile.xi2 + profile.psi) / float(omega)

def rectangular_condition(theta, gamma, r, n1, n2, omega):
    """ gamma + sqrt(n1 n2 r (theta^2 + gamma^2) / (|Omega| (1 - theta - gamma))),
    or None when theta + gamma >= 1 leaves it undefined. """
    _check_omega(omega)
    room = 1.0 - theta - gamma
    if room <= 0:
        return None
    return gamma + math.sqrt(n1 * n2 * r * (theta ** 2 + gamma ** 2) / (omega * room))

def recommended_delta(sigma, omega, eta):
    """ 4 sigma sqrt(|Omega|) + 2 sigma sqrt(log(1 / eta)) """
    if not 0.0 < eta <= 1.0:
        raise module_error.DomainError('eta must lie in (0, 1], got %r' % eta)
    if sigma < 0:
        raise module_error.DomainError('sigma must be nonnegative, got %r' % sigma)
    return 4.0 * sigma * math.sqrt(omega) + 2.0 * sigma * math.sqrt(math.log(1.0 / eta))

def error_bound(delta, n, omega, C):
    """ Frobenius error guarantee 4 delta sqrt(C n / p) + 2 delta of the
    approximate symmetric completion, with p = |Omega| / n^2. The constant C
    has no known value and must be supplied. """
    _check_omega(omega)
    if C <= 0:
        raise module_error.DomainError('C must be positive, got %r' % C)
    density = omega / float(n * n)
    return 4.0 * delta * math.sqrt(C * n / density) + 2.0 * delta

################################################################################
# Contractions

def symmetric_contraction(W, p, f=None):
    """ ||(n^2 / |Omega|) P_Omega(W) - W|| in spectral norm; with a
    factorization, P_T is applied to the sampled term first. """
    _check_omega(p.count)
    scaled = (p.n1 * p.n2 / float(p.count)) * solver.project_omega(W, p)
    if f is not None:
        scaled = solver.project_tangent(scaled, f, symmetric=True)
    return float(np.linalg.norm(scaled - W, ord=2))

def rectangular_contraction(W, f, p):
    """ ||W - (n1 n2 / |Omega|) P_T P_Omega(W)||_F """
    _check_omega(p.count)
    sampled = solver.project_tangent(solver.project_omega(W, p), f, symmetric=False)
    return float(np.linalg.norm(W - (p.n1 * p.n2 / float(p.count)) * sampled))

################################################################################
# Verdicts

class TheoremVerdict:
    def __init__(self, theorem, quantities, satisfied, note=None):
        self.theorem = theorem
        self.quantities = dict(quantities)
        self.satisfied = satisfied
        self.note = note
        return
    @property
    def ratio(self):
        return self.quantities.get('ratio')
    def row(self):
        return [self.theorem, self.satisfied] + [self.quantities.get(_) for _ in VERDICT_HEADER[2:]]
    def __repr__(self):
        return 'TheoremVerdict(%s, %s)' % (self.theorem, self.satisfied)
    pass

def _require_symmetric(profile, theorem):
    if not profile.symmetric:
        raise module_error.DomainError('%s needs a symmetric-mode profile' % theorem)
    return

def _safe_ratio(numerator, denominator):
    return math.inf if denominator == 0 else numerator / denominator

def verdict_exact_symmetric(profile, mu0, r, n, omega):
    """ Satisfied iff |Omega| > 3 mu0 n r (2 xi + psi). margin = lhs - rhs. """
    _require_symmetric(profile, EXACT_SYMMETRIC)
    quantity = obsgraph.theorem_quantity(profile)
    rhs = 3.0 * mu0 * n * r * quantity
    quantities = dict(
        alpha=alpha_symmetric(profile, mu0, r, n, omega),
        lhs=float(omega), rhs=rhs, margin=omega - rhs,
        rescaled=_safe_ratio(omega, mu0 * r * quantity),
        ratio=_safe_ratio(omega, mu0 * n * r * quantity))
    return TheoremVerdict(EXACT_SYMMETRIC, quantities, SATISFIED if omega > rhs else VIOLATED)

def verdict_approx_symmetric(profile, mu0, r, n, omega):
    """ The condition carries an unknown constant: always Indeterminate,
    reporting |Omega| / (mu0 n r^1.5 (2 xi + psi)). """
    _require_symmetric(profile, APPROX_SYMMETRIC)
    quantity = obsgraph.theorem_quantity(profile)
    rhs = mu0 * n * r ** 1.5 * quantity
    quantities = dict(
        alpha=alpha_symmetric(profile, mu0, r, n, omega),
        lhs=float(omega), rhs=rhs,
        rescaled=_safe_ratio(omega, mu0 * r * quantity),
        ratio=_safe_ratio(omega, rhs))
    return TheoremVerdict(APPROX_SYMMETRIC, quantities, INDETERMINATE,
                          note='unknown constant; ratio reported')

def _verdict_rectangular(theorem, threshold, strict, profile, mu0, theta, r, n1, n2, omega):
    if theta < 0:
        raise module_error.DomainError('theta must be nonnegative, got %r' % theta)
    gamma = gamma_rectangular(profile, mu0, r, n1, n2, omega)
    value = rectangular_condition(theta, gamma, r, n1, n2, omega)
    quantity = profile.xi1 + profile.xi2 + profile.psi
    quantities = dict(gamma=gamma, theta=float(theta), rhs=threshold,
                      rescaled=_safe_ratio(omega, mu0 * r * quantity))
    if value is None:
        return TheoremVerdict(theorem, quantities, VIOLATED, note='theta + gamma >= 1')
    quantities.update(lhs=value, margin=threshold - value)
    holds = value < threshold if strict else value <= threshold
    return TheoremVerdict(theorem, quantities, SATISFIED if holds else VIOLATED)

def verdict_exact_rectangular(profile, mu0, theta, r, n1, n2, omega):
    """ Satisfied iff the condition expression is < 1. margin = 1 - lhs. """
    return _verdict_rectangular(EXACT_RECTANGULAR, 1.0, True,
                                profile, mu0, theta, r, n1, n2, omega)

def verdict_approx_rectangular(profile, mu0, theta, r, n1, n2, omega):
    """ Satisfied iff the condition expression is <= 1/2. """
    return _verdict_rectangular(APPROX_RECTANGULAR, 0.5, False,
                                profile, mu0, theta, r, n1, n2, omega)

def evaluate(theorem, profile, mu0, r, theta=None, omega=None):
    omega = profile.count if omega is None else omega
    if theorem == EXACT_SYMMETRIC:
        return verdict_exact_symmetric(profile, mu0, r, profile.n1, omega)
    if theorem == APPROX_SYMMETRIC:
        return verdict_approx_symmetric(profile, mu0, r, profile.n1, omega)
    if theorem not in (EXACT_RECTANGULAR, APPROX_RECTANGULAR):
        raise module_error.DomainError('unknown theorem "%s"' % theorem)
    if theta is None:
        raise module_error.DomainError('%s needs theta' % theorem)
    if theorem == EXACT_RECTANGULAR:
        return verdict_exact_rectangular(profile, mu0, theta, r, profile.n1, profile.n2, omega)
    return verdict_approx_rectangular(profile, mu0, theta, r, profile.n1, profile.n2, omega)

def evaluate_all(profile, mu0, r, theta=None, omega=None):
    """ Symmetric profiles get both symmetric verdicts; rectangular verdicts
    are added whenever theta is known. """
    theorems = list()
    if profile.symmetric:
        theorems += [EXACT_SYMMETRIC, APPROX_SYMMETRIC]
    if theta is not None:
        theorems += [EXACT_RECTANGULAR, APPROX_RECTANGULAR]
    if not theorems:
        raise module_error.DomainError('rectangular verdicts need theta')
    return [evaluate(_, profile, mu0, r, theta, omega) for _ in theorems]

def write_verdict_csv(target, verdicts):
    utils.write_table(target, VERDICT_HEADER, [_.row() for _ in verdicts])
    return
