""" Nuclear-norm completion by an inexact augmented Lagrangian with singular
value thresholding, and the projections P_Omega, P_T and P_T-perp. """

import logging

import numpy as np

from . import const
from . import module_error
from . import utils

logger = logging.getLogger(__name__)

TRACE_HEADER = ['iter', 'feasibility', 'nuclear_norm']

################################################################################
# Configuration and results

def _or_default(value, name):
    return const.get_const(name) if value is None else value

class SolverConfig:
    """ Augmented Lagrangian schedule. delta = 0 solves the equality
    constrained program; delta > 0 the Frobenius-ball program. A None
    penalty_init starts the penalty at 1 / ||P_Omega(Y)|| (spectral). """
    def __init__(self, delta=0.0, penalty_init=None, penalty_growth=None,
                 max_iters=None, tol_feas=None, tol_change=None):
        self.delta = float(delta)
        self.penalty_init = None if penalty_init is None else float(penalty_init)
        self.penalty_growth = float(_or_default(penalty_growth, 'solver-penalty-growth'))
        self.max_iters = int(_or_default(max_iters, 'solver-max-iters'))
        self.tol_feas = float(_or_default(tol_feas, 'solver-tol-feas'))
        self.tol_change = float(_or_default(tol_change, 'solver-tol-change'))
        problems = list()
        if not self.delta >= 0.0:
            problems.append('delta must be nonnegative, got %r' % self.delta)
        if self.penalty_init is not None and not self.penalty_init > 0.0:
            problems.append('penalty_init must be positive, got %r' % self.penalty_init)
        if not self.penalty_growth > 1.0:
            problems.append('penalty_growth must exceed 1, got %r' % self.penalty_growth)
        if self.max_iters < 1:
            problems.append('max_iters must be at least 1, got %r' % self.max_iters)
        if not self.tol_feas > 0.0:
            problems.append('tol_feas must be positive, got %r' % self.tol_feas)
        if not self.tol_change > 0.0:
            problems.append('tol_change must be positive, got %r' % self.tol_change)
        if problems:
            raise module_error.ConfigError(problems)
        return
    def with_delta(self, delta):
        return SolverConfig(delta, self.penalty_init, self.penalty_growth,
                            self.max_iters, self.tol_feas, self.tol_change)
    def as_dict(self):
        return dict(delta=self.delta, penalty_init=self.penalty_init,
                    penalty_growth=self.penalty_growth, max_iters=self.max_iters,
                    tol_feas=self.tol_feas, tol_change=self.tol_change)
    pass

class CompletionResult:
    def __init__(self, estimate, iterations, feasibility, nuclear_norm, converged, trace):
        self.estimate = estimate
        self.iterations = int(iterations)
        self.feasibility = float(feasibility)
        self.nuclear_norm = float(nuclear_norm)
        self.converged = bool(converged)
        # (iteration, feasibility, nuclear norm) per iteration
        self.trace = list(trace)
        return
    @property
    def symmetry_gap(self):
        """ ||X - X^T||_F / ||X||_F for square estimates, None otherwise. """
        X = self.estimate
        if X.shape[0] != X.shape[1]:
            return None
        norm = np.linalg.norm(X)
        if norm == 0.0:
            return 0.0
        return float(np.linalg.norm(X - X.T) / norm)
    pass

################################################################################
# Projections

def _check_shape(X, shape, what='matrix'):
    if X.shape != tuple(shape):
        raise module_error.DomainError('%s of shape %s does not match %s' % (what, X.shape, tuple(shape)))
    return

def project_omega(X, p):
    """ Keeps the observed entries, zeros the rest. """
    X = np.asarray(X, dtype=np.float64)
    _check_shape(X, p.shape)
    return np.where(p.mask(), X, 0.0)

def project_tangent(Z, f, symmetric=False):
    """ Symmetric: U U^T Z U U^T. Rectangular: U U^T Z + (I - U U^T) Z V V^T. """
    Z = np.asarray(Z, dtype=np.float64)
    U, V = f.U, f.V
    _check_shape(Z, (U.shape[0], V.shape[0]))
    UtZ = U @ (U.T @ Z)
    if symmetric:
        return (UtZ @ U) @ U.T
    return UtZ + ((Z - UtZ) @ V) @ V.T

def project_tangent_perp(Z, f, symmetric=False):
    """ Symmetric: (I - U U^T) Z (I - U U^T). Rectangular: (I - U U^T) Z (I - V V^T). """
    Z = np.asarray(Z, dtype=np.float64)
    U, V = f.U, f.V
    _check_shape(Z, (U.shape[0], V.shape[0]))
    R = Z - U @ (U.T @ Z)
    W = U if symmetric else V
    return R - (R @ W) @ W.T

################################################################################
# Nuclear norm

def nuclear_norm(X):
    return float(np.sum(np.linalg.svd(np.asarray(X, dtype=np.float64), compute_uv=False)))

def _shrink(X, tau):
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    s = np.maximum(s - tau, 0.0)
    keep = s > 0.0
    return (U[:, keep] * s[keep]) @ Vt[keep, :], s

def svt(X, tau):
    """ Singular value thresholding, the proximal map of tau * ||.||_*. """
    if tau < 0:
        raise module_error.DomainError('tau must be nonnegative, got %r' % tau)
    X = np.asarray(X, dtype=np.float64)
    if tau == 0:
        return X.copy()
    return _shrink(X, tau)[0]

def relative_error(M, Mhat):
    M = np.asarray(M, dtype=np.float64)
    Mhat = np.asarray(Mhat, dtype=np.float64)
    _check_shape(Mhat, M.shape, 'estimate')
    norm = np.linalg.norm(M)
    if norm == 0.0:
        raise module_error.DomainError('relative error undefined for a zero ground truth')
    return float(np.linalg.norm(M - Mhat) / norm)

################################################################################
# Solver

def _project_ball(R, radius):
    norm = np.linalg.norm(R)
    if norm <= radius:
        return R
    return R * (radius / norm)

def solve(Y_observed, p, cfg=None):
    """ Minimizes ||X||_* subject to ||P_Omega(X - Y)||_F <= delta, splitting
    P_Omega(Y) = X + E with E free off Omega and confined to the delta-ball
    on Omega. Entries of Y off Omega are ignored. Non-convergence is
    reported through 'converged', never raised. """
    cfg = cfg or SolverConfig()
    Y = np.asarray(Y_observed, dtype=np.float64)
    _check_shape(Y, p.shape, 'observation')
    cap = const.get_const('svd-size-cap')
    if max(p.n1, p.n2) > cap:
        raise module_error.UnsupportedSizeError(
            'matrix of shape %dx%d exceeds the dense SVD cap %d' % (p.n1, p.n2, cap))
    mask = p.mask()
    D = np.where(mask, Y, 0.0)
    norm_D = np.linalg.norm(D)
    if norm_D == 0.0:
        return CompletionResult(np.zeros_like(D), 0, 0.0, 0.0, True, [])

    penalty = cfg.penalty_init or 1.0 / np.linalg.norm(D, ord=2)
    scale = max(1.0, norm_D)
    A = np.zeros_like(D)
    E = np.zeros_like(D)
    multiplier = np.zeros_like(D)
    trace = list()
    converged = False
    iteration = 0
    nuclear = 0.0
    while iteration < cfg.max_iters:
        iteration += 1
        A_prev = A
        A, s = _shrink(D - E + multiplier / penalty, 1.0 / penalty)
        R = D - A + multiplier / penalty
        E = np.where(mask, 0.0, R)
        E[mask] = _project_ball(R[mask], cfg.delta)
        gap = D - A - E
        multiplier = multiplier + penalty * gap
        penalty *= cfg.penalty_growth

        nuclear = float(np.sum(s))
        feasibility = float(np.linalg.norm(A[mask] - D[mask]))
        trace.append((iteration, feasibility, nuclear))
        crit_feas = np.linalg.norm(gap) / scale
        crit_change = np.linalg.norm(A - A_prev) / max(1.0, np.linalg.norm(A))
        logger.debug('iter %d feas %.3e change %.3e nuclear %.6g',
                     iteration, crit_feas, crit_change, nuclear)
        if crit_feas <= cfg.tol_feas and crit_change <= cfg.tol_change:
            converged = True
            break
    if not converged:
        logger.warning('solver stopped after %d iterations without convergence', iteration)
    feasibility = float(np.linalg.norm(A[mask] - Y[mask]))
    return CompletionResult(A, iteration, feasibility, nuclear, converged, trace)

def write_trace_csv(target, result):
    utils.write_table(target, TRACE_HEADER, [list(_) for _ in result.trace])
    return
