""" Observation patterns as graphs, and the graph properties that the
completion conditions are stated in: node degrees, degree deviations,
algebraic connectivity of the pattern and of its complement, and the
disconnection measure psi. """

import logging
import sys

import numpy as np
import scipy.linalg
import scipy.sparse.csgraph

from . import const
from . import module_error
from . import utils

logger = logging.getLogger(__name__)

PROFILE_HEADER = ['n1', 'n2', 'count', 'density', 'xi1', 'xi2', 'delta_max',
                  'phi', 'delta_max_c', 'phi_c', 'psi']

################################################################################
# Patterns

class ObservationPattern:
    """ A set of observed entries of an n1 x n2 matrix. Entries are kept as
    sorted linear keys (i - 1) * n2 + (j - 1); 'edges' exposes them as 1-based
    index pairs. In symmetric mode the entry set is closed under transposition
    and may hold diagonal entries (loops). Instances are never mutated after
    construction. """
    def __init__(self, n1, n2, keys, symmetric=False):
        self.n1 = int(n1)
        self.n2 = int(n2)
        self.symmetric = bool(symmetric)
        keys = np.unique(np.asarray(keys, dtype=np.int64))
        keys.setflags(write=False)
        self.keys = keys
        self.__edges = None
        return
    @property
    def mode(self):
        return 'symmetric' if self.symmetric else 'bipartite'
    @property
    def shape(self):
        return (self.n1, self.n2)
    @property
    def count(self):
        """ |Omega|, the number of observed matrix entries. """
        return int(self.keys.size)
    @property
    def rows(self):
        return self.keys // self.n2
    @property
    def cols(self):
        return self.keys % self.n2
    @property
    def edges(self):
        if self.__edges is None:
            self.__edges = frozenset(zip((self.rows + 1).tolist(), (self.cols + 1).tolist()))
        return self.__edges
    def mask(self):
        """ Boolean n1 x n2 matrix, True on observed entries. """
        result = np.zeros(self.n1 * self.n2, dtype=bool)
        result[self.keys] = True
        return result.reshape(self.n1, self.n2)
    def __eq__(self, other):
        if not isinstance(other, ObservationPattern):
            return NotImplemented
        return (self.shape == other.shape and self.symmetric == other.symmetric
                and np.array_equal(self.keys, other.keys))
    def __hash__(self):
        return hash((self.n1, self.n2, self.symmetric, self.keys.tobytes()))
    def __repr__(self):
        return 'ObservationPattern(%s, %dx%d, count=%d)' % (
            self.mode, self.n1, self.n2, self.count)
    pass

def _check_dims(n1, n2, symmetric):
    if int(n1) < 1 or int(n2) < 1:
        raise module_error.PatternError('Dimensions must be positive, got %dx%d' % (n1, n2))
    if symmetric and int(n1) != int(n2):
        raise module_error.PatternError(
            'Symmetric pattern requires a square shape, got %dx%d' % (n1, n2))
    return

def pattern_from_entries(entries, n1, n2, symmetric=False):
    """ Builds a pattern from 1-based (i, j) pairs. Duplicates collapse; in
    symmetric mode every (i, j) also implies (j, i). """
    _check_dims(n1, n2, symmetric)
    entries = np.asarray(list(entries), dtype=np.int64).reshape(-1, 2)
    rows, cols = entries[:, 0], entries[:, 1]
    bad = (rows < 1) | (rows > n1) | (cols < 1) | (cols > n2)
    if bad.any():
        i, j = entries[np.argmax(bad)]
        raise module_error.PatternError(
            'Entry (%d, %d) out of range for a %dx%d pattern' % (i, j, n1, n2))
    rows, cols = rows - 1, cols - 1
    if symmetric:
        rows, cols = np.concatenate([rows, cols]), np.concatenate([cols, rows])
    return ObservationPattern(n1, n2, rows * int(n2) + cols, symmetric)

def pattern_from_mask(mask, symmetric=False):
    """ Builds a pattern from a boolean matrix of observed entries. """
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise module_error.PatternError('Mask must be a matrix')
    _check_dims(mask.shape[0], mask.shape[1], symmetric)
    if symmetric:
        mask = mask | mask.T
    return ObservationPattern(mask.shape[0], mask.shape[1], np.flatnonzero(mask), symmetric)

def subpattern(p, rows, cols):
    """ Induced pattern on the given 1-based rows and columns, relabeled in
    the given order. Stays symmetric only when rows and cols coincide. """
    rows = np.asarray(rows, dtype=np.int64) - 1
    cols = np.asarray(cols, dtype=np.int64) - 1
    if rows.size == 0 or cols.size == 0:
        raise module_error.PatternError('Subpattern needs at least one row and one column')
    if rows.min() < 0 or rows.max() >= p.n1 or cols.min() < 0 or cols.max() >= p.n2:
        raise module_error.PatternError('Subpattern index out of range')
    sub = p.mask()[np.ix_(rows, cols)]
    symmetric = p.symmetric and np.array_equal(rows, cols)
    return pattern_from_mask(sub, symmetric)

################################################################################
# Degrees and matrices

def degrees(p):
    """ Per-row and per-column observation counts. A loop counts once. """
    left = np.bincount(p.rows, minlength=p.n1).astype(np.int64)
    right = np.bincount(p.cols, minlength=p.n2).astype(np.int64)
    return left, right

def degree_deviations(p):
    """ Cross-normalized degree spread: xi1 sums the squared deviations of the
    left degrees and divides by n2, xi2 does the mirror image. """
    left, right = degrees(p)
    left = left.astype(np.float64)
    right = right.astype(np.float64)
    xi1 = np.sqrt(np.sum((left - left.mean()) ** 2) / p.n2)
    xi2 = np.sqrt(np.sum((right - right.mean()) ** 2) / p.n1)
    return float(xi1), float(xi2)

def max_degree(p):
    """ Average of the two per-side maximum degrees; the plain maximum degree
    in symmetric mode. """
    left, right = degrees(p)
    if p.symmetric:
        return float(left.max())
    return (float(left.max()) + float(right.max())) / 2.0

def complement(p):
    universe = np.arange(p.n1 * p.n2, dtype=np.int64)
    keys = np.setdiff1d(universe, p.keys, assume_unique=True)
    return ObservationPattern(p.n1, p.n2, keys, p.symmetric)

def biadjacency(p):
    """ Dense 0/1 matrix A with A[i, j] = 1 on observed entries; loops sit on
    the diagonal in symmetric mode. """
    return p.mask().astype(np.float64)

def adjacency(p):
    """ Node adjacency of the observation graph: the (n1 + n2) bipartite
    block matrix, or the n x n matrix with loops dropped in symmetric mode. """
    A = biadjacency(p)
    if p.symmetric:
        np.fill_diagonal(A, 0.0)
        return A
    return np.block([[np.zeros((p.n1, p.n1)), A], [A.T, np.zeros((p.n2, p.n2))]])

def laplacian(p):
    """ Combinatorial Laplacian D - W of the node adjacency. """
    return scipy.sparse.csgraph.laplacian(adjacency(p))

def algebraic_connectivity(p):
    """ Second-smallest Laplacian eigenvalue, snapped to 0 within the tie
    tolerance. """
    dim = p.n1 if p.symmetric else p.n1 + p.n2
    cap = const.get_const('eig-size-cap')
    if dim > cap:
        raise module_error.UnsupportedSizeError(
            'Laplacian of dimension %d exceeds the dense eigensolver cap %d' % (dim, cap))
    if dim < 2:
        return 0.0
    spectrum = np.sort(scipy.linalg.eigh(laplacian(p), eigvals_only=True))
    phi = float(spectrum[1])
    if abs(phi) < const.get_const('tie-tolerance'):
        phi = 0.0
    logger.debug('phi=%.6g on a Laplacian of dimension %d', phi, dim)
    return phi

################################################################################
# Profiles

class GraphProfile:
    """ Graph properties of a pattern and of its complement. psi is clamped
    at zero so every pattern has a profile, and snapped to zero within the
    tie tolerance. """
    def __init__(self, n1, n2, symmetric, count, xi1, xi2, delta_max, phi,
                 delta_max_complement, phi_complement):
        self.n1 = int(n1)
        self.n2 = int(n2)
        self.symmetric = bool(symmetric)
        self.count = int(count)
        self.density = self.count / float(self.n1 * self.n2)
        self.xi1 = float(xi1)
        self.xi2 = float(xi2)
        self.delta_max = float(delta_max)
        self.phi = float(phi)
        self.delta_max_complement = float(delta_max_complement)
        self.phi_complement = float(phi_complement)
        psi = max(self.delta_max - self.phi,
                  self.delta_max_complement - self.phi_complement, 0.0)
        self.psi = 0.0 if psi < const.get_const('tie-tolerance') else psi
        return
    @property
    def mode(self):
        return 'symmetric' if self.symmetric else 'bipartite'
    @property
    def xi(self):
        return self.xi1
    def __repr__(self):
        return 'GraphProfile(%s, %dx%d, count=%d, xi1=%.6g, xi2=%.6g, psi=%.6g)' % (
            self.mode, self.n1, self.n2, self.count, self.xi1, self.xi2, self.psi)
    pass

def graph_profile(p):
    xi1, xi2 = degree_deviations(p)
    comp = complement(p)
    profile = GraphProfile(p.n1, p.n2, p.symmetric, p.count, xi1, xi2,
                           max_degree(p), algebraic_connectivity(p),
                           max_degree(comp), algebraic_connectivity(comp))
    logger.debug('%r', profile)
    return profile

def theorem_quantity(profile):
    """ 2 xi + psi in symmetric mode, xi1 + xi2 + psi otherwise. """
    if profile.symmetric:
        return 2.0 * profile.xi1 + profile.psi
    return profile.xi1 + profile.xi2 + profile.psi

def profile_row(profile):
    return [profile.n1, profile.n2, profile.count, profile.density,
            profile.xi1, profile.xi2, profile.delta_max, profile.phi,
            profile.delta_max_complement, profile.phi_complement, profile.psi]

def write_profile_csv(target, profiles):
    utils.write_table(target, PROFILE_HEADER, [profile_row(_) for _ in profiles])
    return

################################################################################
# Matrix Market pattern files

def _open_text(target, mode):
    if target == '-':
        return (sys.stdin if 'r' in mode else sys.stdout), False
    if hasattr(target, 'write') or hasattr(target, 'read'):
        return target, False
    try:
        return open(str(target), mode, encoding='utf-8'), True
    except OSError as err:
        raise module_error.McgError('cannot open %s: %s' % (target, err))

def read_pattern(path, symmetric=False):
    """ Reads a Matrix Market coordinate file as a pattern. Values after the
    two indices are ignored. A 'symmetric' header mirrors every entry. """
    hfile, owned = _open_text(path, 'r')
    name = getattr(hfile, 'name', str(path))
    entries = list()
    dims = None
    mirrored = False
    expected = 0
    try:
        for line_no, line in enumerate(hfile, start=1):
            text = line.strip()
            if line_no == 1:
                tokens = text.lower().split()
                if len(tokens) < 5 or tokens[0] != '%%matrixmarket' or tokens[1] != 'matrix' \
                        or tokens[2] != 'coordinate':
                    raise module_error.ParseError(name, line_no,
                        'expected a "%%MatrixMarket matrix coordinate" header')
                if tokens[4] not in ('general', 'symmetric'):
                    raise module_error.ParseError(name, line_no,
                        'unsupported symmetry "%s"' % tokens[4])
                mirrored = tokens[4] == 'symmetric'
                continue
            if not text or text.startswith('%'):
                continue
            fields = text.split()
            if dims is None:
                try:
                    n1, n2, expected = [int(_) for _ in fields[:3]]
                except ValueError:
                    raise module_error.ParseError(name, line_no, 'malformed size line "%s"' % text)
                if len(fields) < 3 or n1 < 1 or n2 < 1 or expected < 0:
                    raise module_error.ParseError(name, line_no, 'malformed size line "%s"' % text)
                if (symmetric or mirrored) and n1 != n2:
                    raise module_error.ParseError(name, line_no,
                        'symmetric pattern must be square, got %dx%d' % (n1, n2))
                dims = (n1, n2)
                continue
            try:
                i, j = int(fields[0]), int(fields[1])
            except (ValueError, IndexError):
                raise module_error.ParseError(name, line_no, 'malformed entry "%s"' % text)
            if not (1 <= i <= dims[0] and 1 <= j <= dims[1]):
                raise module_error.ParseError(name, line_no,
                    'entry (%d, %d) out of range for %dx%d' % (i, j, dims[0], dims[1]))
            entries.append((i, j))
            if mirrored:
                entries.append((j, i))
    finally:
        if owned:
            hfile.close()
    if dims is None:
        raise module_error.ParseError(name, None, 'missing size line')
    stored = len(entries) // 2 if mirrored else len(entries)
    if stored != expected:
        raise module_error.ParseError(name, None,
            'size line announces %d entries, found %d' % (expected, stored))
    pattern = pattern_from_entries(entries, dims[0], dims[1], symmetric)
    logger.info('read %r from %s', pattern, name)
    return pattern

def write_pattern(target, p):
    hfile, owned = _open_text(target, 'w')
    try:
        hfile.write('%%MatrixMarket matrix coordinate pattern general\n')
        hfile.write('%d %d %d\n' % (p.n1, p.n2, p.count))
        for i, j in zip((p.rows + 1).tolist(), (p.cols + 1).tolist()):
            hfile.write('%d %d\n' % (i, j))
    finally:
        if owned:
            hfile.close()
    return
