""" Observation patterns, their graph properties and pattern files. """

import io
import math

import numpy as np
import pytest

from mcg import const
from mcg import module_error
from mcg import obsgraph
from mcg import synth

from mcg.test import oracles


def three_edges():
    return obsgraph.pattern_from_entries([(1, 1), (1, 2), (2, 1)], 2, 2)


def complete(n1, n2, symmetric=False):
    return obsgraph.pattern_from_mask(np.ones((n1, n2), dtype=bool), symmetric)


################################################################################
# Construction

def test_pattern_from_entries_counts_and_mirrors():
    assert three_edges().count == 3
    p = obsgraph.pattern_from_entries([(1, 2)], 3, 3, symmetric=True)
    assert p.edges == {(1, 2), (2, 1)}
    assert p.count == 2
    p = obsgraph.pattern_from_entries([(1, 1)], 3, 3, symmetric=True)
    assert p.edges == {(1, 1)}
    assert p.count == 1


def test_pattern_from_entries_collapses_duplicates():
    p = obsgraph.pattern_from_entries([(1, 2), (1, 2), (2, 2)], 2, 2)
    assert p.count == 2


@pytest.mark.parametrize('entries, n1, n2, symmetric', [
    ([(0, 1)], 2, 2, False),
    ([(3, 1)], 2, 2, False),
    ([(1, 3)], 2, 2, False),
    ([(1, 1)], 2, 3, True),
    ([(1, 1)], 0, 2, False),
])
def test_pattern_from_entries_rejects(entries, n1, n2, symmetric):
    with pytest.raises(module_error.PatternError):
        obsgraph.pattern_from_entries(entries, n1, n2, symmetric)


def test_pattern_is_frozen_and_hashable():
    p = three_edges()
    assert not p.keys.flags.writeable
    q = obsgraph.pattern_from_entries([(2, 1), (1, 2), (1, 1)], 2, 2)
    assert p == q
    assert hash(p) == hash(q)
    assert p != obsgraph.pattern_from_entries([(1, 1), (1, 2), (2, 1)], 2, 2, symmetric=True)
    assert p.mask().tolist() == [[True, True], [True, False]]


def test_subpattern_relabels_in_order():
    p = obsgraph.pattern_from_entries([(1, 3), (2, 2), (3, 1)], 3, 3)
    sub = obsgraph.subpattern(p, [3, 1], [1, 3])
    assert sub.shape == (2, 2)
    assert sub.edges == {(1, 1), (2, 2)}
    with pytest.raises(module_error.PatternError):
        obsgraph.subpattern(p, [4], [1])


################################################################################
# Degrees and complement

def test_degrees_examples():
    left, right = obsgraph.degrees(three_edges())
    assert left.tolist() == [2, 1]
    assert right.tolist() == [2, 1]
    left, right = obsgraph.degrees(complete(3, 5))
    assert left.tolist() == [5, 5, 5]
    assert right.tolist() == [3] * 5
    left, right = obsgraph.degrees(complete(3, 3, symmetric=True))
    assert left.tolist() == right.tolist() == [3, 3, 3]


def test_degree_sums_equal_count(rng):
    for _ in range(20):
        p = oracles.random_pattern(rng, int(rng.integers(1, 12)), int(rng.integers(1, 12)))
        left, right = obsgraph.degrees(p)
        assert left.sum() == right.sum() == p.count


def test_degree_deviations_examples():
    p = synth.circulant_pattern(7, [0, 1, 3])
    assert obsgraph.degree_deviations(p) == (0.0, 0.0)
    # loops count toward degree: degrees 3, 3, 2, 2
    p = obsgraph.pattern_from_entries(
        [(1, 1), (1, 2), (1, 3), (2, 2), (2, 4), (3, 3), (4, 4)], 4, 4, symmetric=True)
    assert obsgraph.degrees(p)[0].tolist() == [3, 3, 2, 2]
    xi1, xi2 = obsgraph.degree_deviations(p)
    assert xi1 == pytest.approx(0.5)
    assert xi2 == pytest.approx(0.5)


def test_degree_deviations_ignore_relabeling(rng):
    for _ in range(20):
        n1, n2 = int(rng.integers(2, 10)), int(rng.integers(2, 10))
        mask = oracles.random_pattern(rng, n1, n2).mask()
        shuffled = mask[rng.permutation(n1)][:, rng.permutation(n2)]
        expected = obsgraph.degree_deviations(obsgraph.pattern_from_mask(mask))
        assert obsgraph.degree_deviations(obsgraph.pattern_from_mask(shuffled)) == \
            pytest.approx(expected, abs=1e-12)


def test_complement_examples():
    assert obsgraph.complement(complete(2, 3)).count == 0
    assert obsgraph.complement(three_edges()).edges == {(2, 2)}
    empty = obsgraph.ObservationPattern(3, 3, [], symmetric=True)
    full = obsgraph.complement(empty)
    assert full.count == 9
    assert {(1, 1), (2, 2), (3, 3)} <= full.edges


def test_complement_is_an_involution(rng):
    for symmetric in (False, True):
        for _ in range(20):
            n = int(rng.integers(1, 10))
            p = oracles.random_pattern(rng, n, n if symmetric else int(rng.integers(1, 10)), symmetric)
            assert obsgraph.complement(obsgraph.complement(p)) == p


################################################################################
# Spectra and profiles

def test_algebraic_connectivity_examples():
    assert obsgraph.algebraic_connectivity(complete(2, 2)) == pytest.approx(2.0)
    assert obsgraph.algebraic_connectivity(three_edges()) == pytest.approx(2.0 - math.sqrt(2.0))
    isolated = obsgraph.pattern_from_entries([(1, 1), (2, 1), (1, 2), (2, 2)], 2, 3)
    assert obsgraph.algebraic_connectivity(isolated) == 0.0


def test_algebraic_connectivity_of_disconnected_blocks():
    two_blocks = synth.sbm_pattern(synth.SbmSpec(8, 8, 1.0, 0.0, symmetric=True, seed=1))
    assert obsgraph.algebraic_connectivity(two_blocks) <= 1e-9
    assert obsgraph.graph_profile(two_blocks).phi == 0.0


def test_laplacian_matches_edge_by_edge_assembly(rng):
    for _ in range(40):
        symmetric = bool(rng.integers(2))
        n1 = int(rng.integers(1, 9))
        n2 = n1 if symmetric else int(rng.integers(1, 9))
        p = oracles.random_pattern(rng, n1, n2, symmetric)
        L = obsgraph.laplacian(p)
        assert np.array_equal(L, oracles.brute_laplacian(p.edges, n1, n2, symmetric))
        assert L.sum(axis=1) == pytest.approx(np.zeros(L.shape[0]))


def test_laplacian_drops_loops():
    loops = obsgraph.pattern_from_entries([(1, 1), (1, 2), (3, 3)], 3, 3, symmetric=True)
    assert np.array_equal(obsgraph.adjacency(loops).diagonal(), np.zeros(3))
    assert np.array_equal(obsgraph.laplacian(loops),
                          np.array([[1.0, -1.0, 0.0], [-1.0, 1.0, 0.0], [0.0, 0.0, 0.0]]))


def test_algebraic_connectivity_size_cap(monkeypatch):
    monkeypatch.setitem(const.universal_options_list, 'eig-size-cap', 3)
    with pytest.raises(module_error.UnsupportedSizeError):
        obsgraph.algebraic_connectivity(complete(2, 2))


def test_graph_profile_examples():
    profile = obsgraph.graph_profile(complete(3, 3))
    assert (profile.xi1, profile.xi2) == (0.0, 0.0)
    assert profile.delta_max == 3.0
    assert profile.phi == pytest.approx(3.0)
    assert profile.delta_max_complement == 0.0
    assert profile.phi_complement == 0.0
    assert profile.psi == pytest.approx(0.0, abs=1e-9)

    profile = obsgraph.graph_profile(three_edges())
    assert (profile.xi1, profile.xi2) == (pytest.approx(0.5), pytest.approx(0.5))
    assert profile.delta_max == 2.0
    assert profile.delta_max_complement == 1.0
    assert profile.phi_complement == 0.0
    assert profile.psi == pytest.approx(math.sqrt(2.0))

    profile = obsgraph.graph_profile(complete(3, 3, symmetric=True))
    assert profile.xi1 == 0.0
    assert profile.delta_max == 3.0
    assert profile.phi == pytest.approx(3.0)
    assert profile.psi == pytest.approx(0.0, abs=1e-9)
    assert obsgraph.theorem_quantity(profile) == pytest.approx(0.0, abs=1e-9)


def test_regular_pattern_has_zero_deviation():
    for offsets in ([0], [0, 2], [1, 2, 5]):
        profile = obsgraph.graph_profile(synth.circulant_pattern(9, offsets))
        assert profile.xi1 == 0.0
        assert profile.xi2 == 0.0


def test_graph_profile_matches_brute_force(rng):
    for k in range(200):
        symmetric = k % 2 == 1
        n1 = int(rng.integers(1, 11))
        n2 = n1 if symmetric else int(rng.integers(1, 11))
        p = oracles.random_pattern(rng, n1, n2, symmetric)
        profile = obsgraph.graph_profile(p)
        expected = oracles.brute_profile(p)
        assert profile.xi1 == pytest.approx(expected['xi1'], abs=1e-9)
        assert profile.xi2 == pytest.approx(expected['xi2'], abs=1e-9)
        assert profile.delta_max == pytest.approx(expected['delta_max'], abs=1e-9)
        assert profile.phi == pytest.approx(expected['phi'], abs=1e-9)
        assert profile.delta_max_complement == pytest.approx(expected['delta_max_c'], abs=1e-9)
        assert profile.phi_complement == pytest.approx(expected['phi_c'], abs=1e-9)
        assert profile.psi == pytest.approx(expected['psi'], abs=1e-9)


def _unit_rows(rng, count, n, centered=False):
    X = rng.standard_normal((count, n))
    if centered:
        X -= X.mean(axis=1, keepdims=True)
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def test_adjacency_deviation_bounds(rng):
    """ The three bilinear bounds on the biadjacency matrix in terms of
    xi1, xi2 and psi. """
    checked = 0
    while checked < 50:
        symmetric = checked % 3 == 2
        n1 = int(rng.integers(2, 13))
        n2 = n1 if symmetric else int(rng.integers(2, 13))
        p = oracles.random_pattern(rng, n1, n2, symmetric)
        if p.count == 0:
            continue
        checked += 1
        profile = obsgraph.graph_profile(p)
        A = obsgraph.biadjacency(p)

        x, y = _unit_rows(rng, 1000, n1, centered=True), _unit_rows(rng, 1000, n2)
        values = np.abs(np.einsum('ki,ij,kj->k', x, A, y))
        assert np.all(profile.xi1 + profile.psi - values >= -1e-9)

        x, y = _unit_rows(rng, 1000, n1), _unit_rows(rng, 1000, n2, centered=True)
        values = np.abs(np.einsum('ki,ij,kj->k', x, A, y))
        assert np.all(profile.xi2 + profile.psi - values >= -1e-9)

        scale = n1 * n2 / float(p.count)
        x, y = _unit_rows(rng, 1000, n1), _unit_rows(rng, 1000, n2)
        values = np.abs(np.einsum('ki,ij,kj->k', x, np.ones((n1, n2)) - scale * A, y))
        bound = scale * (profile.xi1 + profile.xi2 + profile.psi)
        assert np.all(bound - values >= -1e-9)


def test_profile_csv_header():
    out = io.StringIO()
    obsgraph.write_profile_csv(out, [obsgraph.graph_profile(three_edges())])
    lines = out.getvalue().splitlines()
    assert lines[0] == 'n1,n2,count,density,xi1,xi2,delta_max,phi,delta_max_c,phi_c,psi'
    assert lines[1].startswith('2,2,3,0.75,0.5,0.5,2.0,')


################################################################################
# Pattern files

def test_read_pattern(write_text):
    path = write_text('p.mtx', '%%MatrixMarket matrix coordinate pattern general\n'
                               '% written by hand\n'
                               '2 3 3\n'
                               '1 1\n2 3\n\n1 2\n')
    p = obsgraph.read_pattern(path)
    assert p.shape == (2, 3)
    assert p.edges == {(1, 1), (2, 3), (1, 2)}


def test_read_pattern_ignores_values(write_text):
    path = write_text('p.mtx', '%%MatrixMarket matrix coordinate real general\n'
                               '2 2 2\n1 1 0.5\n2 2 -3\n')
    assert obsgraph.read_pattern(path).edges == {(1, 1), (2, 2)}


def test_read_pattern_symmetric_header(write_text):
    path = write_text('p.mtx', '%%MatrixMarket matrix coordinate pattern symmetric\n'
                               '3 3 2\n2 1\n3 3\n')
    p = obsgraph.read_pattern(path, symmetric=True)
    assert p.symmetric
    assert p.edges == {(2, 1), (1, 2), (3, 3)}


@pytest.mark.parametrize('text, line_no', [
    ('%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n', 1),
    ('hello\n', 1),
    ('%%MatrixMarket matrix coordinate pattern hermitian\n2 2 0\n', 1),
    ('%%MatrixMarket matrix coordinate pattern general\n2 x 1\n1 1\n', 2),
    ('%%MatrixMarket matrix coordinate pattern general\n% c\n2 2 2\n1 1\n3 1\n', 5),
    ('%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 1\n1\n', 4),
])
def test_read_pattern_reports_line(write_text, text, line_no):
    path = write_text('bad.mtx', text)
    with pytest.raises(module_error.ParseError) as err:
        obsgraph.read_pattern(path)
    assert err.value.line_no == line_no
    assert '%s:%d:' % (path, line_no) in str(err.value)


def test_read_pattern_count_mismatch(write_text):
    path = write_text('short.mtx', '%%MatrixMarket matrix coordinate pattern general\n'
                                   '2 2 3\n1 1\n2 2\n')
    with pytest.raises(module_error.ParseError, match='announces 3 entries, found 2'):
        obsgraph.read_pattern(path)


def test_read_pattern_symmetric_needs_square(write_text):
    path = write_text('rect.mtx', '%%MatrixMarket matrix coordinate pattern general\n'
                                  '2 3 1\n1 1\n')
    with pytest.raises(module_error.ParseError):
        obsgraph.read_pattern(path, symmetric=True)


def test_read_pattern_missing_file(tmp_path):
    with pytest.raises(module_error.McgError, match='missing.mtx'):
        obsgraph.read_pattern(str(tmp_path / 'missing.mtx'))


def test_write_pattern_reads_back(tmp_path):
    p = synth.circulant_pattern(5, [0, 2], symmetric=True)
    target = str(tmp_path / 'c.mtx')
    obsgraph.write_pattern(target, p)
    assert obsgraph.read_pattern(target, symmetric=True) == p
