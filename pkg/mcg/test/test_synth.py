""" Ground truths, noise, synthetic patterns, the bin search and saved
instances. """

import json
import math
import os

import numpy as np
import pytest

from mcg import module_error
from mcg import obsgraph
from mcg import solver
from mcg import synth


def test_random_low_rank_scalar():
    M, f = synth.random_low_rank(1, 1, 1, seed=11)
    assert M.shape == (1, 1)
    assert f.mu0 == pytest.approx(1.0)
    M, f = synth.random_low_rank(1, 1, 1, symmetric=True, seed=11)
    assert M[0, 0] > 0.0
    assert f.mu0 == pytest.approx(1.0)


def test_random_low_rank_symmetric_is_psd():
    M, f = synth.random_low_rank(15, 15, 3, symmetric=True, seed=2)
    assert np.array_equal(M, M.T)
    assert np.linalg.eigvalsh(M).min() > -1e-10
    assert np.linalg.matrix_rank(M) == 3
    assert f.symmetric
    assert f.matrix() == pytest.approx(M, abs=1e-10)


def test_random_low_rank_rectangular():
    M, f = synth.random_low_rank(9, 6, 2, seed=2)
    assert M.shape == (9, 6)
    assert np.linalg.matrix_rank(M) == 2
    assert f.matrix() == pytest.approx(M, abs=1e-10)
    assert np.all(np.diff(f.sigma) <= 0)


def test_random_low_rank_is_deterministic():
    first, _ = synth.random_low_rank(7, 5, 2, seed=99)
    second, _ = synth.random_low_rank(7, 5, 2, seed=99)
    third, _ = synth.random_low_rank(7, 5, 2, seed=100)
    assert np.array_equal(first, second)
    assert not np.array_equal(first, third)


def test_random_low_rank_rejects():
    with pytest.raises(module_error.DomainError):
        synth.random_low_rank(4, 5, 1, symmetric=True)
    with pytest.raises(module_error.FactorizationError):
        synth.random_low_rank(4, 5, 6)


def test_add_noise():
    M = np.arange(6.0).reshape(2, 3)
    assert np.array_equal(synth.add_noise(M, 0.0, seed=1), M)
    noisy = synth.add_noise(M, 0.1, seed=1)
    assert np.array_equal(noisy, synth.add_noise(M, 0.1, seed=1))
    assert not np.array_equal(noisy, M)
    # the noise direction does not depend on sigma
    assert (synth.add_noise(M, 0.2, seed=1) - M) == pytest.approx(2.0 * (noisy - M))
    with pytest.raises(module_error.DomainError):
        synth.add_noise(M, -1.0)


def test_sbm_extremes():
    p = synth.sbm_pattern(synth.SbmSpec(6, 5, 1.0, 1.0, seed=3))
    assert p.count == 30
    p = synth.sbm_pattern(synth.SbmSpec(6, 6, 1.0, 1.0, symmetric=True, seed=3))
    assert p.count == 36
    p = synth.sbm_pattern(synth.SbmSpec(6, 6, 1.0, 0.0, symmetric=True, seed=3))
    assert p.edges == {(i, j) for i in range(1, 7) for j in range(1, 7)
                       if (i <= 3) == (j <= 3)}
    assert obsgraph.graph_profile(p).phi == 0.0


def test_sbm_blocks_put_the_extra_node_first():
    assert synth.block_labels(5).tolist() == [0, 0, 0, 1, 1]
    P = synth.SbmSpec(5, 4, 0.7, 0.2).probability_matrix()
    assert P[:3, :2] == pytest.approx(np.full((3, 2), 0.7))
    assert P[3:, 2:] == pytest.approx(np.full((2, 2), 0.7))
    assert P[:3, 2:] == pytest.approx(np.full((3, 2), 0.2))


def test_sbm_with_equal_probabilities_is_uniform():
    table = synth.SbmSpec(10, 10, 0.3, 0.3).block_probabilities()
    assert set(table.values()) == {0.3}


def test_sbm_density_concentrates():
    n = 500
    p = synth.sbm_pattern(synth.SbmSpec(n, n, 0.5, 0.5, seed=17))
    sd = math.sqrt(0.25 / (n * n))
    assert abs(p.count / float(n * n) - 0.5) <= 3 * sd


def test_sbm_is_deterministic():
    spec = synth.SbmSpec(30, 20, 0.4, 0.1, seed=5)
    assert synth.sbm_pattern(spec) == synth.sbm_pattern(spec)


def test_sbm_spec_rejects():
    with pytest.raises(module_error.DomainError):
        synth.SbmSpec(4, 4, 1.5, 0.1)
    with pytest.raises(module_error.DomainError):
        synth.SbmSpec(4, 5, 0.5, 0.1, symmetric=True)


def test_er_extremes():
    assert synth.er_pattern(4, 6, 0.0, seed=1).count == 0
    assert synth.er_pattern(4, 6, 1.0, seed=1).count == 24
    p = synth.er_pattern(8, 8, 0.5, symmetric=True, seed=1)
    assert p.symmetric
    assert all((j, i) in p.edges for i, j in p.edges)


def test_circulant_is_regular():
    p = synth.circulant_pattern(7, [0, 2, 9])
    left, right = obsgraph.degrees(p)
    assert set(left.tolist()) == {2}
    assert set(right.tolist()) == {2}
    p = synth.circulant_pattern(7, [1], symmetric=True)
    assert p.edges == {(i, (i % 7) + 1) for i in range(1, 8)} | {((i % 7) + 1, i) for i in range(1, 8)}


def test_sbm_grid():
    grid = synth.sbm_grid(0.4)
    assert [p for p, _ in grid] == pytest.approx([0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35])
    assert all(p + q == pytest.approx(0.4) for p, q in grid)
    assert all(0.0 <= q <= 1.0 for _, q in synth.sbm_grid(1.8))


def test_pattern_search_complete_pattern():
    match = synth.pattern_search((0.0, 1e-6), 6, 6, [(1.0, 1.0)], attempts=1, seed=1)
    assert match is not None
    assert match.pattern.count == 36
    assert match.quantity == pytest.approx(0.0)


def test_pattern_search_exhaustion():
    assert synth.pattern_search((1e6, 2e6), 6, 6, [(0.5, 0.5)], attempts=2, seed=1) is None
    with pytest.raises(module_error.DomainError):
        synth.pattern_search((2.0, 1.0), 6, 6, [(0.5, 0.5)])


def test_pattern_search_lands_in_bin():
    lo, hi = 5.0, 80.0
    match = synth.pattern_search((lo, hi), 40, 40, synth.sbm_grid(0.6), attempts=5,
                                 symmetric=True, seed=9)
    assert match is not None
    again = obsgraph.theorem_quantity(obsgraph.graph_profile(match.pattern))
    assert lo <= again < hi
    assert match.p + match.q == pytest.approx(0.6)


@pytest.mark.slow
def test_pattern_search_lands_in_bin_at_full_scale():
    match = synth.pattern_search((50.0, 150.0), 500, 500, synth.sbm_grid(0.6), symmetric=True, seed=9)
    assert match is not None
    assert 50.0 <= obsgraph.theorem_quantity(obsgraph.graph_profile(match.pattern)) < 150.0


def test_trial_instance_shares_truth_across_noise_levels():
    p = synth.er_pattern(10, 8, 0.6, seed=4)
    quiet = synth.trial_instance(p, 2, 0.0, seed=21)
    loud = synth.trial_instance(p, 2, 0.5, seed=21)
    assert np.array_equal(quiet.ground_truth, loud.ground_truth)
    assert np.array_equal(quiet.noisy_observation, solver.project_omega(quiet.ground_truth, p))
    assert np.array_equal(loud.noisy_observation[~p.mask()], np.zeros(80 - p.count))


def test_save_and_load_instance(tmp_path):
    p = synth.er_pattern(6, 6, 0.7, symmetric=True, seed=4)
    inst = synth.trial_instance(p, 2, 0.01, seed=3)
    directory = str(tmp_path / 'instance')
    synth.save_instance(directory, inst, obsgraph.graph_profile(p))
    assert sorted(os.listdir(directory)) == ['meta.json', 'observed.csv', 'pattern.mtx', 'truth.csv']
    with open(os.path.join(directory, 'meta.json'), encoding='utf-8') as hfile:
        meta = json.load(hfile)
    assert meta['rank'] == 2
    assert meta['symmetric'] is True
    assert set(meta['profile']) == set(obsgraph.PROFILE_HEADER)
    loaded = synth.load_instance(directory)
    assert loaded.pattern == p
    assert loaded.ground_truth == pytest.approx(inst.ground_truth, abs=1e-15)
    assert loaded.noisy_observation == pytest.approx(inst.noisy_observation, abs=1e-15)
    assert loaded.factorization.mu0 == pytest.approx(inst.factorization.mu0, rel=1e-6)
