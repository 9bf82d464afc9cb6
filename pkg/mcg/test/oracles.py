""" Brute-force reference implementations, written straight from the
definitions with python loops and numpy's dense eigensolver, to check the
vectorized code against. """

import itertools
import math

import numpy as np

from mcg import obsgraph


def random_pattern(rng, n1, n2, symmetric=False, density=None):
    density = rng.uniform(0.15, 0.9) if density is None else density
    mask = rng.random((n1, n2)) < density
    if symmetric:
        mask = np.triu(mask)
    return obsgraph.pattern_from_mask(mask, symmetric)


def brute_degrees(edges, n1, n2):
    left = [sum(1 for (i, _) in edges if i == a) for a in range(1, n1 + 1)]
    right = [sum(1 for (_, j) in edges if j == b) for b in range(1, n2 + 1)]
    return left, right


def brute_xi(own, n_other):
    mean = sum(own) / float(len(own))
    return math.sqrt(sum((d - mean) ** 2 for d in own) / n_other)


def brute_laplacian(edges, n1, n2, symmetric):
    if symmetric:
        L = np.zeros((n1, n1))
        for i, j in edges:
            if i != j:
                L[i - 1, j - 1] -= 1.0
                L[i - 1, i - 1] += 1.0
        return L
    L = np.zeros((n1 + n2, n1 + n2))
    for i, j in edges:
        a, b = i - 1, n1 + j - 1
        L[a, b] -= 1.0
        L[b, a] -= 1.0
        L[a, a] += 1.0
        L[b, b] += 1.0
    return L


def brute_phi(L):
    if L.shape[0] < 2:
        return 0.0
    return float(np.sort(np.linalg.eigvalsh(L))[1])


def _side(edges, n1, n2, symmetric):
    left, right = brute_degrees(edges, n1, n2)
    if symmetric:
        delta_max = float(max(left))
    else:
        delta_max = (max(left) + max(right)) / 2.0
    return left, right, delta_max, brute_phi(brute_laplacian(edges, n1, n2, symmetric))


def brute_profile(p):
    n1, n2 = p.n1, p.n2
    edges = set(p.edges)
    universe = set(itertools.product(range(1, n1 + 1), range(1, n2 + 1)))
    left, right, delta_max, phi = _side(edges, n1, n2, p.symmetric)
    _, _, delta_max_c, phi_c = _side(universe - edges, n1, n2, p.symmetric)
    return dict(
        xi1=brute_xi(left, n2), xi2=brute_xi(right, n1),
        delta_max=delta_max, phi=phi, delta_max_c=delta_max_c, phi_c=phi_c,
        psi=max(delta_max - phi, delta_max_c - phi_c, 0.0))


def brute_theta(U, V, p):
    """ Enumerates every admissible row subset of U and of V. """
    scale = p.n1 * p.n2 / float(p.count)
    left, right = brute_degrees(p.edges, p.n1, p.n2)
    r = U.shape[1]
    best = 0.0
    for factor, sizes in ((U, range(min(right), max(right) + 1)),
                          (V, range(min(left), max(left) + 1))):
        for k in sizes:
            for subset in itertools.combinations(range(factor.shape[0]), k):
                total = np.zeros((r, r))
                for i in subset:
                    total += np.outer(factor[i], factor[i])
                best = max(best, float(np.linalg.norm(scale * total - np.eye(r), ord=2)))
    return best


def random_orthonormal(rng, n, r):
    Q, _ = np.linalg.qr(rng.standard_normal((n, r)))
    return Q
