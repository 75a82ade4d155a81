"""Independent brute-force references used as oracles by the test suite.

Everything here is deliberately written against the process definition with
plain dict/itertools code, sharing nothing with the package's packed-integer
kernels, so the two routes check each other.
"""

import itertools

import numpy as np

A, B, V = 0, 1, 2


def ring_states(length, n_a=None, n_b=None):
    """All configurations (optionally with fixed counts), ascending packed."""
    out = []
    for c in itertools.product((A, B, V), repeat=length):
        if n_a is not None and c.count(A) != n_a:
            continue
        if n_b is not None and c.count(B) != n_b:
            continue
        out.append(c)
    out.sort()  # lexicographic = ascending big-endian packed order
    return out


def moves(config):
    """(target, rate) pairs for unit right rate, zero left rate."""
    length = len(config)
    out = []
    for j in range(length):
        jn = (j + 1) % length
        g, d = config[j], config[jn]
        if g < d:
            t = list(config)
            t[j], t[jn] = d, g
            out.append((tuple(t), 1.0))
    return out


def moves_general(config, gamma_r, gamma_l):
    length = len(config)
    out = []
    for j in range(length):
        jn = (j + 1) % length
        g, d = config[j], config[jn]
        if g == d:
            continue
        rate = gamma_r if g < d else gamma_l
        if rate:
            t = list(config)
            t[j], t[jn] = d, g
            out.append((tuple(t), rate))
    return out


def generator_matrix(states, move_fn):
    """Dense column-convention generator over an explicit state list."""
    index = {c: i for i, c in enumerate(states)}
    mat = np.zeros((len(states), len(states)))
    for c, i in index.items():
        for target, rate in move_fn(c):
            mat[i, i] += rate
            mat[index[target], i] -= rate
    return mat


def sector_matrix(length, n_a, n_b):
    return generator_matrix(ring_states(length, n_a, n_b), moves)


def sector_matrix_general(length, n_a, n_b, gamma_r, gamma_l):
    return generator_matrix(
        ring_states(length, n_a, n_b),
        lambda c: moves_general(c, gamma_r, gamma_l),
    )
