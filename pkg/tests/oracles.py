"""Independent reference implementations used as test oracles.

Everything here is written in the most direct way possible (exact integer
combinatorics, straight-line formulas, exhaustive enumeration) with no code
shared with the package under test.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


# -- exact integer combinatorics -------------------------------------------------


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind, exact, by recurrence."""
    if n == 0 and k == 0:
        return 1
    if n == 0 or k == 0:
        return 0
    table = [[0] * (k + 1) for _ in range(n + 1)]
    table[0][0] = 1
    for i in range(1, n + 1):
        for j in range(1, min(i, k) + 1):
            table[i][j] = j * table[i - 1][j] + table[i - 1][j - 1]
    return table[n][k]


def partition_count(n: int, k: int) -> int:
    """Number of partitions of n labeled elements into at most k subsets."""
    return sum(stirling2(n, i) for i in range(1, min(k, n) + 1))


def pascal_binomial(n: int, k: int) -> int:
    """C(n, k) from Pascal's triangle."""
    if k < 0 or k > n:
        raise ValueError("k out of range")
    row = [1]
    for _ in range(n):
        row = [1] + [row[i] + row[i + 1] for i in range(len(row) - 1)] + [1]
    return row[k]


# -- straight-line criterion evaluator --------------------------------------------


def oracle_criterion(sample, s_assign, t_assign) -> float:
    """The model-selection criterion written out term by term, in nats."""
    s_assign = list(int(a) for a in s_assign)
    t_assign = list(int(a) for a in t_assign)
    n_s, n_t = sample.n_source, sample.n_target
    m = sample.m
    k_s = max(s_assign) + 1
    k_t = max(t_assign) + 1
    k_e = k_s * k_t

    grid = [[0] * k_t for _ in range(k_s)]
    for (i, j), c in sample.edges.items():
        grid[s_assign[i]][t_assign[j]] += c
    s_sizes = [s_assign.count(c) for c in range(k_s)]
    t_sizes = [t_assign.count(c) for c in range(k_t)]
    s_margin = [sum(grid[a]) for a in range(k_s)]
    t_margin = [sum(grid[a][b] for a in range(k_s)) for b in range(k_t)]

    total = math.log(n_s) + math.log(n_t)
    total += math.log(partition_count(n_s, k_s)) + math.log(partition_count(n_t, k_t))
    total += math.log(math.comb(m + k_e - 1, k_e - 1))
    for a in range(k_s):
        total += math.log(math.comb(s_margin[a] + s_sizes[a] - 1, s_sizes[a] - 1))
    for b in range(k_t):
        total += math.log(math.comb(t_margin[b] + t_sizes[b] - 1, t_sizes[b] - 1))
    total += math.lgamma(m + 1)
    for a in range(k_s):
        for b in range(k_t):
            total -= math.lgamma(grid[a][b] + 1)
    for a in range(k_s):
        total += math.lgamma(s_margin[a] + 1)
    for d in sample.out_degrees:
        total -= math.lgamma(int(d) + 1)
    for b in range(k_t):
        total += math.lgamma(t_margin[b] + 1)
    for d in sample.in_degrees:
        total -= math.lgamma(int(d) + 1)
    return total


# -- exhaustive search ---------------------------------------------------------------


def all_partitions(n: int):
    """Every partition of range(n) as an assignment list, via restricted
    growth strings (cluster ids appear in first-use order)."""
    assign = [0] * n

    def rec(i, kmax):
        if i == n:
            yield list(assign)
            return
        for c in range(kmax + 1):
            assign[i] = c
            yield from rec(i + 1, max(kmax, c + 1))

    yield from rec(0, 0)


def brute_force_map(sample):
    """Enumerate every partition pair; return (best criterion, best pair)."""
    best = math.inf
    best_pair = None
    for s_assign in all_partitions(sample.n_source):
        for t_assign in all_partitions(sample.n_target):
            c = oracle_criterion(sample, s_assign, t_assign)
            if c < best:
                best = c
                best_pair = (s_assign, t_assign)
    return best, best_pair


def multinomial_orderings(counts) -> int:
    """Number of distinct orderings of a multiset, counted by enumeration."""
    seq = []
    for idx, c in enumerate(counts):
        seq.extend([idx] * c)
    return len(set(itertools.permutations(seq)))


def random_sample(rng, n_s_max=5, n_t_max=5, m_max=8):
    """Small random multigraph sample for property tests."""
    from modlcc.graph import MultigraphSample

    n_s = int(rng.integers(1, n_s_max + 1))
    n_t = int(rng.integers(1, n_t_max + 1))
    m = int(rng.integers(1, m_max + 1))
    edges = {}
    for _ in range(m):
        key = (int(rng.integers(0, n_s)), int(rng.integers(0, n_t)))
        edges[key] = edges.get(key, 0) + 1
    labels_s = [f"s{i}" for i in range(n_s)]
    labels_t = [f"t{j}" for j in range(n_t)]
    return MultigraphSample(labels_s, labels_t, edges)


def random_assignment(rng, n: int):
    """Random contiguous cluster assignment of n vertices."""
    k = int(rng.integers(1, n + 1))
    assign = rng.integers(0, k, size=n)
    used = np.unique(assign)
    remap = np.zeros(k, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return remap[assign]
