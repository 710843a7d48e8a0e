"""Shared helpers: seeded random stencils and independent brute-force oracles.

The oracles here deliberately avoid the package's search code so they can
serve as ground truth: visible rank is recomputed by enumerating every square
sub-stencil and counting its star diagonals via the permanent.
"""

from itertools import combinations, permutations

import numpy as np
import pytest

from vrank.stencil import Stencil, count_star_diagonals, substencil


def random_stencil(rng: np.random.Generator, m: int, n: int, density: float = 0.5) -> Stencil:
    grid = rng.random((m, n)) < density
    return Stencil.from_entries(grid.tolist())


def rng_for(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def brute_vrank(H: Stencil) -> int:
    """Max over all square sub-stencils with exactly one star diagonal."""
    best = 0
    top = min(H.m, H.n)
    for k in range(top, 0, -1):
        if k <= best:
            break
        found = False
        for rows in combinations(range(1, H.m + 1), k):
            for cols in combinations(range(1, H.n + 1), k):
                if count_star_diagonals(substencil(H, rows, cols)) == 1:
                    found = True
                    break
            if found:
                break
        if found:
            return k
    return best


def permanent_by_permutations(M: Stencil) -> int:
    """Star-diagonal count by direct permutation enumeration (side <= 7)."""
    assert M.m == M.n <= 7
    total = 0
    for perm in permutations(range(1, M.n + 1)):
        if all(M.star(i + 1, perm[i]) for i in range(M.n)):
            total += 1
    return total


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
