"""Shared oracles for design validity checks.

These are deliberately brute-force (explicit counting) so they stay
independent of the construction code they verify.
"""
from collections import Counter
from itertools import combinations

import numpy as np
import pytest


def count_pair_frequencies(cells, col_a, col_b):
    """Counter of ordered symbol pairs appearing in two columns."""
    return Counter(zip(cells[:, col_a].tolist(), cells[:, col_b].tolist()))


def assert_strength_two(cells, n_symbols):
    """Every ordered symbol pair occurs equally often in every column pair."""
    n_rows = cells.shape[0]
    expected = n_rows // (n_symbols * n_symbols)
    assert expected * n_symbols * n_symbols == n_rows
    symbols = sorted(set(cells.ravel().tolist()))
    assert len(symbols) == n_symbols
    for a, b in combinations(range(cells.shape[1]), 2):
        freq = count_pair_frequencies(cells, a, b)
        for s in symbols:
            for t in symbols:
                assert freq[(s, t)] == expected, (
                    f"pair ({s},{t}) in columns ({a},{b}): "
                    f"{freq[(s, t)]} != {expected}"
                )


def assert_latin(cells):
    """Exactly one point per [i/N, (i+1)/N) bin in every column."""
    n = cells.shape[0]
    for j in range(cells.shape[1]):
        bins = np.clip(np.floor(cells[:, j] * n).astype(int), 0, n - 1)
        counts = np.bincount(bins, minlength=n)
        assert (counts == 1).all(), f"column {j} bin counts: {counts}"


@pytest.fixture
def strength_two_oracle():
    return assert_strength_two


@pytest.fixture
def latin_oracle():
    return assert_latin
