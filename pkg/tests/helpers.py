"""Brute-force oracles shared by the unit and acceptance tests."""
from fractions import Fraction

import numpy as np

from devlab.iet import itinerary, orbit, random_iet
from devlab.rauzy import omega_matrix, rauzy_step, zorich_step


def exact_rank(matrix) -> int:
    """Rank over the rationals by fraction-exact Gaussian elimination."""
    rows = [[Fraction(int(v)) for v in row] for row in np.asarray(matrix)]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def int_det(matrix) -> int:
    """Exact determinant by fraction elimination."""
    m = [[Fraction(int(v)) for v in row] for row in np.asarray(matrix)]
    n, det = len(m), Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return int(det)


def check_step_invariants(before, after, step):
    """Determinant 1, nonnegativity, and the symplectic identity, integer-exact."""
    A = step.matrix
    assert A.dtype == np.int64
    assert A.min() >= 0
    assert int_det(A) == 1
    lhs = A.T @ omega_matrix(before.perm) @ A
    assert np.array_equal(lhs, omega_matrix(after.perm))


def matched_counts(iet, n, rng):
    """Counts before/after one Zorich step for a random point, by orbit matching.

    Returns ``(counts_before, counts_after, matrix)`` where ``counts_after``
    is the itinerary of the induced map for ``n`` steps and ``counts_before``
    the itinerary of the original map until the same point has come back to
    the induced interval ``n`` times.
    """
    new, step = zorich_step(iet)
    shrink = float(np.exp(-step.log_scale))  # length of the induced interval
    x_new = float(rng.random())
    counts_after = itinerary(new, x_new, n).counts
    x_old = x_new * shrink
    # generous horizon: returns take at most (column sum) steps each
    horizon = int(n * step.matrix.sum(axis=0).max()) + 2
    xs, syms, _ = orbit(iet, x_old, horizon)
    returns = np.flatnonzero(xs < shrink)
    end = returns[n]
    counts_before = np.bincount(syms[:end], minlength=iet.d)
    return counts_before, counts_after, step.matrix
