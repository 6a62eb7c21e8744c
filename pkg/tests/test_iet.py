from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from devlab.errors import RejectNonPositive, RejectReducible
from devlab.iet import (LabeledPermutation, apply, asymptotic_cycle, checkpoint_counts, itinerary,
                        new_iet, orbit, random_iet)


def test_two_symbol_iet_is_a_rotation(rotation_perm):
    iet = new_iet(rotation_perm, [0.7, 0.3])
    assert iet.lengths.tolist() == [0.7, 0.3]
    assert iet.translations.tolist() == pytest.approx([0.3, -0.7])


def test_identity_permutation_is_reducible():
    with pytest.raises(RejectReducible):
        new_iet(LabeledPermutation(("A", "B"), ("A", "B")), [0.5, 0.5])


def test_reversal_is_irreducible(h2_perm):
    iet = new_iet(h2_perm, [0.1, 0.2, 0.3, 0.4])
    assert iet.d == 4


@pytest.mark.parametrize("lengths", [[0.5, 0.0], [0.5, -0.1], [1.0, np.nan]])
def test_nonpositive_lengths_rejected(rotation_perm, lengths):
    with pytest.raises(RejectNonPositive):
        new_iet(rotation_perm, lengths)


def test_lengths_are_normalized(h2_perm):
    iet = new_iet(h2_perm, [1, 2, 3, 4])
    assert abs(iet.lengths.sum() - 1) < 1e-12
    assert iet.lengths.tolist() == pytest.approx([0.1, 0.2, 0.3, 0.4])


@pytest.mark.parametrize("text,ok", [("ABC/CBA", True), ("ABC/ACB", False), ("ABC/BCA", True),
                                     ("ABCD/BADC", False), ("ABCD/DBCA", True)])
def test_irreducibility(text, ok):
    assert LabeledPermutation.parse(text).is_irreducible() is ok


def test_rotation_apply(rotation_perm):
    iet = new_iet(rotation_perm, [0.7, 0.3])
    x, s = apply(iet, 0.1)
    assert (x, s) == (pytest.approx(0.4), 0)
    x, s = apply(iet, 0.8)
    assert (x, s) == (pytest.approx(0.1), 1)


def test_reversal_apply_at_zero(h2_perm):
    # A sits first on top and last on bottom: offset 0 -> 0.75
    iet = new_iet(h2_perm, [0.25] * 4)
    assert apply(iet, 0.0) == (0.75, 0)


def test_cut_point_goes_left(rotation_perm):
    iet = new_iet(rotation_perm, [0.7, 0.3])
    cut = iet.top_starts[1]
    assert apply(iet, cut)[1] == 0
    assert apply(iet, cut + 1e-12)[1] == 1


def test_apply_rejects_out_of_range(rotation_perm):
    iet = new_iet(rotation_perm, [0.7, 0.3])
    with pytest.raises(ValueError):
        apply(iet, 1.0)


def test_rotation_itinerary_ten_steps(rotation_perm):
    iet = new_iet(rotation_perm, [0.7, 0.3])
    # exact oracle; x0 = 0.05 keeps the orbit off the cut at 0.7
    x0 = Fraction(1, 20)
    expected_b = sum(1 for k in range(10) if (x0 + Fraction(3, 10) * k) % 1 >= Fraction(7, 10))
    it = itinerary(iet, 0.05, 10)
    assert it.counts.tolist() == [10 - expected_b, expected_b]
    # from 0 the ninth iterate lands on the cut itself, which the tie rule sends left
    counts = itinerary(iet, 0.0, 10).counts
    assert counts.sum() == 10 and counts[1] in (2, 3)


def test_single_step_itinerary_is_a_basis_vector(h2_perm, rng):
    iet = random_iet(h2_perm, rng)
    c = itinerary(iet, float(rng.random()), 1).counts
    assert sorted(c.tolist()) == [0, 0, 0, 1]


def test_kernel_orbit_matches_reference_apply(h2_perm, rng):
    iet = random_iet(h2_perm, rng)
    xs, syms, last = orbit(iet, 0.123, 1000)
    x = 0.123
    for k in range(1000):
        assert xs[k] == x
        x, s = apply(iet, x)
        assert syms[k] == s
    assert last == x


def test_asymptotic_cycle_is_lengths(rotation_perm, h2_perm):
    assert asymptotic_cycle(new_iet(rotation_perm, [0.7, 0.3])).tolist() == [0.7, 0.3]
    assert asymptotic_cycle(new_iet(h2_perm, [0.1, 0.2, 0.3, 0.4])).tolist() == pytest.approx(
        [0.1, 0.2, 0.3, 0.4])


def test_frequencies_converge(h2_perm):
    n = 10 ** 6
    rng = np.random.default_rng(7)
    for _ in range(10):
        iet = random_iet(h2_perm, rng)
        counts = itinerary(iet, float(rng.random()), n).counts
        assert np.max(np.abs(counts / n - asymptotic_cycle(iet))) < 5 / np.sqrt(n)


def test_checkpoint_counts_agree_with_itinerary(h2_perm, rng):
    iet = random_iet(h2_perm, rng)
    ck = [0, 1, 5, 100, 1000]
    counts = checkpoint_counts(iet, 0.3, ck)
    for row, n in zip(counts, ck):
        expected = itinerary(iet, 0.3, n).counts if n else np.zeros(4)
        assert row.tolist() == list(expected)


perm_strategy = st.sampled_from(["AB/BA", "ABC/CBA", "ABCD/DCBA", "ABCD/DBCA", "ABCDE/EDCBA"])


@settings(max_examples=25, deadline=None)
@given(text=perm_strategy, seed=st.integers(0, 2 ** 32))
def test_bijective_off_cuts(text, seed):
    rng = np.random.default_rng(seed)
    iet = random_iet(LabeledPermutation.parse(text), rng)
    xs = rng.random(10 ** 4)
    images = np.array([apply(iet, float(x))[0] for x in xs])
    assert len(np.unique(images)) == len(np.unique(xs))


@settings(max_examples=25, deadline=None)
@given(text=perm_strategy, seed=st.integers(0, 2 ** 32))
def test_measure_preservation_on_grid(text, seed):
    iet = random_iet(LabeledPermutation.parse(text), np.random.default_rng(seed))
    n = 10 ** 4
    grid = (np.arange(n) + 0.5) / n
    images = np.sort([apply(iet, float(x))[0] for x in grid])
    assert np.max(np.abs(images - grid)) <= iet.d / n


@settings(max_examples=25, deadline=None)
@given(text=perm_strategy, seed=st.integers(0, 2 ** 32), n=st.integers(1, 5000))
def test_itinerary_counts_sum_to_n(text, seed, n):
    rng = np.random.default_rng(seed)
    iet = random_iet(LabeledPermutation.parse(text), rng)
    it = itinerary(iet, float(rng.random()), n)
    assert it.counts.sum() == n == len(it.symbols)
    assert it.counts.min() >= 0
