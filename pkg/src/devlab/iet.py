"""Interval exchange transformations: validation, evaluation, itineraries.

Lengths are always indexed by the permutation's ``alphabet`` (its symbols in
sorted order), which is stable under Rauzy moves.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import RejectNonPositive, RejectReducible

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class LabeledPermutation:
    """Two orderings ``top``/``bottom`` of the same ``d`` symbols."""

    top: tuple
    bottom: tuple

    def __post_init__(self):
        object.__setattr__(self, "top", tuple(self.top))
        object.__setattr__(self, "bottom", tuple(self.bottom))
        if len(self.top) < 2:
            raise ValueError("a permutation needs at least 2 symbols")
        if len(set(self.top)) != len(self.top):
            raise ValueError(f"repeated symbol in top row {self.top!r}")
        if sorted(self.top) != sorted(self.bottom):
            raise ValueError("top and bottom rows must use the same symbols")

    @classmethod
    def parse(cls, text: str) -> "LabeledPermutation":
        """Parse ``"ABCD/DCBA"``: one character per symbol."""
        try:
            top, bottom = text.strip().split("/")
        except ValueError:
            raise ValueError(f"expected TOP/BOTTOM, got {text!r}") from None
        return cls(tuple(top.strip()), tuple(bottom.strip()))

    @property
    def d(self) -> int:
        return len(self.top)

    @cached_property
    def alphabet(self) -> tuple:
        return tuple(sorted(self.top))

    @cached_property
    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.alphabet)}

    @cached_property
    def top_idx(self) -> np.ndarray:
        return np.array([self.index[s] for s in self.top], dtype=np.int64)

    @cached_property
    def bottom_idx(self) -> np.ndarray:
        return np.array([self.index[s] for s in self.bottom], dtype=np.int64)

    def is_irreducible(self) -> bool:
        seen_top, seen_bottom = set(), set()
        for k in range(self.d - 1):
            seen_top.add(self.top[k])
            seen_bottom.add(self.bottom[k])
            if seen_top == seen_bottom:
                return False
        return True

    def __str__(self):
        return "".join(map(str, self.top)) + "/" + "".join(map(str, self.bottom))


@dataclass(frozen=True)
class IntervalExchange:
    perm: LabeledPermutation
    lengths: np.ndarray

    def __post_init__(self):
        lengths = np.array(self.lengths, dtype=float)
        lengths.setflags(write=False)
        object.__setattr__(self, "lengths", lengths)

    @property
    def d(self) -> int:
        return self.perm.d

    @cached_property
    def top_starts(self) -> np.ndarray:
        """Left endpoints of the top subintervals, by top position."""
        return _starts(self.lengths[self.perm.top_idx])

    @cached_property
    def translations(self) -> np.ndarray:
        """Translation applied to each top position."""
        bottom_starts = _starts(self.lengths[self.perm.bottom_idx])
        by_symbol = np.empty(self.d)
        by_symbol[self.perm.bottom_idx] = bottom_starts
        by_symbol[self.perm.top_idx] -= self.top_starts
        return by_symbol[self.perm.top_idx]

    def __repr__(self):
        return f"IntervalExchange({self.perm}, {np.array2string(self.lengths, precision=6)})"


def _starts(lengths) -> np.ndarray:
    # correctly rounded prefix sums, so the last start does not drift with d
    return np.array([math.fsum(lengths[:i]) for i in range(len(lengths))])


@dataclass(frozen=True)
class Itinerary:
    symbols: np.ndarray
    counts: np.ndarray


def new_iet(perm: LabeledPermutation, lengths: Sequence[float]) -> IntervalExchange:
    """Validate and normalize to total length 1."""
    lengths = np.asarray(lengths, dtype=float)
    if lengths.shape != (perm.d,):
        raise ValueError(f"need {perm.d} lengths, got shape {lengths.shape}")
    if not perm.is_irreducible():
        raise RejectReducible(f"permutation {perm} is reducible")
    if not np.all(lengths > 0) or not np.all(np.isfinite(lengths)):
        raise RejectNonPositive(f"lengths must be finite and > 0, got {lengths}")
    return IntervalExchange(perm, lengths / math.fsum(lengths))


def random_lengths(d: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform point of the open simplex (normalized exponential variates)."""
    e = rng.standard_exponential(d)
    return e / math.fsum(e)


def random_iet(perm: LabeledPermutation, rng: np.random.Generator) -> IntervalExchange:
    return new_iet(perm, random_lengths(perm.d, rng))


def apply(iet: IntervalExchange, x: float) -> tuple[float, int]:
    """Image of ``x`` and the (alphabet) index of the subinterval containing it."""
    if not 0.0 <= x < 1.0:
        raise ValueError(f"x={x} outside [0, 1)")
    starts = iet.top_starts
    pos = bisect_right(starts, x) - 1
    if pos > 0 and x - starts[pos] < _kernels.CUT_EPS:
        pos -= 1
    y = x + iet.translations[pos]
    y = min(max(y, 0.0), _kernels.ONE_MINUS)
    return y, int(iet.perm.top_idx[pos])


def orbit(iet: IntervalExchange, x0: float, n: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Orbit points ``x0..T^{n-1}x0``, their symbols, and ``T^n x0``."""
    xs = np.empty(n)
    pos = np.empty(n, dtype=np.int64)
    x = _kernels.iet_orbit(iet.top_starts, iet.translations, float(x0), n, xs, pos)
    return xs, iet.perm.top_idx[pos], x


def itinerary(iet: IntervalExchange, x0: float, n: int) -> Itinerary:
    if n < 1:
        raise ValueError("n must be >= 1")
    _, symbols, _ = orbit(iet, x0, n)
    return Itinerary(symbols, np.bincount(symbols, minlength=iet.d))


def checkpoint_counts(iet: IntervalExchange, x0: float, checkpoints) -> np.ndarray:
    """Symbol visit counts (by alphabet index) of the first ``n`` orbit points, per checkpoint."""
    checkpoints = np.asarray(checkpoints, dtype=np.int64)
    if np.any(np.diff(checkpoints) < 0):
        raise ValueError("checkpoints must be non-decreasing")
    by_pos = np.zeros((len(checkpoints), iet.d), dtype=np.int64)
    _kernels.iet_checkpoint_counts(iet.top_starts, iet.translations, float(x0), checkpoints, by_pos)
    out = np.empty_like(by_pos)
    out[:, iet.perm.top_idx] = by_pos
    return out


def asymptotic_cycle(iet: IntervalExchange) -> np.ndarray:
    """Almost-sure limit of ``counts / n``.

    IETs over irreducible permutations with generic lengths are uniquely
    ergodic, so the limit is Lebesgue measure of each subinterval: the lengths.
    """
    return np.array(iet.lengths)
