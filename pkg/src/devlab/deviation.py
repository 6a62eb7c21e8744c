"""Power-law deviations of ergodic sums along IET orbits."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate, stats

from . import iet as _iet
from .errors import ConfigError, DegenerateSeries, NonZeroMean
from .iet import IntervalExchange
from .report import FAIL, INFO, PASS, ExperimentReport

SCHEDULE_RATIO = 1.25
MIN_FIT_POINTS = 8
MEAN_TOL = 1e-10
CHUNK = 1 << 20


def geometric_schedule(t_max: int, ratio: float = SCHEDULE_RATIO) -> np.ndarray:
    """Checkpoints ``floor(ratio**j) <= t_max``, deduplicated."""
    if ratio <= 1:
        raise ValueError("schedule ratio must exceed 1")
    n = int(math.floor(math.log(t_max) / math.log(ratio))) + 2
    ts = np.floor(ratio ** np.arange(n)).astype(np.int64)
    return np.unique(ts[ts <= t_max])


@dataclass(frozen=True)
class DeviationSeries:
    T: np.ndarray
    values: np.ndarray
    kind: str = "observable"

    def __post_init__(self):
        T = np.asarray(self.T, dtype=np.int64)
        if np.any(np.diff(T) <= 0):
            raise ValueError("checkpoints must be strictly increasing")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    @property
    def running_max(self) -> np.ndarray:
        return np.maximum.accumulate(self.values)

    def scaled(self, c: float) -> "DeviationSeries":
        return DeviationSeries(self.T, c * self.values, self.kind)


@dataclass(frozen=True)
class DeviationFit:
    slope: float
    intercept: float
    r2: float
    window: tuple


@dataclass(frozen=True)
class Observable:
    """Function on [0, 1).

    kinds: ``trigonometric`` (cos(2 pi m x)), ``piecewise-linear`` (linear
    interpolation through ``knots``/``values``), ``indicator-minus-mean``
    (1 on ``[a, b)`` minus ``b - a``; ``symbol`` set when [a, b) is an IET
    subinterval, enabling the exact integer path).
    """

    kind: str
    m: int = 1
    knots: tuple = ()
    values: tuple = ()
    interval: tuple = (0.0, 0.5)
    symbol: int | None = None

    @classmethod
    def trigonometric(cls, m: int = 1) -> "Observable":
        if m < 1:
            raise ValueError("frequency must be >= 1")
        return cls("trigonometric", m=m)

    @classmethod
    def piecewise_linear(cls, knots, values) -> "Observable":
        knots, values = tuple(map(float, knots)), tuple(map(float, values))
        if len(knots) != len(values) or len(knots) < 2 or knots[0] != 0.0 or knots[-1] != 1.0:
            raise ValueError("knots must run from 0 to 1 and match values")
        if any(b <= a for a, b in zip(knots, knots[1:])):
            raise ValueError("knots must be strictly increasing")
        return cls("piecewise-linear", knots=knots, values=values)

    @classmethod
    def constant(cls, c: float = 1.0) -> "Observable":
        return cls.piecewise_linear((0.0, 1.0), (c, c))

    @classmethod
    def indicator(cls, a: float, b: float) -> "Observable":
        if not 0 <= a < b <= 1:
            raise ValueError("need 0 <= a < b <= 1")
        return cls("indicator-minus-mean", interval=(float(a), float(b)))

    @classmethod
    def indicator_of(cls, iet: IntervalExchange, symbol) -> "Observable":
        """Indicator of the subinterval labelled ``symbol`` minus its length."""
        perm = iet.perm
        idx = perm.index[symbol] if symbol in perm.index else int(symbol)
        pos = int(np.flatnonzero(perm.top_idx == idx)[0])
        a = float(iet.top_starts[pos])
        return cls("indicator-minus-mean", interval=(a, a + float(iet.lengths[idx])), symbol=idx)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "trigonometric":
            return np.cos(2 * np.pi * self.m * x)
        if self.kind == "piecewise-linear":
            return np.interp(x, self.knots, self.values)
        if self.kind == "indicator-minus-mean":
            a, b = self.interval
            return ((x >= a) & (x < b)).astype(float) - (b - a)
        raise ValueError(f"unknown observable kind {self.kind!r}")

    @property
    def mean(self) -> float:
        """Exact mean."""
        if self.kind in ("trigonometric", "indicator-minus-mean"):
            return 0.0
        k, v = np.array(self.knots), np.array(self.values)
        return float(np.sum(np.diff(k) * (v[1:] + v[:-1]) / 2))

    def quadrature_mean(self) -> float:
        """Mean by adaptive quadrature, independent of :attr:`mean`."""
        if self.kind == "indicator-minus-mean":
            points = self.interval
        elif self.kind == "piecewise-linear":
            points = self.knots[1:-1]
        else:
            points = None
        val, _ = integrate.quad(lambda x: float(self(x)), 0.0, 1.0,
                                points=points or None, limit=200, epsabs=1e-13, epsrel=1e-13)
        return val

    @property
    def variation(self) -> float:
        """Total variation on the circle (the wrap from 1 back to 0 included)."""
        if self.kind == "trigonometric":
            return 4.0 * self.m
        if self.kind == "indicator-minus-mean":
            a, b = self.interval
            return 0.0 if (a == 0 and b == 1) else 2.0
        v = np.array(self.values)
        return float(np.sum(np.abs(np.diff(v))) + abs(v[0] - v[-1]))


def _schedule(T_max, schedule):
    if schedule is None:
        return geometric_schedule(T_max)
    return np.asarray(schedule, dtype=np.int64)


def homology_deviation(iet: IntervalExchange, x0: float, T_max: int,
                       schedule: Sequence[int] | None = None) -> DeviationSeries:
    """Euclidean norm of ``counts(n) - n * asymptotic_cycle`` at each checkpoint."""
    T = _schedule(T_max, schedule)
    counts = _iet.checkpoint_counts(iet, x0, T)
    dev = counts - T[:, None] * _iet.asymptotic_cycle(iet)[None, :]
    return DeviationSeries(T, np.linalg.norm(dev, axis=1), "homology")


def observable_sum(iet: IntervalExchange, f: Observable, x0: float, T_max: int,
                   schedule: Sequence[int] | None = None, deviation: bool = True) -> DeviationSeries:
    """``|sum_{k<T} f(T^k x0)|`` at each checkpoint ``T``.

    With ``deviation`` set the observable must have mean zero.
    """
    if deviation and abs(f.quadrature_mean()) > MEAN_TOL:
        raise NonZeroMean(f"observable mean {f.quadrature_mean():.3g} is not zero")
    T = _schedule(T_max, schedule)
    if f.symbol is not None:
        counts = _iet.checkpoint_counts(iet, x0, T)[:, f.symbol]
        return DeviationSeries(T, np.abs(counts - T * iet.lengths[f.symbol]), "observable")
    out = np.zeros(len(T))
    total, done, x = 0.0, 0, float(x0)
    j = np.searchsorted(T, 0, side="right")  # T == 0 checkpoints stay 0
    end = int(T[-1]) if len(T) else 0
    while done < end:
        n = min(CHUNK, end - done)
        xs, _, x = _iet.orbit(iet, x, n)
        partial = total + np.cumsum(f(xs))
        hi = np.searchsorted(T, done + n, side="right")
        out[j:hi] = np.abs(partial[T[j:hi] - done - 1])
        j = hi
        total = float(partial[-1])
        done += n
    return DeviationSeries(T, out, "observable")


def fit_exponent(series: DeviationSeries, T_min: float | None = None) -> DeviationFit:
    """Least-squares slope of log(running max) against log T over ``T >= T_min``.

    ``T_min`` defaults to the cube root of the last checkpoint.
    """
    if np.all(series.values < 1e-12):
        raise DegenerateSeries("all deviation values vanish")
    T = series.T
    if T_min is None:
        T_min = float(T[-1]) ** (1 / 3)
    runmax = series.running_max
    sel = np.flatnonzero((T >= T_min) & (T > 0))
    if len(sel) < MIN_FIT_POINTS:
        raise ValueError(f"need {MIN_FIT_POINTS} checkpoints with T >= {T_min:.3g}, have {len(sel)}")
    sel = sel[runmax[sel] >= 1e-12]
    if len(sel) < 2:
        raise DegenerateSeries("deviation values vanish inside the fit window")
    res = stats.linregress(np.log(T[sel]), np.log(runmax[sel]))
    return DeviationFit(float(res.slope), float(res.intercept), float(res.rvalue ** 2),
                        (int(sel[0]), int(sel[-1]) + 1))


def median_with_error(slopes) -> tuple[float, float]:
    """Median of trial slopes and its normal-theory standard error."""
    slopes = np.asarray(slopes, dtype=float)
    med = float(np.median(slopes))
    if len(slopes) < 2:
        return med, float("nan")
    return med, float(1.2533 * slopes.std(ddof=1) / math.sqrt(len(slopes)))


def compare_spectrum(fits: Sequence[DeviationFit], predicted: Sequence[float],
                     tolerance: float = 0.05) -> ExperimentReport:
    """Match the median fitted slope against the first sub-leading predicted exponent.

    Fitted series have the mean term removed, so the leading prediction (1)
    has nothing to match; with no sub-leading entry the check is vacuous.
    """
    if len(predicted) == 0:
        raise ConfigError("no predicted deviation exponents to compare against")
    report = ExperimentReport()
    med, err = median_with_error([f.slope for f in fits])
    report.add("predicted_top", float(predicted[0]))
    if len(predicted) < 2:
        report.add("median_slope", med, err, None, tolerance, INFO)
        report.add("subleading_match", 0.0, None, None, tolerance, PASS)
        report.notes.append("no positive sub-leading exponent: match is vacuous")
        return report
    target = float(predicted[1])
    gap = abs(med - target)
    report.add("median_slope", med, err, target, tolerance, PASS if gap < tolerance else FAIL)
    report.add("slope_gap", gap, err, 0.0, tolerance, PASS if gap < tolerance else FAIL)
    for i, p in enumerate(predicted[2:], start=3):
        report.add(f"predicted_{i}", float(p))
    return report
