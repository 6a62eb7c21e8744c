"""Homogeneous baselines: circle rotations and the Heisenberg skew product.

Rotations have bounded (BV: logarithmic) ergodic sums along continued
fraction denominators; the nilflow return map ``(x, y) -> (x + a, y + x + b)``
produces quadratic Weyl sums with square-root growth.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .deviation import DeviationSeries, Observable, geometric_schedule
from .errors import NonZeroMean, RationalAlpha

GOLDEN = (math.sqrt(5) - 1) / 2
RATIONAL_TOL = 1e-14
DK_SLACK = 1e-8
CHUNK = 1 << 20


@dataclass(frozen=True)
class ContinuedFraction:
    alpha: float
    quotients: tuple
    convergents: tuple  # (p_n, q_n), n = 1..len(quotients)


def continued_fraction(alpha: float, n: int) -> ContinuedFraction:
    """First ``n`` partial quotients of ``alpha`` in (0, 1).

    The Gauss map runs in exact rational arithmetic on the binary value of
    ``alpha``, so no rounding error is amplified along the expansion.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    x = Fraction(alpha)
    quotients, convergents = [], []
    p_prev, q_prev, p, q = 1, 0, 0, 1
    for i in range(n):
        if x < RATIONAL_TOL:
            raise RationalAlpha(f"alpha={alpha!r} terminates after {i} partial quotients")
        a = math.floor(1 / x)
        x = 1 / x - a
        quotients.append(a)
        p_prev, q_prev, p, q = p, q, a * p + p_prev, a * q + q_prev
        convergents.append((p, q))
    return ContinuedFraction(alpha, tuple(quotients), tuple(convergents))


def rotation_orbit(alpha: float, x0: float, n: int, start: int = 0) -> np.ndarray:
    k = np.arange(start, start + n, dtype=np.float64)
    return np.mod(x0 + k * alpha, 1.0)


@dataclass(frozen=True)
class DKLevel:
    q: int
    sum: float
    bound: float

    @property
    def ok(self) -> bool:
        return abs(self.sum) <= self.bound + DK_SLACK


def denjoy_koksma_check(alpha: float, f: Observable, x0: float, n_levels: int,
                        q_max: int = 10 ** 7) -> list[DKLevel]:
    """``|S_q f(x0)|`` against ``Var(f)`` at each convergent denominator ``q <= q_max``."""
    if abs(f.mean) > 1e-12:
        raise NonZeroMean("Denjoy-Koksma check needs a mean-zero observable")
    cf = continued_fraction(alpha, n_levels)
    levels = []
    var = f.variation
    for _, q in cf.convergents:
        if q > q_max:
            break
        s = math.fsum(f(rotation_orbit(alpha, x0, q)))
        levels.append(DKLevel(q, s, var))
    return levels


def rotation_sum(alpha: float, f: Observable, x0: float, T_max: int,
                 schedule=None) -> DeviationSeries:
    """``|S_T f(x0)|`` along the rotation by ``alpha``."""
    T = geometric_schedule(T_max) if schedule is None else np.asarray(schedule, dtype=np.int64)
    out = np.zeros(len(T))
    total, done = 0.0, 0
    j = int(np.searchsorted(T, 0, side="right"))
    end = int(T[-1]) if len(T) else 0
    while done < end:
        n = min(CHUNK, end - done)
        partial = total + np.cumsum(f(rotation_orbit(alpha, x0, n, done)))
        hi = int(np.searchsorted(T, done + n, side="right"))
        out[j:hi] = np.abs(partial[T[j:hi] - done - 1])
        j, total, done = hi, float(partial[-1]), done + n
    return DeviationSeries(T, out, "observable")


# -- double-double helpers ---------------------------------------------------

_SPLITTER = 134217729.0  # 2**27 + 1


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    """``a * b`` as an unevaluated sum ``p + e``, exact barring overflow."""
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _frac_prod(a, m):
    """frac(a * m) for float ``a`` and integer-valued float ``m < 2**53``."""
    p, e = two_prod(a, m)
    return np.mod(p, 1.0) + e


def skew_phase(alpha: float, beta: float, x0: float, y0: float, k) -> np.ndarray:
    """Closed form ``y_k = y0 + k (x0 + beta) + alpha k (k-1) / 2 mod 1``, compensated."""
    k = np.asarray(k, dtype=np.int64)
    tri = (k * (k - 1) // 2).astype(np.float64)
    kf = k.astype(np.float64)
    y = y0 + _frac_prod(beta, kf) + _frac_prod(x0, kf) + _frac_prod(alpha, tri)
    return np.mod(y, 1.0)


@dataclass(frozen=True)
class SkewOrbitState:
    """Point of the 2-torus under ``(x, y) -> (x + alpha, y + x + beta)``.

    ``x`` and ``y`` carry double-double low parts so that long iteration
    agrees with the closed form.
    """

    alpha: float
    beta: float
    x: float
    y: float
    x_lo: float = 0.0
    y_lo: float = 0.0

    def step(self) -> "SkewOrbitState":
        y, y_lo = _dd_add(self.y, self.y_lo, self.x, self.x_lo)
        y, y_lo = _dd_frac(*_dd_add(y, y_lo, self.beta, 0.0))
        x, x_lo = _dd_frac(*_dd_add(self.x, self.x_lo, self.alpha, 0.0))
        return SkewOrbitState(self.alpha, self.beta, x, y, x_lo, y_lo)


def _dd_add(ah, al, bh, bl):
    s, e = two_sum(ah, bh)
    e += al + bl
    return two_sum(s, e)


def _dd_frac(h, l):
    f = math.floor(h)
    h, l = two_sum(h - f, l)
    if h < 0:
        h, l = two_sum(h + 1.0, l)
    elif h >= 1.0:
        h, l = two_sum(h - 1.0, l)
    return h, l


def skew_orbit(alpha, beta, x0, y0, n) -> np.ndarray:
    """``y_0 .. y_{n-1}`` by iterating the skew product."""
    state = SkewOrbitState(alpha, beta, x0, y0)
    ys = np.empty(n)
    for k in range(n):
        ys[k] = state.y + state.y_lo
        state = state.step()
    return np.mod(ys, 1.0)


def heisenberg_sum(alpha: float, beta: float, x0: float, y0: float, T_max: int,
                   schedule=None) -> DeviationSeries:
    """``|sum_{k<T} exp(2 pi i y_k)|`` along the skew orbit of ``(x0, y0)``."""
    T = geometric_schedule(T_max) if schedule is None else np.asarray(schedule, dtype=np.int64)
    out = np.zeros(len(T))
    total, done = 0j, 0
    j = int(np.searchsorted(T, 0, side="right"))
    end = int(T[-1]) if len(T) else 0
    while done < end:
        n = min(CHUNK, end - done)
        y = skew_phase(alpha, beta, x0, y0, np.arange(done, done + n))
        partial = total + np.cumsum(np.exp(2j * np.pi * y))
        hi = int(np.searchsorted(T, done + n, side="right"))
        out[j:hi] = np.abs(partial[T[j:hi] - done - 1])
        j, total, done = hi, complex(partial[-1]), done + n
    return DeviationSeries(T, out, "observable")
