import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from devlab.deviation import (DeviationFit, DeviationSeries, Observable, compare_spectrum,
                              fit_exponent, geometric_schedule, homology_deviation, observable_sum)
from devlab.errors import ConfigError, DegenerateSeries, NonZeroMean
from devlab.iet import LabeledPermutation, apply, checkpoint_counts, new_iet, random_iet
from devlab.report import FAIL, PASS
from devlab.trials import trial_rng

GOLDEN = (math.sqrt(5) - 1) / 2
ORACLE = json.loads((Path(__file__).parent / "data" / "oracle_h2.json").read_text())


def test_schedule_is_geometric_and_deduplicated():
    T = geometric_schedule(10 ** 6)
    assert T[0] == 1 and T[-1] <= 10 ** 6 and np.all(np.diff(T) > 0)
    assert T.tolist()[:6] == [1, 2, 3, 4, 5, 7]
    big = T[T > 1000]
    assert np.allclose(big[1:] / big[:-1], 1.25, atol=0.01)


def test_fit_exact_power_law():
    T = geometric_schedule(10 ** 6)
    fit = fit_exponent(DeviationSeries(T, T ** 0.5))
    assert fit.slope == pytest.approx(0.5, abs=1e-6)
    assert fit.r2 == pytest.approx(1.0)
    assert T[fit.window[0]] >= 100


def test_fit_log_series_is_shallow():
    T = geometric_schedule(10 ** 6)
    # oracle: plain least squares of log log T on log T over T >= 100
    keep = T >= 10 ** 2
    oracle = np.polyfit(np.log(T[keep]), np.log(np.log(T[keep])), 1)[0]
    fit = fit_exponent(DeviationSeries(T, np.log(T)))
    assert fit.slope == pytest.approx(oracle, abs=1e-9)
    assert fit.slope < 0.15


def test_fit_noisy_power_law():
    rng = np.random.default_rng(3)
    T = geometric_schedule(10 ** 6)
    slopes = [fit_exponent(DeviationSeries(T, 3 * T ** 0.33 + rng.random(len(T)))).slope
              for _ in range(50)]
    # Monte Carlo oracle: every replicate lands in the band
    assert np.all(np.abs(np.array(slopes) - 0.33) < 0.02)


def test_fit_errors():
    T = geometric_schedule(10 ** 4)
    with pytest.raises(DegenerateSeries):
        fit_exponent(DeviationSeries(T, np.zeros(len(T))))
    with pytest.raises(ValueError):
        fit_exponent(DeviationSeries(T[:10], T[:10] ** 0.5), T_min=5)


@settings(max_examples=50, deadline=None)
@given(c=st.floats(1e-6, 1e6), seed=st.integers(0, 2 ** 32))
def test_slope_invariant_under_scaling(c, seed):
    rng = np.random.default_rng(seed)
    T = geometric_schedule(10 ** 5)
    s = DeviationSeries(T, T ** rng.random() * (1 + rng.random(len(T))))
    assert fit_exponent(s.scaled(c)).slope == pytest.approx(fit_exponent(s).slope, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_running_max_is_monotone(seed):
    rng = np.random.default_rng(seed)
    s = DeviationSeries(geometric_schedule(10 ** 4), rng.random(len(geometric_schedule(10 ** 4))))
    assert np.all(np.diff(s.running_max) >= 0)


def test_bounded_series_slope_vanishes():
    slopes = []
    for t_max in (10 ** 4, 10 ** 6, 10 ** 8, 10 ** 12):
        T = geometric_schedule(t_max)
        slopes.append(fit_exponent(DeviationSeries(T, 2 - np.cos(np.log(T)) - 1 / T)).slope)
    assert slopes[-1] < 0.02
    assert slopes[-1] < slopes[0]


def test_homology_zero_checkpoint(h2_perm, rng):
    s = homology_deviation(random_iet(h2_perm, rng), 0.2, 1000, schedule=[0, 1, 10, 1000])
    assert s.values[0] == 0.0
    assert s.kind == "homology"


def test_homology_golden_rotation_is_bounded(rotation_perm):
    iet = new_iet(rotation_perm, [1 - GOLDEN, GOLDEN])
    s = homology_deviation(iet, 0.1, 10 ** 6)
    assert s.values.max() < 3.0
    assert fit_exponent(s).slope < 0.1


def test_constant_observable_slope_is_one(h2_perm, rng):
    iet = random_iet(h2_perm, rng)
    s = observable_sum(iet, Observable.constant(1.0), 0.3, 10 ** 4, deviation=False)
    assert np.array_equal(s.values, s.T.astype(float))
    assert fit_exponent(s).slope == pytest.approx(1.0, abs=1e-12)


def test_nonzero_mean_rejected_for_deviation(h2_perm, rng):
    with pytest.raises(NonZeroMean):
        observable_sum(random_iet(h2_perm, rng), Observable.constant(1.0), 0.3, 10 ** 4)


def test_cos_on_golden_rotation(rotation_perm):
    iet = new_iet(rotation_perm, [1 - GOLDEN, GOLDEN])
    s = observable_sum(iet, Observable.trigonometric(1), 0.1, 10 ** 6)
    # for f = cos(2 pi x) the sums are bounded by 1 / |sin(pi alpha)|
    assert s.values.max() <= 1 / abs(math.sin(math.pi * GOLDEN)) + 1e-6
    assert fit_exponent(s).slope < 0.1


def test_indicator_sums_equal_homology_coordinates(h2_perm):
    rng = np.random.default_rng(8)
    n = 10 ** 4
    ck = np.arange(n + 1)
    for _ in range(3):
        iet = random_iet(h2_perm, rng)
        x0 = float(rng.random())
        counts = checkpoint_counts(iet, x0, ck)
        dev = counts - ck[:, None] * iet.lengths[None, :]
        for sym in iet.perm.alphabet:
            f = Observable.indicator_of(iet, sym)
            s = observable_sum(iet, f, x0, n, schedule=ck)
            assert np.array_equal(s.values, np.abs(dev[:, f.symbol]))


def test_indicator_sums_brute_force(h2_perm, rng):
    iet = random_iet(h2_perm, rng)
    f = Observable.indicator_of(iet, "B")
    x, total, exact = 0.37, 0, []
    for _ in range(2000):
        total += int(f.interval[0] <= x < f.interval[1])
        exact.append(total)
        x, _ = apply(iet, x)
    ck = np.arange(1, 2001)
    s = observable_sum(iet, f, 0.37, 2000, schedule=ck)
    assert np.allclose(s.values, np.abs(np.array(exact) - ck * iet.lengths[f.symbol]), atol=1e-9)


def test_generic_observable_path_matches_brute_force(h2_perm, rng):
    iet = random_iet(h2_perm, rng)
    f = Observable.piecewise_linear((0, 0.3, 1), (-0.4, 0.9, -0.4))
    f = Observable.piecewise_linear(f.knots, np.array(f.values) - f.mean)
    x, acc, sums = 0.21, 0.0, []
    for _ in range(3000):
        acc += float(f(x))
        sums.append(abs(acc))
        x, _ = apply(iet, x)
    s = observable_sum(iet, f, 0.21, 3000, schedule=np.arange(1, 3001))
    assert np.allclose(s.values, sums, atol=1e-9)


def test_leading_term_is_the_mean(h2_perm, rng):
    iet = random_iet(h2_perm, rng)
    f = Observable.piecewise_linear((0, 1), (-0.2, 0.8))
    assert f.mean == pytest.approx(0.3)
    s = observable_sum(iet, f, 0.4, 10 ** 6, schedule=[10 ** 6], deviation=False)
    assert s.values[0] / 10 ** 6 == pytest.approx(0.3, abs=1e-2)


@pytest.mark.parametrize("f", [Observable.trigonometric(1), Observable.trigonometric(3),
                               Observable.indicator(0.2, 0.7),
                               Observable.piecewise_linear((0, 0.5, 1), (-1, 1, -1))])
def test_mean_zero_by_quadrature(f):
    assert abs(f.quadrature_mean()) < 1e-10
    assert f.mean == 0.0


def test_variation():
    assert Observable.trigonometric(2).variation == 8.0
    assert Observable.indicator(0.0, 0.5).variation == 2.0
    assert Observable.piecewise_linear((0, 1), (-0.5, 0.5)).variation == 2.0


def test_h2_indicator_slope_matches_second_exponent(h2_perm):
    slopes = []
    for t in range(20):
        rng = trial_rng(1, t)
        iet = random_iet(h2_perm, rng)
        f = Observable.indicator_of(iet, "A")
        slopes.append(fit_exponent(observable_sum(iet, f, float(rng.random()), 10 ** 7)).slope)
    assert abs(np.median(slopes) - ORACLE["nu2_over_nu1"]) < 0.05


def _fit(slope):
    return DeviationFit(slope, 0.0, 1.0, (0, 10))


def test_compare_spectrum_pass_and_fail():
    fits = [_fit(s) for s in (0.31, 0.33, 0.34, 0.35, 0.32)]
    rep = compare_spectrum(fits, [1.0, 1 / 3], 0.05)
    assert rep.passed
    gap = next(r for r in rep.rows if r.metric == "slope_gap")
    assert gap.estimate < 0.05 and gap.verdict == PASS
    bad = compare_spectrum([_fit(0.6)] * 3, [1.0, 1 / 3], 0.05)
    assert not bad.passed and any(r.verdict == FAIL for r in bad.rows)


def test_compare_spectrum_torus_is_vacuous():
    rep = compare_spectrum([_fit(0.01), _fit(0.0)], [1.0], 0.05)
    assert rep.passed and rep.notes


def test_compare_spectrum_needs_prediction():
    with pytest.raises(ConfigError):
        compare_spectrum([_fit(0.3)], [], 0.05)
