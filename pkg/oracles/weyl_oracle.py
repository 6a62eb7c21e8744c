"""Standalone quadratic Weyl-sum exponent for the golden Heisenberg skew product.

Shares no code with the devlab package. Phases
    y_k = y0 + k (x0 + beta) + alpha k (k - 1) / 2   (mod 1)
are computed exactly in integer arithmetic on the binary values of the
floats (common denominator 2**E), then |sum_{k<N} exp(2 pi i y_k)| is fitted
by ordinary least squares on log running max vs log N over N >= N_max**(1/3).

    python oracles/weyl_oracle.py [N_max] [trials] [seed]
"""
import json
import math
import sys
import time
from fractions import Fraction

import numpy as np

E = 1100  # covers every double's binary exponent


def scaled(v):
    f = Fraction(v)
    assert (1 << E) % f.denominator == 0
    return f.numerator * ((1 << E) // f.denominator)


def phases(alpha, beta, x0, y0, n):
    mod = 1 << E
    a, b, x, y = (scaled(v) for v in (alpha, beta, x0, y0))
    out = np.empty(n)
    # second-order differences: y_{k+1} - y_k = x0 + beta + alpha k
    cur, step = y % mod, (x + b) % mod
    for k in range(n):
        out[k] = cur / mod
        cur = (cur + step) % mod
        step = (step + a) % mod
    return out


def slope(alpha, beta, x0, y0, n_max):
    y = phases(alpha, beta, x0, y0, n_max)
    s = np.abs(np.cumsum(np.exp(2j * np.pi * y)))
    T = np.unique(np.floor(1.25 ** np.arange(0, 100)).astype(np.int64))
    T = T[T <= n_max]
    run = np.maximum.accumulate(s[T - 1])
    keep = T >= n_max ** (1 / 3)
    return np.polyfit(np.log(T[keep]), np.log(run[keep]), 1)[0]


def main():
    n_max = int(float(sys.argv[1])) if len(sys.argv) > 1 else 10 ** 6
    trials = int(sys.argv[2]) if len(sys.argv) > 2 else 20
    seed = int(sys.argv[3]) if len(sys.argv) > 3 else 19
    alpha = (math.sqrt(5) - 1) / 2
    rng = np.random.default_rng(seed)
    t0 = time.time()
    slopes = [slope(alpha, *map(float, rng.random(3)), n_max) for _ in range(trials)]
    out = {"alpha": "golden", "N": n_max, "trials": trials, "seed": seed,
           "median_slope": float(np.median(slopes)), "slopes": [float(s) for s in slopes],
           "seconds": round(time.time() - t0, 1)}
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
