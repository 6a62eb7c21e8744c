"""Standalone long-run estimate of the second Lyapunov exponent for ABCD/DCBA.

Deliberately shares no code with the devlab package: it iterates plain
Rauzy-Veech induction (no Zorich grouping), tracks a 2-frame under the
length-subtraction map with Householder QR, and reports the exponent ratio
without any time normalization.

    python oracles/kz_oracle.py [elementary_steps] [seed]
"""
import json
import sys
import time

import numpy as np
from numba import njit


@njit(cache=True)
def run(perm_top, perm_bot, lam, frame, n, qr_every, nbatch):
    d = lam.shape[0]
    logs = np.zeros((nbatch, 2))
    per = n // nbatch
    for it in range(n):
        a = perm_top[d - 1]
        b = perm_bot[d - 1]
        if lam[a] > lam[b]:
            win, lose = a, b
            row = perm_bot
        else:
            win, lose = b, a
            row = perm_top
        # loser leaves the end of its row and re-enters just after the winner
        j = d - 1
        while row[j - 1] != win:
            row[j] = row[j - 1]
            j -= 1
        row[j] = lose
        lam[win] = lam[win] - lam[lose]
        lam /= lam.sum()
        for c in range(2):
            frame[win, c] -= frame[lose, c]
        if (it + 1) % qr_every == 0:
            q, r = np.linalg.qr(frame)
            frame[:, :] = q
            bi = min(it // per, nbatch - 1)
            logs[bi, 0] += np.log(abs(r[0, 0]))
            logs[bi, 1] += np.log(abs(r[1, 1]))
    return logs


def main():
    n = int(float(sys.argv[1])) if len(sys.argv) > 1 else 100_000_000
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 20240601
    rng = np.random.Generator(np.random.PCG64(seed))
    lam = rng.random(4)
    lam /= lam.sum()
    frame = np.ascontiguousarray(np.linalg.qr(rng.normal(size=(4, 2)))[0])
    top = np.array([0, 1, 2, 3])
    bot = np.array([3, 2, 1, 0])
    # burn-in, then measure
    run(top, bot, lam, frame, 100_000, 8, 1)
    t0 = time.time()
    logs = run(top, bot, lam, frame, n, 8, 20)
    ratios = logs[:, 1] / logs[:, 0]
    est = logs[:, 1].sum() / logs[:, 0].sum()
    err = ratios.std(ddof=1) / np.sqrt(len(ratios))
    out = {"perm": "ABCD/DCBA", "elementary_steps": n, "seed": seed,
           "nu2_over_nu1": float(est), "stderr": float(err),
           "seconds": round(time.time() - t0, 1)}
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
