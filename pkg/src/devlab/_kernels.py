"""Compiled inner loops. Every kernel here mirrors a pure-Python reference path
elsewhere in the package and is tested against it."""
import numpy as np
from numba import njit

# points closer than this to an interior cut belong to the left subinterval
CUT_EPS = 1e-15
KEANE_RTOL = 1e-14
MAX_RUN = 10 ** 12
ONE_MINUS = float(np.nextafter(1.0, 0.0))

# status codes returned by cocycle_run
OK = 0
KEANE = 1
NONRECURRENT = 2


@njit(cache=True)
def locate(starts, x):
    # branch-free count of interior cuts at or below x; d is small
    lo = 0
    for i in range(1, starts.shape[0]):
        lo += starts[i] <= x
    lo -= (lo > 0) & (x - starts[lo] < CUT_EPS)
    return lo


@njit(cache=True)
def step_point(starts, trans, x):
    i = locate(starts, x)
    y = x + trans[i]
    if y >= 1.0:
        y = ONE_MINUS
    elif y < 0.0:
        y = 0.0
    return y, i


@njit(cache=True)
def iet_orbit(starts, trans, x, n, xs, syms):
    """Fill xs[k] = T^k x and syms[k] = position index of T^k x, k < n; return T^n x.

    ``starts`` and ``trans`` are indexed by top position; callers map positions to symbols.
    """
    for k in range(n):
        xs[k] = x
        x, i = step_point(starts, trans, x)
        syms[k] = i
    return x


@njit(cache=True)
def iet_checkpoint_counts(starts, trans, x, checkpoints, out):
    """out[j, i] = visits of top position i among the first checkpoints[j] orbit points."""
    d = starts.shape[0]
    counts = np.zeros(d, dtype=np.int64)
    n = 0
    for j in range(checkpoints.shape[0]):
        target = checkpoints[j]
        while n < target:
            x, i = step_point(starts, trans, x)
            counts[i] += 1
            n += 1
        for i in range(d):
            out[j, i] = counts[i]
    return x


@njit(cache=True)
def _orthonormalize(frame, log_norms):
    # modified Gram-Schmidt with one reorthogonalization pass
    d, k = frame.shape
    for j in range(k):
        for _ in range(2):
            for i in range(j):
                r = 0.0
                for a in range(d):
                    r += frame[a, i] * frame[a, j]
                for a in range(d):
                    frame[a, j] -= r * frame[a, i]
        nrm = 0.0
        for a in range(d):
            nrm += frame[a, j] * frame[a, j]
        nrm = np.sqrt(nrm)
        log_norms[j] += np.log(nrm)
        for a in range(d):
            frame[a, j] /= nrm


@njit(cache=True)
def _advance(lam, frame, log_norms, w, row, lo, hi, mult, zsteps, batch_len,
             batch_logs, batch_time, growth_cap):
    """Renormalize lengths and push the frame after ``lam[w]`` lost ``mult`` times
    to each symbol in ``row[lo:hi]``. Returns the Teichmueller time elapsed."""
    d = lam.shape[0]
    k = frame.shape[1]
    s = 0.0
    for a in range(d):
        s += lam[a]
    for a in range(d):
        lam[a] /= s
    if zsteps < 0:
        return 0.0
    dt = -np.log(s)
    n_batches = batch_logs.shape[0]
    bi = zsteps // batch_len
    if bi < n_batches:
        batch_time[bi] += dt
    # transpose of (I + mult * E[w, l]): row l picks up mult * row w
    big = False
    for p in range(lo, hi):
        l = row[p]
        for j in range(k):
            frame[l, j] += mult * frame[w, j]
            if abs(frame[l, j]) > growth_cap:
                big = True
    if big:
        before = log_norms.copy()
        _orthonormalize(frame, log_norms)
        if bi < n_batches:
            for j in range(k):
                batch_logs[bi, j] += log_norms[j] - before[j]
    return dt


@njit(cache=True)
def cocycle_run(top, bot, lam, frame, n_steps, warmup, cadence, growth_cap,
                batch_len, batch_logs, batch_time):
    """Zorich-accelerated Rauzy-Veech induction with a QR-deflated frame.

    top/bot: symbol indices by position (modified in place); lam: lengths by
    symbol, summing to 1 (modified in place); frame: d x k, orthonormal columns,
    pushed by the transpose of each elementary visit matrix.

    Runs ``warmup`` Zorich steps without touching the frame, then ``n_steps``
    accumulated ones. Batch b collects log-norm increments and Teichmueller
    time for Zorich steps [b*batch_len, (b+1)*batch_len).

    Returns (status, zorich_steps_done, elementary_steps, teich_time).
    """
    d = lam.shape[0]
    k = frame.shape[1]
    log_norms = np.zeros(k)
    teich = 0.0
    elementary = 0
    zsteps = -warmup
    prev_kind = -1
    run = 0
    since_qr = 0
    n_batches = batch_logs.shape[0]
    while True:
        t = top[d - 1]
        b = bot[d - 1]
        lt = lam[t]
        lb = lam[b]
        if abs(lt - lb) <= KEANE_RTOL * max(lt, lb):
            return KEANE, zsteps, elementary, teich
        kind = 0 if lt > lb else 1
        if kind != prev_kind:
            # a new Zorich step begins; close the previous one
            if prev_kind != -1:
                zsteps += 1
                since_qr += 1
                if zsteps > 0:
                    done = zsteps
                    at_batch_end = (done % batch_len == 0)
                    if since_qr >= cadence or at_batch_end:
                        before = log_norms.copy()
                        _orthonormalize(frame, log_norms)
                        since_qr = 0
                        bi = (done - 1) // batch_len
                        if bi < n_batches:
                            for j in range(k):
                                batch_logs[bi, j] += log_norms[j] - before[j]
                    if done >= n_steps:
                        return OK, zsteps, elementary, teich
            prev_kind = kind
            run = 0
        if run > 0:
            # inside a run: take whole loser cycles by division (the visit
            # matrices share the winner and commute, so this is exact)
            if kind == 0:
                w = t
                row = bot
            else:
                w = b
                row = top
            pos = 0
            for p in range(d):
                if row[p] == w:
                    pos = p
            cyc = 0.0
            for p in range(pos + 1, d):
                cyc += lam[row[p]]
            nc = np.floor(lam[w] / cyc) - 1.0
            if nc >= 1.0:
                m = d - 1 - pos
                if run + nc * m > MAX_RUN:
                    return NONRECURRENT, zsteps, elementary, teich
                run += int(nc) * m
                lam[w] -= nc * cyc
                elementary += int(nc) * m
                teich += _advance(lam, frame, log_norms, w, row, pos + 1, d, nc, zsteps,
                                  batch_len, batch_logs, batch_time, growth_cap)
                continue
        run += 1
        if run > MAX_RUN:
            return NONRECURRENT, zsteps, elementary, teich
        if kind == 0:
            w = t
            l = b
            row = bot
        else:
            w = b
            l = t
            row = top
        # loser moves right after the winner in its row
        pos = 0
        for p in range(d):
            if row[p] == w:
                pos = p
        for p in range(d - 1, pos + 1, -1):
            row[p] = row[p - 1]
        row[pos + 1] = l
        lam[w] -= lam[l]
        elementary += 1
        teich += _advance(lam, frame, log_norms, w, row, pos + 1, pos + 2, 1.0, zsteps,
                          batch_len, batch_logs, batch_time, growth_cap)
