"""Rauzy-Veech induction, Zorich acceleration, and stratum identification.

Matrix convention: a step's ``matrix`` ``A`` has ``A[a, b]`` = number of
visits of the new subinterval ``b``'s return orbit to the old subinterval
``a``. Hence, before normalization,

    lengths_before = A @ lengths_after
    counts_before  = A @ counts_after        (itineraries of matched return words)
    A.T @ omega(perm_before) @ A == omega(perm_after)
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import _kernels
from .errors import InconsistentSignature, KeaneViolation, NonRecurrent
from .iet import IntervalExchange, LabeledPermutation

KEANE_RTOL = _kernels.KEANE_RTOL
MAX_RUN = _kernels.MAX_RUN

TransitionMatrix = np.ndarray  # d x d int64, det 1, nonnegative


@dataclass(frozen=True)
class RenormStep:
    kind: Literal["top", "bottom"]
    matrix: TransitionMatrix
    log_scale: float
    elementary_steps: int = 1


@dataclass(frozen=True)
class StratumSignature:
    g: int
    sigma: int
    kappa: tuple

    def __str__(self):
        return "H(" + ",".join(map(str, self.kappa)) + ")"


def rauzy_kind(iet: IntervalExchange) -> Literal["top", "bottom"]:
    """Which row wins the next elementary step; raises on a tie."""
    perm = iet.perm
    lt = iet.lengths[perm.index[perm.top[-1]]]
    lb = iet.lengths[perm.index[perm.bottom[-1]]]
    if abs(lt - lb) <= KEANE_RTOL * max(lt, lb):
        raise KeaneViolation(f"competing lengths {lt!r} and {lb!r} coincide")
    return "top" if lt > lb else "bottom"


def rauzy_move(perm: LabeledPermutation, kind: str) -> LabeledPermutation:
    """Combinatorial Rauzy move: the loser jumps right after the winner in its row."""
    top, bottom = list(perm.top), list(perm.bottom)
    if kind == "top":
        loser = bottom.pop()
        bottom.insert(bottom.index(top[-1]) + 1, loser)
    elif kind == "bottom":
        loser = top.pop()
        top.insert(top.index(bottom[-1]) + 1, loser)
    else:
        raise ValueError(f"kind must be 'top' or 'bottom', not {kind!r}")
    return LabeledPermutation(tuple(top), tuple(bottom))


def rauzy_step(iet: IntervalExchange) -> tuple[IntervalExchange, RenormStep]:
    kind = rauzy_kind(iet)
    perm = iet.perm
    t, b = perm.index[perm.top[-1]], perm.index[perm.bottom[-1]]
    winner, loser = (t, b) if kind == "top" else (b, t)
    lengths = np.array(iet.lengths)
    lengths[winner] -= lengths[loser]
    total = math.fsum(lengths)
    matrix = np.eye(perm.d, dtype=np.int64)
    matrix[winner, loser] = 1
    matrix.setflags(write=False)
    new = IntervalExchange(rauzy_move(perm, kind), lengths / total)
    # -log(total) == -log1p(-loser) but keeps precision for tiny losers
    return new, RenormStep(kind, matrix, -math.log1p(-iet.lengths[loser] / math.fsum(iet.lengths)))


def _full_cycles(iet: IntervalExchange, kind: str):
    """Whole cycles a same-kind run is certain to complete from here.

    With the winner fixed, the symbols behind it in the losing row lose in
    rotation; ``n`` full cycles subtract ``n`` times their total length. One
    cycle is always left to the elementary loop, which decides the end.
    """
    perm = iet.perm
    if kind == "top":
        w, row = perm.top[-1], perm.bottom
    else:
        w, row = perm.bottom[-1], perm.top
    losers = [perm.index[a] for a in row[row.index(w) + 1:]]
    w = perm.index[w]
    cycle = math.fsum(iet.lengths[i] for i in losers)
    return max(0, int(iet.lengths[w] // cycle) - 1), w, losers, cycle


def zorich_step(iet: IntervalExchange) -> tuple[IntervalExchange, RenormStep]:
    """Maximal run of same-kind Rauzy steps, composed into one step.

    Whole loser cycles are taken by division; the matrices of a run share
    the winner and commute, so the composition is exact. The run ends when
    the next step's kind differs, so a tie in the lengths right after the
    run also raises :class:`KeaneViolation`.
    """
    iet, first = rauzy_step(iet)
    matrix = first.matrix.copy()
    log_scale = first.log_scale
    n = 1
    while rauzy_kind(iet) == first.kind:
        cycles, w, losers, cycle = _full_cycles(iet, first.kind)
        if cycles:
            lengths = np.array(iet.lengths)
            lengths[w] -= cycles * cycle
            total = math.fsum(lengths)
            bulk = np.eye(iet.d, dtype=np.int64)
            bulk[w, losers] = cycles
            matrix = _checked_matmul(matrix, bulk)
            log_scale -= math.log(total)
            n += cycles * len(losers)
            iet = IntervalExchange(iet.perm, lengths / total)
        else:
            iet, step = rauzy_step(iet)
            matrix = _checked_matmul(matrix, step.matrix)
            log_scale += step.log_scale
            n += 1
        if n > MAX_RUN:
            raise NonRecurrent(f"more than {MAX_RUN} consecutive {first.kind} steps")
    matrix.setflags(write=False)
    return iet, RenormStep(first.kind, matrix, log_scale, n)


def _checked_matmul(a, b):
    out = a @ b
    if out.min() < 0:
        raise OverflowError("int64 overflow in transition matrix product")
    return out


def omega_matrix(perm: LabeledPermutation) -> np.ndarray:
    """Antisymmetric intersection matrix, indexed by alphabet."""
    d = perm.d
    pt = np.empty(d, dtype=np.int64)
    pb = np.empty(d, dtype=np.int64)
    pt[perm.top_idx] = np.arange(d)
    pb[perm.bottom_idx] = np.arange(d)
    before_top = pt[:, None] < pt[None, :]
    before_bottom = pb[:, None] < pb[None, :]
    omega = (before_top & ~before_bottom).astype(np.int64) - (~before_top & before_bottom)
    np.fill_diagonal(omega, 0)
    return omega


def _suspension_angles(perm: LabeledPermutation) -> list[float]:
    """Cone angle (in units of 2*pi) of each vertex class of a Masur polygon."""
    d = perm.d
    pt = np.empty(d, dtype=np.int64)
    pb = np.empty(d, dtype=np.int64)
    pt[perm.top_idx] = np.arange(d)
    pb[perm.bottom_idx] = np.arange(d)
    # canonical suspension: heights tau_a = pos_bottom(a) - pos_top(a)
    zeta = np.ones(d) + 1j * (pb - pt)
    top_pts = np.concatenate([[0], np.cumsum(zeta[perm.top_idx])])
    bot_pts = np.concatenate([[0], np.cumsum(zeta[perm.bottom_idx])])
    if np.any(top_pts[1:-1].imag <= 0) or np.any(bot_pts[1:-1].imag >= 0):
        raise InconsistentSignature(f"canonical suspension of {perm} is not a polygon")

    # vertices: 0 = origin, 1 = end, then top 1..d-1, bottom 1..d-1
    def top_v(i):
        return 0 if i == 0 else 1 if i == d else 1 + i

    def bot_v(i):
        return 0 if i == 0 else 1 if i == d else d + i

    parent = list(range(2 * d))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a in range(d):
        for i, j in ((pt[a], pb[a]), (pt[a] + 1, pb[a] + 1)):
            parent[find(top_v(i))] = find(bot_v(j))

    # counterclockwise: along the bottom to the end, back along the top
    ring = [(bot_pts[i], bot_v(i)) for i in range(d + 1)]
    ring += [(top_pts[i], top_v(i)) for i in range(d - 1, 0, -1)]
    classes: dict[int, float] = {}
    n = len(ring)
    for m, (p, v) in enumerate(ring):
        prev, nxt = ring[m - 1][0], ring[(m + 1) % n][0]
        interior = np.angle((prev - p) / (nxt - p)) % (2 * np.pi)
        classes[find(v)] = classes.get(find(v), 0.0) + interior
    return [a / (2 * np.pi) for a in classes.values()]


def stratum(perm: LabeledPermutation) -> StratumSignature:
    if not perm.is_irreducible():
        raise ValueError(f"permutation {perm} is reducible")
    rank = int(np.linalg.matrix_rank(omega_matrix(perm).astype(float)))
    g = rank // 2
    sigma = perm.d - 2 * g + 1
    angles = _suspension_angles(perm)
    orders = [round(a) - 1 for a in angles]
    if len(angles) != sigma or any(abs(a - round(a)) > 1e-6 for a in angles):
        raise InconsistentSignature(
            f"{perm}: rank gives sigma={sigma}, suspension gives cone angles {angles}")
    kappa = tuple(sorted(orders, reverse=True))
    if sum(kappa) != 2 * g - 2:
        raise InconsistentSignature(f"{perm}: kappa={kappa} does not sum to 2g-2 with g={g}")
    return StratumSignature(g, sigma, kappa)
