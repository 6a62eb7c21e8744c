"""Lyapunov spectrum of the Rauzy-Veech-Zorich cocycle.

Exponents are normalized per unit of accumulated renormalization time
(the sum of ``log_scale`` over Zorich steps), so the top one is 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import _kernels
from .errors import KeaneViolation, NonRecurrent
from .iet import LabeledPermutation, random_lengths
from .rauzy import RenormStep, stratum

WARMUP = 100
CADENCE = 10
BATCHES = 20
GROWTH_CAP = 1e3
RETRIES = 5
ZERO_SIGMAS = 3.0


class CocycleAccumulator:
    """Reference (numpy) accumulator: feed it :class:`RenormStep` objects.

    The frame is pushed by ``matrix.T``; the kernel in ``estimate_spectrum``
    follows the same convention one elementary step at a time.
    """

    def __init__(self, frame: np.ndarray, cadence: int = CADENCE):
        q, _ = np.linalg.qr(np.asarray(frame, dtype=float))
        self.frame = q
        self.log_norms = np.zeros(q.shape[1])
        self.teich_time = 0.0
        self.steps = 0
        self.cadence = cadence

    def push(self, step: RenormStep) -> None:
        self.frame = step.matrix.T.astype(float) @ self.frame
        self.teich_time += step.log_scale
        self.steps += 1
        if self.steps % self.cadence == 0:
            self.orthonormalize()

    def orthonormalize(self) -> None:
        q, r = np.linalg.qr(self.frame)
        self.log_norms += np.log(np.abs(np.diag(r)))
        self.frame = q

    @property
    def exponents(self) -> np.ndarray:
        self.orthonormalize()
        return self.log_norms / self.teich_time


@dataclass(frozen=True)
class SpectrumReport:
    exponents: np.ndarray
    stderr: np.ndarray
    d: int
    g: int
    sigma: int
    teich_time: float = 0.0
    steps: int = 0
    elementary_steps: int = 0
    batch_exponents: np.ndarray = field(default=None, repr=False)
    batch_time: np.ndarray = field(default=None, repr=False)

    @property
    def k(self) -> int:
        return len(self.exponents)

    @property
    def kernel_shifted(self) -> list[float]:
        """Positive exponents shifted by -1: the derived list for kernel directions (unverified)."""
        return [float(v) - 1.0 for v, s in zip(self.exponents, self.stderr) if v > ZERO_SIGMAS * s]


@dataclass(frozen=True)
class StructureVerdict:
    symmetry_defect: float
    zero_count: int
    expected_zero_count: int
    top_gap: float

    @property
    def zero_count_ok(self) -> bool:
        return self.zero_count == self.expected_zero_count


def _run_once(perm, rng, n_steps, k, warmup, cadence, batches):
    d = perm.d
    top = perm.top_idx.copy()
    bot = perm.bottom_idx.copy()
    lam = random_lengths(d, rng)
    frame, _ = np.linalg.qr(rng.standard_normal((d, k)))
    frame = np.ascontiguousarray(frame)
    batch_len = max(1, n_steps // batches)
    batch_logs = np.zeros((batches, k))
    batch_time = np.zeros(batches)
    status, zsteps, elementary, teich = _kernels.cocycle_run(
        top, bot, lam, frame, n_steps, warmup, cadence, GROWTH_CAP,
        batch_len, batch_logs, batch_time)
    if status == _kernels.KEANE:
        raise KeaneViolation(f"tie after {zsteps} Zorich steps")
    if status == _kernels.NONRECURRENT:
        raise NonRecurrent(f"runaway Zorich step after {zsteps} steps")
    return batch_logs, batch_time, zsteps, elementary, teich


def estimate_spectrum(perm: LabeledPermutation | str, seed, n_steps: int, k: int | None = None,
                      *, warmup: int = WARMUP, cadence: int = CADENCE,
                      batches: int = BATCHES) -> SpectrumReport:
    """Top ``k`` exponents from one random IET over ``perm``, with batch-means errors.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts. On a Keane
    tie or a runaway Zorich step the trajectory is resampled, up to 5 times.
    """
    if isinstance(perm, str):
        perm = LabeledPermutation.parse(perm)
    k = perm.d if k is None else k
    if not 1 <= k <= perm.d:
        raise ValueError(f"k must lie in [1, {perm.d}], got {k}")
    if n_steps < batches:
        raise ValueError(f"n_steps must be at least {batches}")
    n_steps -= n_steps % batches
    sig = stratum(perm)
    rng = np.random.default_rng(seed)
    for attempt in range(RETRIES + 1):
        try:
            batch_logs, batch_time, zsteps, elementary, teich = _run_once(
                perm, rng, n_steps, k, warmup, cadence, batches)
            break
        except (KeaneViolation, NonRecurrent):
            if attempt == RETRIES:
                raise
    per_batch = batch_logs / batch_time[:, None]
    exponents = batch_logs.sum(axis=0) / batch_time.sum()
    stderr = per_batch.std(axis=0, ddof=1) / math.sqrt(batches)
    order = np.argsort(-exponents, kind="stable")
    return SpectrumReport(exponents[order], stderr[order], perm.d, sig.g, sig.sigma,
                          float(batch_time.sum()), int(zsteps), int(elementary), per_batch[:, order],
                          batch_time)


def merge_reports(reports: Iterable[SpectrumReport]) -> SpectrumReport:
    """Inverse-variance weighted combination; independent of input order."""
    reports = list(reports)
    if not reports:
        raise ValueError("nothing to merge")
    first = reports[0]
    exps, errs = [], []
    for i in range(first.k):
        w = [1.0 / r.stderr[i] ** 2 for r in reports]
        wsum = math.fsum(w)
        exps.append(math.fsum(wi * r.exponents[i] for wi, r in zip(w, reports)) / wsum)
        errs.append(1.0 / math.sqrt(wsum))
    return SpectrumReport(np.array(exps), np.array(errs), first.d, first.g, first.sigma,
                          math.fsum(r.teich_time for r in reports),
                          sum(r.steps for r in reports),
                          sum(r.elementary_steps for r in reports))


def full_spectrum_structure(report: SpectrumReport) -> StructureVerdict:
    if report.k != report.d:
        raise ValueError("structure check needs the full spectrum (k = d)")
    nu = report.exponents
    defect = float(np.max(np.abs(nu + nu[::-1])))
    zeros = int(np.sum(np.abs(nu) < ZERO_SIGMAS * report.stderr))
    return StructureVerdict(defect, zeros, report.sigma - 1, float(abs(nu[0] - 1.0)))


def _positive(report):
    return [(float(v), float(s)) for v, s in zip(report.exponents, report.stderr)
            if v > ZERO_SIGMAS * s]


def predict_deviation_exponents(report: SpectrumReport) -> list[float]:
    """Statistically positive exponents, rescaled so the top one is 1."""
    pos = _positive(report)
    if not pos:
        return []
    top = pos[0][0]
    return [v / top for v, _ in pos]


@dataclass(frozen=True)
class SobolevOrders:
    orders: list
    stderr: list

    @property
    def reported(self) -> list:
        # noise can push an order slightly below zero; only the display is clamped
        return [max(0.0, o) for o in self.orders]


def sobolev_order_report(report: SpectrumReport) -> SobolevOrders:
    pos = _positive(report)
    if not pos:
        return SobolevOrders([], [])
    top = pos[0][0]
    return SobolevOrders([1.0 - v / top for v, _ in pos], [s / top for _, s in pos])
