"""Grid sweeps of the bargaining gain over SNR or interference coefficients."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass
from typing import Iterable, List, Sequence, TextIO, Tuple

from .bargaining import solve_nbs
from .channel import DEFAULT_W, RatePair, StandardChannel, db_to_linear

__all__ = [
    "SweepSpec",
    "SweepRecord",
    "CSV_HEADER",
    "deltas",
    "axis",
    "evaluate_point",
    "run_sweep",
    "write_csv",
    "records_to_csv",
]

CSV_HEADER = ("snr1_db", "snr2_db", "alpha", "beta", "rc1", "rc2", "feasible",
              "rho_star", "r_nbs1", "r_nbs2", "delta_min", "delta_sum")
NO_AGREEMENT = -1.0


def deltas(nbs: RatePair, rc: RatePair) -> Tuple[float, float]:
    """Minimum per-user and sum-rate improvement of ``nbs`` over ``rc``."""
    if not (rc.r1 > 0 and rc.r2 > 0):
        raise ValueError("competitive rates must be > 0 to form improvement ratios")
    delta_min = min(nbs.r1 / rc.r1, nbs.r2 / rc.r2)
    delta_sum = (nbs.r1 + nbs.r2) / (rc.r1 + rc.r2)
    return delta_min, delta_sum


def axis(start: float, stop: float, step: float) -> List[float]:
    """Inclusive grid ``start + i*step``; values are computed from the integer
    index so no rounding accumulates."""
    if not step > 0:
        raise ValueError(f"step must be > 0, got {step!r}")
    if stop < start:
        raise ValueError(f"empty range [{start}, {stop}]")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(n)]


@dataclass(frozen=True)
class SweepSpec:
    """Grid definition.

    ``mode="snr"`` sweeps both SNRs (dB) over the same axis at fixed
    ``alpha``/``beta``. ``mode="interference"`` fixes the SNRs and sweeps
    ``alpha`` and ``beta`` over the same linear axis. The first swept
    quantity is the outer (slow) index.
    """

    mode: str = "snr"
    alpha: float = 0.7
    beta: float = 0.7
    snr1_db: float = 20.0
    snr2_db: float = 20.0
    start: float = 0.0
    stop: float = 40.0
    step: float = 0.25
    w: float = DEFAULT_W

    def __post_init__(self) -> None:
        if self.mode not in ("snr", "interference"):
            raise ValueError(f"unknown sweep mode {self.mode!r}")
        if not self.w > 0:
            raise ValueError("w must be > 0")
        if self.mode == "snr":
            if not (self.alpha >= 0 and self.beta >= 0):
                raise ValueError("alpha and beta must be >= 0")
        elif self.start < 0:
            raise ValueError("interference coefficients must be >= 0")
        axis(self.start, self.stop, self.step)

    @classmethod
    def snr_grid(cls, alpha: float, beta: float, min_db: float = 0.0,
                 max_db: float = 40.0, step_db: float = 0.25, w: float = DEFAULT_W) -> "SweepSpec":
        return cls("snr", alpha=alpha, beta=beta, start=min_db, stop=max_db,
                   step=step_db, w=w)

    @classmethod
    def interference_grid(cls, snr1_db: float = 20.0, snr2_db: float = 20.0,
                          start: float = 0.0, stop: float = 1.0, step: float = 0.01,
                          w: float = DEFAULT_W) -> "SweepSpec":
        return cls("interference", snr1_db=snr1_db, snr2_db=snr2_db, start=start,
                   stop=stop, step=step, w=w)

    def points(self) -> List[Tuple[float, float, float, float]]:
        """Grid points as ``(snr1_db, snr2_db, alpha, beta)`` in row-major order."""
        ax = axis(self.start, self.stop, self.step)
        if self.mode == "snr":
            return [(s1, s2, self.alpha, self.beta) for s1 in ax for s2 in ax]
        return [(self.snr1_db, self.snr2_db, a, b) for a in ax for b in ax]


@dataclass(frozen=True)
class SweepRecord:
    snr1_db: float
    snr2_db: float
    alpha: float
    beta: float
    rc1: float
    rc2: float
    feasible: bool
    rho_star: float
    r_nbs1: float
    r_nbs2: float
    delta_min: float
    delta_sum: float


def evaluate_point(point: Tuple[float, float, float, float], w: float = DEFAULT_W) -> SweepRecord:
    snr1_db, snr2_db, alpha, beta = point
    sc = StandardChannel(db_to_linear(snr1_db), db_to_linear(snr2_db), alpha, beta, w)
    out = solve_nbs(sc)
    rc = out.competitive_rates
    if out.agreement:
        d_min, d_sum = deltas(out.nbs_rates, rc)
        rho = out.rho_star
    else:
        d_min = d_sum = 1.0
        rho = NO_AGREEMENT
    return SweepRecord(snr1_db, snr2_db, alpha, beta, rc.r1, rc.r2, out.agreement, rho,
                       out.nbs_rates.r1, out.nbs_rates.r2, d_min, d_sum)


def _evaluate_chunk(args: Tuple[Sequence[Tuple[float, float, float, float]], float]) -> List[SweepRecord]:
    pts, w = args
    return [evaluate_point(p, w) for p in pts]


def run_sweep(spec: SweepSpec, workers: int = 1, chunk: int = 256) -> List[SweepRecord]:
    """Evaluate every grid point of ``spec``.

    Points are independent, so they are farmed out in chunks to a process
    pool; results are returned in grid order whatever the worker count.
    """
    pts = spec.points()
    if workers <= 1 or len(pts) <= chunk:
        return _evaluate_chunk((pts, spec.w))
    chunks = [(pts[i:i + chunk], spec.w) for i in range(0, len(pts), chunk)]
    out: List[SweepRecord] = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_evaluate_chunk, chunks):
            out.extend(part)
    return out


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    return f"{value:.10g}"


def write_csv(records: Iterable[SweepRecord], fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow([_fmt(v) for v in astuple(rec)])


def records_to_csv(records: Iterable[SweepRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()
