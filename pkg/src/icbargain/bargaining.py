"""Nash bargaining over the FDM rate region.

User 1 takes a share ``rho`` of the band and user 2 the rest, each at full
power inside its share. The disagreement point is the competitive (flat
power) Nash equilibrium. When both users can beat that point at the same
time, the bargaining solution maximizes the product of rate gains.
"""

from __future__ import annotations

import math
import sys
from decimal import Decimal, localcontext
from dataclasses import dataclass
from typing import List, Optional, Tuple

from ._search import bisect_increasing, golden_max
from .channel import RatePair, StandardChannel
from .competitive import competitive_rates

__all__ = [
    "FEASIBILITY_EPS",
    "FeasibilityReport",
    "BargainingOutcome",
    "fdm_rate",
    "fdm_rate_slope",
    "fdm_rates",
    "share_gap",
    "threshold_share",
    "fdm_feasible",
    "nash_product",
    "solve_nbs",
    "even_split_thresholds",
    "check_even_split",
    "region_boundary",
    "invert_share",
    "region_membership",
]

FEASIBILITY_EPS = 1e-10
# below this share the rate is taken as its continuous limit, 0
_TINY_SHARE = 1e-300


def fdm_rate(snr: float, share: float, w: float = 2.0) -> float:
    """Rate of a user holding ``share`` of the band at full power."""
    if share <= _TINY_SHARE:
        return 0.0
    return share * (w / 2.0) * math.log1p(snr / share) / math.log(2.0)


def fdm_rate_slope(snr: float, share: float, w: float = 2.0) -> float:
    """Derivative of :func:`fdm_rate` with respect to the share."""
    return (w / 2.0) * (math.log1p(snr / share) - snr / (share + snr)) / math.log(2.0)


def fdm_rates(sc: StandardChannel, rho: float) -> RatePair:
    """Rates when user 1 gets ``rho`` of the band and user 2 gets ``1 - rho``."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho!r}")
    return RatePair(fdm_rate(sc.snr1, rho, sc.w), fdm_rate(sc.snr2, 1.0 - rho, sc.w))


def share_gap(x: float, y: float, rho: float) -> float:
    """``(1 + x/rho)**rho - 1 - x/(1 + y)``; increasing in ``rho``."""
    if rho <= _TINY_SHARE:
        return -x / (1.0 + y)
    return math.expm1(rho * math.log1p(x / rho)) - x / (1.0 + y)


def threshold_share(x: float, y: float) -> float:
    """Smallest band share at which an interference-free user with SNR ``x``
    matches the rate it gets at full band against interference ``y``.

    This is the root in ``(0, 1]`` of :func:`share_gap`. The bracket is
    bisected down to adjacent doubles and the endpoint with the smaller
    residual is returned; near-ties are settled in 40-digit decimal.
    """
    if not x > 0:
        raise ValueError(f"x must be > 0, got {x!r}")
    if not y >= 0:
        raise ValueError(f"y must be >= 0, got {y!r}")
    if y == 0:
        return 1.0
    lo, hi = bisect_increasing(lambda r: share_gap(x, y, r), 0.0, 1.0, xtol=0.0)
    if lo <= 0.0:
        return hi
    g_lo, g_hi = abs(share_gap(x, y, lo)), abs(share_gap(x, y, hi))
    floor = 16.0 * sys.float_info.epsilon * (1.0 + x)
    if floor > 1e-12 and abs(g_lo - g_hi) < floor:
        # both residuals sit at the rounding floor of share_gap, which only
        # matters for large x; decide exactly
        g_lo, g_hi = abs(_share_gap_exact(x, y, lo)), abs(_share_gap_exact(x, y, hi))
    return lo if g_lo < g_hi else hi


def _share_gap_exact(x: float, y: float, rho: float) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = 40
        dx, dy, dr = Decimal(x), Decimal(y), Decimal(rho)
        return (dr * (1 + dx / dr).ln()).exp() - 1 - dx / (1 + dy)


@dataclass(frozen=True)
class FeasibilityReport:
    rho1_min: float
    rho2_min: float

    @property
    def slack(self) -> float:
        return 1.0 - self.rho1_min - self.rho2_min

    @property
    def feasible(self) -> bool:
        return self.slack >= FEASIBILITY_EPS


def fdm_feasible(sc: StandardChannel) -> FeasibilityReport:
    """Minimal shares each user needs to reach its competitive rate.

    FDM bargaining has something to offer both users only if the two
    minimal shares fit in the band together. A tie (zero slack) is
    reported as infeasible.
    """
    return FeasibilityReport(
        threshold_share(sc.snr1, sc.alpha * sc.snr2),
        threshold_share(sc.snr2, sc.beta * sc.snr1),
    )


def nash_product(sc: StandardChannel, rho: float, rc: Optional[RatePair] = None) -> float:
    """Product of rate gains over the competitive point at split ``rho``.

    Negative when exactly one user is below its competitive rate.
    """
    if rc is None:
        rc = competitive_rates(sc)
    r = fdm_rates(sc, rho)
    return (r.r1 - rc.r1) * (r.r2 - rc.r2)


@dataclass(frozen=True)
class BargainingOutcome:
    """Result of bargaining: an agreement on ``rho_star`` or disagreement.

    On disagreement ``rho_star`` is None and the NBS rates are the
    competitive rates.
    """

    agreement: bool
    rho_star: Optional[float]
    nbs_rates: RatePair
    competitive_rates: RatePair
    nash_product: float
    feasibility: FeasibilityReport

    @property
    def kind(self) -> str:
        return "agreement" if self.agreement else "disagreement"

    @property
    def gains(self) -> Tuple[float, float]:
        return (self.nbs_rates.r1 / self.competitive_rates.r1,
                self.nbs_rates.r2 / self.competitive_rates.r2)

    def as_dict(self) -> dict:
        g1, g2 = self.gains
        return {
            "kind": self.kind,
            "competitive": self.competitive_rates.as_dict(),
            "feasible": self.feasibility.feasible,
            "rho1_min": self.feasibility.rho1_min,
            "rho2_min": self.feasibility.rho2_min,
            "rho_star": self.rho_star,
            "nbs": self.nbs_rates.as_dict(),
            "gains": {"g1": g1, "g2": g2},
            "nash_product": self.nash_product,
        }


def solve_nbs(sc: StandardChannel, tol: float = 1e-10) -> BargainingOutcome:
    """Nash bargaining solution on the FDM rate region.

    The log of the Nash product is strictly concave on the open interval
    ``(rho1_min, 1 - rho2_min)`` and is maximized there by golden-section
    search down to a bracket of width ``tol``. The top of the objective is
    flat enough that rounding noise limits golden-section to about 1e-8 in
    ``rho``, so the result is then polished by bisecting on the sign of the
    analytic derivative in a small window around it.
    """
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol!r}")
    rc = competitive_rates(sc)
    feas = fdm_feasible(sc)
    if not feas.feasible:
        return BargainingOutcome(False, None, rc, rc, 0.0, feas)

    s1, s2, w = sc.snr1, sc.snr2, sc.w

    def log_product(rho: float) -> float:
        g1 = fdm_rate(s1, rho, w) - rc.r1
        g2 = fdm_rate(s2, 1.0 - rho, w) - rc.r2
        if g1 <= 0.0 or g2 <= 0.0:
            return -math.inf
        return math.log(g1) + math.log(g2)

    def slope(rho: float) -> float:
        g1 = fdm_rate(s1, rho, w) - rc.r1
        g2 = fdm_rate(s2, 1.0 - rho, w) - rc.r2
        return fdm_rate_slope(s2, 1.0 - rho, w) / g2 - fdm_rate_slope(s1, rho, w) / g1

    lo, hi = feas.rho1_min, 1.0 - feas.rho2_min
    rho, _ = golden_max(log_product, lo, hi, tol)
    # widen a window around the golden-section point until the (negated)
    # derivative changes sign across it, then bisect
    step = tol
    while step < hi - lo:
        a, b = rho - step, rho + step
        if a <= lo or b >= hi:
            break
        if slope(a) <= 0.0 <= slope(b):
            left, right = bisect_increasing(slope, a, b, xtol=0.0)
            rho = 0.5 * (left + right)
            break
        step *= 4.0
    rates = fdm_rates(sc, rho)
    product = (rates.r1 - rc.r1) * (rates.r2 - rc.r2)
    return BargainingOutcome(True, rho, rates, rc, product, feas)


def even_split_thresholds(alpha: float, beta: float) -> Tuple[float, float]:
    """SNR levels above which an even band split beats the competitive rates."""
    if not (alpha > 0 and beta > 0):
        raise ValueError("thresholds need alpha > 0 and beta > 0")
    t1 = 0.5 * (alpha ** 2 * beta ** 4) ** (-1.0 / 3.0)
    t2 = 0.5 * (beta ** 2 * alpha ** 4) ** (-1.0 / 3.0)
    return t1, t2


def check_even_split(sc: StandardChannel) -> bool:
    """Sufficient SNR condition for a bargaining gain over competition."""
    t1, t2 = even_split_thresholds(sc.alpha, sc.beta)
    return sc.snr1 >= t1 and sc.snr2 >= t2


def region_boundary(sc: StandardChannel, n: int = 512) -> List[Tuple[float, RatePair]]:
    """Sample the FDM region boundary at ``n`` evenly spaced splits."""
    if n < 2:
        raise ValueError("need at least two boundary samples")
    out = []
    for i in range(n):
        rho = 1.0 if i == n - 1 else i / (n - 1)
        out.append((rho, fdm_rates(sc, rho)))
    return out


def invert_share(snr: float, w: float, target: float) -> float:
    """Smallest band share giving rate ``target`` at SNR ``snr``."""
    full = fdm_rate(snr, 1.0, w)
    if target < 0:
        raise ValueError(f"target rate must be >= 0, got {target!r}")
    if target > full:
        raise ValueError(f"target rate {target!r} exceeds full-band rate {full!r}")
    if target == 0:
        return 0.0
    if target == full:
        return 1.0
    _, hi = bisect_increasing(lambda r: fdm_rate(snr, r, w) - target, 0.0, 1.0, xtol=1e-12)
    return hi


def region_membership(p: RatePair, sc: StandardChannel, tol: float = 1e-9) -> dict:
    """Whether ``p`` is FDM-achievable and whether it is also individually
    rational (no worse than the competitive point for either user).

    ``tol`` absorbs the rounding in the share inversions.
    """
    try:
        used = invert_share(sc.snr1, sc.w, p.r1) + invert_share(sc.snr2, sc.w, p.r2)
    except ValueError:
        in_fdm = False
    else:
        in_fdm = used <= 1.0 + tol
    rc = competitive_rates(sc)
    in_game = in_fdm and p.r1 >= rc.r1 and p.r2 >= rc.r2
    return {"in_fdm": in_fdm, "in_game_region": in_game}
