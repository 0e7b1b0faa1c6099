"""Channel descriptions for the 2x2 Gaussian interference channel.

A physical channel (:class:`GeneralChannel`) is reduced to standard form
(:class:`StandardChannel`) by dividing through by the in-band noise power
``W * N0 / 2``. All solvers in the package take the standard form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Optional, Sequence

__all__ = [
    "GeneralChannel",
    "StandardChannel",
    "RatePair",
    "ReferenceBounds",
    "db_to_linear",
    "linear_to_db",
    "normalize_channel",
    "reference_bounds",
    "channel_from_json",
]

DEFAULT_W = 2.0


def db_to_linear(x_db: float) -> float:
    """Convert a power ratio in dB to linear scale."""
    return float(10.0 ** (x_db / 10.0))


def linear_to_db(x: float) -> float:
    """Convert a linear power ratio to dB.

    Raises
    ------
    ValueError
        If ``x`` is not strictly positive.
    """
    if not x > 0:
        raise ValueError(f"linear ratio must be > 0, got {x!r}")
    return 10.0 * math.log10(x)


def _positive(name: str, value: float) -> None:
    if not (value > 0 and math.isfinite(value)):
        raise ValueError(f"{name} must be finite and > 0, got {value!r}")


def _nonnegative(name: str, value: float) -> None:
    if not (value >= 0 and math.isfinite(value)):
        raise ValueError(f"{name} must be finite and >= 0, got {value!r}")


@dataclass(frozen=True)
class GeneralChannel:
    """Physical 2x2 interference channel.

    Gains are squared magnitudes ``|h_ij|^2``; ``h12`` couples transmitter 2
    into receiver 1 and ``h21`` couples transmitter 1 into receiver 2.
    """

    h11: float
    h12: float
    h21: float
    h22: float
    p1: float
    p2: float
    bandwidth: float
    n0: float

    def __post_init__(self) -> None:
        _positive("h11", self.h11)
        _positive("h22", self.h22)
        _nonnegative("h12", self.h12)
        _nonnegative("h21", self.h21)
        _positive("p1", self.p1)
        _positive("p2", self.p2)
        _positive("bandwidth", self.bandwidth)
        _positive("n0", self.n0)

    @classmethod
    def from_complex(
        cls,
        h: Sequence[Sequence[complex]],
        p: Sequence[float],
        bandwidth: float,
        n0: float,
    ) -> "GeneralChannel":
        """Build from a complex (or signed real) 2x2 gain matrix."""
        g = [[abs(complex(v)) ** 2 for v in row] for row in h]
        return cls(g[0][0], g[0][1], g[1][0], g[1][1], float(p[0]), float(p[1]),
                   float(bandwidth), float(n0))


@dataclass(frozen=True)
class StandardChannel:
    """Normalized channel: linear SNRs, interference couplings and the
    bandwidth convention ``w`` (rates carry a ``w/2`` prefactor)."""

    snr1: float
    snr2: float
    alpha: float
    beta: float
    w: float = DEFAULT_W

    def __post_init__(self) -> None:
        _positive("snr1", self.snr1)
        _positive("snr2", self.snr2)
        _nonnegative("alpha", self.alpha)
        _nonnegative("beta", self.beta)
        _positive("w", self.w)

    @classmethod
    def from_db(cls, snr1_db: float, snr2_db: float, alpha: float, beta: float,
                w: float = DEFAULT_W) -> "StandardChannel":
        return cls(db_to_linear(snr1_db), db_to_linear(snr2_db), alpha, beta, w)

    def swapped(self) -> "StandardChannel":
        """The same channel with the two users relabelled."""
        return StandardChannel(self.snr2, self.snr1, self.beta, self.alpha, self.w)


@dataclass(frozen=True)
class RatePair:
    """Rates of the two users, in bits per channel use scaled by ``w/2``."""

    r1: float
    r2: float

    def __post_init__(self) -> None:
        _nonnegative("r1", self.r1)
        _nonnegative("r2", self.r2)

    def as_dict(self) -> dict:
        return {"r1": self.r1, "r2": self.r2}


@dataclass(frozen=True)
class ReferenceBounds:
    vsi_applies: bool
    vsi_rates: Optional[RatePair]
    sato_sum_rate: float

    def as_dict(self) -> dict:
        return {
            "vsi_applies": self.vsi_applies,
            "vsi_rates": None if self.vsi_rates is None else self.vsi_rates.as_dict(),
            "sato_sum_rate": self.sato_sum_rate,
        }


def normalize_channel(ch: GeneralChannel, w: float = DEFAULT_W) -> StandardChannel:
    """Reduce a physical channel to standard form.

    ``snr_i = |h_ii|^2 P_i / (W N0 / 2)``, ``alpha = |h12|^2 / |h22|^2`` and
    ``beta = |h21|^2 / |h11|^2``.
    """
    noise = ch.bandwidth * ch.n0 / 2.0
    return StandardChannel(
        snr1=ch.h11 * ch.p1 / noise,
        snr2=ch.h22 * ch.p2 / noise,
        alpha=ch.h12 / ch.h22,
        beta=ch.h21 / ch.h11,
        w=w,
    )


def reference_bounds(sc: StandardChannel) -> ReferenceBounds:
    """Very-strong-interference rectangle and the Sato sum-rate bound.

    Both are reported for information only; the bargaining solver works on
    the FDM region.
    """
    half_w = sc.w / 2.0
    vsi = sc.alpha >= 1.0 + sc.snr1 and sc.beta >= 1.0 + sc.snr2
    vsi_rates = None
    if vsi:
        vsi_rates = RatePair(half_w * math.log2(1.0 + sc.snr1),
                             half_w * math.log2(1.0 + sc.snr2))
    mac = min(1.0 + sc.snr1 + sc.alpha * sc.snr2, 1.0 + sc.snr2 + sc.beta * sc.snr1)
    return ReferenceBounds(vsi, vsi_rates, half_w * math.log2(mac))


def channel_from_json(obj: Mapping[str, Any], w: Optional[float] = None) -> StandardChannel:
    """Parse a channel descriptor.

    Two shapes are accepted::

        {"h2": [[1.0, 0.4], [0.7, 1.0]], "p": [100, 31.6228], "w": 2, "n0": 1}
        {"snr_db": [20, 15], "alpha": 0.4, "beta": 0.7}

    In the first form ``h2`` holds squared gain magnitudes and ``w`` is the
    physical bandwidth. Complex gains may be given instead under ``h`` as
    ``[re, im]`` pairs. ``snr`` (linear) may replace ``snr_db``.
    """
    conv = DEFAULT_W if w is None else float(w)
    if "h2" in obj or "h" in obj:
        if "h2" in obj:
            h2 = obj["h2"]
            ch = GeneralChannel(
                float(h2[0][0]), float(h2[0][1]), float(h2[1][0]), float(h2[1][1]),
                float(obj["p"][0]), float(obj["p"][1]),
                float(obj.get("w", DEFAULT_W)), float(obj.get("n0", 1.0)),
            )
        else:
            h = [[complex(*v) if isinstance(v, (list, tuple)) else complex(v) for v in row]
                 for row in obj["h"]]
            ch = GeneralChannel.from_complex(h, obj["p"], obj.get("w", DEFAULT_W),
                                             obj.get("n0", 1.0))
        return normalize_channel(ch, w=conv)
    if "snr_db" in obj and "snr" in obj:
        raise ValueError("give either 'snr_db' or 'snr', not both")
    if "snr_db" in obj:
        snr = [db_to_linear(float(v)) for v in obj["snr_db"]]
    elif "snr" in obj:
        snr = [float(v) for v in obj["snr"]]
    else:
        raise ValueError("channel descriptor needs 'h2', 'h', 'snr_db' or 'snr'")
    if w is None and "w" in obj:
        conv = float(obj["w"])
    return StandardChannel(snr[0], snr[1], float(obj["alpha"]), float(obj["beta"]), conv)
