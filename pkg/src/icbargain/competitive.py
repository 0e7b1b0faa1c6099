"""Competitive (Nash equilibrium) operating points.

For the flat 2x2 channel the equilibrium is flat power allocation and the
rates have a closed form. For a K-band game with frequency-selective
gains the equilibrium is found by iterative water-filling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

import numpy as np

from .channel import RatePair, StandardChannel

__all__ = [
    "competitive_rates",
    "DiscreteGame",
    "EquilibriumResult",
    "check_allocation",
    "game_payoff",
    "water_level",
    "waterfill_best_response",
    "iterate_waterfilling",
    "flat_game",
    "game_from_json",
]


def competitive_rates(sc: StandardChannel) -> RatePair:
    """Rates at the flat-power Nash equilibrium, each user treating the
    other's signal as noise."""
    half_w = sc.w / 2.0
    r1 = half_w * math.log2(1.0 + sc.snr1 / (1.0 + sc.alpha * sc.snr2))
    r2 = half_w * math.log2(1.0 + sc.snr2 / (1.0 + sc.beta * sc.snr1))
    return RatePair(r1, r2)


@dataclass(frozen=True, eq=False)
class DiscreteGame:
    """K-band Gaussian interference game with N players.

    Attributes
    ----------
    direct : ndarray, shape (N, K)
        Direct power gains ``|h_i(k)|^2``.
    cross : ndarray, shape (N, N, K)
        ``cross[i, j, k]`` is the power gain from transmitter ``j`` into
        receiver ``i`` in band ``k``. The diagonal is ignored.
    noise : ndarray, shape (N, K)
        Receiver noise power per band.
    power : ndarray, shape (N,)
        Total power budget of each player.
    band_edges : ndarray, shape (K + 1,), optional
        Band edge frequencies; metadata only.
    """

    direct: np.ndarray
    cross: np.ndarray
    noise: np.ndarray
    power: np.ndarray
    band_edges: Optional[np.ndarray] = field(default=None)

    def __post_init__(self) -> None:
        direct = np.asarray(self.direct, dtype=float)
        noise = np.asarray(self.noise, dtype=float)
        power = np.asarray(self.power, dtype=float).reshape(-1)
        cross = np.array(self.cross, dtype=float)
        if direct.ndim != 2:
            raise ValueError("direct gains must have shape (players, bands)")
        n, k = direct.shape
        if n < 1 or k < 1:
            raise ValueError("game needs at least one player and one band")
        if noise.shape != (n, k):
            raise ValueError(f"noise shape {noise.shape} != {(n, k)}")
        if power.shape != (n,):
            raise ValueError(f"power shape {power.shape} != {(n,)}")
        if cross.shape != (n, n, k):
            raise ValueError(f"cross shape {cross.shape} != {(n, n, k)}")
        if not np.all(direct > 0):
            raise ValueError("direct gains must be > 0")
        if not np.all(cross >= 0):
            raise ValueError("cross gains must be >= 0")
        if not np.all(noise > 0):
            raise ValueError("noise must be > 0 in every band")
        if not np.all(power > 0):
            raise ValueError("power budgets must be > 0")
        for arr in (direct, cross, noise, power):
            if not np.all(np.isfinite(arr)):
                raise ValueError("game parameters must be finite")
        cross[np.arange(n), np.arange(n), :] = 0.0
        edges = self.band_edges
        if edges is not None:
            edges = np.asarray(edges, dtype=float)
            if edges.shape != (k + 1,) or not np.all(np.diff(edges) > 0):
                raise ValueError("band_edges must be K+1 strictly increasing values")
        for name, value in (("direct", direct), ("cross", cross), ("noise", noise),
                            ("power", power), ("band_edges", edges)):
            if value is not None:
                value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def n_players(self) -> int:
        return self.direct.shape[0]

    @property
    def k_bands(self) -> int:
        return self.direct.shape[1]

    def flat_allocation(self) -> np.ndarray:
        return np.repeat((self.power / self.k_bands)[:, None], self.k_bands, axis=1)

    def as_dict(self) -> dict:
        out = {
            "k": self.k_bands,
            "players": self.n_players,
            "direct": self.direct.tolist(),
            "cross": self.cross.tolist(),
            "noise": self.noise.tolist(),
            "power": self.power.tolist(),
        }
        if self.band_edges is not None:
            out["band_edges"] = self.band_edges.tolist()
        return out


@dataclass(frozen=True, eq=False)
class EquilibriumResult:
    allocation: np.ndarray
    rates: np.ndarray
    iterations: int
    converged: bool
    residual: float

    def as_dict(self) -> dict:
        return {
            "allocation": self.allocation.tolist(),
            "rates": self.rates.tolist(),
            "iterations": self.iterations,
            "converged": self.converged,
            "residual": self.residual,
        }


def check_allocation(g: DiscreteGame, alloc: np.ndarray, rtol: float = 1e-9) -> np.ndarray:
    """Validate a power allocation against the game; returns it as an array.

    Every player must spend exactly its budget (within ``rtol``) with no
    negative entries.
    """
    p = np.asarray(alloc, dtype=float)
    if p.shape != (g.n_players, g.k_bands):
        raise ValueError(f"allocation shape {p.shape} != {(g.n_players, g.k_bands)}")
    if np.any(p < 0):
        raise ValueError("allocation has negative power")
    if not np.allclose(p.sum(axis=1), g.power, rtol=rtol, atol=0.0):
        raise ValueError("allocation does not spend each player's budget")
    return p


def _interference(g: DiscreteGame, p: np.ndarray, i: int) -> np.ndarray:
    # noise plus cross-talk seen by receiver i; diagonal of cross is zero
    return g.noise[i] + np.einsum("jk,jk->k", g.cross[i], p)


def game_payoff(g: DiscreteGame, alloc: np.ndarray, i: int) -> float:
    """Rate of player ``i``: sum over bands of ``log2(1 + SINR_i(k))``."""
    p = np.asarray(alloc, dtype=float)
    if p.shape != (g.n_players, g.k_bands):
        raise ValueError(f"allocation shape {p.shape} != {(g.n_players, g.k_bands)}")
    sinr = g.direct[i] * p[i] / _interference(g, p, i)
    return float(np.sum(np.log2(1.0 + sinr)))


def water_level(floor: np.ndarray, budget: float) -> float:
    """Exact water level for noise floors ``floor`` and total ``budget``.

    Sorts the floors and finds the number of active bands ``m`` for which
    ``mu = (budget + sum of m lowest floors) / m`` lies between the m-th
    and (m+1)-th floor.
    """
    levels = np.sort(np.asarray(floor, dtype=float))
    csum = np.cumsum(levels)
    k = levels.size
    for m in range(k, 0, -1):
        mu = (budget + csum[m - 1]) / m
        if mu > levels[m - 1]:
            return float(mu)
    return float(budget + levels[0])


def waterfill_best_response(g: DiscreteGame, i: int, alloc: np.ndarray) -> np.ndarray:
    """Best response of player ``i`` to the other players in ``alloc``.

    Player ``i``'s own row of ``alloc`` is ignored.
    """
    p = np.asarray(alloc, dtype=float)
    floor = _interference(g, p, i) / g.direct[i]
    mu = water_level(floor, g.power[i])
    return np.maximum(0.0, mu - floor)


def iterate_waterfilling(
    g: DiscreteGame,
    tol: float = 1e-9,
    max_iters: int = 100,
    init: Optional[np.ndarray] = None,
) -> EquilibriumResult:
    """Round-robin iterative water-filling from the flat allocation.

    Each round updates players 0..N-1 in order, each playing its best
    response to the current powers of the others. Stops once a whole
    round moves no band's power by more than ``tol``. Running out of
    rounds is reported through ``converged=False``, not raised.
    """
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol!r}")
    p = g.flat_allocation() if init is None else check_allocation(g, init).copy()
    residual = math.inf
    rounds = 0
    while rounds < max_iters:
        rounds += 1
        residual = 0.0
        for i in range(g.n_players):
            new = waterfill_best_response(g, i, p)
            residual = max(residual, float(np.max(np.abs(new - p[i]))))
            p[i] = new
        if residual <= tol:
            break
    rates = np.array([game_payoff(g, p, i) for i in range(g.n_players)])
    p.setflags(write=False)
    return EquilibriumResult(p, rates, rounds, residual <= tol, residual)


def flat_game(sc: StandardChannel, k: int = 1) -> DiscreteGame:
    """Two-player K-band game equivalent to a flat standard channel.

    Noise and power are split evenly so that every band sees the full-band
    SINR. Each band contributes one ``log2(1 + SINR)`` term, so the game's
    rates equal :func:`competitive_rates` with ``w = 2 * k``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    ones = np.ones(k)
    cross = np.zeros((2, 2, k))
    cross[0, 1] = sc.alpha
    cross[1, 0] = sc.beta
    return DiscreteGame(
        direct=np.vstack([ones, ones]),
        cross=cross,
        noise=np.full((2, k), 1.0 / k),
        power=np.array([sc.snr1, sc.snr2]),
    )


def game_from_json(obj: Mapping[str, Any]) -> DiscreteGame:
    """Build a game from its JSON descriptor.

    ``{"k": 4, "players": 2, "direct": [[...]], "cross": [[[...]]],
    "noise": [[...]], "power": [P1, P2]}``; ``band_edges`` is optional.
    """
    g = DiscreteGame(
        direct=np.asarray(obj["direct"], dtype=float),
        cross=np.asarray(obj["cross"], dtype=float),
        noise=np.asarray(obj["noise"], dtype=float),
        power=np.asarray(obj["power"], dtype=float),
        band_edges=obj.get("band_edges"),
    )
    if "k" in obj and int(obj["k"]) != g.k_bands:
        raise ValueError(f"'k' is {obj['k']} but gains have {g.k_bands} bands")
    if "players" in obj and int(obj["players"]) != g.n_players:
        raise ValueError(f"'players' is {obj['players']} but gains have {g.n_players} rows")
    return g
