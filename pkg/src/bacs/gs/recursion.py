"""Stage-wise numerical integration of group-sequential crossing probabilities.

The test statistic is tracked on the B-value scale ``W_k = Z_k sqrt(t_k)``,
whose increments are independent ``N(theta * dt, dt)``. The sub-density of
``W_k`` over the continuation region is carried on a Simpson grid spanning
the region intersected with ``mean +/- width`` standard deviations. Exit
probabilities at the next stage are integrals of exact normal tails against
that density, so only the carried density incurs quadrature error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special

from ..errors import DomainError

__all__ = ["Propagator", "crossing_probabilities", "check_fractions", "DEFAULT_NODES"]

DEFAULT_NODES = 6001
_BLOCK = 512


def check_fractions(fractions: Sequence[float]) -> np.ndarray:
    """Validate strictly increasing information fractions ending at 1."""
    t = np.asarray(fractions, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise DomainError("information fractions must be a nonempty sequence")
    if np.any(t <= 0) or np.any(np.diff(t) <= 0) or not math.isclose(t[-1], 1.0, abs_tol=1e-12):
        raise DomainError(f"information fractions must increase strictly in (0, 1] and end at 1, got {list(t)}")
    t[-1] = 1.0
    return t


def _simpson_weights(n: int, h: float) -> np.ndarray:
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


@dataclass
class _State:
    grid: np.ndarray  # W values
    wdens: np.ndarray  # density times quadrature weight
    t: float


class Propagator:
    """Carries the continuation sub-density from stage to stage.

    Args:
        fractions: Information fractions ``t_1 < ... < t_K = 1``.
        drift: Mean of ``Z`` at full information.
        n_nodes: Odd number of grid nodes per stage.
        width: Half-width of the grid in standard deviations.
    """

    def __init__(self, fractions, drift: float, n_nodes: int = DEFAULT_NODES, width: float = 8.0):
        if n_nodes < 3 or n_nodes % 2 == 0:
            raise DomainError(f"n_nodes={n_nodes} must be odd and at least 3")
        self.t = check_fractions(fractions)
        self.drift = float(drift)
        self.n_nodes = n_nodes
        self.width = width
        self.state: _State | None = None  # None means "before stage 1"
        self.stage = 0

    def exit_probs(self, upper: float, lower: float = -math.inf) -> tuple[float, float]:
        """Probabilities of crossing above ``upper`` or below ``lower`` at the next stage.

        Both are joint with having continued through all previous stages.
        """
        k = self.stage
        tk = self.t[k]
        sk = math.sqrt(tk)
        if self.state is None:
            m = self.drift * sk
            return float(special.ndtr(m - upper)), float(special.ndtr(lower - m))
        if self.state.grid.size == 0:
            return 0.0, 0.0
        dt = tk - self.state.t
        sd = math.sqrt(dt)
        shift = self.state.grid + self.drift * dt
        pu = special.ndtr((shift - upper * sk) / sd)
        p_up = float(np.dot(self.state.wdens, pu))
        if lower == -math.inf:
            return p_up, 0.0
        return p_up, float(np.dot(self.state.wdens, special.ndtr((lower * sk - shift) / sd)))

    def advance(self, upper: float, lower: float = -math.inf) -> None:
        """Condition on continuing at the next stage, ``lower < Z_k < upper``."""
        k = self.stage
        if k >= len(self.t) - 1:
            self.stage += 1
            return
        tk = self.t[k]
        sk = math.sqrt(tk)
        mean, sd_w = self.drift * tk, sk
        lo = max(lower * sk, mean - self.width * sd_w)
        hi = min(upper * sk, mean + self.width * sd_w)
        if not lo < hi or (self.state is not None and self.state.grid.size == 0):
            self.state = _State(np.empty(0), np.empty(0), tk)
            self.stage += 1
            return
        grid = np.linspace(lo, hi, self.n_nodes)
        wts = _simpson_weights(self.n_nodes, grid[1] - grid[0])
        if self.state is None:
            dens = np.exp(-0.5 * ((grid - mean) / sd_w) ** 2) / (sd_w * math.sqrt(2 * math.pi))
        else:
            dt = tk - self.state.t
            sd = math.sqrt(dt)
            src = self.state.grid + self.drift * dt
            dens = np.empty(self.n_nodes)
            norm = 1.0 / (sd * math.sqrt(2 * math.pi))
            for i in range(0, self.n_nodes, _BLOCK):
                blk = grid[i:i + _BLOCK, None]
                kern = np.exp(-0.5 * ((blk - src[None, :]) / sd) ** 2)
                dens[i:i + _BLOCK] = kern @ self.state.wdens * norm
        self.state = _State(grid, dens * wts, tk)
        self.stage += 1


def crossing_probabilities(
    upper: Sequence[float],
    fractions: Sequence[float],
    drift: float,
    lower: Sequence[float] | None = None,
    n_nodes: int = DEFAULT_NODES,
    width: float = 8.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-stage upper and lower crossing probabilities.

    Args:
        upper: Upper z boundaries.
        fractions: Information fractions.
        drift: Mean of ``Z`` at full information.
        lower: Lower z boundaries; None means no lower boundary.
        n_nodes: Grid nodes per stage.
        width: Grid half-width in standard deviations.

    Returns:
        ``(up, lo)`` arrays of stage-wise exit probabilities.
    """
    t = check_fractions(fractions)
    k = t.size
    if len(upper) != k or (lower is not None and len(lower) != k):
        raise DomainError("boundary lengths must match the number of stages")
    lower = [-math.inf] * k if lower is None else list(lower)
    prop = Propagator(t, drift, n_nodes, width)
    up = np.empty(k)
    lo = np.empty(k)
    for i in range(k):
        up[i], lo[i] = prop.exit_probs(upper[i], lower[i])
        if i < k - 1:
            prop.advance(upper[i], lower[i])
    return up, lo
