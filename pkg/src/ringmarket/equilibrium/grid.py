from __future__ import annotations

from dataclasses import dataclass
from math import floor

import numpy as np


def grid_points(lo: float, hi: float, step: float) -> np.ndarray:
    """``lo + k*step`` for every k that stays within ``hi`` (inclusive when reachable)."""
    count = floor((hi - lo) / step + 1e-9) + 1
    return lo + np.arange(count) * step


@dataclass(frozen=True)
class StrategyGrid:
    q_min: float = 0.0
    q_max: float = 160.0
    q_step: float = 5.0
    p_min: float = 90.0
    p_max: float = 120.0
    # q_step / 12: with twelve buyers every market-clearing price of the
    # quantity grid is a grid price
    p_step: float = 5.0 / 12.0

    def __post_init__(self) -> None:
        for name in ("q_min", "q_max", "q_step", "p_min", "p_max", "p_step"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        for axis in ("q", "p"):
            lo, hi, step = (getattr(self, f"{axis}_{k}") for k in ("min", "max", "step"))
            if not step > 0:
                raise ValueError(f"{axis}_step must be positive, got {step}")
            if lo < 0:
                raise ValueError(f"{axis}_min must be nonnegative, got {lo}")
            if lo > hi:
                raise ValueError(f"{axis}_min {lo} exceeds {axis}_max {hi}")

    def quantities(self) -> np.ndarray:
        return grid_points(self.q_min, self.q_max, self.q_step)

    def prices(self) -> np.ndarray:
        return grid_points(self.p_min, self.p_max, self.p_step)
