"""Ring geography: positions, shorter-arc distances and distance ranks."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np


def ring_distance(x: float, y: float, ring_length: float = 1.0) -> float:
    """Shorter-arc distance between two points on a ring."""
    if not ring_length > 0:
        raise ValueError(f"ring length must be positive, got {ring_length}")
    for pos in (x, y):
        if not 0 <= pos < ring_length:
            raise ValueError(f"position {pos} outside [0, {ring_length})")
    gap = abs(x - y)
    return min(gap, ring_length - gap)


def ranks_from_distances(distances: Sequence[float]) -> list[int]:
    """Rank firms by distance (0 = closest); equal distances go to the lower index."""
    order = sorted(range(len(distances)), key=lambda i: (distances[i], i))
    ranks = [0] * len(distances)
    for rank, firm in enumerate(order):
        ranks[firm] = rank
    return ranks


@dataclass(frozen=True)
class Geography:
    ring_length: float
    firm_positions: tuple[float, ...]
    buyer_positions: tuple[float, ...]

    def __post_init__(self) -> None:
        length = float(self.ring_length)
        if not length > 0:
            raise ValueError(f"ring_length must be positive, got {self.ring_length}")
        object.__setattr__(self, "ring_length", length)
        object.__setattr__(self, "firm_positions", self._normalize(self.firm_positions, "firm"))
        object.__setattr__(self, "buyer_positions", self._normalize(self.buyer_positions, "buyer"))
        if not self.firm_positions:
            raise ValueError("at least one firm is required")
        if not self.buyer_positions:
            raise ValueError("at least one buyer is required")
        if len(set(self.firm_positions)) != len(self.firm_positions):
            raise ValueError("firm positions must be pairwise distinct")

    def _normalize(self, positions: Sequence[float], what: str) -> tuple[float, ...]:
        out = []
        for pos in positions:
            pos = float(pos)
            if pos == self.ring_length:
                pos = 0.0
            if not 0 <= pos < self.ring_length:
                raise ValueError(f"{what} position {pos} outside [0, {self.ring_length})")
            out.append(pos)
        return tuple(out)

    @property
    def n_firms(self) -> int:
        return len(self.firm_positions)

    @property
    def n_buyers(self) -> int:
        return len(self.buyer_positions)

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        """Buyer-by-firm matrix of ring distances."""
        out = np.array(
            [[ring_distance(b, f, self.ring_length) for f in self.firm_positions]
             for b in self.buyer_positions]
        )
        out.setflags(write=False)
        return out

    @cached_property
    def rank_matrix(self) -> np.ndarray:
        """Buyer-by-firm matrix of ordinal distance ranks."""
        out = np.array([ranks_from_distances(row) for row in self.distance_matrix.tolist()], dtype=np.int64)
        out.setflags(write=False)
        return out

    def shifted(self, offset: float) -> Geography:
        """Rotate every position by ``offset`` around the ring."""
        length = self.ring_length
        return Geography(
            length,
            tuple((p + offset) % length for p in self.firm_positions),
            tuple((p + offset) % length for p in self.buyer_positions),
        )


def _check_buyer(geo: Geography, buyer_index: int) -> None:
    if not 0 <= buyer_index < geo.n_buyers:
        raise IndexError(f"buyer index {buyer_index} out of range for {geo.n_buyers} buyers")


def cardinal_distances(geo: Geography, buyer_index: int) -> list[float]:
    _check_buyer(geo, buyer_index)
    return geo.distance_matrix[buyer_index].tolist()


def ordinal_ranks(geo: Geography, buyer_index: int) -> list[int]:
    _check_buyer(geo, buyer_index)
    return geo.rank_matrix[buyer_index].tolist()


def canonical_arrangement() -> Geography:
    """Unit ring with firms at 0 and 1/2 and twelve buyers at the odd 24ths.

    Every firm has six strictly closest buyers and no buyer is equidistant
    from both firms.
    """
    return Geography(1.0, (0.0, 0.5), tuple((2 * k + 1) / 24 for k in range(12)))
