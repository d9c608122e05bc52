"""Transaction-cost schemes and the effective price a buyer pays."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ringmarket.geography import Geography

DEFAULT_LAMBDA = 0.1
DEFAULT_GAMMA = 1.0


class TaxKind(str, Enum):
    NONE = "none"
    CARDINAL = "cardinal"
    ORDINAL = "ordinal"


@dataclass(frozen=True)
class TaxScheme:
    """A tax kind together with its scale ``lam`` and distance exponent ``gamma``.

    The cardinal kind taxes a purchase by the physical distance to the firm,
    the ordinal kind by the firm's distance rank (the closest firm is untaxed).
    """

    kind: TaxKind = TaxKind.NONE
    lam: float = DEFAULT_LAMBDA
    gamma: float = DEFAULT_GAMMA

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", TaxKind(self.kind))
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "gamma", float(self.gamma))
        if not self.lam >= 0:
            raise ValueError(f"lambda must be nonnegative, got {self.lam}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    def rate(self, distance, rank):
        """Ad valorem surcharge rate; works elementwise on arrays."""
        if self.kind is TaxKind.NONE:
            return np.zeros_like(np.asarray(distance, dtype=float))
        base = np.asarray(distance if self.kind is TaxKind.CARDINAL else rank, dtype=float)
        # 0**gamma is 0 for gamma > 0, so the closest firm stays untaxed
        return self.lam * base**self.gamma

    def multipliers(self, geo: Geography) -> np.ndarray:
        """Buyer-by-firm factors turning posted prices into effective prices."""
        return 1.0 + self.rate(geo.distance_matrix, geo.rank_matrix)


def effective_price(price: float, distance: float, rank: int, scheme: TaxScheme) -> float:
    if price < 0 or distance < 0 or rank < 0:
        raise ValueError("price, distance and rank must be nonnegative")
    return float(price * (1.0 + scheme.rate(distance, rank)))
