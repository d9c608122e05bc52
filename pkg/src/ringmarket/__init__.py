"""Two-firm capacity-then-price competition on a ring under transaction taxes."""

from ringmarket.geography import Geography, canonical_arrangement, ring_distance
from ringmarket.market import MarketConfig, MarketOutcome, allocate
from ringmarket.taxation import TaxKind, TaxScheme, effective_price

__all__ = [
    "Geography",
    "MarketConfig",
    "MarketOutcome",
    "TaxKind",
    "TaxScheme",
    "allocate",
    "canonical_arrangement",
    "effective_price",
    "ring_distance",
]

__version__ = "0.1.0"
