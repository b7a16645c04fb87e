"""Small shared helpers."""
from __future__ import annotations

import math

# Fuzz applied before floor/ceil so that products like 0.3 * 10, which land an
# ulp away from an integer, resolve to the mathematically intended index.
_INDEX_FUZZ = 1e-9


def floor_index(fraction: float, n: int) -> int:
    """Coarse index ``floor(fraction * n)`` with float-noise protection."""
    return int(math.floor(fraction * n + _INDEX_FUZZ))


def ceil_index(fraction: float, n: int) -> int:
    """Coarse index ``ceil(fraction * n)`` with float-noise protection."""
    return int(math.ceil(fraction * n - _INDEX_FUZZ))
