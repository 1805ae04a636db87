from __future__ import annotations

import math

from svrgol.exceptions import InvalidArgumentError

# relative distance under which a quotient is treated as the integer it rounds to
_CEIL_TOLERANCE = 1e-9


def _check(G: float, K: int, delta: float) -> None:
    if not G > 0 or not math.isfinite(G):
        raise InvalidArgumentError(f"G must be positive and finite, got {G}")
    if K < 1:
        raise InvalidArgumentError(f"K must be >= 1, got {K}")
    if not 0 < delta < 1:
        raise InvalidArgumentError(f"delta must be in (0, 1), got {delta}")


def _numerator(G: float, K: int, delta: float) -> float:
    return 2.0 * G * G * math.log(K / delta) + G * G


def tolerant_ceil(x: float) -> int:
    nearest = round(x)
    if abs(x - nearest) <= _CEIL_TOLERANCE * max(1.0, abs(x)):
        return int(nearest)
    return int(math.ceil(x))


def required_batch_size(G: float, K: int, delta: float, eps: float) -> int:
    """Smallest batch size whose high-probability gradient error bound is at most ``eps``.

    The bound ``sqrt((2 G² log(K/δ) + G²) / n)`` holds simultaneously over ``K``
    anchors with probability ``1 - δ``.
    """
    _check(G, K, delta)
    if not eps > 0:
        raise InvalidArgumentError(f"eps must be positive, got {eps}")
    return max(1, tolerant_ceil(_numerator(G, K, delta) / (eps * eps)))


def bias_bound(G: float, K: int, delta: float, nhat: int) -> float:
    """Gradient error bound of a batch of ``nhat`` samples (zero when ``G`` is zero)."""
    if nhat < 1:
        raise InvalidArgumentError(f"nhat must be >= 1, got {nhat}")
    if G == 0:
        return 0.0
    _check(G, K, delta)
    return math.sqrt(_numerator(G, K, delta) / nhat)
