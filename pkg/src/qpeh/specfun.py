"""Integer-order Bessel functions of the first kind, J_0(x) ... J_N(x).

Whole rows are computed by Miller's backward recurrence

    J_{n-1}(x) = (2n / x) J_n(x) - J_{n+1}(x)

started far above the largest requested order and normalized with
J_0(x) + 2 sum_{m>=1} J_{2m}(x) = 1. The backward direction is stable both
in the evanescent region n > x and in the oscillatory region n < x, so a
single pass serves every order. Below x = 1 the step factor 2n/x can jump
past any rescaling threshold in one step, so small arguments use the power
series instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["BesselRow", "BesselRangeError", "bessel_j_row", "bessel_j"]

ORDER_LIMIT = 10**6
ARGUMENT_LIMIT = 1e6

_RESCALE_AT = 1e250
_RESCALE_BY = 1e-250
_SERIES_BELOW = 1.0
_SERIES_TERMS = 20  # (1/2)^{2m}/m! < 1e-19 beyond this for x < 1


class BesselRangeError(ArithmeticError):
    """Raised when the recurrence normalization under- or overflows."""


@dataclass(frozen=True)
class BesselRow:
    order_max: int
    argument: float
    values: np.ndarray

    def __getitem__(self, n: int) -> float:
        """J_n(x) for any integer n, using J_{-n} = (-1)^n J_n for negative orders."""
        if n < 0:
            v = self.values[-n]
            return -v if (-n) % 2 else v
        return self.values[n]


def _start_order(order_max: int, x: float, tol: float) -> int:
    pad = 40 + 10 * math.ceil(math.log10(1.0 / tol))
    start = order_max + math.ceil(x) + pad
    return start + (start % 2)  # even start keeps the normalization sum aligned


def bessel_j_row(order_max: int, argument: float, tol: float = 1e-10) -> BesselRow:
    """Return J_0(x), ..., J_N(x) for integer N = order_max and real x = argument >= 0."""
    order_max = int(order_max)
    x = float(argument)
    if order_max < 0 or order_max > ORDER_LIMIT:
        raise ValueError(f"order_max must lie in [0, {ORDER_LIMIT}], got {order_max}")
    if not (0.0 <= x <= ARGUMENT_LIMIT):
        raise ValueError(f"argument must lie in [0, {ARGUMENT_LIMIT:g}], got {argument}")

    values = np.zeros(order_max + 1)
    if x == 0.0:
        values[0] = 1.0
        return BesselRow(order_max, x, values)

    if x < _SERIES_BELOW:
        return BesselRow(order_max, x, _series_row(order_max, x))

    start = _start_order(order_max, x, tol)
    two_over_x = 2.0 / x
    # Unnormalized backward sweep. Values above order_max are only needed for the
    # normalization sum; rescaling keeps magnitudes finite and multiplies the
    # already stored tail as well.
    j_next = 0.0
    j_cur = 1e-300
    norm = 0.0
    for n in range(start, 0, -1):
        if n <= order_max:
            values[n] = j_cur
        if n % 2 == 0:
            norm += 2.0 * j_cur
        j_prev = n * two_over_x * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        if abs(j_cur) > _RESCALE_AT:
            j_cur *= _RESCALE_BY
            j_next *= _RESCALE_BY
            norm *= _RESCALE_BY
            values *= _RESCALE_BY
    values[0] = j_cur
    norm += j_cur

    if norm == 0.0 or not math.isfinite(norm):
        raise BesselRangeError(f"normalization lost for order_max={order_max}, x={x}")
    values /= norm
    return BesselRow(order_max, x, values)


def _series_row(order_max: int, x: float) -> np.ndarray:
    """sum_m (-1)^m (x/2)^{2m+n} / (m! (m+n)!), leading factor taken in log space."""
    n = np.arange(order_max + 1, dtype=float)
    half = 0.5 * x
    with np.errstate(under="ignore"):
        lead = np.exp(n * math.log(half) - np.array([math.lgamma(k + 1.0) for k in n]))
    q = half * half
    term = np.ones_like(n)
    acc = np.ones_like(n)
    for m in range(1, _SERIES_TERMS):
        term *= -q / (m * (n + m))
        acc += term
    return lead * acc


def bessel_j(n: int, x: float) -> float:
    """Scalar convenience wrapper; negative orders via parity."""
    row = bessel_j_row(abs(int(n)), x)
    return float(row[int(n)])
