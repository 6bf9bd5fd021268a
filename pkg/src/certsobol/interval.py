"""Vectorized interval arithmetic with outward rounding.

Every operation returns an interval that contains the exact real result of the
operation applied to any points of its operands. Rounding is directed outward
with :func:`numpy.nextafter`, which is coarser than switching the FPU rounding
mode but portable and thread-safe.
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray


def down(x: ArrayLike) -> NDArray[np.float64]:
    """Next float toward ``-inf``."""
    return np.nextafter(x, -np.inf)


def up(x: ArrayLike) -> NDArray[np.float64]:
    """Next float toward ``+inf``."""
    return np.nextafter(x, np.inf)


@dataclass(frozen=True)
class Interval:
    """Elementwise closed intervals ``[lo, hi]`` over arrays of equal shape."""

    lo: NDArray[np.float64]
    hi: NDArray[np.float64]

    def __post_init__(self) -> None:
        lo = np.asarray(self.lo, dtype=np.float64)
        hi = np.asarray(self.hi, dtype=np.float64)
        if lo.shape != hi.shape:
            raise ValueError("interval bounds must have the same shape")
        if np.any(lo > hi):
            raise ValueError("interval lower bound exceeds upper bound")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: ArrayLike) -> "Interval":
        x = np.asarray(x, dtype=np.float64)
        return cls(x, x.copy())

    @property
    def width(self) -> NDArray[np.float64]:
        return self.hi - self.lo

    def straddles_zero(self) -> NDArray[np.bool_]:
        return (self.lo <= 0.0) & (self.hi >= 0.0)

    def __add__(self, other: Union["Interval", float]) -> "Interval":
        other = _coerce(other)
        return Interval(down(self.lo + other.lo), up(self.hi + other.hi))

    def __sub__(self, other: Union["Interval", float]) -> "Interval":
        other = _coerce(other)
        return Interval(down(self.lo - other.hi), up(self.hi - other.lo))

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other: Union["Interval", float]) -> "Interval":
        other = _coerce(other)
        products = np.stack(
            [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi]
        )
        return Interval(down(products.min(axis=0)), up(products.max(axis=0)))

    def __truediv__(self, other: Union["Interval", float]) -> "Interval":
        """Division by an interval that does not contain zero."""
        other = _coerce(other)
        if np.any(other.straddles_zero()):
            raise ZeroDivisionError("interval divisor contains zero")
        quotients = np.stack(
            [self.lo / other.lo, self.lo / other.hi, self.hi / other.lo, self.hi / other.hi]
        )
        return Interval(down(quotients.min(axis=0)), up(quotients.max(axis=0)))

    def square(self) -> "Interval":
        """Tight enclosure of ``x * x`` (non-negative, unlike ``self * self``)."""
        lo2 = self.lo * self.lo
        hi2 = self.hi * self.hi
        upper = up(np.maximum(lo2, hi2))
        lower = np.where(self.straddles_zero(), 0.0, down(np.minimum(lo2, hi2)))
        return Interval(np.maximum(lower, 0.0), upper)

    def sum(self) -> "Interval":
        """Enclosure of the sum of all elements, independent of their order.

        :func:`math.fsum` is correctly rounded, so one step outward on each side suffices.
        """
        lower = down(math.fsum(self.lo.ravel().tolist()))
        upper = up(math.fsum(self.hi.ravel().tolist()))
        return Interval(lower, upper)

    def mean(self) -> "Interval":
        total = self.sum()
        n = float(self.lo.size)
        return Interval(down(total.lo / n), up(total.hi / n))


def _coerce(value: Union[Interval, float]) -> Interval:
    if isinstance(value, Interval):
        return value
    return Interval.point(value)
