"""Exact Gaussian rational arithmetic and exact phase comparison."""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from typing import Union

RationalLike = Union[int, Fraction]


class GaussianRational:
    """A complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: RationalLike = 0, im: RationalLike = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    # -- constructors -------------------------------------------------

    @classmethod
    def from_pair(cls, pair) -> "GaussianRational":
        return cls(pair[0], pair[1])

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        other = _coerce(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        n = other.norm2()
        if n == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def conj(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm2(self) -> Fraction:
        """Exact |z|^2."""
        return self.re * self.re + self.im * self.im

    def cross(self, other: "GaussianRational") -> Fraction:
        """Im(conj(self) * other); positive when other is CCW of self."""
        return self.re * other.im - self.im * other.re

    def dot(self, other: "GaussianRational") -> Fraction:
        return self.re * other.re + self.im * other.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    # -- comparison / hashing ----------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GaussianRational(other)
        if not isinstance(other, GaussianRational):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        if self.im == 0:
            return f"{self.re}"
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"

    def __complex__(self):
        return complex(self.re, self.im)


def _coerce(x) -> GaussianRational:
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    raise TypeError(f"cannot coerce {x!r} to GaussianRational")


def quadrant(z: GaussianRational) -> int:
    """Quadrant index of Arg z in [0, 2pi), splitting at the axes.

    0: [0, pi/2)   1: [pi/2, pi)   2: [pi, 3pi/2)   3: [3pi/2, 2pi)
    """
    if z.is_zero():
        raise ValueError("zero has no argument")
    if z.re > 0 and z.im >= 0:
        return 0
    if z.re <= 0 and z.im > 0:
        return 1
    if z.re < 0 and z.im <= 0:
        return 2
    return 3


def phase_compare(z1: GaussianRational, z2: GaussianRational) -> int:
    """Exact comparison of Arg z1 vs Arg z2 in [0, 2pi).

    Returns -1, 0, +1.  Proportional (same-ray) inputs compare equal;
    the caller breaks ties by norm where needed.
    """
    q1, q2 = quadrant(z1), quadrant(z2)
    if q1 != q2:
        return -1 if q1 < q2 else 1
    c = z1.cross(z2)
    if c > 0:
        return -1
    if c < 0:
        return 1
    return 0


def phase_sort_key(z: GaussianRational):
    """A key usable for exact phase sorting within one full turn.

    Quadrant first; inside a quadrant the cotangent-like ratio is monotone.
    """
    q = quadrant(z)
    if z.re == 0:
        # Vertical axis: the exact start of quadrant 1 (pi/2) or 3 (3pi/2).
        return (q, 0, Fraction(0))
    # tan(Arg z) is monotone within each quadrant once the axis is split off.
    return (q, 1, Fraction(z.im, 1) / z.re)


def rational_sqrt_upper(x: Fraction, scale: int = 10**6) -> Fraction:
    """A rational upper bound for sqrt(x), exact when x is a perfect square."""
    if x < 0:
        raise ValueError("negative radicand")
    n = x.numerator * scale * scale
    d = x.denominator
    r = isqrt(n // d)
    while r * r * d < n:
        r += 1
    return Fraction(r, scale)


def rational_sqrt_lower(x: Fraction, scale: int = 10**6) -> Fraction:
    """A rational lower bound for sqrt(x), exact when x is a perfect square."""
    if x < 0:
        raise ValueError("negative radicand")
    n = x.numerator * scale * scale
    d = x.denominator
    r = isqrt(n // d)
    return Fraction(r, scale)
