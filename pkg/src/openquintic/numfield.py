"""Exact arithmetic in the real quadratic field Q(sqrt(5)).

Every coefficient in this package is a ``QuadRat``: an exact value
``rat + irr*sqrt(5)`` with both components stored as reduced
``fractions.Fraction`` objects.  The class is immutable, hashable and
supports mixed arithmetic with ``int`` and ``Fraction``.

The text grammar used by the serialisers and the CLI is

    <rat> [ (+|-) <rat>*r5 ]      with  <rat> = [-]digits[/digits]

so ``"3/2"``, ``"-25"``, ``"1/5*r5"`` and ``"3-1/2*r5"`` are all valid.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

Rat = Union[int, Fraction]


class FieldError(ArithmeticError):
    """Division by zero or another impossible field operation."""


class ParseError(ValueError):
    """Malformed textual input; carries the offending position."""

    def __init__(self, text: str, pos: int, message: str):
        super().__init__(f"{message} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} into a rational")


class QuadRat:
    """An element ``rat + irr*sqrt(5)`` of Q(sqrt(5))."""

    __slots__ = ("rat", "irr")

    def __init__(self, rat: Rat = 0, irr: Rat = 0):
        object.__setattr__(self, "rat", _frac(rat))
        object.__setattr__(self, "irr", _frac(irr))

    def __setattr__(self, name, value):
        raise AttributeError("QuadRat is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def sqrt5() -> "QuadRat":
        return QuadRat(0, 1)

    @classmethod
    def coerce(cls, x) -> "QuadRat":
        if isinstance(x, QuadRat):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        raise TypeError(f"cannot coerce {type(x).__name__} into Q(sqrt5)")

    # -- predicates ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.rat and not self.irr

    def is_rational(self) -> bool:
        return not self.irr

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = _as_qr(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadRat(self.rat + other.rat, self.irr + other.irr)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_qr(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadRat(self.rat - other.rat, self.irr - other.irr)

    def __rsub__(self, other):
        other = _as_qr(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __neg__(self):
        return QuadRat(-self.rat, -self.irr)

    def __mul__(self, other):
        other = _as_qr(other)
        if other is NotImplemented:
            return NotImplemented
        # (x + y r5)(u + v r5) = (xu + 5yv) + (xv + yu) r5
        return QuadRat(
            self.rat * other.rat + 5 * self.irr * other.irr,
            self.rat * other.irr + self.irr * other.rat,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_qr(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _as_qr(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadRat(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> "QuadRat":
        return QuadRat(self.rat, -self.irr)

    def norm(self) -> Fraction:
        """Field norm ``rat**2 - 5*irr**2`` (a rational)."""
        return self.rat * self.rat - 5 * self.irr * self.irr

    def inverse(self) -> "QuadRat":
        if self.is_zero():
            raise FieldError("division by zero in Q(sqrt5)")
        n = self.norm()
        return QuadRat(self.rat / n, -self.irr / n)

    def sqrt(self) -> "QuadRat | None":
        """An exact square root inside Q(sqrt5), or None if there is none."""
        if self.is_zero():
            return QuadRat(0)
        a, b = self.rat, self.irr
        if not b:
            r = _rat_sqrt(a)
            if r is not None:
                return QuadRat(r)
            r = _rat_sqrt(a / 5)
            if r is not None:
                return QuadRat(0, r)
            return None
        # (x + y r5)^2 = a + b r5 with 2xy = b and x^2 + 5y^2 = a
        disc = a * a - 5 * b * b
        d = _rat_sqrt(disc)
        if d is None:
            return None
        for x2 in ((a + d) / 2, (a - d) / 2):
            x = _rat_sqrt(x2)
            if x is not None and x:
                return QuadRat(x, b / (2 * x))
        return None

    # -- comparisons / hashing -----------------------------------------

    def __eq__(self, other):
        other = _as_qr(other)
        if other is NotImplemented:
            return NotImplemented
        return self.rat == other.rat and self.irr == other.irr

    def __hash__(self):
        return hash((self.rat, self.irr))

    # -- text ------------------------------------------------------------

    def __str__(self):
        return qr_print(self)

    def __repr__(self):
        return f"QuadRat({self.rat!r}, {self.irr!r})"


def _as_qr(x):
    if isinstance(x, QuadRat):
        return x
    if isinstance(x, (int, Fraction)):
        return QuadRat(x)
    return NotImplemented


def _rat_sqrt(x: Fraction) -> Fraction | None:
    """Exact rational square root, or None."""
    if x < 0:
        return None
    if x == 0:
        return Fraction(0)
    pn = math.isqrt(x.numerator)
    pd = math.isqrt(x.denominator)
    if pn * pn == x.numerator and pd * pd == x.denominator:
        return Fraction(pn, pd)
    return None


ZERO = QuadRat(0)
ONE = QuadRat(1)
SQRT5 = QuadRat(0, 1)

_RAT_RE = re.compile(r"-?\d+(?:/\d+)?")


def _print_rat(x: Fraction) -> str:
    return str(x)  # Fraction prints reduced "p/q" / "p" with positive q


def qr_print(a: QuadRat) -> str:
    """Canonical text form; inverse of :func:`qr_parse` on its output."""
    if a.is_zero():
        return "0"
    if not a.irr:
        return _print_rat(a.rat)
    irr_part = f"{_print_rat(abs(a.irr))}*r5"
    if not a.rat:
        return f"{_print_rat(a.irr)}*r5"
    sign = "+" if a.irr > 0 else "-"
    return f"{_print_rat(a.rat)}{sign}{irr_part}"


def qr_parse(text: str) -> QuadRat:
    """Parse the grammar ``<rat> [ (+|-) <rat>*r5 ]`` (pure terms allowed)."""
    s = text.strip()
    if not s:
        raise ParseError(text, 0, "empty input")
    pos = 0
    m = _RAT_RE.match(s, pos)
    if m is None:
        raise ParseError(text, pos, "expected a rational number")
    first = Fraction(m.group())
    pos = m.end()
    if pos == len(s):
        return QuadRat(first)
    if s.startswith("*r5", pos):
        pos += 3
        if pos != len(s):
            raise ParseError(text, pos, "trailing characters")
        return QuadRat(0, first)
    if s[pos] not in "+-":
        raise ParseError(text, pos, "expected '+', '-' or '*r5'")
    sign = -1 if s[pos] == "-" else 1
    pos += 1
    m = _RAT_RE.match(s, pos)
    if m is None:
        raise ParseError(text, pos, "expected a rational coefficient of r5")
    second = Fraction(m.group())
    pos = m.end()
    if not s.startswith("*r5", pos):
        raise ParseError(text, pos, "expected '*r5'")
    pos += 3
    if pos != len(s):
        raise ParseError(text, pos, "trailing characters")
    return QuadRat(first, sign * second)
