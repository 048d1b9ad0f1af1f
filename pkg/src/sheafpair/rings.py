"""Exact coefficient rings: the rationals (a field) and the integers (a PID).

Matrix code works on raw Python numbers (``int`` for ZZ, ``Fraction`` for QQ)
and asks a :class:`Ring` for the arithmetic it cannot do with operators alone
(gcd, units, Euclidean division). :class:`Scalar` is the tagged value type for
the public scalar API and the wire format.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import AlgebraError, MixedRings

Number = Union[int, Fraction]


class Ring:
    """Base class; use the module-level ``QQ`` and ``ZZ`` instances."""

    name: str
    tag: str
    is_field: bool

    def coerce(self, value) -> Number:
        raise NotImplementedError

    def is_unit(self, a: Number) -> bool:
        raise NotImplementedError

    def canonical_associate(self, a: Number) -> tuple[Number, Number]:
        raise NotImplementedError

    def gcd_ext(self, a: Number, b: Number) -> tuple[Number, Number, Number]:
        raise NotImplementedError

    def divmod(self, a: Number, b: Number) -> tuple[Number, Number]:
        raise NotImplementedError

    def magnitude(self, a: Number) -> int:
        """Size used to pick SNF pivots: ``|a|`` over ZZ, 1 for nonzero rationals."""
        raise NotImplementedError

    @property
    def zero(self) -> Number:
        return self.coerce(0)

    @property
    def one(self) -> Number:
        return self.coerce(1)

    def inverse(self, a: Number) -> Number:
        if not self.is_unit(a):
            raise AlgebraError(f"{self.format(a)} is not a unit in {self.name}", "NOT_A_UNIT")
        return self.coerce(Fraction(1) / a)

    def divides(self, a: Number, b: Number) -> bool:
        if a == 0:
            return b == 0
        return self.divmod(b, a)[1] == 0

    def exact_div(self, a: Number, b: Number) -> Number:
        q, r = self.divmod(a, b)
        if r != 0:
            raise AlgebraError(f"{self.format(b)} does not divide {self.format(a)}", "NOT_DIVISIBLE")
        return q

    def parse(self, text) -> Number:
        if isinstance(text, (int, Fraction)):
            return self.coerce(text)
        if not isinstance(text, str):
            raise ValueError(f"scalar must be a string, got {text!r}")
        s = text.strip().replace("−", "-")
        if not s:
            raise ValueError("empty scalar")
        return self.coerce(Fraction(s))

    def format(self, a: Number) -> str:
        a = Fraction(a)
        if a.denominator == 1:
            return str(a.numerator)
        return f"{a.numerator}/{a.denominator}"

    def __repr__(self) -> str:
        return self.name.upper()

    def __reduce__(self):
        return (ring_from_name, (self.name,))


class RationalField(Ring):
    name = "qq"
    tag = "RATIONAL"
    is_field = True

    def coerce(self, value) -> Fraction:
        if isinstance(value, float):
            raise TypeError("floating point values are not exact")
        return Fraction(value)

    def is_unit(self, a):
        return a != 0

    def canonical_associate(self, a):
        if a == 0:
            return Fraction(1), Fraction(0)
        return Fraction(a), Fraction(1)

    def gcd_ext(self, a, b):
        if a != 0:
            return Fraction(1), 1 / Fraction(a), Fraction(0)
        if b != 0:
            return Fraction(1), Fraction(0), 1 / Fraction(b)
        return Fraction(0), Fraction(0), Fraction(0)

    def divmod(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero")
        return Fraction(a) / b, Fraction(0)

    def magnitude(self, a):
        return 0 if a == 0 else 1


class IntegerRing(Ring):
    name = "zz"
    tag = "INTEGER"
    is_field = False

    def coerce(self, value) -> int:
        if isinstance(value, bool) or isinstance(value, float):
            raise TypeError(f"not an integer: {value!r}")
        if isinstance(value, Fraction):
            if value.denominator != 1:
                raise ValueError(f"{value} is not an integer")
            return value.numerator
        if isinstance(value, int):
            return value
        raise TypeError(f"not an integer: {value!r}")

    def is_unit(self, a):
        return a in (1, -1)

    def canonical_associate(self, a):
        if a < 0:
            return -1, -a
        return 1, a

    def gcd_ext(self, a, b):
        if a == 0 and b == 0:
            return 0, 0, 0
        old_r, r = a, b
        old_x, x = 1, 0
        old_y, y = 0, 1
        while r != 0:
            q = old_r // r
            old_r, r = r, old_r - q * r
            old_x, x = x, old_x - q * x
            old_y, y = y, old_y - q * y
        if old_r < 0:
            old_r, old_x, old_y = -old_r, -old_x, -old_y
        return old_r, old_x, old_y

    def divmod(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by zero")
        return divmod(a, b)

    def magnitude(self, a):
        return abs(a)


QQ = RationalField()
ZZ = IntegerRing()


def ring_from_name(name: str) -> Ring:
    key = name.strip().lower()
    if key in ("qq", "q", "rational", "rationals"):
        return QQ
    if key in ("zz", "z", "integer", "integers"):
        return ZZ
    raise ValueError(f"unknown ring {name!r} (expected qq or zz)")


@dataclass(frozen=True)
class Scalar:
    """An element of QQ or ZZ, tagged with its ring."""

    ring: Ring
    value: Number

    def __post_init__(self):
        object.__setattr__(self, "value", self.ring.coerce(self.value))

    @classmethod
    def parse(cls, ring: Ring, text: str) -> "Scalar":
        return cls(ring, ring.parse(text))

    def _check(self, other: "Scalar") -> None:
        if self.ring is not other.ring:
            raise MixedRings(f"cannot combine {self.ring!r} and {other.ring!r} scalars")

    def __add__(self, other):
        self._check(other)
        return Scalar(self.ring, self.value + other.value)

    def __sub__(self, other):
        self._check(other)
        return Scalar(self.ring, self.value - other.value)

    def __mul__(self, other):
        self._check(other)
        return Scalar(self.ring, self.value * other.value)

    def __neg__(self):
        return Scalar(self.ring, -self.value)

    def __str__(self):
        return self.ring.format(self.value)


def gcd_ext(a: Scalar, b: Scalar) -> tuple[Scalar, Scalar, Scalar]:
    """Return ``(g, x, y)`` with ``a*x + b*y == g`` and ``g`` the canonical gcd."""
    a._check(b)
    g, x, y = a.ring.gcd_ext(a.value, b.value)
    return Scalar(a.ring, g), Scalar(a.ring, x), Scalar(a.ring, y)


def is_unit(a: Scalar) -> bool:
    return a.ring.is_unit(a.value)


def canonical_associate(a: Scalar) -> tuple[Scalar, Scalar]:
    """Split ``a`` as ``u * c`` with ``u`` a unit and ``c`` canonical."""
    u, c = a.ring.canonical_associate(a.value)
    return Scalar(a.ring, u), Scalar(a.ring, c)
