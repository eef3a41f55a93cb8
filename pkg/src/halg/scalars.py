"""Exact scalar arithmetic: rationals by default, odd prime fields on request.

Every coefficient in the package is either a `fractions.Fraction` or an
`FpElement`.  Both support +, -, *, /, ==, hash and `bool` (nonzero test),
so all higher layers stay agnostic about which field is active.  Scalars
serialize to short strings ("7", "-3/2", "11") that round-trip bit-exactly.
"""

from __future__ import annotations

from fractions import Fraction


class ScalarError(ValueError):
    """Raised for malformed scalar strings or mixed-field arithmetic."""


class FpElement:
    """An element of the prime field F_p, stored as the canonical residue."""

    __slots__ = ("value", "p")

    def __init__(self, value, p):
        if p < 2:
            raise ScalarError(f"modulus must be a prime >= 2, got {p}")
        self.value = value % p
        self.p = p

    def _check(self, other):
        if isinstance(other, FpElement):
            if other.p != self.p:
                raise ScalarError(f"mixed moduli {self.p} and {other.p}")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        v = self._check(other)
        if v is NotImplemented:
            return NotImplemented
        return FpElement(self.value + v, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._check(other)
        if v is NotImplemented:
            return NotImplemented
        return FpElement(self.value - v, self.p)

    def __rsub__(self, other):
        v = self._check(other)
        if v is NotImplemented:
            return NotImplemented
        return FpElement(v - self.value, self.p)

    def __mul__(self, other):
        v = self._check(other)
        if v is NotImplemented:
            return NotImplemented
        return FpElement(self.value * v, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._check(other)
        if v is NotImplemented:
            return NotImplemented
        inv = pow(v % self.p, -1, self.p)
        return FpElement(self.value * inv, self.p)

    def __rtruediv__(self, other):
        v = self._check(other)
        if v is NotImplemented:
            return NotImplemented
        inv = pow(self.value, -1, self.p)
        return FpElement(v * inv, self.p)

    def __neg__(self):
        return FpElement(-self.value, self.p)

    def __eq__(self, other):
        if isinstance(other, FpElement):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.value))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"FpElement({self.value}, p={self.p})"

    def __str__(self):
        return str(self.value)


class Field:
    """Field configuration: the rationals (``characteristic == 0``) or F_p.

    Provides construction, coercion and string round-trip for scalars.  A
    `GradedSpace` stores the field it is defined over; everything downstream
    asks that field for zeros, ones and parsed literals.
    """

    def __init__(self, characteristic=0):
        if characteristic != 0:
            if characteristic < 2 or any(
                characteristic % q == 0 for q in range(2, int(characteristic**0.5) + 1)
            ):
                raise ScalarError(f"characteristic must be 0 or prime, got {characteristic}")
        self.characteristic = characteristic

    def zero(self):
        if self.characteristic:
            return FpElement(0, self.characteristic)
        return Fraction(0)

    def one(self):
        if self.characteristic:
            return FpElement(1, self.characteristic)
        return Fraction(1)

    def coerce(self, x):
        """Turn an int, Fraction, FpElement or literal string into a scalar."""
        if isinstance(x, str):
            return self.parse(x)
        if self.characteristic:
            if isinstance(x, FpElement):
                if x.p != self.characteristic:
                    raise ScalarError(f"wrong modulus {x.p} for F_{self.characteristic}")
                return x
            if isinstance(x, int):
                return FpElement(x, self.characteristic)
            if isinstance(x, Fraction):
                if x.denominator == 1:
                    return FpElement(x.numerator, self.characteristic)
                return FpElement(x.numerator, self.characteristic) / x.denominator
            raise ScalarError(f"cannot coerce {x!r} into F_{self.characteristic}")
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, FpElement):
            raise ScalarError("cannot coerce a prime-field element into the rationals")
        raise ScalarError(f"cannot coerce {x!r} into the rationals")

    def parse(self, text):
        """Parse "p/q" or decimal-integer strings; inverse of `to_string`."""
        if not isinstance(text, str):
            raise ScalarError(f"expected a scalar string, got {text!r}")
        s = text.strip()
        try:
            if self.characteristic:
                if "/" in s:
                    num, den = s.split("/", 1)
                    return FpElement(int(num), self.characteristic) / int(den)
                return FpElement(int(s), self.characteristic)
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise ScalarError(f"bad scalar literal {text!r}: {exc}") from None

    def to_string(self, x):
        return str(self.coerce(x))

    def __eq__(self, other):
        return isinstance(other, Field) and other.characteristic == self.characteristic

    def __hash__(self):
        return hash(("Field", self.characteristic))

    def __repr__(self):
        if self.characteristic:
            return f"Field(characteristic={self.characteristic})"
        return "Field(rationals)"


RATIONALS = Field(0)
