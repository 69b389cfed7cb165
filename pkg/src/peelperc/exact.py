"""Exact arithmetic in the quadratic field Q(sqrt(3)).

Every probability, partition-function value and threshold in this package is
an element a + b*sqrt(3) with arbitrary-precision rational a, b.  Type-1
triangulation constants genuinely need the extension (1/sqrt(3), 12*sqrt(3));
type-2 and quadrangulation values live in the rational subfield b = 0, but a
single numeric tower avoids case splits.

Rationals are gmpy2.mpq when available (the exact truncated sums at K = 1e4
are ~20x faster), with fractions.Fraction as a drop-in fallback.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

try:
    from gmpy2 import mpq as _mpq

    def _rat(n, d=1):
        return _mpq(n, d)

except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    def _rat(n, d=1):
        return Fraction(n, d)

_RatTypes = (int, Fraction, type(_rat(0)))


class ExactError(ArithmeticError):
    pass


def _coerce_rat(x):
    if isinstance(x, int):
        return _rat(x)
    if isinstance(x, Fraction):
        return _rat(x.numerator, x.denominator)
    if isinstance(x, type(_rat(0))):
        return x
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def _num_den(q):
    # works for both Fraction and gmpy2.mpq
    return int(q.numerator), int(q.denominator)


def _rat_to_float(q):
    """Correctly rounded rational -> float (int/int division is exact-rounded).

    Overflow saturates to +-inf per the to_float contract.
    """
    n, d = _num_den(q)
    try:
        return n / d
    except OverflowError:
        return float("inf") if n > 0 else float("-inf")


class ExactValue:
    """Immutable element a + b*sqrt(3) of Q(sqrt(3)), stored fully reduced."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", _coerce_rat(a))
        object.__setattr__(self, "b", _coerce_rat(b))

    def __setattr__(self, *_):
        raise AttributeError("ExactValue is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def from_rational(cls, n, d=1):
        return cls(_rat(n, d))

    @classmethod
    def sqrt3(cls):
        return cls(0, 1)

    # -- predicates ----------------------------------------------------

    @property
    def is_rational(self):
        return self.b == 0

    def as_rational(self):
        if self.b != 0:
            raise ExactError(f"{self} is irrational")
        return self.a

    def is_zero(self):
        return self.a == 0 and self.b == 0

    # -- field operations ----------------------------------------------

    def _lift(self, other):
        if isinstance(other, ExactValue):
            return other
        if isinstance(other, _RatTypes):
            return ExactValue(other)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return ExactValue(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return ExactValue(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return ExactValue(-self.a, -self.b)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        # (a + b s)(c + d s) = (ac + 3bd) + (ad + bc) s  with s^2 = 3
        return ExactValue(self.a * o.a + 3 * self.b * o.b,
                          self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of exact zero")
        # 1/(a + b s) = (a - b s)/(a^2 - 3 b^2); the norm vanishes only at 0
        # because sqrt(3) is irrational.
        norm = self.a * self.a - 3 * self.b * self.b
        return ExactValue(self.a / norm, -self.b / norm)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = ExactValue(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self):
        return ExactValue(self.a, -self.b)

    # -- order ----------------------------------------------------------

    def sign(self):
        """Sign of a + b*sqrt(3), decided without floating point."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 with 3 b^2
        d = a * a - 3 * b * b
        s = (d > 0) - (d < 0)
        return s if a > 0 else -s

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __lt__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return (self - o).sign() < 0

    def __le__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return (self - o).sign() <= 0

    def __gt__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return (self - o).sign() > 0

    def __ge__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return (self - o).sign() >= 0

    # -- conversion -------------------------------------------------------

    def to_float(self):
        """Nearest double to a + b*sqrt(3), within 1 ulp of the result.

        sqrt(3) is replaced by a dyadic approximation; on heavy cancellation
        (|a + b*s| << |a|) the precision is doubled until the approximation
        error is negligible against the result.
        """
        if self.b == 0:
            return _rat_to_float(self.a)
        prec = 128
        while True:
            s = _sqrt3_dyadic(prec)
            approx = self.a + self.b * s
            # |true - approx| <= |b| * 2^(1-prec); accept once that is far
            # below the result's own scale.
            if approx != 0:
                err_ok = abs(self.b) * _rat(2) ** (1 - prec) <= abs(approx) * _rat(1, 1 << 60)
                if err_ok:
                    return _rat_to_float(approx)
            elif self.is_zero():
                return 0.0
            prec *= 2
            if prec > 1 << 20:  # pragma: no cover - defensive
                raise ExactError("to_float failed to converge")

    def __float__(self):
        return self.to_float()

    # -- repr ------------------------------------------------------------

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        bs = f"{self.b}*sqrt(3)" if self.b != 1 else "sqrt(3)"
        if self.a == 0:
            return bs
        sign = "+" if self.b > 0 else "-"
        mag = -self.b if self.b < 0 else self.b
        ms = f"{mag}*sqrt(3)" if mag != 1 else "sqrt(3)"
        return f"{self.a}{sign}{ms}"

    def __repr__(self):
        return f"ExactValue({self.a!r}, {self.b!r})"


_SQRT3_CACHE = {}


def _sqrt3_dyadic(prec):
    """Rational s with 0 <= sqrt(3) - s < 2^(1-prec)."""
    s = _SQRT3_CACHE.get(prec)
    if s is None:
        root = isqrt(3 << (2 * prec))
        s = _rat(root, 1 << prec)
        _SQRT3_CACHE[prec] = s
    return s


def double_factorial(n):
    """(n)!! with the conventions (-1)!! = 1 and 0!! = 1.

    Raises for n < -1.
    """
    if not isinstance(n, int):
        raise TypeError("double_factorial expects an integer")
    if n < -1:
        raise ValueError(f"double factorial undefined for n = {n}")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


ZERO = ExactValue(0)
ONE = ExactValue(1)
SQRT3 = ExactValue.sqrt3()


def exact_rat(n, d=1):
    """Convenience constructor for a rational ExactValue."""
    return ExactValue(_rat(n, d))
