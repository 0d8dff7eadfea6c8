"""Exact Gaussian-rational scalars.

All arithmetic in the package bottoms out in `GaussScalar`: a complex number
whose real and imaginary parts are arbitrary-precision rationals (gmpy2.mpq).
No operation ever rounds.
"""

from __future__ import annotations

from gmpy2 import mpq


def q_str(x) -> str:
    """Canonical "p/q" rendering of a rational (explicit denominator)."""
    x = mpq(x)
    return f"{x.numerator}/{x.denominator}"


def q_parse(s: str):
    return mpq(s)


class GaussScalar:
    """A complex number a + b*i with exact rational a, b.

    Closed under +, -, *, / (nonzero divisor). Equality is exact.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = mpq(re)
        self.im = mpq(im)

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls) -> "GaussScalar":
        return _ZERO

    @classmethod
    def one(cls) -> "GaussScalar":
        return _ONE

    @classmethod
    def i(cls) -> "GaussScalar":
        return _I

    @classmethod
    def coerce(cls, x) -> "GaussScalar":
        if isinstance(x, GaussScalar):
            return x
        return cls(x)

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = GaussScalar.coerce(other)
        return GaussScalar(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = GaussScalar.coerce(other)
        return GaussScalar(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussScalar.coerce(other) - self

    def __neg__(self):
        return GaussScalar(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, GaussScalar):
            a, b, c, d = self.re, self.im, other.re, other.im
            return GaussScalar(a * c - b * d, a * d + b * c)
        return GaussScalar(self.re * mpq(other), self.im * mpq(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, GaussScalar):
            c, d = other.re, other.im
            den = c * c + d * d
            if den == 0:
                raise ZeroDivisionError("division by zero GaussScalar")
            a, b = self.re, self.im
            return GaussScalar((a * c + b * d) / den, (b * c - a * d) / den)
        q = mpq(other)
        if q == 0:
            raise ZeroDivisionError("division by zero")
        return GaussScalar(self.re / q, self.im / q)

    def __rtruediv__(self, other):
        return GaussScalar.coerce(other) / self

    def conjugate(self) -> "GaussScalar":
        return GaussScalar(self.re, -self.im)

    # -- predicates and hashing -----------------------------------------

    def __bool__(self) -> bool:
        return self.re != 0 or self.im != 0

    def is_real(self) -> bool:
        return self.im == 0

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussScalar):
            return self.re == other.re and self.im == other.im
        try:
            other = GaussScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    # -- conversion ------------------------------------------------------

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        if self.im == 0:
            return f"GaussScalar({self.re})"
        return f"GaussScalar({self.re}, {self.im})"

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re} {sign} {abs(self.im)}*i"

    def to_pair(self) -> tuple[str, str]:
        return (q_str(self.re), q_str(self.im))

    @classmethod
    def from_pair(cls, pair) -> "GaussScalar":
        return cls(mpq(pair[0]), mpq(pair[1]))


_ZERO = GaussScalar(0, 0)
_ONE = GaussScalar(1, 0)
_I = GaussScalar(0, 1)
