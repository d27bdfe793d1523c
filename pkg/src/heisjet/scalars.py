"""Exact scalar arithmetic: rationals and Gaussian rationals.

Every quantity in this package is an exact rational (or a pair of them,
for complex values).  No floating point is used anywhere.
"""

from __future__ import annotations

try:
    from gmpy2 import mpq as Q  # noqa: N811  (fast path, optional)
except ImportError:  # pragma: no cover
    from fractions import Fraction as Q  # noqa: N814

QZERO = Q(0)
QONE = Q(1)


def qstr(x) -> str:
    """Serialize a rational as a canonical ``p/q`` string."""
    x = Q(x)
    return f"{x.numerator}/{x.denominator}"


def qparse(s) -> "Q":
    """Parse a rational from ``p/q`` (or plain integer) notation."""
    if isinstance(s, str):
        s = s.strip()
    return Q(s)


class CQ:
    """A Gaussian rational ``re + im*i``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Q(re))
        object.__setattr__(self, "im", Q(im))

    def __setattr__(self, name, value):
        raise AttributeError("CQ is immutable")

    # -- ring operations ---------------------------------------------------
    def __add__(self, other):
        other = as_cq(other)
        return CQ(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return CQ(-self.re, -self.im)

    def __sub__(self, other):
        other = as_cq(other)
        return CQ(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return as_cq(other) - self

    def __mul__(self, other):
        other = as_cq(other)
        return CQ(self.re * other.re - self.im * other.im,
                  self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_cq(other)
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return CQ((self.re * other.re + self.im * other.im) / d,
                  (self.im * other.re - self.re * other.im) / d)

    def conj(self):
        return CQ(self.re, -self.im)

    def norm2(self):
        """``|z|^2`` as an exact rational."""
        return self.re * self.re + self.im * self.im

    # -- predicates --------------------------------------------------------
    def is_zero(self):
        return self.re == 0 and self.im == 0

    def __eq__(self, other):
        other = as_cq(other)
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        if self.im == 0:
            return f"CQ({self.re})"
        return f"CQ({self.re}, {self.im})"


CQ_ZERO = CQ(0, 0)
CQ_ONE = CQ(1, 0)
CQ_I = CQ(0, 1)


def as_cq(x) -> CQ:
    if isinstance(x, CQ):
        return x
    return CQ(x)


def cq_str(z: CQ):
    """Serialize a Gaussian rational as a ``[re, im]`` pair of strings."""
    return [qstr(z.re), qstr(z.im)]


def cq_parse(pair) -> CQ:
    return CQ(qparse(pair[0]), qparse(pair[1]))
