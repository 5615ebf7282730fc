"""Exact complex-rational scalars and the scalar-ring interface.

Geometric objects in this package carry coefficients in a small "scalar
ring": Gaussian rationals for exact backends, complex floats for spectral
ones, trigonometric polynomials for torus fields.  The ring object bundles
the operations higher layers need (conjugation, zero tests, inverses,
square roots) without caring which representation is in play.
"""

from __future__ import annotations

import math
from fractions import Fraction


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class CRat:
    """Gaussian rational a + b*i with exact Fraction parts.

    Arithmetic with int and Fraction stays exact; arithmetic with float or
    complex degrades to complex (useful when a float-mode site reuses an
    exact catalog descriptor).  Division is exact via the conjugate.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _as_fraction(re))
        object.__setattr__(self, "im", _as_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("CRat is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def coerce(x):
        """Lift int, Fraction or CRat to CRat; reject floats."""
        if isinstance(x, CRat):
            return x
        if isinstance(x, (int, Fraction)):
            return CRat(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to CRat")

    # -- ring structure ------------------------------------------------

    def __add__(self, other):
        if isinstance(other, CRat):
            return CRat(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return CRat(self.re + other, self.im)
        if isinstance(other, (float, complex)):
            return complex(self) + other
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return CRat(-self.re, -self.im)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, CRat):
            return CRat(self.re * other.re - self.im * other.im,
                        self.re * other.im + self.im * other.re)
        if isinstance(other, (int, Fraction)):
            return CRat(self.re * other, self.im * other)
        if isinstance(other, (float, complex)):
            return complex(self) * other
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CRat(other)
        if isinstance(other, CRat):
            d = other.abs2()
            if d == 0:
                raise ZeroDivisionError("division by zero CRat")
            n = self * other.conjugate()
            return CRat(n.re / d, n.im / d)
        if isinstance(other, (float, complex)):
            return complex(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return CRat(other) / self
        if isinstance(other, (float, complex)):
            return other / complex(self)
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return CRat(1) / self ** (-n)
        out = CRat(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparisons ----------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, CRat):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, (float, complex)):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    # -- structure maps --------------------------------------------------

    def conjugate(self):
        return CRat(self.re, -self.im)

    def abs2(self):
        """Exact squared modulus as a Fraction."""
        return self.re * self.re + self.im * self.im

    def __abs__(self):
        return math.sqrt(float(self.abs2()))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"CRat({self.re})"
        return f"CRat({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"


I_QI = CRat(0, 1)


def fraction_sqrt(q):
    """Exact square root of a nonnegative Fraction, or None if irrational."""
    q = _as_fraction(q)
    if q < 0:
        return None
    pn, pd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if pn * pn == q.numerator and pd * pd == q.denominator:
        return Fraction(pn, pd)
    return None


class ScalarRing:
    """Common interface over the scalar representations.

    Subclasses fix the element type; methods that a representation cannot
    support exactly raise instead of silently approximating.
    """

    exact = True

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def i(self):
        raise NotImplementedError

    def from_fraction(self, q):
        raise NotImplementedError

    def lift(self, c):
        """Constant (int, Fraction, CRat, complex) to ring element."""
        raise NotImplementedError

    def conj(self, x):
        raise NotImplementedError

    def real(self, x):
        half = Fraction(1, 2)
        return half * (x + self.conj(x))

    def imag(self, x):
        half_over_i = self.from_fraction(Fraction(-1, 2)) * self.i()
        return half_over_i * (x - self.conj(x))

    def is_zero(self, x, tol=0.0):
        return self.norm_inf(x) <= tol

    def norm_inf(self, x):
        """Float magnitude bound used for residual reporting."""
        raise NotImplementedError

    def is_constant(self, x):
        return True

    def as_constant(self, x):
        return x

    def mean(self, x):
        """Average over the underlying space (the constant term)."""
        return self.as_constant(x)

    def inv(self, x):
        raise NotImplementedError

    def sqrt(self, x):
        raise NotImplementedError

    def exp(self, x):
        raise NotImplementedError

    def log(self, x):
        raise NotImplementedError


class QiRing(ScalarRing):
    """Constants ring: exact Gaussian rationals."""

    exact = True

    def zero(self):
        return CRat(0)

    def one(self):
        return CRat(1)

    def i(self):
        return CRat(0, 1)

    def from_fraction(self, q):
        return CRat(q)

    def lift(self, c):
        return CRat.coerce(c)

    def conj(self, x):
        return CRat.coerce(x).conjugate()

    def norm_inf(self, x):
        return abs(complex(CRat.coerce(x)))

    def is_zero(self, x, tol=0.0):
        if tol == 0.0:
            return not CRat.coerce(x)
        return self.norm_inf(x) <= tol

    def inv(self, x):
        return CRat(1) / CRat.coerce(x)

    def sqrt(self, x):
        x = CRat.coerce(x)
        if x.im != 0:
            raise ValueError("exact sqrt only for nonnegative rationals")
        r = fraction_sqrt(x.re)
        if r is None:
            raise ValueError(f"{x.re} is not a perfect square")
        return CRat(r)

    def exp(self, x):
        x = CRat.coerce(x)
        if not x:
            return CRat(1)
        raise ValueError("exact exp only at 0")

    def log(self, x):
        x = CRat.coerce(x)
        if x == CRat(1):
            return CRat(0)
        raise ValueError("exact log only at 1")


class CxRing(ScalarRing):
    """Constants ring: complex floats."""

    exact = False

    def zero(self):
        return 0j

    def one(self):
        return 1.0 + 0j

    def i(self):
        return 1j

    def from_fraction(self, q):
        return complex(q)

    def lift(self, c):
        if isinstance(c, CRat):
            return complex(c)
        return complex(c)

    def conj(self, x):
        return complex(x).conjugate()

    def norm_inf(self, x):
        return abs(complex(x))

    def inv(self, x):
        return 1.0 / complex(x)

    def sqrt(self, x):
        import cmath
        return cmath.sqrt(complex(x))

    def exp(self, x):
        import cmath
        return cmath.exp(complex(x))

    def log(self, x):
        import cmath
        return cmath.log(complex(x))
