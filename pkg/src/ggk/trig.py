"""Trigonometric polynomials on a flat torus, exact or float coefficients.

A field is a finite sum  sum_k c_k e^{i k.x}  over integer frequency
vectors k.  Exact mode keeps Gaussian-rational coefficients and refuses any
operation that would leave the representable class; float mode keeps
complex coefficients, drops terms below ``drop_tol`` and enforces the
per-axis frequency cap with a monitored tail: a dropped coefficient above
``tail_tol`` raises :class:`CapOverflow` instead of silently truncating.

Analytic operations (inverse, sqrt, exp, log) are series-based, float-only
except for constants, and verify their own residuals before returning.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .rational import CRat, ScalarRing, fraction_sqrt


class CapOverflow(Exception):
    """A product or series left the configured frequency window."""


def _abs_coeff(c):
    if isinstance(c, CRat):
        return abs(c)
    return abs(c)


class TrigPoly:
    """Finite Fourier sum bound to a :class:`TrigRing`."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms

    # -- helpers -------------------------------------------------------

    def _binary(self, other):
        if isinstance(other, TrigPoly):
            if other.ring is not self.ring:
                raise ValueError("mixed TrigRing arithmetic")
            return other
        if isinstance(other, (int, Fraction, CRat)) or (
                not self.ring.exact and isinstance(other, (float, complex))):
            return self.ring.lift(other)
        return None

    def __add__(self, other):
        o = self._binary(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for k, c in o.terms.items():
            s = terms.get(k)
            s = c if s is None else s + c
            terms[k] = s
        return self.ring._canon(terms)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._binary(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._binary(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __neg__(self):
        return TrigPoly(self.ring, {k: -c for k, c in self.terms.items()})

    def __mul__(self, other):
        o = self._binary(other)
        if o is None:
            return NotImplemented
        if len(self.terms) > len(o.terms):
            a, b = o, self
        else:
            a, b = self, o
        terms = {}
        for ka, ca in a.terms.items():
            for kb, cb in b.terms.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                c = ca * cb
                s = terms.get(k)
                terms[k] = c if s is None else s + c
        return self.ring._canon(terms)

    __rmul__ = __mul__

    def __eq__(self, other):
        o = self._binary(other)
        if o is None:
            return NotImplemented
        return not (self - o)

    def __bool__(self):
        return bool(self.terms)

    def __hash__(self):
        return hash(frozenset(self.terms))

    # -- structure ------------------------------------------------------

    def conjugate(self):
        out = {}
        for k, c in self.terms.items():
            kk = tuple(-x for x in k)
            out[kk] = c.conjugate()
        return TrigPoly(self.ring, out)

    def deriv(self, j):
        """Partial derivative along coordinate j."""
        i_unit = self.ring._i_coeff
        out = {}
        for k, c in self.terms.items():
            if k[j]:
                out[k] = (i_unit * k[j]) * c
        return TrigPoly(self.ring, out)

    def constant_term(self):
        zero = (0,) * self.ring.nvars
        return self.terms.get(zero, self.ring._zero_coeff)

    def is_constant(self):
        zero = (0,) * self.ring.nvars
        return all(k == zero for k in self.terms)

    def norm1(self):
        """Sum of coefficient magnitudes; submultiplicative."""
        return float(sum(_abs_coeff(c) for c in self.terms.values()))

    def norm_tail(self):
        """Sum of magnitudes of all non-constant coefficients."""
        zero = (0,) * self.ring.nvars
        return float(sum(_abs_coeff(c) for k, c in self.terms.items() if k != zero))

    def eval_at(self, x):
        """Numeric evaluation at a point (floats), for sampling checks."""
        out = 0j
        for k, c in self.terms.items():
            phase = sum(kj * xj for kj, xj in zip(k, x))
            out += complex(c) * complex(math.cos(phase), math.sin(phase))
        return out

    def max_abs_freq(self):
        return max((max(abs(x) for x in k) for k in self.terms), default=0)

    def __repr__(self):
        if not self.terms:
            return "TrigPoly(0)"
        bits = []
        for k in sorted(self.terms):
            bits.append(f"{k}:{self.terms[k]}")
        return "TrigPoly{" + ", ".join(bits) + "}"


class TrigRing(ScalarRing):
    """Ring descriptor: number of variables, mode, cap and tolerances."""

    def __init__(self, nvars, exact=True, cap=8, drop_tol=1e-14, tail_tol=1e-9):
        self.nvars = nvars
        self.exact = exact
        self.cap = cap
        self.drop_tol = drop_tol
        self.tail_tol = tail_tol
        if exact:
            self._zero_coeff = CRat(0)
            self._i_coeff = CRat(0, 1)
        else:
            self._zero_coeff = 0j
            self._i_coeff = 1j

    # -- canonicalization --------------------------------------------------

    def _coerce_coeff(self, c):
        if self.exact:
            return CRat.coerce(c)
        if isinstance(c, CRat):
            return complex(c)
        return complex(c)

    def _canon(self, terms):
        out = {}
        for k, c in terms.items():
            if not c:
                continue
            if not self.exact and abs(c) < self.drop_tol:
                continue
            if any(abs(x) > self.cap for x in k):
                if self.exact:
                    raise CapOverflow(f"frequency {k} exceeds cap {self.cap}")
                if abs(c) > self.tail_tol:
                    raise CapOverflow(
                        f"dropped coefficient {abs(c):.3e} at {k} exceeds "
                        f"tail tolerance {self.tail_tol:.1e}")
                continue
            out[k] = c
        return TrigPoly(self, out)

    # -- constructors -------------------------------------------------------

    def poly(self, terms):
        return self._canon({tuple(k): self._coerce_coeff(c)
                            for k, c in terms.items()})

    def const(self, c):
        return self.lift(c)

    def lift(self, c):
        c = self._coerce_coeff(c)
        if not c:
            return TrigPoly(self, {})
        return TrigPoly(self, {(0,) * self.nvars: c})

    def zero(self):
        return TrigPoly(self, {})

    def one(self):
        return self.lift(1)

    def i(self):
        return self.lift(self._i_coeff)

    def from_fraction(self, q):
        return self.lift(q)

    def exp_i(self, k, coeff=1):
        """coeff * e^{i k.x}"""
        return self.poly({tuple(k): coeff})

    def cos(self, k, coeff=1):
        half = Fraction(1, 2) * coeff if self.exact else 0.5 * coeff
        k = tuple(k)
        mk = tuple(-x for x in k)
        return self.poly({k: half}) + self.poly({mk: half})

    def sin(self, k, coeff=1):
        if self.exact:
            half_i = CRat(0, Fraction(-1, 2)) * CRat.coerce(coeff)
        else:
            half_i = -0.5j * complex(coeff)
        k = tuple(k)
        mk = tuple(-x for x in k)
        return self.poly({k: half_i}) + self.poly({mk: -half_i})

    # -- ScalarRing interface -------------------------------------------------

    def conj(self, x):
        return self._as_elem(x).conjugate()

    def _as_elem(self, x):
        if isinstance(x, TrigPoly):
            return x
        return self.lift(x)

    def norm_inf(self, x):
        return self._as_elem(x).norm1()

    def is_zero(self, x, tol=0.0):
        x = self._as_elem(x)
        if tol == 0.0:
            return not x
        return x.norm1() <= tol

    def is_constant(self, x):
        return self._as_elem(x).is_constant()

    def as_constant(self, x):
        x = self._as_elem(x)
        if not x.is_constant():
            raise ValueError("field is not constant")
        return x.constant_term()

    def mean(self, x):
        return self._as_elem(x).constant_term()

    # -- analytic operations ---------------------------------------------------

    def inv(self, x, tol=1e-12, max_iter=60):
        """Multiplicative inverse by Newton iteration, residual checked."""
        x = self._as_elem(x)
        if x.is_constant():
            c = x.constant_term()
            if isinstance(c, CRat):
                return self.lift(CRat(1) / c)
            return self.lift(1.0 / c)
        if self.exact:
            raise ValueError("exact inverse of a nonconstant field")
        c0 = x.constant_term()
        if abs(c0) < 1e-300:
            raise ZeroDivisionError("zero mean, Newton inverse undefined")
        y = self.lift(1.0 / c0)
        two = self.lift(2.0)
        for _ in range(max_iter):
            res = x * y - self.one()
            if res.norm1() <= tol:
                return y
            y = y * (two - x * y)
        raise ArithmeticError(
            f"inverse iteration stalled, residual {(x*y - self.one()).norm1():.2e}")

    def sqrt(self, x, tol=1e-12, max_iter=60):
        """Principal square root; exact only for perfect-square constants."""
        x = self._as_elem(x)
        if x.is_constant():
            c = x.constant_term()
            if isinstance(c, CRat):
                if c.im != 0:
                    raise ValueError("exact sqrt needs a nonnegative rational")
                r = fraction_sqrt(c.re)
                if r is None:
                    raise ValueError(f"{c.re} is not a perfect square")
                return self.lift(CRat(r))
            return self.lift(complex(c) ** 0.5)
        if self.exact:
            raise ValueError("exact sqrt of a nonconstant field")
        c0 = x.constant_term()
        y = self.lift(complex(c0) ** 0.5)
        half = self.lift(0.5)
        for _ in range(max_iter):
            res = y * y - x
            if res.norm1() <= tol:
                return y
            y = half * (y + x * self.inv(y, tol=tol * 0.1))
        raise ArithmeticError(
            f"sqrt iteration stalled, residual {(y*y - x).norm1():.2e}")

    def exp(self, x, tol=1e-14, max_terms=80):
        x = self._as_elem(x)
        if x.is_constant():
            c = x.constant_term()
            if isinstance(c, CRat):
                if not c:
                    return self.one()
                raise ValueError("exact exp only at 0")
            return self.lift(_cexp(c))
        if self.exact:
            raise ValueError("exact exp of a nonconstant field")
        c0 = x.constant_term()
        g = x - self.lift(c0)
        out = self.one()
        term = self.one()
        for n in range(1, max_terms):
            term = term * g
            term = (1.0 / n) * term
            out = out + term
            if term.norm1() <= tol:
                return self.lift(_cexp(c0)) * out
        raise ArithmeticError("exp series did not converge")

    def log(self, x, tol=1e-14, max_terms=200):
        x = self._as_elem(x)
        if x.is_constant():
            c = x.constant_term()
            if isinstance(c, CRat):
                if c == CRat(1):
                    return self.zero()
                raise ValueError("exact log only at 1")
            import cmath
            return self.lift(cmath.log(complex(c)))
        if self.exact:
            raise ValueError("exact log of a nonconstant field")
        import cmath
        c0 = x.constant_term()
        u = self.lift(1.0 / c0) * x - self.one()
        r = u.norm1()
        if r >= 0.9:
            raise ArithmeticError(f"log series needs small oscillation, got {r:.3f}")
        out = self.zero()
        power = self.one()
        for n in range(1, max_terms):
            power = power * u
            out = out + ((-1.0) ** (n + 1) / n) * power
            if power.norm1() / n <= tol:
                return self.lift(cmath.log(complex(c0))) + out
        raise ArithmeticError("log series did not converge")

    def real(self, x):
        x = self._as_elem(x)
        half = Fraction(1, 2)
        return half * (x + x.conjugate())

    def imag(self, x):
        x = self._as_elem(x)
        if self.exact:
            factor = CRat(0, Fraction(-1, 2))
        else:
            factor = -0.5j
        return factor * (x - x.conjugate())

    def is_real(self, x, tol=0.0):
        x = self._as_elem(x)
        return self.is_zero(x - x.conjugate(), tol=2 * tol if tol else 0.0)


def _cexp(c):
    import cmath
    return cmath.exp(complex(c))
