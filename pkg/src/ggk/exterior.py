"""Frame exterior algebra with Clifford action and Mukai pairing.

Forms are sparse sums of frame blades with coefficients in an arbitrary
scalar ring (anything supporting +, -, * and truthiness).  Mixed degree is
allowed throughout because spinor lines live in the full exterior algebra.

Blades are strictly increasing index tuples; the empty tuple is the scalar
blade.  The orientation blade is (0, 1, ..., dim-1).
"""

from __future__ import annotations

from fractions import Fraction

_HALF = Fraction(1, 2)


def _merge_sign(a, b):
    """Sign of sorting the concatenation of two increasing tuples.

    Returns (sign, merged) with sign 0 when an index repeats.
    """
    sign = 1
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            return 0, ()
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        else:
            # b[j] jumps over the remaining len(a) - i entries of a
            if (len(a) - i) % 2:
                sign = -sign
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return sign, tuple(out)


class ExteriorElement:
    """Sparse mixed-degree form in a fixed frame dimension."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim, terms=None):
        self.dim = dim
        self.terms = {}
        if terms:
            for blade, c in terms.items():
                if c:
                    self.terms[tuple(blade)] = c

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, dim):
        return cls(dim)

    @classmethod
    def scalar(cls, dim, c):
        return cls(dim, {(): c} if c else None)

    @classmethod
    def blade(cls, dim, idx, c=1):
        idx = tuple(idx)
        if any(idx[k] >= idx[k + 1] for k in range(len(idx) - 1)):
            raise ValueError("blade indices must be strictly increasing")
        if any(j < 0 or j >= dim for j in idx):
            raise ValueError("blade index out of range")
        return cls(dim, {idx: c})

    @classmethod
    def one_form(cls, dim, coeffs):
        return cls(dim, {(j,): c for j, c in enumerate(coeffs) if c})

    @classmethod
    def volume(cls, dim, c=1):
        return cls(dim, {tuple(range(dim)): c})

    # -- linear structure ---------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, ExteriorElement):
            return NotImplemented
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        terms = dict(self.terms)
        for blade, c in other.terms.items():
            s = terms.get(blade)
            s = c if s is None else s + c
            if s:
                terms[blade] = s
            elif blade in terms:
                del terms[blade]
        out = ExteriorElement(self.dim)
        out.terms = terms
        return out

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        out = ExteriorElement(self.dim)
        out.terms = {b: -c for b, c in self.terms.items()}
        return out

    def __mul__(self, scalar):
        if isinstance(scalar, ExteriorElement):
            return NotImplemented
        out = ExteriorElement(self.dim)
        if scalar:
            out.terms = {b: c * scalar for b, c in self.terms.items()}
            out.terms = {b: c for b, c in out.terms.items() if c}
        return out

    def __rmul__(self, scalar):
        if isinstance(scalar, ExteriorElement):
            return NotImplemented
        out = ExteriorElement(self.dim)
        if scalar:
            out.terms = {b: scalar * c for b, c in self.terms.items()}
            out.terms = {b: c for b, c in out.terms.items() if c}
        return out

    def __eq__(self, other):
        if isinstance(other, ExteriorElement):
            return self.dim == other.dim and (self - other).is_zero()
        return NotImplemented

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    # -- grading -----------------------------------------------------------

    def degree_part(self, k):
        out = ExteriorElement(self.dim)
        out.terms = {b: c for b, c in self.terms.items() if len(b) == k}
        return out

    def degrees(self):
        return sorted({len(b) for b in self.terms})

    def max_degree(self):
        return max((len(b) for b in self.terms), default=0)

    def even_part(self):
        out = ExteriorElement(self.dim)
        out.terms = {b: c for b, c in self.terms.items() if len(b) % 2 == 0}
        return out

    def odd_part(self):
        out = ExteriorElement(self.dim)
        out.terms = {b: c for b, c in self.terms.items() if len(b) % 2 == 1}
        return out

    def coefficient(self, idx):
        return self.terms.get(tuple(idx), 0)

    def top_coefficient(self):
        return self.terms.get(tuple(range(self.dim)), 0)

    # -- multiplicative structure -------------------------------------------

    def wedge(self, other):
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        terms = {}
        for ba, ca in self.terms.items():
            for bb, cb in other.terms.items():
                sign, blade = _merge_sign(ba, bb)
                if sign == 0:
                    continue
                c = ca * cb
                if sign < 0:
                    c = -c
                s = terms.get(blade)
                s = c if s is None else s + c
                if s:
                    terms[blade] = s
                elif blade in terms:
                    del terms[blade]
        out = ExteriorElement(self.dim)
        out.terms = terms
        return out

    def contract(self, vector):
        """Interior product with a frame vector given by its coefficients."""
        terms = {}
        for blade, c in self.terms.items():
            for pos, j in enumerate(blade):
                vj = vector[j]
                if not vj:
                    continue
                coeff = vj * c
                if pos % 2:
                    coeff = -coeff
                sub = blade[:pos] + blade[pos + 1:]
                s = terms.get(sub)
                s = coeff if s is None else s + coeff
                if s:
                    terms[sub] = s
                elif sub in terms:
                    del terms[sub]
        out = ExteriorElement(self.dim)
        out.terms = terms
        return out

    def clifford(self, vector, covector):
        """Clifford action of the split-frame element (X, xi): i_X + xi wedge."""
        xi = ExteriorElement.one_form(self.dim, covector)
        return self.contract(vector) + xi.wedge(self)

    # -- involutions ---------------------------------------------------------

    def map_coefficients(self, fn):
        out = ExteriorElement(self.dim)
        out.terms = {}
        for b, c in self.terms.items():
            v = fn(c)
            if v:
                out.terms[b] = v
        return out

    def sigma(self):
        """Degree-wise transpose sign (-1)^(k(k-1)/2), the Mukai involution."""
        out = ExteriorElement(self.dim)
        out.terms = {}
        for b, c in self.terms.items():
            k = len(b)
            if (k * (k - 1) // 2) % 2:
                out.terms[b] = -c
            else:
                out.terms[b] = c
        return out

    def __repr__(self):
        if not self.terms:
            return f"ExteriorElement({self.dim}, 0)"
        bits = []
        for b in sorted(self.terms, key=lambda t: (len(t), t)):
            label = "1" if not b else "e" + "".join(str(j + 1) for j in b)
            bits.append(f"({self.terms[b]})*{label}")
        return " + ".join(bits)


def wedge(*forms):
    out = forms[0]
    for f in forms[1:]:
        out = out.wedge(f)
    return out


def exp_form(beta):
    """Exponential of a form of even degree >= 2 (finite nilpotent sum)."""
    dim = beta.dim
    if any(k % 2 or k == 0 for k in beta.degrees()):
        raise ValueError("exp_form expects even degree >= 2")
    out = ExteriorElement.scalar(dim, 1)
    power = ExteriorElement.scalar(dim, 1)
    k = 1
    while True:
        power = power.wedge(beta)
        if power.is_zero():
            break
        out = out + power * Fraction(1, _factorial(k))
        k += 1
    return out


def _factorial(k):
    out = 1
    for j in range(2, k + 1):
        out *= j
    return out


def mukai_pairing(alpha, beta):
    """Spinor pairing (alpha, beta) = [alpha wedge sigma(beta)]_top.

    Returns the scalar coefficient of the orientation blade.  The pairing
    is invariant under the simultaneous action of 2-form transforms on both
    arguments, and (e^{i w}, conj e^{i w}) = (2i)^n w^n/n! on a symplectic
    form in dimension 2n (the normalization tests pin this).
    """
    return alpha.wedge(beta.sigma()).top_coefficient()


def bfield_transform(b2, alpha):
    """Spinor-level action of a 2-form transform: alpha -> e^{-b} wedge alpha.

    Matches the sign under which the transformed spinor annihilates the
    transformed isotropic: if (X, xi) kills alpha then (X, xi + i_X b)
    kills e^{-b} wedge alpha.
    """
    return exp_form(-b2).wedge(alpha)


def neutral_pairing(v1, a1, v2, a2):
    """Split pairing <(X, xi), (Y, eta)> = (eta(X) + xi(Y)) / 2."""
    acc = None
    for x, e in ((v1, a2), (v2, a1)):
        for j in range(len(x)):
            t = x[j] * e[j]
            acc = t if acc is None else acc + t
    return _HALF * acc
