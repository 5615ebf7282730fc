"""Computation sites: where fields live and how they differentiate.

A site fixes a global frame e_1..e_m of the tangent bundle together with
the two ingredients every differential operator needs: frame-direction
derivatives of scalars and the frame structure functions [e_i, e_j].
Two backends are provided.

* :class:`LieInvariantSite`: invariant tensors on a Lie group.  Scalars are
  constants, all structure sits in the constants c^k_ij, and every identity
  can be checked with exact rational arithmetic.
* :class:`FourierTorusSite`: trigonometric polynomial fields on a flat
  torus with the coordinate frame, so the structure functions vanish and
  all structure sits in the derivatives.

Both use normalized invariant measure (total mass 1), so integration of a
scalar is its mean; every integral quantity downstream is either pointwise,
a difference, or a ratio, making the normalization immaterial.
"""

from __future__ import annotations

from fractions import Fraction

from .exterior import ExteriorElement
from .rational import CRat, CxRing, QiRing
from .trig import TrigRing


class Site:
    """Shared derived operations; subclasses supply deriv() and structure."""

    name = "site"
    dim = 0
    ring = None

    # -- primitive hooks ----------------------------------------------

    def deriv(self, f, j):
        raise NotImplementedError

    def struct(self, i, j):
        """Coefficients of [e_i, e_j]; list of (k, constant) pairs."""
        raise NotImplementedError

    # -- scalars --------------------------------------------------------

    def zero(self):
        return self.ring.zero()

    def lift(self, c):
        return self.ring.lift(c)

    def mean(self, f):
        return self.ring.mean(f)

    def integrate(self, f):
        """Integral against the normalized invariant measure."""
        return self.ring.mean(f)

    def integrate_form(self, alpha):
        return self.ring.mean(alpha.top_coefficient())

    # -- exterior calculus -------------------------------------------------

    def d_scalar(self, f):
        return ExteriorElement(self.dim,
                               {(j,): self.deriv(f, j) for j in range(self.dim)
                                if self.deriv(f, j)})

    def d(self, alpha):
        """Exterior differential in the moving frame.

        d(alpha) = e^j ^ (d_j alpha) + CE term from the frame differentials
        d e^k = -c^k_ij e^i ^ e^j (i < j).
        """
        if not isinstance(alpha, ExteriorElement):
            return self.d_scalar(alpha)
        dim = self.dim
        out = ExteriorElement(dim)
        for blade, c in alpha.terms.items():
            for j in range(dim):
                dc = self.deriv(c, j)
                if dc:
                    ej = ExteriorElement.blade(dim, (j,))
                    out = out + ej.wedge(ExteriorElement(dim, {blade: dc}))
            # anti-derivation over the blade factors
            for pos, k in enumerate(blade):
                dek = self._frame_differential(k)
                if dek.is_zero():
                    continue
                rest = blade[:pos] + blade[pos + 1:]
                sign = -1 if pos % 2 else 1
                factor = ExteriorElement(dim, {rest: c if sign > 0 else -c})
                out = out + dek.wedge(factor)
        return out

    def _frame_differential(self, k):
        """d e^k = -c^k_ij e^i ^ e^j over i < j."""
        dim = self.dim
        terms = {}
        for i in range(dim):
            for j in range(i + 1, dim):
                for kk, c in self.struct(i, j):
                    if kk == k and c:
                        terms[(i, j)] = terms.get((i, j), self.ring.zero()) - self.lift(c)
        return ExteriorElement(dim, {b: c for b, c in terms.items() if c})

    def d_twisted(self, h3, alpha):
        """Twisted differential d alpha - h ^ alpha."""
        out = self.d(alpha)
        if h3 is not None and not h3.is_zero():
            out = out - h3.wedge(alpha)
        return out

    # -- brackets and Lie derivatives -----------------------------------------

    def bracket_vv(self, X, Y):
        """Vector field bracket in frame components."""
        dim = self.dim
        out = [self.ring.zero() for _ in range(dim)]
        for i in range(dim):
            xi = X[i]
            yi = Y[i]
            for k in range(dim):
                if xi:
                    t = xi * self.deriv(Y[k], i)
                    if t:
                        out[k] = out[k] + t
                if yi:
                    t = yi * self.deriv(X[k], i)
                    if t:
                        out[k] = out[k] - t
        for i in range(dim):
            if not X[i]:
                continue
            for j in range(dim):
                if not Y[j]:
                    continue
                for k, c in self.struct(i, j):
                    if c:
                        out[k] = out[k] + X[i] * Y[j] * self.lift(c)
        return out

    def lie_scalar(self, X, f):
        acc = self.ring.zero()
        for j in range(self.dim):
            if X[j]:
                t = X[j] * self.deriv(f, j)
                if t:
                    acc = acc + t
        return acc

    def lie_form(self, X, alpha):
        """Cartan homotopy formula i_X d + d i_X."""
        return self.d(alpha).contract(X) + self.d(alpha.contract(X))

    def lie_matrix(self, X, M):
        """Lie derivative of a tangent endomorphism, columnwise.

        (L_X M) e_l = [X, M e_l] - M [X, e_l]; tensoriality in the column
        argument is a test, not an assumption.
        """
        import numpy as np
        dim = self.dim
        out = np.empty((dim, dim), dtype=object)
        for l in range(dim):
            col = [M[r, l] for r in range(dim)]
            t1 = self.bracket_vv(X, col)
            el = [self.ring.zero()] * dim
            el[l] = self.ring.one()
            t2 = self.bracket_vv(X, el)
            mt2 = [sum((M[r, s] * t2[s] for s in range(dim)), self.ring.zero())
                   for r in range(dim)]
            for r in range(dim):
                out[r, l] = t1[r] - mt2[r]
        return out

    def volume_form(self, density=None):
        c = self.ring.one() if density is None else density
        return ExteriorElement.volume(self.dim, c)

    def divergence(self, X):
        """div X relative to the frame volume: L_X vol = (div X) vol."""
        return self.lie_form(X, self.volume_form()).top_coefficient()


class LieInvariantSite(Site):
    """Invariant calculus on a Lie group frame; scalars are constants.

    ``structure`` maps (i, j) with i < j to {k: rational}; antisymmetry is
    filled in automatically.  The constructor validates antisymmetry
    (implicitly) and the Jacobi identity, which is equivalent to d^2 = 0
    for the dual differential.
    """

    def __init__(self, name, dim, structure, exact=True):
        self.name = name
        self.dim = dim
        self.ring = QiRing() if exact else CxRing()
        self._c = {}
        for (i, j), row in structure.items():
            if not i < j:
                raise ValueError("give structure constants for i < j only")
            entry = [(k, Fraction(c)) for k, c in row.items() if Fraction(c)]
            if entry:
                self._c[(i, j)] = entry
        self._check_jacobi()

    def deriv(self, f, j):
        return self.ring.zero()

    def struct(self, i, j):
        if i == j:
            return []
        if i < j:
            return [(k, c) for k, c in self._c.get((i, j), [])]
        return [(k, -c) for k, c in self._c.get((j, i), [])]

    def _adjoint(self, i, j):
        out = [Fraction(0)] * self.dim
        for k, c in self.struct(i, j):
            out[k] = c
        return out

    def _check_jacobi(self):
        dim = self.dim
        for i in range(dim):
            for j in range(dim):
                for k in range(dim):
                    acc = [Fraction(0)] * dim
                    for (a, b, c) in ((i, j, k), (j, k, i), (k, i, j)):
                        inner = self._adjoint(a, b)
                        for m in range(dim):
                            if inner[m]:
                                outer = self._adjoint(m, c)
                                for l in range(dim):
                                    acc[l] += inner[m] * outer[l]
                    if any(acc):
                        raise ValueError(
                            f"Jacobi identity fails at ({i},{j},{k})")


class FourierTorusSite(Site):
    """Trig-polynomial fields on a flat torus, coordinate frame."""

    def __init__(self, nvars, exact=True, cap=8, drop_tol=1e-14, tail_tol=1e-9,
                 name=None):
        self.name = name or f"torus{nvars}"
        self.dim = nvars
        self.ring = TrigRing(nvars, exact=exact, cap=cap,
                             drop_tol=drop_tol, tail_tol=tail_tol)

    def deriv(self, f, j):
        if not isinstance(f, type(self.ring.zero())):
            f = self.ring.lift(f)
        return f.deriv(j)

    def struct(self, i, j):
        return []
