"""Sections of the split generalized tangent bundle and their calculus.

A section is a pair (vector, covector) of frame-coefficient lists.  All
operators take the site explicitly and an optional closed background
3-form h twisting the bracket and the differential.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .exterior import ExteriorElement, neutral_pairing


class Section:
    """X + xi with frame coefficients in the site ring."""

    __slots__ = ("v", "a")

    def __init__(self, v, a):
        self.v = list(v)
        self.a = list(a)

    @classmethod
    def vector(cls, site, coeffs):
        return cls(coeffs, [site.ring.zero()] * site.dim)

    @classmethod
    def covector(cls, site, coeffs):
        return cls([site.ring.zero()] * site.dim, coeffs)

    @classmethod
    def basis(cls, site, i):
        """i in [0, 2m): first the frame vectors, then the frame covectors."""
        m = site.dim
        v = [site.ring.zero()] * m
        a = [site.ring.zero()] * m
        if i < m:
            v[i] = site.ring.one()
        else:
            a[i - m] = site.ring.one()
        return cls(v, a)

    def stacked(self):
        return list(self.v) + list(self.a)

    @classmethod
    def from_stacked(cls, entries):
        m = len(entries) // 2
        return cls(entries[:m], entries[m:])

    def one_form(self):
        return ExteriorElement.one_form(len(self.a), self.a)

    def __add__(self, other):
        return Section([x + y for x, y in zip(self.v, other.v)],
                       [x + y for x, y in zip(self.a, other.a)])

    def __sub__(self, other):
        return Section([x - y for x, y in zip(self.v, other.v)],
                       [x - y for x, y in zip(self.a, other.a)])

    def __neg__(self):
        return Section([-x for x in self.v], [-x for x in self.a])

    def __rmul__(self, scalar):
        return Section([scalar * x for x in self.v], [scalar * x for x in self.a])

    def __mul__(self, scalar):
        return Section([x * scalar for x in self.v], [x * scalar for x in self.a])

    def clifford(self, alpha):
        return alpha.clifford(self.v, self.a)

    def __repr__(self):
        return f"Section(v={self.v}, a={self.a})"


def pair(e1, e2):
    """Neutral pairing <e1, e2> = (xi1(X2) + xi2(X1)) / 2."""
    return neutral_pairing(e1.v, e1.a, e2.v, e2.a)


def dorfman(site, h3, e1, e2):
    """Twisted Dorfman bracket.

    [X + xi, Y + eta] = [X, Y] + L_X eta - i_Y d xi + i_Y i_X h.
    """
    m = site.dim
    xv = site.bracket_vv(e1.v, e2.v)
    eta = e2.one_form()
    form = site.lie_form(e1.v, eta) - site.d(e1.one_form()).contract(e2.v)
    if h3 is not None and not h3.is_zero():
        form = form + h3.contract(e1.v).contract(e2.v)
    return Section(xv, [form.coefficient((j,)) for j in range(m)])


def psi_image(site, h3, e):
    """The derivation attached to a section: (X, d xi - i_X h).

    The 2-form part acts on spinors alongside the flow of X; sections with
    equal images generate the same twisted symmetry.
    """
    two = site.d(e.one_form())
    if h3 is not None and not h3.is_zero():
        two = two - h3.contract(e.v)
    return e.v, two


def gen_lie_spinor(site, h3, e, alpha):
    """Twisted Lie derivative on forms: L_e = d_h (e .) + e . d_h."""
    return (site.d_twisted(h3, e.clifford(alpha))
            + e.clifford(site.d_twisted(h3, alpha)))


def gen_lie_endo(site, h3, e, kk):
    """Twisted Lie derivative of an endomorphism of the split bundle.

    Columnwise (L_e K) s = [e, K s] - K [e, s] over the 2m frame sections;
    the result is tensorial whenever e generates a symmetry compatible
    with the pairing, and in general measures the failure.
    """
    m = site.dim
    out = np.empty((2 * m, 2 * m), dtype=object)
    for i in range(2 * m):
        s = Section.basis(site, i)
        ks = Section.from_stacked(list(kk[:, i]))
        t1 = dorfman(site, h3, e, ks)
        t2 = dorfman(site, h3, e, s)
        t2s = np.empty(2 * m, dtype=object)
        for r, x in enumerate(t2.stacked()):
            t2s[r] = x
        kt2 = kk @ t2s
        col = t1.stacked()
        for r in range(2 * m):
            out[r, i] = col[r] - kt2[r]
    return out


def courant_leibniz_residual(site, h3, e1, e2, e3):
    """[e1, [e2, e3]] - [[e1, e2], e3] - [e2, [e1, e3]]."""
    lhs = dorfman(site, h3, e1, dorfman(site, h3, e2, e3))
    m1 = dorfman(site, h3, dorfman(site, h3, e1, e2), e3)
    m2 = dorfman(site, h3, e2, dorfman(site, h3, e1, e3))
    return lhs - m1 - m2


def pairing_compat_residual(site, h3, e1, e2, e3):
    """pi_T(e1) <e2, e3> - <[e1, e2], e3> - <e2, [e1, e3]>."""
    lhs = site.lie_scalar(e1.v, pair(e2, e3))
    r1 = pair(dorfman(site, h3, e1, e2), e3)
    r2 = pair(e2, dorfman(site, h3, e1, e3))
    return lhs - r1 - r2


def symmetrized_bracket_residual(site, h3, e1, e2):
    """[e1, e2] + [e2, e1] - 2 d<e1, e2>, which vanishes identically."""
    s = dorfman(site, h3, e1, e2) + dorfman(site, h3, e2, e1)
    dpair = site.d_scalar(2 * pair(e1, e2))
    target = Section([site.ring.zero()] * site.dim,
                     [dpair.coefficient((j,)) for j in range(site.dim)])
    return s - target
