"""Scalar deformations of a bihermitian pair with fixed second structure.

A potential u moves (g, I, b) through the exact 2-form B = d(I.du) while J
and the real Poisson structure pi = 1/2 [I, J] g^{-1} stay put; the
reference volume form rides along under the flow of sigma#(I.du).  On the
resulting family live the split-bundle pairing that exhibits the averaged
scalar curvature as a moment map, the potential-space metric with its
connection and curvature, and the scalar-curvature 1-form together with
its primitive energy.

All flows integrate with classical RK4 on the tuple (g, I, b, w), where w
is the volume density against the unit-mass reference measure of the site.
"""

from __future__ import annotations

import numpy as np

from .courant import Section, gen_lie_endo
from .curvature import one_form
from .exterior import ExteriorElement
from .fiber import (BihermitianData, bil_to_form, dc_scalar, endo_one_form,
                    flat, form_to_bil, hitchin_poisson, pi_eval,
                    sigma_poisson, torsion_three_form)
from .linalg import det_ring, mat_map, oeye, ozeros, residual_norm
from .spinor import gscal_bihermitian

_HALF = 0.5


class ClassPoint:
    """A bihermitian tuple (g, I, b) with its transported volume density.

    J is shared by every point of a family and kept on the instance only
    for convenience.  Derived fields (Poisson structures, the log ratio of
    the metric volume to the reference) are cached lazily; tol governs the
    Newton inversions behind them on inexact sites.
    """

    def __init__(self, site, g, i_endo, j_endo, b=None, w=None, tol=1e-9):
        self.site = site
        self.g = g
        self.I = i_endo
        self.J = j_endo
        self.b = b if b is not None else ozeros((site.dim, site.dim),
                                                site.ring)
        self.w = site.ring.one() if w is None else w
        self.tol = tol
        self._bh = None
        self._pm = None
        self._sig = None

    @classmethod
    def base(cls, site, bh, tol=1e-9):
        return cls(site, bh.g, bh.I, bh.J, bh.b, tol=tol)

    def bihermitian(self):
        if self._bh is None:
            self._bh = BihermitianData(self.site, self.g, self.I, self.J,
                                       self.b)
        return self._bh

    def hitchin(self):
        if self._pm is None:
            self._pm = hitchin_poisson(self.bihermitian(), tol=self.tol)
        return self._pm

    def sigma(self):
        if self._sig is None:
            self._sig = sigma_poisson(self.bihermitian(), tol=self.tol)
        return self._sig

    def integrate(self, x):
        return self.site.integrate(x * self.w)

    def normalize(self, u):
        """Subtract the w-mean; tangent potentials average to zero."""
        return u - self.site.ring.lift(self.integrate(u))

    def log_volume_ratio(self):
        """f with e^f = (metric volume) / (transported reference volume)."""
        ring = self.site.ring
        return _HALF * ring.log(det_ring(self.g, ring), tol=self.tol) \
            - ring.log(self.w, tol=self.tol)

    def gscal(self):
        return gscal_bihermitian(self.site, self.bihermitian(),
                                 f=self.log_volume_ratio(), tol=self.tol)


def canonical_direction(point, u):
    """Velocity of (g, I, b, w) under the potential u.

    B = d(I.du) splits along J into (1,1) and (2,0)+(0,2) parts driving g
    and b; I moves by pi applied to B; the density follows minus the
    divergence of sigma#(I.du).  Returns (gdot, idot, bdot, wdot).

    Oriented so that the Kahler subcase J = I integrates to the potential
    family omega_t = omega_0 + t d(I.du) with its Monge-Ampere density;
    structure residuals alone cannot see this orientation.
    """
    site = point.site
    ring = site.ring
    m = site.dim
    dc = dc_scalar(site, point.I, u)
    bform = site.d(one_form(site, list(dc)))
    bb = form_to_bil(bform, ring, m)
    jj = point.J
    b11 = mat_map(bb + jj.T @ bb @ jj, lambda x: _HALF * x)
    b20 = mat_map(bb - jj.T @ bb @ jj, lambda x: _HALF * x)
    gdot = b11 @ jj
    bdot = b20 @ jj
    idot = -(point.hitchin() @ flat(bb))
    xvec = point.sigma() @ np.array(dc, dtype=object)
    moved = ExteriorElement.volume(m, point.w).contract(list(xvec))
    wdot = -site.d(moved).top_coefficient()
    return gdot, idot, bdot, wdot


def _advance(point, gdot, idot, bdot, wdot, h):
    def scale(mat):
        return mat_map(mat, lambda x: h * x)
    return ClassPoint(point.site, point.g + scale(gdot),
                      point.I + scale(idot), point.J,
                      point.b + scale(bdot), point.w + h * wdot,
                      tol=point.tol)


def flow(point, u, t, steps=8, energy=False):
    """RK4 transport of a class point along a fixed potential.

    With energy=True also accumulates the line integral of the
    scalar-curvature 1-form against u, returning (endpoint, energy).
    """
    h = t / steps
    acc = 0.0
    for _ in range(steps):
        stages = []
        rates = []
        p = point
        for frac in (0.0, 0.5, 0.5, 1.0):
            if frac:
                d = stages[-1]
                p = _advance(point, d[0], d[1], d[2], d[3], frac * h)
            stages.append(canonical_direction(p, u))
            if energy:
                rates.append(scalar_one_form(p, u))
        gd = sum_weighted([s[0] for s in stages])
        idd = sum_weighted([s[1] for s in stages])
        bd = sum_weighted([s[2] for s in stages])
        wd = (stages[0][3] + 2 * stages[1][3] + 2 * stages[2][3]
              + stages[3][3]) * (1.0 / 6.0)
        point = _advance(point, gd, idd, bd, wd, h)
        if energy:
            acc += h * (rates[0] + 2 * rates[1] + 2 * rates[2]
                        + rates[3]) / 6.0
    return (point, acc) if energy else point


def sum_weighted(mats):
    k1, k2, k3, k4 = mats
    total = k1 + k2 + k2 + k3 + k3 + k4
    return mat_map(total, lambda x: (1.0 / 6.0) * x)


# -- potential-space geometry ---------------------------------------------------


def metric(point, u, v):
    """Int of the normalized potentials against the transported density."""
    return point.integrate(point.normalize(u) * point.normalize(v))


def poisson_bracket(point, u, v):
    du = [point.site.deriv(u, j) for j in range(point.site.dim)]
    dv = [point.site.deriv(v, j) for j in range(point.site.dim)]
    return pi_eval(point.hitchin(), du, dv)


def sigma_bracket(point, u, v):
    du = [point.site.deriv(u, j) for j in range(point.site.dim)]
    dv = [point.site.deriv(v, j) for j in range(point.site.dim)]
    return pi_eval(point.sigma(), du, dv)


def gamma(point, u, v):
    """Christoffel potential of the Levi-Civita connection.

    gamma(u, v) = -sigma(du, J.dv); its antisymmetrization reproduces
    minus the Poisson bracket of u and v, so the connection is torsion
    free, and u <-> v symmetrization is the genuine second fundamental
    term.
    """
    site = point.site
    dv = [site.deriv(v, j) for j in range(site.dim)]
    du = [site.deriv(u, j) for j in range(site.dim)]
    jdv = endo_one_form(point.J, dv)
    return -pi_eval(point.sigma(), du, jdv)


def gamma_dot(point, direction, u, v, h=1e-3, steps=1):
    """Central difference of gamma(u, v) along the flow of direction."""
    plus = flow(point, direction, h, steps=steps)
    minus = flow(point, direction, -h, steps=steps)
    return (gamma(plus, u, v) - gamma(minus, u, v)) * (1.0 / (2 * h))


def sectional_formula(point, u, v):
    """Closed form of the unnormalized sectional numerator: -|sigma(du,dv)|^2."""
    s = sigma_bracket(point, u, v)
    return -metric(point, s, s)


def sectional_connection(point, u, v, h=1e-3, steps=1):
    """<R(u, v)v, u> assembled from the connection potentials.

    Constant-potential coordinate fields close onto the Poisson bracket,
    so the curvature needs the three gamma terms, their first variations
    along the two flows, and one bracket correction.
    """
    gvv = gamma(point, v, v)
    guv = gamma(point, u, v)
    w = poisson_bracket(point, u, v)
    r = (gamma_dot(point, u, v, v, h=h, steps=steps)
         + gamma(point, u, gvv)
         - gamma_dot(point, v, u, v, h=h, steps=steps)
         - gamma(point, v, guv)
         - gamma(point, w, v))
    return metric(point, r, u)


# -- scalar curvature as a moment map -------------------------------------------


def split_pairing(site, kk, a1, a2, weight=None):
    """1/4 Int tr(kk a1 a2) against the (optionally weighted) measure."""
    prod = kk @ a1 @ a2
    tr = prod[0, 0]
    for k in range(1, 2 * site.dim):
        tr = tr + prod[k, k]
    dens = tr if weight is None else tr * weight
    return 0.25 * site.integrate(dens)


def moment_pairing(site, jj, kk, kdot, u, h0=None, weight=None):
    """Pairing of the u-symmetry direction at kk with a tangent kdot.

    The direction is the twisted Lie derivative of kk along jj applied to
    the covector part du; the value equals 1/4 Int tr(kk L kdot).  Against
    the derivative of the integrated scalar curvature it carries the
    normalization 4 Gscal, with the symmetry direction in the second slot.
    """
    du = [site.deriv(u, j) for j in range(site.dim)]
    e = Section.from_stacked(list(jj @ np.array(
        Section.covector(site, du).stacked(), dtype=object)))
    lie = gen_lie_endo(site, h0, e, kk)
    return split_pairing(site, kk, lie, kdot, weight=weight)


def scalar_one_form(point, v):
    """Minus the normalized potential paired with the scalar curvature."""
    return -point.integrate(point.normalize(v) * point.gscal())


def class_residuals(base, point):
    """Invariants a deformation family must preserve, as sup-norm residuals.

    The real Poisson structure and the closed twist H + db are constant on
    a family, J never moves, the transported density keeps unit mass, and
    each point stays honestly bihermitian.
    """
    site = point.site
    ring = site.ring
    out = {}
    out["poisson constant"] = residual_norm(point.hitchin() - base.hitchin(),
                                            ring)
    tw0 = torsion_three_form(site, base.bihermitian()) \
        - site.d(bil_to_form(base.b, site.dim))
    tw1 = torsion_three_form(site, point.bihermitian()) \
        - site.d(bil_to_form(point.b, site.dim))
    diff = tw1 - tw0
    out["twist constant"] = max(
        [0.0] + [ring.norm_inf(c) for c in diff.terms.values()])
    out["unit mass"] = abs(site.integrate(point.w) - 1)
    out["complex squares"] = residual_norm(
        point.I @ point.I + oeye(site.dim, ring), ring)
    out["hermitian first"] = residual_norm(
        point.I.T @ point.g @ point.I - point.g, ring)
    out["hermitian second"] = residual_norm(
        point.J.T @ point.g @ point.J - point.g, ring)
    return out
