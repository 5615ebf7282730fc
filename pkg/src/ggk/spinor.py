"""Pure spinor lines, real potentials, divergences, and scalar curvature.

The scalar invariant of a generalized Kahler pair is computed two ways,
through Mukai pairings of the pair's spinor lines and through the weighted
Bismut curvature of the underlying metric data, and the two routes are
cross-checked by the suite.

Conventions, each pinned by a test:

* the spinor line of a structure is the joint Clifford annihilator of its
  +i eigenspace; representatives are scaled so the lowest-degree nonzero
  homogeneous component has leading coefficient 1 in lexicographic blade
  order, and gauge freedom e^{iu} is tested rather than assumed away;
* normalized means (2i)^{-n} (psi, conj psi) = vol under the Mukai pairing
  with a real positive weight;
* a real potential solves d_H psi = i kappa e . psi.  kappa = 1/2 is the
  divergence normalization: it makes the vector part of e match the
  Poisson divergence d(i_pi vol) = i_X vol exactly.  The scalar-curvature
  pairing inserts i kappa e, the same section for either kappa;
* Gscal . vol = Re[(2i)^{-n}((psi1, d_H(i k e2 . conj psi1))
                           + (psi2, d_H(i k e1 . conj psi2)))],
  which the bihermitian route reproduces as
  (R - |H|^2/12 + 2 Delta f - |df|^2) / 4 with H = -d^c_I omega_I.
"""

from __future__ import annotations

import cmath
import itertools
from fractions import Fraction

import numpy as np

from .courant import Section, gen_lie_endo, psi_image
from .curvature import levi_civita, one_form, weighted_bismut
from .exterior import ExteriorElement, exp_form, mukai_pairing
from .fiber import (bil_to_form, contract_bivector, form_residual,
                    gualtieri_pair, poisson_map, torsion_three_form)
from .linalg import (all_constant, constant_part, det_ring, mat_inv, mat_map,
                     nullspace_exact, omat, ovec, residual_norm, solve_exact)
from .rational import CRat, QiRing

_HALF = Fraction(1, 2)
_QI = QiRing()


# -- blade bookkeeping ---------------------------------------------------------


def blade_basis(m):
    """All blades over m covectors, ordered by degree then lexicographically."""
    out = []
    for k in range(m + 1):
        out.extend(itertools.combinations(range(m), k))
    return out


def _clifford_matrix(m, blades, stacked, one):
    """Matrix of (i_X + xi ^) on the blade basis, raw constant entries."""
    index = {b: r for r, b in enumerate(blades)}
    zero = one * 0
    mat = np.full((len(blades), len(blades)), zero, dtype=object)
    v, a = list(stacked[:m]), list(stacked[m:])
    for c, b in enumerate(blades):
        img = ExteriorElement(m, {b: one}).clifford(v, a)
        for blade, cc in img.terms.items():
            mat[index[blade], c] = cc
    return mat


def _tie_break(site, blades, coeffs, tol=1e-12):
    """Scale so the first nonzero coefficient in blade order is 1, lift.

    Float coefficients below tol * max are numerical zeros and dropped.
    """
    ring = site.ring
    if ring.exact:
        cut = None
    else:
        cut = tol * max(abs(c) for c in coeffs)
    lead = None
    for c in coeffs:
        if (c if cut is None else abs(c) > cut):
            lead = c
            break
    if lead is None:
        raise ValueError("zero spinor")
    inv = CRat(1) / lead if isinstance(lead, CRat) else 1.0 / lead
    terms = {}
    for b, c in zip(blades, coeffs):
        cc = c * inv
        if cut is not None and abs(cc) <= tol * max(abs(inv), 1.0):
            continue
        if cc:
            terms[b] = ring.lift(cc)
    return ExteriorElement(site.dim, terms)


# -- spinor lines ----------------------------------------------------------------


class PureSpinorRep:
    """A spinor-line representative, optionally factored as weight * base."""

    def __init__(self, site, jj, psi, weight=None, base=None, normalized=False):
        self.site = site
        self.jj = jj
        self.psi = psi
        self.weight = weight
        self.base = base
        self.normalized = normalized

    def conj(self):
        return self.psi.map_coefficients(self.site.ring.conj)

    def annihilator_residual(self):
        """Purity: the +i eigenspace projector columns must kill psi."""
        ring = self.site.ring
        m = self.site.dim
        half = ring.from_fraction(_HALF)
        mi = ring.i()
        worst = 0.0
        for k in range(2 * m):
            col = [half * ((ring.one() if r == k else ring.zero())
                           - mi * self.jj[r, k]) for r in range(2 * m)]
            res = Section.from_stacked(col).clifford(self.psi)
            worst = max(worst, form_residual(res, ring))
        return worst

    def mukai_density(self):
        return mukai_pairing(self.psi, self.conj())


def pure_spinor_line(site, jj, tol=1e-9):
    """Representative of the spinor line of a constant-matrix structure.

    Solves the +i eigenspace of the frame matrix, then the joint kernel of
    its Clifford operators on the full form space; errors unless that
    kernel is one-dimensional.
    """
    ring = site.ring
    m = site.dim
    if not all_constant(jj, ring):
        raise ValueError("constant frame matrices only; supply a representative")
    jc = constant_part(jj, ring)
    blades = blade_basis(m)
    if ring.exact:
        a = mat_map(jc, CRat.coerce)
        for r in range(2 * m):
            a[r, r] = a[r, r] - CRat(0, 1)
        kern = nullspace_exact(a)
        if len(kern) != m:
            raise ValueError(f"eigenspace dimension {len(kern)}, structure not pure")
        ops = [_clifford_matrix(m, blades, list(vec), CRat(1)) for vec in kern]
        null = nullspace_exact(np.concatenate(ops, axis=0))
        if len(null) != 1:
            raise ValueError(f"spinor kernel dimension {len(null)}")
        coeffs = list(null[0])
    else:
        a = np.array([[complex(x) for x in row] for row in jc], dtype=complex)
        a -= 1j * np.eye(2 * m)
        _, s, vh = np.linalg.svd(a)
        kern = [vh[r].conj() for r in range(2 * m) if s[r] <= tol * max(s[0], 1.0)]
        if len(kern) != m:
            raise ValueError(f"eigenspace dimension {len(kern)}, structure not pure")
        ops = [_clifford_matrix(m, blades, list(vec), 1.0 + 0j).astype(complex)
               for vec in kern]
        _, s, vh = np.linalg.svd(np.concatenate(ops, axis=0))
        small = [r for r in range(len(s)) if s[r] <= tol * max(s[0], 1.0)]
        if len(small) != 1:
            raise ValueError(f"spinor kernel dimension {len(small)}")
        coeffs = list(vh[small[0]].conj())
    return PureSpinorRep(site, jj, _tie_break(site, blades, coeffs))


def nondegenerate_spinors(site, bh, tol=1e-9):
    """Closed-form spinor lines when both I - J and I + J are invertible.

    With F+- the 2-forms whose flat maps are -2g(I +- J)^{-1},
    Omega = [g(I+J)^{-1}(I-J)^{-1}]^T and b~ = [g(I+J)^{-1}(I-J)]^T as
    bilinears, and b' = b - b~, the representatives are
    psi1 = exp(4 Omega - b' + i F-) and psi2 = exp(-b' + i F+).
    """
    ring = site.ring
    m = site.dim
    mi = ring.i()
    ipj_inv = mat_inv(bh.I + bh.J, ring, tol=tol)
    imj_inv = mat_inv(bh.I - bh.J, ring, tol=tol)
    fplus = bil_to_form((bh.g @ ipj_inv).T, m).map_coefficients(lambda c: -2 * c)
    fminus = bil_to_form((bh.g @ imj_inv).T, m).map_coefficients(lambda c: -2 * c)
    omega = bil_to_form((bh.g @ ipj_inv @ imj_inv).T, m)
    btilde = bil_to_form((bh.g @ ipj_inv @ (bh.I - bh.J)).T, m)
    bprime = bil_to_form(bh.b, m) - btilde
    psi1 = exp_form(4 * omega - bprime + mi * fminus)
    psi2 = exp_form(mi * fplus - bprime)
    jj1, jj2 = gualtieri_pair(bh, tol=tol)
    return (PureSpinorRep(site, jj1, psi1), PureSpinorRep(site, jj2, psi2))


# -- normalization ---------------------------------------------------------------


def _two_i_pow(ring, n):
    return ring.lift(CRat(0, 2) ** n)


def _const_div(ring, num, den, tol):
    """num / den when den is a constant (exact) or any field (float)."""
    if ring.is_constant(den):
        c = ring.as_constant(den)
        inv = CRat(1) / c if isinstance(c, CRat) else 1.0 / c
        return num * ring.lift(inv)
    if ring.exact:
        raise ValueError("nonconstant exact division; supply the factor")
    return num * ring.inv(den, tol=tol)


def _real_sqrt(ring, x, tol):
    """Real positive square root of a ring scalar; exact when possible."""
    if ring.is_constant(x):
        c = ring.as_constant(x)
        if isinstance(c, CRat):
            return ring.lift(_QI.sqrt(c))
        r = cmath.sqrt(c)
        if abs(r.imag) > tol * max(abs(r), 1.0):
            raise ValueError(f"square root not real: {r}")
        return ring.lift(complex(r.real, 0.0))
    if ring.exact:
        raise ValueError("nonconstant exact square root; supply weight=")
    return ring.sqrt(x, tol=tol)


def normalize_spinor(rep, vol, weight=None, tol=1e-9):
    """Rescale a representative so (2i)^{-n} (psi, conj psi) = vol.

    The weight is the real positive solution; pass ``weight`` to supply it
    in closed form (it is then verified, which keeps exact backends exact
    when the square root is not polynomial).
    """
    site = rep.site
    ring = site.ring
    n = site.dim // 2
    dens = rep.mukai_density()
    if ring.is_zero(dens, 0.0 if ring.exact else tol):
        raise ValueError("Mukai-degenerate representative")
    vtop = vol.top_coefficient()
    target = _two_i_pow(ring, n) * vtop
    if weight is None:
        weight = _real_sqrt(ring, _const_div(ring, target, dens, tol), tol)
    wpsi = rep.psi.map_coefficients(lambda c: weight * c)
    res = ring.norm_inf(weight * ring.conj(weight) * dens - target)
    if res > (0.0 if ring.exact else tol * max(ring.norm_inf(target), 1.0)):
        raise ValueError(f"normalization residual {res}")
    base = rep.base if rep.base is not None else rep.psi
    total = weight * rep.weight if rep.weight is not None else weight
    return PureSpinorRep(site, rep.jj, wpsi, weight=total, base=base,
                         normalized=True)


# -- real potentials --------------------------------------------------------------


class RealPotential:
    """e with d_H psi = i kappa e . psi, held as num / (kappa * denom)."""

    def __init__(self, site, num, denom, kappa, residual):
        self.site = site
        self.num = num
        self.denom = denom
        self.kappa = Fraction(kappa)
        self.residual = residual

    def section(self, tol=1e-9):
        ring = self.site.ring
        kap = ring.from_fraction(self.kappa)
        scale = _const_div(ring, ring.one(), kap * self.denom, tol)
        return self.num * scale

    def pairing_section(self, tol=1e-9):
        """The kappa-independent insertion i kappa e = i num / denom."""
        ring = self.site.ring
        scale = _const_div(ring, ring.i(), self.denom, tol)
        return self.num * scale


def _constant_vec(form, blades, ring):
    out = []
    for b in blades:
        c = form.terms.get(b)
        out.append(ring.as_constant(c) if c is not None
                   else (CRat(0) if ring.exact else 0j))
    return out


def real_potential(site, h0, rep, kappa=_HALF, tol=1e-9):
    """Solve d_H psi = i kappa e . psi for a real section e.

    A representative factored as weight * (d_H-closed base) yields
    e = JJ(0, d weight) / (kappa weight) in closed form; otherwise the
    constant linear system is solved exactly (or in least squares with a
    residual bound in float mode).
    """
    ring = site.ring
    m = site.dim
    strict = 0.0 if ring.exact else tol
    if rep.weight is not None and rep.base is not None:
        dbase = site.d_twisted(h0, rep.base)
        if form_residual(dbase, ring) <= strict:
            dw = [site.deriv(rep.weight, j) for j in range(m)]
            wbar = ring.conj(rep.weight)
            if all(ring.is_zero(ring.imag(c * wbar), strict) for c in dw):
                num = Section.from_stacked(list(rep.jj @ ovec(
                    [ring.zero()] * m + dw)))
                res = (ExteriorElement.one_form(m, dw).wedge(rep.base)
                       - ring.i() * num.clifford(rep.base))
                return RealPotential(site, num, rep.weight, kappa,
                                     form_residual(res, ring))
            if not ring.exact:
                # complex weight w = |w| e^{iu}: the real and imaginary parts
                # of d log w enter through JJ and the identity covector slot
                winv = ring.inv(rep.weight, tol=tol)
                dlog = [c * winv for c in dw]
                num = (Section.from_stacked(list(rep.jj @ ovec(
                    [ring.zero()] * m + [ring.real(c) for c in dlog])))
                    + Section.covector(site, [ring.imag(c) for c in dlog]))
                res = form_residual(site.d_twisted(h0, rep.psi)
                                    - ring.i() * num.clifford(rep.psi), ring)
                return RealPotential(site, num, ring.one(), kappa, res)
    dpsi = site.d_twisted(h0, rep.psi)
    if not all(ring.is_constant(c) for c in
               list(rep.psi.terms.values()) + list(dpsi.terms.values())):
        raise ValueError("potential needs a weighted closed base or constant data")
    blades = blade_basis(m)
    rhs = _constant_vec(dpsi, blades, ring)
    cols = []
    for k in range(2 * m):
        img = Section.basis(site, k).clifford(rep.psi)
        cols.append(_constant_vec(img.map_coefficients(lambda c: ring.i() * c),
                                  blades, ring))
    if ring.exact:
        nb = len(blades)
        are = omat([[cols[k][r].re for k in range(2 * m)] for r in range(nb)]
                   + [[cols[k][r].im for k in range(2 * m)] for r in range(nb)])
        bre = ovec([c.re for c in rhs] + [c.im for c in rhs])
        x = solve_exact(are.T @ are, are.T @ bre)
        num = Section.from_stacked([ring.lift(CRat(q)) for q in x])
        res = float(max(abs(q) for q in (are @ x - bre)))
        if res > 0.0:
            raise ValueError("potential system inconsistent (structure not integrable?)")
    else:
        acx = np.array(cols, dtype=complex).T
        are = np.concatenate([acx.real, acx.imag], axis=0)
        bcx = np.array(rhs, dtype=complex)
        bre = np.concatenate([bcx.real, bcx.imag])
        x, *_ = np.linalg.lstsq(are, bre, rcond=None)
        res = float(np.linalg.norm(are @ x - bre, np.inf))
        scale = max(float(np.linalg.norm(bre, np.inf)), 1.0)
        if res > tol * scale:
            raise ValueError(f"potential residual {res} (structure not integrable?)")
        num = Section.from_stacked([ring.lift(complex(q)) for q in x])
    return RealPotential(site, num, ring.one(), kappa, res)


# -- divergences ------------------------------------------------------------------


class DivergenceData:
    """Divergence of a structure relative to a volume, with its residuals."""

    def __init__(self, rep, potential, x, aut_two, poisson_div,
                 vector_residual, symmetry_residual):
        self.rep = rep
        self.potential = potential
        self.x = x
        self.aut_two = aut_two
        self.poisson_div = poisson_div
        self.vector_residual = vector_residual
        self.symmetry_residual = symmetry_residual


def divergence(site, h0, jj, vol, rep=None, weight=None, kappa=_HALF, tol=1e-9):
    """Divergence section of a structure relative to vol, with residuals.

    vector_residual clears denominators in d(i_pi vol) = i_X vol, so it is
    exact on exact backends; symmetry_residual is the generalized Lie
    derivative of the structure along its own divergence.
    """
    ring = site.ring
    if rep is None:
        rep = pure_spinor_line(site, jj, tol=tol)
    if not rep.normalized:
        rep = normalize_spinor(rep, vol, weight=weight, tol=tol)
    pot = real_potential(site, h0, rep, kappa=kappa, tol=tol)
    dpiv = site.d(contract_bivector(poisson_map(jj), vol, ring))
    kap = ring.from_fraction(Fraction(kappa))
    cleared = vol.contract(pot.num.v) - (kap * pot.denom) * dpiv
    vres = form_residual(cleared, ring)
    x = aut_two = None
    sym = None
    try:
        sec = pot.section(tol=tol)
    except ValueError:
        sec = None
    if sec is not None:
        x, aut_two = psi_image(site, h0, sec)
        sym = residual_norm(gen_lie_endo(site, h0, sec, jj), ring)
    return DivergenceData(rep, pot, x, aut_two, dpiv, vres, sym)


def adaptedness(site, bh, vol, gk=None, tol=1e-9):
    """Report on X = (I theta_I# + J theta_J# - (I+J) grad f)/2.

    f is read off vol = e^{-f} dV_g.  The report carries X, its Killing
    and holomorphy residuals, and, when gk is given and its second
    structure has a computable divergence, the residual of that divergence
    acting on the first structure.
    """
    ring = site.ring
    half = ring.from_fraction(_HALF)
    conn = levi_civita(site, bh.g, tol=tol)
    df = ovec(_weight_differential(site, bh.g, vol, tol))
    raw = (bh.I @ (conn.ginv @ conn.lee_form(bh.I))
           + bh.J @ (conn.ginv @ conn.lee_form(bh.J))
           - (bh.I + bh.J) @ (conn.ginv @ df))
    x = ovec([half * c for c in raw])
    report = {
        "X": x,
        "killing": conn.killing_residual(x),
        "lie_I": residual_norm(site.lie_matrix(list(x), bh.I), ring),
        "lie_J": residual_norm(site.lie_matrix(list(x), bh.J), ring),
    }
    if gk is not None:
        dd = divergence(site, gk.h0, gk.jj2, vol, tol=tol)
        sec = dd.potential.section(tol=tol)
        report["div_symmetry"] = residual_norm(
            gen_lie_endo(site, gk.h0, sec, gk.jj1), ring)
    gate = 0.0 if ring.exact else tol
    report["adapted"] = all(v <= gate for k, v in report.items() if k != "X")
    return report


def _weight_differential(site, g, vol, tol):
    """d f for vol = e^{-f} dV_g; constant ratio means f is constant."""
    ring = site.ring
    detg = det_ring(g, ring)
    ratio2 = _const_div(ring, vol.top_coefficient()
                        * vol.top_coefficient(), detg, tol)
    if ring.is_constant(ratio2):
        return [ring.zero()] * site.dim
    if ring.exact:
        raise ValueError("nonconstant exact density; adaptedness needs float mode")
    rho = ring.sqrt(ratio2, tol=tol)
    inv = ring.inv(rho, tol=tol)
    return [-(site.deriv(rho, j)) * inv for j in range(site.dim)]


# -- scalar curvature --------------------------------------------------------------


def gscal_spinorial(gk, vol, reps=None, weights=None, kappa=_HALF, tol=1e-9):
    """Scalar curvature from the two normalized spinor lines.

    Gscal . vol = Re[(2i)^{-n}((psi1, d_H(i k e2 . conj psi1))
                             + (psi2, d_H(i k e1 . conj psi2)))].
    The inserted section i kappa e is kappa-independent, so the choice of
    potential convention cannot move the value.
    """
    site = gk.site
    ring = site.ring
    n = site.dim // 2
    if reps is None:
        reps = (pure_spinor_line(site, gk.jj1, tol=tol),
                pure_spinor_line(site, gk.jj2, tol=tol))
    if weights is None:
        weights = (None, None)
    nreps = [r if r.normalized else normalize_spinor(r, vol, weight=w, tol=tol)
             for r, w in zip(reps, weights)]
    pots = [real_potential(site, gk.h0, r, kappa=kappa, tol=tol) for r in nreps]
    etas = [p.pairing_section(tol=tol) for p in pots]
    total = ring.zero()
    for rep, eta in ((nreps[0], etas[1]), (nreps[1], etas[0])):
        total = total + mukai_pairing(
            rep.psi, site.d_twisted(gk.h0, eta.clifford(rep.conj())))
    total = ring.lift(CRat(1) / (CRat(0, 2) ** n)) * total
    return _const_div(ring, ring.real(total), vol.top_coefficient(), tol)


def gscal_bihermitian(site, bh, f=None, tol=1e-9):
    """(R - |H|^2 / 12 + 2 Delta f - |df|^2) / 4 with H = -d^c_I omega_I."""
    h = torsion_three_form(site, bh)
    wc = weighted_bismut(site, bh.g, h, f, tol=tol)
    return site.lift(Fraction(1, 4)) * wc.scalar


def twisted_trace_check(site, bh, f, tol=1e-9):
    """Residuals of n d(F g^{-1} df) ^ F^{n-1} = (Delta f - <df, d log det K>/2) F^n
    for K = I + J and K = I - J, F the 2-form with flat map -2 g K^{-1}.

    The n on the left converts the literal wedge-power ratio into the trace
    of the twisted Hessian (divided powers F^k / k! absorb it otherwise)."""
    ring = site.ring
    m = site.dim
    n = m // 2
    conn = levi_civita(site, bh.g, tol=tol)
    df = conn.d_scalar(f)
    half = ring.from_fraction(_HALF)
    out = {}
    for label, k in (("plus", bh.I + bh.J), ("minus", bh.I - bh.J)):
        kc = constant_part(k, ring)
        dc = np.linalg.det(np.array([[complex(x) for x in row] for row in kc]))
        if abs(dc) <= tol:
            raise ValueError(f"I {'+' if label == 'plus' else '-'} J degenerate")
        fflat = mat_map(bh.g @ mat_inv(k, ring, tol=tol), lambda c: -2 * c)
        fform = bil_to_form(fflat.T.copy(), m)
        xi = fflat @ (conn.ginv @ df)
        lhs = site.d(one_form(site, list(xi)))
        fn = fform
        for _ in range(n - 1):
            lhs = lhs.wedge(fform)
            fn = fn.wedge(fform)
        detk = det_ring(k, ring)
        dld = [_const_div(ring, site.deriv(detk, j), detk, tol)
               for j in range(m)]
        ip = conn.pairing(df, dld)
        rhs = (conn.laplacian(f) - half * ip) * fn.top_coefficient()
        out[label] = ring.norm_inf(n * lhs.top_coefficient() - rhs)
    return out
