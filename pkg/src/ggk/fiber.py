"""Pointwise generalized Kahler algebra on the split bundle T + T*.

Endomorphisms of the split bundle are (2m x 2m) object matrices in the
frame basis (e_1..e_m, e^1..e^m).  Conventions, pinned once and tested
everywhere:

* bilinear matrices store B[j, k] = B(e_j, e_k); the flat map of a 2-form
  is X -> B(X, .), i.e. the matrix transpose of the bilinear matrix;
* endomorphism matrices store images in columns;
* a complex structure acts on a 1-form by K.xi = -xi o K (matrix -K^T xi),
  so d^c u = K du and d d^c u is the usual Kahler operator;
* the Poisson bivector of a generalized complex structure is its
  upper-right block; contracting a form with a bivector composes interior
  products, i_{X ^ Y} = i_X i_Y;
* the inverse bivector of a nondegenerate 2-form F is -(flat F)^{-1}, so
  that the upper-right block of the symplectic-type structure of F is
  exactly F^{-1}.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .exterior import ExteriorElement
from .linalg import (constant_part, mat_inv, mat_map, oeye, omat, ozeros,
                     residual_norm)
from .rational import CRat

_HALF = Fraction(1, 2)


# -- two-form and bivector plumbing ------------------------------------------


def flat(b_bil):
    """Flat map of a 2-form as a matrix: X -> B(X, .)."""
    return b_bil.T.copy()


def form_to_bil(alpha2, ring, dim):
    out = ozeros((dim, dim), ring)
    for (j, k), c in alpha2.terms.items():
        out[j, k] = c
        out[k, j] = -c
    return out


def bil_to_form(b_bil, dim):
    terms = {}
    for j in range(dim):
        for k in range(j + 1, dim):
            if b_bil[j, k]:
                terms[(j, k)] = b_bil[j, k]
    return ExteriorElement(dim, terms)


def omega_bil(g, K):
    """Hermitian form omega_K(X, Y) = g(K X, Y) as a bilinear matrix."""
    return K.T @ g


def pi_from_two_form(f_bil, ring, tol=1e-12):
    """Inverse bivector map of a nondegenerate 2-form: -(flat F)^{-1}."""
    return mat_map(mat_inv(flat(f_bil), ring, tol=tol), lambda x: -x)


def contract_bivector(pi_map, alpha, ring):
    """i_pi alpha with i_{X^Y} = i_X i_Y; pi^{jk} = pi_map[k, j]."""
    dim = pi_map.shape[0]
    out = ExteriorElement(dim)
    for j in range(dim):
        for k in range(dim):
            c = pi_map[k, j]
            if not c:
                continue
            ej = [ring.zero()] * dim
            ej[j] = ring.one()
            ek = [ring.zero()] * dim
            ek[k] = ring.one()
            out = out + _HALF * c * alpha.contract(ek).contract(ej)
    return out


def pi_eval(pi_map, alpha_co, beta_co):
    """pi(alpha, beta) = beta(pi_map alpha) on covector coefficient lists."""
    dim = pi_map.shape[0]
    acc = None
    for k in range(dim):
        for j in range(dim):
            t = beta_co[k] * pi_map[k, j] * alpha_co[j]
            acc = t if acc is None else acc + t
    return acc


def tr_pi(pi_map, gamma_bil):
    """Bivector trace of a 2-form: (1/2) sum pi^{jk} gamma_{jk}."""
    acc = None
    dim = pi_map.shape[0]
    for k in range(dim):
        for j in range(dim):
            t = pi_map[k, j] * gamma_bil[j, k]
            acc = t if acc is None else acc + t
    return _HALF * acc


def endo_one_form(K, xi):
    """Action K.xi = -xi o K on covector coefficients."""
    out = -(K.T @ np.array(list(xi), dtype=object))
    return list(out)


# -- split-bundle blocks ---------------------------------------------------------


def block2(a, b, c, d):
    m = a.shape[0]
    out = np.empty((2 * m, 2 * m), dtype=object)
    out[:m, :m] = a
    out[:m, m:] = b
    out[m:, :m] = c
    out[m:, m:] = d
    return out


def blocks(kk):
    m = kk.shape[0] // 2
    return (kk[:m, :m].copy(), kk[:m, m:].copy(),
            kk[m:, :m].copy(), kk[m:, m:].copy())


def neutral_matrix(ring, m):
    n = ozeros((2 * m, 2 * m), ring)
    half = ring.from_fraction(_HALF)
    for j in range(m):
        n[j, m + j] = half
        n[m + j, j] = half
    return n


def bfield_endo(ring, b_bil):
    m = b_bil.shape[0]
    return block2(oeye(m, ring), ozeros((m, m), ring),
                  mat_map(flat(b_bil), lambda x: x), oeye(m, ring))


def bfield_conjugate(kk, b_bil, ring):
    """e^b K e^{-b} on split-bundle endomorphisms."""
    m = b_bil.shape[0]
    eb = bfield_endo(ring, b_bil)
    ebinv = bfield_endo(ring, mat_map(b_bil, lambda x: -x))
    return eb @ kk @ ebinv


def poisson_map(kk):
    """Upper-right block: the Poisson bivector map of the structure."""
    m = kk.shape[0] // 2
    return kk[:m, m:].copy()


# -- bihermitian data and the correspondence -----------------------------------------


class BihermitianData:
    """(g, I, J, b) with frame-matrix entries in the site ring."""

    def __init__(self, site, g, i_endo, j_endo, b=None):
        self.site = site
        self.g = g
        self.I = i_endo
        self.J = j_endo
        self.b = b if b is not None else ozeros((site.dim, site.dim), site.ring)

    def validate(self, tol=0.0):
        ring = self.site.ring
        m = self.site.dim
        eye = oeye(m, ring)
        res = {
            "g symmetric": residual_norm(self.g - self.g.T, ring),
            "b skew": residual_norm(self.b + self.b.T, ring),
            "I squares to -1": residual_norm(self.I @ self.I + eye, ring),
            "J squares to -1": residual_norm(self.J @ self.J + eye, ring),
            "g I-hermitian": residual_norm(self.I.T @ self.g @ self.I - self.g, ring),
            "g J-hermitian": residual_norm(self.J.T @ self.g @ self.J - self.g, ring),
        }
        bad = {k: v for k, v in res.items() if v > tol}
        if bad:
            raise ValueError(f"bihermitian data invalid: {bad}")
        return res

    def omega(self, which):
        k = self.I if which == "I" else self.J
        return omega_bil(self.g, k)

    def ginv(self, tol=1e-12):
        return mat_inv(self.g, self.site.ring, tol=tol)


def gualtieri_pair(bh, tol=1e-12):
    """The two commuting generalized complex structures of (g, I, J, b).

    Returns (JJ1, JJ2); for I = J and b = 0 the first is the complex-type
    structure diag(I, -I^T) and the second the symplectic-type structure
    of omega_I.
    """
    ring = bh.site.ring
    ginv = bh.ginv(tol=tol)
    half = ring.from_fraction(_HALF)
    ig, jg = bh.I @ ginv, bh.J @ ginv
    wi, wj = omega_bil(bh.g, bh.I), omega_bil(bh.g, bh.J)
    out = []
    for sign in (1, -1):
        a = mat_map(bh.I + bh.J if sign > 0 else bh.I - bh.J,
                    lambda x: half * x)
        # omega_K^{-1} as a map T* -> T is -K g^{-1}, so the upper-right
        # block -1/2 (omega_I^{-1} -+ omega_J^{-1}) is +1/2 (I -+ J) g^{-1}
        winv = mat_map(ig - jg if sign > 0 else ig + jg,
                       lambda x: half * x)
        w = mat_map(wi - wj if sign > 0 else wi + wj,
                    lambda x: half * x)
        d = mat_map(bh.I.T + bh.J.T if sign > 0 else bh.I.T - bh.J.T,
                    lambda x: -half * x)
        kk = block2(a, winv, flat(w), d)
        out.append(bfield_conjugate(kk, bh.b, ring))
    return out[0], out[1]


def generalized_metric(jj1, jj2):
    return -(jj1 @ jj2)


def gualtieri_inverse(site, jj1, jj2, tol=1e-12):
    """Recover (g, I, J, b) from a commuting orthogonal pair."""
    ring = site.ring
    m = site.dim
    gg = generalized_metric(jj1, jj2)
    ur = gg[:m, m:].copy()          # g^{-1}
    ul = gg[:m, :m].copy()          # -g^{-1} flat(b)
    g = mat_inv(ur, ring, tol=tol)
    beta = mat_map(g @ ul, lambda x: -x)    # flat(b)
    b_bil = mat_map(beta.T, lambda x: x)
    nb = mat_map(b_bil, lambda x: -x)
    j1 = bfield_conjugate(jj1, nb, ring)
    j2 = bfield_conjugate(jj2, nb, ring)
    a1 = j1[:m, :m].copy()
    a2 = j2[:m, :m].copy()
    i_endo = a1 + a2
    j_endo = a1 - a2
    return BihermitianData(site, g, i_endo, j_endo, b_bil)


class GKPair:
    """A commuting orthogonal pair together with its closed twist."""

    def __init__(self, site, jj1, jj2, h0):
        self.site = site
        self.jj1 = jj1
        self.jj2 = jj2
        self.h0 = h0

    @classmethod
    def from_bihermitian(cls, site, bh):
        jj1, jj2 = gualtieri_pair(bh)
        h0 = torsion_three_form(site, bh) - site.d(bil_to_form(bh.b, site.dim))
        return cls(site, jj1, jj2, h0)

    def validate(self, tol=0.0):
        ring = self.site.ring
        m = self.site.dim
        eye = oeye(2 * m, ring)
        pm = neutral_matrix(ring, m)
        gg = generalized_metric(self.jj1, self.jj2)
        res = {
            "jj1 squares to -1": residual_norm(self.jj1 @ self.jj1 + eye, ring),
            "jj2 squares to -1": residual_norm(self.jj2 @ self.jj2 + eye, ring),
            "pair commutes": residual_norm(self.jj1 @ self.jj2
                                           - self.jj2 @ self.jj1, ring),
            "jj1 orthogonal": residual_norm(self.jj1.T @ pm @ self.jj1 - pm, ring),
            "jj2 orthogonal": residual_norm(self.jj2.T @ pm @ self.jj2 - pm, ring),
            "twist closed": form_residual(self.site.d(self.h0), ring),
        }
        bad = {k: v for k, v in res.items() if v > tol}
        if bad:
            raise ValueError(f"pair invalid: {bad}")
        # positivity of <G., .> is checked numerically at the constant term
        gc = constant_part(pm @ gg, ring).astype(complex)
        ev = np.linalg.eigvalsh((gc + gc.conj().T) / 2)
        if ev.min() <= 0:
            raise ValueError(f"pair metric not positive, min eigenvalue {ev.min()}")
        return res


def form_residual(alpha, ring):
    worst = 0.0
    for c in alpha.terms.values():
        worst = max(worst, ring.norm_inf(c))
    return worst


def pointwise_identities(bh, alpha, beta, tol=1e-12):
    """Residuals of the three pointwise symmetries of sigma and pi.

    With sigma = 1/2 (I + J) g^{-1}, pi = 1/2 [I, J] g^{-1}, and
    endomorphisms acting on 1-forms by K.xi = -xi o K:

      1. sigma(alpha, J.beta) + sigma(I.alpha, beta) = 0
      2. pi(alpha, beta) - sigma((J - I).alpha, beta) = 0
      3. tr(sigma#(beta ^ I.beta)b o sigma#(alpha ^ J.alpha)b)
         = 1/2 [<(I+J).alpha, beta>^2 + <(I+J).alpha, I.beta>^2]

    where <,> is the g^{-1} inner product on covectors.  The second
    identity is sensitive to the 1-form action convention: with plain
    precomposition xi o K it holds with I - J instead.
    """
    site = bh.site
    ring = site.ring
    ginv = bh.ginv(tol=tol)
    sig = sigma_poisson(bh, tol=tol)
    pi = hitchin_poisson(bh, tol=tol)
    ia = np.asarray(endo_one_form(bh.I, alpha), dtype=object)
    ja = np.asarray(endo_one_form(bh.J, alpha), dtype=object)
    ib = np.asarray(endo_one_form(bh.I, beta), dtype=object)
    jb = np.asarray(endo_one_form(bh.J, beta), dtype=object)
    r1 = pi_eval(sig, alpha, jb) + pi_eval(sig, ia, beta)
    r2 = pi_eval(pi, alpha, beta) - pi_eval(sig, ja - ia, beta)

    def sharp_flat(co1, co2):
        bil = np.outer(co1, co2) - np.outer(co2, co1)
        return sig @ flat(bil)

    ma = sharp_flat(alpha, ja)
    mb = sharp_flat(beta, ib)
    prod = mb @ ma
    trace = ring.zero()
    for k in range(site.dim):
        trace = trace + prod[k, k]
    t1 = (ia + ja) @ (ginv @ beta)
    t2 = (ia + ja) @ (ginv @ ib)
    half = ring.from_fraction(_HALF)
    r3 = trace - half * (t1 * t1 + t2 * t2)
    return {"sigma skew-exchange": r1, "pi from sigma": r2,
            "sigma trace square": r3}


def gcs_from_symplectic(om_bil, ring):
    """Symplectic-type structure [[0, -(flat w)^{-1}], [flat w, 0]]."""
    m = om_bil.shape[0]
    w = flat(om_bil)
    winv = mat_inv(w, ring)
    return block2(ozeros((m, m), ring), mat_map(winv, lambda x: -x),
                  w, ozeros((m, m), ring))


def gcs_from_complex(i_endo, ring, variant="tangent"):
    """Complex-type structure.

    variant "tangent":  diag(I, -I^T) (annihilated by the antiholomorphic
    volume form); variant "cotangent": diag(-I, I^T) (annihilated by the
    holomorphic volume form).
    """
    m = i_endo.shape[0]
    z = ozeros((m, m), ring)
    if variant == "tangent":
        return block2(i_endo, z, z, mat_map(i_endo.T, lambda x: -x))
    if variant == "cotangent":
        return block2(mat_map(i_endo, lambda x: -x), z, z, i_endo.T.copy())
    raise ValueError("variant must be tangent or cotangent")


def hitchin_poisson(bh, tol=1e-12):
    """(1/2) [I, J] g^{-1}, the real Poisson structure of the pair."""
    ginv = bh.ginv(tol=tol)
    half = bh.site.ring.from_fraction(_HALF)
    return mat_map(bh.I @ bh.J @ ginv - bh.J @ bh.I @ ginv, lambda x: half * x)


def sigma_poisson(bh, tol=1e-12):
    """(1/2)(I + J) g^{-1}, the Poisson block of the second structure."""
    ginv = bh.ginv(tol=tol)
    half = bh.site.ring.from_fraction(_HALF)
    return mat_map((bh.I + bh.J) @ ginv, lambda x: half * x)


# -- type decomposition and d^c ------------------------------------------------------


def type_projectors(i_endo, ring):
    """(1,0) and (0,1) projectors on covector components: (1 -+ i I^T)/2."""
    m = i_endo.shape[0]
    eye = oeye(m, ring)
    iu = ring.i()
    half = ring.from_fraction(_HALF)
    iit = mat_map(i_endo.T, lambda x: iu * x)
    p10 = mat_map(eye - iit, lambda x: half * x)
    p01 = mat_map(eye + iit, lambda x: half * x)
    return p10, p01


def decompose_by_type(i_endo, alpha, ring):
    """Split a form into (p, q) parts under the complex structure.

    Returns a dict {(p, q): ExteriorElement} over the complexified algebra.
    Each frame covector splits through the projectors (1 -+ i I^T)/2
    applied slotwise to every blade.
    """
    dim = i_endo.shape[0]
    p10, p01 = type_projectors(i_endo, ring)
    out = {}
    for blade, c in alpha.terms.items():
        parts = [ExteriorElement.scalar(dim, c)]
        types = [(0, 0)]
        for j in blade:
            plus = ExteriorElement.one_form(dim, list(p10[:, j]))
            minus = ExteriorElement.one_form(dim, list(p01[:, j]))
            new_parts = []
            new_types = []
            for part, (p, q) in zip(parts, types):
                wp = part.wedge(plus)
                if not wp.is_zero():
                    new_parts.append(wp)
                    new_types.append((p + 1, q))
                wm = part.wedge(minus)
                if not wm.is_zero():
                    new_parts.append(wm)
                    new_types.append((p, q + 1))
            parts, types = new_parts, new_types
        for part, t in zip(parts, types):
            out[t] = out.get(t, ExteriorElement(dim)) + part
    return {t: v for t, v in out.items() if not v.is_zero()}


def project_type(i_endo, alpha, p, q, ring):
    return decompose_by_type(i_endo, alpha, ring).get(
        (p, q), ExteriorElement(i_endo.shape[0]))


def dc_form(site, i_endo, alpha):
    """d^c = i (dbar - del) via slotwise type projection.

    The wedge-slot convention: blades split as products of (1,0) and (0,1)
    covectors; del of a (p,q) part is the (p+1, q) component of d.
    """
    ring = site.ring
    iu = ring.i()
    out = ExteriorElement(site.dim)
    for (p, q), part in decompose_by_type(i_endo, alpha, ring).items():
        d_part = site.d(part)
        dbar = project_type(i_endo, d_part, p, q + 1, ring)
        dele = project_type(i_endo, d_part, p + 1, q, ring)
        out = out + iu * (dbar - dele)
    return out


def dc_scalar(site, i_endo, u):
    """d^c u = I du as a covector list: -I^T du."""
    du = [site.deriv(u, j) for j in range(site.dim)]
    return endo_one_form(i_endo, du)


def torsion_three_form(site, bh):
    """H = -d^c_I omega_I, the common torsion of the pair (before any db)."""
    om = bil_to_form(bh.omega("I"), site.dim)
    return -1 * dc_form(site, bh.I, om)


def torsion_check(site, bh, tol=0.0):
    """Residual of -d^c_I omega_I = d^c_J omega_J and closedness data."""
    ring = site.ring
    hi = torsion_three_form(site, bh)
    om_j = bil_to_form(bh.omega("J"), site.dim)
    hj = dc_form(site, bh.J, om_j)
    diff = hi - hj
    worst = 0.0
    for c in diff.terms.values():
        worst = max(worst, ring.norm_inf(c))
    return hi, worst


# -- nijenhuis ------------------------------------------------------------------


def nijenhuis_residual(site, i_endo):
    """N(e_a, e_b) columns; zero iff the almost complex structure integrates."""
    m = site.dim
    ring = site.ring
    worst = 0.0
    for a in range(m):
        for b in range(a + 1, m):
            ea = [ring.zero()] * m
            ea[a] = ring.one()
            eb = [ring.zero()] * m
            eb[b] = ring.one()
            iea = list(i_endo[:, a])
            ieb = list(i_endo[:, b])
            t1 = site.bracket_vv(iea, ieb)
            t2 = site.bracket_vv(iea, eb)
            t3 = site.bracket_vv(ea, ieb)
            t4 = site.bracket_vv(ea, eb)
            it2 = list(i_endo @ np.array(t2, dtype=object))
            it3 = list(i_endo @ np.array(t3, dtype=object))
            iit4 = list(i_endo @ (i_endo @ np.array(t4, dtype=object)))
            for r in range(m):
                res = t1[r] - it2[r] - it3[r] + iit4[r]
                worst = max(worst, ring.norm_inf(res))
    return worst


# -- exact random generators ---------------------------------------------------------


def quaternion_matrices():
    qi = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]
    qj = [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]]
    mi = omat([[CRat(x) for x in row] for row in qi])
    mj = omat([[CRat(x) for x in row] for row in qj])
    return mi, mj


def _crat_matrix(m, fill):
    out = np.empty((m, m), dtype=object)
    for r in range(m):
        for c in range(m):
            out[r, c] = fill(r, c)
    return out


def random_unimodular(rng, m, lo=-2, hi=2):
    """L U with unit diagonals: exactly invertible, small entries."""
    def low_fill(r, c):
        if r == c:
            return CRat(1)
        if r > c:
            return CRat(Fraction(rng.randint(lo, hi), rng.randint(1, 2)))
        return CRat(0)

    low = _crat_matrix(m, low_fill)

    def up_fill(r, c):
        if r == c:
            return CRat(1)
        if r < c:
            return CRat(Fraction(rng.randint(lo, hi), rng.randint(1, 2)))
        return CRat(0)

    up = _crat_matrix(m, up_fill)
    return low @ up


def random_bihermitian(site, rng, with_b=True):
    """Exact quaternionic family: I = S i S^{-1}, J = S (c i + s j) S^{-1}.

    The circle point (c, s) is rational via the tangent half-angle map, so
    I J + J I = -2c exactly and the pair is never split (s is never 0).
    """
    from .linalg import inv_exact

    mi, mj = quaternion_matrices()
    t = Fraction(rng.randint(1, 7), rng.randint(1, 7)) * rng.choice([1, -1])
    c = Fraction(1 - t * t, 1 + t * t)
    s = Fraction(2 * t, 1 + t * t)
    j0 = mat_map(mi, lambda x: x * c) + mat_map(mj, lambda x: x * s)
    sgl = random_unimodular(rng, 4)
    sinv = inv_exact(sgl)
    i_endo = sgl @ mi @ sinv
    j_endo = sgl @ j0 @ sinv
    g = sinv.T @ sinv

    def b_fill(r, cc):
        return CRat(0)

    b = _crat_matrix(4, b_fill)
    if with_b:
        for r in range(4):
            for cc in range(r + 1, 4):
                v = CRat(Fraction(rng.randint(-2, 2), rng.randint(1, 3)))
                b[r, cc] = v
                b[cc, r] = -v
    lift = lambda mmat: mat_map(mmat, site.ring.lift)
    return BihermitianData(site, lift(g), lift(i_endo), lift(j_endo), lift(b))
