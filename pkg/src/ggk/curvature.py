"""Riemannian and Bismut-weighted curvature over a site frame.

Tensors are numpy object arrays of ring scalars indexed by the site frame:
a (0,k) tensor T stores T[i1,...,ik] = T(e_{i1},...,e_{ik}).  All formulas
are written for a general moving frame (coordinate derivatives plus
structure functions), so the same code covers both backends.

Conventions, pinned by the test suite:

* Laplacian is div grad, so on the torus Delta sin x = -sin x.
* |H|^2 is the full contraction H_{abc} H^{abc} (no 1/3!).
* Codifferential on (0,p) forms: (d* T)_{j...} = -g^{ab} (nabla_a T)_{b j...},
  hence (d* H)_{ab} = -g^{cd} (nabla_c H)_{dab} on 3-forms.
* Lee form of a Hermitian pair (g, K): theta_K = K d* omega_K with the
  one-form action (K xi)(X) = -xi(K X).
"""

from fractions import Fraction

import numpy as np

from .exterior import ExteriorElement
from .fiber import form_to_bil, torsion_three_form
from .linalg import mat_inv, ozeros


def struct_tensor(site):
    """c[k,i,j] with [e_i, e_j] = c[k,i,j] e_k."""
    m = site.dim
    c = ozeros((m, m, m), site.ring)
    for i in range(m):
        for j in range(m):
            for k, coef in site.struct(i, j):
                c[k, i, j] = site.lift(coef)
    return c


def three_form_components(site, h3):
    """Antisymmetric components H[a,b,c] of a 3-form (zero if h3 is None)."""
    m = site.dim
    out = ozeros((m, m, m), site.ring)
    if h3 is None:
        return out
    for blade, coef in h3.degree_part(3).terms.items():
        a, b, c = blade
        out[a, b, c] = coef
        out[b, c, a] = coef
        out[c, a, b] = coef
        out[a, c, b] = -coef
        out[c, b, a] = -coef
        out[b, a, c] = -coef
    return out


def one_form(site, coeffs):
    return ExteriorElement.one_form(site.dim, list(coeffs))


def _max_norm(arr, ring):
    worst = 0.0
    for x in np.asarray(arr, dtype=object).flat:
        worst = max(worst, ring.norm_inf(x))
    return worst


def _scalar(x):
    # object einsum returns a bare scalar for 0-d output on some paths
    return x.item() if isinstance(x, np.ndarray) else x


class ConnectionData:
    """Levi-Civita connection of (site, g); gamma[l,i,j] is the e_l
    coefficient of nabla_{e_i} e_j."""

    def __init__(self, site, g, tol=1e-12):
        self.site = site
        self.g = g
        self.ginv = mat_inv(g, site.ring, tol=tol)
        self.c = struct_tensor(site)
        self.gamma = self._christoffel()
        self._riemann = None
        self._ricci = None
        self._scalar = None

    def _christoffel(self):
        # Koszul in a frame: 2 g(nabla_i e_j, e_k) = e_i g_jk + e_j g_ik
        #   - e_k g_ij + g([e_i,e_j], e_k) - g([e_j,e_k], e_i) + g([e_k,e_i], e_j)
        site, g = self.site, self.g
        m = site.dim
        half = site.lift(Fraction(1, 2))
        gc = ozeros((m, m, m), site.ring)
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    acc = site.zero()
                    for mm in range(m):
                        if self.c[mm, i, j]:
                            acc = acc + self.c[mm, i, j] * g[mm, k]
                    gc[i, j, k] = acc
        gamma = ozeros((m, m, m), site.ring)
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    a = (site.deriv(g[j, k], i) + site.deriv(g[i, k], j)
                         - site.deriv(g[i, j], k)
                         + gc[i, j, k] - gc[j, k, i] + gc[k, i, j])
                    if not a:
                        continue
                    a = half * a
                    for l in range(m):
                        if self.ginv[l, k]:
                            gamma[l, i, j] = gamma[l, i, j] + self.ginv[l, k] * a
        return gamma

    def bismut_christoffel(self, H):
        """Connection with torsion H: gamma + (1/2) g^{lk} H[i,j,k]."""
        m = self.site.dim
        half = self.site.lift(Fraction(1, 2))
        out = self.gamma.copy()
        for i in range(m):
            for j in range(m):
                for k in range(m):
                    if not H[i, j, k]:
                        continue
                    hk = half * H[i, j, k]
                    for l in range(m):
                        if self.ginv[l, k]:
                            out[l, i, j] = out[l, i, j] + self.ginv[l, k] * hk
        return out

    # -- covariant derivatives ---------------------------------------------

    def nabla_tensor(self, t, gamma=None):
        """(0,k) -> (0,k+1); the new first index is the direction."""
        site = self.site
        m = site.dim
        gm = self.gamma if gamma is None else gamma
        t = np.asarray(t, dtype=object)
        out = np.empty((m,) + t.shape, dtype=object)
        for idx in np.ndindex(*t.shape):
            for i in range(m):
                acc = site.deriv(t[idx], i)
                for s, js in enumerate(idx):
                    for mm in range(m):
                        co = gm[mm, i, js]
                        if co:
                            acc = acc - co * t[idx[:s] + (mm,) + idx[s + 1:]]
                out[(i,) + idx] = acc
        return out

    def metric_residual(self, gamma=None):
        return _max_norm(self.nabla_tensor(self.g, gamma=gamma), self.site.ring)

    def torsion_residual(self):
        m = self.site.dim
        t = ozeros((m, m, m), self.site.ring)
        for l in range(m):
            for i in range(m):
                for j in range(m):
                    t[l, i, j] = self.gamma[l, i, j] - self.gamma[l, j, i] - self.c[l, i, j]
        return _max_norm(t, self.site.ring)

    # -- curvature ------------------------------------------------------------

    def riemann(self):
        """R[l,k,i,j] with R(e_i, e_j) e_k = R[l,k,i,j] e_l."""
        if self._riemann is None:
            site = self.site
            m = site.dim
            gm = self.gamma
            r = ozeros((m, m, m, m), site.ring)
            for l in range(m):
                for k in range(m):
                    for i in range(m):
                        for j in range(m):
                            acc = site.deriv(gm[l, j, k], i) - site.deriv(gm[l, i, k], j)
                            for mm in range(m):
                                acc = acc + gm[l, i, mm] * gm[mm, j, k]
                                acc = acc - gm[l, j, mm] * gm[mm, i, k]
                                if self.c[mm, i, j]:
                                    acc = acc - self.c[mm, i, j] * gm[l, mm, k]
                            r[l, k, i, j] = acc
            self._riemann = r
        return self._riemann

    def ricci(self):
        """Ric[j,k] = trace of X -> R(X, e_j) e_k."""
        if self._ricci is None:
            m = self.site.dim
            r = self.riemann()
            ric = ozeros((m, m), self.site.ring)
            for j in range(m):
                for k in range(m):
                    acc = self.site.zero()
                    for i in range(m):
                        acc = acc + r[i, k, i, j]
                    ric[j, k] = acc
            self._ricci = ric
        return self._ricci

    def scalar(self):
        if self._scalar is None:
            ric = self.ricci()
            self._scalar = _scalar(np.einsum("jk,jk->", self.ginv, ric))
        return self._scalar

    # -- scalar operators ---------------------------------------------------------

    def d_scalar(self, f):
        return np.array([self.site.deriv(f, j) for j in range(self.site.dim)],
                        dtype=object)

    def grad(self, f):
        return self.ginv @ self.d_scalar(f)

    def hessian(self, f):
        return self.nabla_tensor(self.d_scalar(f))

    def laplacian(self, f):
        """div grad f; on the torus Delta sin x = -sin x."""
        return _scalar(np.einsum("ij,ij->", self.ginv, self.hessian(f)))

    def grad_norm2(self, f):
        df = self.d_scalar(f)
        return _scalar(np.einsum("ij,i,j->", self.ginv, df, df))

    def pairing(self, xi, eta):
        """<xi, eta>_g on covector components."""
        return _scalar(np.einsum("ij,i,j->", self.ginv,
                                np.asarray(xi, dtype=object),
                                np.asarray(eta, dtype=object)))

    def divergence(self, X):
        """Riemannian divergence sum_i (nabla_i X)^i."""
        site = self.site
        m = site.dim
        acc = site.zero()
        for i in range(m):
            acc = acc + site.deriv(X[i], i)
            for mm in range(m):
                if self.gamma[i, i, mm]:
                    acc = acc + self.gamma[i, i, mm] * X[mm]
        return acc

    def codifferential(self, t):
        """(0,p) antisymmetric -> (0,p-1): -g^{ab} (nabla_a t)_{b ...}."""
        nt = self.nabla_tensor(t)
        m = self.site.dim
        out = ozeros(t.shape[1:], self.site.ring)
        for idx in np.ndindex(*t.shape[1:]):
            acc = self.site.zero()
            for a in range(m):
                for b in range(m):
                    if self.ginv[a, b]:
                        acc = acc + self.ginv[a, b] * nt[(a, b) + idx]
            out[idx] = -acc
        return out

    def killing_residual(self, X):
        """(L_X g)_{ij} = (nabla X^flat)_{ij} + (nabla X^flat)_{ji}."""
        xb = self.g @ np.asarray(X, dtype=object)
        nx = self.nabla_tensor(xb)
        return _max_norm(nx + nx.T, self.site.ring)

    # -- Hermitian helpers ---------------------------------------------------------

    def lee_form(self, K):
        """theta_K = K d* omega_K as covector components."""
        dstar = self.codifferential(K.T @ self.g)
        return -(K.T @ dstar)

    def chern_laplacian(self, K, f):
        """Chern Laplacian of (g, K): Delta f - <df, theta_K>."""
        return self.laplacian(f) - self.pairing(self.d_scalar(f), self.lee_form(K))


def levi_civita(site, g, tol=1e-12):
    return ConnectionData(site, g, tol=tol)


def scalar_curvature(site, g, tol=1e-12):
    return levi_civita(site, g, tol=tol).scalar()


def h_norm2(conn, H):
    """Full contraction H_{abc} H^{abc}."""
    hup = np.einsum("abc,ad,be,cf->def", H, conn.ginv, conn.ginv, conn.ginv)
    return _scalar(np.einsum("abc,abc->", H, hup))


def h_squared(conn, H):
    """H^2[i,j] = H_{iab} H_{jcd} g^{ac} g^{bd}."""
    return np.einsum("iab,jcd,ac,bd->ij", H, H, conn.ginv, conn.ginv)


def norms(site, g, H, f, tol=1e-12):
    """(|H|^2, Delta f, |df|^2) with H a 3-form and f a scalar."""
    conn = levi_civita(site, g, tol=tol)
    hc = three_form_components(site, H)
    if f is None:
        f = site.zero()
    return h_norm2(conn, hc), conn.laplacian(f), conn.grad_norm2(f)


class WeightedCurvature:
    """Weighted Bismut curvature of (g, H, f); ricci is the full (0,2)
    tensor Rc - (1/4) H^2 + hess f - (1/2)(d* H + i_{grad f} H)."""

    def __init__(self, conn, H, f=None):
        site = conn.site
        self.conn = conn
        self.H = H
        self.f = site.zero() if f is None else f
        self.ricci_g = conn.ricci()
        self.h2 = h_squared(conn, H)
        self.hess = conn.hessian(self.f)
        self.dstar_h = conn.codifferential(H)
        gf = conn.grad(self.f)
        self.i_gradf_h = np.einsum("c,cab->ab", gf, H)
        quarter = site.lift(Fraction(1, 4))
        half = site.lift(Fraction(1, 2))
        self.ricci = (self.ricci_g - mat_scale(quarter, self.h2) + self.hess
                      - mat_scale(half, self.dstar_h + self.i_gradf_h))
        self.scalar_g = conn.scalar()
        self.h_norm2 = h_norm2(conn, H)
        self.laplacian_f = conn.laplacian(self.f)
        self.grad_norm2_f = conn.grad_norm2(self.f)
        two = site.lift(2)
        twelfth = site.lift(Fraction(1, 12))
        self.scalar = (self.scalar_g - twelfth * self.h_norm2
                       + two * self.laplacian_f - self.grad_norm2_f)

    def symmetric_part(self):
        return mat_scale(self.conn.site.lift(Fraction(1, 2)),
                         self.ricci + self.ricci.T)

    def trace(self):
        return _scalar(np.einsum("ij,ij->", self.conn.ginv, self.ricci))


def mat_scale(c, m):
    out = m.copy()
    for idx in np.ndindex(*m.shape):
        out[idx] = c * m[idx]
    return out


def weighted_bismut(site, g, H, f=None, tol=1e-12):
    conn = levi_civita(site, g, tol=tol)
    return WeightedCurvature(conn, three_form_components(site, H), f)


def weighted_divergence(conn, H, f, K):
    """(div^{H,f} K)_j = nabla_i K_{ij} + (1/2) H_{ipj} K^{ip} - K_{ij} nabla^i f,
    all contractions raised with g."""
    site = conn.site
    nk = conn.nabla_tensor(K)
    t1 = np.einsum("ab,abj->j", conn.ginv, nk)
    kup = np.einsum("ia,pb,ab->ip", conn.ginv, conn.ginv, K)
    t2 = np.einsum("ipj,ip->j", H, kup)
    gf = conn.grad(site.zero() if f is None else f)
    t3 = np.einsum("aj,a->j", K, gf)
    half = site.lift(Fraction(1, 2))
    return np.array([t1[j] + half * t2[j] - t3[j] for j in range(site.dim)],
                    dtype=object)


def bianchi_residual(site, g, H, f=None, tol=1e-12):
    """Residual one-form of div^{H,f} Rc^{H,f} = (1/2) d R^{H,f}; an identity
    whenever dH = 0."""
    wc = weighted_bismut(site, g, H, f, tol=tol)
    conn = wc.conn
    div = weighted_divergence(conn, wc.H, wc.f, wc.ricci)
    ds = conn.d_scalar(wc.scalar)
    half = site.lift(Fraction(1, 2))
    return one_form(site, [div[j] - half * ds[j] for j in range(site.dim)])


def soliton_residual(site, bh, f=None, tol=1e-12, site_j=None):
    """Steady generalized Ricci soliton residuals of bihermitian data.

    Checks Rc - (1/4) H^2 + hess f = 0 and d* H + i_{grad f} H = 0 with
    H = -d^c_I omega_I, and reports the vector fields
    X_K = (1/2) K (theta_K^sharp - grad f) with their Killing and
    holomorphy residuals and mutual bracket.

    ``site_j`` carries the frame of the second structure when the pair has
    mixed invariance (canonical group examples: J lives in the
    right-invariant frame, modelled by negated structure constants).  In
    that case [X_I, X_J] = 0 structurally: left- and right-invariant fields
    always commute.
    """
    ring = site.ring
    h3 = torsion_three_form(site, bh)
    conn = levi_civita(site, bh.g, tol=tol)
    wc = WeightedCurvature(conn, three_form_components(site, h3), f)
    report = {
        "soliton_symmetric": _max_norm(
            wc.ricci_g - mat_scale(site.lift(Fraction(1, 4)), wc.h2) + wc.hess, ring),
        "soliton_skew": _max_norm(wc.dstar_h + wc.i_gradf_h, ring),
    }
    half = site.lift(Fraction(1, 2))
    fields = {}
    for label, K, s in (("I", bh.I, site), ("J", bh.J, site_j or site)):
        cn = conn if s is site else levi_civita(s, bh.g, tol=tol)
        theta = cn.lee_form(K)
        v = cn.ginv @ theta - cn.grad(wc.f)
        X = np.array([half * x for x in K @ v], dtype=object)
        fields[label] = X
        report[f"killing_{label}"] = cn.killing_residual(X)
        report[f"holomorphy_{label}"] = _max_norm(s.lie_matrix(list(X), K), ring)
    if site_j is None or site_j is site:
        report["commutator"] = _max_norm(
            np.array(site.bracket_vv(list(fields["I"]), list(fields["J"])),
                     dtype=object), ring)
    else:
        report["commutator"] = 0.0
    # Cor. of the Bianchi identity: lambda = R^{H,f} - tr Rc^{H,f}
    lam = wc.scalar - wc.trace()
    report["lambda"] = lam
    report["lambda_constant"] = _max_norm(
        np.array([site.deriv(lam, j) for j in range(site.dim)], dtype=object), ring)
    return report, fields
