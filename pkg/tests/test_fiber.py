"""Pointwise generalized Kahler algebra: correspondence, blocks, identities.

The contraction-order and block conventions are pinned by frozen hand
values here; every later module inherits them.
"""

import random
from fractions import Fraction

import numpy as np
import pytest

from ggk.exterior import ExteriorElement
from ggk.fiber import (
    BihermitianData,
    GKPair,
    bfield_conjugate,
    bil_to_form,
    blocks,
    contract_bivector,
    dc_form,
    dc_scalar,
    decompose_by_type,
    flat,
    form_to_bil,
    gcs_from_complex,
    gcs_from_symplectic,
    generalized_metric,
    gualtieri_inverse,
    gualtieri_pair,
    hitchin_poisson,
    neutral_matrix,
    nijenhuis_residual,
    omega_bil,
    pi_from_two_form,
    pointwise_identities,
    poisson_map,
    quaternion_matrices,
    random_bihermitian,
    sigma_poisson,
    torsion_check,
    tr_pi,
)
from ggk.linalg import det_exact, inv_exact, is_zero_matrix, mat_map, oeye, ozeros
from ggk.rational import CRat
from ggk.sites import FourierTorusSite, LieInvariantSite

SU2 = {(0, 1): {2: 1}, (0, 2): {1: -1}, (1, 2): {0: 1}}


def point4():
    return LieInvariantSite("point4", 4, {})


def su2su2():
    structure = {}
    for (i, j), row in SU2.items():
        structure[(i, j)] = dict(row)
        structure[(i + 3, j + 3)] = {k + 3: v for k, v in row.items()}
    return LieInvariantSite("su2su2", 6, structure)


def crat_mat(rows):
    out = np.empty((len(rows), len(rows[0])), dtype=object)
    for r, row in enumerate(rows):
        for c, x in enumerate(row):
            out[r, c] = CRat(x)
    return out


def samelson_j():
    # a1->b1, a2->a3, a3->-a2, b1->-a1, b2->b3, b3->-b2
    out = crat_mat([[0] * 6 for _ in range(6)])
    images = {0: (3, 1), 1: (2, 1), 2: (1, -1), 3: (0, -1), 4: (5, 1), 5: (4, -1)}
    for c, (r, s) in images.items():
        out[r, c] = CRat(s)
    return out


def test_contract_bivector_frozen():
    # i_{e1^e2} vol4 = i_{e1} i_{e2} vol4 = -e3^e4: composition order is
    # the pinned convention.
    site = point4()
    pi = crat_mat([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]])
    vol = ExteriorElement.volume(4, CRat(1))
    got = contract_bivector(pi, vol, site.ring)
    assert got.terms == {(2, 3): CRat(-1)}


def test_gualtieri_kahler_frozen():
    site = point4()
    mi, _ = quaternion_matrices()
    g = oeye(4, site.ring)
    bh = BihermitianData(site, g, mi, mi)
    bh.validate()
    jj1, jj2 = gualtieri_pair(bh)
    a, b, c, d = blocks(jj1)
    assert is_zero_matrix(a - mi, site.ring)
    assert is_zero_matrix(b, site.ring)
    assert is_zero_matrix(c, site.ring)
    assert is_zero_matrix(d + mi.T, site.ring)
    a, b, c, d = blocks(jj2)
    assert is_zero_matrix(a, site.ring)
    assert is_zero_matrix(b - mi, site.ring)
    assert is_zero_matrix(c - mi, site.ring)
    assert is_zero_matrix(d, site.ring)
    # and the symplectic constructor reproduces the second structure
    om = omega_bil(g, mi)
    assert is_zero_matrix(jj2 - gcs_from_symplectic(om, site.ring), site.ring)
    assert is_zero_matrix(jj1 - gcs_from_complex(mi, site.ring), site.ring)


def test_gualtieri_random_identities():
    site = point4()
    rng = random.Random(101)
    n = neutral_matrix(site.ring, 4)
    eye8 = oeye(8, site.ring)
    for _ in range(6):
        bh = random_bihermitian(site, rng)
        bh.validate()
        jj1, jj2 = gualtieri_pair(bh)
        for jj in (jj1, jj2):
            assert is_zero_matrix(jj @ jj + eye8, site.ring)
            assert is_zero_matrix(jj.T @ n @ jj - n, site.ring)
        assert is_zero_matrix(jj1 @ jj2 - jj2 @ jj1, site.ring)
        gg = generalized_metric(jj1, jj2)
        assert is_zero_matrix(gg @ gg - eye8, site.ring)
        assert is_zero_matrix((n @ gg).T - n @ gg, site.ring)
        # positivity via leading principal minors of g
        for k in range(1, 5):
            minor = det_exact(bh.g[:k, :k])
            assert minor.im == 0 and minor.re > 0
        back = gualtieri_inverse(site, jj1, jj2)
        assert is_zero_matrix(back.g - bh.g, site.ring)
        assert is_zero_matrix(back.I - bh.I, site.ring)
        assert is_zero_matrix(back.J - bh.J, site.ring)
        assert is_zero_matrix(back.b - bh.b, site.ring)


def test_poisson_blocks_and_relations():
    site = point4()
    rng = random.Random(103)
    for _ in range(6):
        bh = random_bihermitian(site, rng)
        jj1, jj2 = gualtieri_pair(bh)
        sig = sigma_poisson(bh)
        assert is_zero_matrix(poisson_map(jj2) - sig, site.ring)
        # skewness of the bivector matrices
        assert is_zero_matrix(sig + sig.T, site.ring)
        ph = hitchin_poisson(bh)
        assert is_zero_matrix(ph + ph.T, site.ring)
        # J pi = -pi I^T and pi_H = pi (I^T - J^T)
        assert is_zero_matrix(bh.J @ sig + sig @ bh.I.T, site.ring)
        assert is_zero_matrix(ph - sig @ (bh.I.T - bh.J.T), site.ring)
        # b does not move the Poisson block
        assert is_zero_matrix(poisson_map(jj1) - poisson_map(
            bfield_conjugate(jj1, bh.b, site.ring)), site.ring)


def test_symplectic_type_inverse_two_form():
    # F = -2 g (I+J)^{-1} as an operator equation: flat F = -2 G (I+J)^{-1},
    # and the inverse bivector -(flat F)^{-1} must be the Poisson block.
    site = point4()
    rng = random.Random(107)
    for _ in range(4):
        bh = random_bihermitian(site, rng, with_b=False)
        s = bh.I + bh.J
        sinv = inv_exact(s)
        flat_f = mat_map(bh.g @ sinv, lambda x: CRat(-2) * x)
        f_bil = flat_f.T.copy()
        pi = pi_from_two_form(f_bil, site.ring)
        assert is_zero_matrix(pi - sigma_poisson(bh), site.ring)


def test_one_form_identity():
    # (J1 + J2) (I du) = J1 J2 du - du with I du = -I^T du, b = 0
    site = point4()
    rng = random.Random(109)
    for _ in range(4):
        bh = random_bihermitian(site, rng, with_b=False)
        jj1, jj2 = gualtieri_pair(bh)
        du = np.array([CRat(rng.randint(-3, 3)) for _ in range(4)], dtype=object)
        idu = np.array(dc_scalar_point(bh.I, du), dtype=object)
        z = np.array([CRat(0)] * 4, dtype=object)
        lhs = (jj1 + jj2) @ np.concatenate([z, idu])
        rhs = jj1 @ (jj2 @ np.concatenate([z, du])) - np.concatenate([z, du])
        assert all(not (lhs[k] - rhs[k]) for k in range(8))


def dc_scalar_point(i_endo, du):
    return list(-(i_endo.T @ du))


def test_type_projectors_resolve_identity():
    site = point4()
    mi, mj = quaternion_matrices()
    rng = random.Random(113)
    for i_endo in (mi, mj):
        alpha = ExteriorElement(4, {
            (0, 1): CRat(Fraction(1, 2)), (2,): CRat(3), (1, 2, 3): CRat(-1)})
        parts = decompose_by_type(i_endo, alpha, site.ring)
        total = ExteriorElement(4)
        for (p, q), part in parts.items():
            total = total + part
        assert (total - alpha).is_zero()
        # degree respected
        for (p, q), part in parts.items():
            assert part.degrees() == [p + q]


def test_dc_function_matches_covector_action():
    site = FourierTorusSite(4, exact=True, cap=4)
    mi, _ = quaternion_matrices()
    i_endo = mat_map(mi, site.ring.lift)
    R = site.ring
    u = R.cos((1, 0, 0, 0)) + R.sin((0, 1, 0, 0), Fraction(1, 2))
    lhs = dc_form(site, i_endo, ExteriorElement.scalar(4, u))
    rhs = ExteriorElement.one_form(4, dc_scalar(site, i_endo, u))
    assert (lhs - rhs).is_zero()
    # dd^c u is (1,1)
    ddc = site.d(lhs)
    parts = decompose_by_type(i_endo, ddc, site.ring)
    assert set(parts) <= {(1, 1)}


def test_kahler_flat_torsion_vanishes():
    site = FourierTorusSite(4, exact=True, cap=4)
    mi, _ = quaternion_matrices()
    g = oeye(4, site.ring)
    bh = BihermitianData(site, g, mat_map(mi, site.ring.lift),
                         mat_map(mi, site.ring.lift))
    h, mismatch = torsion_check(site, bh)
    assert h.is_zero()
    assert mismatch == 0.0


def test_samelson_integrable_and_torsion_frozen():
    site = su2su2()
    jmat = samelson_j()
    assert nijenhuis_residual(site, jmat) == 0.0
    g = oeye(6, site.ring)
    om = bil_to_form(omega_bil(g, jmat), 6)
    # omega = a1^b1 + a2^a3 + b2^b3 (frozen in the sites tests) and
    # d^c_J omega = vol_A + vol_B: the invariant structure is SKT with
    # torsion +Cartan.
    dc = dc_form(site, jmat, om)
    expect = ExteriorElement(6, {(0, 1, 2): CRat(1), (3, 4, 5): CRat(1)})
    assert (dc - expect).is_zero()


def test_naive_pairing_not_integrable():
    site = su2su2()
    out = crat_mat([[0] * 6 for _ in range(6)])
    for k in range(3):
        out[k + 3, k] = CRat(1)
        out[k, k + 3] = CRat(-1)
    assert nijenhuis_residual(site, out) > 0


def test_schur_contraction_identity():
    # a ^ b ^ i_pi i_pi vol = (-tr(pi a pi b) + 2 tr_pi(a) tr_pi(b)) vol
    site = point4()
    rng = random.Random(127)
    vol = ExteriorElement.volume(4, CRat(1))
    for _ in range(10):
        pi = ozeros((4, 4), site.ring)
        for r in range(4):
            for c in range(r + 1, 4):
                v = CRat(Fraction(rng.randint(-3, 3), rng.randint(1, 2)))
                pi[r, c] = v
                pi[c, r] = -v

        def rand2():
            t = {}
            for r in range(4):
                for c in range(r + 1, 4):
                    t[(r, c)] = CRat(rng.randint(-2, 2))
            return ExteriorElement(4, t)

        al, be = rand2(), rand2()
        lhs = al.wedge(be).wedge(
            contract_bivector(pi, contract_bivector(pi, vol, site.ring), site.ring))
        pa = pi @ flat(form_to_bil(al, site.ring, 4))
        pb = pi @ flat(form_to_bil(be, site.ring, 4))
        tr_papb = sum((pa @ pb)[k, k] for k in range(4))
        scal = (-tr_papb
                + 2 * tr_pi(pi, form_to_bil(al, site.ring, 4))
                * tr_pi(pi, form_to_bil(be, site.ring, 4)))
        rhs = ExteriorElement.volume(4, scal)
        assert (lhs - rhs).is_zero()


def test_pointwise_sigma_pi_identities_random():
    # all three symmetries hold exactly across the rational quaternionic family
    site = point4()
    ring = site.ring
    rng = random.Random(401)
    for _ in range(8):
        bh = random_bihermitian(site, rng)

        def rand_cov():
            return np.array(
                [ring.lift(CRat(Fraction(rng.randint(-3, 3), rng.randint(1, 2))))
                 for _ in range(4)], dtype=object)

        res = pointwise_identities(bh, rand_cov(), rand_cov())
        for name, val in res.items():
            assert ring.norm_inf(val) == 0.0, name


def test_gk_pair_from_bihermitian_exact():
    site = point4()
    rng = random.Random(402)
    for _ in range(4):
        bh = random_bihermitian(site, rng)
        gk = GKPair.from_bihermitian(site, bh)
        gk.validate(tol=0.0)
        # constant data has no torsion and an exact b-field shift only
        assert all(site.ring.norm_inf(c) == 0.0 for c in gk.h0.terms.values())


def test_gk_pair_validate_rejects_bad_twist():
    site = FourierTorusSite(4, exact=False, cap=8)
    ring = site.ring
    eye = mat_map(oeye(4, site.ring), lambda c: c)
    qi, _ = quaternion_matrices()
    ilift = mat_map(qi, ring.lift)
    bh = BihermitianData(site, oeye(4, ring), ilift, ilift)
    gk = GKPair.from_bihermitian(site, bh)
    gk.validate(tol=1e-12)
    # x0 dx1 ^ dx2 ^ dx3 is not closed
    bad = ExteriorElement(4, {(1, 2, 3): ring.sin((1, 0, 0, 0))})
    broken = GKPair(site, gk.jj1, gk.jj2, bad)
    with pytest.raises(ValueError, match="twist closed"):
        broken.validate(tol=1e-12)
