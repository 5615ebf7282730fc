"""Backend sites: frame differentials, brackets, Lie derivatives.

Frozen values: the dual differential on su(2) and the derivative of the
invariant Hermitian form on su(2) x su(2), both computed by hand first.
"""

import numpy as np
import pytest
from fractions import Fraction

from ggk.exterior import ExteriorElement
from ggk.rational import CRat
from ggk.sites import FourierTorusSite, LieInvariantSite

SU2 = {(0, 1): {2: 1}, (0, 2): {1: -1}, (1, 2): {0: 1}}


def su2_site():
    return LieInvariantSite("su2", 3, SU2)


def su2su2_site():
    structure = {}
    for (i, j), row in SU2.items():
        structure[(i, j)] = dict(row)
        structure[(i + 3, j + 3)] = {k + 3: v for k, v in row.items()}
    return LieInvariantSite("su2su2", 6, structure)


def torus_site(exact=True, nvars=2, cap=8):
    return FourierTorusSite(nvars, exact=exact, cap=cap)


def basis_vector(site, j):
    e = [site.ring.zero()] * site.dim
    e[j] = site.ring.one()
    return e


def test_su2_frame_differential_frozen():
    s = su2_site()
    e1, e2, e3 = (ExteriorElement.blade(3, (j,)) for j in range(3))
    assert (s.d(e1) + e2.wedge(e3)).is_zero()
    assert (s.d(e2) - e1.wedge(e3)).is_zero()
    assert (s.d(e3) + e1.wedge(e2)).is_zero()


def test_su2_d_squared_zero():
    s = su2_site()
    for j in range(3):
        a = ExteriorElement.blade(3, (j,))
        assert s.d(s.d(a)).is_zero()


def test_jacobi_validation_rejects_bad_constants():
    # [[e1,e3],e1] + cyclic = -2 e3 here, so this is not a Lie algebra
    bad = {(0, 1): {2: 1}, (0, 2): {0: 1}, (1, 2): {1: 1}}
    with pytest.raises(ValueError):
        LieInvariantSite("bad", 3, bad)


def test_su2su2_hermitian_form_differential_frozen():
    s = su2su2_site()
    # omega = a1^b1 + a2^a3 + b2^b3, frame indices a=0,1,2 b=3,4,5
    om = ExteriorElement(6, {(0, 3): 1, (1, 2): 1, (4, 5): 1})
    dom = s.d(om)
    expect = ExteriorElement(6, {(1, 2, 3): -1, (0, 4, 5): 1})
    assert (dom - expect).is_zero()
    assert s.d(dom).is_zero()


def test_su2_bracket_and_unimodularity():
    s = su2_site()
    e = [basis_vector(s, j) for j in range(3)]
    assert s.bracket_vv(e[0], e[1]) == [CRat(0), CRat(0), CRat(1)]
    assert s.bracket_vv(e[1], e[0]) == [CRat(0), CRat(0), CRat(-1)]
    for j in range(3):
        assert not s.divergence(e[j])


def test_torus_d_and_leibniz():
    s = torus_site()
    R = s.ring
    f = R.cos((1, 0))
    g = R.sin((0, 1))
    df = s.d_scalar(f)
    # d cos x1 = -sin x1 dx1
    assert (df - ExteriorElement(2, {(0,): -R.sin((1, 0))})).is_zero()
    lhs = s.d_scalar(f * g)
    rhs = df * g + s.d_scalar(g) * f
    assert (lhs - rhs).is_zero()


def test_torus_d_squared_zero():
    s = torus_site()
    R = s.ring
    alpha = (ExteriorElement(2, {(0,): R.cos((1, 1)), (1,): R.sin((2, 0))})
             + ExteriorElement.scalar(2, R.cos((0, 1))))
    assert s.d(s.d(alpha)).is_zero()


def test_torus_cartan_identities():
    s = torus_site()
    R = s.ring
    X = [R.cos((0, 1)), R.sin((1, 0))]
    Y = [R.one(), R.cos((1, 1))]
    alpha = ExteriorElement(2, {(0,): R.sin((0, 1))})
    beta = ExteriorElement(2, {(1,): R.cos((1, 0))})
    # derivation property of L_X over the wedge
    lhs = s.lie_form(X, alpha.wedge(beta))
    rhs = s.lie_form(X, alpha).wedge(beta) + alpha.wedge(s.lie_form(X, beta))
    assert (lhs - rhs).is_zero()
    # [L_X, L_Y] = L_[X,Y]
    lhs = s.lie_form(X, s.lie_form(Y, alpha)) - s.lie_form(Y, s.lie_form(X, alpha))
    rhs = s.lie_form(s.bracket_vv(X, Y), alpha)
    assert (lhs - rhs).is_zero()


def test_torus_divergence():
    s = torus_site()
    R = s.ring
    f = R.cos((1, 1))
    X = [f, R.zero()]
    assert not (s.divergence(X) - f.deriv(0))


def test_lie_matrix_derivation():
    s = torus_site()
    R = s.ring
    X = [R.sin((0, 1)), R.cos((1, 0))]
    f = R.cos((1, 1))
    M = np.empty((2, 2), dtype=object)
    M[0, 0] = f
    M[0, 1] = R.zero()
    M[1, 0] = R.zero()
    M[1, 1] = f
    got = s.lie_matrix(X, M)
    xf = s.lie_scalar(X, f)
    assert not (got[0, 0] - xf)
    assert not (got[1, 1] - xf)
    assert not got[0, 1] and not got[1, 0]


def test_lie_matrix_lie_algebra_action():
    # on the Lie backend L_{e_i} M = [ad_i, M] for constant M
    s = su2_site()
    M = np.empty((3, 3), dtype=object)
    for r in range(3):
        for c in range(3):
            M[r, c] = CRat((r + 1) * (c + 2) % 5)
    e0 = basis_vector(s, 0)
    got = s.lie_matrix(e0, M)
    ad = np.empty((3, 3), dtype=object)
    for c in range(3):
        col = s.bracket_vv(e0, basis_vector(s, c))
        for r in range(3):
            ad[r, c] = col[r]
    expect = ad @ M - M @ ad
    for r in range(3):
        for c in range(3):
            assert not (got[r, c] - expect[r, c])


def test_integrate_is_mean():
    s = torus_site()
    R = s.ring
    f = R.lift(Fraction(5, 7)) + R.cos((1, 0), Fraction(2, 3))
    assert s.integrate(f) == CRat(Fraction(5, 7))
    lie = su2_site()
    assert lie.integrate(CRat(3)) == CRat(3)
