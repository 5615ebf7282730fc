"""Linear algebra over scalar rings, on numpy object arrays.

Matrices of ring elements (constants or fields) are kept in object dtype so
that + and * dispatch to the ring.  Exact inversion is Gauss-Jordan with
true division; field-valued inversion is a Newton iteration seeded with the
inverse of the constant term, residual-checked before returning.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .rational import CRat


def omat(rows):
    out = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            out[i, j] = x
    return out


def ovec(entries):
    out = np.empty(len(entries), dtype=object)
    for i, x in enumerate(entries):
        out[i] = x
    return out


def ozeros(shape, ring):
    out = np.empty(shape, dtype=object)
    out[...] = ring.zero()
    return out.copy()


def oeye(n, ring):
    out = ozeros((n, n), ring)
    for i in range(n):
        out[i, i] = ring.one()
    return out


def lift_matrix(m, ring):
    """Constants matrix (int/Fraction/CRat/complex entries) into the ring."""
    out = np.empty(m.shape, dtype=object)
    for idx in np.ndindex(m.shape):
        out[idx] = ring.lift(m[idx])
    return out


def mat_map(m, fn):
    out = np.empty(m.shape, dtype=object)
    for idx in np.ndindex(m.shape):
        out[idx] = fn(m[idx])
    return out


def conj_matrix(m, ring):
    return mat_map(m, ring.conj)


def residual_norm(m, ring):
    """Largest entrywise magnitude bound; exact zero gives 0.0."""
    worst = 0.0
    for idx in np.ndindex(m.shape):
        worst = max(worst, ring.norm_inf(m[idx]))
    return worst


def is_zero_matrix(m, ring, tol=0.0):
    return all(ring.is_zero(m[idx], tol) for idx in np.ndindex(m.shape))


def solve_exact(a, b):
    """Gauss-Jordan solve over a field (Fraction or CRat entries).

    ``b`` may be a vector or a matrix.  Raises on singular input.
    """
    n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError("square systems only")
    bmat = b.reshape(n, -1).copy()
    aug = np.concatenate([a.copy(), bmat], axis=1)
    ncols = aug.shape[1]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if aug[r, col]:
                piv = r
                break
        if piv is None:
            raise ValueError("singular matrix in exact solve")
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        inv = 1 / aug[col, col] if not isinstance(aug[col, col], CRat) \
            else CRat(1) / aug[col, col]
        for c in range(col, ncols):
            aug[col, c] = aug[col, c] * inv
        for r in range(n):
            if r == col or not aug[r, col]:
                continue
            f = aug[r, col]
            for c in range(col, ncols):
                aug[r, c] = aug[r, c] - f * aug[col, c]
    out = aug[:, n:]
    return out.reshape(b.shape)


def inv_exact(a):
    n = a.shape[0]
    eye = np.empty((n, n), dtype=object)
    one = CRat(1) if isinstance(a[0, 0], CRat) else Fraction(1)
    zero = CRat(0) if isinstance(a[0, 0], CRat) else Fraction(0)
    for i in range(n):
        for j in range(n):
            eye[i, j] = one if i == j else zero
    return solve_exact(a, eye)


def det_exact(a):
    """Determinant by fraction-free-ish Gaussian elimination with division."""
    n = a.shape[0]
    m = a.copy()
    det = CRat(1) if isinstance(a[0, 0], CRat) else Fraction(1)
    sign = 1
    for col in range(n):
        piv = None
        for r in range(col, n):
            if m[r, col]:
                piv = r
                break
        if piv is None:
            return det * 0
        if piv != col:
            m[[col, piv]] = m[[piv, col]]
            sign = -sign
        p = m[col, col]
        det = det * p
        for r in range(col + 1, n):
            if not m[r, col]:
                continue
            f = m[r, col] / p
            for c in range(col, n):
                m[r, c] = m[r, c] - f * m[col, c]
    return det if sign > 0 else -det


def det_ring(a, ring):
    """Division-free determinant (Leibniz sum) for ring-valued matrices.

    Field entries have no division in general, so for the small matrices
    that show up here (n <= 6) the permutation sum is the honest route.
    """
    import itertools

    n = a.shape[0]
    total = ring.zero()
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = [False] * n
        for i in range(n):
            if seen[i]:
                continue
            j = i
            length = 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
        term = ring.one()
        for i in range(n):
            term = term * a[i, perm[i]]
        total = total + term if sign > 0 else total - term
    return total


def constant_part(m, ring):
    """Matrix of constant terms as a complex or CRat numpy object matrix."""
    out = np.empty(m.shape, dtype=object)
    for idx in np.ndindex(m.shape):
        out[idx] = ring.mean(m[idx])
    return out


def all_constant(m, ring):
    return all(ring.is_constant(m[idx]) for idx in np.ndindex(m.shape))


def mat_inv(m, ring, tol=1e-12, max_iter=60):
    """Ring-aware matrix inverse.

    Constant matrices invert exactly (CRat) or via complex Gauss-Jordan;
    genuinely field-valued matrices use Newton iteration X <- X(2I - MX)
    seeded at the inverse of the constant part, with a residual check.
    Exact rings refuse nonconstant input rather than approximate.
    """
    n = m.shape[0]
    if all_constant(m, ring):
        c = constant_part(m, ring)
        if ring.exact:
            inv_c = inv_exact(mat_map(c, CRat.coerce))
        else:
            num = np.array([[complex(c[i, j]) for j in range(n)] for i in range(n)])
            inv_c = np.linalg.inv(num)
        return lift_matrix(inv_c, ring)
    if ring.exact:
        raise ValueError("exact inverse of a nonconstant matrix field")
    c = constant_part(m, ring)
    num = np.array([[complex(c[i, j]) for j in range(n)] for i in range(n)])
    x = lift_matrix(np.linalg.inv(num), ring)
    eye2 = lift_matrix(2 * np.eye(n), ring)
    ident = oeye(n, ring)
    for _ in range(max_iter):
        res = m @ x - ident
        if residual_norm(res, ring) <= tol:
            return x
        x = x @ (eye2 - m @ x)
    raise ArithmeticError(
        f"matrix inverse stalled, residual {residual_norm(m @ x - ident, ring):.2e}")


def nullspace_exact(a):
    """Basis of the right kernel over CRat, by reduced row echelon form."""
    m = mat_map(a, CRat.coerce)
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        piv = None
        for rr in range(r, rows):
            if m[rr, c]:
                piv = rr
                break
        if piv is None:
            continue
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        inv = CRat(1) / m[r, c]
        for cc in range(cols):
            m[r, cc] = m[r, cc] * inv
        for rr in range(rows):
            if rr != r and m[rr, c]:
                f = m[rr, c]
                for cc in range(cols):
                    m[rr, cc] = m[rr, cc] - f * m[r, cc]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [CRat(0)] * cols
        v[fc] = CRat(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i, fc]
        basis.append(ovec(v))
    return basis


def transpose(m):
    return m.T.copy()
