"""Dense matrices and univariate polynomials over a ring context.

Matrices are lists of rows. Univariate polynomials are coefficient lists,
lowest degree first.
"""
from __future__ import annotations

import random

from .errors import DomainError, SingularMatrixError


def identity(ctx, n):
    return [[ctx.one if i == j else ctx.zero for j in range(n)] for i in range(n)]


def diag(ctx, entries):
    n = len(entries)
    return [[entries[i] if i == j else ctx.zero for j in range(n)] for i in range(n)]


def mat_mul(ctx, A, B):
    cols = list(zip(*B))
    out = []
    for row in A:
        new = []
        for col in cols:
            acc = ctx.zero
            for a, b in zip(row, col):
                if not ctx.is_zero(a) and not ctx.is_zero(b):
                    acc = ctx.add(acc, ctx.mul(a, b))
            new.append(acc)
        out.append(new)
    return out


def mat_vec(ctx, A, v):
    out = []
    for row in A:
        acc = ctx.zero
        for a, x in zip(row, v):
            if not ctx.is_zero(a) and not ctx.is_zero(x):
                acc = ctx.add(acc, ctx.mul(a, x))
        out.append(acc)
    return out


def mat_add(ctx, A, B):
    return [[ctx.add(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(ctx, c, A):
    return [[ctx.mul(c, a) for a in row] for row in A]


def mat_sub_scalar(ctx, A, lam):
    """``A - lam * I``."""
    return [[ctx.sub(a, lam) if i == j else a for j, a in enumerate(row)] for i, row in enumerate(A)]


def conjugate(ctx, P, A, P_inv):
    """``P @ A @ P_inv``."""
    return mat_mul(ctx, mat_mul(ctx, P, A), P_inv)


def is_diagonal(ctx, A) -> bool:
    return all(ctx.is_zero(a) for i, row in enumerate(A) for j, a in enumerate(row) if i != j)


def diagonal_entries(A):
    return [A[i][i] for i in range(len(A))]


def commute(ctx, A, B) -> bool:
    return mat_mul(ctx, A, B) == mat_mul(ctx, B, A)


def _berkowitz_vector(ctx, M):
    # coefficients of det(xI - M), highest degree first
    n = len(M)
    if n == 0:
        return [ctx.one]
    if n == 1:
        return [ctx.one, ctx.neg(M[0][0])]
    a = M[0][0]
    R = M[0][1:]
    C = [row[0] for row in M[1:]]
    A = [row[1:] for row in M[1:]]
    diags = [ctx.one, ctx.neg(a)]
    vec = C
    for _ in range(n - 1):
        acc = ctx.zero
        for r, c in zip(R, vec):
            acc = ctx.add(acc, ctx.mul(r, c))
        diags.append(ctx.neg(acc))
        vec = mat_vec(ctx, A, vec)
    sub = _berkowitz_vector(ctx, A)
    out = []
    for i in range(n + 1):
        acc = ctx.zero
        for j in range(min(i + 1, n)):
            acc = ctx.add(acc, ctx.mul(diags[i - j], sub[j]))
        out.append(acc)
    return out


def char_poly(ctx, M):
    """``det(xI - M)`` as coefficients, constant term first.

    Berkowitz's algorithm: no divisions, so it is exact over every
    commutative ring, including residue rings with zero divisors and fields
    of small characteristic.
    """
    if any(len(row) != len(M) for row in M):
        raise DomainError("char_poly needs a square matrix")
    return _berkowitz_vector(ctx, M)[::-1]


def det(ctx, M):
    cp = char_poly(ctx, M)
    return cp[0] if len(M) % 2 == 0 else ctx.neg(cp[0])


def rref(ctx, M):
    """Reduced row echelon form over a field; returns ``(R, pivot_columns)``."""
    A = [list(row) for row in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if not ctx.is_zero(A[i][c])), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = ctx.inv(A[r][c])
        A[r] = [ctx.mul(inv, x) for x in A[r]]
        for i in range(rows):
            if i != r and not ctx.is_zero(A[i][c]):
                f = A[i][c]
                A[i] = [ctx.sub(x, ctx.mul(f, y)) for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return A, pivots


def nullspace(ctx, M, ncols=None):
    """Basis of ``{x : M x = 0}`` over a field, one vector per free column."""
    if not M:
        n = ncols or 0
        return [[ctx.one if i == j else ctx.zero for i in range(n)] for j in range(n)]
    R, pivots = rref(ctx, M)
    n = len(M[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [ctx.zero] * n
        v[f] = ctx.one
        for row, pc in zip(R, pivots):
            v[pc] = ctx.neg(row[f])
        basis.append(v)
    return basis


def mat_inv(ctx, M):
    """Exact inverse; raises ``SingularMatrixError`` unless det(M) is a unit.

    Gauss-Jordan over fields; over other rings the Cayley-Hamilton identity
    ``M^-1 = -(M^(n-1) + c_(n-1) M^(n-2) + ... + c_1 I) / c_0`` is used, which
    needs no division except by the unit ``c_0``.
    """
    n = len(M)
    if ctx.is_field:
        aug = [list(row) + [ctx.one if i == j else ctx.zero for j in range(n)]
               for i, row in enumerate(M)]
        R, pivots = rref(ctx, aug)
        if pivots[:n] != list(range(n)):
            raise SingularMatrixError("matrix is singular")
        return [row[n:] for row in R]
    cp = char_poly(ctx, M)
    c0 = cp[0]
    if not ctx.is_unit(c0):
        raise SingularMatrixError("determinant is not a unit")
    acc = identity(ctx, n)
    for k in range(n - 1, 0, -1):
        # Horner: acc <- acc @ M + c_k I, starting from the leading coefficient
        acc = mat_mul(ctx, acc, M)
        acc = [[ctx.add(a, cp[k]) if i == j else a for j, a in enumerate(row)]
               for i, row in enumerate(acc)]
    return mat_scale(ctx, ctx.neg(ctx.inv(c0)), acc)


def random_unimodular(ctx, n, rng: random.Random, steps=None, bound=2):
    """Product of ``steps`` (default ``3n``) elementary matrices with small entries.

    Determinant is 1 by construction, so the inverse is exact over every ring.
    """
    steps = 3 * n if steps is None else steps
    P = identity(ctx, n)
    if n < 2:
        return P
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        c = rng.choice([k for k in range(-bound, bound + 1) if k])
        # row_i += c * row_j
        P[i] = [ctx.add(a, ctx.mul(ctx.from_int(c), b)) for a, b in zip(P[i], P[j])]
    return P


# -- univariate polynomials ---------------------------------------------------

def upoly_trim(ctx, f):
    f = list(f)
    while f and ctx.is_zero(f[-1]):
        f.pop()
    return f


def upoly_eval(ctx, f, x):
    acc = ctx.zero
    for c in reversed(f):
        acc = ctx.add(ctx.mul(acc, x), c)
    return acc


def upoly_divmod(ctx, f, g):
    """Division with remainder over a field."""
    f = upoly_trim(ctx, f)
    g = upoly_trim(ctx, g)
    if not g:
        raise DomainError("polynomial division by zero")
    inv_lead = ctx.inv(g[-1])
    q = [ctx.zero] * max(len(f) - len(g) + 1, 0)
    while len(f) >= len(g):
        k = len(f) - len(g)
        c = ctx.mul(f[-1], inv_lead)
        q[k] = c
        for i, y in enumerate(g):
            f[i + k] = ctx.sub(f[i + k], ctx.mul(c, y))
        f = upoly_trim(ctx, f)
    return q, f


def upoly_monic(ctx, f):
    f = upoly_trim(ctx, f)
    inv = ctx.inv(f[-1])
    return [ctx.mul(inv, c) for c in f]


def upoly_gcd(ctx, f, g):
    f, g = upoly_trim(ctx, f), upoly_trim(ctx, g)
    while g:
        f, g = g, upoly_divmod(ctx, f, g)[1]
    return upoly_monic(ctx, f) if f else f


def upoly_deriv(ctx, f):
    return [ctx.mul(ctx.from_int(i), c) for i, c in enumerate(f)][1:]


def upoly_from_roots(ctx, roots):
    f = [ctx.one]
    for r in roots:
        nr = ctx.neg(r)
        g = [ctx.zero] * (len(f) + 1)
        for i, c in enumerate(f):
            g[i + 1] = ctx.add(g[i + 1], c)
            g[i] = ctx.add(g[i], ctx.mul(nr, c))
        f = g
    return f
