"""Sparse multivariate polynomials over a ring context.

A polynomial is a dict mapping exponent tuples to nonzero coefficients.
"""
from __future__ import annotations

import math


def monomials_of_degree(n: int, d: int) -> list[tuple]:
    """All exponent vectors of total degree ``d`` in ``n`` variables, descending lex."""
    out = []

    def rec(prefix, left, k):
        if k == 1:
            out.append(prefix + (left,))
            return
        for e in range(left, -1, -1):
            rec(prefix + (e,), left - e, k - 1)

    if n == 0:
        return [()] if d == 0 else []
    rec((), d, n)
    return out


def count_monomials(n: int, d: int) -> int:
    return math.comb(n + d - 1, d)


def constant(ctx, n, c=None):
    c = ctx.one if c is None else c
    return {} if ctx.is_zero(c) else {(0,) * n: c}


def monomial(ctx, exps, c=None):
    return {tuple(exps): ctx.one if c is None else c}


def add(ctx, f, g):
    out = dict(f)
    for e, c in g.items():
        v = ctx.add(out.get(e, ctx.zero), c)
        if ctx.is_zero(v):
            out.pop(e, None)
        else:
            out[e] = v
    return out


def scale(ctx, c, f):
    out = {}
    for e, a in f.items():
        v = ctx.mul(c, a)
        if not ctx.is_zero(v):
            out[e] = v
    return out


def sub(ctx, f, g):
    return add(ctx, f, scale(ctx, ctx.neg(ctx.one), g))


def mul(ctx, f, g):
    out = {}
    for e1, c1 in f.items():
        for e2, c2 in g.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            v = ctx.add(out.get(e, ctx.zero), ctx.mul(c1, c2))
            if ctx.is_zero(v):
                out.pop(e, None)
            else:
                out[e] = v
    return out


def evaluate(ctx, f, x):
    acc = ctx.zero
    for e, c in f.items():
        term = c
        for xi, k in zip(x, e):
            if k:
                term = ctx.mul(term, ctx.pow(xi, k))
        acc = ctx.add(acc, term)
    return acc


def degree(f) -> int:
    return max((sum(e) for e in f), default=0)


class LinearSubstitution:
    """Caches powers of the linear forms ``(M x)_i`` for repeated ``f(M x)`` calls."""

    def __init__(self, ctx, M):
        self.ctx = ctx
        self.n = n = len(M)
        self.forms = [{tuple(int(j == k) for j in range(n)): M[i][k]
                       for k in range(n) if not ctx.is_zero(M[i][k])} for i in range(n)]
        self._powers = {}

    def form_pow(self, i, k):
        key = (i, k)
        if key not in self._powers:
            prev = constant(self.ctx, self.n) if k == 0 else self.form_pow(i, k - 1)
            self._powers[key] = prev if k == 0 else mul(self.ctx, prev, self.forms[i])
        return self._powers[key]

    def __call__(self, f):
        out = {}
        for e, c in f.items():
            term = constant(self.ctx, self.n, c)
            for i, k in enumerate(e):
                if k:
                    term = mul(self.ctx, term, self.form_pow(i, k))
            out = add(self.ctx, out, term)
        return out


def linear_substitute(ctx, f, M):
    """``f(M x)``: every ``x_i`` becomes the linear form ``sum_k M[i][k] x_k``."""
    return LinearSubstitution(ctx, M)(f)


def to_str(ctx, f, names=None) -> str:
    if not f:
        return "0"
    n = len(next(iter(f)))
    names = names or [f"x{i + 1}" for i in range(n)]
    parts = []
    for e in sorted(f, reverse=True):
        c = f[e]
        mono = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(names, e) if k)
        coef = ctx.fmt(c)
        if not mono:
            parts.append(coef)
        elif c == ctx.one:
            parts.append(mono)
        else:
            parts.append(f"{coef}*{mono}")
    return " + ".join(parts)


def equal_up_to_scalar(ctx, f, g) -> bool:
    """True when ``f = c*g`` for a unit ``c`` (over a field)."""
    if set(f) != set(g):
        return False
    if not f:
        return True
    e0 = next(iter(f))
    c = ctx.div(f[e0], g[e0])
    return all(f[e] == ctx.mul(c, g[e]) for e in f)

