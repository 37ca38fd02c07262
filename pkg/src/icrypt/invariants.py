"""Monomial and polynomial invariants of diagonalizable matrix groups."""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import linalg, poly
from .errors import (DomainError, EvaluationError, NotFoundError, ParameterError,
                     ResourceError, UnsupportedRingError)
from .intlin import (CongruenceSystem, KernelLattice, enumerate_kernel_vectors,
                     smith_normal_form, solve_congruence_kernel)
from .rings import ResidueRing, _is_finite_field, primitive_element

DEFAULT_MONOMIAL_CAP = 20000
DEFAULT_DEGREE_CAP = 12
DEFAULT_UNIT_BUDGET = 10**6


@dataclass(frozen=True)
class DiagGroup:
    """Group generated by diagonal matrices, each stored as its diagonal."""

    ctx: object
    gens: tuple

    def __init__(self, ctx, gens):
        gens = tuple(tuple(g) for g in gens)
        if not gens:
            raise ParameterError("a group needs at least one generator")
        if len({len(g) for g in gens}) != 1:
            raise ParameterError("generators of different dimensions")
        for g in gens:
            for a in g:
                if not ctx.is_unit(a):
                    raise DomainError(f"generator entry {ctx.fmt(a)} is not a unit")
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "gens", gens)

    @property
    def n(self) -> int:
        return len(self.gens[0])

    def matrices(self):
        return [linalg.diag(self.ctx, list(g)) for g in self.gens]

    def element(self, word: Sequence[int]):
        """Diagonal of ``prod g_i^{word_i}``."""
        ctx = self.ctx
        out = [ctx.one] * self.n
        for g, k in zip(self.gens, word):
            out = [ctx.mul(a, ctx.pow(b, k)) for a, b in zip(out, g)]
        return tuple(out)

    def direct_product(self, other: "DiagGroup") -> "DiagGroup":
        """Block-diagonal product acting on the concatenated coordinates."""
        one = self.ctx.one
        gens = [tuple(g) + (one,) * other.n for g in self.gens]
        gens += [(one,) * self.n + tuple(g) for g in other.gens]
        return DiagGroup(self.ctx, gens)


def evaluate_monomial(ctx, d, v):
    """``prod v_j^{d_j}``; negative exponents need unit coordinates."""
    out = ctx.one
    for x, k in zip(v, d):
        if k == 0:
            continue
        if k < 0 and not ctx.is_unit(x):
            raise EvaluationError(f"negative exponent at non-unit coordinate {ctx.fmt(x)}")
        out = ctx.mul(out, ctx.pow(x, k))
    return out


def monomial_is_invariant(G: DiagGroup, d) -> bool:
    if len(d) != G.n:
        raise ParameterError("exponent vector has the wrong length")
    return all(evaluate_monomial(G.ctx, d, g) == G.ctx.one for g in G.gens)


def monomial_lattice_field(G: DiagGroup, primitive=None):
    """Invariant exponents of a diagonal group over a finite field.

    With ``a`` primitive and ``gamma_ij = a^{l_ij}`` the monomial with exponent
    ``d`` is invariant iff ``sum_j l_ij d_j = 0 (mod q-1)`` for every ``i``.
    Returns ``(system, lattice)``.
    """
    from .attacks import dlog_bsgs

    ctx = G.ctx
    if not _is_finite_field(ctx):
        raise UnsupportedRingError(f"{ctx!r} is not a finite field")
    a = primitive_element(ctx) if primitive is None else primitive
    q1 = ctx.q - 1
    rows = [[dlog_bsgs(ctx, a, x) for x in g] for g in G.gens]
    system = CongruenceSystem(rows, [q1] * len(rows))
    return system, solve_congruence_kernel(system, G.n, ambient_moduli=(q1,) * G.n)


# -- unit groups of finite residue rings -----------------------------------

def _unimodular_inverse(V):
    n = len(V)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(V)]
    for c in range(n):
        p = next(i for i in range(c, n) if A[i][c])
        A[c], A[p] = A[p], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for i in range(n):
            if i != c and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return [[int(x) for x in row[n:]] for row in A]


def unit_group(ctx: ResidueRing, budget: int = DEFAULT_UNIT_BUDGET):
    """Independent generators ``[(u_k, o_k), ...]`` of the unit group.

    The unit group is enumerated outright: generators are added greedily, each
    with its relative order over the span of the previous ones, and the
    resulting triangular relation matrix is brought to Smith form, whose
    invariant factors are the cyclic orders.
    """
    if ctx.cardinality > budget:
        raise ResourceError(f"|R| = {ctx.cardinality} exceeds the unit enumeration budget {budget}")
    units = [x for x in ctx.elements() if ctx.is_unit(x)]
    span = {ctx.one: ()}
    gens, relations = [], []
    for x in units:
        if x in span:
            continue
        g = len(gens)
        gens.append(x)
        span = {y: c + (0,) for y, c in span.items()}
        # relative order k: least k > 0 with x^k in the old span
        layer, xk, k = dict(span), x, 1
        while xk not in span:
            for y, c in span.items():
                layer[ctx.mul(y, xk)] = c[:g] + (k,)
            xk, k = ctx.mul(xk, x), k + 1
        rel = [-v for v in span[xk][:g]] + [k]
        relations.append(rel)
        span = layer
    g = len(gens)
    if g == 0:
        return []
    R = [row + [0] * (g - len(row)) for row in relations]
    _, D, V = smith_normal_form(R)
    Vinv = _unimodular_inverse(V)
    basis = []
    for j in range(g):
        order = abs(D[j][j])
        if order == 1:
            continue
        u = ctx.one
        for gi, e in zip(gens, Vinv[j]):
            u = ctx.mul(u, ctx.pow(gi, e))
        basis.append((u, order))
    return basis


def unit_exponents(ctx, basis, x):
    """Exponents of ``x`` over an independent unit basis (meet in the middle)."""
    if not ctx.is_unit(x):
        raise DomainError(f"{ctx.fmt(x)} is not a unit")
    half = len(basis) // 2
    left, right = basis[:half], basis[half:]

    def products(part):
        for exps in itertools.product(*(range(o) for _, o in part)):
            val = ctx.one
            for (u, _), e in zip(part, exps):
                val = ctx.mul(val, ctx.pow(u, e))
            yield exps, val

    table = {}
    for exps, val in products(left):
        table.setdefault(val, exps)
    for exps, val in products(right):
        rest = ctx.mul(x, ctx.inv(val))
        if rest in table:
            return list(table[rest]) + list(exps)
    raise DomainError(f"{ctx.fmt(x)} is not in the span of the unit basis")


def monomial_lattice_units(G: DiagGroup, unit_basis=None, budget: int = DEFAULT_UNIT_BUDGET):
    """Invariant exponents of a diagonal group over a finite residue ring.

    Rows ``sum_j l_ijk d_j = 0 (mod o_k)`` for each generator ``i`` and each
    basis unit ``u_k`` of order ``o_k``. Returns ``(system, lattice)``.
    """
    ctx = G.ctx
    if not isinstance(ctx, ResidueRing):
        raise UnsupportedRingError("monomial_lattice_units needs a residue ring")
    basis = unit_group(ctx, budget) if unit_basis is None else list(unit_basis)
    logs = [[unit_exponents(ctx, basis, x) for x in g] for g in G.gens]
    rows, moduli = [], []
    for gl in logs:
        for k, (_, o) in enumerate(basis):
            rows.append([l[k] for l in gl])
            moduli.append(o)
    exponent = math.lcm(*(o for _, o in basis)) if basis else 1
    if not rows:
        rows, moduli = [[0] * G.n], [1]
    system = CongruenceSystem(rows, moduli)
    return system, solve_congruence_kernel(system, G.n, ambient_moduli=(exponent,) * G.n)


# -- separation ---------------------------------------------------------------

def check_message_set(S):
    if len(S) < 2:
        raise ParameterError("a message set needs at least two vectors")
    if len({tuple(v) for v in S}) != len(S):
        raise ParameterError("message vectors must be pairwise distinct")


def separates(ctx, d, S) -> bool:
    values = [evaluate_monomial(ctx, d, v) for v in S]
    return len(set(values)) == len(values)


def find_separating_invariant(ctx, lat: KernelLattice, S, bound: int = 3):
    """First lattice vector, in enumeration order, whose monomial separates ``S``.

    Vectors are reduced by the lattice's ambient moduli when it has them, which
    keeps the result a polynomial on unit coordinates.
    """
    check_message_set(S)
    for d in enumerate_kernel_vectors(lat, bound, moduli=lat.ambient_moduli):
        try:
            if separates(ctx, d, S):
                return d
        except EvaluationError:
            continue
    raise NotFoundError("no separating invariant within the coefficient bound")


def reduce_two_variables(G: DiagGroup, vk, vl, primitive=None):
    """Invariant ``x_i^{e_i} x_j^{e_j}`` of a cyclic group separating ``vk`` and ``vl``.

    Returns ``(i, j, (e_i, e_j))`` with 0-based ``i < j``. For each coordinate
    pair the 2-variable invariant lattice is solved; the ratio character
    ``e -> (vk_i/vl_i)^{e_i} (vk_j/vl_j)^{e_j}`` is a homomorphism, so it is
    nontrivial on the lattice iff it is nontrivial on a basis vector.
    """
    from .attacks import dlog_bsgs

    ctx = G.ctx
    if len(G.gens) != 1:
        raise ParameterError("reduce_two_variables needs a cyclic group")
    if not _is_finite_field(ctx):
        raise UnsupportedRingError(f"{ctx!r} is not a finite field")
    n = G.n
    if n < 2:
        raise ParameterError("need at least two coordinates")
    vk, vl = list(vk), list(vl)
    if vk == vl:
        raise NotFoundError("identical vectors cannot be separated")
    N = ctx.q - 1

    def pair(i, j, ei, ej):
        return (i, j, (ei, ej)) if i < j else (j, i, (ej, ei))

    for j in range(n):
        if ctx.is_zero(vk[j]) != ctx.is_zero(vl[j]):
            # x_j^(q-1) is invariant and is 0 on one vector, 1 on the other
            return pair(j, (j + 1) % n, N, 0)
    live = [j for j in range(n) if not ctx.is_zero(vk[j])]
    a = primitive_element(ctx) if primitive is None else primitive
    g = G.gens[0]
    logs = {j: dlog_bsgs(ctx, a, g[j]) for j in live}
    ratio = {j: ctx.div(vk[j], vl[j]) for j in live}
    candidates = list(itertools.combinations(live, 2))
    if len(live) == 1:
        other = next(j for j in range(n) if j != live[0])
        candidates = [(live[0], other)]
    for i, j in candidates:
        li, lj = logs[i], logs.get(j, 0)
        lat = solve_congruence_kernel(CongruenceSystem([[li, lj]], [N]), 2)
        for b in lat.basis:
            ei, ej = b[0] % N, b[1] % N
            if j not in logs:
                ej = 0
            chi = ctx.mul(ctx.pow(ratio[i], ei), ctx.pow(ratio[j], ej) if ej else ctx.one)
            if chi != ctx.one:
                return pair(i, j, ei, ej)
    raise NotFoundError("no monomial invariant separates the two vectors")


# -- invariant spaces of full matrix groups ----------------------------------

@dataclass(frozen=True)
class InvariantSpace:
    degree: int
    monomials: tuple
    basis: tuple
    zero: object = 0

    @property
    def dim(self) -> int:
        return len(self.basis)

    def polys(self):
        return [{m: c for m, c in zip(self.monomials, vec) if c != self.zero}
                for vec in self.basis]


def invariant_space_degree(ctx, gens, d: int, cap: int = DEFAULT_MONOMIAL_CAP) -> InvariantSpace:
    """Homogeneous degree-``d`` invariants of the group generated by ``gens``.

    Every degree-``d`` monomial is pushed through each generator; the equations
    ``f(h x) - f(x) = 0`` are linear in the coefficients of ``f``.
    """
    if d < 1:
        raise ParameterError("degree must be positive")
    if not ctx.is_field:
        raise UnsupportedRingError("invariant spaces are computed over fields only")
    n = len(gens[0])
    count = poly.count_monomials(n, d)
    if count > cap:
        raise ResourceError(f"C(n+d-1, d) = {count} exceeds the monomial cap {cap}")
    monos = poly.monomials_of_degree(n, d)
    index = {m: k for k, m in enumerate(monos)}
    rows = []
    for h in gens:
        sub = poly.LinearSubstitution(ctx, h)
        cols = [sub({m: ctx.one}) for m in monos]
        block = [[ctx.zero] * count for _ in range(count)]
        for c, img in enumerate(cols):
            for m, coef in img.items():
                block[index[m]][c] = coef
            block[c][c] = ctx.sub(block[c][c], ctx.one)
        rows.extend(r for r in block if any(not ctx.is_zero(x) for x in r))
    basis = linalg.nullspace(ctx, rows, ncols=count)
    return InvariantSpace(d, tuple(monos), tuple(tuple(v) for v in basis), ctx.zero)


@dataclass(frozen=True)
class NoInvariantBelow:
    """Marker: no invariant of degree ``<= cap`` (the degree is treated as infinite)."""

    cap: int

    def __str__(self):
        return f">{self.cap}"


def minimal_invariant_degree(group, gens=None, max_degree: int = DEFAULT_DEGREE_CAP,
                             cap: int = DEFAULT_MONOMIAL_CAP):
    """Least ``d > 0`` with a nonzero degree-``d`` invariant.

    ``group`` is either a ``DiagGroup`` (scanned monomial by monomial, which is
    complete because monomials span the invariants of a diagonal group) or a
    ring context with ``gens`` a list of full matrices.
    """
    if isinstance(group, DiagGroup):
        for d in range(1, max_degree + 1):
            if poly.count_monomials(group.n, d) > cap:
                return NoInvariantBelow(d - 1)
            if any(monomial_is_invariant(group, m) for m in poly.monomials_of_degree(group.n, d)):
                return d
        return NoInvariantBelow(max_degree)
    ctx = group
    for d in range(1, max_degree + 1):
        try:
            space = invariant_space_degree(ctx, gens, d, cap)
        except ResourceError:
            return NoInvariantBelow(d - 1)
        if space.dim:
            return d
    return NoInvariantBelow(max_degree)


def is_invariant_at(ctx, f, gens, points) -> bool:
    """``f(h x) == f(x)`` for every generator matrix ``h`` and sample point ``x``."""
    for x in points:
        fx = poly.evaluate(ctx, f, x)
        for h in gens:
            if poly.evaluate(ctx, f, linalg.mat_vec(ctx, h, x)) != fx:
                return False
    return True


def lift_coset_product(ctx, f, coset_reps, subgroup_gens=(), rng: Optional[random.Random] = None,
                       samples: int = 20):
    """``prod_i (g_i . f)`` with ``(g . f)(x) = f(g^-1 x)``.

    ``f`` must be invariant under the subgroup ``H``; the representatives
    ``g_i`` of ``G/H`` are permuted by every ``g`` in ``G``, so the product is a
    ``G``-invariant of degree ``s * deg f``.
    """
    rng = rng or random.Random(0)
    if not coset_reps:
        raise ParameterError("need at least one coset representative")
    n = len(coset_reps[0])
    points = [[ctx.random(rng) for _ in range(n)] for _ in range(samples)]
    if subgroup_gens and not is_invariant_at(ctx, f, subgroup_gens, points):
        raise ParameterError("f is not invariant under the subgroup")
    out = poly.constant(ctx, n)
    for g in coset_reps:
        out = poly.mul(ctx, out, poly.linear_substitute(ctx, f, linalg.mat_inv(ctx, g)))
    return out
