"""Attacks on public keys.

Each ``attack_*`` function returns an ``AttackReport``. A report only claims
success after the recovered invariant has been re-checked against the public
generators and the public message set.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath

from . import linalg, poly
from .errors import (AttackFailed, DomainError, EvaluationError, NotFoundError,
                     ResourceError, UnsupportedRingError)
from .intlin import CongruenceSystem, enumerate_kernel_vectors, solve_congruence_kernel
from .invariants import (DEFAULT_MONOMIAL_CAP, DiagGroup, evaluate_monomial,
                         invariant_space_degree, is_invariant_at, monomial_is_invariant)
from .rings import QuadField, _is_finite_field, ff_order

DEFAULT_Q_SCAN_MAX = 2**20
DEFAULT_ROOT_DEGREE_MAX = 4


def dlog_bsgs(ctx, base, target, order: Optional[int] = None) -> int:
    """Least ``x >= 0`` with ``base^x = target`` (baby-step giant-step)."""
    if ctx.is_zero(target):
        raise NotFoundError("0 is not a power of a unit")
    order = ff_order(ctx, base) if order is None else order
    m = math.isqrt(order - 1) + 1 if order > 1 else 1
    table = {}
    x = ctx.one
    for j in range(m):
        table.setdefault(x, j)
        x = ctx.mul(x, base)
    giant = ctx.inv(ctx.pow(base, m))
    y = target
    for i in range(m + 1):
        if y in table:
            return i * m + table[y]
        y = ctx.mul(y, giant)
    raise NotFoundError("target is not in the subgroup generated by base")


@dataclass
class AttackReport:
    name: str
    success: bool
    invariant: object = None
    secret: object = None
    decrypted: list = field(default_factory=list)
    work: dict = field(default_factory=dict)
    message: str = ""

    def to_json(self, ctx=None) -> dict:
        inv = self.invariant
        if isinstance(inv, dict):
            inv = {",".join(map(str, k)): (ctx.to_json(v) if ctx else str(v)) for k, v in inv.items()}
        elif inv is not None:
            inv = [int(x) for x in inv]
        secret = self.secret
        if isinstance(secret, tuple) and ctx is not None:
            secret = [[ctx.to_json(x) for x in row] for row in secret]
        elif secret is not None:
            secret = str(secret)
        return {"attack": self.name, "success": self.success, "invariant": inv, "secret": secret,
                "decrypted": self.decrypted, "work": self.work, "message": self.message}


def _match(values, value):
    hits = [i for i, v in enumerate(values) if v == value]
    return hits[0] if len(hits) == 1 else None


# -- discrete log ---------------------------------------------------------------

def attack_dlog_cyclic(pk, ciphertexts: Sequence = ()) -> AttackReport:
    """Recover ``b`` from ``beta = alpha^b`` and decrypt via ``w2 / w1^b``."""
    ctx = pk.ctx
    if not _is_finite_field(ctx):
        raise UnsupportedRingError(f"{ctx!r} is not a finite field")
    if len(pk.generators) != 1 or pk.n != 2 or not linalg.is_diagonal(ctx, pk.generators[0]):
        raise UnsupportedRingError("key is not a single diagonal 2x2 generator")
    if any(v[0] != ctx.one for v in pk.S):
        raise UnsupportedRingError("messages are not of the form (1, a)")
    alpha, beta = linalg.diagonal_entries(pk.generators[0])
    s = ff_order(ctx, alpha)
    work = {"group_ops": 2 * (math.isqrt(s) + 1)}
    try:
        b = dlog_bsgs(ctx, alpha, beta, s)
    except NotFoundError:
        return AttackReport("dlog", False, work=work, message="beta is not a power of alpha")
    d = ((-b) % s, 1)
    G = DiagGroup(ctx, [(alpha, beta)])
    if not monomial_is_invariant(G, d) or len({evaluate_monomial(ctx, d, v) for v in pk.S}) != len(pk.S):
        return AttackReport("dlog", False, secret=b, work=work, message="recovered invariant does not separate S")
    a_values = [v[1] for v in pk.S]
    out = []
    for ct in ciphertexts:
        w1, w2 = ct.u
        if ctx.is_zero(w1):
            out.append(None)
            continue
        out.append(_match(a_values, ctx.div(w2, ctx.pow(w1, b))))
    return AttackReport("dlog", True, invariant=d, secret=b, decrypted=out, work=work)


# -- linear algebra -------------------------------------------------------------

def _separating(ctx, f, S):
    values = [poly.evaluate(ctx, f, v) for v in S]
    return values if len(set(values)) == len(values) else None


def attack_linear_algebra(pk, d_max: int = 8, ciphertexts: Sequence = (), trials: int = 50,
                          rng: Optional[random.Random] = None,
                          cap: int = DEFAULT_MONOMIAL_CAP) -> AttackReport:
    """Sweep degrees, solve for invariants, and look for one separating ``S``."""
    ctx = pk.ctx
    if not ctx.is_field:
        raise UnsupportedRingError(f"{ctx!r} is not a field")
    rng = rng or random.Random(0)
    gens = [[list(r) for r in g] for g in pk.generators]
    systems = []
    for d in range(1, d_max + 1):
        try:
            space = invariant_space_degree(ctx, gens, d, cap)
        except ResourceError as exc:
            return AttackReport("linalg", False, work={"systems": systems, "degree_reached": d - 1},
                                message=str(exc))
        count = len(space.monomials)
        systems.append({"degree": d, "equations": count * len(gens), "unknowns": count,
                        "dim": space.dim})
        if not space.dim:
            continue
        basis = space.polys()
        candidates = list(basis)
        for _ in range(trials if len(basis) > 1 else 0):
            f = {}
            for b in basis:
                f = poly.add(ctx, f, poly.scale(ctx, ctx.from_int(rng.randint(-3, 3)), b))
            if f:
                candidates.append(f)
        for f in candidates:
            values = _separating(ctx, f, pk.S)
            if values is None:
                continue
            points = [[ctx.random(rng) for _ in range(pk.n)] for _ in range(20)]
            if not is_invariant_at(ctx, f, gens, points):
                continue
            out = [_match(values, poly.evaluate(ctx, f, list(ct.u))) for ct in ciphertexts]
            return AttackReport("linalg", True, invariant=f, decrypted=out,
                                work={"systems": systems, "degree": d})
    return AttackReport("linalg", False, work={"systems": systems, "degree_reached": d_max},
                        message=f"no separating invariant of degree <= {d_max}")


# -- simultaneous diagonalization -----------------------------------------------

def _deflate(ctx, f, x):
    q, r = linalg.upoly_divmod(ctx, f, [ctx.neg(x), ctx.one])
    return q if not r else None


def _roots_finite(ctx, f, q_scan_max):
    if ctx.q > q_scan_max:
        raise AttackFailed(f"diagonalization out of reach: field size {ctx.q} exceeds scan cap")
    roots = []
    for x in ctx.elements():
        if len(f) <= 1:
            break
        while len(f) > 1 and ctx.is_zero(linalg.upoly_eval(ctx, f, x)):
            roots.append(x)
            f = _deflate(ctx, f, x)
    return roots, f


def _to_mpf(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def _round(x, bound):
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    exact = (-1) ** sign * Fraction(int(man)) * Fraction(2) ** exp if man else Fraction(0)
    return exact.limit_denominator(bound)


def _quad_candidates(ctx: QuadField, g):
    """Candidate roots in ``Q(sqrt d)`` of the squarefree polynomial ``g``.

    Numerical roots under the complex (``d < 0``) or both real (``d > 0``)
    embeddings are rounded to coordinates whose denominators divide
    ``2 |N(c)|``, where ``c`` is the leading coefficient once all
    coefficients are cleared into ``Z[sqrt d]``; every candidate is then
    verified exactly by the caller.
    """
    den = math.lcm(*(ctx.denominator(c) for c in g))
    lead = ctx.mul(ctx.from_int(den), g[-1])
    bound = 2 * abs(int(ctx.norm(lead))) or 1
    digits = max(len(str(int(abs(x)))) for c in g for x in (c[0] * den, c[1] * den))
    with mpmath.workdps(60 + 4 * digits + 2 * len(g)):
        if ctx.d is None or ctx.d < 0:
            root = mpmath.sqrt(-ctx.d) if ctx.d else mpmath.mpf(0)
            coeffs = [mpmath.mpc(_to_mpf(c[0]), _to_mpf(c[1]) * root) for c in reversed(g)]
            zs = mpmath.polyroots(coeffs, maxsteps=500, extraprec=200) if len(g) > 2 else \
                [-coeffs[1] / coeffs[0]]
            for z in zs:
                a = _round(mpmath.re(z), bound)
                b = _round(mpmath.im(z) / root, bound) if ctx.d else Fraction(0)
                yield (a, b)
        else:
            root = mpmath.sqrt(ctx.d)
            embed = []
            for sign in (1, -1):
                coeffs = [_to_mpf(c[0]) + sign * _to_mpf(c[1]) * root for c in reversed(g)]
                zs = mpmath.polyroots(coeffs, maxsteps=500, extraprec=200) if len(g) > 2 else \
                    [-coeffs[1] / coeffs[0]]
                embed.append([mpmath.re(z) for z in zs if abs(mpmath.im(z)) < mpmath.mpf(10) ** -20])
            for x in embed[0]:
                for y in embed[1]:
                    yield (_round((x + y) / 2, bound), _round((x - y) / (2 * root), bound))


def _roots_quadratic(ctx, f, max_degree):
    n = len(f) - 1
    if n > max_degree:
        raise AttackFailed(f"diagonalization out of reach: degree {n} exceeds the root-finding cap")
    g = f
    shared = linalg.upoly_gcd(ctx, f, linalg.upoly_deriv(ctx, f))
    if len(shared) > 1:
        g = linalg.upoly_divmod(ctx, f, shared)[0]
    g = linalg.upoly_monic(ctx, g)
    distinct = []
    try:
        for x in _quad_candidates(ctx, g):
            if x not in distinct and linalg.upoly_eval(ctx, g, x) == ctx.zero:
                distinct.append(x)
    except (mpmath.libmp.NoConvergence, ZeroDivisionError) as exc:
        raise AttackFailed(f"diagonalization out of reach: root finding failed ({exc})") from exc
    roots = []
    for x in distinct:
        while len(f) > 1:
            q = _deflate(ctx, f, x)
            if q is None:
                break
            roots.append(x)
            f = q
    return roots, f


def eigenvalues(ctx, M, q_scan_max=DEFAULT_Q_SCAN_MAX, max_degree=DEFAULT_ROOT_DEGREE_MAX):
    """Eigenvalues of ``M`` with multiplicity; fails unless ``char_poly`` splits."""
    f = linalg.char_poly(ctx, M)
    if _is_finite_field(ctx):
        roots, rest = _roots_finite(ctx, f, q_scan_max)
    elif isinstance(ctx, QuadField):
        roots, rest = _roots_quadratic(ctx, f, max_degree)
    else:
        raise UnsupportedRingError(f"eigenvalues are not computed over {ctx!r}")
    if len(rest) > 1:
        raise AttackFailed("diagonalization out of reach: characteristic polynomial does not split")
    return roots


@dataclass(frozen=True)
class Diagonalization:
    Q: tuple
    Q_inv: tuple
    group: DiagGroup
    eigenvalues: tuple


def _common_eigenspaces(ctx, gens, spectra):
    """Split ``F^n`` into common eigenspaces, one generator at a time."""
    n = len(gens[0])
    spaces = [[[ctx.one if i == j else ctx.zero for i in range(n)] for j in range(n)]]
    for g, spec in zip(gens, spectra):
        refined = []
        for B in spaces:
            cols = [[v[r] for v in B] for r in range(n)]
            found = 0
            for lam in dict.fromkeys(spec):
                AB = linalg.mat_mul(ctx, linalg.mat_sub_scalar(ctx, g, lam), cols)
                piece = [linalg.mat_vec(ctx, cols, c) for c in linalg.nullspace(ctx, AB, ncols=len(B))]
                if piece:
                    refined.append(piece)
                    found += len(piece)
            if found != len(B):
                raise AttackFailed("a generator is not diagonalizable")
        spaces = refined
    return spaces


def attack_diagonalize(pk=None, *, ctx=None, gens=None, q_scan_max: int = DEFAULT_Q_SCAN_MAX,
                       max_degree: int = DEFAULT_ROOT_DEGREE_MAX) -> Diagonalization:
    """Common eigenbasis ``Q`` with every ``Q^-1 g_i Q`` diagonal.

    Eigenvalues come from the characteristic polynomials: a full scan over
    finite fields, numerically guided and exactly verified candidates over
    ``Q(sqrt d)``. Columns of ``Q`` are ordered by their first nonzero entry,
    so an already diagonal key gives ``Q = I``.
    """
    if pk is not None:
        ctx, gens = pk.ctx, pk.generators
    gens = [[list(r) for r in g] for g in gens]
    if not ctx.is_field:
        raise UnsupportedRingError(f"{ctx!r} is not a field")
    n = len(gens[0])
    for i, a in enumerate(gens):
        for b in gens[i + 1:]:
            if not linalg.commute(ctx, a, b):
                raise AttackFailed("generators do not commute")
    spectra = [eigenvalues(ctx, g, q_scan_max, max_degree) for g in gens]
    cols = [v for B in _common_eigenspaces(ctx, gens, spectra) for v in B]
    cols.sort(key=lambda v: next(i for i, x in enumerate(v) if not ctx.is_zero(x)))
    Q = [[cols[c][r] for c in range(n)] for r in range(n)]
    Q_inv = linalg.mat_inv(ctx, Q)
    diag = []
    for g in gens:
        D = linalg.conjugate(ctx, Q_inv, g, Q)
        if not linalg.is_diagonal(ctx, D):
            raise AttackFailed("common eigenbasis does not diagonalize the group")
        diag.append(tuple(linalg.diagonal_entries(D)))
    return Diagonalization(tuple(map(tuple, Q)), tuple(map(tuple, Q_inv)), DiagGroup(ctx, diag),
                           tuple(map(tuple, spectra)))


def attack_diagonalize_report(pk, **kw) -> AttackReport:
    """``attack_diagonalize`` wrapped as a report (failure instead of an exception)."""
    try:
        res = attack_diagonalize(pk, **kw)
    except AttackFailed as exc:
        return AttackReport("diag", False, message=str(exc))
    return AttackReport("diag", True, secret=res.Q, work={"generators": len(res.group.gens)},
                        message="diagonalized")


# -- atoms over Z and Z[i] ------------------------------------------------------

@dataclass(frozen=True)
class AtomSet:
    """Pairwise coprime non-units with the factorization of every input.

    ``factorizations[i] = (e, b)`` means ``X[i] = zeta^e * prod_k atoms[k]^b[k]``.
    """

    ctx: object
    atoms: tuple
    zeta: object
    E: int
    factorizations: tuple

    def rebuild(self, i):
        e, b = self.factorizations[i]
        ctx = self.ctx
        out = ctx.pow(self.zeta, e)
        for a, k in zip(self.atoms, b):
            out = ctx.mul(out, ctx.pow(a, k))
        return out


def _divides(ctx, a, x):
    return ctx.ring_divmod(x, a)[1] == ctx.zero


def atom_refine(ctx: QuadField, X: Sequence) -> AtomSet:
    """Coprime base of ``X`` by repeated gcd splitting.

    Two atoms sharing a non-unit gcd ``g`` are replaced by ``g``, ``a/g`` and
    ``b/g`` until all pairs are coprime; units are dropped along the way.
    """
    if not isinstance(ctx, QuadField):
        raise UnsupportedRingError("atoms need a quadratic context")
    ctx._require_euclidean()
    from .rings import quad_gcd

    X = list(X)
    for x in X:
        if x == ctx.zero or not ctx.is_integral(x):
            raise DomainError("atom inputs must be nonzero ring elements")
    atoms = []
    pending = [ctx.normalize(x) for x in X]
    while pending:
        x = ctx.normalize(pending.pop())
        if ctx.is_ring_unit(x) or x in atoms:
            continue
        for a in atoms:
            g = quad_gcd(ctx, a, x)
            if not ctx.is_ring_unit(g):
                atoms.remove(a)
                pending += [g, ctx.ring_divmod(a, g)[0], ctx.ring_divmod(x, g)[0]]
                break
        else:
            atoms.append(x)
    atoms.sort(key=lambda a: (abs(ctx.norm(a)), a))
    zeta, E = ctx.root_of_unity()
    powers = [ctx.pow(zeta, k) for k in range(E)]
    facts = []
    for x in X:
        rest, exps = x, []
        for a in atoms:
            k = 0
            while _divides(ctx, a, rest):
                rest = ctx.ring_divmod(rest, a)[0]
                k += 1
            exps.append(k)
        facts.append((powers.index(rest), tuple(exps)))
    return AtomSet(ctx, tuple(atoms), zeta, E, tuple(facts))


def _numer_denom(ctx, x):
    den = ctx.denominator(x)
    return ctx.mul(x, ctx.from_int(den)), ctx.from_int(den)


def attack_atoms(pk, ciphertexts: Sequence = (), coeff_bound: int = 3,
                 rng: Optional[random.Random] = None, **diag_kw) -> AttackReport:
    """Diagonalize, factor the eigenvalues over atoms, solve for a rational invariant.

    ``x^y`` is invariant iff for every generator the atom exponents
    ``sum_j b_kj y_j`` vanish and the unit exponent ``sum_j e_j y_j`` is
    ``0 mod E``. Ciphertexts whose diagonal coordinates are zero where ``y``
    is negative cannot be decrypted and are reported as ``None``.
    """
    ctx = pk.ctx
    if not isinstance(ctx, QuadField):
        raise UnsupportedRingError("atom attack needs a number-ring key")
    ctx._require_euclidean()
    rng = rng or random.Random(0)
    try:
        res = attack_diagonalize(pk, **diag_kw)
    except AttackFailed as exc:
        return AttackReport("atoms", False, message=str(exc))
    lams = [x for g in res.group.gens for x in g]
    split = [_numer_denom(ctx, x) for x in lams]
    aset = atom_refine(ctx, [z for pair in split for z in pair])
    n = pk.n
    rows, moduli = [], []
    for i, _ in enumerate(res.group.gens):
        per = []
        for j in range(n):
            en, bn = aset.factorizations[2 * (i * n + j)]
            ed, bd = aset.factorizations[2 * (i * n + j) + 1]
            per.append((en - ed, [p - q for p, q in zip(bn, bd)]))
        for k in range(len(aset.atoms)):
            rows.append([per[j][1][k] for j in range(n)])
            moduli.append(0)
        rows.append([per[j][0] for j in range(n)])
        moduli.append(aset.E)
    system = CongruenceSystem(rows, moduli)
    lat = solve_congruence_kernel(system, n)
    Qinv = [list(r) for r in res.Q_inv]
    S_diag = [linalg.mat_vec(ctx, Qinv, list(v)) for v in pk.S]
    work = {"atoms": len(aset.atoms), "rows": len(rows), "lattice_rank": lat.rank}
    for y in enumerate_kernel_vectors(lat, coeff_bound):
        try:
            values = [evaluate_monomial(ctx, y, v) for v in S_diag]
        except EvaluationError:
            continue
        if len(set(values)) != len(values):
            continue
        if not monomial_is_invariant(res.group, y) or not _verify_rational(ctx, res, y, rng):
            continue
        out = []
        for ct in ciphertexts:
            try:
                val = evaluate_monomial(ctx, y, linalg.mat_vec(ctx, Qinv, list(ct.u)))
            except EvaluationError:
                out.append(None)
                continue
            out.append(_match(values, val))
        return AttackReport("atoms", True, invariant=y, secret=res.Q, decrypted=out, work=work)
    return AttackReport("atoms", False, work=work, message="no separating rational invariant found")


def _verify_rational(ctx, res, y, rng, points=20):
    # f(x) = (Q^-1 x)^y must satisfy f(g x) = f(x) at random points with unit diagonal coordinates
    Q = [list(r) for r in res.Q]
    Qinv = [list(r) for r in res.Q_inv]
    gens = [linalg.conjugate(ctx, Q, linalg.diag(ctx, list(g)), Qinv) for g in res.group.gens]
    for _ in range(points):
        z = [ctx.from_int(rng.choice([k for k in range(-9, 10) if k])) for _ in range(len(Q))]
        x = linalg.mat_vec(ctx, Q, z)
        fx = evaluate_monomial(ctx, y, z)
        for g in gens:
            if evaluate_monomial(ctx, y, linalg.mat_vec(ctx, Qinv, linalg.mat_vec(ctx, g, x))) != fx:
                return False
    return True
