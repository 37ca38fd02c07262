"""End-to-end acceptance checks, one test group per criterion.

Brute-force oracles build discrete-log tables by repeated multiplication and
scan exponent grids with numpy, independent of the baby-step giant-step logs
used inside the package.
"""
import itertools
import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from icrypt import linalg, poly
from icrypt.attacks import (attack_atoms, attack_diagonalize, attack_dlog_cyclic,
                            attack_linear_algebra)
from icrypt.cryptosystem import (PublicKey, decrypt, encode_blocks, encrypt, expansion_ratio,
                                 expansion_ratio_raw, keygen_ff_cyclic, keygen_ff_noncyclic,
                                 keygen_finite_ring, keygen_number_ring, pack_ciphertexts)
from icrypt.errors import NotFoundError, UnsupportedRingError
from icrypt.intlin import enumerate_kernel_vectors
from icrypt.invariants import (DiagGroup, NoInvariantBelow,
                               find_separating_invariant, invariant_space_degree,
                               is_invariant_at, lift_coset_product, minimal_invariant_degree,
                               monomial_is_invariant, monomial_lattice_field,
                               reduce_two_variables, separates)
from icrypt.rings import ExtField, PrimeField, QuadField

pytestmark = pytest.mark.filterwarnings("ignore:transition matrix is the identity")


def acceptance(n):
    return pytest.mark.acceptance(n)


# -- shared oracles -------------------------------------------------------------

def log_table(ctx):
    """``(generator, log)`` with ``log[x]`` the discrete log of ``x``, by brute force."""
    N = ctx.q - 1
    for a in range(1, ctx.q):
        x, seen = ctx.one, {}
        for k in range(N):
            if x in seen:
                break
            seen[x] = k
            x = ctx.mul(x, a)
        if len(seen) == N:
            return a, seen
    raise AssertionError("no primitive element")


def _coprime_set(rng, size):
    out = []
    while len(out) < size:
        x = rng.randint(2, 40)
        if all(math.gcd(x, y) == 1 for y in out):
            out.append(x)
    return out


def _random_e(rng, n):
    e = [rng.randint(1, 3) for _ in range(n - 1)] + [1]
    return e


def _char_poly_from_roots(ctx, roots):
    return linalg.upoly_from_roots(ctx, list(roots))


# -- 1. roundtrip ------------------------------------------------------------------

def _cyclic_key(rng):
    s, q = rng.choice([(5, 31), (3, 31), (7, 211), (5, 211), (11, 331)])
    return keygen_ff_cyclic(q, s, rng.randrange(1, s), s, conjugate=True, rng=rng)


def _noncyclic_key(rng):
    q, s1, s2 = rng.choice([(31, 3, 5), (211, 5, 7), (211, 3, 7)])
    return keygen_ff_noncyclic(q, s1, s2, rng.randrange(1, s1), rng.randrange(1, s2),
                               rng.randint(2, 8), conjugate=True, rng=rng)


def _number_ring_key(rng):
    d = rng.choice([None, -1, -5, 3])
    K = QuadField(d)
    n = rng.randint(2, 3)
    sm = [K.from_int(x) for x in _coprime_set(rng, 2)] + ([K(1, 1)] if d is not None else [])
    return keygen_number_ring(d, sm, [-1, 0, 1], n, _random_e(rng, n), rng.randint(1, 2),
                              rng.randint(2, 5), rng=rng)


def _finite_ring_key(rng):
    m, d = rng.choice([(15, None), (21, None), (31, None), (25, -1), (9, -1), (49, None)])
    n = rng.randint(2, 3)
    return keygen_finite_ring(m, _random_e(rng, n), rng.randint(1, 2), rng.randint(2, 4),
                              d=d, rng=rng)


SCHEME_MAKERS = {"ff-cyclic": _cyclic_key, "ff-noncyclic": _noncyclic_key,
                 "number-ring": _number_ring_key, "finite-ring": _finite_ring_key}


@acceptance(1)
def test_roundtrip_all_schemes(detail):
    rng = random.Random(20240601)
    start = time.perf_counter()
    failures = total = 0
    for scheme, make in SCHEME_MAKERS.items():
        for _ in range(20):
            kp = make(rng)
            assert kp.public.scheme == scheme
            for _ in range(100):
                i = rng.randrange(len(kp.public.S))
                if decrypt(kp.private, encrypt(kp.public, i, rng=rng)) != i:
                    failures += 1
                total += 1
    elapsed = time.perf_counter() - start
    detail(f"{total} roundtrips, {failures} failures, {elapsed:.1f}s")
    assert failures == 0 and total == 8000
    assert elapsed < 60


# -- 2. dlog equivalence ---------------------------------------------------------

PAIRS = [(s, q) for s in (5, 7, 11) for q in (31, 211, 331) if (q - 1) % s == 0]


@acceptance(2)
def test_dlog_equivalence(detail):
    assert PAIRS == [(5, 31), (5, 211), (5, 331), (7, 211), (11, 331)]
    rng = random.Random(7)
    start = time.perf_counter()
    keys = checked_monomials = 0
    for s, q in PAIRS:
        for b in range(1, s):
            kp = keygen_ff_cyclic(q, s, b, s, rng=rng)
            pk = kp.public
            keys += 1
            cts = [encrypt(pk, i % s, rng=rng) for i in range(2 * s)]
            rep = attack_dlog_cyclic(pk, cts)
            assert rep.success and rep.secret == b
            assert rep.decrypted == [i % s for i in range(2 * s)]
            # the other direction: any separating monomial yields b
            G = DiagGroup(pk.ctx, [linalg.diagonal_entries(pk.generators[0])])
            _, lat = monomial_lattice_field(G)
            first = find_separating_invariant(pk.ctx, lat, pk.S)
            found = [first] + [d for d in enumerate_kernel_vectors(lat, 3, lat.ambient_moduli)
                               if separates(pk.ctx, d, pk.S)]
            for d1, d2 in found:
                assert (-d1 * pow(d2, -1, s)) % s == b
                checked_monomials += 1
    elapsed = time.perf_counter() - start
    detail(f"{keys} keys, {checked_monomials} separating monomials, {elapsed:.1f}s")
    assert elapsed < 30


# -- 3. two-variable reduction -------------------------------------------------

def _brute_separating(q, log, gen, vk, vl):
    """Does any exponent vector in [0, q-1)^n give a separating invariant?"""
    N = q - 1
    n = len(gen)
    lg = np.array([log[x] for x in gen], dtype=np.int64)

    def value_logs(v):
        # log of x^e at v, or -1 where a zero coordinate is raised to a positive power
        lv = np.array([log.get(x, 0) for x in v], dtype=np.int64)
        zero = np.array([x == 0 for x in v])
        return lv, zero

    lk, zk = value_logs(vk)
    ll, zl = value_logs(vl)
    rest = np.array(list(itertools.product(range(N), repeat=n - 1)), dtype=np.int64)
    inv_rest = rest @ lg[1:] % N
    k_rest, l_rest = rest @ lk[1:], rest @ ll[1:]
    kz_rest = (rest[:, zk[1:]] > 0).any(axis=1) if zk[1:].any() else np.zeros(len(rest), bool)
    lz_rest = (rest[:, zl[1:]] > 0).any(axis=1) if zl[1:].any() else np.zeros(len(rest), bool)
    for e1 in range(N):
        inv = (inv_rest + e1 * lg[0]) % N == 0
        kz = kz_rest | (zk[0] and e1 > 0)
        lz = lz_rest | (zl[0] and e1 > 0)
        kv = np.where(kz, -1, (k_rest + e1 * lk[0]) % N)
        lv = np.where(lz, -1, (l_rest + e1 * ll[0]) % N)
        if np.any(inv & (kv != lv)):
            return True
    return False


@acceptance(3)
def test_reduce_two_variables_vs_exhaustive(detail):
    rng = random.Random(3)
    tables = {q: log_table(PrimeField(q)) for q in (13, 31, 61)}
    separable = counterexamples = 0
    for _ in range(200):
        q = rng.choice([13, 31, 61])
        n = rng.choice([3, 4])
        F = PrimeField(q)
        _, log = tables[q]
        gen = tuple(rng.randrange(1, q) for _ in range(n))
        G = DiagGroup(F, [gen])
        while True:
            vk = tuple(rng.randrange(q) if rng.random() > 0.1 else 0 for _ in range(n))
            mode = rng.randrange(3)
            if mode == 0:
                vl = tuple(rng.randrange(q) if rng.random() > 0.1 else 0 for _ in range(n))
            else:
                # an orbit mate of vk, optionally nudged in one coordinate
                k = rng.randrange(1, q - 1)
                vl = [F.mul(F.pow(a, k), x) for a, x in zip(gen, vk)]
                if mode == 2:
                    j = rng.randrange(n)
                    vl[j] = F.mul(vl[j], rng.randrange(1, q))
                vl = tuple(vl)
            if vk != vl:
                break
        exists = _brute_separating(q, log, gen, vk, vl)
        try:
            i, j, (ei, ej) = reduce_two_variables(G, vk, vl)
            d = [0] * n
            d[i], d[j] = ei, ej
            ok = monomial_is_invariant(G, d) and separates(F, d, [vk, vl])
        except NotFoundError:
            ok = False
        separable += exists
        if exists and not ok:
            counterexamples += 1
        if not exists:
            assert not ok
    detail(f"200 pairs, {separable} separable, {counterexamples} counterexamples")
    assert counterexamples == 0


# -- 4. lattice completeness ---------------------------------------------------

SMALL_FIELDS = [PrimeField(p) for p in (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                                         59, 61)] + [ExtField(2, k) for k in (2, 3, 4, 5, 6)] + \
               [ExtField(3, 2), ExtField(3, 3), ExtField(5, 2), ExtField(7, 2)]


def _lattice_codes(lat, N, n):
    basis = np.array([[x % N for x in b] for b in lat.basis], dtype=np.int64)
    vecs = np.zeros((1, n), dtype=np.int64)
    for row in basis:
        vecs = ((vecs[:, None, :] + np.arange(N)[None, :, None] * row[None, None, :]) % N).reshape(-1, n)
        vecs = np.unique(vecs, axis=0)
    return set(map(tuple, vecs.tolist()))


def _brute_codes(log, gens, N, n):
    grid = np.array(list(itertools.product(range(N), repeat=n)), dtype=np.int64)
    ok = np.ones(len(grid), dtype=bool)
    for g in gens:
        lg = np.array([log[x] for x in g], dtype=np.int64)
        ok &= grid @ lg % N == 0
    return set(map(tuple, grid[ok].tolist()))


@acceptance(4)
def test_lattice_completeness(detail):
    rng = random.Random(4)
    tables = {}
    sizes = []
    for _ in range(100):
        ctx = rng.choice(SMALL_FIELDS)
        if repr(ctx) not in tables:
            tables[repr(ctx)] = log_table(ctx)
        _, log = tables[repr(ctx)]
        n = rng.randint(1, 3)
        gens = [tuple(rng.randrange(1, ctx.q) for _ in range(n)) for _ in range(rng.randint(1, 2))]
        _, lat = monomial_lattice_field(DiagGroup(ctx, gens))
        N = ctx.q - 1
        brute = _brute_codes(log, gens, N, n)
        assert _lattice_codes(lat, N, n) == brute
        sizes.append(len(brute))
    detail(f"100 groups, invariant sets of size {min(sizes)}..{max(sizes)}")


# -- 5. linear-algebra attack calibration ---------------------------------------

@acceptance(5)
def test_linear_algebra_calibration(detail):
    F = PrimeField(31)
    P = [[1, 1], [0, 1]]
    Pinv = linalg.mat_inv(F, P)
    g = linalg.conjugate(F, P, [[2, 0], [0, 4]], Pinv)
    assert g == [[2, 2], [0, 4]]
    W = [(1, 1), (1, 2), (1, 4), (1, 8), (1, 16)]
    pk = PublicKey("ff-cyclic", F, 2, [g], [linalg.mat_vec(F, P, list(w)) for w in W])
    rng = random.Random(5)
    cts = [encrypt(pk, i % 5, rng=rng) for i in range(50)]
    rep = attack_linear_algebra(pk, d_max=8, ciphertexts=cts)
    assert rep.success
    assert [s["dim"] for s in rep.work["systems"]] == [0, 0, 1]
    target = poly.mul(F, {(1, 0): 1, (0, 1): F(-1)}, {(0, 2): 1})
    assert poly.equal_up_to_scalar(F, rep.invariant, target)
    assert rep.decrypted == [i % 5 for i in range(50)]

    kp = keygen_number_ring(None, [2, 3, 5, 7], [-1, 0, 1], 3, (5, 6, 1), 2, 4,
                            rng=random.Random(55))
    assert minimal_invariant_degree(kp.private.group(), max_degree=12) == 12
    guarded = attack_linear_algebra(kp.public, d_max=8)
    assert not guarded.success and guarded.work["degree_reached"] == 8
    assert all(s["dim"] == 0 for s in guarded.work["systems"])
    detail("GF(31) dims 0,0,1 and 50/50 decrypted; sum(e)=12 key resists d<=8")


# -- 6. atom attack ---------------------------------------------------------------

def _align(ctx, Q, P):
    """Permutation pi with column k of Q parallel to column pi[k] of P, or None."""
    n = len(P)
    pi = []
    for k in range(n):
        qk = [Q[i][k] for i in range(n)]
        hits = [j for j in range(n)
                if all(ctx.mul(qk[a], P[b][j]) == ctx.mul(qk[b], P[a][j])
                       for a in range(n) for b in range(n))]
        if len(hits) != 1:
            return None
        pi.append(hits[0])
    return pi if sorted(pi) == list(range(n)) else None


@acceptance(6)
def test_atom_attack(detail):
    rng = random.Random(6)
    Z = QuadField()
    broken = aligned = decrypted = 0
    for _ in range(50):
        n = rng.choice([2, 3])
        sm = [Z.from_int(x) for x in _coprime_set(rng, rng.randint(2, 3))]
        e = _random_e(rng, n)
        kp = keygen_number_ring(None, sm, [-1, 0, 1], n, e, rng.randint(1, 2), rng.randint(2, 5),
                                rng=rng)
        pk, sk = kp.public, kp.private
        cts = [encrypt(pk, i % len(pk.S), rng=rng) for i in range(10)]
        rep = attack_atoms(pk, cts)
        assert rep.success
        broken += 1
        Qinv = linalg.mat_inv(Z, [list(r) for r in rep.secret])
        for i, ct in enumerate(cts):
            z = linalg.mat_vec(Z, Qinv, list(ct.u))
            if all(x != Z.zero for x in z):
                assert rep.decrypted[i] == i % len(pk.S)
                decrypted += 1
        # the recovered exponents, moved to the private basis, are invariant there
        pi = _align(Z, [list(r) for r in rep.secret], [list(r) for r in sk.P])
        if pi is not None:
            y = [0] * n
            for k, j in enumerate(pi):
                y[j] = rep.invariant[k]
            assert monomial_is_invariant(sk.group(), y)
            aligned += 1
    refused = 0
    for _ in range(20):
        K = QuadField(-5)
        kp = keygen_number_ring(-5, [K.from_int(2), K.from_int(3), K(1, 1)], [-1, 0, 1], 2, (1, 1),
                                1, 3, rng=rng)
        with pytest.raises(UnsupportedRingError, match="non-Euclidean"):
            attack_atoms(kp.public)
        refused += 1
    detail(f"Z: {broken}/50 broken, {decrypted} ciphertexts, {aligned} aligned with P; "
           f"Z[sqrt(-5)]: {refused}/20 unsupported")
    assert broken == 50 and refused == 20


# -- 7. diagonalization -------------------------------------------------------------

def _field_keys(rng):
    for _ in range(10):
        yield _cyclic_key(rng)
        yield _noncyclic_key(rng)
        yield _number_ring_key(rng)
        yield keygen_finite_ring(rng.choice([31, 61]), _random_e(rng, 3), 2, 3, rng=rng)
    for _ in range(5):
        yield keygen_number_ring(rng.choice([None, -1, 2]), [2, 3, 5], [-1, 0, 1], 4,
                                 [1, 1, 2, 1], 2, 3, rng=rng)


@acceptance(7)
def test_diagonalization_exact(detail):
    rng = random.Random(7)
    count = 0
    for kp in _field_keys(rng):
        pk = kp.public
        ctx = pk.ctx
        res = attack_diagonalize(pk)
        Q, Qi = [list(r) for r in res.Q], [list(r) for r in res.Q_inv]
        assert linalg.mat_mul(ctx, Q, Qi) == linalg.identity(ctx, pk.n)
        for g, t in zip(pk.generators, res.group.gens):
            g = [list(r) for r in g]
            D = linalg.conjugate(ctx, Qi, g, Q)
            assert linalg.is_diagonal(ctx, D)
            assert tuple(linalg.diagonal_entries(D)) == tuple(t)
            assert _char_poly_from_roots(ctx, t) == linalg.char_poly(ctx, g)
        count += 1
    detail(f"{count} keys diagonalized")


# -- 8. conjugation and direct products --------------------------------------------

def _random_diag_gens(rng, F, n, k):
    return [[[rng.randrange(1, F.q) if i == j else 0 for j in range(n)] for i in range(n)]
            for _ in range(k)]


@acceptance(8)
def test_conjugation_and_direct_products(detail):
    rng = random.Random(8)
    for _ in range(50):
        F = PrimeField(rng.choice([5, 7, 11, 13]))
        n = rng.randint(2, 3)
        gens = _random_diag_gens(rng, F, n, rng.randint(1, 2))
        if rng.random() < 0.5:
            gens = [[[rng.randrange(F.q) for _ in range(n)] for _ in range(n)]]
        P = linalg.random_unimodular(F, n, rng)
        Pinv = linalg.mat_inv(F, P)
        conj = [linalg.conjugate(F, P, g, Pinv) for g in gens]
        for d in range(1, 6):
            assert invariant_space_degree(F, gens, d).dim == invariant_space_degree(F, conj, d).dim

    for _ in range(50):
        F = PrimeField(rng.choice([5, 7]))
        n1, n2 = rng.randint(1, 2), rng.randint(1, 2)
        g1 = _random_diag_gens(rng, F, n1, 1)[0]
        g2 = _random_diag_gens(rng, F, n2, 1)[0]
        P1, P2 = linalg.random_unimodular(F, n1, rng), linalg.random_unimodular(F, n2, rng)
        g1 = linalg.conjugate(F, P1, g1, linalg.mat_inv(F, P1))
        g2 = linalg.conjugate(F, P2, g2, linalg.mat_inv(F, P2))
        n = n1 + n2
        b1 = [[g1[i][j] if i < n1 and j < n1 else int(i == j) for j in range(n)] for i in range(n)]
        b2 = [[g2[i - n1][j - n1] if i >= n1 and j >= n1 else int(i == j) for j in range(n)]
              for i in range(n)]
        M1 = minimal_invariant_degree(F, [g1], max_degree=8)
        M2 = minimal_invariant_degree(F, [g2], max_degree=8)
        M = minimal_invariant_degree(F, [b1, b2], max_degree=8)
        assert not isinstance(M1, NoInvariantBelow) and not isinstance(M2, NoInvariantBelow)
        assert M == min(M1, M2)
    detail("50 conjugations at d<=5, 50 direct products")


# -- 9. expansion ratio ---------------------------------------------------------------

@acceptance(9)
def test_expansion_ratio(detail):
    rng = random.Random(9)
    family = [(31, 5, 3), (31, 3, 2), (211, 7, 2), (211, 5, 4), (331, 11, 7), (331, 5, 2),
              (61, 5, 2), (257, 2, 1), (251, 5, 3)]
    for q, s, b in family:
        kp = keygen_ff_cyclic(q, s, b, s, rng=rng)
        pk = kp.public
        k = s.bit_length() - 1
        data = bytes(rng.randrange(256) for _ in range(k))  # 8k bits, exactly 8 blocks
        idx = encode_blocks(data, s)
        assert len(idx) == 8
        cts = [encrypt(pk, i, rng=rng) for i in idx]
        _, ct_bits = pack_ciphertexts(pk, cts)
        measured = Fraction(ct_bits, 8 * len(data))
        assert measured == expansion_ratio(pk) == expansion_ratio_raw(2, q, s)
        assert measured == Fraction(2 * math.ceil(math.log2(q)), math.floor(math.log2(s)))
    detail(f"{len(family)} instances, measured == 2*bits(q)/floor(log2 s)")


# -- 10. coset lift ----------------------------------------------------------------------

@acceptance(10)
def test_coset_lift(detail):
    rng = random.Random(10)
    done = 0
    while done < 20:
        F = PrimeField(rng.choice([7, 11, 13, 31]))
        n = rng.randint(2, 3)
        g = tuple(rng.randrange(2, F.q) for _ in range(n))
        G = DiagGroup(F, [g])
        order = math.lcm(*[_order(F, x) for x in g])
        divisors = [s for s in range(2, order + 1) if order % s == 0]
        if not divisors:
            continue
        s = rng.choice(divisors)
        h = tuple(F.pow(x, s) for x in g)
        H = DiagGroup(F, [h])
        _, lat = monomial_lattice_field(H)
        f_exp = next((d for d in enumerate_kernel_vectors(lat, 2, lat.ambient_moduli)
                      if sum(d) > 0 and not monomial_is_invariant(G, d)), None)
        if f_exp is None:
            continue
        f = {tuple(f_exp): F.one}
        reps = [linalg.diag(F, [F.pow(x, i) for x in g]) for i in range(s)]
        G_mat = [linalg.diag(F, list(g))]
        lifted = lift_coset_product(F, f, reps, [linalg.diag(F, list(h))], rng=rng)
        points = [[F.random(rng) for _ in range(n)] for _ in range(100)]
        assert is_invariant_at(F, lifted, G_mat, points)
        assert poly.degree(lifted) == s * sum(f_exp)
        done += 1
    detail("20 lifts, each checked at 100 points")


def _order(F, x):
    k, y = 1, x
    while y != F.one:
        y, k = F.mul(y, x), k + 1
    return k
