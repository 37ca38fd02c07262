import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from icrypt.errors import DomainError
from icrypt.intlin import (CongruenceSystem, crt, divisors, enumerate_kernel_vectors, ext_gcd,
                           factorize, hermite_normal_form, int_det, int_mat_mul, is_prime,
                           smith_normal_form, solve_congruence_kernel, KernelLattice)


def test_ext_gcd_examples():
    g, x, y = ext_gcd(6, 10)
    assert g == 2 and 6 * x + 10 * y == 2
    assert ext_gcd(0, 5)[0] == 5
    assert ext_gcd(1, 1)[0] == 1
    with pytest.raises(DomainError):
        ext_gcd(0, 0)


@given(st.integers(-10**12, 10**12), st.integers(-10**12, 10**12))
def test_ext_gcd_bezout(a, b):
    if a == 0 and b == 0:
        return
    g, x, y = ext_gcd(a, b)
    assert g == math.gcd(a, b) and a * x + b * y == g


def test_factorize_examples():
    assert factorize(30) == [2, 3, 5]
    assert factorize(1) == []
    assert factorize(91) == [7, 13]


def test_factorize_large_semiprime():
    p, q = 1000003, 1000033
    assert factorize(p * q) == [p, q]
    assert factorize(2**61 - 1) == [2**61 - 1]


def _sieve(limit):
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i::i] = bytearray(len(flags[i * i::i]))
    return flags


def test_is_prime_matches_sieve():
    flags = _sieve(20000)
    assert all(is_prime(n) == bool(flags[n]) for n in range(20001))


@settings(max_examples=300)
@given(st.integers(1, 10**6))
def test_factorize_product_and_primality(n):
    fs = factorize(n)
    assert math.prod(fs) == n
    assert all(is_prime(p) for p in fs)


def test_divisors():
    assert divisors(30) == [1, 2, 3, 5, 6, 10, 15, 30]


@given(st.lists(st.tuples(st.integers(0, 10**6), st.integers(2, 200)), min_size=1, max_size=4))
def test_crt_reconstructs(pairs):
    moduli = []
    for _, m in pairs:
        if all(math.gcd(m, k) == 1 for k in moduli):
            moduli.append(m)
    x = pairs[0][0]
    res, lcm = crt([x % m for m in moduli], moduli)
    assert lcm == math.prod(moduli) and res == x % lcm


def test_crt_inconsistent():
    with pytest.raises(DomainError):
        crt([0, 1], [4, 6])


def test_snf_examples():
    _, D, _ = smith_normal_form([[2, 4], [6, 8]])
    assert D == [[2, 0], [0, 4]]
    U, D, V = smith_normal_form([[1, 0], [0, 1]])
    assert D == U == V == [[1, 0], [0, 1]]
    assert smith_normal_form([[0, 0]])[1] == [[0, 0]]


def test_snf_random_matrices():
    rng = random.Random(7)
    for _ in range(200):
        r, c = rng.randint(1, 4), rng.randint(1, 4)
        A = [[rng.randint(-50, 50) for _ in range(c)] for _ in range(r)]
        U, D, V = smith_normal_form(A)
        assert int_mat_mul(int_mat_mul(U, A), V) == D
        assert abs(int_det(U)) == 1 and abs(int_det(V)) == 1
        diag = [D[i][i] for i in range(min(r, c))]
        assert all(D[i][j] == 0 for i in range(r) for j in range(c) if i != j)
        assert all(x >= 0 for x in diag)
        for a, b in zip(diag, diag[1:]):
            assert (b == 0) if a == 0 else b % a == 0


def test_hnf_is_canonical():
    rows = [[4, 6], [2, 3], [0, 5]]
    H = hermite_normal_form(rows, 2)
    assert H == hermite_normal_form([[2, 3], [0, 5]], 2)
    assert H == hermite_normal_form([[2, 8], [0, -5], [2, 3]], 2)


def test_kernel_examples():
    lat = solve_congruence_kernel(CongruenceSystem([[6, 10]], [30]))
    for v in [(5, 0), (0, 3), (5, 3)]:
        assert v in lat
    assert (1, 0) not in lat
    full = solve_congruence_kernel(CongruenceSystem([[0, 0]], [30]))
    assert full.basis == ((1, 0), (0, 1))
    assert (2, 1) in solve_congruence_kernel(CongruenceSystem([[24, 12]], [30]))


def _span_mod(lat, moduli):
    # closure of the basis under addition, reduced per coordinate
    seen = {tuple(0 for _ in moduli)}
    frontier = list(seen)
    gens = [tuple(x % m for x, m in zip(b, moduli)) for b in lat.basis]
    while frontier:
        v = frontier.pop()
        for g in gens:
            w = tuple((a + b) % m for a, b, m in zip(v, g, moduli))
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return seen


def test_kernel_completeness_random():
    rng = random.Random(11)
    done = 0
    while done < 60:
        n = rng.randint(1, 3)
        t = rng.randint(1, 2)
        moduli = [rng.randint(1, 36) for _ in range(t)]
        box = math.lcm(*moduli)
        if box**n > 50000:
            continue
        done += 1
        L = [[rng.randint(-40, 40) for _ in range(n)] for _ in range(t)]
        system = CongruenceSystem(L, moduli)
        lat = solve_congruence_kernel(system)
        brute = {v for v in itertools.product(range(box), repeat=n) if system.satisfied_by(v)}
        assert _span_mod(lat, [box] * n) == brute
        assert all(system.satisfied_by(b) for b in lat.basis)


def test_kernel_exact_rows():
    # modulus 0 means the row must vanish exactly
    lat = solve_congruence_kernel(CongruenceSystem([[1, -1, 0], [0, 0, 1]], [0, 2]))
    assert (1, 1, 0) in lat and (0, 0, 2) in lat
    assert (0, 0, 1) not in lat and (1, 0, 0) not in lat


def test_enumerate_examples():
    lat = KernelLattice(((2, 1),), 2)
    assert list(enumerate_kernel_vectors(lat, 2)) == [(2, 1), (-2, -1), (4, 2), (-4, -2)]
    assert list(enumerate_kernel_vectors(KernelLattice((), 2), 3)) == []
    lat = KernelLattice(((5, 0), (0, 3)), 2)
    got = list(enumerate_kernel_vectors(lat, 1, moduli=(30, 30)))
    assert got == [(5, 0), (25, 0), (0, 3), (0, 27), (5, 3), (25, 27), (5, 27), (25, 3)]


def test_enumerate_rejects_bad_bound():
    with pytest.raises(DomainError):
        list(enumerate_kernel_vectors(KernelLattice(((1,),), 1), 0))


def test_enumerate_covers_the_coefficient_box():
    lat = KernelLattice(((1, 2, 0), (0, 1, 3)), 3)
    got = set(enumerate_kernel_vectors(lat, 2))
    want = {tuple(a * x + b * y for x, y in zip(*lat.basis))
            for a in range(-2, 3) for b in range(-2, 3)} - {(0, 0, 0)}
    assert got == want
