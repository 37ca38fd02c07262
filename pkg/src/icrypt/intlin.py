"""Integer linear algebra and elementary number theory.

Everything here works on plain Python ints and lists of lists; no ring
context is involved. The congruence-kernel solver is the engine behind every
monomial-invariant computation in the package.
"""
from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .errors import DomainError

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_TRIAL_LIMIT = 10**6
_SMALL_PRIMES = [p for p in range(2, 1000) if all(p % k for k in range(2, int(p**0.5) + 1))]


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``g = gcd(a, b) > 0`` and ``a*x + b*y == g``."""
    if a == 0 and b == 0:
        raise DomainError("ext_gcd(0, 0) is undefined")
    x0, y0, x1, y1 = 1, 0, 0, 1
    r0, r1 = a, b
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if r0 < 0:
        r0, x0, y0 = -r0, -x0, -y0
    return r0, x0, y0


def crt(residues: Sequence[int], moduli: Sequence[int]) -> tuple[int, int]:
    """Combine ``x = r_i (mod m_i)`` into ``(x, lcm)``.

    Moduli need not be coprime; inconsistent systems raise ``DomainError``.
    """
    x, m = 0, 1
    for r, mi in zip(residues, moduli):
        g, p, _ = ext_gcd(m, mi)
        if (r - x) % g:
            raise DomainError(f"inconsistent congruences modulo {m} and {mi}")
        lcm = m // g * mi
        x = (x + (r - x) // g * p % (mi // g) * m) % lcm
        m = lcm
    return x, m


def is_prime(n: int) -> bool:
    """Miller-Rabin; deterministic below 3.3e24, probabilistic above."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:25]:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    bases = list(_MR_BASES)
    if n >= 3_317_044_064_679_887_385_961_981:
        rng = random.Random(n)
        bases += [rng.randrange(2, n - 1) for _ in range(16)]
    for a in bases:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    # Brent's cycle detection with batched gcds; may return n on failure.
    y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
    g = r = q = 1
    x = ys = 0
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        r *= 2
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g


def _split(n: int, out: list[int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out.append(n)
        return
    rng = random.Random(n)
    while True:
        d = _pollard_brent(n, rng)
        if 1 < d < n:
            break
    _split(d, out)
    _split(n // d, out)


def factorize(n: int) -> list[int]:
    """Prime factors of ``n`` with multiplicity, ascending.

    Trial division handles everything below one million; larger cofactors go
    to Pollard rho (Brent variant), retried with fresh seeds until it splits.
    """
    if n < 1:
        raise DomainError("factorize expects n >= 1")
    out: list[int] = []
    if n < _TRIAL_LIMIT:
        p = 2
        while p * p <= n:
            while n % p == 0:
                out.append(p)
                n //= p
            p += 1 if p == 2 else 2
        if n > 1:
            out.append(n)
        return out
    for p in _SMALL_PRIMES:
        while n % p == 0:
            out.append(p)
            n //= p
    _split(n, out)
    return sorted(out)


def factor_counts(n: int) -> Counter:
    return Counter(factorize(n))


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, k in factor_counts(n).items():
        divs = [d * p**e for d in divs for e in range(k + 1)]
    return sorted(divs)


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def int_mat_mul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def int_det(A) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    M = [list(r) for r in A]
    n = len(M)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def smith_normal_form(A):
    """Return ``(U, D, V)`` with ``U @ A @ V == D`` and ``U``, ``V`` unimodular.

    ``D`` is diagonal (rectangular shape of ``A``) with nonnegative entries
    forming a divisibility chain.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    D = [list(r) for r in A]
    U = identity(m)
    V = identity(n)

    def add_row(src, dst, k):
        # row[dst] -= k * row[src]
        if k:
            D[dst] = [a - k * b for a, b in zip(D[dst], D[src])]
            U[dst] = [a - k * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, k):
        if k:
            for M in (D, V):
                for row in M:
                    row[dst] -= k * row[src]

    def swap_cols(i, j):
        for M in (D, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    v = D[i][j]
                    if v and (best is None or abs(v) < abs(D[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return U, D, V
            i, j = best
            D[t], D[i] = D[i], D[t]
            U[t], U[i] = U[i], U[t]
            swap_cols(t, j)
            p = D[t][t]
            clean = True
            for i in range(t + 1, m):
                add_row(t, i, D[i][t] // p)
                clean &= D[i][t] == 0
            for j in range(t + 1, n):
                add_col(t, j, D[t][j] // p)
                clean &= D[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p), None)
            if bad is not None:
                add_row(bad, t, -1)
                continue
            break
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
    return U, D, V


def hermite_normal_form(rows, ncols: Optional[int] = None) -> list[list[int]]:
    """Row-style HNF of the lattice spanned by ``rows``; zero rows dropped.

    Pivots are positive and entries above each pivot lie in ``[0, pivot)``,
    so the result is a canonical basis of the row lattice.
    """
    A = [list(r) for r in rows if any(r)]
    if ncols is None:
        ncols = len(A[0]) if A else 0
    r = 0
    for c in range(ncols):
        if r >= len(A):
            break
        nz = next((i for i in range(r, len(A)) if A[i][c]), None)
        if nz is None:
            continue
        A[r], A[nz] = A[nz], A[r]
        for i in range(r + 1, len(A)):
            if A[i][c] == 0:
                continue
            a, b = A[r][c], A[i][c]
            g, x, y = ext_gcd(a, b)
            ra, rb = A[r], A[i]
            A[r] = [x * u + y * v for u, v in zip(ra, rb)]
            A[i] = [(a // g) * v - (b // g) * u for u, v in zip(ra, rb)]
        if A[r][c] < 0:
            A[r] = [-u for u in A[r]]
        p = A[r][c]
        for k in range(r):
            q = A[k][c] // p
            if q:
                A[k] = [u - q * v for u, v in zip(A[k], A[r])]
        r += 1
    return [row for row in A if any(row)]


@dataclass(frozen=True)
class CongruenceSystem:
    """Rows ``L[i] . d = 0 (mod moduli[i])``; a modulus of 0 means exact equality."""

    matrix: tuple
    moduli: tuple

    def __init__(self, matrix, moduli):
        matrix = tuple(tuple(int(x) for x in row) for row in matrix)
        moduli = tuple(int(m) for m in moduli)
        if len(matrix) != len(moduli):
            raise DomainError("one modulus per row is required")
        if any(m < 0 for m in moduli):
            raise DomainError("moduli must be nonnegative")
        if matrix and len({len(r) for r in matrix}) != 1:
            raise DomainError("ragged congruence matrix")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "moduli", moduli)

    @property
    def n(self) -> int:
        return len(self.matrix[0]) if self.matrix else 0

    def satisfied_by(self, d) -> bool:
        for row, m in zip(self.matrix, self.moduli):
            s = sum(a * x for a, x in zip(row, d))
            if (s % m if m else s) != 0:
                return False
        return True


@dataclass(frozen=True)
class KernelLattice:
    """Integer lattice given by an HNF basis.

    ``ambient_moduli`` are per-coordinate moduli used to normalize exponent
    vectors (typically the exponent of the group acting on that coordinate).
    """

    basis: tuple
    n: int
    ambient_moduli: Optional[tuple] = field(default=None)

    def __contains__(self, v) -> bool:
        v = list(v)
        for row in self.basis:
            c = next(i for i, x in enumerate(row) if x)
            if v[c] % row[c]:
                return False
            k = v[c] // row[c]
            v = [a - k * b for a, b in zip(v, row)]
        return not any(v)

    @property
    def rank(self) -> int:
        return len(self.basis)


def full_lattice(n: int, ambient_moduli=None) -> KernelLattice:
    return KernelLattice(tuple(tuple(r) for r in identity(n)), n, ambient_moduli)


def solve_congruence_kernel(system: CongruenceSystem, n: Optional[int] = None,
                            ambient_moduli=None) -> KernelLattice:
    """Basis of ``{d in Z^n : L d = 0 (mod moduli)}``.

    Each row gets a slack variable, ``L d + diag(moduli) k = 0``; the integer
    kernel of that augmented matrix is read off its Smith form and projected
    back onto the first ``n`` coordinates.
    """
    n = system.n if n is None else n
    if ambient_moduli is not None:
        ambient_moduli = tuple(ambient_moduli)
    t = len(system.matrix)
    if t == 0:
        return full_lattice(n, ambient_moduli)
    aug = [list(row) + [system.moduli[i] if j == i else 0 for j in range(t)]
           for i, row in enumerate(system.matrix)]
    _, D, V = smith_normal_form(aug)
    rank = sum(1 for i in range(min(len(D), len(D[0]))) if D[i][i])
    gens = [[V[i][j] for i in range(n)] for j in range(rank, n + t)]
    basis = hermite_normal_form(gens, n)
    return KernelLattice(tuple(tuple(r) for r in basis), n, ambient_moduli)


def _coefficient_order(k: int, bound: int) -> Iterator[tuple]:
    # Per sup-norm level: fewest nonzeros first, then descending lexicographic;
    # only representatives whose first nonzero entry is positive.
    for level in range(1, bound + 1):
        vals = range(level, -level - 1, -1)
        reps = [c for c in itertools.product(vals, repeat=k)
                if max(map(abs, c)) == level and next(x for x in c if x) > 0]
        reps.sort(key=lambda c: sum(1 for x in c if x))
        yield from reps


def enumerate_kernel_vectors(lat: KernelLattice, coeff_bound: int = 3,
                             moduli: Optional[Sequence[int]] = None) -> Iterator[tuple]:
    """Yield nonzero lattice vectors with coefficients in ``[-bound, bound]``.

    Each coefficient vector ``c`` is followed by ``-c``. With ``moduli`` every
    coordinate is reduced to ``[0, modulus)``; duplicates and vectors that
    reduce to zero are skipped.
    """
    if coeff_bound < 1:
        raise DomainError("coeff_bound must be >= 1")
    if not lat.basis:
        return
    seen = set()
    for c in _coefficient_order(len(lat.basis), coeff_bound):
        for sign in (1, -1):
            v = [sum(sign * ci * row[j] for ci, row in zip(c, lat.basis)) for j in range(lat.n)]
            if moduli is not None:
                v = [x % m if m else x for x, m in zip(v, moduli)]
            v = tuple(v)
            if not any(v) or v in seen:
                continue
            seen.add(v)
            yield v
