"""Key generation, encryption and decryption.

The private key is a diagonal group ``T`` with a planted monomial invariant
``f = x^e`` and a transition matrix ``P``; the public key is the conjugated
group ``P T P^-1`` plus a message set ``S`` on which ``f(P^-1 .)`` takes
pairwise distinct values. Encryption multiplies a message vector by a random
word in the public generators; decryption evaluates ``f`` at ``P^-1 u``.

Seeds make runs reproducible. Real deployments would draw every choice from a
cryptographically secure generator instead of ``random.Random``.
"""
from __future__ import annotations

import random
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import linalg
from .errors import (DomainError, EvaluationError, InvalidCiphertextError, NotFoundError,
                     ParameterError)
from .intlin import CongruenceSystem, is_prime, solve_congruence_kernel
from .invariants import (DiagGroup, check_message_set, evaluate_monomial,
                         find_separating_invariant, monomial_is_invariant)
from .rings import (ExtField, PrimeField, QuadField, ResidueRing, encode_int,
                    ff_element_of_order)

SCHEMES = ("ff-cyclic", "ff-noncyclic", "number-ring", "finite-ring")


def _freeze_matrix(M):
    return tuple(tuple(row) for row in M)


@dataclass(frozen=True)
class PublicKey:
    scheme: str
    ctx: object
    n: int
    generators: tuple
    S: tuple

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(_freeze_matrix(g) for g in self.generators))
        object.__setattr__(self, "S", tuple(tuple(v) for v in self.S))

    @property
    def message_count(self) -> int:
        return len(self.S)


@dataclass(frozen=True)
class PrivateKey:
    """Transition matrix, planted exponents and the decryption table.

    ``table[i]`` is ``f(P^-1 S[i])``; ``diagonal`` holds the diagonal
    generators ``t_i`` with ``P t_i P^-1`` the public ones.
    """

    ctx: object
    P: tuple
    P_inv: tuple
    exponents: tuple
    diagonal: tuple
    table: tuple

    def __post_init__(self):
        object.__setattr__(self, "P", _freeze_matrix(self.P))
        object.__setattr__(self, "P_inv", _freeze_matrix(self.P_inv))
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))
        object.__setattr__(self, "diagonal", tuple(tuple(g) for g in self.diagonal))
        object.__setattr__(self, "table", tuple(self.table))

    def group(self) -> DiagGroup:
        return DiagGroup(self.ctx, self.diagonal)


@dataclass(frozen=True)
class KeyPair:
    public: PublicKey
    private: PrivateKey


@dataclass(frozen=True)
class Ciphertext:
    u: tuple

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(self.u))


def _assemble(scheme, ctx, diagonal, exponents, W, P) -> KeyPair:
    """Conjugate the diagonal data by ``P`` and build both halves of the key."""
    n = len(W[0])
    G = DiagGroup(ctx, diagonal)
    if not monomial_is_invariant(G, exponents):
        raise DomainError("planted monomial is not invariant")  # construction bug guard
    table = [evaluate_monomial(ctx, exponents, w) for w in W]
    if len(set(table)) != len(table):
        raise DomainError("planted invariant does not separate the message set")
    P = linalg.identity(ctx, n) if P is None else [list(row) for row in P]
    P_inv = linalg.mat_inv(ctx, P)
    gens = [linalg.conjugate(ctx, P, linalg.diag(ctx, list(g)), P_inv) for g in diagonal]
    S = [linalg.mat_vec(ctx, P, list(w)) for w in W]
    public = PublicKey(scheme, ctx, n, gens, S)
    private = PrivateKey(ctx, P, P_inv, exponents, diagonal, table)
    return KeyPair(public, private)


def _transition(ctx, n, P, conjugate, rng):
    if P is not None:
        return P
    if conjugate:
        return linalg.random_unimodular(ctx, n, rng)
    return None


def _ff_context(p, r, rng):
    return PrimeField(p) if r == 1 else ExtField(p, r, rng=rng)


def keygen_ff_cyclic(p: int, s: int, b: int, message_count: int, r: int = 1, P=None,
                     conjugate: bool = False, rng: Optional[random.Random] = None) -> KeyPair:
    """Cyclic group ``<diag(alpha, alpha^b)>`` with ``alpha`` of prime order ``s``.

    Messages are ``(1, alpha^i)``; the planted invariant is ``x1^{-b mod s} x2``.
    With no ``rng`` the smallest suitable ``alpha`` is used.
    """
    ctx = _ff_context(p, r, rng)
    if not is_prime(s):
        raise ParameterError(f"s={s} must be prime")
    if (ctx.q - 1) % s:
        raise ParameterError(f"s={s} does not divide q - 1 = {ctx.q - 1}")
    if b % s == 0:
        raise ParameterError(f"s={s} divides b={b}")
    if not 2 <= message_count <= s:
        raise ParameterError(f"message count must lie in [2, s={s}]")
    alpha = ff_element_of_order(ctx, s, rng)
    beta = ctx.pow(alpha, b)
    W = [(ctx.one, ctx.pow(alpha, i)) for i in range(message_count)]
    exponents = ((-b) % s, 1)
    P = _transition(ctx, 2, P, conjugate, rng or random.Random(0))
    return _assemble("ff-cyclic", ctx, [(alpha, beta)], exponents, W, P)


def keygen_ff_noncyclic(p: int, s1: int, s2: int, b1: int, b2: int, message_count: int,
                        r: int = 1, P=None, conjugate: bool = False, coeff_bound: int = 3,
                        rng: Optional[random.Random] = None) -> KeyPair:
    """Two generators ``diag(alpha_k, alpha_k^{b_k})`` of coprime prime orders.

    Messages are ``(1, (alpha_1 alpha_2)^i)``. The planted invariant is the
    first separating vector of the kernel of ``d1 + b_k d2 = 0 (mod s_k)``.
    """
    ctx = _ff_context(p, r, rng)
    if s1 == s2:
        raise ParameterError("s1 and s2 must differ")
    for s, b in ((s1, b1), (s2, b2)):
        if not is_prime(s):
            raise ParameterError(f"s={s} must be prime")
        if (ctx.q - 1) % s:
            raise ParameterError(f"s={s} does not divide q - 1 = {ctx.q - 1}")
        if b % s == 0:
            raise ParameterError(f"s={s} divides b={b}")
    if not 2 <= message_count <= s1 * s2:
        raise ParameterError(f"message count must lie in [2, s1*s2={s1 * s2}]")
    a1 = ff_element_of_order(ctx, s1, rng)
    a2 = ff_element_of_order(ctx, s2, rng)
    gens = [(a1, ctx.pow(a1, b1)), (a2, ctx.pow(a2, b2))]
    base = ctx.mul(a1, a2)
    W = [(ctx.one, ctx.pow(base, i)) for i in range(message_count)]
    system = CongruenceSystem([[1, b1], [1, b2]], [s1, s2])
    lat = solve_congruence_kernel(system, 2, ambient_moduli=(s1 * s2, s1 * s2))
    exponents = find_separating_invariant(ctx, lat, W, coeff_bound)
    P = _transition(ctx, 2, P, conjugate, rng or random.Random(0))
    return _assemble("ff-noncyclic", ctx, gens, exponents, W, P)


def _check_exponents(e, n):
    e = [int(x) for x in e]
    if len(e) != n:
        raise ParameterError(f"need {n} secret exponents, got {len(e)}")
    if any(x == 0 for x in e):
        raise ParameterError("secret exponents must all be nonzero")
    if any(x < 0 for x in e):
        raise ParameterError("secret exponents must be positive")
    if e[-1] != 1:
        raise ParameterError("the last secret exponent must equal 1")
    if sum(e) < n:
        raise ParameterError("sum of secret exponents must be at least n")
    return e


def _closing_entry(ctx, entries, e):
    # a_n = prod_j a_j^{-e_j} makes x^e invariant because e_n = 1
    last = ctx.one
    for a, k in zip(entries, e):
        last = ctx.mul(last, ctx.pow(a, -k))
    return last


def _sample_messages(ctx, e, count, draw, attempts=10000):
    W, values = [], set()
    for _ in range(attempts):
        if len(W) == count:
            return W
        w = tuple(draw() for _ in e)
        v = evaluate_monomial(ctx, e, w)
        if v not in values:
            values.add(v)
            W.append(w)
    if len(W) == count:
        return W
    raise NotFoundError(f"could not sample {count} messages with distinct invariant values")


def _warn_if_identity(ctx, P, n):
    if P is None or [list(r) for r in P] == linalg.identity(ctx, n):
        warnings.warn("transition matrix is the identity; the public group is diagonal", stacklevel=3)


def keygen_number_ring(d: Optional[int], S_m: Sequence, Q: Sequence[int], n: int,
                       e: Sequence[int], gen_count: int, message_count: int, P=None,
                       conjugate: bool = True, rng: Optional[random.Random] = None) -> KeyPair:
    """Diagonal generators over ``Q(sqrt d)`` (``d=None`` for Q).

    Entry ``j < n`` of generator ``i`` is ``prod_k p_k^{b_kj}`` with ``p_k`` from
    ``S_m`` and ``b_kj`` from ``Q``; the last entry closes the invariant.
    """
    rng = rng or random.Random()
    ctx = QuadField(d)
    e = _check_exponents(e, n)
    if n < 2:
        raise ParameterError("n must be at least 2")
    primes = [x if isinstance(x, tuple) else ctx.from_int(x) for x in S_m]
    if not primes:
        raise ParameterError("S_m must be nonempty")
    for x in primes:
        if not ctx.is_integral(x) or x == ctx.zero:
            raise ParameterError("S_m entries must be nonzero ring elements")
    Q = [int(x) for x in Q]
    if not Q:
        raise ParameterError("Q must be nonempty")
    if gen_count < 1:
        raise ParameterError("need at least one generator")
    diagonal = []
    for _ in range(gen_count):
        for _ in range(100):
            entries = [ctx.prod(ctx.pow(pk, rng.choice(Q)) for pk in primes) for _ in range(n - 1)]
            if any(a != ctx.one for a in entries):
                break
        entries.append(_closing_entry(ctx, entries, e))
        diagonal.append(tuple(entries))
    W = _sample_messages(ctx, e, message_count, lambda: ctx.from_int(rng.randint(1, 9)))
    P = _transition(ctx, n, P, conjugate, rng)
    _warn_if_identity(ctx, P, n)
    return _assemble("number-ring", ctx, diagonal, e, W, P)


def keygen_finite_ring(m: int, e: Sequence[int], gens, message_count: int,
                       d: Optional[int] = None, messages=None, P=None, conjugate: bool = True,
                       rng: Optional[random.Random] = None) -> KeyPair:
    """Diagonal generators of units of ``Z/(m)`` or ``Z[sqrt d]/(m)``.

    ``gens`` is either a count (random unit entries) or a list giving the
    first ``n-1`` diagonal entries of each generator; the last entry closes
    the invariant. ``messages`` optionally fixes the message vectors.
    """
    rng = rng or random.Random()
    ctx = ResidueRing(m, d)
    n = len(e)
    e = _check_exponents(e, n)
    if n < 2:
        raise ParameterError("n must be at least 2")
    if isinstance(gens, int):
        if gens < 1:
            raise ParameterError("need at least one generator")
        specs = [[ctx.random_unit(rng) for _ in range(n - 1)] for _ in range(gens)]
    else:
        specs = [[_residue(ctx, a) for a in g] for g in gens]
    diagonal = []
    for spec in specs:
        if len(spec) not in (n - 1, n):
            raise ParameterError(f"generator spec needs {n - 1} entries")
        for a in spec:
            if not ctx.is_unit(a):
                raise DomainError(f"entry {ctx.fmt(a)} is not a unit modulo {m}")
        entries = list(spec[: n - 1]) + [_closing_entry(ctx, spec[: n - 1], e)]
        if len(spec) == n and spec[-1] != entries[-1]:
            raise DomainError("last generator entry does not close the invariant")
        diagonal.append(tuple(entries))
    if messages is not None:
        W = [tuple(_residue(ctx, a) for a in v) for v in messages]
        check_message_set(W)
    else:
        W = _sample_messages(ctx, e, message_count, lambda: ctx.random_unit(rng))
    if P is not None:
        P = [[_residue(ctx, a) for a in row] for row in P]
    P = _transition(ctx, n, P, conjugate, rng)
    _warn_if_identity(ctx, P, n)
    return _assemble("finite-ring", ctx, diagonal, e, W, P)


def _residue(ctx, a):
    if isinstance(a, (tuple, list)):
        return ctx(*a)
    return ctx(a)


# -- encryption ---------------------------------------------------------------

def random_word(m: int, length: int, rng: random.Random) -> list[int]:
    """Generator indices: each of the ``m`` generators once, plus random extras."""
    if length < m:
        raise ParameterError(f"word length {length} is shorter than the generator count {m}")
    word = list(range(m)) + [rng.randrange(m) for _ in range(length - m)]
    rng.shuffle(word)
    return word


def encrypt(pk: PublicKey, index: int, word_length: Optional[int] = None,
            rng: Optional[random.Random] = None, word: Optional[Sequence[int]] = None) -> Ciphertext:
    """``u = h v_index`` for a random word ``h`` in the public generators."""
    if not 0 <= index < len(pk.S):
        raise ParameterError(f"message index {index} out of range [0, {len(pk.S)})")
    m = len(pk.generators)
    if word is None:
        rng = rng or random.Random()
        word = random_word(m, 2 * m if word_length is None else word_length, rng)
    ctx = pk.ctx
    u = list(pk.S[index])
    for k in word:
        u = linalg.mat_vec(ctx, pk.generators[k], u)
    return Ciphertext(u)


def decrypt(sk: PrivateKey, ct: Ciphertext) -> int:
    ctx = sk.ctx
    if len(ct.u) != len(sk.P):
        raise InvalidCiphertextError("ciphertext dimension does not match the key")
    y = linalg.mat_vec(ctx, sk.P_inv, list(ct.u))
    try:
        value = evaluate_monomial(ctx, sk.exponents, y)
    except EvaluationError as exc:
        raise InvalidCiphertextError(str(exc)) from exc
    for i, t in enumerate(sk.table):
        if t == value:
            return i
    raise InvalidCiphertextError("ciphertext matches no message")


# -- sizes and block encoding --------------------------------------------------

def element_bits(ctx) -> int:
    """Bits per ring element, ``ceil(log2 |R|)``."""
    q = ctx.cardinality
    if q is None:
        raise ParameterError("infinite rings have no fixed element size")
    return (q - 1).bit_length()


def block_bits(r: int) -> int:
    """Plaintext bits carried by one message index, ``floor(log2 r)``."""
    if r < 2:
        raise ParameterError("need at least two messages")
    return r.bit_length() - 1


def expansion_ratio_raw(n: int, q: int, r: int) -> Fraction:
    return Fraction(n * (q - 1).bit_length(), block_bits(r))


def expansion_ratio(pk: PublicKey) -> Fraction:
    """Ciphertext bits per plaintext bit under block encoding."""
    return Fraction(pk.n * element_bits(pk.ctx), block_bits(len(pk.S)))


def encode_blocks(data: bytes, r: int) -> list[int]:
    """Split ``data`` (MSB first) into ``floor(log2 r)``-bit message indices."""
    k = block_bits(r)
    total = 8 * len(data)
    value = int.from_bytes(data, "big")
    count = -(-total // k)
    value <<= count * k - total
    return [(value >> (k * (count - 1 - i))) & ((1 << k) - 1) for i in range(count)]


def decode_blocks(indices: Sequence[int], r: int, length: int) -> bytes:
    k = block_bits(r)
    value = 0
    for x in indices:
        if not 0 <= x < (1 << k):
            raise InvalidCiphertextError(f"block index {x} does not fit in {k} bits")
        value = (value << k) | x
    value >>= len(indices) * k - 8 * length
    return value.to_bytes(length, "big")


def pack_ciphertexts(pk: PublicKey, cts: Sequence[Ciphertext]) -> tuple[int, int]:
    """Fixed-width packing of ciphertexts; returns ``(value, bit_length)``."""
    width = element_bits(pk.ctx)
    value, bits = 0, 0
    for ct in cts:
        for x in ct.u:
            value = (value << width) | encode_int(pk.ctx, x)
            bits += width
    return value, bits
