"""Exact arithmetic contexts.

A context owns the arithmetic; elements are plain immutable values:

* ``PrimeField(p)``: ints in ``[0, p)``.
* ``ExtField(p, r)``: ints in ``[0, p**r)`` whose base-``p`` digits are the
  coefficients (lowest first) of a polynomial modulo an irreducible modulus.
* ``QuadField(d)``: pairs ``(a, b)`` of ``Fraction`` meaning ``a + b*sqrt(d)``;
  ``d=None`` is the rational field itself (``b`` is always 0).
* ``ResidueRing(m, d=None)``: ints mod ``m``, or pairs ``(a, b)`` mod ``m``
  for ``Z[sqrt(d)]/(m)``.

All contexts share one duck-typed interface (``add``, ``mul``, ``inv``,
``pow``, ``is_unit``, ``to_json`` ...), which is what the matrix and
invariant code is written against.
"""
from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Iterator, Optional

from .errors import DomainError, ParameterError, UnsupportedRingError
from .intlin import factor_counts, factorize, is_prime

MAX_EXT_DEGREE = 8


class Ring:
    is_field = False
    is_finite = False

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return a == self.zero

    def pow(self, a, k: int):
        if k < 0:
            a, k = self.inv(a), -k
        result, base = self.one, a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def prod(self, items):
        out = self.one
        for x in items:
            out = self.mul(out, x)
        return out

    def random_unit(self, rng: random.Random):
        while True:
            a = self.random(rng)
            if self.is_unit(a):
                return a

    @property
    def cardinality(self) -> Optional[int]:
        return None

    def __eq__(self, other):
        return type(self) is type(other) and self.descriptor() == other.descriptor()

    def __hash__(self):
        return hash(tuple(sorted(self.descriptor().items())))


class PrimeField(Ring):
    kind = "prime-field"
    is_field = True
    is_finite = True

    def __init__(self, p: int):
        if not is_prime(p):
            raise ParameterError(f"{p} is not prime")
        self.p = p
        self.q = p
        self.zero, self.one = 0, 1

    def __repr__(self):
        return f"GF({self.p})"

    @property
    def cardinality(self):
        return self.p

    def __call__(self, a):
        return a % self.p

    from_int = __call__

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise DomainError("0 is not invertible")
        return pow(a, -1, self.p)

    def pow(self, a, k):
        if k < 0:
            return pow(self.inv(a), -k, self.p)
        return pow(a, k, self.p)

    def is_unit(self, a):
        return a % self.p != 0

    def elements(self) -> Iterator[int]:
        return iter(range(self.p))

    def random(self, rng):
        return rng.randrange(self.p)

    def random_unit(self, rng):
        return rng.randrange(1, self.p)

    def descriptor(self):
        return {"kind": self.kind, "p": str(self.p)}

    def to_json(self, a):
        return str(a)

    def from_json(self, s):
        return _parse_residue(s, self.p)

    def fmt(self, a):
        return str(a)


def _parse_residue(s, m):
    v = int(s)
    if not 0 <= v < m:
        raise DomainError(f"element {v} out of range [0, {m})")
    return v


# -- polynomials over GF(p) as coefficient lists, lowest degree first --------

def _gf_trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _gf_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _gf_trim(out)


def _gf_divmod(a, b, p):
    a = list(a)
    inv_lead = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(_gf_trim(a)) >= len(b):
        k = len(a) - len(b)
        c = a[-1] * inv_lead % p
        q[k] = c
        for i, y in enumerate(b):
            a[i + k] = (a[i + k] - c * y) % p
    return _gf_trim(q), a


def _gf_gcd(a, b, p):
    a, b = _gf_trim(list(a)), _gf_trim(list(b))
    while b:
        a, b = b, _gf_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def _gf_powmod(base, e, mod, p):
    result, base = [1], _gf_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _gf_divmod(_gf_mul(result, base, p), mod, p)[1]
        base = _gf_divmod(_gf_mul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def gf_poly_is_irreducible(f, p) -> bool:
    """Rabin's test for a monic polynomial over GF(p)."""
    r = len(f) - 1
    if r < 1:
        return False
    x = [0, 1]

    def frob(k):
        # x^(p^k) - x  mod f
        h = _gf_powmod(x, p**k, f, p)
        h = h + [0] * (2 - len(h))
        h[1] = (h[1] - 1) % p
        return _gf_trim(h)

    if frob(r):
        return False
    for ell in factor_counts(r):
        if len(_gf_gcd(f, frob(r // ell), p)) > 1:
            return False
    return True


class ExtField(Ring):
    """GF(p^r) as GF(p)[x]/(modulus)."""

    kind = "ext-field"
    is_field = True
    is_finite = True

    def __init__(self, p: int, r: int, modulus=None, rng: Optional[random.Random] = None,
                 max_degree: int = MAX_EXT_DEGREE):
        if not is_prime(p):
            raise ParameterError(f"{p} is not prime")
        if not 1 <= r <= max_degree:
            raise ParameterError(f"extension degree must lie in [1, {max_degree}]")
        self.p, self.r, self.q = p, r, p**r
        if modulus is None:
            modulus = self._find_modulus(rng)
        modulus = [int(c) % p for c in modulus]
        if len(modulus) != r + 1 or modulus[-1] != 1:
            raise ParameterError("modulus must be monic of degree r")
        if not gf_poly_is_irreducible(modulus, p):
            raise ParameterError(f"modulus {modulus} is reducible over GF({p})")
        self.modulus = modulus
        self.zero, self.one = 0, 1

    def _find_modulus(self, rng):
        # random search (or ascending scan without an rng) over monic polys
        if rng is None:
            for code in range(self.p**self.r):
                f = self._digits(code) + [1]
                if gf_poly_is_irreducible(f, self.p):
                    return f
        while True:
            f = [rng.randrange(self.p) for _ in range(self.r)] + [1]
            if gf_poly_is_irreducible(f, self.p):
                return f

    def __repr__(self):
        return f"GF({self.p}^{self.r})"

    @property
    def cardinality(self):
        return self.q

    def _digits(self, a):
        out = []
        for _ in range(self.r):
            a, d = divmod(a, self.p)
            out.append(d)
        return out

    def _pack(self, coeffs):
        v = 0
        for c in reversed(coeffs[: self.r]):
            v = v * self.p + c
        return v

    def from_int(self, k):
        return k % self.p

    def from_coeffs(self, coeffs):
        return self._pack([c % self.p for c in coeffs] + [0] * (self.r - len(coeffs)))

    def add(self, a, b):
        return self._pack([(x + y) % self.p for x, y in zip(self._digits(a), self._digits(b))])

    def sub(self, a, b):
        return self._pack([(x - y) % self.p for x, y in zip(self._digits(a), self._digits(b))])

    def neg(self, a):
        return self._pack([-x % self.p for x in self._digits(a)])

    def mul(self, a, b):
        prod = _gf_mul(_gf_trim(self._digits(a)), _gf_trim(self._digits(b)), self.p)
        rem = _gf_divmod(prod, self.modulus, self.p)[1] if prod else []
        return self._pack(rem + [0] * (self.r - len(rem)))

    def inv(self, a):
        if a == 0:
            raise DomainError("0 is not invertible")
        return Ring.pow(self, a, self.q - 2)

    def pow(self, a, k):
        if k < 0:
            a, k = self.inv(a), -k
        if a != 0:
            k %= self.q - 1
            if k == 0:
                return 1
        return Ring.pow(self, a, k)

    def is_unit(self, a):
        return a != 0

    def elements(self):
        return iter(range(self.q))

    def random(self, rng):
        return rng.randrange(self.q)

    def random_unit(self, rng):
        return rng.randrange(1, self.q)

    def descriptor(self):
        return {"kind": self.kind, "p": str(self.p), "r": self.r,
                "modulusPoly": [str(c) for c in self.modulus]}

    def to_json(self, a):
        return str(a)

    def from_json(self, s):
        return _parse_residue(s, self.q)

    def fmt(self, a):
        return str(a)


def _squarefree(d: int) -> bool:
    return all(k == 1 for k in factor_counts(abs(d)).values())


class QuadField(Ring):
    """The field Q(sqrt(d)); its integral elements form Z[sqrt(d)].

    ``d=None`` gives Q with integers Z, so one context type covers every
    number-ring scheme.
    """

    kind = "quadratic"
    is_field = True

    def __init__(self, d: Optional[int] = None):
        if d is not None:
            d = int(d)
            if d in (0, 1) or not _squarefree(d):
                raise ParameterError(f"d={d} must be square-free and not 0 or 1")
        self.d = d
        self.zero = (Fraction(0), Fraction(0))
        self.one = (Fraction(1), Fraction(0))

    def __repr__(self):
        return "Q" if self.d is None else f"Q(sqrt({self.d}))"

    def __call__(self, a, b=0, den=1):
        if self.d is None and b:
            raise DomainError("rational field has no sqrt(d) component")
        return (Fraction(a, den), Fraction(b, den))

    def from_int(self, k):
        return (Fraction(k), Fraction(0))

    def add(self, x, y):
        return (x[0] + y[0], x[1] + y[1])

    def sub(self, x, y):
        return (x[0] - y[0], x[1] - y[1])

    def neg(self, x):
        return (-x[0], -x[1])

    def mul(self, x, y):
        a, b = x
        c, e = y
        if self.d is None:
            return (a * c, Fraction(0))
        return (a * c + self.d * b * e, a * e + b * c)

    def norm(self, x) -> Fraction:
        return x[0] * x[0] - (self.d or 0) * x[1] * x[1]

    def conj(self, x):
        return (x[0], -x[1])

    def inv(self, x):
        n = self.norm(x)
        if n == 0:
            raise DomainError("0 is not invertible")
        return (x[0] / n, -x[1] / n)

    def is_unit(self, x):
        return x != self.zero

    def random(self, rng, bound=5):
        b = 0 if self.d is None else rng.randint(-bound, bound)
        return (Fraction(rng.randint(-bound, bound)), Fraction(b))

    def random_unit(self, rng, bound=5):
        while True:
            x = self.random(rng, bound)
            if x != self.zero:
                return x

    # -- integral structure ---------------------------------------------

    def is_integral(self, x) -> bool:
        return x[0].denominator == 1 and x[1].denominator == 1

    def denominator(self, x) -> int:
        return math.lcm(x[0].denominator, x[1].denominator)

    @property
    def is_euclidean(self) -> bool:
        return self.d in (None, -1)

    def _require_euclidean(self):
        if not self.is_euclidean:
            raise UnsupportedRingError(f"unsupported ring: non-Euclidean Z[sqrt({self.d})]")

    def ring_divmod(self, x, y):
        """Euclidean division in Z or Z[i] with a rounded quotient."""
        self._require_euclidean()
        if y == self.zero:
            raise DomainError("division by zero")
        t = self.div(x, y)
        q = (Fraction(_round_half(t[0])), Fraction(_round_half(t[1])))
        return q, self.sub(x, self.mul(q, y))

    def root_of_unity(self):
        """Generator of the (finite) unit group and its order, for Z and Z[i]."""
        self._require_euclidean()
        if self.d is None:
            return self(-1), 2
        return self(0, 1), 4

    def normalize(self, x):
        """Canonical associate: positive in Z, first quadrant (re > 0, im >= 0) in Z[i]."""
        self._require_euclidean()
        if x == self.zero:
            return x
        if self.d is None:
            return (abs(x[0]), x[1])
        zeta, _ = self.root_of_unity()
        while not (x[0] > 0 and x[1] >= 0):
            x = self.mul(x, zeta)
        return x

    def is_ring_unit(self, x) -> bool:
        return self.is_integral(x) and abs(self.norm(x)) == 1

    def descriptor(self):
        return {"kind": self.kind, "d": None if self.d is None else str(self.d)}

    def to_json(self, x):
        den = self.denominator(x)
        return {"a": str(int(x[0] * den)), "b": str(int(x[1] * den)), "den": str(den)}

    def from_json(self, obj):
        den = int(obj.get("den", 1))
        if den <= 0:
            raise DomainError("denominator must be positive")
        return self(int(obj["a"]), int(obj.get("b", 0)), den)

    def fmt(self, x):
        a, b = x
        if self.d is None or b == 0:
            return str(a)
        return f"({a}{'+' if b >= 0 else '-'}{abs(b)}*t)"


def _round_half(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))


class ResidueRing(Ring):
    """Z/(m) or Z[sqrt(d)]/(m)."""

    kind = "residue"
    is_finite = True

    def __init__(self, m: int, d: Optional[int] = None):
        if m < 2:
            raise ParameterError("modulus must exceed 1")
        if d is not None and (d in (0, 1) or not _squarefree(d)):
            raise ParameterError(f"d={d} must be square-free and not 0 or 1")
        self.m, self.d = m, d
        self.is_field = d is None and is_prime(m)
        if d is None:
            self.zero, self.one = 0, 1
        else:
            self.zero, self.one = (0, 0), (1, 0)

    def __repr__(self):
        return f"Z/({self.m})" if self.d is None else f"Z[sqrt({self.d})]/({self.m})"

    @property
    def cardinality(self):
        return self.m if self.d is None else self.m * self.m

    @property
    def q(self):
        return self.cardinality

    def __call__(self, a, b=0):
        if self.d is None:
            return a % self.m
        return (a % self.m, b % self.m)

    def from_int(self, k):
        return self(k)

    def add(self, x, y):
        if self.d is None:
            return (x + y) % self.m
        return ((x[0] + y[0]) % self.m, (x[1] + y[1]) % self.m)

    def sub(self, x, y):
        if self.d is None:
            return (x - y) % self.m
        return ((x[0] - y[0]) % self.m, (x[1] - y[1]) % self.m)

    def neg(self, x):
        if self.d is None:
            return -x % self.m
        return (-x[0] % self.m, -x[1] % self.m)

    def mul(self, x, y):
        if self.d is None:
            return x * y % self.m
        a, b = x
        c, e = y
        return ((a * c + self.d * b * e) % self.m, (a * e + b * c) % self.m)

    def norm(self, x) -> int:
        if self.d is None:
            return x
        return x[0] * x[0] - self.d * x[1] * x[1]

    def is_unit(self, x):
        return math.gcd(self.norm(x), self.m) == 1

    def inv(self, x):
        if not self.is_unit(x):
            raise DomainError(f"{x} is not a unit modulo {self.m}")
        if self.d is None:
            return pow(x, -1, self.m)
        ninv = pow(self.norm(x) % self.m, -1, self.m)
        return (x[0] * ninv % self.m, -x[1] * ninv % self.m)

    def elements(self):
        if self.d is None:
            return iter(range(self.m))
        return ((a, b) for a in range(self.m) for b in range(self.m))

    def random(self, rng):
        if self.d is None:
            return rng.randrange(self.m)
        return (rng.randrange(self.m), rng.randrange(self.m))

    def descriptor(self):
        return {"kind": self.kind, "m": str(self.m),
                "d": None if self.d is None else str(self.d)}

    def to_json(self, x):
        if self.d is None:
            return str(x)
        return {"a": str(x[0]), "b": str(x[1]), "den": "1"}

    def from_json(self, obj):
        if self.d is None:
            return _parse_residue(obj, self.m)
        if int(obj.get("den", 1)) != 1:
            raise DomainError("residue elements have no denominator")
        return (_parse_residue(obj["a"], self.m), _parse_residue(obj.get("b", 0), self.m))

    def encode_int(self, x) -> int:
        """Injective map into ``[0, cardinality)`` for bit packing."""
        return x if self.d is None else x[0] * self.m + x[1]

    def fmt(self, x):
        return str(x) if self.d is None else f"({x[0]}+{x[1]}*t)"


def ring_from_descriptor(desc: dict) -> Ring:
    kind = desc.get("kind")
    if kind == "prime-field":
        return PrimeField(int(desc["p"]))
    if kind == "ext-field":
        return ExtField(int(desc["p"]), int(desc["r"]), [int(c) for c in desc["modulusPoly"]])
    if kind == "quadratic":
        return QuadField(None if desc.get("d") is None else int(desc["d"]))
    if kind == "residue":
        return ResidueRing(int(desc["m"]), None if desc.get("d") is None else int(desc["d"]))
    raise ParameterError(f"unknown ring kind {kind!r}")


def encode_int(ctx, x) -> int:
    """Injective map of a finite-ring element into ``[0, |R|)``."""
    if isinstance(ctx, ResidueRing):
        return ctx.encode_int(x)
    return x


# -- finite-field specifics -------------------------------------------------

def _is_finite_field(ctx) -> bool:
    return isinstance(ctx, (PrimeField, ExtField)) or (isinstance(ctx, ResidueRing) and ctx.is_field)


def ff_order(ctx, a) -> int:
    """Multiplicative order of ``a``; a divisor of ``q - 1``."""
    if not _is_finite_field(ctx):
        raise UnsupportedRingError(f"{ctx!r} is not a finite field")
    if ctx.is_zero(a):
        raise DomainError("0 has no multiplicative order")
    k = ctx.q - 1
    for p in set(factorize(k)):
        while k % p == 0 and ctx.pow(a, k // p) == ctx.one:
            k //= p
    return k


def ff_element_of_order(ctx, s: int, rng: Optional[random.Random] = None):
    """An element of exact order ``s``; requires ``s | q - 1``.

    Candidates are ``a^((q-1)/s)``. With no ``rng`` the bases ``a = 1, 2, ...``
    are scanned in order, so the result is the first hit (deterministic).
    """
    if not _is_finite_field(ctx):
        raise UnsupportedRingError(f"{ctx!r} is not a finite field")
    q1 = ctx.q - 1
    if s < 1 or q1 % s:
        raise ParameterError(f"{s} does not divide q - 1 = {q1}")
    cof = q1 // s
    candidates = range(1, ctx.q) if rng is None else iter(lambda: ctx.random_unit(rng), None)
    for a in candidates:
        x = ctx.pow(a, cof)
        if ff_order(ctx, x) == s:
            return x
    raise DomainError("no element of the requested order")  # unreachable for valid s


def primitive_element(ctx, rng=None):
    return ff_element_of_order(ctx, ctx.q - 1, rng)


def quad_gcd(ctx: QuadField, z1, z2):
    """Normalized gcd in Z (``d=None``) or Z[i] (``d=-1``)."""
    if not isinstance(ctx, QuadField):
        raise UnsupportedRingError("quad_gcd needs a quadratic context")
    ctx._require_euclidean()
    if z1 == ctx.zero and z2 == ctx.zero:
        raise DomainError("gcd(0, 0) is undefined")
    if not (ctx.is_integral(z1) and ctx.is_integral(z2)):
        raise DomainError("gcd needs integral elements")
    a, b = z1, z2
    while b != ctx.zero:
        a, b = b, ctx.ring_divmod(a, b)[1]
    return ctx.normalize(a)


def residue_is_unit(ctx: ResidueRing, z) -> bool:
    return ctx.is_unit(z)
