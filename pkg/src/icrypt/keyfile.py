"""JSON serialization of keys and ciphertexts.

Ring elements are decimal strings (quadratic elements are ``{a, b, den}``
objects); files are written with sorted keys so that equal inputs give
byte-identical output.
"""
from __future__ import annotations

import hashlib
import json
from typing import Optional

from . import linalg
from .cryptosystem import SCHEMES, Ciphertext, KeyPair, PrivateKey, PublicKey
from .errors import EvaluationError, IcryptError, InvalidCiphertextError, InvalidKeyError
from .invariants import evaluate_monomial
from .rings import ring_from_descriptor


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _mat(ctx, M):
    return [[ctx.to_json(x) for x in row] for row in M]


def _vecs(ctx, V):
    return [[ctx.to_json(x) for x in v] for v in V]


def public_to_json(pk: PublicKey) -> dict:
    return {"scheme": pk.scheme, "ring": pk.ctx.descriptor(), "n": pk.n,
            "generators": [_mat(pk.ctx, g) for g in pk.generators],
            "S": _vecs(pk.ctx, pk.S)}


def private_to_json(sk: PrivateKey) -> dict:
    ctx = sk.ctx
    return {"P": _mat(ctx, sk.P), "Pinv": _mat(ctx, sk.P_inv),
            "exponents": [str(e) for e in sk.exponents],
            "diagonal": _vecs(ctx, sk.diagonal),
            "table": [ctx.to_json(x) for x in sk.table]}


def key_to_json(key, include_private: bool = True) -> dict:
    if isinstance(key, KeyPair):
        out = public_to_json(key.public)
        if include_private:
            out["private"] = private_to_json(key.private)
        return out
    return public_to_json(key)


def fingerprint(pk: PublicKey) -> str:
    """First 16 hex digits of the SHA-256 of the canonical public key."""
    canon = json.dumps(public_to_json(pk), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def key_from_json(obj: dict) -> tuple[PublicKey, Optional[PrivateKey]]:
    """Parse a key file; raises ``InvalidKeyError`` on anything malformed."""
    try:
        ctx = ring_from_descriptor(obj["ring"])
        scheme = obj["scheme"]
        if scheme not in SCHEMES:
            raise InvalidKeyError(f"unknown scheme {scheme!r}")
        n = int(obj["n"])
        gens = [[[ctx.from_json(x) for x in row] for row in g] for g in obj["generators"]]
        S = [tuple(ctx.from_json(x) for x in v) for v in obj["S"]]
        pk = PublicKey(scheme, ctx, n, gens, S)
        _validate_public(pk)
        sk = None
        if obj.get("private") is not None:
            p = obj["private"]
            sk = PrivateKey(ctx,
                            [[ctx.from_json(x) for x in row] for row in p["P"]],
                            [[ctx.from_json(x) for x in row] for row in p["Pinv"]],
                            [int(e) for e in p["exponents"]],
                            [tuple(ctx.from_json(x) for x in v) for v in p["diagonal"]],
                            [ctx.from_json(x) for x in p["table"]])
            _validate_private(pk, sk)
    except InvalidKeyError:
        raise
    except (KeyError, TypeError, ValueError, IcryptError) as exc:
        raise InvalidKeyError(f"malformed key: {exc}") from exc
    return pk, sk


def _validate_public(pk: PublicKey):
    ctx, n = pk.ctx, pk.n
    if not pk.generators:
        raise InvalidKeyError("key has no generators")
    for g in pk.generators:
        if len(g) != n or any(len(row) != n for row in g):
            raise InvalidKeyError("generator has the wrong shape")
    if len(pk.S) < 2 or any(len(v) != n for v in pk.S):
        raise InvalidKeyError("message set has the wrong shape")
    if len(set(pk.S)) != len(pk.S):
        raise InvalidKeyError("message vectors are not distinct")
    gens = [[list(r) for r in g] for g in pk.generators]
    for i, a in enumerate(gens):
        if not ctx.is_unit(linalg.det(ctx, a)):
            raise InvalidKeyError("generator is not invertible")
        for b in gens[i + 1:]:
            if not linalg.commute(ctx, a, b):
                raise InvalidKeyError("generators do not commute")


def _validate_private(pk: PublicKey, sk: PrivateKey):
    ctx = pk.ctx
    P = [list(r) for r in sk.P]
    if linalg.mat_mul(ctx, P, [list(r) for r in sk.P_inv]) != linalg.identity(ctx, pk.n):
        raise InvalidKeyError("P and Pinv are not inverse")
    Pinv = [list(r) for r in sk.P_inv]
    if len(sk.diagonal) != len(pk.generators):
        raise InvalidKeyError("private generators do not match the public ones")
    for t, g in zip(sk.diagonal, pk.generators):
        if linalg.conjugate(ctx, P, linalg.diag(ctx, list(t)), Pinv) != [list(r) for r in g]:
            raise InvalidKeyError("private generators do not match the public ones")
    try:
        table = [evaluate_monomial(ctx, sk.exponents, linalg.mat_vec(ctx, Pinv, list(v)))
                 for v in pk.S]
    except EvaluationError as exc:
        raise InvalidKeyError(f"decryption table cannot be recomputed: {exc}") from exc
    if table != list(sk.table) or len(set(table)) != len(table):
        raise InvalidKeyError("decryption table is inconsistent with the message set")


def load_key(path) -> tuple[PublicKey, Optional[PrivateKey]]:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidKeyError(f"key file is not JSON: {exc}") from exc
    return key_from_json(obj)


def ciphertext_to_json(pk: PublicKey, cts, length: Optional[int] = None) -> dict:
    """One ciphertext as ``{u}``; a block-encoded byte string as ``{blocks, length}``."""
    ctx = pk.ctx
    out = {"keyFingerprint": fingerprint(pk)}
    if length is None:
        (ct,) = cts
        out["u"] = [ctx.to_json(x) for x in ct.u]
    else:
        out["blocks"] = [[ctx.to_json(x) for x in ct.u] for ct in cts]
        out["length"] = length
    return out


def ciphertext_from_json(pk: PublicKey, obj: dict):
    """Returns ``(ciphertexts, length)``; ``length`` is None for a single index."""
    try:
        fp = obj.get("keyFingerprint")
        if fp is not None and fp != fingerprint(pk):
            raise InvalidCiphertextError("ciphertext was made for a different key")
        ctx = pk.ctx
        if "u" in obj:
            cts = [Ciphertext(ctx.from_json(x) for x in obj["u"])]
            length = None
        else:
            cts = [Ciphertext(ctx.from_json(x) for x in u) for u in obj["blocks"]]
            length = int(obj["length"])
        for ct in cts:
            if len(ct.u) != pk.n:
                raise InvalidCiphertextError("ciphertext dimension does not match the key")
    except InvalidCiphertextError:
        raise
    except (KeyError, TypeError, ValueError, IcryptError) as exc:
        raise InvalidCiphertextError(f"malformed ciphertext: {exc}") from exc
    return cts, length
