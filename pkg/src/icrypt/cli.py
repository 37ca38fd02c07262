"""Command-line interface: ``icrypt {keygen,encrypt,decrypt,attack,inspect,bench}``.

Exit codes: 0 ok, 1 usage or parameter error, 2 attack failed,
3 unsupported parameters, 4 invalid key or ciphertext.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import warnings
from fractions import Fraction

from . import keyfile, linalg
from .attacks import (attack_atoms, attack_diagonalize_report, attack_dlog_cyclic,
                      attack_linear_algebra)
from .config import load_config
from .cryptosystem import (SCHEMES, block_bits, decode_blocks, decrypt, encode_blocks, encrypt,
                           expansion_ratio, keygen_ff_cyclic, keygen_ff_noncyclic,
                           keygen_finite_ring, keygen_number_ring, pack_ciphertexts)
from .errors import (AttackFailed, IcryptError, InvalidCiphertextError, InvalidKeyError,
                     UnsupportedRingError)
from .invariants import DiagGroup, minimal_invariant_degree, monomial_lattice_field
from .rings import _is_finite_field

EXIT_OK, EXIT_USAGE, EXIT_ATTACK_FAILED, EXIT_UNSUPPORTED, EXIT_INVALID = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _quad_list(text):
    """``2,3,1:1`` -> elements 2, 3 and 1+sqrt(d)."""
    out = []
    for item in text.split(","):
        a, _, b = item.partition(":")
        out.append((Fraction(int(a)), Fraction(int(b or 0))))
    return out


def _gen_specs(text):
    """Either a count (``3``) or generator entry lists (``2;4,7``)."""
    if ";" not in text and "," not in text:
        return int(text)
    return [_int_list(g) for g in text.split(";")]


def _rng(args):
    seed = args.seed
    if seed is None:
        seed = random.SystemRandom().getrandbits(64)
        print(f"seed: {seed}", file=sys.stderr)
    return random.Random(seed)


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _note_fingerprint(pk):
    print(f"key fingerprint: {keyfile.fingerprint(pk)}", file=sys.stderr)


# -- subcommands ------------------------------------------------------------------

def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise argparse.ArgumentTypeError(
            f"--scheme {args.scheme} needs " + ", ".join("--" + m.replace("_", "-") for m in missing))


def cmd_keygen(args, cfg):
    rng = _rng(args)
    conj = args.conjugate
    if args.scheme == "ff-cyclic":
        _require(args, "p", "s", "b")
        kp = keygen_ff_cyclic(args.p, args.s, args.b, args.messages or args.s, r=args.r,
                              conjugate=bool(conj), rng=rng)
    elif args.scheme == "ff-noncyclic":
        _require(args, "p", "s1", "s2", "b1", "b2")
        kp = keygen_ff_noncyclic(args.p, args.s1, args.s2, args.b1, args.b2,
                                 args.messages or min(args.s1 * args.s2, 16), r=args.r,
                                 conjugate=bool(conj), coeff_bound=cfg.coeff_bound, rng=rng)
    elif args.scheme == "number-ring":
        _require(args, "sm", "e")
        e = _int_list(args.e)
        kp = keygen_number_ring(args.d, _quad_list(args.sm), _int_list(args.qset), len(e), e,
                                int(args.gens or 2), args.messages or 8,
                                conjugate=conj is not False, rng=rng)
    else:
        _require(args, "m", "e")
        e = _int_list(args.e)
        kp = keygen_finite_ring(args.m, e, _gen_specs(args.gens or "2"), args.messages or 8,
                                d=args.d, conjugate=conj is not False, rng=rng)
    _note_fingerprint(kp.public)
    _write(keyfile.dumps(keyfile.key_to_json(kp)), args.out)
    return EXIT_OK


def cmd_encrypt(args, cfg):
    pk, _ = keyfile.load_key(args.pub)
    _note_fingerprint(pk)
    rng = _rng(args)
    if args.msg is not None:
        ct = encrypt(pk, args.msg, args.word_length, rng)
        obj = keyfile.ciphertext_to_json(pk, [ct])
    else:
        data = sys.stdin.buffer.read() if args.infile == "-" else open(args.infile, "rb").read()
        idx = encode_blocks(data, len(pk.S))
        cts = [encrypt(pk, i, args.word_length, rng) for i in idx]
        obj = keyfile.ciphertext_to_json(pk, cts, length=len(data))
    _write(keyfile.dumps(obj), args.out)
    return EXIT_OK


def cmd_decrypt(args, cfg):
    pk, sk = keyfile.load_key(args.priv)
    _note_fingerprint(pk)
    if sk is None:
        raise InvalidKeyError("key file has no private part")
    with open(args.ct, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidCiphertextError(f"ciphertext file is not JSON: {exc}") from exc
    cts, length = keyfile.ciphertext_from_json(pk, obj)
    if length is None:
        print(decrypt(sk, cts[0]))
        return EXIT_OK
    data = decode_blocks([decrypt(sk, ct) for ct in cts], len(pk.S), length)
    if args.out in (None, "-"):
        sys.stdout.buffer.write(data)
    else:
        with open(args.out, "wb") as fh:
            fh.write(data)
    return EXIT_OK


def cmd_attack(args, cfg):
    pk, _ = keyfile.load_key(args.pub)
    _note_fingerprint(pk)
    cts = []
    if args.ct:
        with open(args.ct, encoding="utf-8") as fh:
            cts, _ = keyfile.ciphertext_from_json(pk, json.load(fh))
    rng = random.Random(0 if args.seed is None else args.seed)
    if args.kind == "dlog":
        report = attack_dlog_cyclic(pk, cts)
    elif args.kind == "linalg":
        report = attack_linear_algebra(pk, args.max_degree or 8, cts, rng=rng, cap=cfg.monomial_cap)
    elif args.kind == "diag":
        report = attack_diagonalize_report(pk, q_scan_max=cfg.q_scan_max)
    else:
        report = attack_atoms(pk, cts, coeff_bound=cfg.coeff_bound, rng=rng,
                              q_scan_max=cfg.q_scan_max)
    print(json.dumps(report.to_json(pk.ctx), sort_keys=True, default=str))
    return EXIT_OK if report.success else EXIT_ATTACK_FAILED


def cmd_inspect(args, cfg):
    pk, _ = keyfile.load_key(args.pub)
    fp = keyfile.fingerprint(pk)
    ctx = pk.ctx
    info = {"fingerprint": fp, "scheme": pk.scheme, "ring": ctx.descriptor(), "n": pk.n,
            "generators": len(pk.generators), "messages": len(pk.S)}
    if ctx.cardinality is not None:
        info["expansionRatio"] = str(expansion_ratio(pk))
    gens = [[list(r) for r in g] for g in pk.generators]
    if all(linalg.is_diagonal(ctx, g) for g in gens) and _is_finite_field(ctx):
        G = DiagGroup(ctx, [linalg.diagonal_entries(g) for g in gens])
        system, lat = monomial_lattice_field(G)
        info["invariantLattice"] = {"rows": [list(r) for r in system.matrix],
                                    "moduli": list(system.moduli),
                                    "basis": [list(b) for b in lat.basis]}
    if ctx.is_field:
        md = minimal_invariant_degree(ctx, gens, max_degree=args.max_degree or cfg.degree_sweep_max,
                                      cap=cfg.monomial_cap)
        info["minimalDegree"] = md if isinstance(md, int) else str(md)
    print(json.dumps(info, sort_keys=True, indent=2))
    return EXIT_OK


# -- benchmarks ---------------------------------------------------------------------

def _bench_expansion(params, rng):
    rows = []
    nbytes = int(params.get("bytes", 24))
    for inst in params["instances"]:
        kp = keygen_ff_cyclic(inst["p"], inst["s"], inst["b"], inst.get("messages", inst["s"]),
                              r=inst.get("r", 1), rng=rng)
        pk = kp.public
        data = bytes(rng.randrange(256) for _ in range(nbytes))
        idx = encode_blocks(data, len(pk.S))
        cts = [encrypt(pk, i, rng=rng) for i in idx]
        _, ct_bits = pack_ciphertexts(pk, cts)
        payload = len(idx) * block_bits(len(pk.S))
        rows.append({"q": pk.ctx.q, "s": inst["s"], "r": len(pk.S), "n": pk.n,
                     "blocks": len(idx), "ciphertext_bits": ct_bits, "plaintext_bits": payload,
                     "measured": str(Fraction(ct_bits, payload)),
                     "formula": str(expansion_ratio(pk))})
    return rows


def _bench_mindegree(params, rng):
    rows = []
    sm = [(Fraction(a), Fraction(b)) for a, b in
          ((x if isinstance(x, list) else [x, 0]) for x in params.get("S_m", [2, 3, 5]))]
    for e in params["e"]:
        for trial in range(int(params.get("trials", 3))):
            with warnings.catch_warnings():
                # only the diagonal group is measured, so P is left out on purpose
                warnings.simplefilter("ignore")
                kp = keygen_number_ring(params.get("d"), sm, params.get("Q", [-1, 0, 1]), len(e), e,
                                        int(params.get("gens", 2)), int(params.get("messages", 4)),
                                        conjugate=False, rng=rng)
            M = minimal_invariant_degree(kp.private.group(), max_degree=int(params.get("maxDegree", 16)))
            rows.append({"e": " ".join(map(str, e)), "trial": trial, "sum_e": sum(e),
                         "min_degree": M if isinstance(M, int) else str(M),
                         "exceeds_half": not isinstance(M, int) or 2 * M > sum(e)})
    return rows


def _keygen_from_params(p, rng):
    scheme = p["scheme"]
    if scheme == "ff-cyclic":
        return keygen_ff_cyclic(p["p"], p["s"], p["b"], p.get("messages", p["s"]),
                                conjugate=p.get("conjugate", False), rng=rng)
    if scheme == "ff-noncyclic":
        return keygen_ff_noncyclic(p["p"], p["s1"], p["s2"], p["b1"], p["b2"],
                                   p.get("messages", 8), conjugate=p.get("conjugate", False), rng=rng)
    if scheme == "number-ring":
        sm = [(Fraction(a), Fraction(b)) for a, b in
              ((x if isinstance(x, list) else [x, 0]) for x in p["S_m"])]
        return keygen_number_ring(p.get("d"), sm, p.get("Q", [-1, 0, 1]), len(p["e"]), p["e"],
                                  p.get("gens", 2), p.get("messages", 6), rng=rng)
    if scheme == "finite-ring":
        return keygen_finite_ring(p["m"], p["e"], p.get("gens", 2), p.get("messages", 6),
                                  d=p.get("d"), rng=rng)
    raise UnsupportedRingError(f"unknown scheme {scheme!r}")


def _bench_attack_sweep(params, rng):
    rows = []
    attacks = params.get("attacks", ["diag"])
    for trial in range(int(params.get("trials", 5))):
        kp = _keygen_from_params(params, rng)
        pk = kp.public
        cts = [encrypt(pk, i % len(pk.S), rng=rng) for i in range(int(params.get("ciphertexts", 5)))]
        for name in attacks:
            try:
                if name == "dlog":
                    rep = attack_dlog_cyclic(pk, cts)
                elif name == "linalg":
                    rep = attack_linear_algebra(pk, int(params.get("maxDegree", 6)), cts, rng=rng)
                elif name == "diag":
                    rep = attack_diagonalize_report(pk)
                else:
                    rep = attack_atoms(pk, cts, rng=rng)
                ok = rep.success
                hits = sum(1 for i, x in enumerate(rep.decrypted) if x == i % len(pk.S))
                msg = rep.message
            except (UnsupportedRingError, AttackFailed) as exc:
                ok, hits, msg = False, 0, f"{type(exc).__name__}: {exc}"
            rows.append({"trial": trial, "attack": name, "success": ok,
                         "decrypted": hits, "ciphertexts": len(cts), "message": msg})
    return rows


def cmd_bench(args, cfg):
    with open(args.params, encoding="utf-8") as fh:
        params = json.load(fh)
    seed = args.seed if args.seed is not None else params.get("seed", 0)
    rng = random.Random(seed)
    rows = {"expansion": _bench_expansion, "mindegree": _bench_mindegree,
            "attack-sweep": _bench_attack_sweep}[args.kind](params, rng)
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    _write(buf.getvalue(), args.out)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="icrypt", description="Invariant-based public-key cryptosystem and attacks.")
    parser.add_argument("--config", help="JSON file with search caps (default: $ICRYPT_CONFIG)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    kg = sub.add_parser("keygen", help="generate a key pair")
    kg.add_argument("--scheme", required=True, choices=SCHEMES)
    for name in ("p", "s", "b", "s1", "s2", "b1", "b2", "m", "d", "messages"):
        kg.add_argument(f"--{name}", type=int)
    kg.add_argument("--r", type=int, default=1, help="extension degree for finite fields")
    kg.add_argument("--sm", help="number-ring primes, e.g. 2,3,1:1 for 2, 3, 1+sqrt(d)")
    kg.add_argument("--qset", default="-1,0,1", help="exponent choices, e.g. -1,0,1")
    kg.add_argument("--e", help="secret exponents, e.g. 1,2,1 (last must be 1)")
    kg.add_argument("--gens", help="generator count, or entry lists like 2;4")
    kg.add_argument("--conjugate", action=argparse.BooleanOptionalAction, default=None)
    kg.add_argument("--seed", type=int)
    kg.add_argument("--out")

    en = sub.add_parser("encrypt", help="encrypt a message index or a byte file")
    en.add_argument("--pub", required=True)
    grp = en.add_mutually_exclusive_group(required=True)
    grp.add_argument("--msg", type=int)
    grp.add_argument("--in", dest="infile")
    en.add_argument("--word-length", type=int)
    en.add_argument("--seed", type=int)
    en.add_argument("--out")

    de = sub.add_parser("decrypt", help="decrypt a ciphertext file")
    de.add_argument("--priv", required=True)
    de.add_argument("--ct", required=True)
    de.add_argument("--out")

    at = sub.add_parser("attack", help="run an attack on a public key")
    at.add_argument("kind", choices=["dlog", "linalg", "diag", "atoms"])
    at.add_argument("--pub", required=True)
    at.add_argument("--ct")
    at.add_argument("--max-degree", type=int)
    at.add_argument("--seed", type=int)

    ins = sub.add_parser("inspect", help="summarize a public key")
    ins.add_argument("--pub", required=True)
    ins.add_argument("--max-degree", type=int)

    be = sub.add_parser("bench", help="run an experiment, CSV output")
    be.add_argument("kind", choices=["expansion", "mindegree", "attack-sweep"])
    be.add_argument("--params", required=True)
    be.add_argument("--seed", type=int)
    be.add_argument("--out")
    return parser


COMMANDS = {"keygen": cmd_keygen, "encrypt": cmd_encrypt, "decrypt": cmd_decrypt,
            "attack": cmd_attack, "inspect": cmd_inspect, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](args, cfg)
    except UnsupportedRingError as exc:
        print(f"icrypt: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (InvalidKeyError, InvalidCiphertextError) as exc:
        print(f"icrypt: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except AttackFailed as exc:
        print(f"icrypt: attack failed: {exc}", file=sys.stderr)
        return EXIT_ATTACK_FAILED
    except (IcryptError, argparse.ArgumentTypeError, OSError) as exc:
        print(f"icrypt: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
