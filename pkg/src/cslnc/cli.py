"""Command-line interface: gen, verify, encode, decode, selftest, bench.

Exit codes: 0 success, 2 invalid input, 3 negative verification result
(non-MDS code, failed fixture, ledger mismatch, undecodable erasure
pattern), 4 I/O or file-format error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import arraycode as ac
from .field import mult_order
from .fileio import (
    FormatError,
    StripeFile,
    load_code,
    read_stripes,
    save_code,
    split_payload,
    symbols_to_bytes,
    write_stripes,
)
from .kernels import IndexSetJ, build_standard
from .ringmat import RingPoly, SingularMatrixError
from .sched import (
    BENCH_FIELDS,
    bench,
    encode_evenodd_like_scheduled,
    encode_rdp_like_scheduled,
    naive_encode,
    predicted_xor_per_bit,
)

EXIT_OK, EXIT_INVALID, EXIT_NEGATIVE, EXIT_IO = 0, 2, 3, 4

FAMILIES = ["evenodd", "gen-evenodd", "rdp", "gen-rdp", "xi", "eq42", "evenodd-like", "rdp-like"]
SCHED_FAMILIES = ("evenodd-like", "rdp-like")


class CommandError(Exception):
    def __init__(self, msg: str, code: int):
        super().__init__(msg)
        self.code = code


def _emit(args, doc: dict, text: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(doc, default=_json_default))
    else:
        print(text)


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, np.integer):
        return int(o)
    raise TypeError(type(o))


def _int_list(s: str | None) -> list[int]:
    if not s:
        return []
    try:
        return [int(t) for t in s.split(",") if t.strip()]
    except ValueError as exc:
        raise CommandError(f"expected a comma-separated integer list, got {s!r}", EXIT_INVALID) from exc


def _polys(p: int, L: int, codes: list[int]) -> list[RingPoly]:
    """Integer codes -> ring elements (base-p digits, low degree first)."""
    out = []
    for code in codes:
        digits, v = [], code
        while v:
            digits.append(v % p)
            v //= p
        if len(digits) > L:
            raise CommandError(f"polynomial code {code} has degree >= L", EXIT_INVALID)
        out.append(RingPoly.from_coeffs(p, L, digits))
    return out


# ---------------------------------------------------------------------------
# gen


def build_code(args) -> ac.ArrayCode:
    fam, p, L, k, r = args.family, args.p, args.L, args.k, args.r
    if fam in ("evenodd", "gen-evenodd", "rdp", "gen-rdp", "xi") and p != 2:
        raise CommandError(f"--family {fam} is binary: use --p 2", EXIT_INVALID)
    if fam == "xi":
        return ac.make_xi_6_3()
    if k is None:
        raise CommandError("--k is required", EXIT_INVALID)
    if fam == "evenodd":
        return ac.make_evenodd(k, L)
    if fam == "rdp":
        return ac.make_rdp(k, L)
    if fam == "gen-evenodd":
        return ac.make_gen_evenodd(k, r, L)
    if fam == "gen-rdp":
        return ac.make_gen_rdp(k, r, L)
    Jset = IndexSetJ(p, L, tuple(_int_list(args.J_set))) if args.J_set else None
    spec = build_standard(p, L, Jset)
    gens = _polys(p, L, _int_list(args.generators)) if args.generators else None
    if fam == "eq42":
        if gens is None:
            raise CommandError("--family eq42 needs --generators (the f_i as integer codes)", EXIT_INVALID)
        return ac.make_eq42(k, r, spec, gens)
    if fam == "evenodd-like":
        return ac.make_evenodd_like(k, r, spec, gens, strict=not args.no_strict)
    if fam == "rdp-like":
        return ac.make_rdp_like(k, r, spec, gens, strict=not args.no_strict)
    raise CommandError(f"unknown family {fam!r}", EXIT_INVALID)


_TABLE_FAMILY = {"gen-evenodd": "evenodd", "gen-rdp": "rdp"}


def _cost_row(code: ac.ArrayCode):
    """Per-bit encoding cost from the closed forms, when one applies."""
    if code.p != 2:
        return None
    try:
        return predicted_xor_per_bit(_TABLE_FAMILY.get(code.family, code.family), code.k, code.L, code.r)
    except ValueError:
        return None


def cmd_gen(args) -> int:
    code = build_code(args)
    save_code(code, args.out)
    bound = ac.max_k_bound(code.p, code.L)
    cost = _cost_row(code)
    doc = {
        "out": args.out,
        "family": code.family,
        "p": code.p,
        "L": code.L,
        "J": code.J,
        "n": code.n,
        "k": code.k,
        "r": code.r,
        "m_L": mult_order(code.p, code.L),
        "k_bound": bound,
        "predicted_xor_per_bit": cost,
    }
    text = (
        f"wrote {args.out}: {code.family} ({code.n},{code.k}) over GF({code.p}), L={code.L}, J={code.J}; "
        f"k <= p^m_L - 1 = {bound}"
    )
    if cost is not None:
        text += f"; predicted {float(cost):g} XORs/bit ({cost})"
    _emit(args, doc, text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    code = load_code(args.code)
    t0 = time.perf_counter()
    if args.mode == "exhaustive":
        try:
            rep = ac.is_mds(code, jobs=args.jobs, budget=args.budget)
        except ValueError as exc:
            raise CommandError(f"{exc}", EXIT_INVALID) from exc
    else:
        rep = ac.is_mds_sampled(code, samples=args.samples, seed=args.seed)
    doc = rep.to_json() | {"seconds": time.perf_counter() - t0, "family": code.family}
    verdict = "MDS" if rep.mds else "NOT MDS"
    text = f"{verdict}: {rep.checked}/{rep.total} subsets checked ({args.mode}) in {doc['seconds']:.2f}s"
    if rep.witness is not None:
        text += f"; rank-deficient columns {list(rep.witness)}"
    _emit(args, doc, text)
    return EXIT_OK if rep.mds else EXIT_NEGATIVE


# ---------------------------------------------------------------------------
# encode / decode


def _sched_parity(code: ac.ArrayCode, msgs: np.ndarray) -> np.ndarray:
    if code.family not in SCHED_FAMILIES:
        raise CommandError("--sched needs an evenodd-like or rdp-like code", EXIT_INVALID)
    enc = encode_evenodd_like_scheduled if code.family == "evenodd-like" else encode_rdp_like_scheduled
    try:
        outs, _ = enc(code, msgs)
    except ValueError as exc:
        raise CommandError(str(exc), EXIT_INVALID) from exc
    return np.vstack([msgs] + [o.astype(np.int64) for o in outs])


def cmd_encode(args) -> int:
    code = load_code(args.code)
    with open(args.input, "rb") as fh:
        data = fh.read()
    blocks = split_payload(data, code)
    stripes = np.stack([_sched_parity(code, m) if args.sched else ac.encode(code, m) for m in blocks])
    write_stripes(args.out, StripeFile(code.p, code.L, code.J, code.k, code.n, len(data), stripes))
    _emit(
        args,
        {"stripes": len(stripes), "bytes": len(data), "scheduled": bool(args.sched)},
        f"encoded {len(data)} bytes into {len(stripes)} stripes -> {args.out}",
    )
    return EXIT_OK


def _survivors(code: ac.ArrayCode, lost) -> list[int]:
    """The first k columns that were not erased."""
    return [c for c in range(code.n) if c not in lost][: code.k]


def cmd_decode(args) -> int:
    code = load_code(args.code)
    sf = read_stripes(args.input)
    if (sf.p, sf.L, sf.J, sf.k, sf.n) != (code.p, code.L, code.J, code.k, code.n):
        raise CommandError("stripe file does not match the code parameters", EXIT_INVALID)
    erased = set(_int_list(args.erase))
    if any(not 0 <= e < code.n for e in erased):
        raise CommandError(f"erased column out of range 0..{code.n - 1}", EXIT_INVALID)
    rng = np.random.default_rng(args.seed)
    out = []
    patterns = {}
    decoder = ac.ErasureDecoder(code, args.method)
    paths = []
    for s in sf.stripes:
        lost = set(erased)
        if args.erase_random:
            lost |= {int(c) for c in rng.choice(code.n, args.erase_random, replace=False)}
        if len(lost) > code.r:
            raise CommandError(f"{len(lost)} erasures exceed n - k = {code.r}", EXIT_INVALID)
        cols = _survivors(code, lost)
        try:
            out.append(decoder(cols, s[cols]))
        except SingularMatrixError as exc:
            raise CommandError(str(exc), EXIT_NEGATIVE) from exc
        patterns[tuple(sorted(lost))] = patterns.get(tuple(sorted(lost)), 0) + 1
        paths.append(decoder.path(cols))
    msgs = np.stack(out).reshape(-1)
    data = symbols_to_bytes(msgs, code.p, sf.length)
    with open(args.out, "wb") as fh:
        fh.write(data)
    _emit(
        args,
        {
            "stripes": len(out),
            "bytes": len(data),
            "erasure_patterns": len(patterns),
            "paths": {p: sum(1 for k in patterns if decoder.path(_survivors(code, k)) == p) for p in set(paths)},
        },
        f"decoded {len(out)} stripes ({len(patterns)} erasure patterns) -> {args.out}",
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# selftest / bench


def cmd_selftest(args) -> int:
    from .fixtures import run_all

    results = run_all()
    width = max(len(r.name) for r in results)
    lines = [f"{'fixture':<{width}}  result  seconds  detail"]
    for r in results:
        lines.append(f"{r.name:<{width}}  {'PASS' if r.ok else 'FAIL':<6}  {r.seconds:7.3f}  {r.detail}")
    ok = all(r.ok for r in results)
    lines.append(f"{sum(r.ok for r in results)}/{len(results)} fixtures pass")
    _emit(args, {"ok": ok, "fixtures": [r.__dict__ for r in results]}, "\n".join(lines))
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_bench(args) -> int:
    if args.code:
        code = load_code(args.code)
        family, k, L, r = code.family, code.k, code.L, code.r
    else:
        if args.family is None or args.k is None:
            raise CommandError("bench needs --code or --family/--k/--L/--r", EXIT_INVALID)
        family, k, L, r = args.family, args.k, args.L, args.r
        code = None
    rows = []
    if family in SCHED_FAMILIES:
        if (code is not None and code.p != 2) or args.p != 2:
            raise CommandError("scheduled encoding needs p = 2", EXIT_INVALID)
        rows.append(bench(family, k, L, r, stripes=args.stripes, seed=args.seed))
    else:
        if code is None:
            args.J_set = args.generators = None
            args.no_strict = False
            code = build_code(args)
        rng = np.random.default_rng(args.seed)
        t0 = time.perf_counter()
        for _ in range(args.stripes):
            _, ledger = naive_encode(code, rng.integers(0, code.p, (code.k, code.J)))
        bits = code.k * code.J
        rows.append(
            {
                "family": family,
                "p": code.p,
                "L": L,
                "k": k,
                "r": r,
                "measured_xors": ledger.xor_count,
                "predicted_xors": None,
                "per_bit_measured": Fraction(ledger.xor_count, bits),
                "per_bit_predicted": _cost_row(code),
                "naive_xors": ledger.xor_count,
                "outputs_match": True,
                "wall_time": time.perf_counter() - t0,
            }
        )
    if args.csv:
        w = csv.DictWriter(sys.stdout, fieldnames=BENCH_FIELDS)
        w.writeheader()
        for row in rows:
            w.writerow({k: (str(v) if isinstance(v, Fraction) else v) for k, v in row.items()})
    else:
        for row in rows:
            _emit(
                args,
                row,
                f"{row['family']} (k={row['k']}, L={row['L']}, r={row['r']}): measured {row['measured_xors']} XORs "
                f"({row['per_bit_measured']}/bit), predicted {row['predicted_xors']} ({row['per_bit_predicted']}/bit), "
                f"naive {row['naive_xors']}, outputs match={row['outputs_match']}",
            )
    for row in rows:
        if row["family"] in SCHED_FAMILIES and (
            row["measured_xors"] != row["predicted_xors"] or not row["outputs_match"]
        ):
            return EXIT_NEGATIVE
    return EXIT_OK


# ---------------------------------------------------------------------------


def _add_code_params(sp, with_out: bool) -> None:
    sp.add_argument("--p", type=int, default=2)
    sp.add_argument("--L", type=int, default=5)
    sp.add_argument("--J-set", dest="J_set", default=None, help="comma-separated index set (default: units mod L)")
    sp.add_argument("--family", choices=FAMILIES, default=None if not with_out else "evenodd-like")
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--r", type=int, default=2)
    sp.add_argument("--generators", default=None, help="comma-separated ring elements as base-p integer codes")
    sp.add_argument("--no-strict", action="store_true", help="skip the k, r and generator checks")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cslnc", description="Circular-shift network coding and array codes.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gen", help="build a code and write its JSON description")
    _add_code_params(sp, True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("verify", help="check the MDS property")
    sp.add_argument("--code", required=True)
    sp.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    sp.add_argument("--jobs", type=int, default=ac.default_jobs())
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--budget", type=int, default=ac.MDS_SUBSET_BUDGET)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("encode", help="encode a file into stripes")
    sp.add_argument("--code", required=True)
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--sched", action="store_true", help="use the scheduled XOR encoder")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("decode", help="decode a stripe file, optionally with injected erasures")
    sp.add_argument("--code", required=True)
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--erase", default=None, help="comma-separated 0-based columns erased in every stripe")
    sp.add_argument("--erase-random", type=int, default=0, help="erase this many random columns per stripe")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--method", choices=["auto", "closed", "generic", "full"], default="auto")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("selftest", help="run the built-in reference fixtures")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_selftest)

    sp = sub.add_parser("bench", help="count encoding XORs and compare with the closed forms")
    sp.add_argument("--code", default=None)
    _add_code_params(sp, False)
    sp.add_argument("--stripes", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--csv", action="store_true")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_bench)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, SingularMatrixError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE if isinstance(exc, SingularMatrixError) else EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
