import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cslnc.arraycode import make_eq42, make_evenodd_like, make_rdp_like, make_xi_6_3
from cslnc.cli import main
from cslnc.fileio import (
    ChecksumError,
    FormatError,
    StripeFile,
    bytes_to_symbols,
    code_from_json,
    code_to_json,
    load_code,
    save_code,
    symbols_to_bytes,
)
from cslnc.kernels import IndexSetJ, build_standard
from cslnc.ringmat import RingPoly


def _run(capsys, *argv):
    rc = main([str(a) for a in argv])
    out = capsys.readouterr()
    return rc, out.out, out.err


# ---------------------------------------------------------------------------
# formats


@pytest.mark.parametrize(
    "code",
    [
        make_evenodd_like(5, 3, build_standard(2, 5)),
        make_rdp_like(4, 2, build_standard(3, 5)),
        make_xi_6_3(),
        make_eq42(
            3,
            2,
            build_standard(2, 7, IndexSetJ(2, 7, (1, 2, 4))),
            [RingPoly.from_coeffs(2, 7, c) for c in ([1], [0, 1], [0, 0, 1])],
        ),
    ],
    ids=["eo-like", "rdp-like-p3", "xi", "eq42"],
)
def test_code_json_round_trip(code, tmp_path):
    path = tmp_path / "c.json"
    save_code(code, str(path))
    back = load_code(str(path))
    assert np.array_equal(back.kernels, code.kernels)
    assert (back.family, back.k, back.n, back.systematic) == (code.family, code.k, code.n, code.systematic)
    assert back.generator_polys() == code.generator_polys()


def test_code_json_version_check():
    doc = code_to_json(make_evenodd_like(3, 2, build_standard(2, 5)))
    doc["version"] = 99
    with pytest.raises(FormatError):
        code_from_json(doc)


def test_load_code_rejects_garbage(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("not json")
    with pytest.raises(FormatError):
        load_code(str(p))


@given(st.binary(max_size=64), st.sampled_from([2, 3, 5]))
def test_symbol_conversion_round_trip(data, p):
    sym = bytes_to_symbols(data, p)
    assert sym.min(initial=0) >= 0 and sym.max(initial=0) < p
    assert symbols_to_bytes(sym, p, len(data)) == data


@pytest.mark.parametrize("p", [2, 3])
def test_stripe_file_round_trip(p):
    rng = np.random.default_rng(p)
    stripes = rng.integers(0, p, (4, 7, 4))
    sf = StripeFile(p, 5, 4, 5, 7, 123, stripes)
    back = StripeFile.from_bytes(sf.to_bytes())
    assert np.array_equal(back.stripes, stripes) and back.length == 123


def test_stripe_file_detects_corruption():
    sf = StripeFile(2, 5, 4, 5, 7, 10, np.ones((2, 7, 4), dtype=np.int64))
    blob = bytearray(sf.to_bytes())
    blob[-6] ^= 0xFF
    with pytest.raises(ChecksumError):
        StripeFile.from_bytes(bytes(blob))
    with pytest.raises(FormatError):
        StripeFile.from_bytes(b"XXXX" + bytes(blob[4:]))
    with pytest.raises(FormatError):
        StripeFile.from_bytes(bytes(blob[:-1]))
    with pytest.raises(FormatError):
        StripeFile.from_bytes(bytes(blob) + b"\0")


# ---------------------------------------------------------------------------
# command line


@pytest.fixture
def eo_code(tmp_path, capsys):
    path = tmp_path / "eo.json"
    rc, _, _ = _run(capsys, "gen", "--p", 2, "--L", 5, "--family", "evenodd-like", "--k", 15, "--r", 3, "--out", path)
    assert rc == 0
    return path


def test_gen_reports_bound_and_cost(tmp_path, capsys):
    rc, out, _ = _run(
        capsys, "gen", "--L", 5, "--family", "rdp-like", "--k", 15, "--r", 3, "--out", tmp_path / "c.json", "--json"
    )
    doc = json.loads(out)
    assert rc == 0 and doc["k_bound"] == 15 and doc["m_L"] == 4
    assert doc["predicted_xor_per_bit"] == "12/5"


def test_gen_rejects_k_beyond_bound(tmp_path, capsys):
    rc, _, err = _run(capsys, "gen", "--L", 5, "--family", "evenodd-like", "--k", 16, "--out", tmp_path / "c.json")
    assert rc == 2 and "exceeds the maximal k" in err


def test_gen_no_strict_allows_beyond_bound(tmp_path, capsys):
    path = tmp_path / "c.json"
    rc, _, _ = _run(capsys, "gen", "--L", 3, "--family", "evenodd-like", "--k", 4, "--no-strict", "--out", path)
    assert rc == 0
    rc, _, _ = _run(capsys, "verify", "--code", path, "--jobs", 1)
    assert rc == 3


def test_verify_xi_and_eo_like(tmp_path, eo_code, capsys):
    xi = tmp_path / "xi.json"
    assert _run(capsys, "gen", "--family", "xi", "--L", 3, "--out", xi)[0] == 0
    rc, out, _ = _run(capsys, "verify", "--code", xi, "--jobs", 1, "--json")
    doc = json.loads(out)
    assert rc == 0 and doc["mds"] and doc["subsets_checked"] == 20
    rc, out, _ = _run(capsys, "verify", "--code", eo_code, "--jobs", 1)
    assert rc == 0 and "816/816" in out
    rc, out, _ = _run(capsys, "verify", "--code", eo_code, "--mode", "sampled", "--samples", 20)
    assert rc == 0 and "20/816" in out


def test_encode_decode_round_trip(tmp_path, eo_code, capsys):
    data = np.random.default_rng(0).bytes(700)
    src, enc, dec = tmp_path / "in.bin", tmp_path / "s.csvs", tmp_path / "out.bin"
    src.write_bytes(data)
    assert _run(capsys, "encode", "--code", eo_code, "--in", src, "--out", enc)[0] == 0
    rc, out, _ = _run(
        capsys, "decode", "--code", eo_code, "--in", enc, "--out", dec, "--erase-random", 3, "--seed", 1, "--json"
    )
    assert rc == 0 and dec.read_bytes() == data
    assert json.loads(out)["stripes"] >= 1
    rc, _, _ = _run(capsys, "decode", "--code", eo_code, "--in", enc, "--out", dec, "--erase", "0,1,2", "--method", "generic")
    assert rc == 0 and dec.read_bytes() == data


def test_sched_encoding_is_byte_identical(tmp_path, eo_code, capsys):
    src = tmp_path / "in.bin"
    src.write_bytes(bytes(range(256)) * 3)
    a, b = tmp_path / "a", tmp_path / "b"
    assert _run(capsys, "encode", "--code", eo_code, "--in", src, "--out", a)[0] == 0
    assert _run(capsys, "encode", "--code", eo_code, "--in", src, "--out", b, "--sched")[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_decode_error_exits(tmp_path, eo_code, capsys):
    src, enc, dec = tmp_path / "in.bin", tmp_path / "s", tmp_path / "o"
    src.write_bytes(b"hello world")
    _run(capsys, "encode", "--code", eo_code, "--in", src, "--out", enc)
    assert _run(capsys, "decode", "--code", eo_code, "--in", enc, "--out", dec, "--erase", "0,1,2,3")[0] == 2
    assert _run(capsys, "decode", "--code", eo_code, "--in", enc, "--out", dec, "--erase", "99")[0] == 2
    blob = bytearray(enc.read_bytes())
    blob[40] ^= 1
    enc.write_bytes(bytes(blob))
    assert _run(capsys, "decode", "--code", eo_code, "--in", enc, "--out", dec)[0] == 4
    assert _run(capsys, "decode", "--code", tmp_path / "missing.json", "--in", enc, "--out", dec)[0] == 4


def test_ternary_round_trip(tmp_path, capsys):
    code = tmp_path / "c.json"
    assert _run(capsys, "gen", "--p", 3, "--L", 5, "--family", "rdp-like", "--k", 6, "--out", code)[0] == 0
    src, enc, dec = tmp_path / "in", tmp_path / "s", tmp_path / "o"
    src.write_bytes(b"ternary payload " * 10)
    assert _run(capsys, "encode", "--code", code, "--in", src, "--out", enc)[0] == 0
    assert _run(capsys, "decode", "--code", code, "--in", enc, "--out", dec, "--erase", "1,4")[0] == 0
    assert dec.read_bytes() == src.read_bytes()


def test_selftest(capsys):
    rc, out, _ = _run(capsys, "selftest", "--json")
    doc = json.loads(out)
    assert rc == 0 and doc["ok"] and len(doc["fixtures"]) == 8


def test_bench_csv(capsys):
    rc, out, _ = _run(capsys, "bench", "--family", "evenodd-like", "--k", 15, "--L", 5, "--r", 3, "--stripes", 5, "--csv")
    assert rc == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["measured_xors"] == rows[0]["predicted_xors"] == "138"
    assert rows[0]["per_bit_measured"] == "23/10"


def test_bench_classical_family(capsys):
    rc, out, _ = _run(capsys, "bench", "--family", "evenodd", "--k", 5, "--L", 5, "--stripes", 2, "--json")
    assert rc == 0 and json.loads(out)["family"] == "evenodd"


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cslnc", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "selftest" in proc.stdout
