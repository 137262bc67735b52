from itertools import combinations

import numpy as np
import pytest

from cslnc.arraycode import (
    ErasureDecoder,
    closed_form_applicable,
    decode,
    decode_closed_form,
    decode_full,
    decode_generic,
    default_generators,
    encode,
    evenodd_S,
    falsify_beyond_bound,
    is_mds,
    is_mds_sampled,
    make_eq42,
    make_evenodd,
    make_evenodd_like,
    make_gen_evenodd,
    make_gen_rdp,
    make_rdp,
    make_rdp_like,
    make_vandermonde_circulant,
    make_xi_6_3,
    max_k_bound,
    rdp_sched_generators,
)
from cslnc.fixtures import fx_xi
from cslnc.kernels import IndexSetJ, build_standard
from cslnc.ringmat import RingPoly, rank_p


def _rand_msgs(rng, code):
    return rng.integers(0, code.p, (code.k, code.J))


def _round_trip(code, rng, method="auto", trials=None):
    subsets = list(combinations(range(code.n), code.k))
    if trials is not None:
        idx = rng.choice(len(subsets), size=min(trials, len(subsets)), replace=False)
        subsets = [subsets[i] for i in idx]
    for cols in subsets:
        m = _rand_msgs(rng, code)
        stripe = encode(code, m)
        got = decode(code, cols, stripe[list(cols)], method)
        assert np.array_equal(got, m), (code.family, cols, method)


# ---------------------------------------------------------------------------
# classical families


def test_evenodd_S_matrices():
    assert not evenodd_S(0, 5).any()
    S2 = evenodd_S(2, 5)
    assert S2[2].tolist() == [1, 1, 1, 1] and S2.sum() == 4


@pytest.mark.parametrize("L", [3, 5, 7])
def test_evenodd_is_mds(L):
    code = make_evenodd(L, L)
    assert code.n == L + 2 and code.systematic
    assert is_mds(code).mds


@pytest.mark.parametrize("L,r", [(5, 3), (7, 3)])
def test_generalized_evenodd_is_mds(L, r):
    assert is_mds(make_gen_evenodd(L, r, L)).mds


@pytest.mark.parametrize("L", [3, 5, 7])
def test_rdp_is_mds(L):
    code = make_rdp(L - 1, L)
    assert is_mds(code).mds
    assert np.array_equal(code.kernels[0, code.k], np.eye(code.J, dtype=np.int64))


def test_generalized_rdp_r3():
    assert is_mds(make_gen_rdp(4, 3, 5)).mds


def test_classical_parameter_checks():
    with pytest.raises(ValueError):
        make_evenodd(6, 5)
    with pytest.raises(ValueError):
        make_rdp(5, 5)
    with pytest.raises(ValueError):
        make_evenodd(3, 9)


def test_xi_fixture():
    ok, detail = fx_xi()
    assert ok, detail
    xi = make_xi_6_3()
    assert not xi.systematic
    assert is_mds(xi).mds and is_mds(xi).checked == 20


# ---------------------------------------------------------------------------
# circulant families


def test_default_generators_are_digits():
    gens = default_generators(2, 5, 5)
    assert [g.coeffs for g in gens][:3] == [(1, 0, 0, 0, 0), (0, 1, 0, 0, 0), (1, 1, 0, 0, 0)]
    assert [g.coeffs[:2] for g in default_generators(3, 5, 4)] == [(1, 0), (2, 0), (0, 1), (1, 1)]


def test_rdp_sched_generators():
    spec = build_standard(2, 5)
    gens = rdp_sched_generators(5, 3, spec)
    one, x = RingPoly.one(2, 5), RingPoly.x(2, 5)
    assert gens == [one, one + x, x]
    for i, A in enumerate(rdp_sched_generators(5, 15, spec), start=1):
        bits = [(i >> b) & 1 for b in range(4)]
        want = RingPoly.from_coeffs(2, 5, [sum(bits) % 2] + bits)
        assert A * spec.tau == want


@pytest.mark.parametrize("r", [2, 3])
@pytest.mark.parametrize("maker", [make_evenodd_like, make_rdp_like])
def test_binary_L3_maximal_k(maker, r):
    spec = build_standard(2, 3)
    code = maker(3, r, spec)
    assert is_mds(code).mds


@pytest.mark.parametrize("maker", [make_evenodd_like, make_rdp_like])
def test_binary_L5_r2_maximal_k(maker):
    code = maker(15, 2, build_standard(2, 5))
    rep = is_mds(code)
    assert rep.mds and rep.checked == 136


@pytest.mark.parametrize("maker", [make_evenodd_like, make_rdp_like])
def test_ternary_L5_r2_maximal_k(maker):
    spec = build_standard(3, 5)
    assert max_k_bound(3, 5) == 80
    code = maker(12, 2, spec)
    assert is_mds(code).mds


def test_odd_characteristic_r3_is_not_mds():
    # A = 1 and A = 2 = -1 have equal squares, so the third parity column
    # cannot separate them.
    spec = build_standard(3, 5)
    code = make_evenodd_like(15, 3, spec)
    rep = is_mds(code)
    assert not rep.mds
    assert rep.witness is not None
    small = make_evenodd_like(2, 3, spec)
    rep = is_mds(small)
    assert not rep.mds
    assert rank_p(small.column_blocks(rep.witness), 3) < 2 * spec.J
    # two generators whose squares differ keep the code MDS
    gens = [RingPoly.from_coeffs(3, 5, [1]), RingPoly.from_coeffs(3, 5, [0, 1])]
    assert is_mds(make_evenodd_like(2, 3, spec, gens)).mds


def test_duplicate_generators_rejected_and_not_mds():
    spec = build_standard(2, 5)
    g = RingPoly.x(2, 5)
    with pytest.raises(ValueError, match="distinct"):
        make_evenodd_like(2, 2, spec, [g, g])
    assert not is_mds(make_evenodd_like(2, 2, spec, [g, g], strict=False)).mds


def test_k_bound_enforced():
    spec = build_standard(2, 5)
    with pytest.raises(ValueError, match="exceeds the maximal k"):
        make_evenodd_like(16, 2, spec)
    with pytest.raises(ValueError, match="degree"):
        make_evenodd_like(1, 2, spec, [RingPoly.monomial(2, 5, 4)])
    assert make_evenodd_like(16, 2, spec, strict=False).k == 16


def test_max_k_bound_values():
    assert max_k_bound(2, 3) == 3
    assert max_k_bound(2, 5) == 15
    assert max_k_bound(2, 7) == 7
    assert max_k_bound(3, 5) == 80
    assert max_k_bound(5, 3) == 24


def test_eq42_example_and_gcd_rejection():
    spec = build_standard(2, 7, IndexSetJ(2, 7, (1, 2, 4)))
    polys = [RingPoly.from_coeffs(2, 7, c) for c in ([1], [0, 1], [0, 0, 1])]
    code = make_eq42(3, 2, spec, polys)
    assert not code.systematic and code.n == 5
    assert is_mds(code).mds
    with pytest.raises(ValueError, match="gcd"):
        make_eq42(3, 2, spec, polys, condition="full")
    with pytest.raises(ValueError, match="gcd"):
        make_eq42(2, 2, spec, [polys[0], polys[0]])
    rng = np.random.default_rng(0)
    for cols in combinations(range(5), 3):
        assert closed_form_applicable(code, cols)
    _round_trip(code, rng, "closed")


# ---------------------------------------------------------------------------
# encoding and decoding


@pytest.mark.parametrize(
    "code",
    [
        make_evenodd(5, 5),
        make_rdp(4, 5),
        make_evenodd_like(7, 3, build_standard(2, 5)),
        make_rdp_like(7, 3, build_standard(2, 5)),
        make_evenodd_like(5, 2, build_standard(3, 5)),
        make_rdp_like(4, 2, build_standard(5, 3)),
    ],
    ids=["evenodd", "rdp", "eo-like", "rdp-like", "eo-like-p3", "rdp-like-p5"],
)
def test_decoders_agree(code):
    rng = np.random.default_rng(1)
    subsets = list(combinations(range(code.n), code.k))
    idx = rng.choice(len(subsets), size=min(25, len(subsets)), replace=False)
    for i in idx:
        cols = subsets[i]
        m = _rand_msgs(rng, code)
        rows = encode(code, m)[list(cols)]
        ref = decode_full(code, cols, rows)
        assert np.array_equal(ref, m)
        assert np.array_equal(decode_generic(code, cols, rows), m)
        if closed_form_applicable(code, cols):
            assert np.array_equal(decode_closed_form(code, cols, rows), m)


def test_encode_is_systematic():
    code = make_rdp_like(5, 2, build_standard(2, 7))
    m = np.random.default_rng(0).integers(0, 2, (5, code.J))
    s = encode(code, m)
    assert s.shape == (7, code.J) and np.array_equal(s[:5], m)


def test_decode_rejects_unrecoverable_pattern():
    spec = build_standard(2, 5)
    g = RingPoly.x(2, 5)
    code = make_evenodd_like(2, 2, spec, [g, g], strict=False)
    m = np.zeros((2, code.J), dtype=np.int64)
    rows = encode(code, m)[[2, 3]]
    with pytest.raises(ValueError):
        decode(code, [2, 3], rows)


def test_erasure_decoder_caches_and_reports_path():
    code = make_evenodd_like(15, 3, build_standard(2, 5))
    dec = ErasureDecoder(code)
    rng = np.random.default_rng(2)
    cols = [0, 1] + list(range(3, 16))
    assert dec.path(cols) == "closed"
    for _ in range(5):
        m = _rand_msgs(rng, code)
        assert np.array_equal(dec(cols, encode(code, m)[cols]), m)
    assert len(dec._closed) == 1
    assert ErasureDecoder(code, "generic").path(cols) == "generic"
    with pytest.raises(ValueError):
        ErasureDecoder(code, "magic")


def test_sampled_mds_check():
    code = make_evenodd_like(15, 2, build_standard(2, 5))
    rep = is_mds_sampled(code, samples=50, seed=0)
    assert rep.mds and not rep.exhaustive and rep.checked == 50


def test_parallel_mds_matches_serial():
    code = make_rdp_like(15, 2, build_standard(2, 5))
    a, b = is_mds(code), is_mds(code, jobs=2, chunk=16)
    assert a.mds == b.mds and a.checked == b.checked


# ---------------------------------------------------------------------------
# beyond the bound


@pytest.mark.parametrize("twin", [False, True])
def test_falsifier_finds_no_mds_code(twin):
    rep = falsify_beyond_bound(2, 3, 2, twin=twin)
    assert rep.k == 4 and rep.selections == 35
    assert rep.mds_found == 0 and rep.witness is None
    assert rep.to_json()["bound"] == 3


def test_vandermonde_circulant_matches_evenodd_like():
    spec = build_standard(2, 5)
    gens = default_generators(2, 5, 4)
    a = make_vandermonde_circulant(4, 2, spec, gens)
    b = make_evenodd_like(4, 2, spec)
    assert np.array_equal(a.kernels, b.kernels)
