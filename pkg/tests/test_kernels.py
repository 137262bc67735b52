import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cslnc.field import ExtElem, field_for
from cslnc.fixtures import GRID, fx_g_l7, fx_h_hbar_l7, fx_h_l9
from cslnc.kernels import (
    IndexSetJ,
    KernelSpec,
    build_from_U,
    build_standard,
    build_vl_rows,
    canonical_J,
    closed_index_sets,
    cyclotomic_cosets,
    nonvanishing_on,
    q_prime,
    verify_spec,
)
from cslnc.ringmat import RingPoly, as_circulant, eval_at, matmul_p


def test_cyclotomic_cosets_partition():
    assert cyclotomic_cosets(2, 7) == [(0,), (1, 2, 4), (3, 5, 6)]
    assert cyclotomic_cosets(2, 9) == [(0,), (1, 2, 4, 5, 7, 8), (3, 6)]
    for p, L in GRID:
        cos = cyclotomic_cosets(p, L)
        assert sorted(j for c in cos for j in c) == list(range(L))


def test_cosets_need_coprime():
    with pytest.raises(ValueError):
        cyclotomic_cosets(3, 9)


def test_index_set_validation():
    with pytest.raises(ValueError):
        IndexSetJ(2, 7, (1, 2))
    with pytest.raises(ValueError):
        IndexSetJ(2, 7, ())
    s = IndexSetJ(2, 7, (4, 1, 2))
    assert s.members == (1, 2, 4)
    assert s.complement == (0, 3, 5, 6)
    assert s.barred.members == (3, 5, 6)


def test_closed_sets_are_unions_of_cosets():
    sets = closed_index_sets(2, 9)
    assert len(sets) == 7
    for s in sets:
        assert all(j * 2 % 9 in s for j in s)


def test_canonical_J_size():
    for p, L in GRID:
        J = canonical_J(p, L)
        assert J.J == sum(1 for j in range(1, L) if np.gcd(j, L) == 1)


@pytest.mark.parametrize("fx", [fx_h_l9, fx_g_l7, fx_h_hbar_l7])
def test_worked_example_matrices(fx):
    ok, detail = fx()
    assert ok, detail


def test_binary_L5_standard():
    spec = build_standard(2, 5)
    assert spec.tau.coeffs == (1, 1, 0, 0, 0)
    assert spec.H.tolist() == [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 1, 1, 1]]
    assert spec.h == 4


def test_tau_for_L7():
    spec = build_standard(2, 7, IndexSetJ(2, 7, (1, 2, 4)))
    assert spec.tau.coeffs == (1, 1, 1, 0, 1, 0, 0)
    assert spec.tau.degree == 4


@pytest.mark.parametrize("p,L", GRID)
def test_tau_roots_are_the_complement(p, L):
    spec = build_standard(p, L)
    F, beta = field_for(p, L)
    assert spec.tau.degree == L - spec.J
    for j in range(L):
        v = eval_at(spec.tau, ExtElem(F, F.pow(beta.value, j))).value
        assert (v == 0) == (j not in spec.Jset)
    assert nonvanishing_on(spec.tau, beta, spec.Jset)


@pytest.mark.parametrize("p,L", GRID)
def test_G_H_shapes_and_inverse(p, L):
    spec = build_standard(p, L)
    J = spec.J
    assert spec.G.shape == (J, L) and spec.H.shape == (L, J)
    assert np.array_equal(matmul_p(spec.G, spec.H, p=p), np.eye(J, dtype=np.int64))
    # Q' = tau(C) G^T and G Q' = G tau G^T
    Qp = q_prime(spec)
    assert Qp.shape == (L, J)
    assert np.array_equal(matmul_p(spec.G, Qp, p=p), spec.GfGt(spec.tau))


@pytest.mark.parametrize("p,L", GRID)
def test_vl_rows_alternative(p, L):
    spec = build_vl_rows(p, L)
    assert np.array_equal(matmul_p(spec.G, spec.H, p=p), np.eye(spec.J, dtype=np.int64))


@pytest.mark.parametrize("p,L", GRID)
def test_identity_families_over_grid(p, L):
    res = verify_spec(build_standard(p, L), samples=40, seed=1)
    for name, r in res.items():
        assert r.passed, (name, r.witness)


def test_identity_families_non_canonical_J():
    for Jset in closed_index_sets(2, 9):
        spec = build_standard(2, 9, Jset)
        res = verify_spec(spec, samples=15, seed=2)
        for name, r in res.items():
            if name in ("hbar_product", "hbar_inverse") and spec.H_bar is None:
                continue
            assert r.passed or r.checked == 0, (Jset.members, name)


def test_h_bar_for_small_index_sets():
    # J = {0} is self-conjugate, so H_bar exists; J = {1,2,4} at L = 7 has a
    # conjugate set disjoint from J and still gets a valid H_bar
    assert build_standard(2, 7, IndexSetJ(2, 7, (0,))).H_bar is not None
    assert build_standard(2, 7, IndexSetJ(2, 7, (1, 2, 4))).H_bar is not None


def test_build_from_U_rejects_non_gfp():
    F, beta = field_for(2, 7)
    Jset = IndexSetJ(2, 7, (1, 2, 4))
    U = np.zeros((3, 7), dtype=np.int64)
    U[0, 1] = U[1, 2] = U[2, 4] = beta.value  # scaling by beta breaks conjugacy
    with pytest.raises(ValueError):
        build_from_U(2, 7, Jset, U=U)


@pytest.mark.parametrize("p,L", [(2, 5), (2, 7), (3, 5), (5, 7)])
def test_json_round_trip(p, L):
    spec = build_standard(p, L)
    back = KernelSpec.from_json(json.loads(spec.dumps()))
    assert np.array_equal(back.G, spec.G) and np.array_equal(back.H, spec.H)
    assert back.tau == spec.tau and back.Jset == spec.Jset
    assert np.array_equal(back.H_bar, spec.H_bar)


def test_json_rejects_inconsistent_pair():
    doc = build_standard(2, 5).to_json()
    doc["H"][0][0] = 0
    with pytest.raises(ValueError):
        KernelSpec.from_json(doc)


@given(st.sampled_from([(2, 5), (2, 7), (3, 5)]), st.data())
def test_GfH_is_multiplicative(pl, data):
    p, L = pl
    spec = build_standard(p, L)
    f, g = (
        RingPoly.from_coeffs(p, L, data.draw(st.lists(st.integers(0, p - 1), min_size=L, max_size=L)))
        for _ in range(2)
    )
    assert np.array_equal(matmul_p(spec.GfH(f), spec.GfH(g), p=p), spec.GfH(f * g))
    assert np.array_equal(spec.circ(f), as_circulant(f))


@pytest.mark.parametrize("p,L", GRID)
def test_construction_is_invariant_under_frobenius(p, L):
    # beta -> beta^p permutes J onto itself, so G, H, H_bar and tau are unchanged
    F, beta = field_for(p, L)
    conj = ExtElem(F, F.pow(beta.value, p))
    a, b = build_standard(p, L), build_standard(p, L, beta=conj)
    assert np.array_equal(a.G, b.G) and np.array_equal(a.H, b.H)
    assert np.array_equal(a.H_bar, b.H_bar) and a.tau == b.tau
    assert all(r.passed for r in verify_spec(b, samples=10, seed=3).values())
