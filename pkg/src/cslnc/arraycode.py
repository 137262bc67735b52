"""Array codes as k x n block generator matrices of J x J kernels over GF(p).

Covers EVENODD and RDP with their generalizations, the (6, 3) XI-Code
instance, the nonsystematic tau-based codes, and the EVENODD-like /
RDP-like families built from k distinct low-degree circulants. Includes MDS
verification, encoding, erasure decoding (closed form and generic), and the
exhaustive falsifier for the maximal-k bound.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, islice
from math import comb
from typing import Sequence

import numpy as np

from .field import is_prime, mult_order, poly_divmod, poly_gcd
from .kernels import KernelSpec, build_standard
from .netcode import a_hat_pool, decode_matrix_from_psi, decode_matrix_tau_from_psi
from .ringmat import (
    PolyMatrix,
    RingPoly,
    SingularMatrixError,
    as_circulant,
    inv_p,
    matmul_p,
    rank_p,
    spectral_ranks,
)

__all__ = [
    "ArrayCode",
    "MDSReport",
    "make_evenodd",
    "make_gen_evenodd",
    "make_rdp",
    "make_gen_rdp",
    "make_xi_6_3",
    "make_eq42",
    "make_evenodd_like",
    "make_rdp_like",
    "make_vandermonde_circulant",
    "default_generators",
    "rdp_sched_generators",
    "a_hat",
    "is_mds",
    "is_mds_sampled",
    "encode",
    "decode",
    "decode_generic",
    "decode_closed_form",
    "ErasureDecoder",
    "max_k_bound",
    "falsify_beyond_bound",
    "MDS_SUBSET_BUDGET",
    "default_jobs",
]

MDS_SUBSET_BUDGET = 10**6
FALSIFIER_BUDGET = 10**5


def default_jobs() -> int:
    env = os.environ.get("CSLNC_JOBS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass
class ArrayCode:
    """Definition-1 array code.

    ``kernels[i, j]`` is the J x J kernel from data unit i to coded column j
    (both 0-based). ``params`` holds family-specific data such as the
    generator polynomials, stored as coefficient tuples.
    """

    p: int
    L: int
    spec: KernelSpec
    k: int
    n: int
    systematic: bool
    kernels: np.ndarray  # shape (k, n, J, J)
    family: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        J = self.spec.J
        self.kernels = np.asarray(self.kernels, dtype=np.int64) % self.p
        if self.kernels.shape != (self.k, self.n, J, J):
            raise ValueError(f"kernel table has shape {self.kernels.shape}, expected {(self.k, self.n, J, J)}")
        if self.systematic:
            for i in range(self.k):
                for j in range(self.k):
                    want = np.eye(J, dtype=np.int64) if i == j else np.zeros((J, J), dtype=np.int64)
                    if not np.array_equal(self.kernels[i, j], want):
                        raise ValueError("systematic code must have identity data block")

    @property
    def J(self) -> int:
        return self.spec.J

    @property
    def r(self) -> int:
        return self.n - self.k

    @property
    def generator(self) -> np.ndarray:
        """kJ x nJ block generator matrix."""
        k, n, J = self.k, self.n, self.J
        return self.kernels.transpose(0, 2, 1, 3).reshape(k * J, n * J)

    def column_blocks(self, cols: Sequence[int]) -> np.ndarray:
        """kJ x (len(cols) J) submatrix of the generator."""
        k, J = self.k, self.J
        sub = self.kernels[:, list(cols)]
        return sub.transpose(0, 2, 1, 3).reshape(k * J, len(cols) * J)

    def generator_polys(self) -> list[RingPoly] | None:
        gens = self.params.get("generators")
        if gens is None:
            return None
        return [RingPoly.from_coeffs(self.p, self.L, g) for g in gens]


def _table(k: int, n: int, J: int) -> np.ndarray:
    return np.zeros((k, n, J, J), dtype=np.int64)


def _systematic_table(k: int, r: int, J: int) -> np.ndarray:
    t = _table(k, k + r, J)
    for i in range(k):
        t[i, i] = np.eye(J, dtype=np.int64)
    return t


def _check_odd_prime(L: int) -> None:
    if L < 3 or not is_prime(L):
        raise ValueError(f"L = {L} must be an odd prime")


def _binary_spec(L: int) -> KernelSpec:
    _check_odd_prime(L)
    return build_standard(2, L)


# ---------------------------------------------------------------------------
# classical families (p = 2, L odd prime, G = [I 0], H = [I 1]^T)


def evenodd_S(i: int, L: int) -> np.ndarray:
    """S_0 = 0; S_i has row L - i (1-based) set to all ones."""
    S = np.zeros((L - 1, L - 1), dtype=np.int64)
    if i:
        S[L - i - 1] = 1
    return S


def make_evenodd(k: int, L: int) -> ArrayCode:
    """(k+2, k) EVENODD via K_{i,k+2} = G C^{i-1} G^T + S_{i-1}."""
    spec = _binary_spec(L)
    if not 1 <= k <= L:
        raise ValueError(f"EVENODD needs 1 <= k <= L (k={k}, L={L})")
    J = spec.J
    t = _systematic_table(k, 2, J)
    for i in range(k):
        xi = RingPoly.monomial(2, L, i)
        t[i, k] = np.eye(J, dtype=np.int64)
        K = (spec.GfGt(xi) + evenodd_S(i, L)) % 2
        if not np.array_equal(K, spec.GfH(xi)):
            raise AssertionError("EVENODD S-form disagrees with G C^i H")
        t[i, k + 1] = K
    return ArrayCode(2, L, spec, k, k + 2, True, t, "evenodd", {"generators": [xi_coeffs(L, i) for i in range(k)]})


def xi_coeffs(L: int, e: int) -> tuple[int, ...]:
    c = [0] * L
    c[e % L] = 1
    return tuple(c)


def make_gen_evenodd(k: int, r: int, L: int) -> ArrayCode:
    """K_{i,k+j} = G C^{(i-1)(j-1)} H."""
    spec = _binary_spec(L)
    if not 1 <= k <= L or r < 1:
        raise ValueError(f"generalized EVENODD needs 1 <= k <= L and r >= 1 (k={k}, r={r}, L={L})")
    t = _systematic_table(k, r, spec.J)
    for i in range(k):
        for j in range(r):
            t[i, k + j] = spec.GfH(RingPoly.monomial(2, L, i * j))
    return ArrayCode(
        2, L, spec, k, k + r, True, t, "gen-evenodd", {"generators": [xi_coeffs(L, i) for i in range(k)]}
    )


def make_rdp(k: int, L: int) -> ArrayCode:
    return _rdp(k, 2, L, "rdp")


def make_gen_rdp(k: int, r: int, L: int) -> ArrayCode:
    return _rdp(k, r, L, "gen-rdp")


def _rdp(k: int, r: int, L: int, family: str) -> ArrayCode:
    """K_{i,k+1} = I, K_{i,k+j} = G (C^{(i-1)(j-1)} + C^{(L-1)(j-1)}) G^T."""
    spec = _binary_spec(L)
    if not 1 <= k < L or r < 1:
        raise ValueError(f"RDP needs 1 <= k < L and r >= 1 (k={k}, r={r}, L={L})")
    t = _systematic_table(k, r, spec.J)
    for i in range(k):
        t[i, k] = np.eye(spec.J, dtype=np.int64)
        for j in range(1, r):
            f = RingPoly.monomial(2, L, i * j) + RingPoly.monomial(2, L, (L - 1) * j)
            t[i, k + j] = spec.GfGt(f)
    return ArrayCode(2, L, spec, k, k + r, True, t, family, {})


_XI_BLOCKS = [
    [
        "I",
        [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1]],
        [[0, 0, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 0, 0]],
        [[0, 0, 0, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 0, 0, 0]],
        [[0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 0]],
        "I",
    ],
    [
        "0",
        [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0]],
        [[0, 0, 0, 0], [0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]],
        [[1, 0, 0, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 0, 0, 1]],
        [[0, 0, 0, 1], [1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
        [[0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 0], [0, 0, 0, 1]],
    ],
    [
        "0",
        [[0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1]],
        [[0, 0, 0, 1], [1, 0, 0, 0], [0, 0, 0, 1], [1, 0, 0, 0]],
        [[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
        [[1, 0, 0, 0], [0, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0]],
        [[1, 0, 0, 0], [0, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0]],
    ],
]


def make_xi_6_3() -> ArrayCode:
    """The fixed (6, 3) XI-Code block generator matrix for L = 5."""
    spec = _binary_spec(5)
    t = _table(3, 6, 4)
    for i, row in enumerate(_XI_BLOCKS):
        for j, blk in enumerate(row):
            if blk == "I":
                t[i, j] = np.eye(4, dtype=np.int64)
            elif blk == "0":
                continue
            else:
                t[i, j] = np.array(blk, dtype=np.int64)
    return ArrayCode(2, 5, spec, 3, 6, False, t, "xi", {})


# ---------------------------------------------------------------------------
# circulant-generator families


a_hat = a_hat_pool


def _digits(v: int, p: int, width: int | None = None) -> list[int]:
    out = []
    while v or (width is not None and len(out) < width):
        out.append(v % p)
        v //= p
        if width is not None and len(out) >= width and not v:
            break
    return out


def default_generators(p: int, L: int, k: int) -> list[RingPoly]:
    """A_i = sum_j d_{i,j} x^j with d_{i,j} the base-p digits of i (i = 1..k)."""
    return [RingPoly.from_coeffs(p, L, _digits(i, p)) for i in range(1, k + 1)]


def rdp_sched_generators(L: int, k: int, spec: KernelSpec | None = None) -> list[RingPoly]:
    """Generators A_i whose product A_i tau equals delta_i + sum_j b_{i,j} x^{j+1}.

    Here b_{i,j} are the bits of i and delta_i is the parity of its bit count,
    so the right-hand side vanishes at x = 1 and is divisible by tau = x + 1.
    """
    tau = (spec.tau if spec is not None else None) or RingPoly.from_coeffs(2, L, [1, 1])
    if tau != RingPoly.from_coeffs(2, L, [1, 1]):
        raise ValueError("scheduling generators need tau = x + 1 (p = 2, J = L - 1)")
    out = []
    for i in range(1, k + 1):
        bits = _digits(i, 2)
        delta = sum(bits) % 2
        prod = [delta] + bits  # delta + sum b_j x^{j+1}, degree < L assumed below
        if len(prod) > L:
            raise ValueError(f"i = {i} has too many bits for L = {L}")
        # exact division by (x + 1) over GF(2)
        q = [0] * (len(prod) - 1)
        rem = list(prod)
        for d in range(len(prod) - 1, 0, -1):
            c = rem[d]
            q[d - 1] = c
            rem[d] ^= c
            rem[d - 1] ^= c
        assert rem[0] == 0
        out.append(RingPoly.from_coeffs(2, L, q))
    return out


def _validate_generators(p: int, L: int, gens: Sequence[RingPoly], strict: bool) -> None:
    m = mult_order(p, L)
    if any(g.is_zero for g in gens) and strict:
        raise ValueError("generators must be nonzero")
    if len(set(gens)) != len(gens) and strict:
        raise ValueError("generators must be distinct")
    if strict and any(g.degree >= m for g in gens):
        raise ValueError(f"generators must have degree < m_L = {m}")


def _check_k_r(p: int, L: int, k: int, r: int, strict: bool) -> None:
    bound = max_k_bound(p, L)
    if k < 1:
        raise ValueError("k must be >= 1")
    if strict and k > bound:
        raise ValueError(f"k = {k} exceeds the maximal k = p^m_L - 1 = {bound} for (p={p}, L={L})")
    if strict and not 1 <= r <= 3:
        raise ValueError(f"r = {r} outside 1..3")


def make_evenodd_like(
    k: int,
    r: int,
    spec: KernelSpec,
    generators: Sequence[RingPoly] | None = None,
    strict: bool = True,
) -> ArrayCode:
    """K_{i,k+j} = G A_i^{j-1} H with k distinct A_i of degree < m_L.

    ``strict=False`` skips the k, r and generator checks (the code may then
    fail to be MDS, which is useful for tests and operation counting).
    """
    p, L = spec.p, spec.L
    _check_k_r(p, L, k, r, strict)
    gens = list(generators) if generators is not None else default_generators(p, L, k)
    if len(gens) != k:
        raise ValueError("need exactly k generators")
    _validate_generators(p, L, gens, strict)
    t = _systematic_table(k, r, spec.J)
    for i, A in enumerate(gens):
        for j in range(r):
            t[i, k + j] = spec.GfH(A**j)
    return ArrayCode(p, L, spec, k, k + r, True, t, "evenodd-like", {"generators": [g.coeffs for g in gens]})


def make_rdp_like(
    k: int,
    r: int,
    spec: KernelSpec,
    generators: Sequence[RingPoly] | None = None,
    strict: bool = True,
) -> ArrayCode:
    """K_{i,k+j} = G (A_i tau)^{j-1} G^T.

    Default generators are the scheduling-friendly ones when p = 2 and
    tau = x + 1, otherwise the base-p digit rule.
    """
    p, L = spec.p, spec.L
    _check_k_r(p, L, k, r, strict)
    if generators is not None:
        gens = list(generators)
        rule = "custom"
    elif p == 2 and spec.tau == RingPoly.from_coeffs(2, L, [1, 1]):
        gens = rdp_sched_generators(L, k, spec)
        rule = "sched"
    else:
        gens = default_generators(p, L, k)
        rule = "digits"
    if len(gens) != k:
        raise ValueError("need exactly k generators")
    _validate_generators(p, L, gens, strict)
    t = _systematic_table(k, r, spec.J)
    for i, A in enumerate(gens):
        At = A * spec.tau
        for j in range(r):
            t[i, k + j] = spec.GfGt(At**j)
    return ArrayCode(
        p, L, spec, k, k + r, True, t, "rdp-like", {"generators": [g.coeffs for g in gens], "rule": rule}
    )


def make_vandermonde_circulant(
    k: int, r: int, spec: KernelSpec, generators: Sequence[RingPoly], twin: bool = False
) -> ArrayCode:
    """Systematic K_{i,k+j} = P A_i^{j-1} Q for arbitrary circulants (no checks)."""
    P, Q = spec.pq(twin)
    t = _systematic_table(k, r, spec.J)
    for i, A in enumerate(generators):
        for j in range(r):
            t[i, k + j] = matmul_p(P, as_circulant(A**j), Q, p=spec.p)
    return ArrayCode(
        spec.p, spec.L, spec, k, k + r, True, t, "custom", {"generators": [g.coeffs for g in generators]}
    )


def _nonvanishing_part(spec: KernelSpec) -> list[int]:
    """prod_{j in J} (x - beta^j) as a GF(p) coefficient list (low degree first)."""
    full = [(-1) % spec.p] + [0] * (spec.L - 1) + [1]
    tau = list(spec.tau.coeffs)
    q, rem = poly_divmod(full, tau, spec.p)
    assert not rem
    return q


def make_eq42(
    k: int, r: int, spec: KernelSpec, polys: Sequence[RingPoly], condition: str = "J"
) -> ArrayCode:
    """Nonsystematic K_{i,j} = G (f_i tau)^{j-1} G^T, j = 1..k+r.

    The pairwise condition on f_i - f_j is a gcd test against
    prod_{j in J}(x - beta^j) (``condition="J"``) or against x^L - 1
    (``condition="full"``).
    """
    p, L = spec.p, spec.L
    if len(polys) != k:
        raise ValueError("need exactly k polynomials")
    if condition == "full":
        modulus = [(-1) % p] + [0] * (L - 1) + [1]
    elif condition == "J":
        modulus = _nonvanishing_part(spec)
    else:
        raise ValueError("condition must be 'J' or 'full'")
    for a in range(k):
        for b in range(a + 1, k):
            diff = list((polys[a] - polys[b]).coeffs)
            g = poly_gcd(diff, modulus, p) if any(diff) else modulus
            if len(g) > 1:
                raise ValueError(f"gcd(f_{a + 1} - f_{b + 1}, modulus) != 1")
    n = k + r
    t = _table(k, n, spec.J)
    for i, f in enumerate(polys):
        ft = f * spec.tau
        for j in range(n):
            t[i, j] = spec.GfGt(ft**j)
    return ArrayCode(p, L, spec, k, n, False, t, "eq42", {"generators": [f.coeffs for f in polys]})


# ---------------------------------------------------------------------------
# MDS verification


@dataclass
class MDSReport:
    mds: bool
    checked: int
    total: int
    exhaustive: bool
    witness: tuple[int, ...] | None = None

    def to_json(self) -> dict:
        return {
            "mds": self.mds,
            "subsets_checked": self.checked,
            "subsets_total": self.total,
            "exhaustive": self.exhaustive,
            "witness": None if self.witness is None else list(self.witness),
        }


def _subset_full_rank(code: ArrayCode, cols: Sequence[int]) -> bool:
    return rank_p(code.column_blocks(cols), code.p) == code.k * code.J


def _check_chunk(args) -> tuple[int, tuple[int, ...] | None]:
    code, subsets = args
    for n_done, cols in enumerate(subsets, 1):
        if not _subset_full_rank(code, cols):
            return n_done, tuple(cols)
    return len(subsets), None


def is_mds(code: ArrayCode, jobs: int = 1, budget: int = MDS_SUBSET_BUDGET, chunk: int = 256) -> MDSReport:
    """Exhaustive rank check of every k-subset of coded columns."""
    total = comb(code.n, code.k)
    if total > budget:
        raise ValueError(f"C({code.n}, {code.k}) = {total} subsets exceeds the budget {budget}; use sampled mode")
    subsets = combinations(range(code.n), code.k)
    if jobs <= 1:
        checked, witness = _check_chunk((code, list(subsets)))
        return MDSReport(witness is None, checked, total, True, witness)
    chunks = []
    while True:
        part = list(islice(subsets, chunk))
        if not part:
            break
        chunks.append((code, part))
    checked = 0
    witness = None
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        for n_done, w in ex.map(_check_chunk, chunks):
            checked += n_done
            if w is not None and witness is None:
                witness = w
    return MDSReport(witness is None, checked, total, True, witness)


def is_mds_sampled(code: ArrayCode, samples: int = 1000, seed: int | None = 0) -> MDSReport:
    """Monte-Carlo MDS check on random k-subsets (not exhaustive)."""
    rng = np.random.default_rng(seed)
    total = comb(code.n, code.k)
    for s in range(1, samples + 1):
        cols = tuple(sorted(int(c) for c in rng.choice(code.n, code.k, replace=False)))
        if not _subset_full_rank(code, cols):
            return MDSReport(False, s, total, False, cols)
    return MDSReport(True, samples, total, False, None)


# ---------------------------------------------------------------------------
# encoding and decoding


def encode(code: ArrayCode, messages: np.ndarray) -> np.ndarray:
    """k x J messages -> n x J stripe."""
    messages = np.asarray(messages, dtype=np.int64) % code.p
    if messages.shape != (code.k, code.J):
        raise ValueError(f"messages must have shape {(code.k, code.J)}")
    flat = messages.reshape(1, -1)
    return matmul_p(flat, code.generator, p=code.p).reshape(code.n, code.J)


def _prep(code: ArrayCode, cols: Sequence[int], rows: np.ndarray) -> tuple[list[int], np.ndarray]:
    cols = [int(c) for c in cols]
    if len(cols) != code.k or len(set(cols)) != code.k:
        raise ValueError(f"need exactly k = {code.k} distinct surviving columns")
    if any(not 0 <= c < code.n for c in cols):
        raise ValueError("column index out of range")
    rows = np.asarray(rows, dtype=np.int64) % code.p
    if rows.shape != (code.k, code.J):
        raise ValueError(f"surviving rows must have shape {(code.k, code.J)}")
    order = np.argsort(cols)
    return [cols[i] for i in order], rows[order]


def decode_full(code: ArrayCode, cols: Sequence[int], rows: np.ndarray) -> np.ndarray:
    """Invert the full kJ x kJ column submatrix (reference path)."""
    cols, rows = _prep(code, cols, rows)
    try:
        Dinv = inv_p(code.column_blocks(cols), code.p)
    except SingularMatrixError as exc:
        raise SingularMatrixError(f"columns {cols} do not determine the data: code is not MDS there") from exc
    return matmul_p(rows.reshape(1, -1), Dinv, p=code.p).reshape(code.k, code.J)


def decode_generic(code: ArrayCode, cols: Sequence[int], rows: np.ndarray) -> np.ndarray:
    """Generic GF(p) decoding; systematic codes only solve for erased data columns."""
    if not code.systematic:
        return decode_full(code, cols, rows)
    cols, rows = _prep(code, cols, rows)
    p, k, J = code.p, code.k, code.J
    out = np.zeros((k, J), dtype=np.int64)
    known = {c: rows[t] for t, c in enumerate(cols) if c < k}
    for c, v in known.items():
        out[c] = v
    missing = [i for i in range(k) if i not in known]
    if not missing:
        return out
    parity = [(t, c) for t, c in enumerate(cols) if c >= k]
    rhs = []
    for t, c in parity:
        y = rows[t].copy()
        for i, v in known.items():
            y = (y - v @ code.kernels[i, c]) % p
        rhs.append(y)
    M = np.concatenate(
        [np.concatenate([code.kernels[i, c] for _, c in parity], axis=1) for i in missing], axis=0
    )
    try:
        Minv = inv_p(M, p)
    except SingularMatrixError as exc:
        raise SingularMatrixError(f"columns {cols} do not determine the data: code is not MDS there") from exc
    sol = matmul_p(np.concatenate(rhs).reshape(1, -1), Minv, p=p).reshape(len(missing), J)
    for idx, i in enumerate(missing):
        out[i] = sol[idx]
    return out


def _closed_form_kind(code: ArrayCode) -> str | None:
    if code.family in ("evenodd-like", "gen-evenodd", "evenodd"):
        return "gh"
    if code.family in ("rdp-like", "eq42"):
        return "ggt"
    return None


def closed_form_psi(code: ArrayCode, cols: Sequence[int]) -> tuple[PolyMatrix, list[bool]]:
    """Psi(x) for the surviving columns, plus which columns carry a constant I kernel.

    For G-H families the column kernels are G Psi H. For G-G^T families
    they are G Psi tau G^T, after constant I kernels are multiplied by
    G tau G^T on the received side.
    """
    p, L, k = code.p, code.L, code.k
    gens = code.generator_polys()
    if gens is None:
        raise ValueError("code has no generator polynomials")
    one = RingPoly.one(p, L)
    zero = RingPoly.zero(p, L)
    tau = code.spec.tau
    kind = _closed_form_kind(code)
    cols_out, const = [], []
    for c in cols:
        if code.family == "eq42":
            if c == 0:
                col = [one] * k
                const.append(True)
            else:
                col = [g**c * tau ** (c - 1) for g in gens]
                const.append(False)
        elif c < k:
            col = [one if i == c else zero for i in range(k)]
            const.append(kind == "ggt")
        else:
            j = c - k
            if kind == "gh":
                col = [g**j for g in gens]
                const.append(False)
            elif j == 0:
                col = [one] * k
                const.append(True)
            else:
                col = [g**j * tau ** (j - 1) for g in gens]
                const.append(False)
        cols_out.append(col)
    psi = PolyMatrix(p, L, tuple(tuple(cols_out[c][i] for c in range(k)) for i in range(k)))
    return psi, const


def closed_form_matrix(code: ArrayCode, cols: Sequence[int]) -> tuple[np.ndarray, list[bool]]:
    kind = _closed_form_kind(code)
    if kind is None:
        raise ValueError(f"no closed-form decoder for family {code.family!r}")
    psi, const = closed_form_psi(code, cols)
    if kind == "gh":
        return decode_matrix_from_psi(code.spec, psi), const
    return decode_matrix_tau_from_psi(code.spec, psi), const


def closed_form_applicable(code: ArrayCode, cols: Sequence[int]) -> bool:
    kind = _closed_form_kind(code)
    if kind is None or code.generator_polys() is None:
        return False
    if kind == "ggt" and code.spec.H_bar is None:
        return False
    psi, _ = closed_form_psi(code, sorted(cols))
    ranks = spectral_ranks(psi, code.spec.Jset.members)
    return all(v == code.k for v in ranks.values())


def decode_closed_form(code: ArrayCode, cols: Sequence[int], rows: np.ndarray, D=None) -> np.ndarray:
    """Decode with the explicit inverse built from det and adjugate in the ring."""
    cols, rows = _prep(code, cols, rows)
    if D is None:
        D, const = closed_form_matrix(code, cols)
    else:
        D, const = D
    p = code.p
    y = rows.copy()
    if any(const):
        GtG = code.spec.GfGt(code.spec.tau)
        for t, is_const in enumerate(const):
            if is_const:
                y[t] = y[t] @ GtG % p
    return matmul_p(y.reshape(1, -1), D, p=p).reshape(code.k, code.J)


def decode(code: ArrayCode, cols: Sequence[int], rows: np.ndarray, method: str = "auto") -> np.ndarray:
    """Recover the k data units from k surviving coded columns.

    ``method`` is "auto" (closed form when its spectral precondition holds,
    generic otherwise), "closed", "generic" or "full".
    """
    if method == "generic":
        return decode_generic(code, cols, rows)
    if method == "full":
        return decode_full(code, cols, rows)
    if method == "closed":
        return decode_closed_form(code, cols, rows)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    if closed_form_applicable(code, cols):
        return decode_closed_form(code, cols, rows)
    return decode_generic(code, cols, rows)


class ErasureDecoder:
    """Decoder that caches the per-pattern decoding data across stripes."""

    def __init__(self, code: ArrayCode, method: str = "auto"):
        if method not in ("auto", "closed", "generic", "full"):
            raise ValueError(f"unknown method {method!r}")
        self.code = code
        self.method = method
        self._closed: dict[tuple[int, ...], tuple | None] = {}

    def path(self, cols: Sequence[int]) -> str:
        """Which decoder handles this surviving-column set."""
        key = tuple(sorted(int(c) for c in cols))
        if self.method != "auto":
            return self.method
        if key not in self._closed:
            self._closed[key] = closed_form_matrix(self.code, key) if closed_form_applicable(self.code, key) else None
        return "closed" if self._closed[key] is not None else "generic"

    def __call__(self, cols: Sequence[int], rows: np.ndarray) -> np.ndarray:
        path = self.path(cols)
        if path == "closed":
            key = tuple(sorted(int(c) for c in cols))
            if self._closed.get(key) is None:
                self._closed[key] = closed_form_matrix(self.code, key)
            return decode_closed_form(self.code, cols, rows, D=self._closed[key])
        return decode(self.code, cols, rows, path)


# ---------------------------------------------------------------------------
# the maximal-k bound


def max_k_bound(p: int, L: int) -> int:
    return p ** mult_order(p, L) - 1


@dataclass
class FalsifierReport:
    p: int
    L: int
    r: int
    k: int
    selections: int
    mds_found: int
    witness: list | None
    note: str = "only the constructed (G, H) pair and its (H^T, G^T) twin are tested"

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "L": self.L,
            "r": self.r,
            "k": self.k,
            "selections": self.selections,
            "mds_found": self.mds_found,
            "witness": self.witness,
            "bound": max_k_bound(self.p, self.L),
            "note": self.note,
        }


def falsify_beyond_bound(p: int = 2, L: int = 3, r: int = 2, twin: bool = False) -> FalsifierReport:
    """Try every selection of p^{m_L} distinct nonzero circulants as systematic generators.

    Reports how many of the resulting (k + r, k) codes are MDS; the bound
    predicts none.
    """
    spec = build_standard(p, L)
    pool = [RingPoly.from_coeffs(p, L, _digits(v, p, L)) for v in range(1, p**L)]
    k = max_k_bound(p, L) + 1
    n_sel = comb(len(pool), k)
    if n_sel * comb(k + r, k) > FALSIFIER_BUDGET:
        raise ValueError("falsifier search exceeds its budget")
    found = 0
    witness = None
    for sel in combinations(pool, k):
        code = make_vandermonde_circulant(k, r, spec, sel, twin)
        if is_mds(code).mds:
            found += 1
            if witness is None:
                witness = [g.coeffs for g in sel]
    return FalsifierReport(p, L, r, k, n_sel, found, witness)
