"""The circulant ring GF(p)[x]/(x^L - 1) and dense matrices over GF(p), GF(p^m).

Matrices over GF(p) are plain numpy int64 arrays with entries in [0, p).
Matrices over GF(p^m) are wrapped in :class:`MatExt`, which carries its field.
Row vectors multiply matrices from the left throughout: ``m @ as_circulant(x)``
is the right cyclic shift of ``m``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .field import ExtElem, ExtField, build_ext_field, field_for, scalar_L_in_GFp

__all__ = [
    "SingularMatrixError",
    "RingPoly",
    "ring_add",
    "ring_mul",
    "ring_pow",
    "as_circulant",
    "from_circulant",
    "cyclic_shift_matrix",
    "eval_at",
    "MatExt",
    "vandermonde_pair",
    "matmul_p",
    "rank_p",
    "rank_gf2",
    "inv_p",
    "det_p",
    "adjugate_p",
    "PolyMatrix",
    "poly_det",
    "poly_adjugate",
    "kron_expand",
    "spectral_ranks",
]

# cofactor expansion up to this size, evaluation/interpolation above it
COFACTOR_MAX_K = 6


class SingularMatrixError(ValueError):
    """Raised when an inverse of a rank-deficient matrix is requested."""


# ---------------------------------------------------------------------------
# RingPoly


@dataclass(frozen=True)
class RingPoly:
    """Element of GF(p)[x]/(x^L - 1); coeffs[j] is the coefficient of x^j."""

    p: int
    L: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.L:
            raise ValueError(f"need exactly L = {self.L} coefficients, got {len(self.coeffs)}")
        if any(not 0 <= c < self.p for c in self.coeffs):
            raise ValueError("coefficients must lie in [0, p)")

    @classmethod
    def from_coeffs(cls, p: int, L: int, coeffs: Iterable[int]) -> "RingPoly":
        """Reduce an arbitrary-length coefficient list modulo x^L - 1 and p."""
        out = [0] * L
        for i, c in enumerate(coeffs):
            out[i % L] = (out[i % L] + int(c)) % p
        return cls(p, L, tuple(out))

    @classmethod
    def zero(cls, p: int, L: int) -> "RingPoly":
        return cls(p, L, (0,) * L)

    @classmethod
    def one(cls, p: int, L: int) -> "RingPoly":
        return cls.monomial(p, L, 0)

    @classmethod
    def monomial(cls, p: int, L: int, e: int, c: int = 1) -> "RingPoly":
        out = [0] * L
        out[e % L] = c % p
        return cls(p, L, tuple(out))

    @classmethod
    def x(cls, p: int, L: int) -> "RingPoly":
        return cls.monomial(p, L, 1)

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    @property
    def degree(self) -> int:
        """Degree of the canonical representative (-1 for zero)."""
        for i in range(self.L - 1, -1, -1):
            if self.coeffs[i]:
                return i
        return -1

    def _check(self, other: "RingPoly") -> None:
        if (self.p, self.L) != (other.p, other.L):
            raise ValueError(f"ring mismatch: ({self.p},{self.L}) vs ({other.p},{other.L})")

    def _lift(self, other) -> "RingPoly":
        if isinstance(other, RingPoly):
            self._check(other)
            return other
        if isinstance(other, (int, np.integer)):
            return RingPoly.monomial(self.p, self.L, 0, int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return RingPoly(self.p, self.L, tuple((a + b) % self.p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return RingPoly(self.p, self.L, tuple((-a) % self.p for a in self.coeffs))

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        L, p = self.L, self.p
        full = np.convolve(np.array(self.coeffs, dtype=np.int64), np.array(other.coeffs, dtype=np.int64))
        out = full[:L].copy()
        out[: len(full) - L] += full[L:]
        return RingPoly(p, L, tuple(int(c) for c in out % p))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "RingPoly":
        if e < 0:
            raise ValueError("negative exponents are not defined in the ring")
        result = RingPoly.one(self.p, self.L)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def shift(self, e: int) -> "RingPoly":
        """Multiply by x^e (a cyclic rotation of the coefficients)."""
        e %= self.L
        c = self.coeffs
        return RingPoly(self.p, self.L, c[-e:] + c[:-e] if e else c)

    def as_circulant(self) -> np.ndarray:
        return as_circulant(self)

    def eval_at(self, point: ExtElem) -> ExtElem:
        return eval_at(self, point)

    def __repr__(self) -> str:
        terms = [
            (f"{c}" if c != 1 or i == 0 else "") + ("" if i == 0 else ("x" if i == 1 else f"x^{i}"))
            for i, c in enumerate(self.coeffs)
            if c
        ]
        return f"RingPoly(p={self.p}, L={self.L}, {' + '.join(terms) or '0'})"


def ring_add(a: RingPoly, b: RingPoly) -> RingPoly:
    return a + b


def ring_mul(a: RingPoly, b: RingPoly) -> RingPoly:
    return a * b


def ring_pow(a: RingPoly, e: int) -> RingPoly:
    return a**e


def as_circulant(a: RingPoly) -> np.ndarray:
    """L x L circulant with entry (i, j) equal to the coefficient of x^{(j-i) mod L}."""
    L = a.L
    c = np.array(a.coeffs, dtype=np.int64)
    idx = (np.arange(L)[None, :] - np.arange(L)[:, None]) % L
    return c[idx]


def from_circulant(M: np.ndarray, p: int) -> RingPoly:
    M = np.asarray(M, dtype=np.int64) % p
    L = M.shape[0]
    if M.shape != (L, L):
        raise ValueError("circulant must be square")
    a = RingPoly(p, L, tuple(int(v) for v in M[0]))
    if not np.array_equal(as_circulant(a), M):
        raise ValueError("matrix is not circulant")
    return a


def cyclic_shift_matrix(L: int) -> np.ndarray:
    """C_L, the circulant of x: C_L[i, (i+1) % L] = 1."""
    return as_circulant(RingPoly.x(2, L))


def eval_at(a: RingPoly, point: ExtElem) -> ExtElem:
    """Horner evaluation of the coefficient polynomial at a field element."""
    F = point.field
    if F.p != a.p:
        raise ValueError("characteristic mismatch")
    acc = 0
    for c in reversed(a.coeffs):
        acc = F.add(F.mul(acc, point.value), c)
    return ExtElem(F, acc)


# ---------------------------------------------------------------------------
# Gaussian elimination over a field given as an ExtField (m = 1 is GF(p))


def _row_reduce(F: ExtField, A: np.ndarray, ncols: int | None = None):
    """Reduced row echelon form over F, pivoting on the first ``ncols`` columns.

    Returns (R, pivot_columns, det_scale) where det_scale is the product of
    pivots times the sign of the row swaps (meaningful for square input).
    """
    M = np.array(A, dtype=np.int64, copy=True)
    nrows = M.shape[0]
    ncols = M.shape[1] if ncols is None else ncols
    pivots = []
    det = 1
    r = 0
    for col in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(M[r:, col])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            M[[r, i]] = M[[i, r]]
            det = F.neg(det)
        piv = int(M[r, col])
        det = F.mul(det, piv)
        M[r] = F.vmul(M[r], F.inv(piv))
        factors = M[:, col].copy()
        factors[r] = 0
        if factors.any():
            M = F.vsub(M, F.vmul(factors[:, None], M[r][None, :]))
        pivots.append(col)
        r += 1
    return M, pivots, det


def _rank(F: ExtField, A: np.ndarray) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(_row_reduce(F, A)[1])


def _det(F: ExtField, A: np.ndarray) -> int:
    A = np.asarray(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return 1
    _, pivots, det = _row_reduce(F, A)
    return det if len(pivots) == n else 0


def _inv(F: ExtField, A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inverse needs a square matrix")
    aug = np.concatenate([A, np.eye(n, dtype=np.int64)], axis=1)
    R, pivots, _ = _row_reduce(F, aug, ncols=n)
    if len(pivots) < n:
        raise SingularMatrixError(f"matrix is singular (rank {len(pivots)} < {n})")
    return R[:, n:]


def _adjugate(F: ExtField, A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0]
    if n == 1:
        return np.ones((1, 1), dtype=np.int64)
    d = _det(F, A)
    if d != 0:
        return F.vmul(_inv(F, A), d)
    # rank n - 1: adj(A) = lam * v u^T with A v = 0 and u^T A = 0
    v = _null_vector(F, A)
    u = _null_vector(F, A.T)
    if v is None or u is None:
        return np.zeros((n, n), dtype=np.int64)
    j = int(np.nonzero(v)[0][0])
    i = int(np.nonzero(u)[0][0])
    c = _det(F, np.delete(np.delete(A, i, axis=0), j, axis=1))
    c = F.neg(c) if (i + j) % 2 else c  # adj[j, i]
    lam = F.div(c, F.mul(int(v[j]), int(u[i])))
    return F.vmul(F.vmul(v[:, None], u[None, :]), lam)


def _null_vector(F: ExtField, A: np.ndarray) -> np.ndarray | None:
    """A nonzero x with A x = 0 when the nullity is exactly one, else None."""
    n = A.shape[1]
    R, pivots, _ = _row_reduce(F, A)
    if len(pivots) != n - 1:
        return None
    free = next(c for c in range(n) if c not in pivots)
    x = np.zeros(n, dtype=np.int64)
    x[free] = 1
    for row, col in enumerate(pivots):
        x[col] = F.neg(int(R[row, free]))
    return x


def _matmul(F: ExtField, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if F.m == 1:
        return (A @ B) % F.p
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for t in range(A.shape[1]):
        out = F.vadd(out, F.vmul(A[:, t, None], B[None, t, :]))
    return out


# ---------------------------------------------------------------------------
# GF(p) matrices as numpy arrays


def _gfp(p: int) -> ExtField:
    return build_ext_field(p, 1)


def matmul_p(*mats: np.ndarray, p: int) -> np.ndarray:
    """Product of GF(p) matrices, reduced mod p after each step."""
    out = np.asarray(mats[0], dtype=np.int64) % p
    for B in mats[1:]:
        out = (out @ (np.asarray(B, dtype=np.int64) % p)) % p
    return out


def rank_gf2(A: np.ndarray) -> int:
    """Rank over GF(2) with rows packed into Python integers."""
    A = np.asarray(A)
    if A.size == 0:
        return 0
    packed = np.packbits((A & 1).astype(np.uint8), axis=1)
    rows = [int.from_bytes(r.tobytes(), "big") for r in packed]
    pivots: dict[int, int] = {}
    rank = 0
    for v in rows:
        while v:
            top = v.bit_length() - 1
            if top in pivots:
                v ^= pivots[top]
            else:
                pivots[top] = v
                rank += 1
                break
    return rank


def rank_p(A: np.ndarray, p: int) -> int:
    if p == 2:
        return rank_gf2(A)
    return _rank(_gfp(p), np.asarray(A, dtype=np.int64) % p)


def inv_p(A: np.ndarray, p: int) -> np.ndarray:
    return _inv(_gfp(p), np.asarray(A, dtype=np.int64) % p)


def det_p(A: np.ndarray, p: int) -> int:
    return _det(_gfp(p), np.asarray(A, dtype=np.int64) % p)


def adjugate_p(A: np.ndarray, p: int) -> np.ndarray:
    return _adjugate(_gfp(p), np.asarray(A, dtype=np.int64) % p)


def kron_expand(A: np.ndarray, l: int) -> np.ndarray:
    """I_l (x) A: block diagonal with l copies of A."""
    if l < 1:
        raise ValueError("block count must be >= 1")
    A = np.asarray(A, dtype=np.int64)
    return np.kron(np.eye(l, dtype=np.int64), A)


# ---------------------------------------------------------------------------
# matrices over GF(p^m)


@dataclass(frozen=True, eq=False)
class MatExt:
    """Dense matrix over an extension field; entries are integer element codes."""

    field: ExtField
    data: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.data, dtype=np.int64)
        if d.ndim != 2:
            raise ValueError("MatExt needs a 2-d array")
        if d.size and (d.min() < 0 or d.max() >= self.field.order):
            raise ValueError("entries outside the field")
        object.__setattr__(self, "data", d)

    @classmethod
    def identity(cls, F: ExtField, n: int) -> "MatExt":
        return cls(F, np.eye(n, dtype=np.int64))

    @classmethod
    def from_gfp(cls, F: ExtField, A: np.ndarray) -> "MatExt":
        return cls(F, np.asarray(A, dtype=np.int64) % F.p)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def _same(self, other: "MatExt") -> None:
        if other.field != self.field:
            raise ValueError("matrices over different fields")

    def __matmul__(self, other: "MatExt") -> "MatExt":
        self._same(other)
        return MatExt(self.field, _matmul(self.field, self.data, other.data))

    def __add__(self, other: "MatExt") -> "MatExt":
        self._same(other)
        return MatExt(self.field, self.field.vadd(self.data, other.data))

    def __sub__(self, other: "MatExt") -> "MatExt":
        self._same(other)
        return MatExt(self.field, self.field.vsub(self.data, other.data))

    def scale(self, c: int | ExtElem) -> "MatExt":
        c = c.value if isinstance(c, ExtElem) else self.field.from_int(c)
        return MatExt(self.field, self.field.vmul(self.data, c))

    def __getitem__(self, idx) -> "MatExt":
        sub = self.data[idx]
        return MatExt(self.field, np.atleast_2d(sub))

    @property
    def T(self) -> "MatExt":
        return MatExt(self.field, self.data.T.copy())

    def rank(self) -> int:
        return _rank(self.field, self.data)

    def det(self) -> ExtElem:
        return ExtElem(self.field, _det(self.field, self.data))

    def inv(self) -> "MatExt":
        return MatExt(self.field, _inv(self.field, self.data))

    def adjugate(self) -> "MatExt":
        return MatExt(self.field, _adjugate(self.field, self.data))

    def is_gfp(self) -> bool:
        return bool((self.data < self.field.p).all())

    def to_gfp(self) -> np.ndarray:
        """Entries as a GF(p) array; raises if any entry lies outside GF(p)."""
        if not self.is_gfp():
            raise ValueError("matrix has entries outside GF(p)")
        return self.data.copy()

    def __eq__(self, other) -> bool:
        return isinstance(other, MatExt) and other.field == self.field and np.array_equal(self.data, other.data)

    def __repr__(self) -> str:
        return f"MatExt(GF({self.field.p}^{self.field.m}), {self.data.tolist()})"


def vandermonde_pair(p: int, L: int, beta: ExtElem | None = None) -> tuple[MatExt, MatExt, MatExt]:
    """(V_L, V~_L, Lambda) with V[i][j] = beta^{ij}, V~[i][j] = beta^{-ij}, Lambda = diag(beta^i)."""
    if beta is None:
        _, beta = field_for(p, L)
    F = beta.field
    if F.p != p:
        raise ValueError("beta lives in a field of the wrong characteristic")
    if F.pow(beta.value, L) != 1:
        raise ValueError("beta is not an L-th root of unity")
    ij = np.outer(np.arange(L), np.arange(L))
    pw = np.array([F.pow(beta.value, e) for e in range(L)], dtype=np.int64)
    V = pw[ij % L]
    Vt = pw[(-ij) % L]
    Lam = np.zeros((L, L), dtype=np.int64)
    Lam[np.arange(L), np.arange(L)] = pw
    return MatExt(F, V), MatExt(F, Vt), MatExt(F, Lam)


# ---------------------------------------------------------------------------
# matrices with ring entries


@dataclass(frozen=True)
class PolyMatrix:
    """Matrix whose entries are RingPoly values sharing one (p, L)."""

    p: int
    L: int
    entries: tuple[tuple[RingPoly, ...], ...]

    def __post_init__(self):
        widths = {len(r) for r in self.entries}
        if len(widths) > 1:
            raise ValueError("ragged PolyMatrix")
        for row in self.entries:
            for e in row:
                if (e.p, e.L) != (self.p, self.L):
                    raise ValueError("PolyMatrix entries must share (p, L)")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[RingPoly]]) -> "PolyMatrix":
        first = rows[0][0]
        return cls(first.p, first.L, tuple(tuple(r) for r in rows))

    @classmethod
    def from_ints(cls, p: int, L: int, rows: Sequence[Sequence[Sequence[int]]]) -> "PolyMatrix":
        """Build from nested coefficient lists."""
        return cls(p, L, tuple(tuple(RingPoly.from_coeffs(p, L, c) for c in r) for r in rows))

    @classmethod
    def identity(cls, p: int, L: int, n: int) -> "PolyMatrix":
        one, zero = RingPoly.one(p, L), RingPoly.zero(p, L)
        return cls(p, L, tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), (len(self.entries[0]) if self.entries else 0)

    def __getitem__(self, ij: tuple[int, int]) -> RingPoly:
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ValueError("shape mismatch")
        zero = RingPoly.zero(self.p, self.L)
        rows = []
        for i in range(n):
            row = []
            for j in range(m):
                acc = zero
                for t in range(k):
                    acc = acc + self.entries[i][t] * other.entries[t][j]
                row.append(acc)
            rows.append(tuple(row))
        return PolyMatrix(self.p, self.L, tuple(rows))

    def scale(self, f: RingPoly) -> "PolyMatrix":
        return PolyMatrix(self.p, self.L, tuple(tuple(e * f for e in r) for r in self.entries))

    @property
    def T(self) -> "PolyMatrix":
        n, m = self.shape
        return PolyMatrix(self.p, self.L, tuple(tuple(self.entries[i][j] for i in range(n)) for j in range(m)))

    def det(self) -> RingPoly:
        return poly_det(self)

    def adjugate(self) -> "PolyMatrix":
        return poly_adjugate(self)

    def eval_at(self, point: ExtElem) -> MatExt:
        data = np.array([[eval_at(e, point).value for e in r] for r in self.entries], dtype=np.int64)
        return MatExt(point.field, data.reshape(self.shape))

    def to_matp(self) -> np.ndarray:
        """Expand Psi(C_L) into an nL x mL matrix over GF(p)."""
        n, m = self.shape
        L = self.L
        out = np.zeros((n * L, m * L), dtype=np.int64)
        for i in range(n):
            for j in range(m):
                out[i * L : (i + 1) * L, j * L : (j + 1) * L] = as_circulant(self.entries[i][j])
        return out


def _cofactor_det(rows: tuple[tuple[RingPoly, ...], ...], p: int, L: int) -> RingPoly:
    k = len(rows)
    if k == 0:
        return RingPoly.one(p, L)
    memo: dict[tuple[int, ...], RingPoly] = {}

    # Laplace expansion down the rows, memoized on the set of remaining columns
    def rec(r: int, cols: tuple[int, ...]) -> RingPoly:
        if r == k:
            return RingPoly.one(p, L)
        if cols in memo:
            return memo[cols]
        acc = RingPoly.zero(p, L)
        for pos, c in enumerate(cols):
            e = rows[r][c]
            if e.is_zero:
                continue
            sub = rec(r + 1, cols[:pos] + cols[pos + 1 :])
            term = e * sub
            acc = acc - term if pos % 2 else acc + term
        memo[cols] = acc
        return acc

    return rec(0, tuple(range(k)))


def _interpolate(p: int, L: int, values: Sequence[int]) -> RingPoly:
    """Recover a ring element from its values at beta^0, ..., beta^{L-1}."""
    F, beta = field_for(p, L)
    _, inv_L = scalar_L_in_GFp(p, L)
    coeffs = []
    for i in range(L):
        acc = 0
        for j, v in enumerate(values):
            acc = F.add(acc, F.mul(v, F.pow(beta.value, -i * j % L)))
        acc = F.mul(acc, inv_L)
        if acc >= p:
            raise AssertionError("interpolated coefficient outside GF(p)")
        coeffs.append(acc)
    return RingPoly(p, L, tuple(coeffs))


def poly_det(M: PolyMatrix) -> RingPoly:
    """Determinant in the ring GF(p)[x]/(x^L - 1).

    The ring has zero divisors, so elimination with division is unavailable.
    Small sizes use memoized cofactor expansion; larger ones evaluate at
    every beta^j, take field determinants and interpolate back.
    """
    n, m = M.shape
    if n != m:
        raise ValueError("determinant needs a square matrix")
    if n <= COFACTOR_MAX_K:
        return _cofactor_det(M.entries, M.p, M.L)
    F, beta = field_for(M.p, M.L)
    vals = [M.eval_at(ExtElem(F, F.pow(beta.value, j))).det().value for j in range(M.L)]
    return _interpolate(M.p, M.L, vals)


def poly_adjugate(M: PolyMatrix) -> PolyMatrix:
    n, m = M.shape
    if n != m:
        raise ValueError("adjugate needs a square matrix")
    p, L = M.p, M.L
    if n == 1:
        return PolyMatrix.identity(p, L, 1)
    if n <= COFACTOR_MAX_K + 1:
        rows = []
        for j in range(n):
            row = []
            for i in range(n):
                # adj[j][i] = (-1)^{i+j} det(M without row i and column j)
                minor = tuple(
                    tuple(M.entries[a][b] for b in range(n) if b != j) for a in range(n) if a != i
                )
                c = _cofactor_det(minor, p, L)
                row.append(-c if (i + j) % 2 else c)
            rows.append(tuple(row))
        return PolyMatrix(p, L, tuple(rows))
    F, beta = field_for(p, L)
    adjs = [M.eval_at(ExtElem(F, F.pow(beta.value, j))).adjugate().data for j in range(L)]
    return PolyMatrix(
        p,
        L,
        tuple(tuple(_interpolate(p, L, [int(a[i, j]) for a in adjs]) for j in range(n)) for i in range(n)),
    )


def spectral_ranks(M: PolyMatrix, indices: Iterable[int] | None = None) -> dict[int, int]:
    """rank of M(beta^j) over GF(p^{m_L}) for each requested j (default all)."""
    F, beta = field_for(M.p, M.L)
    idx = range(M.L) if indices is None else indices
    return {j: M.eval_at(ExtElem(F, F.pow(beta.value, j))).rank() for j in idx}
