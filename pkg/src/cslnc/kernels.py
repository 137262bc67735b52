"""Index sets J, the GF(p) matrices G, H, H_bar, tau(x) and Q' = tau(C_L) G^T.

G (J x L) and H (L x J) satisfy G H = I_J, and the set
{G f(C_L) H : f a polynomial over GF(p)} is closed under multiplication.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd
from typing import Any

import numpy as np

from .field import ExtElem, field_for, mult_order, scalar_L_in_GFp
from .ringmat import MatExt, RingPoly, SingularMatrixError, as_circulant, eval_at, matmul_p, vandermonde_pair

__all__ = [
    "IndexSetJ",
    "KernelSpec",
    "cyclotomic_cosets",
    "closed_index_sets",
    "canonical_J",
    "build_standard",
    "build_from_U",
    "build_vl_rows",
    "tau",
    "q_prime",
    "verify_spec",
    "nonvanishing_on",
]

# refuse to enumerate more unions than this
MAX_CLOSED_SETS = 1 << 16


def cyclotomic_cosets(p: int, L: int) -> list[tuple[int, ...]]:
    """Orbits of {0..L-1} under multiplication by p mod L, ordered by smallest member."""
    if gcd(p, L) != 1:
        raise ValueError(f"gcd(p={p}, L={L}) != 1")
    seen: set[int] = set()
    out = []
    for j in range(L):
        if j in seen:
            continue
        orbit = []
        x = j
        while x not in orbit:
            orbit.append(x)
            x = x * p % L
        seen.update(orbit)
        out.append(tuple(sorted(orbit)))
    return out


@dataclass(frozen=True)
class IndexSetJ:
    p: int
    L: int
    members: tuple[int, ...]

    def __post_init__(self):
        mem = tuple(sorted(set(int(j) % self.L for j in self.members)))
        object.__setattr__(self, "members", mem)
        if not mem:
            raise ValueError("index set must be nonempty")
        s = set(mem)
        if any(j * self.p % self.L not in s for j in mem):
            raise ValueError(f"{mem} is not closed under multiplication by {self.p} mod {self.L}")

    @property
    def J(self) -> int:
        return len(self.members)

    @property
    def complement(self) -> tuple[int, ...]:
        s = set(self.members)
        return tuple(j for j in range(self.L) if j not in s)

    @property
    def barred(self) -> "IndexSetJ":
        return IndexSetJ(self.p, self.L, tuple((self.L - j) % self.L for j in self.members))

    def __contains__(self, j: int) -> bool:
        return j in self.members

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)


def closed_index_sets(p: int, L: int) -> list[IndexSetJ]:
    """Every nonempty union of cyclotomic cosets, ordered by size then members."""
    cosets = cyclotomic_cosets(p, L)
    if (1 << len(cosets)) > MAX_CLOSED_SETS:
        raise ValueError(f"{len(cosets)} cosets: too many unions to enumerate")
    out = []
    for mask in range(1, 1 << len(cosets)):
        mem = [j for i, c in enumerate(cosets) if mask >> i & 1 for j in c]
        out.append(IndexSetJ(p, L, tuple(mem)))
    out.sort(key=lambda s: (s.J, s.members))
    return out


def canonical_J(p: int, L: int) -> IndexSetJ:
    """{j : gcd(j, L) = 1}, of size phi(L)."""
    return IndexSetJ(p, L, tuple(j for j in range(L) if gcd(j, L) == 1))


@dataclass
class KernelSpec:
    p: int
    L: int
    Jset: IndexSetJ
    beta: ExtElem
    G: np.ndarray
    H: np.ndarray
    tau: RingPoly
    H_bar: np.ndarray | None = None
    construction: str = "standard"
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def J(self) -> int:
        return self.Jset.J

    @property
    def m_L(self) -> int:
        return mult_order(self.p, self.L)

    @property
    def field(self):
        return self.beta.field

    @property
    def h(self) -> int:
        """Number of nonzero entries in the tail of H (rows J..L-1)."""
        return int(np.count_nonzero(self.H[self.J :]))

    def q_prime(self) -> np.ndarray:
        return q_prime(self)

    def circ(self, f: RingPoly) -> np.ndarray:
        return as_circulant(f)

    def GfH(self, f: RingPoly) -> np.ndarray:
        return matmul_p(self.G, as_circulant(f), self.H, p=self.p)

    def HfG(self, f: RingPoly) -> np.ndarray:
        return matmul_p(self.H.T, as_circulant(f), self.G.T, p=self.p)

    def GfGt(self, f: RingPoly) -> np.ndarray:
        return matmul_p(self.G, as_circulant(f), self.G.T, p=self.p)

    def HbarfH(self, f: RingPoly) -> np.ndarray:
        if self.H_bar is None:
            raise ValueError("this spec has no H_bar")
        return matmul_p(self.H_bar.T, as_circulant(f), self.H, p=self.p)

    def pq(self, twin: bool = False) -> tuple[np.ndarray, np.ndarray]:
        """(P, Q) = (G, H), or (H^T, G^T) for the twin choice."""
        return (self.H.T.copy(), self.G.T.copy()) if twin else (self.G, self.H)

    def ring(self, coeffs) -> RingPoly:
        return RingPoly.from_coeffs(self.p, self.L, coeffs)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "L": self.L,
            "J_set": list(self.Jset.members),
            "construction": self.construction,
            "G": self.G.tolist(),
            "H": self.H.tolist(),
            "H_bar": None if self.H_bar is None else self.H_bar.tolist(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, doc: dict) -> "KernelSpec":
        p, L = int(doc["p"]), int(doc["L"])
        Jset = IndexSetJ(p, L, tuple(doc["J_set"]))
        _, beta = field_for(p, L)
        G = np.array(doc["G"], dtype=np.int64).reshape(Jset.J, L)
        H = np.array(doc["H"], dtype=np.int64).reshape(L, Jset.J)
        Hb = doc.get("H_bar")
        spec = cls(
            p=p,
            L=L,
            Jset=Jset,
            beta=beta,
            G=G,
            H=H,
            tau=_tau_poly(p, L, Jset, beta),
            H_bar=None if Hb is None else np.array(Hb, dtype=np.int64).reshape(L, Jset.J),
            construction=doc.get("construction", "custom-U"),
        )
        if not np.array_equal(matmul_p(G, H, p=p), np.eye(Jset.J, dtype=np.int64)):
            raise ValueError("loaded G, H do not satisfy G H = I_J")
        return spec


def _tau_poly(p: int, L: int, Jset: IndexSetJ, beta: ExtElem) -> RingPoly:
    F = beta.field
    coeffs = [1]  # low degree first, over GF(p^m)
    for j in Jset.complement:
        root = F.neg(F.pow(beta.value, j))
        nxt = [0] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i + 1] = F.add(nxt[i + 1], c)
            nxt[i] = F.add(nxt[i], F.mul(c, root))
        coeffs = nxt
    if any(c >= p for c in coeffs):
        raise AssertionError("tau has coefficients outside GF(p)")
    return RingPoly.from_coeffs(p, L, coeffs)


def _complete_pair(F, Jset: IndexSetJ, L_inv: int, U: np.ndarray | None, Up: np.ndarray | None):
    """Fill in the missing one of (U, U') from the other, zero off J."""
    J, L = Jset.J, Jset.L
    idx = list(Jset.members)

    def partner(X: np.ndarray) -> np.ndarray:
        sub = MatExt(F, X[:, idx])
        try:
            inv = sub.inv()
        except SingularMatrixError as exc:
            raise SingularMatrixError(f"[u_j] restricted to J = {idx} is singular") from exc
        block = inv.T.scale(L_inv).data
        out = np.zeros((J, L), dtype=np.int64)
        out[:, idx] = block
        return out

    if U is None and Up is None:
        raise ValueError("need U or U'")
    if Up is None:
        Up = partner(U)
    elif U is None:
        U = partner(Up)
    else:
        lhs = MatExt(F, Up[:, idx]).T
        rhs = MatExt(F, U[:, idx]).inv().scale(L_inv)
        if lhs != rhs:
            raise ValueError("U' restricted to J is not L^-1 times the inverse of U restricted to J")
        off = list(Jset.complement)
        if off and U[:, off].any() and Up[:, off].any():
            raise ValueError("U and U' are both nonzero outside J")
    return U, Up


def build_from_U(
    p: int,
    L: int,
    Jset: IndexSetJ | None = None,
    U: np.ndarray | MatExt | None = None,
    U_prime: np.ndarray | MatExt | None = None,
    beta: ExtElem | None = None,
    construction: str = "custom-U",
    with_bar: bool = True,
) -> KernelSpec:
    """G = U V~_L, H = V_L U'^T from one or both of U, U' (J x L over GF(p^{m_L})).

    The missing matrix is completed on J by the inverse relation and set to
    zero outside J. The result must be over GF(p); this is checked.
    """
    if Jset is None:
        Jset = canonical_J(p, L)
    if beta is None:
        _, beta = field_for(p, L)
    F = beta.field
    _, L_inv = scalar_L_in_GFp(p, L)
    U = U.data if isinstance(U, MatExt) else U
    U_prime = U_prime.data if isinstance(U_prime, MatExt) else U_prime
    U, Up = _complete_pair(F, Jset, L_inv, U, U_prime)
    V, Vt, _ = vandermonde_pair(p, L, beta)
    Gx = MatExt(F, U) @ Vt
    Hx = V @ MatExt(F, Up).T
    if not (Gx.is_gfp() and Hx.is_gfp()):
        raise ValueError("G or H has entries outside GF(p) for this choice of U, U'")
    G, H = Gx.to_gfp(), Hx.to_gfp()
    H_bar = None
    if with_bar:
        H_bar = _h_bar(p, L, Jset, U, beta, L_inv)
    return KernelSpec(
        p=p,
        L=L,
        Jset=Jset,
        beta=beta,
        G=G,
        H=H,
        tau=_tau_poly(p, L, Jset, beta),
        H_bar=H_bar,
        construction=construction,
        extra={"U": U, "U_prime": Up},
    )


def _h_bar(p: int, L: int, Jset: IndexSetJ, U: np.ndarray, beta: ExtElem, L_inv: int) -> np.ndarray | None:
    F = beta.field
    bar = Jset.barred
    idx = list(bar.members)
    try:
        inv = MatExt(F, U[:, idx]).inv()
    except SingularMatrixError:
        return None
    Upp = np.zeros_like(U)
    Upp[:, idx] = inv.T.scale(L_inv).data
    V, _, _ = vandermonde_pair(p, L, beta)
    Hb = V @ MatExt(F, Upp).T
    if not Hb.is_gfp():
        return None
    return Hb.to_gfp()


def build_standard(p: int, L: int, Jset: IndexSetJ | None = None, beta: ExtElem | None = None) -> KernelSpec:
    """U = L^-1 times the first J rows of V_L, so G = [I_J 0] and H = [I_J A]^T."""
    if Jset is None:
        Jset = canonical_J(p, L)
    if beta is None:
        _, beta = field_for(p, L)
    F = beta.field
    _, L_inv = scalar_L_in_GFp(p, L)
    V, _, _ = vandermonde_pair(p, L, beta)
    U = F.vmul(V.data[: Jset.J], L_inv)
    spec = build_from_U(p, L, Jset, U=U, beta=beta, construction="standard")
    expected = np.zeros((Jset.J, L), dtype=np.int64)
    expected[:, : Jset.J] = np.eye(Jset.J, dtype=np.int64)
    assert np.array_equal(spec.G, expected)
    return spec


def build_vl_rows(p: int, L: int, Jset: IndexSetJ | None = None, beta: ExtElem | None = None) -> KernelSpec:
    """U' = rows 1..J of V_L (the alternative design with H = L [0 J_J]^T)."""
    if Jset is None:
        Jset = canonical_J(p, L)
    if beta is None:
        _, beta = field_for(p, L)
    V, _, _ = vandermonde_pair(p, L, beta)
    return build_from_U(p, L, Jset, U_prime=V.data[1 : Jset.J + 1], beta=beta, construction="vl-rows")


def tau(spec: KernelSpec) -> RingPoly:
    return spec.tau


def q_prime(spec: KernelSpec) -> np.ndarray:
    """Q' = tau(C_L) G^T (L x J)."""
    return matmul_p(as_circulant(spec.tau), spec.G.T, p=spec.p)


def nonvanishing_on(f: RingPoly, beta: ExtElem, indices) -> bool:
    """True when f(beta^j) != 0 for every j in indices."""
    F = beta.field
    return all(eval_at(f, ExtElem(F, F.pow(beta.value, j))).value != 0 for j in indices)


@dataclass
class IdentityResult:
    name: str
    checked: int = 0
    skipped: int = 0
    failures: int = 0
    witness: Any = None

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.checked > 0

    def record(self, ok: bool, witness=None) -> None:
        self.checked += 1
        if not ok:
            self.failures += 1
            if self.witness is None:
                self.witness = witness


def _random_poly(rng: np.random.Generator, p: int, L: int) -> RingPoly:
    return RingPoly(p, L, tuple(int(c) for c in rng.integers(0, p, L)))


def verify_spec(spec: KernelSpec, samples: int = 200, seed: int | None = 0) -> dict[str, IdentityResult]:
    """Randomized check of the product identities satisfied by G, H, H_bar and tau.

    Families: product_GfH, product_HfG, inverse_GfH, inverse_HfG, hbar_product, hbar_inverse.
    Inversion checks skip draws where f vanishes at some beta^j, j in J.
    """
    rng = np.random.default_rng(seed)
    p, L, J = spec.p, spec.L, spec.J
    q = spec.field.order
    I = np.eye(J, dtype=np.int64)
    names = ["product_GfH", "product_HfG", "inverse_GfH", "inverse_HfG", "hbar_product", "hbar_inverse"]
    res = {n: IdentityResult(n) for n in names}
    t = spec.tau
    for _ in range(samples):
        f1 = _random_poly(rng, p, L)
        f2 = _random_poly(rng, p, L)
        w = (f1.coeffs, f2.coeffs)
        res["product_GfH"].record(np.array_equal(matmul_p(spec.GfH(f1), spec.GfH(f2), p=p), spec.GfH(f1 * f2)), w)
        res["product_HfG"].record(np.array_equal(matmul_p(spec.HfG(f1), spec.HfG(f2), p=p), spec.HfG(f1 * f2)), w)
        if nonvanishing_on(f1, spec.beta, spec.Jset):
            d = f1 ** (q - 2)
            res["inverse_GfH"].record(np.array_equal(matmul_p(spec.GfH(f1), spec.GfH(d), p=p), I), w)
            res["inverse_HfG"].record(np.array_equal(matmul_p(spec.HfG(f1), spec.HfG(d), p=p), I), w)
            if spec.H_bar is not None:
                dt = (f1 * t) ** (q - 2)
                res["hbar_inverse"].record(
                    np.array_equal(matmul_p(spec.GfGt(f1 * t), spec.HbarfH(dt), p=p), I), w
                )
        else:
            res["inverse_GfH"].skipped += 1
            res["inverse_HfG"].skipped += 1
            res["hbar_inverse"].skipped += 1
        if spec.H_bar is not None:
            lhs = matmul_p(spec.GfGt(f1 * t), spec.HbarfH(f2), p=p)
            res["hbar_product"].record(np.array_equal(lhs, spec.GfH(f1 * t * f2)), w)
    return res
