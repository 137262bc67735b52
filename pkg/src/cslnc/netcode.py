"""Circular-shift linear network coding on acyclic multicast networks.

An L-dimensional circular-shift code assigns a ring element K_{d,e} of
GF(p)[x]/(x^L - 1) to every adjacent pair (d, e). Given the (P, Q) pair of a
KernelSpec it induces a J-dimensional code with kernels P K_{d,e} Q (or
P K_{d,e} Q' with Q' = tau(C_L) G^T on Combination Networks).

Data units are row vectors; the data on edge e is sum_d m_d K_{d,e}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .kernels import KernelSpec, build_standard, q_prime
from .ringmat import (
    PolyMatrix,
    RingPoly,
    SingularMatrixError,
    as_circulant,
    kron_expand,
    matmul_p,
    rank_p,
    spectral_ranks,
)

__all__ = [
    "Multicast",
    "CirculantCode",
    "InducedCode",
    "RateVerdict",
    "global_kernels",
    "receiver_psi",
    "is_solution_rate_JL",
    "induce",
    "is_vector_solution",
    "propagate",
    "propagate_induced",
    "decode_matrix_lemma2",
    "decode_matrix_lemma3",
    "combination_network",
    "four_node_example",
    "random_code",
    "random_solution_search",
    "SearchReport",
    "random_search_threshold",
]


@dataclass
class Multicast:
    """Single-source acyclic multigraph with unit-capacity edges.

    Edges are (tail, head) pairs identified by their index; ``edge_names``
    gives them readable labels. ``kind`` is "combination" for networks made
    by :func:`combination_network`, whose parameters are kept in ``params``.
    """

    nodes: list[str]
    edges: list[tuple[str, str]]
    source: str
    receivers: list[str]
    edge_names: list[str] | None = None
    kind: str = "general"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.edge_names is None:
            self.edge_names = [f"e{i + 1}" for i in range(len(self.edges))]
        node_set = set(self.nodes)
        for u, v in self.edges:
            if u not in node_set or v not in node_set:
                raise ValueError(f"edge ({u}, {v}) uses an unknown node")
        if self.source not in node_set or any(t not in node_set for t in self.receivers):
            raise ValueError("source and receivers must be nodes")
        for u, v in self.edges:
            if u == self.source and v in self.receivers:
                raise ValueError("edges from the source straight to a receiver are not allowed")
        self._in = {v: [] for v in self.nodes}
        self._out = {v: [] for v in self.nodes}
        for i, (u, v) in enumerate(self.edges):
            self._out[u].append(i)
            self._in[v].append(i)
        self.node_order = self._topological_order()
        self.edge_order = [e for v in self.node_order for e in self._out[v]]
        w = self.omega
        for t in self.receivers:
            if len(self._in[t]) != w:
                raise ValueError(f"receiver {t} has {len(self._in[t])} incoming edges, expected omega = {w}")

    def _topological_order(self) -> list[str]:
        indeg = {v: len(self._in[v]) for v in self.nodes}
        ready = [v for v in self.nodes if indeg[v] == 0]
        order = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            for e in self._out[v]:
                h = self.edges[e][1]
                indeg[h] -= 1
                if indeg[h] == 0:
                    ready.append(h)
        if len(order) != len(self.nodes):
            raise ValueError("network has a cycle")
        return order

    @property
    def omega(self) -> int:
        return len(self._out[self.source])

    def in_edges(self, v: str) -> list[int]:
        return list(self._in[v])

    def out_edges(self, v: str) -> list[int]:
        return list(self._out[v])

    def adjacent_pairs(self) -> list[tuple[int, int]]:
        """All (d, e) with head(d) = tail(e), in topological order of e."""
        return [(d, e) for e in self.edge_order for d in self._in[self.edges[e][0]]]

    def edge_index(self, name: str) -> int:
        return self.edge_names.index(name)

    def to_json(self) -> dict:
        return {
            "nodes": self.nodes,
            "edges": [{"tail": u, "head": v, "name": n} for (u, v), n in zip(self.edges, self.edge_names)],
            "source": self.source,
            "receivers": self.receivers,
            "kind": self.kind,
            "params": self.params,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Multicast":
        edges, names = [], []
        for i, e in enumerate(doc["edges"]):
            if isinstance(e, dict):
                edges.append((e["tail"], e["head"]))
                names.append(e.get("name", f"e{i + 1}"))
            else:
                edges.append((e[0], e[1]))
                names.append(f"e{i + 1}")
        return cls(
            nodes=list(doc["nodes"]),
            edges=edges,
            source=doc["source"],
            receivers=list(doc["receivers"]),
            edge_names=names,
            kind=doc.get("kind", "general"),
            params=doc.get("params", {}),
        )

    @classmethod
    def load(cls, path: str) -> "Multicast":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass
class CirculantCode:
    """Local kernels K_{d,e} in the circulant ring; missing pairs are zero."""

    network: Multicast
    spec: KernelSpec
    kernels: dict[tuple[int, int], RingPoly]
    twin: bool = False  # (P, Q) = (H^T, G^T) instead of (G, H)

    def __post_init__(self):
        pairs = set(self.network.adjacent_pairs())
        for key, k in self.kernels.items():
            if key not in pairs:
                raise ValueError(f"kernel given for non-adjacent pair {key}")
            if (k.p, k.L) != (self.spec.p, self.spec.L):
                raise ValueError("kernel ring does not match the kernel spec")

    def kernel(self, d: int, e: int) -> RingPoly:
        k = self.kernels.get((d, e))
        return RingPoly.zero(self.spec.p, self.spec.L) if k is None else k

    @property
    def P(self) -> np.ndarray:
        return self.spec.pq(self.twin)[0]

    @property
    def Q(self) -> np.ndarray:
        return self.spec.pq(self.twin)[1]

    @property
    def spectral_indices(self) -> tuple[int, ...]:
        """Indices j whose Psi(beta^j) matter: J for (G, H), the barred set for the twin."""
        return self.spec.Jset.barred.members if self.twin else self.spec.Jset.members


def global_kernels(code: CirculantCode) -> dict[int, tuple[RingPoly, ...]]:
    """F_e as an omega-vector of ring elements for every edge."""
    net, spec = code.network, code.spec
    w = net.omega
    zero = RingPoly.zero(spec.p, spec.L)
    one = RingPoly.one(spec.p, spec.L)
    F: dict[int, tuple[RingPoly, ...]] = {}
    for i, e in enumerate(net.out_edges(net.source)):
        F[e] = tuple(one if r == i else zero for r in range(w))
    for e in net.edge_order:
        tail = net.edges[e][0]
        if tail == net.source:
            continue
        acc = [zero] * w
        for d in net.in_edges(tail):
            k = code.kernel(d, e)
            if k.is_zero:
                continue
            acc = [a + f * k for a, f in zip(acc, F[d])]
        F[e] = tuple(acc)
    return F


def receiver_psi(code: CirculantCode, t: str, F: dict | None = None) -> PolyMatrix:
    """Psi(x) with Psi(C_L) = [F_e]_{e in In(t)} (columns ordered like In(t))."""
    F = global_kernels(code) if F is None else F
    cols = [F[e] for e in code.network.in_edges(t)]
    w = code.network.omega
    return PolyMatrix(code.spec.p, code.spec.L, tuple(tuple(c[r] for c in cols) for r in range(w)))


@dataclass
class RateVerdict:
    """Receiver verdict for the rate-J/L code.

    ``rank_ok``: P_{w(x)} Psi(C_L) has full rank wJ. ``spectral_ok``:
    rank Psi(beta^j) = w for every j in J. The two coincide when U vanishes
    outside J; ``agree`` reports whether they did.
    """

    rank: int
    rank_ok: bool
    spectral: dict[int, int]
    spectral_ok: bool

    @property
    def agree(self) -> bool:
        return self.rank_ok == self.spectral_ok

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "rank_ok": self.rank_ok,
            "spectral_ranks": {str(k): v for k, v in self.spectral.items()},
            "spectral_ok": self.spectral_ok,
            "agree": self.agree,
        }


def is_solution_rate_JL(code: CirculantCode) -> dict[str, RateVerdict]:
    spec, net = code.spec, code.network
    w, J, p = net.omega, spec.J, spec.p
    F = global_kernels(code)
    out = {}
    for t in net.receivers:
        psi = receiver_psi(code, t, F)
        M = matmul_p(kron_expand(code.P, w), psi.to_matp(), p=p)
        r = rank_p(M, p)
        sr = spectral_ranks(psi, code.spectral_indices)
        out[t] = RateVerdict(r, r == w * J, sr, all(v == w for v in sr.values()))
    return out


@dataclass
class InducedCode:
    """J x J kernels materialized from a circulant code."""

    parent: CirculantCode
    variant: str  # "PKQ" or "PKQ'"
    kernels: dict[tuple[int, int], np.ndarray]


def _forwarding_pairs(net: Multicast) -> set[tuple[int, int]]:
    """Pairs through nodes with a single incoming edge (no coding happens there)."""
    return {(d, e) for d, e in net.adjacent_pairs() if len(net.in_edges(net.edges[e][0])) == 1}


def induce(code: CirculantCode, variant: str = "PKQ") -> InducedCode:
    spec, net, p = code.spec, code.network, code.spec.p
    P, Q = code.P, code.Q
    if variant == "PKQ":
        Qv = Q
        forward: set = set()
    elif variant in ("PKQ'", "PKQ_prime"):
        variant = "PKQ'"
        if net.kind != "combination":
            raise ValueError("the P K Q' code is only defined on Combination Networks")
        if code.twin:
            raise ValueError("the P K Q' code needs (P, Q) = (G, H)")
        Qv = q_prime(spec)
        forward = _forwarding_pairs(net)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    kernels = {}
    I = np.eye(spec.J, dtype=np.int64)
    for d, e in net.adjacent_pairs():
        k = code.kernel(d, e)
        if (d, e) in forward:
            if k != RingPoly.one(spec.p, spec.L):
                raise ValueError("forwarding pairs of a Combination Network must carry kernel 1")
            kernels[(d, e)] = I
        else:
            kernels[(d, e)] = matmul_p(P, as_circulant(k), Qv, p=p)
    return InducedCode(code, variant, kernels)


def _induced_global(ind: InducedCode) -> dict[int, np.ndarray]:
    """wJ x J global kernels of the induced code by edge-by-edge recoding."""
    code = ind.parent
    net, J, p = code.network, code.spec.J, code.spec.p
    w = net.omega
    F: dict[int, np.ndarray] = {}
    for i, e in enumerate(net.out_edges(net.source)):
        blk = np.zeros((w * J, J), dtype=np.int64)
        blk[i * J : (i + 1) * J] = np.eye(J, dtype=np.int64)
        F[e] = blk
    for e in net.edge_order:
        tail = net.edges[e][0]
        if tail == net.source:
            continue
        acc = np.zeros((w * J, J), dtype=np.int64)
        for d in net.in_edges(tail):
            acc = (acc + F[d] @ ind.kernels[(d, e)]) % p
        F[e] = acc
    return F


def induced_receive_matrix(ind: InducedCode, t: str) -> np.ndarray:
    F = _induced_global(ind)
    return np.concatenate([F[e] for e in ind.parent.network.in_edges(t)], axis=1)


def is_vector_solution(ind: InducedCode) -> dict[str, bool]:
    code = ind.parent
    net, J, p = code.network, code.spec.J, code.spec.p
    F = _induced_global(ind)
    out = {}
    for t in net.receivers:
        R = np.concatenate([F[e] for e in net.in_edges(t)], axis=1)
        out[t] = rank_p(R, p) == net.omega * J
    return out


def propagate(code: CirculantCode, messages: np.ndarray) -> dict[int, np.ndarray]:
    """Rate-J/L operation: source rows m'_i (length J) become m'_i P, then recode per edge."""
    net, p = code.network, code.spec.p
    messages = np.asarray(messages, dtype=np.int64) % p
    P = code.P
    data: dict[int, np.ndarray] = {}
    for i, e in enumerate(net.out_edges(net.source)):
        data[e] = matmul_p(messages[i][None, :], P, p=p)[0]
    for e in net.edge_order:
        tail = net.edges[e][0]
        if tail == net.source:
            continue
        acc = np.zeros(code.spec.L, dtype=np.int64)
        for d in net.in_edges(tail):
            acc = (acc + data[d] @ as_circulant(code.kernel(d, e))) % p
        data[e] = acc
    return data


def propagate_induced(ind: InducedCode, messages: np.ndarray) -> dict[int, np.ndarray]:
    """Edge-by-edge recoding with the J x J induced kernels."""
    net, p = ind.parent.network, ind.parent.spec.p
    messages = np.asarray(messages, dtype=np.int64) % p
    data: dict[int, np.ndarray] = {}
    for i, e in enumerate(net.out_edges(net.source)):
        data[e] = messages[i].copy()
    for e in net.edge_order:
        tail = net.edges[e][0]
        if tail == net.source:
            continue
        acc = np.zeros(ind.parent.spec.J, dtype=np.int64)
        for d in net.in_edges(tail):
            acc = (acc + data[d] @ ind.kernels[(d, e)]) % p
        data[e] = acc
    return data


def _check_spectral(spec: KernelSpec, psi: PolyMatrix, twin: bool = False) -> None:
    k = psi.shape[0]
    sr = spectral_ranks(psi, spec.Jset.barred.members if twin else spec.Jset.members)
    bad = {j: r for j, r in sr.items() if r != k}
    if bad:
        raise SingularMatrixError(f"Psi(beta^j) is rank deficient at j in {sorted(bad)}")


def adjugate_inverse(spec: KernelSpec, psi: PolyMatrix, twin: bool = False) -> PolyMatrix:
    """Psi'(x) = det(Psi)^{p^m - 2} Adj(Psi)."""
    q = spec.field.order
    _check_spectral(spec, psi, twin)
    return psi.adjugate().scale(psi.det() ** (q - 2))


def adjugate_inverse_tau(spec: KernelSpec, psi: PolyMatrix) -> PolyMatrix:
    """Psi''(x) = (det(Psi) tau)^{p^m - 2} Adj(Psi)."""
    q = spec.field.order
    _check_spectral(spec, psi)
    return psi.adjugate().scale((psi.det() * spec.tau) ** (q - 2))


def decode_matrix_from_psi(spec: KernelSpec, psi: PolyMatrix, twin: bool = False) -> np.ndarray:
    """G_{k(x)} Psi'(C_L) H_{k(x)} (or the H^T / G^T twin)."""
    k = psi.shape[0]
    P, Q = spec.pq(twin)
    Pk, Qk = kron_expand(P, k), kron_expand(Q, k)
    return matmul_p(Pk, adjugate_inverse(spec, psi, twin).to_matp(), Qk, p=spec.p)


def decode_matrix_tau_from_psi(spec: KernelSpec, psi: PolyMatrix) -> np.ndarray:
    """H_bar^T_{k(x)} Psi''(C_L) H_{k(x)}."""
    if spec.H_bar is None:
        raise ValueError("spec has no H_bar")
    k = psi.shape[0]
    return matmul_p(
        kron_expand(spec.H_bar.T, k), adjugate_inverse_tau(spec, psi).to_matp(), kron_expand(spec.H, k), p=spec.p
    )


def decode_matrix_lemma2(ind: InducedCode, t: str) -> np.ndarray:
    if ind.variant != "PKQ":
        raise ValueError("this decoding matrix needs the P K Q code")
    psi = receiver_psi(ind.parent, t)
    return decode_matrix_from_psi(ind.parent.spec, psi, ind.parent.twin)


def decode_matrix_lemma3(ind: InducedCode, t: str) -> np.ndarray:
    if ind.variant != "PKQ'":
        raise ValueError("this decoding matrix needs the P K Q' code")
    psi = receiver_psi(ind.parent, t)
    return decode_matrix_tau_from_psi(ind.parent.spec, psi)


# ---------------------------------------------------------------------------
# built-in networks


def combination_network(n: int, k: int) -> Multicast:
    """(n, k)-Combination Network: s -(k edges)-> u -> v_1..v_n, one receiver per k-subset.

    The only coding node is u; the edge u -> v_j is named e_j.
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    nodes = ["s", "u"] + [f"v{j}" for j in range(1, n + 1)]
    edges, names = [], []
    for i in range(1, k + 1):
        edges.append(("s", "u"))
        names.append(f"s{i}")
    for j in range(1, n + 1):
        edges.append(("u", f"v{j}"))
        names.append(f"e{j}")
    receivers = []
    for sub in combinations(range(1, n + 1), k):
        t = "t" + "_".join(str(j) for j in sub)
        nodes.append(t)
        receivers.append(t)
        for j in sub:
            edges.append((f"v{j}", t))
            names.append(f"v{j}->{t}")
    return Multicast(nodes, edges, "s", receivers, names, kind="combination", params={"n": n, "k": k})


def four_node_network() -> Multicast:
    """s => v1 => v2 => t with two parallel edges per hop (e1..e6)."""
    return Multicast(
        ["s", "v1", "v2", "t"],
        [("s", "v1"), ("s", "v1"), ("v1", "v2"), ("v1", "v2"), ("v2", "t"), ("v2", "t")],
        "s",
        ["t"],
        ["e1", "e2", "e3", "e4", "e5", "e6"],
    )


def four_node_example() -> tuple[Multicast, CirculantCode]:
    """The four-node network with K_{e1,e3} = x, K_{e2,e4} = x^2, K_{e3,e5} = x^3, K_{e4,e6} = x^4."""
    net = four_node_network()
    spec = build_standard(2, 5)
    x = RingPoly.x(2, 5)
    kernels = {(0, 2): x, (1, 3): x**2, (2, 4): x**3, (3, 5): x**4}
    return net, CirculantCode(net, spec, kernels)


def random_code(
    network: Multicast,
    spec: KernelSpec,
    rng: np.random.Generator,
    pool: Sequence[RingPoly] | None = None,
    twin: bool = False,
) -> CirculantCode:
    """Kernels drawn uniformly from ``pool`` (default: the whole ring).

    Pairs through single-input nodes forward with kernel 1.
    """
    forward = _forwarding_pairs(network)
    one = RingPoly.one(spec.p, spec.L)
    kernels = {}
    for pair in network.adjacent_pairs():
        if pair in forward:
            kernels[pair] = one
        elif pool is None:
            kernels[pair] = RingPoly(spec.p, spec.L, tuple(int(c) for c in rng.integers(0, spec.p, spec.L)))
        else:
            kernels[pair] = pool[int(rng.integers(len(pool)))]
    return CirculantCode(network, spec, kernels, twin)


@dataclass
class SearchReport:
    found: bool
    attempts: int
    code: CirculantCode | None
    threshold_met: bool


def random_search_threshold(spec: KernelSpec, n_receivers: int) -> bool:
    """Whether (m_L / phi(L)) p^{m_L} > |T|."""
    from .field import euler_totient

    return spec.m_L * spec.p**spec.m_L > n_receivers * euler_totient(spec.L)


def random_solution_search(
    network: Multicast,
    spec: KernelSpec,
    pool: Sequence[RingPoly] | None = None,
    max_attempts: int = 100,
    seed: int | None = 0,
) -> SearchReport:
    """Draw random codes until every receiver passes the spectral test."""
    rng = np.random.default_rng(seed)
    thr = random_search_threshold(spec, len(network.receivers))
    for attempt in range(1, max_attempts + 1):
        code = random_code(network, spec, rng, pool)
        verdicts = is_solution_rate_JL(code)
        if all(v.spectral_ok and v.rank_ok for v in verdicts.values()):
            return SearchReport(True, attempt, code, thr)
    return SearchReport(False, max_attempts, None, thr)


def a_hat_pool(p: int, L: int) -> list[RingPoly]:
    """The nonzero ring elements of degree below m_L."""
    from .field import mult_order

    m = mult_order(p, L)
    out = []
    for v in range(1, p**m):
        digits = []
        for _ in range(m):
            digits.append(v % p)
            v //= p
        out.append(RingPoly.from_coeffs(p, L, digits))
    return out


def verdict_report(code: CirculantCode, variants: Iterable[str] = ("PKQ",)) -> dict:
    """JSON-ready verdicts for every receiver."""
    rate = is_solution_rate_JL(code)
    rep = {t: {"rate_JL": v.to_json()} for t, v in rate.items()}
    for var in variants:
        sol = is_vector_solution(induce(code, var))
        for t, ok in sol.items():
            rep[t][var] = ok
    return rep
