"""Cut&Count decision procedure over GF(2^p).

Counts pairs (cycle cover, side labelling of its cycles) weighted by the
product of random edge weights.  A cover with c cycles is counted 2^(c-1)
times once the anchor vertex is pinned to the left side, so in
characteristic 2 only Hamiltonian cycles survive.

Per-vertex states use the Z4 digits that the fast join also relies on:
``0`` degree 0, ``1`` degree 1 on the left, ``3`` degree 1 on the right,
``2`` degree 2 (side discharged).
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from typing import Optional

from .decomposition import Kind, NiceDecomposition
from .dp_naive import trivially_non_hamiltonian
from .gf2p import GF64, FieldSpec, mul, random_elem
from .graph import Graph

D0, D1L, D2, D1R = 0, 1, 2, 3
DEG = (0, 1, 2, 1)

# (a, b) -> combined digit for the naive join; missing pairs are invalid
COMBINE = {
    (D0, D0): D0, (D0, D1L): D1L, (D0, D1R): D1R, (D0, D2): D2,
    (D1L, D0): D1L, (D1R, D0): D1R, (D2, D0): D2,
    (D1L, D1L): D2, (D1R, D1R): D2,
}
_PARTNERS = {a: [(b, c) for (x, b), c in COMBINE.items() if x == a] for a in range(4)}


class FieldTooSmall(ValueError):
    pass


@dataclass
class CCTable:
    bag: tuple
    values: dict  # digit tuple -> nonzero field element

    def __len__(self):
        return len(self.values)


def draw_weights(g: Graph, seed: int, spec: FieldSpec = GF64) -> dict:
    rng = random.Random(seed)
    return {e: random_elem(rng, spec) for e in g.sorted_edges()}


def _purge(values: dict) -> dict:
    return {k: v for k, v in values.items() if v}


def cc_leaf() -> CCTable:
    return CCTable((), {(): 1})


def find_anchor(nice: NiceDecomposition) -> Optional[int]:
    for node in nice.nodes:
        if node.kind is Kind.INTRODUCE_VERTEX:
            return node.vertex
    return None


def cc_introduce_vertex(tbl: CCTable, v: int) -> CCTable:
    i = 0
    while i < len(tbl.bag) and tbl.bag[i] < v:
        i += 1
    if i < len(tbl.bag) and tbl.bag[i] == v:
        raise ValueError(f"vertex {v} already in bag")
    bag = tbl.bag[:i] + (v,) + tbl.bag[i:]
    return CCTable(bag, {s[:i] + (D0,) + s[i:]: x for s, x in tbl.values.items()})


def cc_introduce_edge(tbl: CCTable, u: int, v: int, weight: int, anchor: Optional[int],
                      spec: FieldSpec = GF64) -> CCTable:
    bag = tbl.bag
    iu, iv = bag.index(u), bag.index(v)
    out = dict(tbl.values)
    pinned_u = u == anchor
    pinned_v = v == anchor
    for s, val in tbl.values.items():
        a, b = s[iu], s[iv]
        if a == D2 or b == D2:
            continue
        if a == D0 and b == D0:
            sides = (D1L,) if pinned_u or pinned_v else (D1L, D1R)
            targets = []
            for side in sides:
                t = list(s)
                t[iu] = t[iv] = side
                targets.append(tuple(t))
        elif a == D0:
            if pinned_u and b == D1R:
                continue
            t = list(s)
            t[iu], t[iv] = b, D2
            targets = [tuple(t)]
        elif b == D0:
            if pinned_v and a == D1R:
                continue
            t = list(s)
            t[iu], t[iv] = D2, a
            targets = [tuple(t)]
        elif a == b:
            t = list(s)
            t[iu] = t[iv] = D2
            targets = [tuple(t)]
        else:
            continue
        prod = mul(val, weight, spec)
        for t in targets:
            out[t] = out.get(t, 0) ^ prod
    return CCTable(bag, _purge(out))


def cc_forget(tbl: CCTable, v: int) -> CCTable:
    i = tbl.bag.index(v)
    out: dict = {}
    for s, val in tbl.values.items():
        if s[i] == D2:
            t = s[:i] + s[i + 1:]
            out[t] = out.get(t, 0) ^ val
    return CCTable(tbl.bag[:i] + tbl.bag[i + 1:], _purge(out))


def cc_join_naive(ta: CCTable, tb: CCTable, spec: FieldSpec = GF64) -> CCTable:
    """Direct join: for each left state enumerate every combinable right state."""
    if ta.bag != tb.bag:
        raise ValueError("join children must share the bag")
    out: dict = {}
    bvals = tb.values
    for sa, va in ta.values.items():
        options = [_PARTNERS[d] for d in sa]
        for combo in itertools.product(*options):
            sb = tuple(b for b, _ in combo)
            vb = bvals.get(sb)
            if vb is None:
                continue
            t = tuple(c for _, c in combo)
            out[t] = out.get(t, 0) ^ mul(va, vb, spec)
    return CCTable(ta.bag, _purge(out))


@dataclass
class CCResult:
    hamiltonian: bool
    root_value: int
    seed: int
    failure_bound: float
    peak_table: int = 0
    seconds: float = 0.0
    note: str = ""


def cc_decide(g: Graph, nice: NiceDecomposition, spec: FieldSpec = GF64,
              seed: Optional[int] = None, join_kind: str = "naive") -> CCResult:
    """One-sided Monte Carlo test: "yes" is always right, "no" errs with
    probability at most n / 2^p."""
    if join_kind not in ("naive", "fast"):
        raise ValueError(f"unknown join kind {join_kind!r}")
    if seed is None:
        seed = random.SystemRandom().getrandbits(63)
    if spec.order <= g.n:
        raise FieldTooSmall(f"GF(2^{spec.p}) too small for n={g.n}")
    started = time.perf_counter()
    bound = g.n / spec.order
    reason = trivially_non_hamiltonian(g)
    if reason:
        return CCResult(False, 0, seed, 0.0, note=reason)
    if nice.n != g.n:
        raise ValueError("decomposition built for a different vertex count")
    if join_kind == "fast":
        from .z4conv import cc_join_fast as join
    else:
        join = cc_join_naive
    weights = draw_weights(g, seed, spec)
    anchor = find_anchor(nice)
    tables: dict[int, CCTable] = {}
    peak = 0
    for i, node in enumerate(nice.nodes):
        kind = node.kind
        if kind is Kind.LEAF:
            tbl = cc_leaf()
        elif kind is Kind.INTRODUCE_VERTEX:
            tbl = cc_introduce_vertex(tables.pop(node.children[0]), node.vertex)
        elif kind is Kind.INTRODUCE_EDGE:
            tbl = tables.pop(node.children[0])
            w = weights.get(node.edge)
            if w is not None:
                tbl = cc_introduce_edge(tbl, node.edge[0], node.edge[1], w, anchor, spec)
        elif kind is Kind.FORGET:
            tbl = cc_forget(tables.pop(node.children[0]), node.vertex)
        else:
            a, b = node.children
            tbl = join(tables.pop(a), tables.pop(b), spec)
        peak = max(peak, len(tbl))
        tables[i] = tbl
    root = tables[nice.root].values.get((), 0)
    return CCResult(root != 0, root, seed, bound, peak, time.perf_counter() - started)
