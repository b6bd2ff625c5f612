"""Rank-based pruning of pairing families over F2.

Two vector constructions are supported:

* ``cut4t`` -- one coordinate per cut of the ground set (element 1 fixed on
  the left), set when no pair crosses the cut.  Vectors have 2^(l-1) entries.
* ``improved`` -- one coordinate per matching of a basis of the
  matchings-connectivity matrix, set when the union with that matching is a
  single cycle.  Vectors have 2^(l/2-1) entries.

Both give representative families: keeping a row basis of the vectors keeps,
for every outside matching that closes one stored pairing into a Hamiltonian
cycle, some kept pairing that does the same.
"""

from __future__ import annotations

import random
import time
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from .decomposition import NiceDecomposition
from .dp_naive import Outcome, PartialTable, finish, run_dp, trivially_non_hamiltonian
from .graph import Graph

BASIS_CAP = 12


class BasisCapExceeded(ValueError):
    pass


# --- matchings ---------------------------------------------------------------------


def _partner_array(pairs: Iterable, ground: Optional[Sequence] = None) -> tuple:
    pairs = [tuple(p) for p in pairs]
    if ground is None:
        ground = sorted(x for p in pairs for x in p)
    index = {x: i for i, x in enumerate(ground)}
    partner = [-1] * len(ground)
    for a, b in pairs:
        if a == b or partner[index[a]] >= 0 or partner[index[b]] >= 0:
            raise ValueError("pairs are not a matching")
        partner[index[a]] = index[b]
        partner[index[b]] = index[a]
    if -1 in partner:
        raise ValueError("matching is not perfect on the ground set")
    return tuple(partner)


def all_matchings(ell: int) -> list[tuple]:
    """All perfect matchings of ``0..ell-1`` as partner arrays, in canonical order."""
    out = []
    partner = [-1] * ell

    def rec():
        try:
            i = partner.index(-1)
        except ValueError:
            out.append(tuple(partner))
            return
        for j in range(i + 1, ell):
            if partner[j] < 0:
                partner[i], partner[j] = j, i
                rec()
                partner[i] = partner[j] = -1

    rec()
    return out


def single_cycle(pa: tuple, pb: tuple) -> bool:
    """Whether the union of two perfect matchings (partner arrays) is one cycle."""
    ell = len(pa)
    if ell == 0:
        return False
    cur = 0
    steps = 0
    while True:
        cur = pb[pa[cur]]
        steps += 2
        if cur == 0:
            return steps == ell


def is_single_cycle(e, m) -> bool:
    """``e`` and ``m`` are perfect matchings given as collections of pairs."""
    ground_e = sorted(x for p in e for x in p)
    ground_m = sorted(x for p in m for x in p)
    if ground_e != ground_m:
        raise ValueError("matchings live on different ground sets")
    return single_cycle(_partner_array(e, ground_e), _partner_array(m, ground_e))


def to_pairs(partner: tuple, base: int = 1) -> tuple:
    return tuple((i + base, j + base) for i, j in enumerate(partner) if i < j)


# --- vectors -----------------------------------------------------------------------


def _cut_vector(partner: tuple) -> int:
    # bit c of the result is the cut whose right side is {i : bit i-1 of c}
    ell = len(partner)
    pair_masks = []
    for i, j in enumerate(partner):
        if i < j and i != 0:
            pair_masks.append((1 << (i - 1)) | (1 << (j - 1)))
    vec = 0
    for choice in range(1 << len(pair_masks)):
        mask = 0
        for k, pm in enumerate(pair_masks):
            if choice >> k & 1:
                mask |= pm
        vec |= 1 << mask
    return vec


def cut_vector(e, ell: int) -> int:
    """Consistent-cut vector of a pairing of ``1..ell``, as an int bitset of
    length 2^(ell-1)."""
    if ell % 2 or ell < 2:
        raise ValueError(f"cut vectors need a positive even ground size, got {ell}")
    return _cut_vector(_partner_array(e, list(range(1, ell + 1))))


@dataclass(frozen=True)
class BasisFamily:
    ell: int
    partners: tuple  # partner arrays on 0..ell-1

    @property
    def matchings(self) -> list:
        return [to_pairs(p) for p in self.partners]

    def __len__(self):
        return len(self.partners)


def gf2_rank(rows: Iterable[int]) -> int:
    """Rank of int-bitset rows over F2 (reference echelon routine)."""
    pivots: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top in pivots:
                r ^= pivots[top]
            else:
                pivots[top] = r
                break
    return len(pivots)


@lru_cache(maxsize=None)
def compute_basis(ell: int, cap: int = BASIS_CAP) -> BasisFamily:
    """Matchings whose single-cycle rows form a basis of the connectivity matrix.

    Rows are scanned in canonical order and kept when independent of the rows
    kept before.  To avoid building the full (l-1)!! square matrix, rows are
    restricted to a growing (seeded, reproducible) sample of the columns; once
    the restricted rank reaches 2^(l/2-1) the restriction is injective on the
    row space, so the selection equals the one made on full rows.
    """
    if ell % 2 or ell < 2:
        raise ValueError(f"basis needs a positive even ground size, got {ell}")
    if ell > cap:
        raise BasisCapExceeded(f"ground size {ell} exceeds basis cap {cap}")
    target = 1 << (ell // 2 - 1)
    mats = all_matchings(ell)
    ncols = min(len(mats), 4 * target)
    shuffled = list(mats)
    random.Random(ell).shuffle(shuffled)
    while True:
        cols = shuffled[:ncols]
        rows = []
        for pm in mats:
            r = 0
            for k, q in enumerate(cols):
                if single_cycle(pm, q):
                    r |= 1 << k
            rows.append(r)
        if gf2_rank(rows) == target or ncols == len(mats):
            break
        ncols = min(len(mats), 2 * ncols)
    chosen = gaussian_eliminate(F2Matrix(rows, ncols))
    if len(chosen) != target:
        raise AssertionError(f"connectivity matrix rank {len(chosen)} != {target}")
    return BasisFamily(ell, tuple(mats[i] for i in chosen))


def improved_vector(e, basis: BasisFamily) -> int:
    partner = _partner_array(e, list(range(1, basis.ell + 1)))
    return _improved_vector(partner, basis)


def _improved_vector(partner: tuple, basis: BasisFamily) -> int:
    vec = 0
    for i, q in enumerate(basis.partners):
        if single_cycle(partner, q):
            vec |= 1 << i
    return vec


# --- Gaussian elimination ------------------------------------------------------------


@dataclass
class F2Matrix:
    rows: list  # int bitsets
    ncols: int = 0
    row_tags: Optional[list] = None

    def tags(self) -> list:
        return list(range(len(self.rows))) if self.row_tags is None else list(self.row_tags)


def gaussian_eliminate(m: F2Matrix) -> list:
    """Tags of a maximal independent subset of rows, first pivot wins."""
    pivots: dict[int, int] = {}
    kept = []
    for tag, r in zip(m.tags(), m.rows):
        while r:
            top = r.bit_length() - 1
            p = pivots.get(top)
            if p is None:
                pivots[top] = r
                kept.append(tag)
                break
            r ^= p
    return kept


# --- reduce policy -------------------------------------------------------------------


DEFAULT_TAU = {4: 3, 6: 5, 8: 9}
DEFAULT_ALPHA = {"cut4t": 8.0, "improved": 2.0}


@dataclass
class ReducePolicy:
    """When to run elimination on a bucket.

    Decompositions of width at most ``width_switch`` use the absolute
    per-size thresholds; wider ones (and sizes missing from the table) use
    ``count >= alpha * 2^(l/2-1)``.
    """

    kind: str = "improved"
    small_tw_thresholds: dict = field(default_factory=lambda: dict(DEFAULT_TAU))
    alpha: Optional[float] = None
    width_switch: int = 8

    def __post_init__(self):
        if self.kind not in DEFAULT_ALPHA:
            raise ValueError(f"unknown rank variant {self.kind!r}")
        if self.alpha is None:
            self.alpha = DEFAULT_ALPHA[self.kind]
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if any(t < 1 for t in self.small_tw_thresholds.values()):
            raise ValueError("thresholds must be at least 1")

    def triggered(self, count: int, ell: int, width: int) -> bool:
        if width <= self.width_switch and ell in self.small_tw_thresholds:
            return count >= self.small_tw_thresholds[ell]
        return count >= self.alpha * (1 << (ell // 2 - 1))

    def bound(self, ell: int) -> int:
        return 1 << (ell - 1) if self.kind == "cut4t" else 1 << (ell // 2 - 1)


class _VectorCache:
    def __init__(self, kind: str):
        self.kind = kind
        self.cache: dict = {}

    def vector(self, partner: tuple) -> int:
        v = self.cache.get(partner)
        if v is None:
            if self.kind == "cut4t":
                v = _cut_vector(partner)
            else:
                v = _improved_vector(partner, compute_basis(len(partner)))
            self.cache[partner] = v
        return v


_CACHES = {"cut4t": _VectorCache("cut4t"), "improved": _VectorCache("improved")}


def _local_partner(state: tuple, pos: dict) -> tuple:
    ones = [i for i, x in enumerate(state) if x > 0]
    local = {i: k for k, i in enumerate(ones)}
    return tuple(local[pos[state[i]]] for i in ones)


def reduce_bucket(states: list, bag: tuple, policy: ReducePolicy, width: int = 0) -> list:
    """Prune ``(state, witness)`` pairs sharing one bucket to a representative subset."""
    if not states:
        return states
    ell = sum(1 for x in states[0][0] if x > 0)
    if ell <= 2 or not policy.triggered(len(states), ell, width):
        return states
    pos = {v: i for i, v in enumerate(bag)}
    cache = _CACHES[policy.kind]
    rows = [cache.vector(_local_partner(s, pos)) for s, _ in states]
    ncols = 1 << (ell - 1) if policy.kind == "cut4t" else 1 << (ell // 2 - 1)
    kept = gaussian_eliminate(F2Matrix(rows, ncols))
    return [states[i] for i in kept]


def reduce_table(tbl: PartialTable, policy: ReducePolicy, width: int) -> PartialTable:
    groups = defaultdict(list)
    for s, w in tbl.entries.items():
        groups[tuple(0 if x == 0 else (2 if x < 0 else 1) for x in s)].append((s, w))
    out = {}
    changed = False
    for key, members in groups.items():
        kept = reduce_bucket(members, tbl.bag, policy, width)
        changed |= len(kept) != len(members)
        out.update(kept)
    if not changed:
        return tbl
    return PartialTable(tbl.bag, out, tbl.witness, tbl.found)


def solve_rank(g: Graph, nice: NiceDecomposition, variant: str = "improved",
               policy: Optional[ReducePolicy] = None, mode: str = "witness") -> Outcome:
    if mode not in ("witness", "decision"):
        raise ValueError(f"unknown mode {mode!r}")
    if policy is None:
        policy = ReducePolicy(variant)
    elif policy.kind != variant:
        raise ValueError(f"policy is for {policy.kind}, solver variant is {variant}")
    started = time.perf_counter()
    reason = trivially_non_hamiltonian(g)
    if reason:
        return Outcome(False, note=reason)
    width = nice.width
    stats: dict = {}
    found = run_dp(g, nice, mode == "witness",
                   reducer=lambda t: reduce_table(t, policy, width), stats=stats)
    return finish(g, found, mode == "witness", started, stats)
