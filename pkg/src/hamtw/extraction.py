"""Recovering Hamiltonian cycles from witnesses or from a decision oracle."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Union

from .decomposition import NiceDecomposition, TreeDecomposition, make_nice
from .graph import Graph, delete_edges, norm_edge

log = logging.getLogger(__name__)

Decider = Callable[[Graph, NiceDecomposition], bool]


class ExtractionError(RuntimeError):
    pass


class InconsistentDecider(ExtractionError):
    """The decision procedure contradicted an earlier answer."""


def verify_cycle(g: Graph, cycle: Iterable[int]) -> bool:
    cycle = list(cycle)
    if g.n < 3 or len(cycle) != g.n or sorted(cycle) != list(g.vertices()):
        return False
    return all(g.has_edge(cycle[i - 1], cycle[i]) for i in range(len(cycle)))


def extract_from_witness(edges: Iterable[tuple[int, int]], g: Optional[Graph] = None) -> list[int]:
    """Order a single-cycle edge set into a vertex sequence starting at its minimum."""
    edges = {norm_edge(u, v) for u, v in edges}
    adj: dict[int, list[int]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    if len(adj) < 3 or any(len(a) != 2 for a in adj.values()):
        raise ExtractionError("edge set is not a 2-regular graph on at least 3 vertices")
    start = min(adj)
    cycle = [start]
    prev, cur = start, min(adj[start])
    while cur != start:
        cycle.append(cur)
        a, b = adj[cur]
        prev, cur = cur, (b if a == prev else a)
    if len(cycle) != len(adj):
        raise ExtractionError("edge set is a union of several cycles")
    if g is not None and not verify_cycle(g, cycle):
        raise ExtractionError("witness is not a Hamiltonian cycle of the graph")
    return cycle


def restrict_for_path(g: Graph, path: list[int]) -> Graph:
    """Drop every non-path edge at the internal vertices of ``path``."""
    if len(path) < 3:
        raise ValueError("path needs at least two edges")
    if len(set(path)) != len(path):
        raise ValueError("path repeats a vertex")
    keep = set()
    for a, b in zip(path, path[1:]):
        if not g.has_edge(a, b):
            raise ValueError(f"({a}, {b}) is not an edge of the graph")
        keep.add(norm_edge(a, b))
    drop = set()
    for x in path[1:-1]:
        for y in g.neighbors(x):
            e = norm_edge(x, y)
            if e not in keep:
                drop.add(e)
    return delete_edges(g, drop)


@dataclass
class ExtractionReport:
    cycle: list
    decision_calls: int
    attempts: int
    bound: int = 0
    call_log: list = field(default_factory=list, repr=False)


def call_bound(g: Graph, c: int = 4) -> int:
    delta = max(g.max_degree(), 1)
    return c * g.n * (1 + math.ceil(math.log2(delta)))


class _Search:
    def __init__(self, g: Graph, nice: NiceDecomposition, decide: Decider):
        self.g = g
        self.nice = nice
        self.decide = decide
        self.calls = 0

    def ask(self, g: Graph) -> bool:
        self.calls += 1
        return bool(self.decide(g, self.nice))

    def pick(self, u: int, cands: list[int], keep_all_on_no: bool) -> int:
        """Binary search for the neighbour ``w`` of ``u`` used by every cycle left.

        Invariant: the current graph is Hamiltonian and every Hamiltonian cycle
        uses an edge ``u-w`` with ``w`` in ``cands``.  When ``u`` needs exactly
        one more edge, a "no" answer also lets us drop the first half.
        """
        while len(cands) > 1:
            half = len(cands) // 2
            first, rest = cands[:half], cands[half:]
            trial = delete_edges(self.g, [(u, w) for w in rest])
            if self.ask(trial):
                self.g = trial
                cands = first
            else:
                if not keep_all_on_no:
                    self.g = delete_edges(self.g, [(u, w) for w in first])
                cands = rest
        if not cands:
            raise InconsistentDecider(f"no candidate edge left at vertex {u}")
        return cands[0]

    def run(self) -> list[int]:
        g = self.g
        if not self.ask(g):
            raise InconsistentDecider("decision procedure rejects the input graph")
        v = min(g.vertices(), key=lambda x: (g.degree(x), x))
        first = self.pick(v, list(self.g.neighbors(v)), keep_all_on_no=True)
        second = self.pick(v, [w for w in self.g.neighbors(v) if w != first],
                           keep_all_on_no=True)
        path = [first, v, second]
        self.g = restrict_for_path(self.g, path)
        n = g.n
        on_path = set(path)
        while len(path) < n:
            u = path[-1]
            cands = [w for w in self.g.neighbors(u) if w not in on_path]
            if not cands:
                raise InconsistentDecider(f"path cannot be extended at {u}")
            w = self.pick(u, cands, keep_all_on_no=False)
            path.append(w)
            on_path.add(w)
            self.g = restrict_for_path(self.g, path)
        if not self.g.has_edge(path[-1], path[0]):
            raise InconsistentDecider("spanning path does not close into a cycle")
        return path


def extract_self_reduce(g: Graph, td: Union[TreeDecomposition, NiceDecomposition],
                        decide: Decider, retries: int = 1) -> ExtractionReport:
    """Find a Hamiltonian cycle using only yes/no answers from ``decide``.

    ``decide`` receives subgraphs of ``g`` together with one nice decomposition
    built for ``g``; it is valid for every subgraph on the same vertex set.
    A randomized decider that errs mid-search is caught either by an empty
    candidate set or by the final verification; the search is then restarted
    ``retries`` more times before giving up.
    """
    nice = td if isinstance(td, NiceDecomposition) else make_nice(g, td)
    total = 0
    last_error: Optional[Exception] = None
    for attempt in range(1, retries + 2):
        search = _Search(g, nice, decide)
        try:
            cycle = search.run()
        except InconsistentDecider as exc:
            total += search.calls
            last_error = exc
            log.warning("extraction attempt %d failed: %s", attempt, exc)
            continue
        total += search.calls
        if verify_cycle(g, cycle):
            return ExtractionReport(cycle, total, attempt, call_bound(g))
        last_error = InconsistentDecider("extracted sequence failed verification")
    raise ExtractionError(f"extraction failed after {retries + 1} attempts "
                          f"({total} decision calls): {last_error}")
