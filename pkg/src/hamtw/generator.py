"""Random bounded-width instances with a planted Hamiltonian cycle.

The a x b grid of vertices v(i, j) is wired into one long cycle (row paths
closed at both ends), then random chords are added inside columns among the
first a/2 rows.  Listing the vertices column by column, every edge joins two
vertices at most a apart, which gives a path decomposition of width a.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .decomposition import TreeDecomposition, write_td
from .graph import Graph, write_graph


@dataclass(frozen=True)
class GenParams:
    a: int
    b: int
    p: float
    seed: int = 0

    def __post_init__(self):
        if self.a <= 0 or self.a % 4 != 2:
            raise ValueError(f"a must be positive and 2 mod 4, got {self.a}")
        if self.b <= 0:
            raise ValueError(f"b must be positive, got {self.b}")
        if self.a * self.b < 3:
            raise ValueError("need at least 3 vertices for a cycle")
        if not 0 < self.p < 1:
            raise ValueError(f"p must lie strictly between 0 and 1, got {self.p}")


@dataclass
class GeneratedInstance:
    params: GenParams
    graph: Graph
    planted_cycle: list
    td: TreeDecomposition
    chords_drawn: int = 0  # successful Bernoulli draws, duplicates included


def vertex_id(i: int, j: int, b: int) -> int:
    return (i - 1) * b + j


def _cycle_edges(a: int, b: int) -> list:
    v = lambda i, j: vertex_id(i, j, b)
    edges = [(v(i, j), v(i, j + 1)) for i in range(1, a + 1) for j in range(1, b)]
    edges += [(v(i, 1), v(i + a // 2, 1)) for i in range(1, a // 2 + 1)]
    edges += [(v(i - 1, b), v(i, b)) for i in range(2, a + 1, 2)]
    return edges


def _walk(n: int, edges: list) -> list:
    adj: dict = {}
    for x, y in edges:
        adj.setdefault(x, []).append(y)
        adj.setdefault(y, []).append(x)
    cycle = [1]
    prev, cur = 1, min(adj[1])
    while cur != 1:
        cycle.append(cur)
        x, y = adj[cur]
        prev, cur = cur, (y if x == prev else x)
    if len(cycle) != n:
        raise AssertionError("row wiring did not close into a single cycle")
    return cycle


def path_decomposition(a: int, b: int) -> TreeDecomposition:
    """Bags X_r = {v(((s-1) mod a)+1, ceil(s/a)) : r <= s <= r+a} on a path."""
    count = a * b - a
    if count < 1:
        # a single column has no window of a+1 positions; one bag holds everything
        return TreeDecomposition.build({1: frozenset(range(1, a * b + 1))})
    bags = {}
    for r in range(1, count + 1):
        bags[r] = frozenset(vertex_id((s - 1) % a + 1, -(-s // a), b) for s in range(r, r + a + 1))
    return TreeDecomposition.build(bags, [(r, r + 1) for r in range(1, count)])


def generate(params: GenParams) -> GeneratedInstance:
    a, b = params.a, params.b
    n = a * b
    base = _cycle_edges(a, b)
    rng = np.random.default_rng(params.seed)
    half = a // 2
    chords = []
    for i in range(1, half + 1):
        for i2 in range(i + 1, half + 1):
            draws = rng.random(b) < params.p
            chords += [(vertex_id(i, j, b), vertex_id(i2, j, b))
                       for j in range(1, b + 1) if draws[j - 1]]
    g = Graph.from_edges(n, base + chords)
    return GeneratedInstance(params, g, _walk(n, base), path_decomposition(a, b), len(chords))


def expected_params_report(params: GenParams) -> dict:
    """Expected edge count a*b + p*b*C(a/2, 2), ignoring chords that land on cycle edges."""
    n = params.a * params.b
    positions = params.b * math.comb(params.a // 2, 2)
    edges = params.a * params.b + params.p * positions
    return {
        "n": n,
        "chord_positions": positions,
        "expected_edges": edges,
        "chord_stddev": math.sqrt(positions * params.p * (1 - params.p)),
        "density": 2 * edges / (n * (n - 1)) if n > 1 else 0.0,
    }


def write_instance(inst: GeneratedInstance, directory: str, name: str) -> dict:
    """Write ``name.gr``, ``name.td`` and ``name.cycle``; returns the paths."""
    os.makedirs(directory, exist_ok=True)
    paths = {ext: os.path.join(directory, f"{name}.{ext}") for ext in ("gr", "td", "cycle")}
    with open(paths["gr"], "w") as fh:
        fh.write(write_graph(inst.graph))
    with open(paths["td"], "w") as fh:
        fh.write(write_td(inst.td, inst.graph.n))
    with open(paths["cycle"], "w") as fh:
        fh.write("".join(f"{v}\n" for v in inst.planted_cycle))
    return paths


def read_cycle_file(path: str) -> list:
    with open(path) as fh:
        return [int(line) for line in fh if line.strip()]
