"""Shared fixtures: small named graphs and the seeded random oracle suite."""

from __future__ import annotations

import itertools
import random

from hamtw.decomposition import make_nice, min_fill_td
from hamtw.graph import Graph


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i % n + 1) for i in range(1, n + 1)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(1, n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(1, n + 1), 2))


def petersen() -> Graph:
    outer = [(i, i % 5 + 1) for i in range(1, 6)]
    spokes = [(i, i + 5) for i in range(1, 6)]
    inner = [(6, 8), (8, 10), (10, 7), (7, 9), (9, 6)]
    return Graph.from_edges(10, outer + spokes + inner)


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    return Graph.from_edges(n, [e for e in itertools.combinations(range(1, n + 1), 2)
                                if rng.random() < p])


def random_connected(rng: random.Random, n: int) -> Graph:
    """One of three families, equally likely: a shuffled Hamiltonian cycle plus
    a few chords; a random tree plus sparse extra edges (mostly
    non-Hamiltonian); a random tree plus dense extra edges (wider bags)."""
    verts = list(range(1, n + 1))
    rng.shuffle(verts)
    edges = set()
    kind = rng.randrange(3)
    if kind == 0:
        edges.update((verts[i - 1], verts[i]) for i in range(n))
        extra = rng.randint(0, n // 2)
    elif kind == 2:
        for i in range(1, n):
            edges.add((verts[i], verts[rng.randrange(i)]))
        extra = rng.randint(n, 3 * n)
    else:
        for i in range(1, n):
            edges.add((verts[i], verts[rng.randrange(i)]))
        extra = rng.randint(0, n)
    for _ in range(extra):
        u, v = rng.sample(range(1, n + 1), 2)
        edges.add((u, v))
    return Graph.from_edges(n, [tuple(sorted(e)) for e in edges])


def oracle_suite(count: int = 500, seed: int = 2024, nmax: int = 12):
    """``count`` connected graphs with 3 <= n <= nmax and their min-fill nice decompositions."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        g = random_connected(rng, rng.randint(3, nmax))
        out.append((g, make_nice(g, min_fill_td(g))))
    return out
