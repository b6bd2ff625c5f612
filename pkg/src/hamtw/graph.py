"""Simple undirected graphs with 1-based vertices, file formats and statistics."""

from __future__ import annotations

import logging
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

log = logging.getLogger(__name__)

Edge = tuple[int, int]


class GraphFormatError(ValueError):
    pass


def norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph on vertices ``1..n``.

    ``edges`` holds normalized pairs ``(u, v)`` with ``u < v``.
    """

    n: int
    edges: frozenset
    adjacency: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        adj: list[list[int]] = [[] for _ in range(self.n + 1)]
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (1 <= u < v <= self.n):
                raise ValueError(f"edge ({u}, {v}) not normalized or out of range")
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(a)) for a in adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        return cls(n, frozenset(norm_edge(u, v) for u, v in edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return norm_edge(u, v) in self.edges

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency[1:]), default=0)

    def components(self) -> list[list[int]]:
        seen = [False] * (self.n + 1)
        comps = []
        for s in self.vertices():
            if seen[s]:
                continue
            seen[s] = True
            comp = [s]
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in self.adjacency[u]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        queue.append(w)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1


def delete_edges(g: Graph, removed: Iterable[tuple[int, int]]) -> Graph:
    removed = {norm_edge(u, v) for u, v in removed}
    missing = removed - g.edges
    if missing:
        raise ValueError(f"edges not in graph: {sorted(missing)}")
    if not removed:
        return g
    return Graph(g.n, g.edges - removed)


# --- file formats -----------------------------------------------------------


def _iter_lines(text: str) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line:
            yield lineno, line


def _collect(n: int, pairs: Iterable[tuple[int, int, int]]) -> Graph:
    edges: set[Edge] = set()
    for lineno, u, v in pairs:
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphFormatError(f"line {lineno}: vertex id out of range 1..{n}: {u} {v}")
        if u == v:
            raise GraphFormatError(f"line {lineno}: self-loop at {u}")
        e = norm_edge(u, v)
        if e in edges:
            log.warning("line %d: duplicate edge %s ignored", lineno, e)
            continue
        edges.add(e)
    return Graph(n, frozenset(edges))


def _parse_pace(text: str) -> Graph:
    n = None
    declared_m = None
    pairs = []
    for lineno, line in _iter_lines(text):
        if line[0] in "c#":
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise GraphFormatError(f"line {lineno}: second problem line")
            if len(parts) != 4 or parts[1] != "tw":
                raise GraphFormatError(f"line {lineno}: expected 'p tw <n> <m>'")
            try:
                n, declared_m = int(parts[2]), int(parts[3])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: non-integer header") from None
            continue
        if n is None:
            raise GraphFormatError(f"line {lineno}: edge before problem line")
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected '<u> <v>'")
        try:
            pairs.append((lineno, int(parts[0]), int(parts[1])))
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer vertex") from None
    if n is None:
        raise GraphFormatError("missing 'p tw' problem line")
    g = _collect(n, pairs)
    if declared_m is not None and len(pairs) != declared_m:
        log.warning("header declares %d edges, found %d lines", declared_m, len(pairs))
    return g


def _is_numeric(line: str) -> bool:
    return all(re.fullmatch(r"-?\d+(\.\d*)?", tok) for tok in line.split())


def _parse_tsplib(text: str) -> Graph:
    header: dict[str, str] = {}
    pairs = []
    section = None
    adj_source = None
    for lineno, line in _iter_lines(text):
        if line.upper() == "EOF":
            break
        if section is not None and _is_numeric(line):
            if section != "EDGE_DATA_SECTION":
                continue
            nums = [int(x) for x in line.split()]
            fmt = header.get("EDGE_DATA_FORMAT", "EDGE_LIST").upper()
            if fmt == "EDGE_LIST":
                if nums == [-1]:
                    section = None
                elif len(nums) == 2:
                    pairs.append((lineno, nums[0], nums[1]))
                else:
                    raise GraphFormatError(f"line {lineno}: expected '<u> <v>'")
            elif fmt == "ADJ_LIST":
                for x in nums:
                    if x != -1 and adj_source is None:
                        adj_source = x
                    elif x != -1:
                        pairs.append((lineno, adj_source, x))
                    elif adj_source is not None:
                        adj_source = None
                    else:
                        section = None
            else:
                raise GraphFormatError(f"unsupported EDGE_DATA_FORMAT {fmt}")
            continue
        key = line.split(":")[0].strip().upper()
        if key.endswith("_SECTION"):
            section = key
            continue
        if ":" not in line:
            raise GraphFormatError(f"line {lineno}: malformed header line {line!r}")
        k, _, v = line.partition(":")
        header[k.strip().upper()] = v.strip()
        section = None
    if "DIMENSION" not in header:
        raise GraphFormatError("missing DIMENSION header")
    kind = header.get("TYPE", "HCP").upper()
    if kind != "HCP":
        raise GraphFormatError(f"unsupported TYPE {kind}")
    try:
        n = int(header["DIMENSION"])
    except ValueError:
        raise GraphFormatError("non-integer DIMENSION") from None
    return _collect(n, pairs)


def parse_graph(text: str, fmt: str = "pace-gr") -> Graph:
    if fmt == "pace-gr":
        return _parse_pace(text)
    if fmt == "tsplib-hcp":
        return _parse_tsplib(text)
    raise ValueError(f"unknown graph format {fmt!r}")


def write_graph(g: Graph, fmt: str = "pace-gr", name: str = "graph") -> str:
    edges = g.sorted_edges()
    if fmt == "pace-gr":
        lines = [f"p tw {g.n} {g.m}"] + [f"{u} {v}" for u, v in edges]
    elif fmt == "tsplib-hcp":
        lines = [f"NAME : {name}", "TYPE : HCP", f"DIMENSION : {g.n}",
                 "EDGE_DATA_FORMAT : EDGE_LIST", "EDGE_DATA_SECTION"]
        lines += [f"{u} {v}" for u, v in edges] + ["-1", "EOF"]
    else:
        raise ValueError(f"unknown graph format {fmt!r}")
    return "\n".join(lines) + "\n"


def guess_format(path: str) -> str:
    return "tsplib-hcp" if path.lower().endswith((".hcp", ".tsp")) else "pace-gr"


def read_graph_file(path: str) -> Graph:
    with open(path) as fh:
        return parse_graph(fh.read(), guess_format(path))


# --- statistics ---------------------------------------------------------------


@dataclass(frozen=True)
class GraphStats:
    n: int
    m: int
    min_deg: int
    avg_deg: float
    max_deg: int
    girth: int
    diameter: int


def _bfs_dist(g: Graph, s: int) -> list[int]:
    dist = [-1] * (g.n + 1)
    dist[s] = 0
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def girth(g: Graph) -> int:
    """Shortest cycle length, 0 for forests."""
    best = 0
    for s in g.vertices():
        dist = [-1] * (g.n + 1)
        parent = [0] * (g.n + 1)
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            if best and 2 * dist[u] >= best:
                break
            for w in g.adjacency[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif parent[u] != w:
                    length = dist[u] + dist[w] + 1
                    if not best or length < best:
                        best = length
    return best


def diameter(g: Graph) -> int:
    """Diameter of the largest connected component."""
    if g.n == 0:
        return 0
    comp = max(g.components(), key=len)
    return max(max(d for d in _bfs_dist(g, s) if d >= 0) for s in comp)


def stats(g: Graph) -> GraphStats:
    degs = [g.degree(v) for v in g.vertices()]
    return GraphStats(
        n=g.n,
        m=g.m,
        min_deg=min(degs, default=0),
        avg_deg=(2 * g.m / g.n) if g.n else 0.0,
        max_deg=max(degs, default=0),
        girth=girth(g),
        diameter=diameter(g),
    )
