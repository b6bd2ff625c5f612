"""Tree decompositions: validation, min-fill construction, PACE .td I/O and
conversion to nice decompositions with introduce-edge nodes."""

from __future__ import annotations

import random
from bisect import insort
from collections import defaultdict, deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from .graph import Graph, norm_edge


class DecompositionError(ValueError):
    pass


class WidthCapExceeded(DecompositionError):
    pass


@dataclass(frozen=True)
class TreeDecomposition:
    bags: dict  # node id -> frozenset of vertices
    tree_edges: tuple = ()

    @classmethod
    def build(cls, bags: dict, tree_edges: Iterable[tuple[int, int]] = ()):
        return cls({k: frozenset(v) for k, v in bags.items()},
                   tuple((a, b) for a, b in tree_edges))

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1

    def adjacency(self) -> dict:
        adj = {t: [] for t in self.bags}
        for a, b in self.tree_edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj


@dataclass(frozen=True)
class TDCheck:
    valid: bool
    width: int = -1
    violation: str = ""

    def __bool__(self):
        return self.valid


def validate_td(g: Graph, td: TreeDecomposition) -> TDCheck:
    """Check tree shape, vertex coverage/connectivity and edge coverage."""
    nodes = set(td.bags)
    if not nodes:
        if g.n == 0:
            return TDCheck(True, -1)
        return TDCheck(False, violation="decomposition has no bags")
    for a, b in td.tree_edges:
        if a not in nodes or b not in nodes:
            return TDCheck(False, violation=f"tree edge ({a}, {b}) references unknown bag")
        if a == b:
            return TDCheck(False, violation=f"tree self-loop at bag {a}")
    if len(set(map(frozenset, td.tree_edges))) != len(td.tree_edges):
        return TDCheck(False, violation="parallel tree edges")
    if len(td.tree_edges) != len(nodes) - 1:
        return TDCheck(False, violation="tree: edge count != bags - 1")
    adj = td.adjacency()
    start = next(iter(nodes))
    seen = {start}
    queue = deque([start])
    while queue:
        t = queue.popleft()
        for s in adj[t]:
            if s not in seen:
                seen.add(s)
                queue.append(s)
    if seen != nodes:
        return TDCheck(False, violation="tree: not connected")

    occurs = defaultdict(list)
    for t, bag in td.bags.items():
        for v in bag:
            if not 1 <= v <= g.n:
                return TDCheck(False, violation=f"bag {t} holds unknown vertex {v}")
            occurs[v].append(t)
    for v in g.vertices():
        occ = occurs.get(v)
        if not occ:
            return TDCheck(False, violation=f"coverage: vertex {v} in no bag")
        occ_set = set(occ)
        seen = {occ[0]}
        queue = deque([occ[0]])
        while queue:
            t = queue.popleft()
            for s in adj[t]:
                if s in occ_set and s not in seen:
                    seen.add(s)
                    queue.append(s)
        if len(seen) != len(occ_set):
            return TDCheck(False, violation=f"connectivity: bags containing vertex {v} are disconnected")
    for u, v in g.edges:
        if not set(occurs[u]) & set(occurs[v]):
            return TDCheck(False, violation=f"edge ({u}, {v}) not contained in any bag")
    return TDCheck(True, td.width)


# --- elimination orderings ------------------------------------------------------


def _fill(adj: dict, v: int) -> int:
    nb = list(adj[v])
    missing = 0
    for i, a in enumerate(nb):
        na = adj[a]
        for b in nb[i + 1:]:
            if b not in na:
                missing += 1
    return missing


def min_fill_order(g: Graph, tie_break_seed: Optional[int] = None,
                   width_cap: Optional[int] = None) -> list[int]:
    """Greedy minimum fill-in elimination order.

    Ties go to the smaller degree, then the smaller vertex id.  With a seed,
    remaining ties are broken at random instead of by id.  ``width_cap`` aborts
    with :class:`WidthCapExceeded` as soon as an eliminated vertex has more
    than ``width_cap`` remaining neighbours.
    """
    adj = {v: set(g.neighbors(v)) for v in g.vertices()}
    fill = {v: _fill(adj, v) for v in adj}
    rng = random.Random(tie_break_seed) if tie_break_seed is not None else None
    order = []
    while adj:
        if rng is None:
            v = min(adj, key=lambda x: (fill[x], len(adj[x]), x))
        else:
            best = min((fill[x], len(adj[x])) for x in adj)
            v = rng.choice(sorted(x for x in adj if (fill[x], len(adj[x])) == best))
        nb = adj.pop(v)
        del fill[v]
        if width_cap is not None and len(nb) > width_cap:
            raise WidthCapExceeded(f"eliminating {v} creates a bag of width {len(nb)}")
        for a in nb:
            adj[a].discard(v)
            adj[a] |= nb - {a}
        touched = set(nb)
        for a in nb:
            touched |= adj[a]
        for a in touched:
            fill[a] = _fill(adj, a)
        order.append(v)
    return order


def order_to_td(g: Graph, order: list[int]) -> TreeDecomposition:
    if sorted(order) != list(g.vertices()):
        raise DecompositionError("order is not a permutation of the vertices")
    pos = {v: i for i, v in enumerate(order)}
    adj = {v: set(g.neighbors(v)) for v in g.vertices()}
    later = {}
    for v in order:
        nb = {u for u in adj[v] if pos[u] > pos[v]}
        later[v] = nb
        for a in nb:
            adj[a] |= nb - {a}
    bags = {}
    edges = []
    roots = []
    for i, v in enumerate(order, 1):
        bags[i] = frozenset(later[v] | {v})
    for i, v in enumerate(order, 1):
        if later[v]:
            parent = min(later[v], key=pos.__getitem__)
            edges.append((i, pos[parent] + 1))
        else:
            roots.append(i)
    for a, b in zip(roots, roots[1:]):
        edges.append((a, b))
    return TreeDecomposition(bags, tuple(edges))


def min_fill_td(g: Graph, tie_break_seed: Optional[int] = None,
                width_cap: Optional[int] = None) -> TreeDecomposition:
    if g.n == 0:
        return TreeDecomposition({1: frozenset()}, ())
    return order_to_td(g, min_fill_order(g, tie_break_seed, width_cap))


# --- PACE .td format -------------------------------------------------------------


def parse_td(text: str) -> tuple[TreeDecomposition, int]:
    """Parse PACE ``.td`` text; returns the decomposition and the declared n."""
    header = None
    bags: dict[int, frozenset] = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] == "c":
            continue
        parts = line.split()
        try:
            if parts[0] == "s":
                if len(parts) != 5 or parts[1] != "td" or header is not None:
                    raise DecompositionError(f"line {lineno}: malformed solution line")
                header = tuple(int(x) for x in parts[2:])
            elif parts[0] == "b":
                if header is None:
                    raise DecompositionError(f"line {lineno}: bag before solution line")
                bid = int(parts[1])
                if not 1 <= bid <= header[0]:
                    raise DecompositionError(f"line {lineno}: bag id {bid} out of range")
                if bid in bags:
                    raise DecompositionError(f"line {lineno}: bag {bid} declared twice")
                bags[bid] = frozenset(int(x) for x in parts[2:])
            else:
                if header is None or len(parts) != 2:
                    raise DecompositionError(f"line {lineno}: malformed line {line!r}")
                a, b = int(parts[0]), int(parts[1])
                if not (1 <= a <= header[0] and 1 <= b <= header[0]):
                    raise DecompositionError(f"line {lineno}: bag id out of range")
                edges.append((a, b))
        except ValueError as exc:
            if isinstance(exc, DecompositionError):
                raise
            raise DecompositionError(f"line {lineno}: non-integer token") from None
    if header is None:
        raise DecompositionError("missing 's td' line")
    for bid in range(1, header[0] + 1):
        bags.setdefault(bid, frozenset())
    return TreeDecomposition(bags, tuple(edges)), header[2]


def write_td(td: TreeDecomposition, n: int) -> str:
    ids = sorted(td.bags)
    if ids != list(range(1, len(ids) + 1)):
        remap = {old: new for new, old in enumerate(ids, 1)}
        td = TreeDecomposition({remap[k]: v for k, v in td.bags.items()},
                               tuple((remap[a], remap[b]) for a, b in td.tree_edges))
        ids = sorted(td.bags)
    lines = [f"s td {len(ids)} {td.width + 1} {n}"]
    for bid in ids:
        lines.append(" ".join(["b", str(bid)] + [str(v) for v in sorted(td.bags[bid])]))
    lines += [f"{a} {b}" for a, b in td.tree_edges]
    return "\n".join(lines) + "\n"


def read_td_file(path: str) -> TreeDecomposition:
    with open(path) as fh:
        return parse_td(fh.read())[0]


# --- nice decompositions ---------------------------------------------------------


class Kind(Enum):
    LEAF = "leaf"
    INTRODUCE_VERTEX = "introduce-vertex"
    INTRODUCE_EDGE = "introduce-edge"
    FORGET = "forget"
    JOIN = "join"


@dataclass
class NiceNode:
    kind: Kind
    bag: tuple  # sorted vertices
    children: tuple = ()
    vertex: int = 0
    edge: tuple = ()
    subtree_count: int = 0


@dataclass
class NiceDecomposition:
    """Nodes are stored in post-order; the last node is the root."""

    nodes: list = field(default_factory=list)
    n: int = 0

    @property
    def root(self) -> int:
        return len(self.nodes) - 1

    @property
    def width(self) -> int:
        return max((len(t.bag) for t in self.nodes), default=0) - 1

    def __len__(self):
        return len(self.nodes)


class _NiceBuilder:
    def __init__(self, g: Graph):
        self.g = g
        self.nodes: list[NiceNode] = []
        self.done_edges: set = set()

    def add(self, node: NiceNode) -> int:
        self.nodes.append(node)
        return len(self.nodes) - 1

    def leaf(self) -> int:
        return self.add(NiceNode(Kind.LEAF, ()))

    def introduce(self, child: int, v: int) -> int:
        c = self.nodes[child]
        bag = list(c.bag)
        insort(bag, v)
        return self.add(NiceNode(Kind.INTRODUCE_VERTEX, tuple(bag), (child,), vertex=v,
                                 subtree_count=c.subtree_count + 1))

    def forget(self, child: int, v: int) -> int:
        c = self.nodes[child]
        bag = c.bag
        others = [u for u in bag if u != v and u in self.g.adjacency[v]]
        for u in others:
            e = norm_edge(u, v)
            if e in self.done_edges:
                continue
            self.done_edges.add(e)
            child = self.add(NiceNode(Kind.INTRODUCE_EDGE, bag, (child,), edge=e,
                                      subtree_count=c.subtree_count))
        return self.add(NiceNode(Kind.FORGET, tuple(u for u in bag if u != v), (child,),
                                 vertex=v, subtree_count=c.subtree_count))

    def join(self, a: int, b: int) -> int:
        na, nb = self.nodes[a], self.nodes[b]
        assert na.bag == nb.bag
        count = na.subtree_count + nb.subtree_count - len(na.bag)
        return self.add(NiceNode(Kind.JOIN, na.bag, (a, b), subtree_count=count))

    def morph(self, child: int, target: frozenset) -> int:
        cur = set(self.nodes[child].bag)
        for v in sorted(cur - target):
            child = self.forget(child, v)
        for v in sorted(target - cur):
            child = self.introduce(child, v)
        return child


def make_nice(g: Graph, td: TreeDecomposition, check: bool = True) -> NiceDecomposition:
    """Turn a tree decomposition into a nice one with introduce-edge nodes.

    The root is the bag of maximum size (smallest id on ties); it is padded with
    forget nodes so the final bag is empty.  Every edge is introduced right
    before the first forget of one of its endpoints.
    """
    if check:
        res = validate_td(g, td)
        if not res:
            raise DecompositionError(f"invalid tree decomposition: {res.violation}")
    if not td.bags:
        raise DecompositionError("empty decomposition")
    adj = td.adjacency()
    root = min(td.bags, key=lambda t: (-len(td.bags[t]), t))
    parent = {root: None}
    order = [root]
    for t in order:
        for s in sorted(adj[t]):
            if s not in parent:
                parent[s] = t
                order.append(s)
    children = defaultdict(list)
    for t in order[1:]:
        children[parent[t]].append(t)

    b = _NiceBuilder(g)
    top: dict[int, int] = {}
    for t in reversed(order):
        bag = td.bags[t]
        branches = [b.morph(top.pop(c), bag) for c in children[t]]
        if not branches:
            branches = [b.morph(b.leaf(), bag)]
        cur = branches[0]
        for other in branches[1:]:
            cur = b.join(cur, other)
        top[t] = cur
    final = b.morph(top[root], frozenset())
    assert final == len(b.nodes) - 1
    return NiceDecomposition(b.nodes, g.n)


def validate_nice(g: Graph, nice: NiceDecomposition) -> list[str]:
    """Return a list of violated nice-decomposition invariants (empty if fine)."""
    errors = []
    nodes = nice.nodes
    if not nodes:
        return ["no nodes"]
    if nodes[-1].bag:
        errors.append("root bag not empty")
    seen_edges: dict = {}
    parent_of = {}
    for i, t in enumerate(nodes):
        for c in t.children:
            if c >= i:
                errors.append(f"node {i}: child {c} not before parent (post-order)")
            if c in parent_of:
                errors.append(f"node {c} has two parents")
            parent_of[c] = i
        if list(t.bag) != sorted(set(t.bag)):
            errors.append(f"node {i}: bag not sorted/unique")
        kids = [nodes[c] for c in t.children]
        if t.kind is Kind.LEAF:
            if t.children or t.bag or t.subtree_count != 0:
                errors.append(f"node {i}: bad leaf")
        elif t.kind is Kind.INTRODUCE_VERTEX:
            if len(kids) != 1 or t.vertex in kids[0].bag or \
                    set(t.bag) != set(kids[0].bag) | {t.vertex} or \
                    t.subtree_count != kids[0].subtree_count + 1:
                errors.append(f"node {i}: bad introduce-vertex")
        elif t.kind is Kind.INTRODUCE_EDGE:
            u, v = t.edge
            if len(kids) != 1 or t.bag != kids[0].bag or u not in t.bag or v not in t.bag:
                errors.append(f"node {i}: bad introduce-edge")
            if t.edge in seen_edges:
                errors.append(f"edge {t.edge} introduced twice")
            seen_edges[t.edge] = i
            if t.subtree_count != kids[0].subtree_count:
                errors.append(f"node {i}: subtree count changed at introduce-edge")
        elif t.kind is Kind.FORGET:
            if len(kids) != 1 or t.vertex not in kids[0].bag or \
                    set(t.bag) != set(kids[0].bag) - {t.vertex} or \
                    t.subtree_count != kids[0].subtree_count:
                errors.append(f"node {i}: bad forget")
        elif t.kind is Kind.JOIN:
            if len(kids) != 2 or kids[0].bag != t.bag or kids[1].bag != t.bag or \
                    t.subtree_count != kids[0].subtree_count + kids[1].subtree_count - len(t.bag):
                errors.append(f"node {i}: bad join")
    missing = set(g.edges) - set(seen_edges)
    if missing:
        errors.append(f"edges never introduced: {sorted(missing)[:5]}")
    # post-order: the subtree of node i occupies indices lo[i]..i
    lo = list(range(len(nodes)))
    for i, t in enumerate(nodes):
        for c in t.children:
            lo[i] = min(lo[i], lo[c])
    for i, t in enumerate(nodes):
        if t.kind is not Kind.FORGET:
            continue
        v = t.vertex
        for u in g.adjacency[v]:
            at = seen_edges.get(norm_edge(u, v))
            if at is not None and not lo[i] <= at < i:
                errors.append(f"edge {norm_edge(u, v)} not introduced below forget of {v}")
    if nodes[-1].subtree_count != g.n:
        errors.append(f"root subtree count {nodes[-1].subtree_count} != n={g.n}")
    return errors

