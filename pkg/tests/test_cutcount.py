import itertools
import random

import pytest

from hamtw.cutcount import (D0, D1L, D1R, D2, CCTable, FieldTooSmall, cc_decide,
                            cc_forget, cc_introduce_edge, cc_introduce_vertex, cc_join_naive,
                            cc_leaf, draw_weights, find_anchor)
from hamtw.decomposition import TreeDecomposition, make_nice, min_fill_td
from hamtw.gf2p import GF8, GF16, GF64, mul
from hamtw.oracle import brute_force_decide

from helpers import complete_graph, cycle_graph, path_graph, petersen, random_connected


def _ham_cycles(g):
    """Each Hamiltonian cycle once, as a set of edges."""
    n = g.n
    seen = set()
    for perm in itertools.permutations(range(2, n + 1)):
        if perm[0] > perm[-1]:
            continue
        tour = (1,) + perm
        edges = [tuple(sorted((tour[i], tour[(i + 1) % n]))) for i in range(n)]
        if all(g.has_edge(*e) for e in edges):
            seen.add(frozenset(edges))
    return seen


def _cycle_sum(g, weights, spec):
    total = 0
    for cyc in _ham_cycles(g):
        prod = 1
        for e in sorted(cyc):
            prod = mul(prod, weights[e], spec)
        total ^= prod
    return total


def _combine_oracle(a, b):
    da = 0 if a == D0 else 2 if a == D2 else 1
    db = 0 if b == D0 else 2 if b == D2 else 1
    if da + db > 2:
        return None
    if da == 0:
        return b
    if db == 0:
        return a
    return D2 if a == b else None


def _join_oracle(ta, tb, spec):
    out = {}
    for sa, va in ta.values.items():
        for sb, vb in tb.values.items():
            t = tuple(_combine_oracle(a, b) for a, b in zip(sa, sb))
            if None in t:
                continue
            out[t] = out.get(t, 0) ^ mul(va, vb, spec)
    return {k: v for k, v in out.items() if v}


def test_k3_root_is_weight_product():
    g = complete_graph(3)
    nice = make_nice(g, TreeDecomposition.build({1: {1, 2, 3}}))
    res = cc_decide(g, nice, seed=11)
    w = draw_weights(g, 11)
    assert res.hamiltonian
    assert res.root_value == mul(mul(w[(1, 2)], w[(1, 3)]), w[(2, 3)])
    assert res.failure_bound == 3 / 2 ** 64


def test_p4_and_petersen_no():
    for g in (path_graph(4), petersen()):
        nice = make_nice(g, min_fill_td(g))
        for seed in range(3):
            assert not cc_decide(g, nice, seed=seed).hamiltonian


@pytest.mark.parametrize("spec", [GF8, GF16, GF64])
def test_root_equals_hamiltonian_cycle_sum(spec):
    rng = random.Random(spec.p)
    for _ in range(40):
        g = random_connected(rng, rng.randint(3, 8))
        nice = make_nice(g, min_fill_td(g))
        seed = rng.randint(0, 10 ** 6)
        res = cc_decide(g, nice, spec, seed=seed)
        expect = _cycle_sum(g, draw_weights(g, seed, spec), spec) if min(
            g.degree(v) for v in g.vertices()) >= 2 else 0
        assert res.root_value == expect


def test_introduce_edge_two_zero_digits():
    tbl = CCTable((1, 2, 3), {(D0, D0, D0): 1})
    out = cc_introduce_edge(tbl, 1, 2, 7, anchor=3)
    assert out.values == {(D0, D0, D0): 1, (D1L, D1L, D0): 7, (D1R, D1R, D0): 7}
    pinned = cc_introduce_edge(tbl, 1, 2, 7, anchor=1)
    assert (D1R, D1R, D0) not in pinned.values and (D1L, D1L, D0) in pinned.values


def test_introduce_edge_side_mismatch_not_taken():
    tbl = CCTable((1, 2), {(D1L, D1R): 5})
    assert cc_introduce_edge(tbl, 1, 2, 9, anchor=None).values == {(D1L, D1R): 5}
    tbl = CCTable((1, 2), {(D1R, D1R): 5, (D2, D0): 3})
    assert cc_introduce_edge(tbl, 1, 2, 1, anchor=None).values == {
        (D1R, D1R): 5, (D2, D2): 5, (D2, D0): 3}


def test_introduce_edge_extends_path_and_pin():
    tbl = CCTable((1, 2), {(D0, D1R): 1, (D0, D1L): 1})
    out = cc_introduce_edge(tbl, 1, 2, 2, anchor=None)
    assert out.values[(D1R, D2)] == 2 and out.values[(D1L, D2)] == 2
    # the anchor may never sit on the right
    pinned = cc_introduce_edge(tbl, 1, 2, 2, anchor=1)
    assert (D1R, D2) not in pinned.values and (D1L, D2) in pinned.values


def test_introduce_edge_cancellation():
    tbl = CCTable((1, 2), {(D0, D0): 1, (D1L, D1L): 5})
    out = cc_introduce_edge(tbl, 1, 2, 5, anchor=None)
    assert (D1L, D1L) not in out.values
    assert out.values[(D1R, D1R)] == 5 and out.values[(D2, D2)] == mul(5, 5)


def test_forget_and_introduce_vertex():
    assert cc_leaf().values == {(): 1}
    t = cc_introduce_vertex(CCTable((1, 3), {(D2, D1L): 4}), 2)
    assert t.bag == (1, 2, 3) and t.values == {(D2, D0, D1L): 4}
    with pytest.raises(ValueError):
        cc_introduce_vertex(t, 2)
    f = cc_forget(CCTable((1, 2), {(D2, D1L): 4, (D1L, D1L): 6, (D0, D0): 1}), 1)
    assert f.bag == (2,) and f.values == {(D1L,): 4}


def _random_table(rng, ell, spec, density=0.4):
    vals = {}
    for s in itertools.product(range(4), repeat=ell):
        if rng.random() < density:
            vals[s] = rng.randrange(1, spec.order)
    return CCTable(tuple(range(1, ell + 1)), vals)


@pytest.mark.parametrize("spec", [GF8, GF64])
def test_naive_join_matches_double_loop(spec):
    rng = random.Random(4)
    for ell in range(0, 5):
        for _ in range(10):
            ta, tb = _random_table(rng, ell, spec), _random_table(rng, ell, spec)
            out = cc_join_naive(ta, tb, spec)
            assert out.values == _join_oracle(ta, tb, spec)
            assert out.values == cc_join_naive(tb, ta, spec).values


def test_join_bag_mismatch():
    with pytest.raises(ValueError):
        cc_join_naive(CCTable((1,), {}), CCTable((2,), {}))


def test_seed_determinism():
    g = cycle_graph(7)
    nice = make_nice(g, min_fill_td(g))
    a, b = cc_decide(g, nice, seed=42), cc_decide(g, nice, seed=42)
    assert a.root_value == b.root_value and a.seed == 42
    assert cc_decide(g, nice).seed is not None


def test_field_too_small():
    g = cycle_graph(256)
    nice = make_nice(g, min_fill_td(g))
    with pytest.raises(FieldTooSmall):
        cc_decide(g, nice, GF8, seed=0)
    assert cc_decide(g, nice, GF16, seed=0).hamiltonian


def test_bad_join_kind_and_anchor():
    g = cycle_graph(4)
    nice = make_nice(g, min_fill_td(g))
    with pytest.raises(ValueError):
        cc_decide(g, nice, seed=0, join_kind="other")
    assert find_anchor(nice) is not None


def test_one_sided_against_oracle():
    rng = random.Random(31)
    for _ in range(150):
        g = random_connected(rng, rng.randint(3, 10))
        nice = make_nice(g, min_fill_td(g))
        truth = brute_force_decide(g)
        for seed in range(2):
            res = cc_decide(g, nice, seed=seed)
            if res.hamiltonian:
                assert truth
            else:
                assert not truth
