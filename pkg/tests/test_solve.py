import random

import pytest

from hamtw.decomposition import DecompositionError, TreeDecomposition
from hamtw.extraction import verify_cycle
from hamtw.oracle import brute_force_decide
from hamtw.solve import (ALGORITHMS, AUTO_WITNESS_MAX_BAG, canonical_algorithm, prepare,
                         resolve_mode, solve)

from helpers import cycle_graph, petersen, random_connected


def test_aliases_and_unknown():
    assert canonical_algorithm("cutcount") == "cutcount-naive-join"
    assert canonical_algorithm("rank") == "rank-improved"
    assert canonical_algorithm("rank4t") == "rank4t"
    with pytest.raises(ValueError):
        canonical_algorithm("magic")


def test_resolve_mode():
    assert resolve_mode("auto", AUTO_WITNESS_MAX_BAG - 1) == "witness"
    assert resolve_mode("auto", AUTO_WITNESS_MAX_BAG) == "decision"
    assert resolve_mode("decision", 1) == "decision"
    with pytest.raises(ValueError):
        resolve_mode("fast", 1)


def test_prepare_rejects_invalid_td():
    with pytest.raises(DecompositionError):
        prepare(cycle_graph(4), TreeDecomposition.build({1: {1, 2, 3}}))


@pytest.mark.parametrize("algo", ALGORITHMS)
def test_every_algorithm_examples(algo):
    c8 = cycle_graph(8)
    res = solve(c8, algorithm=algo, mode="witness", seed=3)
    assert res.hamiltonian and verify_cycle(c8, res.cycle)
    assert res.width == 2 and res.algorithm == algo
    assert not solve(petersen(), algorithm=algo, mode="witness", seed=3).hamiltonian
    dec = solve(c8, algorithm=algo, mode="decision", seed=3)
    assert dec.hamiltonian and dec.cycle is None


def test_cutcount_witness_counts_calls():
    g = cycle_graph(6)
    res = solve(g, algorithm="cutcount", mode="witness", seed=1)
    assert res.decision_calls > 1 and res.seed == 1
    assert solve(g, algorithm="cutcount", mode="decision", seed=1).decision_calls == 1


def test_rank_policy_reported():
    res = solve(cycle_graph(5), algorithm="rank4t", tau={4: 7}, alpha=3.0)
    assert res.policy["tau"][4] == 7 and res.policy["alpha"] == 3.0


def test_policy_values_do_not_change_answers():
    rng = random.Random(77)
    for _ in range(60):
        g = random_connected(rng, rng.randint(3, 10))
        nice = prepare(g)
        truth = brute_force_decide(g)
        for algo in ("rank4t", "rank-improved"):
            for kw in ({"tau": {4: 1, 6: 1, 8: 1}}, {"tau": {4: 16, 6: 16, 8: 16}},
                       {"alpha": 0.5, "width_switch": -1}, {"alpha": 8.0, "width_switch": -1}):
                assert solve(g, nice, algo, "decision", **kw).hamiltonian == truth
