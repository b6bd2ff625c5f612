"""Acceptance criteria, one test each.  A PASS/FAIL line per criterion is
printed in the terminal summary (see conftest.py)."""

import math
import random
import statistics
import time

import pytest

from hamtw.cutcount import cc_decide, cc_join_naive, CCTable
from hamtw.dp_naive import count_pairings, solve_naive
from hamtw.dp_rank import (ReducePolicy, all_matchings, compute_basis, gf2_rank, reduce_bucket,
                           single_cycle, solve_rank)
from hamtw.extraction import call_bound, extract_self_reduce, verify_cycle
from hamtw.decomposition import validate_td
from hamtw.generator import GenParams, generate
from hamtw.gf2p import GF8, GF64, add, clmul_portable, clmul_windowed, inv, mul, power
from hamtw.oracle import brute_force_decide
from hamtw.solve import prepare
from hamtw.z4conv import Z4Table, cc_join_fast, fast_z4_convolution, naive_z4_convolution

from helpers import oracle_suite

FORCE = {2: 1, 4: 1, 6: 1, 8: 1}


@pytest.fixture(scope="module")
def suite():
    graphs = oracle_suite(500, seed=2024, nmax=12)
    return [(g, nice, brute_force_decide(g)) for g, nice in graphs]


def _tag(record_property, criterion, detail):
    record_property("criterion", criterion)
    record_property("detail", detail)


def test_oracle_equivalence(suite, record_property):
    started = time.perf_counter()
    wrong = {"naive": 0, "cut4t": 0, "improved": 0, "cc_false_yes": 0, "cc_false_no": 0}
    for g, nice, truth in suite:
        wrong["naive"] += solve_naive(g, nice, "decision").hamiltonian != truth
        wrong["cut4t"] += solve_rank(g, nice, "cut4t", mode="decision").hamiltonian != truth
        wrong["improved"] += solve_rank(g, nice, "improved", mode="decision").hamiltonian != truth
        for seed in range(3):
            got = cc_decide(g, nice, seed=seed).hamiltonian
            wrong["cc_false_yes"] += got and not truth
            wrong["cc_false_no"] += truth and not got
    secs = time.perf_counter() - started
    yes = sum(t for _, _, t in suite)
    _tag(record_property, "oracle equivalence (500 graphs, n<=12)",
         f"{yes} yes / {len(suite) - yes} no; disagreements {wrong}; {secs:.1f} s")
    assert len(suite) == 500 and not any(wrong.values())
    assert secs <= 120


def test_pairing_counts(record_property):
    def enum(items):
        if not items:
            return 1
        return sum(enum(items[1:i] + items[i + 1:]) for i in range(1, len(items)))

    got = {ell: (count_pairings(ell), enum(list(range(ell))), len(all_matchings(ell)))
           for ell in (4, 6, 8)}
    _tag(record_property, "pairing counts (l-1)!!", str(got))
    assert got == {4: (3, 3, 3), 6: (15, 15, 15), 8: (105, 105, 105)}


def test_rank_law(record_property):
    started = time.perf_counter()
    ranks = {}
    for ell in (2, 4, 6, 8):
        mats = all_matchings(ell)
        rows = []
        for pm in mats:
            r = 0
            for k, q in enumerate(mats):
                if single_cycle(pm, q):
                    r |= 1 << k
            rows.append(r)
        basis = compute_basis(ell)
        idx = [mats.index(p) for p in basis.partners]
        ranks[ell] = (gf2_rank(rows), len(basis), gf2_rank(rows[i] for i in idx))
    secs = time.perf_counter() - started
    _tag(record_property, "rank law 2^(l/2-1)", f"(full, basis size, basis rank) {ranks}; {secs:.1f} s")
    assert ranks == {2: (1, 1, 1), 4: (2, 2, 2), 6: (4, 4, 4), 8: (8, 8, 8)}
    assert secs <= 30


def _fits(partner_states, q):
    return any(single_cycle(tuple(x - 1 for x in s), q) for s, _ in partner_states)


def _states(pms):
    return [(tuple(j + 1 for j in pm), None) for pm in pms]


def test_representativeness(record_property):
    import itertools
    rng = random.Random(2)
    checked = 0
    violations = 0
    size_ok = True
    for kind in ("cut4t", "improved"):
        policy = ReducePolicy(kind, small_tw_thresholds=dict(FORCE))
        for ell in (2, 4):
            mats = all_matchings(ell)
            bag = tuple(range(1, ell + 1))
            for r in range(1, len(mats) + 1):
                for sub in itertools.combinations(mats, r):
                    fam = _states(sub)
                    kept = reduce_bucket(fam, bag, policy)
                    size_ok &= len(kept) <= policy.bound(ell)
                    for q in mats:
                        checked += 1
                        violations += _fits(fam, q) and not _fits(kept, q)
        for ell in (6, 8):
            mats = all_matchings(ell)
            bag = tuple(range(1, ell + 1))
            for _ in range(1000):
                fam = _states(rng.sample(mats, rng.randint(1, len(mats))))
                kept = reduce_bucket(fam, bag, policy)
                size_ok &= len(kept) <= policy.bound(ell)
                q = rng.choice(mats)
                checked += 1
                violations += _fits(fam, q) and not _fits(kept, q)
    _tag(record_property, "representativeness of reduce",
         f"{checked} (family, matching) checks, {violations} violations, size bound ok={size_ok}")
    assert violations == 0 and size_ok


def test_convolution_equivalence(record_property):
    started = time.perf_counter()
    rng = random.Random(3)
    mismatches = 0
    pairs = 0
    for m in (1, 2, 3):
        for spec in (GF8, GF64):
            for _ in range(200):
                f = Z4Table(m, [rng.getrandbits(spec.p) for _ in range(4 ** m)])
                g = Z4Table(m, [rng.getrandbits(spec.p) for _ in range(4 ** m)])
                stats = {}
                # fast path raises InexactDivision if a coefficient is not a multiple of 4^m
                fast = fast_z4_convolution(f, g, spec, stats)
                ref = naive_z4_convolution(f, g, lambda a, b: a ^ b, lambda a, b: mul(a, b, spec))
                mismatches += fast.values != ref.values
                pairs += 1
    secs = time.perf_counter() - started
    _tag(record_property, "Z4^m convolution fast = naive",
         f"{pairs} pairs, {mismatches} mismatches, exact division asserted; {secs:.1f} s")
    assert mismatches == 0 and secs <= 60


def test_join_equivalence(suite, record_property):
    import itertools
    rng = random.Random(4)
    table_mismatch = 0
    for k in range(200):
        m = k % 6
        spec = GF64
        tabs = []
        for _ in range(2):
            vals = {s: rng.randrange(1, spec.order) for s in itertools.product(range(4), repeat=m)
                    if rng.random() < 0.5}
            tabs.append(CCTable(tuple(range(1, m + 1)), vals))
        table_mismatch += cc_join_fast(*tabs).values != cc_join_naive(*tabs).values
    e2e_mismatch = 0
    for i, (g, nice, _) in enumerate(suite):
        a = cc_decide(g, nice, seed=i, join_kind="naive")
        b = cc_decide(g, nice, seed=i, join_kind="fast")
        e2e_mismatch += (a.hamiltonian, a.root_value) != (b.hamiltonian, b.root_value)
    _tag(record_property, "Cut&Count join fast = naive",
         f"200 table pairs (bag <= 5): {table_mismatch} mismatches; "
         f"{len(suite)} end-to-end runs: {e2e_mismatch} mismatches")
    assert table_mismatch == 0 and e2e_mismatch == 0


def test_field_correctness(record_property):
    rng = random.Random(5)
    failures = {}
    for spec in (GF64, GF8):
        bad = 0
        slow = spec.with_path(False)
        for _ in range(10 ** 4):
            a, b, c = (rng.getrandbits(spec.p) for _ in range(3))
            bad += mul(a, b, spec) != mul(b, a, spec)
            bad += mul(mul(a, b, spec), c, spec) != mul(a, mul(b, c, spec), spec)
            bad += mul(a, add(b, c), spec) != add(mul(a, b, spec), mul(a, c, spec))
            bad += mul(a, 1, spec) != a or add(a, a) != 0
            bad += power(add(a, b), 2, spec) != add(power(a, 2, spec), power(b, 2, spec))
            if a:
                bad += mul(a, inv(a, spec), spec) != 1
            bad += mul(a, b, spec) != mul(a, b, slow)
            bad += clmul_windowed(a, b) != clmul_portable(a, b)
        failures[f"GF(2^{spec.p})"] = bad
    _tag(record_property, "field arithmetic GF(2^64), GF(2^8)",
         f"10^4 cases each: failures {failures}")
    assert not any(failures.values())


def test_extraction_bound(record_property):
    rng = random.Random(6)
    worst = 0.0
    over = bad = 0
    nmax = 0
    started = time.perf_counter()

    def decide(h, nice):
        return solve_naive(h, nice, "decision").hamiltonian

    for k in range(100):
        a = rng.choice([2, 6, 6, 10])
        b = rng.randint(2, 200 // a)
        inst = generate(GenParams(a, b, rng.uniform(0.05, 0.9), seed=k))
        g = inst.graph
        nmax = max(nmax, g.n)
        rep = extract_self_reduce(g, inst.td, decide)
        bound = call_bound(g)
        over += rep.decision_calls > bound
        bad += not verify_cycle(g, rep.cycle)
        worst = max(worst, rep.decision_calls / bound)
    secs = time.perf_counter() - started
    _tag(record_property, "extraction call bound 4n(1+ceil(log2 D))",
         f"100 instances, n <= {nmax}; over bound {over}, invalid {bad}, "
         f"max calls/bound {worst:.2f}; {secs:.1f} s")
    assert over == 0 and bad == 0 and secs <= 300


def test_generator_soundness(record_property):
    rng = random.Random(7)
    bad = 0
    started = time.perf_counter()
    for k in range(100):
        a = rng.choice([2, 6, 10, 14])
        b = rng.randint(1, 30)
        if a * b < 3:
            b = 2
        inst = generate(GenParams(a, b, rng.uniform(0.01, 0.99), seed=k))
        res = validate_td(inst.graph, inst.td)
        bad += not (verify_cycle(inst.graph, inst.planted_cycle) and res.valid and res.width <= a)
    secs = time.perf_counter() - started
    _tag(record_property, "generator soundness", f"100 draws, {bad} failures; {secs:.1f} s")
    assert bad == 0 and secs <= 60


def test_policy_neutrality(suite, record_property):
    changed = 0
    runs = 0
    for g, nice, truth in suite:
        for variant in ("cut4t", "improved"):
            policies = [ReducePolicy(variant, {4: t, 6: t, 8: t}) for t in (1, 16)]
            policies += [ReducePolicy(variant, alpha=al, width_switch=-1) for al in (0.5, 8.0)]
            for pol in policies:
                runs += 1
                changed += solve_rank(g, nice, variant, pol, "decision").hamiltonian != truth
    _tag(record_property, "policy neutrality (tau 1/16, alpha 0.5/8)",
         f"{runs} runs, {changed} answers changed")
    assert changed == 0


def test_qualitative_scaling(record_property):
    sizes = {500: 84, 1000: 167, 2000: 334}
    repeats = 9
    times = {}
    for n, b in sizes.items():
        inst = generate(GenParams(6, b, 0.3, seed=1))
        nice = prepare(inst.graph, inst.td)
        for name in ("naive", "improved"):
            samples = []
            for _ in range(repeats):
                t0 = time.perf_counter()
                if name == "naive":
                    out = solve_naive(inst.graph, nice, "witness")
                else:
                    out = solve_rank(inst.graph, nice, "improved", mode="witness")
                samples.append(time.perf_counter() - t0)
                assert out.hamiltonian and verify_cycle(inst.graph, out.cycle)
            times[(name, n)] = statistics.median(samples)
    ratios = {name: [times[(name, 1000)] / times[(name, 500)],
                     times[(name, 2000)] / times[(name, 1000)]] for name in ("naive", "improved")}
    ok = all(1.3 <= r <= 3.2 for rs in ratios.values() for r in rs)
    detail = "; ".join(f"{name}: " + ", ".join(f"{r:.2f}" for r in rs) for name, rs in ratios.items())
    _tag(record_property, "qualitative linear scaling in n (a=6)",
         f"median-of-{repeats} doubling ratios {detail} (target [1.3, 3.2])")
    assert ok
