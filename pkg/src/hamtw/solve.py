"""One entry point over all solvers, used by the CLI and the bench harness."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Optional

from .cutcount import cc_decide
from .decomposition import (DecompositionError, NiceDecomposition, TreeDecomposition,
                            make_nice, min_fill_td, validate_td)
from .dp_naive import solve_naive, trivially_non_hamiltonian
from .dp_rank import DEFAULT_TAU, ReducePolicy, solve_rank
from .extraction import ExtractionError, extract_self_reduce
from .gf2p import GF64, FieldSpec
from .graph import Graph

ALGORITHMS = ("naive", "rank4t", "rank-improved", "cutcount-naive-join", "cutcount-fast-join")
ALIASES = {"cutcount": "cutcount-naive-join", "rank": "rank-improved"}
MODES = ("witness", "decision", "auto")
# bags of more than 11 vertices switch auto mode to decision
AUTO_WITNESS_MAX_BAG = 11


@dataclass
class SolveResult:
    algorithm: str
    mode: str
    hamiltonian: bool
    cycle: Optional[list] = None
    peak_table: int = 0
    decision_calls: int = 0
    seed: Optional[int] = None
    seconds: float = 0.0
    width: int = -1
    note: str = ""
    policy: dict = field(default_factory=dict)


def canonical_algorithm(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")
    return name


def resolve_mode(mode: str, width: int) -> str:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "auto":
        return "witness" if width + 1 <= AUTO_WITNESS_MAX_BAG else "decision"
    return mode


def prepare(g: Graph, td: Optional[TreeDecomposition] = None) -> NiceDecomposition:
    if td is None:
        td = min_fill_td(g)
    else:
        check = validate_td(g, td)
        if not check.valid:
            raise DecompositionError(f"invalid decomposition: {check.violation}")
    return make_nice(g, td)


def _policy_for(variant: str, tau: Optional[dict], alpha: Optional[float],
                width_switch: Optional[int]) -> ReducePolicy:
    thresholds = dict(DEFAULT_TAU)
    thresholds.update(tau or {})
    policy = ReducePolicy(variant, thresholds, alpha)
    if width_switch is not None:
        policy.width_switch = width_switch
    return policy


def solve(g: Graph, nice: Optional[NiceDecomposition] = None, algorithm: str = "naive",
          mode: str = "auto", seed: Optional[int] = None, tau: Optional[dict] = None,
          alpha: Optional[float] = None, spec: FieldSpec = GF64,
          width_switch: Optional[int] = None) -> SolveResult:
    """Run one algorithm.  ``width_switch`` overrides the width at which the
    rank policy moves from the per-size thresholds to the alpha rule."""
    algorithm = canonical_algorithm(algorithm)
    if nice is None:
        nice = prepare(g)
    width = nice.width
    mode = resolve_mode(mode, width)
    started = time.perf_counter()
    if algorithm.startswith("cutcount"):
        res = _solve_cutcount(g, nice, algorithm, mode, seed, spec)
    else:
        if algorithm == "naive":
            out = solve_naive(g, nice, mode)
            policy = {}
        else:
            variant = "cut4t" if algorithm == "rank4t" else "improved"
            pol = _policy_for(variant, tau, alpha, width_switch)
            out = solve_rank(g, nice, variant, pol, mode)
            policy = {"tau": dict(pol.small_tw_thresholds), "alpha": pol.alpha,
                      "width_switch": pol.width_switch}
        res = SolveResult(algorithm, mode, out.hamiltonian, out.cycle, out.peak_table,
                          note=out.note, policy=policy)
    res.seconds = time.perf_counter() - started
    res.width = width
    return res


def _solve_cutcount(g: Graph, nice: NiceDecomposition, algorithm: str, mode: str,
                    seed: Optional[int], spec: FieldSpec) -> SolveResult:
    join_kind = "fast" if algorithm == "cutcount-fast-join" else "naive"
    if seed is None:
        seed = random.SystemRandom().getrandbits(63)
    first = cc_decide(g, nice, spec, seed, join_kind)
    res = SolveResult(algorithm, mode, first.hamiltonian, None, first.peak_table, 1, seed,
                      note=first.note)
    if mode == "decision" or not first.hamiltonian:
        return res
    # each extraction query draws fresh weights from a stream fixed by the seed
    stream = random.Random(seed)
    peak = [first.peak_table]

    def decide(h: Graph, nd: NiceDecomposition) -> bool:
        if trivially_non_hamiltonian(h):
            return False
        r = cc_decide(h, nd, spec, stream.getrandbits(63), join_kind)
        peak[0] = max(peak[0], r.peak_table)
        return r.hamiltonian

    try:
        rep = extract_self_reduce(g, nice, decide)
    except ExtractionError as exc:
        res.note = f"extraction failed: {exc}"
        res.decision_calls = 1
        return res
    res.cycle = rep.cycle
    res.decision_calls = 1 + rep.decision_calls
    res.peak_table = peak[0]
    return res
