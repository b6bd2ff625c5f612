"""Held-Karp subset DP, used only as a testing oracle."""

from __future__ import annotations

from typing import Optional

from .graph import Graph

ORACLE_CAP = 20


class OracleCapExceeded(ValueError):
    pass


def _reach_table(g: Graph) -> tuple[list, list]:
    """reach[S] = bitmask of endpoints v such that a path from vertex 1 covers S
    and ends at v (S always contains vertex 1, stored as bit 0)."""
    n = g.n
    if n > ORACLE_CAP:
        raise OracleCapExceeded(f"oracle limited to n <= {ORACLE_CAP}, got {n}")
    nbr = [0] * n
    for u, v in g.edges:
        nbr[u - 1] |= 1 << (v - 1)
        nbr[v - 1] |= 1 << (u - 1)
    reach = [0] * (1 << n)
    reach[1] = 1
    for s in range(1, 1 << n, 2):
        ends = reach[s]
        while ends:
            low = ends & -ends
            v = low.bit_length() - 1
            ends ^= low
            ext = nbr[v] & ~s
            while ext:
                bit = ext & -ext
                ext ^= bit
                reach[s | bit] |= bit
    return reach, nbr


def brute_force_decide(g: Graph) -> bool:
    if g.n < 3:
        return False
    reach, nbr = _reach_table(g)
    return bool(reach[(1 << g.n) - 1] & nbr[0])


def brute_force_cycle(g: Graph) -> Optional[list]:
    """A Hamiltonian cycle starting at vertex 1, or None."""
    if g.n < 3:
        return None
    reach, nbr = _reach_table(g)
    s = (1 << g.n) - 1
    ends = reach[s] & nbr[0]
    if not ends:
        return None
    v = (ends & -ends).bit_length() - 1
    rev = []
    while True:
        rev.append(v + 1)
        if v == 0:
            break
        s ^= 1 << v
        prev = reach[s] & nbr[v]
        v = (prev & -prev).bit_length() - 1
    return rev[::-1]
