"""Exact desk-scale oracles: tours, matchings, b-matchings, cycle covers.

These are the independent side of every dual-route check in the test suite
and the acceptance harness.  They share no code with the production path:
tours via bitmask DP or permutations, matchings and 2-factors via recursive
enumeration with branch-and-bound pruning.
"""

from __future__ import annotations

from itertools import permutations
from typing import Callable, Dict, Iterable, List, Optional, Set, Tuple

import numpy as np

from . import kernels
from .graph import CompleteGraph, Edge, InstanceError, edge_id

ORACLE_MAX_N = 18


class TooLarge(InstanceError):
    pass


def oracle_max_tsp(g: CompleteGraph) -> int:
    """Exact maximum tour weight (bitmask DP, n <= 18)."""
    if g.n > ORACLE_MAX_N:
        raise TooLarge(f"oracle limited to n <= {ORACLE_MAX_N}, got {g.n}")
    return kernels.held_karp_kernel(g.W)


def brute_force_max_tour(g: CompleteGraph) -> int:
    """Permutation enumeration; only for n <= 9 cross-checks."""
    if g.n > 9:
        raise TooLarge("permutation oracle limited to n <= 9")
    vs = list(range(1, g.n))
    best = -1
    for perm in permutations(vs):
        tour = (0,) + perm
        w = sum(g.w(tour[i], tour[(i + 1) % g.n]) for i in range(g.n))
        best = max(best, w)
    return best


def enumerate_perfect_matchings(n: int, edges: Dict[Edge, int]) -> Iterable[Tuple[Tuple[Edge, ...], int]]:
    """All perfect matchings of the given (possibly sparse) graph."""
    adj: Dict[int, List[int]] = {v: [] for v in range(n)}
    for (u, v) in edges:
        adj[u].append(v)
        adj[v].append(u)

    def rec(free: List[int], acc: List[Edge], w: int):
        if not free:
            yield tuple(acc), w
            return
        u = free[0]
        for v in adj[u]:
            if v in free_set and v != u:
                e = edge_id(u, v)
                free_set.discard(u)
                free_set.discard(v)
                nxt = [x for x in free if x != u and x != v]
                acc.append(e)
                yield from rec(nxt, acc, w + edges[e])
                acc.pop()
                free_set.add(u)
                free_set.add(v)

    free_set = set(range(n))
    yield from rec(list(range(n)), [], 0)


def max_perfect_matching_brute(n: int, edges: Dict[Edge, int]) -> Optional[int]:
    """Maximum weight over all perfect matchings, or None if none exists."""
    best = None
    for _, w in enumerate_perfect_matchings(n, edges):
        best = w if best is None else max(best, w)
    return best


def max_b_matching_brute(n: int, edges: Dict[Edge, int], b: Dict[int, int]) -> Optional[int]:
    """Maximum weight over subgraphs with exact degrees b (each edge once)."""
    es = sorted(edges)
    deg_left: Dict[int, int] = {v: 0 for v in range(n)}
    for (u, v) in es:
        deg_left[u] += 1
        deg_left[v] += 1
    best: Optional[int] = None
    need = dict(b)

    def rec(i: int, w: int):
        nonlocal best
        if i == len(es):
            if all(x == 0 for x in need.values()):
                best = w if best is None else max(best, w)
            return
        u, v = es[i]
        # prune: remaining degree cannot satisfy demand
        if need[u] > deg_left[u] or need[v] > deg_left[v]:
            return
        deg_left[u] -= 1
        deg_left[v] -= 1
        # take edge
        if need[u] > 0 and need[v] > 0:
            need[u] -= 1
            need[v] -= 1
            rec(i + 1, w + edges[(u, v)])
            need[u] += 1
            need[v] += 1
        # skip edge
        rec(i + 1, w)
        deg_left[u] += 1
        deg_left[v] += 1

    rec(0, 0)
    return best


def enumerate_two_factors(n: int) -> Iterable[List[Tuple[int, ...]]]:
    """All cycle covers of K_n with cycles of length >= 3 (n <= 10)."""
    if n > 10:
        raise TooLarge("2-factor enumeration limited to n <= 10")

    def rec(remaining: frozenset):
        if not remaining:
            yield []
            return
        start = min(remaining)
        rest = sorted(remaining - {start})
        # build cycles containing `start`: choose an ordered sequence, canonical
        # by requiring the second vertex smaller than the last (kills reversal)
        def build(path: List[int], used: Set[int]):
            if len(path) >= 3 and path[1] < path[-1]:
                cyc = tuple(path)
                rem2 = remaining - set(path)
                for tail in rec(frozenset(rem2)):
                    yield [cyc] + tail
            for v in rest:
                if v in used:
                    continue
                path.append(v)
                used.add(v)
                yield from build(path, used)
                used.discard(v)
                path.pop()

        yield from build([start], {start})

    yield from rec(frozenset(range(n)))


def max_two_factor_brute(
    g: CompleteGraph,
    forbid: Optional[Callable[[Tuple[int, ...]], bool]] = None,
    return_cover: bool = False,
):
    """Maximum-weight cycle cover, optionally rejecting individual cycles.

    Branch-and-bound over partial vertex degrees with an admissible bound
    (half the sum of the two heaviest remaining slots per vertex).
    """
    n = g.n
    if n > 12:
        raise TooLarge("2-factor brute force limited to n <= 12")
    best = -1
    best_cover: List[Tuple[int, ...]] = []
    top2 = np.sort(g.W, axis=1)[:, -2:].sum(axis=1)

    def cycle_weight(c: Tuple[int, ...]) -> int:
        return sum(g.w(c[i], c[(i + 1) % len(c)]) for i in range(len(c)))

    acc_cycles: List[Tuple[int, ...]] = []

    def rec(remaining: frozenset, acc_w: int):
        nonlocal best, best_cover
        if not remaining:
            if acc_w > best:
                best = acc_w
                best_cover = list(acc_cycles)
            return
        bound = acc_w + int(sum(top2[v] for v in remaining)) // 2
        if bound <= best:
            return
        start = min(remaining)
        others = sorted(remaining - {start})

        def build(path: List[int], used: Set[int]):
            if len(path) >= 3 and path[1] < path[-1]:
                cyc = tuple(path)
                if forbid is None or not forbid(cyc):
                    acc_cycles.append(cyc)
                    rec(remaining - set(path), acc_w + cycle_weight(cyc))
                    acc_cycles.pop()
            for v in others:
                if v in used:
                    continue
                path.append(v)
                used.add(v)
                build(path, used)
                used.discard(v)
                path.pop()

        build([start], {start})

    rec(frozenset(range(n)), 0)
    if return_cover:
        return best, best_cover
    return best


def oracle_kite_free_cycle_cover(g: CompleteGraph, kites) -> int:
    """Exact max weight over cycle covers containing no kite of G1 as a cycle
    and, for 4-kites, no 3- or 4-cycle on the kite's vertices (n <= 10)."""
    if g.n > 10:
        raise TooLarge("kite-free oracle limited to n <= 10")
    three = [k.vertex_set for k in kites if k.kind == "three_kite"]
    four = [k.vertex_set for k in kites if k.kind == "four_kite"]

    def forbid(cyc: Tuple[int, ...]) -> bool:
        vs = set(cyc)
        if len(cyc) == 3:
            if any(vs == k for k in three):
                return True
            if any(vs <= k for k in four):
                return True
        elif len(cyc) == 4:
            if any(vs == k for k in four):
                return True
        return False

    return max_two_factor_brute(g, forbid)
