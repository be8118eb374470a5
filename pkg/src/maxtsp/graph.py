"""Instance representation and structural validators shared by all stages.

Weights are nonnegative 64-bit integers.  Everything that touches half-edge
arithmetic runs on a globally doubled scale (2*w) so that half weights stay
integral; functions document which scale they speak.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Set, Tuple

import numpy as np

Edge = Tuple[int, int]


class MaxTSPError(Exception):
    """Base class for all library errors."""


class InstanceError(MaxTSPError):
    """Invalid problem instance or malformed input."""


class NoPerfectMatching(MaxTSPError):
    """The graph admits no perfect matching."""


class Infeasible(MaxTSPError):
    """No perfect b-matching exists for the given demands."""


class NotKiteFree(MaxTSPError):
    """Cycle cover violates the kite-free precondition."""


class UnhandledCase(MaxTSPError):
    """A kite configuration fell outside the implemented case analysis."""


class InternalError(MaxTSPError):
    """A guaranteed invariant failed; indicates a bug, not bad input."""


def edge_id(u: int, v: int) -> Edge:
    """Canonical unordered edge key (u < v)."""
    if u == v:
        raise InstanceError(f"self-loop ({u},{v})")
    return (u, v) if u < v else (v, u)


class CompleteGraph:
    """Complete undirected graph on vertices 0..n-1 with integer weights."""

    __slots__ = ("n", "W")

    def __init__(self, n: int, W: np.ndarray):
        if n < 3:
            raise InstanceError(f"need at least 3 vertices, got {n}")
        if W.shape != (n, n):
            raise InstanceError("weight matrix shape mismatch")
        if (W < 0).any():
            raise InstanceError("negative weight")
        if (W != W.T).any():
            raise InstanceError("weight matrix not symmetric")
        self.n = n
        self.W = W.astype(np.int64)
        np.fill_diagonal(self.W, 0)

    def w(self, u: int, v: int) -> int:
        return int(self.W[u, v])

    def edges(self) -> Iterable[Tuple[int, int, int]]:
        for u in range(self.n):
            for v in range(u + 1, self.n):
                yield u, v, int(self.W[u, v])

    def __eq__(self, other) -> bool:
        return isinstance(other, CompleteGraph) and self.n == other.n \
            and bool((self.W == other.W).all())


def build_complete_graph(n: int, weights: Dict[Edge, int]) -> CompleteGraph:
    """Build an instance from an (unordered-pair -> weight) table.

    Symmetric closure is applied: entries may be given in either order, but
    conflicting duplicates or missing pairs raise InstanceError.
    """
    W = np.full((n, n), -1, np.int64)
    np.fill_diagonal(W, 0)
    for (u, v), w in weights.items():
        if not (0 <= u < n and 0 <= v < n):
            raise InstanceError(f"vertex out of range in ({u},{v})")
        if u == v:
            raise InstanceError(f"self-loop ({u},{v})")
        if w < 0:
            raise InstanceError(f"negative weight on ({u},{v})")
        a, b = edge_id(u, v)
        if W[a, b] >= 0 and W[a, b] != w:
            raise InstanceError(f"conflicting weights for ({a},{b})")
        W[a, b] = w
        W[b, a] = w
    if (W < 0).any():
        missing = np.argwhere(W < 0)[0]
        raise InstanceError(f"missing weight for pair ({missing[0]},{missing[1]})")
    return CompleteGraph(n, W)


def is_vertex_disjoint_paths(edges: Iterable[Edge], n: int) -> bool:
    """True iff the edge set is a union of vertex-disjoint simple paths.

    Every vertex must have degree <= 2 and the set must be acyclic.
    """
    deg = [0] * n
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    seen: Set[Edge] = set()
    for e in edges:
        u, v = edge_id(e[0], e[1])
        if not (0 <= u < n and 0 <= v < n):
            return False
        if (u, v) in seen:
            return False  # a doubled edge is a 2-cycle in the multigraph
        seen.add((u, v))
        deg[u] += 1
        deg[v] += 1
        if deg[u] > 2 or deg[v] > 2:
            return False
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


@dataclass(frozen=True)
class Matching:
    """A perfect matching given as canonical edge pairs."""

    pairs: frozenset
    weight: int

    @staticmethod
    def from_pairs(pairs: Iterable[Edge], g: CompleteGraph) -> "Matching":
        ps = frozenset(edge_id(u, v) for u, v in pairs)
        cover = [0] * g.n
        for u, v in ps:
            cover[u] += 1
            cover[v] += 1
        if any(c != 1 for c in cover):
            raise InstanceError("not a perfect matching")
        return Matching(ps, sum(g.w(u, v) for u, v in ps))

    def partner(self) -> Dict[int, int]:
        d: Dict[int, int] = {}
        for u, v in self.pairs:
            d[u] = v
            d[v] = u
        return d

    def __contains__(self, e: Edge) -> bool:
        return edge_id(*e) in self.pairs


@dataclass(frozen=True)
class CycleCover:
    """Vertex partition into cycles of length >= 3."""

    cycles: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        seen: Set[int] = set()
        for c in self.cycles:
            if len(c) < 3:
                raise InstanceError(f"cycle of length {len(c)} < 3")
            for v in c:
                if v in seen:
                    raise InstanceError(f"vertex {v} repeated in cycle cover")
                seen.add(v)

    def vertex_count(self) -> int:
        return sum(len(c) for c in self.cycles)

    def edges(self) -> List[Edge]:
        out: List[Edge] = []
        for c in self.cycles:
            for i in range(len(c)):
                out.append(edge_id(c[i], c[(i + 1) % len(c)]))
        return out

    def weight(self, g: CompleteGraph) -> int:
        return sum(g.w(u, v) for u, v in self.edges())

    def cycle_of(self) -> Dict[int, int]:
        """vertex -> index of its cycle"""
        d: Dict[int, int] = {}
        for i, c in enumerate(self.cycles):
            for v in c:
                d[v] = i
        return d


def canonical_cycles(adj: Dict[int, List[int]]) -> Tuple[Tuple[int, ...], ...]:
    """Split a 2-regular adjacency structure into canonically ordered cycles.

    Each cycle starts at its minimum vertex and proceeds toward the
    smaller-indexed of that vertex's two neighbours.
    """
    seen: Set[int] = set()
    cycles: List[Tuple[int, ...]] = []
    for start in sorted(adj):
        if start in seen:
            continue
        nbrs = sorted(adj[start])
        cyc = [start]
        seen.add(start)
        prev, cur = start, nbrs[0]
        while cur != start:
            cyc.append(cur)
            seen.add(cur)
            a, b = adj[cur]
            nxt = a if b == prev else b
            prev, cur = cur, nxt
        cycles.append(tuple(cyc))
    cycles.sort(key=lambda c: c[0])
    return tuple(cycles)


@dataclass(frozen=True)
class HalfEdge:
    """The half of `edge` containing `endpoint`."""

    edge: Edge
    endpoint: int

    def __post_init__(self):
        if self.endpoint not in self.edge:
            raise InstanceError(f"endpoint {self.endpoint} not on {self.edge}")


class Multigraph:
    """Edge multiset over a CompleteGraph with multiplicities in 0..3."""

    __slots__ = ("base", "mult")

    def __init__(self, base: CompleteGraph, mult: Dict[Edge, int] | None = None):
        self.base = base
        self.mult: Dict[Edge, int] = {}
        if mult:
            for e, m in mult.items():
                self.add(edge_id(*e), m)

    def add(self, e: Edge, m: int = 1) -> None:
        e = edge_id(*e)
        new = self.mult.get(e, 0) + m
        if not (0 <= new <= 3):
            raise InstanceError(f"multiplicity {new} out of range for {e}")
        if new == 0:
            self.mult.pop(e, None)
        else:
            self.mult[e] = new

    def weight(self) -> int:
        return sum(m * self.base.w(u, v) for (u, v), m in self.mult.items())


def multigraph_weight(m: Multigraph) -> int:
    return m.weight()


def build_g1(g: CompleteGraph, cmax: CycleCover, m: Matching) -> Multigraph:
    """Multigraph of two copies of the cycle cover plus one of the matching."""
    mg = Multigraph(g)
    for e in cmax.edges():
        mg.add(e, 2)
    for e in m.pairs:
        mg.add(e, 1)
    return mg
