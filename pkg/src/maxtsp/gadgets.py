"""Split graph with kite gadgets, the relaxed cycle cover, and the
embedding of kite-free covers into gadget b-matchings.

All weights on the split graph live on the doubled scale: a whole edge
(u,v) is worth 2*w(u,v), each of its two half-edges w(u,v), every
connector and gadget edge 0.  The b-matching optimum therefore equals
twice the weight of the best relaxed cycle cover, exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .cycle_cover import Kite, solve_complete_b_matching
from .graph import (
    CompleteGraph,
    CycleCover,
    Edge,
    HalfEdge,
    InternalError,
    NotKiteFree,
    edge_id,
)


@dataclass
class SplitGraph:
    g: CompleteGraph
    kites: List[Kite]
    n_total: int
    demands: Dict[int, int]
    extra_edges: List[Tuple[int, int, int]]     # structural, doubled-scale weights
    excluded_pairs: Set[Edge]                   # problematic pairs (replaced by gadget)
    x_of: Dict[Tuple[Edge, int], int]           # (edge, own endpoint) -> splitting vertex
    x_info: Dict[int, Tuple[Edge, int]]         # inverse of x_of
    gadget_of: Dict[int, Dict[str, int]]        # kite index -> named gadget vertices
    connectors: Dict[Edge, Tuple[int, int]]     # non-diagonal problematic edge -> (x_u, x_v)


def build_split_graph(g: CompleteGraph, kites: Sequence[Kite]) -> SplitGraph:
    """Split every problematic edge and wire the kite gadgets of Fig. 1."""
    nxt = g.n
    x_of: Dict[Tuple[Edge, int], int] = {}
    x_info: Dict[int, Tuple[Edge, int]] = {}
    extra: List[Tuple[int, int, int]] = []
    excluded: Set[Edge] = set()
    connectors: Dict[Edge, Tuple[int, int]] = {}
    demands: Dict[int, int] = {v: 2 for v in range(g.n)}
    gadget_of: Dict[int, Dict[str, int]] = {}

    for ki, kite in enumerate(kites):
        diag = set(kite.diagonals())
        for e in kite.problematic_edges():
            u, v = e
            xu, xv = nxt, nxt + 1
            nxt += 2
            x_of[(e, u)] = xu
            x_of[(e, v)] = xv
            x_info[xu] = (e, u)
            x_info[xv] = (e, v)
            excluded.add(e)
            w = g.w(u, v)
            extra.append((u, xu, w))
            extra.append((xv, v, w))
            demands[xu] = 1
            demands[xv] = 1
            if e not in diag:
                extra.append((xu, xv, 0))
                connectors[e] = (xu, xv)

        if kite.kind == "three_kite":
            foot = kite.foot
            assert foot is not None
            others = sorted(set(kite.cycle_vertices) - {foot})
            v, w = others[0], others[1]
            p, q = nxt, nxt + 1
            nxt += 2
            gadget_of[ki] = {"p": p, "q": q}
            demands[p] = 1
            demands[q] = 1
            extra.append((p, x_of[(edge_id(foot, v), foot)], 0))
            extra.append((p, x_of[(edge_id(foot, w), foot)], 0))
            extra.append((p, x_of[(edge_id(v, w), v)], 0))
            extra.append((q, x_of[(edge_id(foot, v), v)], 0))
            extra.append((q, x_of[(edge_id(foot, w), w)], 0))
            extra.append((q, x_of[(edge_id(v, w), w)], 0))
        else:
            cyc = kite.cycle_vertices
            names: Dict[str, int] = {}
            for y in cyc:
                p_y = nxt
                nxt += 1
                names[f"p_{y}"] = p_y
                demands[p_y] = 2
                for z in cyc:
                    if z == y:
                        continue
                    extra.append((p_y, x_of[(edge_id(y, z), y)], 0))
            qv = nxt
            nxt += 1
            names["q"] = qv
            demands[qv] = 2
            for y in cyc:
                extra.append((qv, names[f"p_{y}"], 0))
            gadget_of[ki] = names

    return SplitGraph(
        g=g,
        kites=list(kites),
        n_total=nxt,
        demands=demands,
        extra_edges=extra,
        excluded_pairs=excluded,
        x_of=x_of,
        x_info=x_info,
        gadget_of=gadget_of,
        connectors=connectors,
    )


@dataclass
class RelaxedCycleCover:
    whole_edges: FrozenSet[Edge]        # includes problematic edges with both halves
    half_edges: FrozenSet[HalfEdge]     # exactly one half present per listed edge
    weight2: int                        # doubled scale

    def incident_count(self, v: int) -> int:
        c = sum(1 for e in self.whole_edges if v in e)
        c += sum(1 for h in self.half_edges if h.endpoint == v)
        return c


def _check_definition(c2: RelaxedCycleCover, g: CompleteGraph, kites: Sequence[Kite]) -> None:
    for v in range(g.n):
        if c2.incident_count(v) != 2:
            raise InternalError(f"relaxed cover degree {c2.incident_count(v)} at {v}")
    for kite in kites:
        probl = set(kite.problematic_edges())
        cnt = sum(1 for h in c2.half_edges if h.edge in probl)
        cap = 4 if kite.kind == "three_kite" else 6
        if cnt % 2 != 0 or cnt > cap:
            raise InternalError(f"kite half-edge count {cnt} violates bounds")


def compute_relaxed_cycle_cover(sg: SplitGraph) -> RelaxedCycleCover:
    """Maximum-weight relaxed cycle cover via the gadget b-matching."""
    res = solve_complete_b_matching(
        sg.g,
        2,
        structural=(sg.n_total, sg.demands, sg.extra_edges, sg.excluded_pairs),
    )
    n = sg.g.n
    whole: Set[Edge] = set()
    half_at: Dict[Edge, List[int]] = {}
    for u, v in res.edges:
        if u < n and v < n:
            whole.add(edge_id(u, v))
        elif u < n or v < n:
            core, x = (u, v) if u < n else (v, u)
            if x in sg.x_info:
                e, owner = sg.x_info[x]
                if owner != core:
                    raise InternalError("half-edge decoded at wrong endpoint")
                half_at.setdefault(e, []).append(core)
        # gadget-internal edges are ignored
    halves: Set[HalfEdge] = set()
    for e, owners in half_at.items():
        if len(owners) == 2:
            whole.add(e)
        else:
            halves.add(HalfEdge(e, owners[0]))
    w2 = sum(2 * sg.g.w(u, v) for u, v in whole)
    w2 += sum(sg.g.w(*h.edge) for h in halves)
    c2 = RelaxedCycleCover(frozenset(whole), frozenset(halves), w2)
    _check_definition(c2, sg.g, sg.kites)
    return c2


def embed_kite_free_cover(cover: CycleCover, sg: SplitGraph) -> Set[Tuple[int, int]]:
    """Lift a kite-free cycle cover to a perfect b-matching of the split graph.

    The gadget side is completed per kite by exact search over the (tiny)
    residual demand problem; a failure of that search means the precondition
    was violated, which is exactly the content of the kite-exclusion lemma.
    """
    for cyc in cover.cycles:
        vs = frozenset(cyc)
        for kite in sg.kites:
            if kite.kind == "three_kite" and vs == kite.vertex_set:
                raise NotKiteFree(f"cover contains 3-kite {sorted(vs)}")
            if kite.kind == "four_kite":
                if vs == kite.vertex_set:
                    raise NotKiteFree(f"cover contains 4-kite {sorted(vs)}")
                if len(cyc) == 3 and vs <= kite.vertex_set:
                    raise NotKiteFree(
                        f"cover contains triangle on 4-kite vertices {sorted(vs)}"
                    )

    selection: Set[Tuple[int, int]] = set()
    cover_edges = set(cover.edges())
    used_x: Set[int] = set()
    for e in cover_edges:
        if e in sg.excluded_pairs:
            u, v = e
            xu = sg.x_of[(e, u)]
            xv = sg.x_of[(e, v)]
            selection.add((min(u, xu), max(u, xu)))
            selection.add((min(v, xv), max(v, xv)))
            used_x.update((xu, xv))
        else:
            selection.add(e)

    for ki, kite in enumerate(sg.kites):
        codes = _complete_gadget(sg, ki, used_x)
        if codes is None:
            raise NotKiteFree("gadget demands unsatisfiable; cover not kite-free")
        selection.update(codes)
    return selection


def _complete_gadget(sg: SplitGraph, ki: int, used_x: Set[int]) -> Optional[Set[Tuple[int, int]]]:
    """Meet residual gadget demands (free splitting vertices, p/q vertices)."""
    kite = sg.kites[ki]
    gv = sg.gadget_of[ki]
    probl = kite.problematic_edges()
    free_x = [sg.x_of[(e, v)] for e in probl for v in e if sg.x_of[(e, v)] not in used_x]
    need: Dict[int, int] = {x: 1 for x in free_x}
    for name, vtx in gv.items():
        need[vtx] = sg.demands[vtx]
    # candidate edges inside the gadget among "needy" vertices
    cands: List[Tuple[int, int]] = []
    for (a, b, w) in sg.extra_edges:
        if a in need and b in need:
            cands.append((min(a, b), max(a, b)))
    cands = sorted(set(cands))

    chosen: Set[Tuple[int, int]] = set()

    def rec(i: int) -> bool:
        if all(v == 0 for v in need.values()):
            return True
        if i == len(cands):
            return False
        # prune: remaining edges cannot cover some still-needy vertex
        pend: Dict[int, int] = {}
        for j in range(i, len(cands)):
            a, b = cands[j]
            pend[a] = pend.get(a, 0) + 1
            pend[b] = pend.get(b, 0) + 1
        for v, k in need.items():
            if k > pend.get(v, 0):
                return False
        a, b = cands[i]
        if need[a] > 0 and need[b] > 0:
            need[a] -= 1
            need[b] -= 1
            chosen.add((a, b))
            if rec(i + 1):
                return True
            chosen.discard((a, b))
            need[a] += 1
            need[b] += 1
        return rec(i + 1)

    if rec(0):
        return set(chosen)
    return None


def verify_b_matching(sg: SplitGraph, selection: Set[Tuple[int, int]]) -> Tuple[bool, int]:
    """Check exact degrees; return (ok, weight on the doubled scale)."""
    deg: Dict[int, int] = {v: 0 for v in sg.demands}
    w2 = 0
    ew = {}
    for (a, b, w) in sg.extra_edges:
        ew[(min(a, b), max(a, b))] = w
    for (a, b) in selection:
        a, b = min(a, b), max(a, b)
        deg[a] = deg.get(a, 0) + 1
        deg[b] = deg.get(b, 0) + 1
        if a < sg.g.n and b < sg.g.n:
            w2 += 2 * sg.g.w(a, b)
        else:
            w2 += ew[(a, b)]
    ok = all(deg.get(v, 0) == d for v, d in sg.demands.items())
    return ok, w2
