"""Exchange sets: orient the relaxed cover, split half-edges into the two
candidate sets, and pick per-kite edge exchanges so that the resulting
multigraphs admit the two path colorings.

The construction follows the case analysis of the source material as a
preference order, but every choice is validated against the full contract
(the seven exchange-set properties plus the two foot/vertical corollaries,
degree bounds, the odd-cycle obstruction and path amenability).  When a
preferred choice fails a global property the involved kites are re-chosen
and, if needed, stub pairings and component orientations are flipped; the
search is bounded and raises UnhandledCase on exhaustion, which the fuzz
suite treats as a hard failure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .cycle_cover import Kite
from .gadgets import RelaxedCycleCover
from .graph import (
    CompleteGraph,
    CycleCover,
    Edge,
    HalfEdge,
    InternalError,
    Matching,
    UnhandledCase,
    edge_id,
)


# ---------------------------------------------------------------------------
# C2 decomposition
# ---------------------------------------------------------------------------


@dataclass
class Stub:
    idx: int
    edge: Edge
    owner: int          # chain end vertex
    target: int         # other endpoint of the edge (same kite)
    chain: int          # owning chain index
    end: int            # 0 = chain start, 1 = chain end
    kite: int           # kite index


@dataclass
class Chain:
    verts: List[int]
    stubs: Tuple[int, int]      # stub ids at verts[0], verts[-1]


@dataclass
class C2Structure:
    wholes: FrozenSet[Edge]
    chains: List[Chain]
    cycles: List[List[int]]     # closed whole-edge components, cyclic vertex order
    stubs: List[Stub]
    kite_stubs: Dict[int, List[int]]
    comp_of_vertex: Dict[int, Tuple[str, int]]   # vertex -> ("chain"|"cycle", idx)


def decompose_c2(c2: RelaxedCycleCover, kites: Sequence[Kite], n: int) -> C2Structure:
    adj: Dict[int, List[int]] = {v: [] for v in range(n)}
    for (u, v) in sorted(c2.wholes):
        adj[u].append(v)
        adj[v].append(u)
    halves_at: Dict[int, List[HalfEdge]] = {v: [] for v in range(n)}
    for h in sorted(c2.half_edges, key=lambda h: (h.edge, h.endpoint)):
        halves_at[h.endpoint].append(h)

    kite_of_vertex: Dict[int, int] = {}
    for ki, kite in enumerate(kites):
        for v in kite.cycle_vertices:
            kite_of_vertex[v] = ki

    seen: Set[int] = set()
    chains: List[Chain] = []
    cycles: List[List[int]] = []
    stubs: List[Stub] = []
    comp_of_vertex: Dict[int, Tuple[str, int]] = {}

    def new_stub(h: HalfEdge, chain_idx: int, end: int) -> int:
        u, v = h.edge
        tgt = v if h.endpoint == u else u
        s = Stub(len(stubs), h.edge, h.endpoint, tgt, chain_idx, end,
                 kite_of_vertex[h.endpoint])
        stubs.append(s)
        return s.idx

    for v0 in range(n):
        if v0 in seen or not halves_at[v0]:
            continue
        # v0 is a chain end (has at least one stub)
        ci = len(chains)
        verts = [v0]
        seen.add(v0)
        if len(halves_at[v0]) == 2:
            h0, h1 = halves_at[v0]
            sa = new_stub(h0, ci, 0)
            sb = new_stub(h1, ci, 1)
            chains.append(Chain(verts, (sa, sb)))
            comp_of_vertex[v0] = ("chain", ci)
            continue
        sa = new_stub(halves_at[v0][0], ci, 0)
        prev = v0
        cur = adj[v0][0]
        while True:
            verts.append(cur)
            seen.add(cur)
            nbrs = [x for x in adj[cur] if x != prev] or [prev]
            if halves_at[cur]:
                break
            nxt = nbrs[0] if adj[cur][0] != prev else adj[cur][1]
            # walk to the neighbour that is not where we came from
            a, b = adj[cur][0], adj[cur][1] if len(adj[cur]) > 1 else (adj[cur][0],)
            prev, cur = cur, (adj[cur][0] if adj[cur][1] == prev else adj[cur][1])
        sb = new_stub(halves_at[verts[-1]][0], ci, 1)
        chains.append(Chain(verts, (sa, sb)))
        for v in verts:
            comp_of_vertex[v] = ("chain", ci)

    for v0 in range(n):
        if v0 in seen:
            continue
        cyc = [v0]
        seen.add(v0)
        prev, cur = v0, adj[v0][0]
        while cur != v0:
            cyc.append(cur)
            seen.add(cur)
            prev, cur = cur, (adj[cur][0] if adj[cur][1] == prev else adj[cur][1])
        idx = len(cycles)
        cycles.append(cyc)
        for v in cyc:
            comp_of_vertex[v] = ("cycle", idx)

    kite_stubs: Dict[int, List[int]] = {ki: [] for ki in range(len(kites))}
    for s in stubs:
        kite_stubs[s.kite].append(s.idx)
    return C2Structure(c2.whole_edges, chains, cycles, stubs, kite_stubs, comp_of_vertex)


# ---------------------------------------------------------------------------
# Orientation + half-edge split
# ---------------------------------------------------------------------------


@dataclass
class Orientation:
    """Directed view of the relaxed cover under a fixed stub pairing."""

    arc: Dict[Edge, Tuple[int, int]]     # I(C2) + all lifted stub edges
    z1: FrozenSet[Edge]                  # lifted edges of leading stubs
    z2: FrozenSet[Edge]
    z: FrozenSet[Edge]                   # the heavier side (ties: z1)
    z_is_z1: bool
    stub_in_z: Dict[int, bool]
    loop_of_chain: Dict[int, int]


def orient(
    struct: C2Structure,
    g: CompleteGraph,
    pairing: Dict[int, List[Tuple[int, int]]],
    chain_flips: Set[int],
    cycle_flips: Set[int],
) -> Orientation:
    """Orient all components; leading stubs of each paired loop form Z1.

    pairing: per kite, a perfect pairing of its stub ids.  Each pair joins
    two chain ends through the kite, so chains merge into closed loops and
    every kite sees one inflow and one outflow per pair (balanced).
    chain_flips: loop ids whose traversal is reversed.
    """
    partner: Dict[int, int] = {}
    for ki in sorted(pairing):
        for a, b in pairing[ki]:
            partner[a] = b
            partner[b] = a

    # group chains into loops
    loop_of_chain: Dict[int, int] = {}
    loops: List[List[int]] = []
    for ci in range(len(struct.chains)):
        if ci in loop_of_chain:
            continue
        li = len(loops)
        members = []
        cur = ci
        while cur not in loop_of_chain:
            loop_of_chain[cur] = li
            members.append(cur)
            out_stub = struct.chains[cur].stubs[1]
            nxt_stub = partner[out_stub]
            nxt = struct.stubs[nxt_stub].chain
            # enter the next chain from whichever end was paired
            cur = nxt
        loops.append(members)

    arc: Dict[Edge, Tuple[int, int]] = {}
    z1: Set[Edge] = set()
    z2: Set[Edge] = set()
    stub_in_z1: Dict[int, bool] = {}

    # orient chains: traverse each loop, flipping whole loops on demand.
    # Determine per-chain direction: start from the loop's first chain in its
    # natural direction (verts[0] -> verts[-1]); the pairing then fixes the
    # direction of every subsequent chain (we enter through the paired stub).
    for li, members in enumerate(loops):
        flip_loop = li in chain_flips
        direction: Dict[int, bool] = {}   # chain -> natural direction?
        first = members[0]
        direction[first] = True
        cur = first
        for _ in range(len(members)):
            ch = struct.chains[cur]
            nat = direction[cur]
            out_stub = ch.stubs[1] if nat else ch.stubs[0]
            nxt_stub = partner[out_stub]
            ns = struct.stubs[nxt_stub]
            if ns.chain != cur or len(members) > 1:
                direction[ns.chain] = (ns.end == 0)
            cur = ns.chain
        for ci in members:
            ch = struct.chains[ci]
            forward = direction[ci] ^ flip_loop
            vs = ch.verts if forward else list(reversed(ch.verts))
            for i in range(len(vs) - 1):
                arc[edge_id(vs[i], vs[i + 1])] = (vs[i], vs[i + 1])
            lead = ch.stubs[0] if forward else ch.stubs[1]
            trail = ch.stubs[1] if forward else ch.stubs[0]
            sl, st = struct.stubs[lead], struct.stubs[trail]
            # leading stub: flow enters the chain at its owner; lift points
            # from the kite-side target into the owner
            z1.add(sl.edge)
            stub_in_z1[sl.idx] = True
            z2.add(st.edge)
            stub_in_z1[st.idx] = False

    for cyi, cyc in enumerate(struct.cycles):
        vs = list(reversed(cyc)) if cyi in cycle_flips else cyc
        for i in range(len(vs)):
            a, b = vs[i], vs[(i + 1) % len(vs)]
            arc[edge_id(a, b)] = (a, b)

    w1 = sum(g.w(*e) for e in z1)
    w2 = sum(g.w(*e) for e in z2)
    z_is_z1 = w1 >= w2
    z = frozenset(z1) if z_is_z1 else frozenset(z2)

    stub_in_z = {s.idx: (stub_in_z1[s.idx] == z_is_z1) for s in struct.stubs}
    # lifted arcs for selected stubs; unselected stubs vanish entirely
    for s in struct.stubs:
        if not stub_in_z[s.idx]:
            continue
        if stub_in_z1[s.idx]:
            # leading under natural orientation: lift enters the owner
            arc[s.edge] = (s.target, s.owner)
        else:
            arc[s.edge] = (s.owner, s.target)
    if not z_is_z1:
        arc = {e: (b, a) for e, (a, b) in arc.items()}

    return Orientation(arc, frozenset(z1), frozenset(z2), z, z_is_z1,
                       stub_in_z, loop_of_chain)


def build_orientations(
    c2: RelaxedCycleCover, kites: Sequence[Kite], g: CompleteGraph
) -> Tuple[C2Structure, Orientation, Dict[int, List[Tuple[int, int]]]]:
    """Canonical pairing (same-vertex stubs first, then sorted order)."""
    struct = decompose_c2(c2, kites, g.n)
    pairing = canonical_pairing(struct)
    o = orient(struct, g, pairing, set(), set())
    return struct, o, pairing


def canonical_pairing(struct: C2Structure) -> Dict[int, List[Tuple[int, int]]]:
    pairing: Dict[int, List[Tuple[int, int]]] = {}
    for ki, sids in sorted(struct.kite_stubs.items()):
        rest = sorted(sids)
        pairs: List[Tuple[int, int]] = []
        # same-owner stubs pair together (keeps them in different Z-sides)
        by_owner: Dict[int, List[int]] = {}
        for s in rest:
            by_owner.setdefault(struct.stubs[s].owner, []).append(s)
        used: Set[int] = set()
        for owner in sorted(by_owner):
            group = by_owner[owner]
            while len(group) >= 2:
                a, b = group[0], group[1]
                group = group[2:]
                pairs.append((a, b))
                used.update((a, b))
        remaining = [s for s in rest if s not in used]
        for i in range(0, len(remaining), 2):
            pairs.append((remaining[i], remaining[i + 1]))
        if pairs:
            pairing[ki] = pairs
    return pairing


def all_pairings(sids: List[int]) -> List[List[Tuple[int, int]]]:
    if not sids:
        return [[]]
    out: List[List[Tuple[int, int]]] = []
    first = sids[0]
    for j in range(1, len(sids)):
        rest = sids[1:j] + sids[j + 1:]
        for tail in all_pairings(rest):
            out.append([(first, sids[j])] + tail)
    return out


# ---------------------------------------------------------------------------
# Exchange pair selection
# ---------------------------------------------------------------------------


@dataclass
class ExchangePair:
    f1: FrozenSet[Edge]
    f2: FrozenSet[Edge]
    case_log: Dict[int, str]
    orientation: Orientation
    struct: C2Structure


@dataclass
class _KiteView:
    idx: int
    kite: Kite
    ext_out: List[Tuple[int, Edge]]       # (kite vertex, edge) directed away
    ext_in: List[Tuple[int, Edge]]
    internal_sel: List[Edge]              # problematic edges present in I or Z
    cycle_candidates: List[Edge]          # C_max edges of the kite not in I|Z


def _kite_views(
    kites: Sequence[Kite], o: Orientation, c2: RelaxedCycleCover
) -> List[_KiteView]:
    inz = set(o.arc.keys())
    views = []
    for ki, kite in enumerate(kites):
        vs = kite.vertex_set
        ext_out, ext_in, internal = [], [], []
        for e, (a, b) in sorted(o.arc.items()):
            ina, inb = a in vs, b in vs
            if ina and inb:
                internal.append(e)
            elif ina:
                ext_out.append((a, e))
            elif inb:
                ext_in.append((b, e))
        cyc_cand = [e for e in kite.cycle_edges() if e not in inz]
        views.append(_KiteView(ki, kite, sorted(ext_out), sorted(ext_in),
                               sorted(internal), sorted(cyc_cand)))
    return views


def _build_md(
    struct: C2Structure,
    kites: Sequence[Kite],
    o: Orientation,
) -> List[Tuple[int, Edge, int]]:
    """Hall matching of endangered odd cycles to d-edges.

    Returns duties (kite index, d-edge, cycle vertex on the cycle) -- one per
    endangered cycle; the kite must either route its outgoing exchange edge
    along the cycle at that vertex or keep the d-edge out of Z and F1.
    """
    kite_of_vertex: Dict[int, int] = {}
    for ki, kite in enumerate(kites):
        for v in kite.cycle_vertices:
            kite_of_vertex[v] = ki
    d_edges: List[Tuple[int, Edge]] = []
    for ki, kite in enumerate(kites):
        for d in kite.d_edges:
            d_edges.append((ki, d))

    endangered: List[Tuple[int, List[Tuple[int, Edge]]]] = []
    for cyi, cyc in enumerate(struct.cycles):
        if len(cyc) % 2 == 0:
            continue
        incident: List[Tuple[int, Edge]] = []
        for (ki, d) in d_edges:
            on = [v for v in d if v in set(cyc)]
            if on:
                incident.append((ki, d))
        if len(incident) >= len(cyc):
            endangered.append((cyi, incident))

    if not endangered:
        return []

    # merge both d-edges of a 4-kite incident to <= 3 endangered cycles
    cyc_sets = {cyi: set(struct.cycles[cyi]) for cyi, _ in endangered}
    merged: Dict[Tuple[int, Edge], Tuple[int, int]] = {}
    node_id: Dict[Tuple, int] = {}
    for ki, kite in enumerate(kites):
        if kite.kind != "four_kite":
            continue
        touched = {cyi for cyi, _ in endangered
                   if any(v in cyc_sets[cyi] for v in kite.cycle_vertices)}
        if len(touched) <= 3:
            node_id[("kite", ki)] = len(node_id)
            for d in kite.d_edges:
                merged[(ki, d)] = ("kite", ki)
    for ki, d in d_edges:
        if (ki, d) not in merged:
            node_id[("d", ki, d)] = len(node_id)

    def node_of(ki: int, d: Edge):
        return merged.get((ki, d), ("d", ki, d))

    # bipartite matching: endangered cycles -> nodes
    adjm: Dict[int, List] = {}
    for pos, (cyi, incident) in enumerate(endangered):
        adjm[pos] = sorted({node_of(ki, d) for (ki, d) in incident}, key=str)
    match_to: Dict = {}

    def try_augment(pos: int, visited: Set) -> bool:
        for nd in adjm[pos]:
            if nd in visited:
                continue
            visited.add(nd)
            if nd not in match_to or try_augment(match_to[nd], visited):
                match_to[nd] = pos
                return True
        return False

    for pos in range(len(endangered)):
        if not try_augment(pos, set()):
            raise InternalError("endangered-cycle matching not saturating")

    duties: List[Tuple[int, Edge, int]] = []
    for nd, pos in sorted(match_to.items(), key=lambda kv: str(kv[0])):
        cyi, incident = endangered[pos]
        cset = set(struct.cycles[cyi])
        if nd[0] == "kite":
            ki = nd[1]
            cands = [(kk, d) for (kk, d) in incident if kk == ki]
        else:
            ki = nd[1]
            cands = [(nd[1], nd[2])]
        kk, d = cands[0]
        y = min(v for v in d if v in cset)
        duties.append((kk, d, y))
    return duties


def _out_cycle_edge_at(struct: C2Structure, o: Orientation, y: int) -> Edge:
    kind, idx = struct.comp_of_vertex[y]
    assert kind == "cycle"
    cyc = struct.cycles[idx]
    i = cyc.index(y)
    e1 = edge_id(y, cyc[(i + 1) % len(cyc)])
    e2 = edge_id(y, cyc[(i - 1) % len(cyc)])
    for e in (e1, e2):
        if o.arc[e][0] == y:
            return e
    raise InternalError("no outgoing cycle edge at duty vertex")


@dataclass
class _Candidate:
    f1: Tuple[Edge, ...]
    f2_out: Edge
    f2_out_vertex: int
    f2_int: Optional[Edge]
    rank: Tuple


def _kite_candidates(
    view: _KiteView,
    m: Matching,
    o: Orientation,
    duties: List[Tuple[int, Edge, int]],
    struct: C2Structure,
) -> List[_Candidate]:
    kite = view.kite
    inz = set(view.internal_sel)
    d_set = set(kite.d_edges)
    my_duties = [(d, y) for (ki, d, y) in duties if ki == view.idx]

    f1_opts: List[Tuple[Edge, ...]] = []
    for e in view.cycle_candidates:
        f1_opts.append((e,))
    if kite.kind == "four_kite":
        for pair in itertools.combinations(view.cycle_candidates, 2):
            f1_opts.append(tuple(sorted(pair)))

    f2_int_opts: List[Optional[Edge]] = [None]
    if kite.kind == "four_kite":
        for e in view.internal_sel:
            if e not in m.pairs:
                f2_int_opts.append(e)

    cands: List[_Candidate] = []
    for f1 in f1_opts:
        for (v_out, e_out) in view.ext_out:
            for f2i in f2_int_opts:
                # property 3 shape
                if f2i is not None and len(f1) != 2:
                    continue
                if f2i is None and len(f1) != 1:
                    continue
                # duties
                ok = True
                for (d, y) in my_duties:
                    opt_i = False
                    try:
                        opt_i = (e_out == _out_cycle_edge_at(struct, o, y)
                                 and v_out == y)
                    except InternalError:
                        opt_i = False
                    opt_ii = (d not in o.z) and (d not in f1) and (d not in inz)
                    if not (opt_i or opt_ii):
                        ok = False
                        break
                if not ok:
                    continue
                # ranking: follow the source tables where they are decisive
                d0 = kite.d_edges[0]
                pref_d_in_f1 = 0 if (d0 not in inz and d0 not in o.z
                                     and d0 in f1) else 1
                pref_out_at_f1 = 0 if any(v_out in e for e in f1) else 1
                rank = (len(f1), pref_d_in_f1, pref_out_at_f1, f1, e_out,
                        f2i if f2i is not None else ((-1, -1)))
                cands.append(_Candidate(f1, e_out, v_out, f2i, rank))
    cands.sort(key=lambda c: c.rank)
    return cands


def _gprime2_elements(
    c2_whole: FrozenSet[Edge],
    o: Orientation,
    f1: Set[Edge],
    f2: Set[Edge],
) -> Dict[Edge, int]:
    """C'2 multiset: (I + Z + F1) - F2, as edge -> multiplicity."""
    mult: Dict[Edge, int] = {}
    for e in o.arc:
        if e in f2:
            continue
        mult[e] = mult.get(e, 0) + 1
    for e in f1:
        mult[e] = mult.get(e, 0) + 1
    return mult


def build_partition(
    cpm: Dict[Edge, int],
    comp_label: Dict[Edge, int],
    n: int,
) -> Tuple[List[List[Edge]], List[List[Edge]]]:
    """Split C'2 edges into paths and cycles.

    Edges of a common source component stay together at shared vertices;
    remaining free ends merge greedily (maximality).  Returns (paths, cycles)
    as edge sequences.
    """
    # explicit half-edge slots: each edge occurrence has two ends
    occs: List[Edge] = []
    for e in sorted(cpm):
        for _ in range(cpm[e]):
            occs.append(e)
    at: Dict[int, List[int]] = {}
    for i, e in enumerate(occs):
        at.setdefault(e[0], []).append(i)
        at.setdefault(e[1], []).append(i)
    link: Dict[Tuple[int, int], Tuple[int, int]] = {}

    def set_link(a: Tuple[int, int], b: Tuple[int, int]) -> None:
        link[a] = b
        link[b] = a

    for v in sorted(at):
        ids = at[v]
        if len(ids) < 2:
            continue
        by_comp: Dict[int, List[int]] = {}
        for i in ids:
            by_comp.setdefault(comp_label.get(occs[i], -1 - i), []).append(i)
        free: List[int] = []
        for comp, group in sorted(by_comp.items()):
            if comp >= 0 and len(group) == 2:
                set_link((v, group[0]), (v, group[1]))
            else:
                free.extend(group)
        free = [i for i in free if (v, i) not in link]
        free.sort()
        while len(free) >= 2:
            a = free.pop(0)
            b = free.pop(0)
            set_link((v, a), (v, b))

    visited: Set[int] = set()
    paths: List[List[Edge]] = []
    cycles: List[List[Edge]] = []

    def other_end(i: int, v: int) -> int:
        e = occs[i]
        return e[1] if e[0] == v else e[0]

    for i in range(len(occs)):
        if i in visited:
            continue
        e = occs[i]
        # walk both directions from occurrence i
        seq = [i]
        ends = []
        for start_v in (e[0], e[1]):
            cur_i, cur_v = i, start_v
            closed = False
            while True:
                nxt = link.get((cur_v, cur_i))
                if nxt is None:
                    ends.append((cur_i, cur_v))
                    break
                nv, ni = nxt
                if ni == i and other_end(ni, nv) == (e[1] if start_v == e[0] else e[0]):
                    closed = True
                    break
                if ni in visited or ni in seq and ni != i:
                    pass
                if start_v == e[0]:
                    seq.insert(0, ni)
                else:
                    seq.append(ni)
                cur_i, cur_v = ni, other_end(ni, nv)
                if cur_i == i:
                    closed = True
                    break
            if closed:
                cycles.append([occs[j] for j in seq])
                visited.update(seq)
                seq = []
                break
        if seq:
            paths.append([occs[j] for j in seq])
            visited.update(seq)
    return paths, cycles


def _path_vertices(path: List[Edge]) -> List[int]:
    if len(path) == 1:
        return [path[0][0], path[0][1]]
    verts = []
    first, second = path[0], path[1]
    start = first[0] if first[1] in second else first[1]
    verts.append(start)
    cur = first[1] if start == first[0] else first[0]
    verts.append(cur)
    for e in path[1:]:
        cur = e[1] if e[0] == cur else e[0]
        verts.append(cur)
    return verts


def check_exchange_properties(
    g: CompleteGraph,
    cmax: CycleCover,
    m: Matching,
    kites: Sequence[Kite],
    c2: RelaxedCycleCover,
    struct: C2Structure,
    o: Orientation,
    f1: FrozenSet[Edge],
    f2: FrozenSet[Edge],
) -> List[Tuple[str, bool, str]]:
    """All seven properties plus the two foot/vertical corollaries.

    Returns a list of (name, passed, witness).
    """
    report: List[Tuple[str, bool, str]] = []
    inz = set(o.arc.keys())
    cmax_edges = set(cmax.edges())

    bad = [e for e in f1 if e not in cmax_edges or (e in m.pairs and e in inz)]
    report.append(("p1_f1_domain", not bad, f"{bad[:3]}"))

    bad = [e for e in f2 if e not in inz]
    report.append(("p2_f2_domain", not bad, f"{bad[:3]}"))

    ok3, wit3 = True, ""
    ok4, wit4 = True, ""
    for ki, kite in enumerate(kites):
        probl = set(kite.problematic_edges())
        vs = kite.vertex_set
        n1 = len([e for e in f1 if e in probl])
        n2int = len([e for e in f2 if e in probl])
        shape = (n1, n2int)
        if shape not in ((1, 0), (2, 1)):
            ok3, wit3 = False, f"kite {ki} shape {shape}"
        if shape == (2, 1):
            if kite.kind != "four_kite":
                ok3, wit3 = False, f"kite {ki} (2,1) on a 3-kite"
            f2i = [e for e in f2 if e in probl]
            if any(e in m.pairs for e in f2i):
                ok3, wit3 = False, f"kite {ki} internal f2 in matching"
        outs = [e for e in f2 if e not in probl
                and (o.arc.get(e, (None, None))[0] in vs)]
        if len(outs) != 1:
            ok4, wit4 = False, f"kite {ki} has {len(outs)} outgoing f2 edges"
    report.append(("p3_per_kite_shape", ok3, wit3))
    report.append(("p4_one_outgoing", ok4, wit4))

    ok5, wit5 = True, ""
    for ki, kite in enumerate(kites):
        for v in kite.cycle_vertices:
            a = len([e for e in f2 if v in e])
            b = len([e for e in f1 if v in e])
            if a > b + 1:
                ok5, wit5 = False, f"vertex {v}: f2 {a} > f1 {b}+1"
    report.append(("p5_vertex_balance", ok5, wit5))

    cpm = _gprime2_elements(c2.whole_edges, o, set(f1), set(f2))
    comp_label: Dict[Edge, int] = {}
    for ci, ch in enumerate(struct.chains):
        for i in range(len(ch.verts) - 1):
            comp_label[edge_id(ch.verts[i], ch.verts[i + 1])] = ci
        for sid in ch.stubs:
            comp_label[struct.stubs[sid].edge] = ci
    base = len(struct.chains)
    for cyi, cyc in enumerate(struct.cycles):
        for i in range(len(cyc)):
            comp_label[edge_id(cyc[i], cyc[(i + 1) % len(cyc)])] = base + cyi

    mpart = m.partner()
    doubles = {e for e in cpm if e in m.pairs}

    degs: Dict[int, int] = {}
    for e, k in cpm.items():
        degs[e[0]] = degs.get(e[0], 0) + k
        degs[e[1]] = degs.get(e[1], 0) + k
    okd = all(d <= 3 for d in degs.values())
    report.append(("degree_bound", okd,
                   "" if okd else f"{max(degs.items(), key=lambda kv: kv[1])}"))

    paths, cycles = build_partition(cpm, comp_label, g.n)

    ok6, wit6 = True, ""
    for cyc in cycles:
        if len(cyc) % 2 == 0:
            continue
        vs = _path_vertices(cyc[:])
        cyc_vs = set()
        for e in cyc:
            cyc_vs.update(e)
        forced_all = True
        for u in sorted(cyc_vs):
            du = edge_id(u, mpart[u]) if mpart.get(u) is not None else None
            at_u = [e for e in cyc if u in e]
            if du in doubles and du not in at_u:
                continue
            forced_all = False
            break
        if forced_all:
            ok6, wit6 = False, f"odd cycle {sorted(cyc_vs)} fully double-forced"
    report.append(("p6_no_forced_odd_cycle", ok6, wit6))

    ok7, wit7 = True, ""
    for path in paths:
        vs = _path_vertices(path)
        d_a = degs.get(vs[0], 0) + 1
        d_b = degs.get(vs[-1], 0) + 1
        if d_a < 4 and d_b < 4:
            continue
        if d_a >= 4 and d_b >= 4:
            ok7, wit7 = False, f"path {vs} has two degree-4 ends"
            continue
        if d_a >= 4:
            path = list(reversed(path))
            vs = list(reversed(vs))
        # v = vs[-1] has degree 4
        lastd = path[-1] in doubles
        last_but_one_d = len(path) >= 2 and path[-2] in doubles
        matched_back = len(vs) >= 4 and mpart.get(vs[-2]) == vs[-4]
        if not (lastd or last_but_one_d or matched_back):
            ok7, wit7 = False, f"path to {vs[-1]} not amenable"
    report.append(("p7_amenable", ok7, wit7))

    okw1, witw1 = True, ""
    okw2, witw2 = True, ""
    for ki, kite in enumerate(kites):
        if kite.kind != "three_kite":
            continue
        foot = kite.foot
        cnt = len([e for e in f2 if foot in e])
        if cnt >= 2:
            okw1, witw1 = False, f"foot {foot} has {cnt} f2 edges"
        inc = len([e for e in f2 if any(v in e for v in kite.cycle_vertices)])
        if inc >= 4:
            vertical = any(foot in e for e in f1 if e in set(kite.problematic_edges()))
            if not vertical:
                okw2, witw2 = False, f"kite {ki} has {inc} f2 edges but horizontal"
    report.append(("w1_foot_f2", okw1, witw1))
    report.append(("w2_four_f2_vertical", okw2, witw2))

    return report


def compute_exchange_sets(
    g: CompleteGraph,
    cmax: CycleCover,
    m: Matching,
    kites: Sequence[Kite],
    c2: RelaxedCycleCover,
) -> ExchangePair:
    """Select F1/F2 satisfying the full exchange-set contract."""
    struct = decompose_c2(c2, kites, g.n)
    base_pairing = canonical_pairing(struct)

    pairing_options = _pairing_space(struct, base_pairing)
    flip_options = _flip_space(struct)

    attempts = 0
    for pairing in pairing_options:
        for chain_flips, cycle_flips in flip_options:
            attempts += 1
            if attempts > 2000:
                raise UnhandledCase("exchange-set search budget exhausted")
            try:
                o = orient(struct, g, pairing, chain_flips, cycle_flips)
            except (KeyError, IndexError):
                continue
            result = _select_for_orientation(g, cmax, m, kites, c2, struct, o)
            if result is not None:
                f1, f2, log = result
                return ExchangePair(frozenset(f1), frozenset(f2), log, o, struct)
    raise UnhandledCase("no valid exchange-set assignment found")


def _pairing_space(struct: C2Structure, base):
    yield base
    # alternative pairings per kite (cartesian, bounded)
    per_kite = []
    for ki, sids in sorted(struct.kite_stubs.items()):
        if not sids:
            continue
        opts = all_pairings(sorted(sids))
        per_kite.append((ki, opts))
    if not per_kite:
        return
    total = 1
    for _, opts in per_kite:
        total *= len(opts)
    if total > 400:
        # too many: vary one kite at a time from the base
        for ki, opts in per_kite:
            for opt in opts:
                p = {k: list(v) for k, v in base.items()}
                p[ki] = opt
                yield p
        return
    keys = [ki for ki, _ in per_kite]
    for combo in itertools.product(*[opts for _, opts in per_kite]):
        yield {ki: list(opt) for ki, opt in zip(keys, combo)}


def _flip_space(struct: C2Structure):
    n_loops = len(struct.chains)   # upper bound on loop ids
    n_cycles = len(struct.cycles)
    options: List[Tuple[Set[int], Set[int]]] = [(set(), set())]
    # single flips
    for li in range(n_loops):
        options.append(({li}, set()))
    for ci in range(n_cycles):
        options.append((set(), {ci}))
    # pairs of flips, bounded
    if n_loops + n_cycles <= 6:
        ids = [("l", i) for i in range(n_loops)] + [("c", i) for i in range(n_cycles)]
        for a, b in itertools.combinations(ids, 2):
            fl, fc = set(), set()
            for kind, i in (a, b):
                (fl if kind == "l" else fc).add(i)
            options.append((fl, fc))
    return options


def _select_for_orientation(g, cmax, m, kites, c2, struct, o):
    views = _kite_views(kites, o, c2)
    try:
        duties = _build_md(struct, kites, o)
    except InternalError:
        return None
    cand_lists = []
    for view in views:
        cands = _kite_candidates(view, m, o, duties, struct)
        if not cands:
            return None
        cand_lists.append(cands)

    order = sorted(range(len(views)), key=lambda i: len(cand_lists[i]))
    chosen: Dict[int, _Candidate] = {}

    def conflicts(i: int, cand: _Candidate) -> bool:
        # quick pairwise filters: W1 (foot f2 load) is also rechecked globally
        return False

    def assemble() -> Tuple[Set[Edge], Set[Edge]]:
        f1: Set[Edge] = set()
        f2: Set[Edge] = set()
        for i, cand in chosen.items():
            f1.update(cand.f1)
            f2.add(cand.f2_out)
            if cand.f2_int is not None:
                f2.add(cand.f2_int)
        return f1, f2

    budget = [600]

    def search(pos: int) -> Optional[Tuple[Set[Edge], Set[Edge]]]:
        if budget[0] <= 0:
            return None
        if pos == len(order):
            f1, f2 = assemble()
            rep = check_exchange_properties(
                g, cmax, m, kites, c2, struct, o, frozenset(f1), frozenset(f2))
            if all(okv for _, okv, _ in rep):
                return f1, f2
            budget[0] -= 1
            return None
        i = order[pos]
        for cand in cand_lists[i]:
            if conflicts(i, cand):
                continue
            chosen[i] = cand
            got = search(pos + 1)
            if got is not None:
                return got
            del chosen[i]
        return None

    got = search(0)
    if got is None:
        return None
    f1, f2 = got
    log = {i: f"f1={sorted(chosen[i].f1)} f2out={chosen[i].f2_out}"
           + (f" f2int={chosen[i].f2_int}" if chosen[i].f2_int else "")
           for i in chosen}
    return f1, f2, log


def verify_f12(
    g: CompleteGraph,
    cmax: CycleCover,
    m: Matching,
    kites: Sequence[Kite],
    c2: RelaxedCycleCover,
    pair: ExchangePair,
) -> List[Tuple[str, bool, str]]:
    return check_exchange_properties(
        g, cmax, m, kites, c2, pair.struct, pair.orientation, pair.f1, pair.f2)
