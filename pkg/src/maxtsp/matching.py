"""Exact maximum-weight perfect matching and simple perfect b-matching.

A single blossom core (kernels.mwpm_kernel) serves three callers: the
perfect matching M (b=1), the maximum-weight cycle cover (b=2) and the
gadget graph for the relaxed cycle cover.  Perfectness is forced by adding
a uniform offset large enough that higher cardinality always wins; the
offset cancels out of all weight comparisons and the returned duals are
offset-adjusted, so the pricing tests used by callers stay exact.

b-matchings reduce to plain matchings by the standard degree-splitting
expansion: vertex v becomes b(v) interchangeable copies, edge (u,v) becomes
a two-node gadget u_i - e_u - e_v - v_j whose internal edge means "unused".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .graph import (
    Edge,
    Infeasible,
    InstanceError,
    InternalError,
    NoPerfectMatching,
    edge_id,
)


@dataclass(frozen=True)
class GeneralGraph:
    """Not-necessarily-complete weighted graph; no parallel edges or loops."""

    n: int
    edges: Tuple[Tuple[int, int, int], ...]

    @staticmethod
    def from_edges(n: int, edges) -> "GeneralGraph":
        seen = set()
        norm = []
        for u, v, w in edges:
            a, b = edge_id(u, v)
            if not (0 <= a and b < n):
                raise InstanceError(f"edge ({u},{v}) out of range")
            if (a, b) in seen:
                raise InstanceError(f"parallel edge ({a},{b})")
            if w < 0:
                raise InstanceError("negative weight")
            seen.add((a, b))
            norm.append((a, b, int(w)))
        norm.sort()
        return GeneralGraph(n, tuple(norm))


@dataclass
class MatchResult:
    pairs: List[Edge]            # matched canonical edges
    weight: int                  # total weight, caller scale
    duals: np.ndarray            # per-vertex duals, internal doubled scale,
                                 # offset-adjusted: feasibility is
                                 # duals[u]+duals[v] >= 2*w(u,v) for absent edges
    mate: np.ndarray             # partner vertex or -1


def _solve_matching(
    n: int,
    edges: Sequence[Tuple[int, int, int]],
    require_perfect: bool,
    y_init: Optional[np.ndarray] = None,
    mate_init: Optional[np.ndarray] = None,
) -> MatchResult:
    """Run the blossom kernel; weights are caller-scale nonnegative ints."""
    ne = len(edges)
    if n % 2 and require_perfect:
        raise NoPerfectMatching("odd vertex count")
    if ne == 0:
        if require_perfect and n > 0:
            raise NoPerfectMatching("no edges")
        return MatchResult([], 0, np.zeros(n, np.int64), np.full(n, -1, np.int64))

    eu = np.fromiter((e[0] for e in edges), np.int64, ne)
    ev = np.fromiter((e[1] for e in edges), np.int64, ne)
    w = np.fromiter((e[2] for e in edges), np.int64, ne)

    offset = 0
    if require_perfect:
        offset = int(w.sum()) + 1
        offset += offset % 2  # keep the internal scale even
    ew = 2 * (w + offset)

    if y_init is None:
        y0 = np.full(n, int(ew.max()), np.int64)
        y0 += y0 % 2
    else:
        y0 = y_init.astype(np.int64)
    if mate_init is None:
        m0 = np.full(n, -1, np.int64)
    else:
        m0 = mate_init.astype(np.int64)

    pool_cap = max(4096, 16 * n)
    for _attempt in range(8):
        status, mate_v, mate_e, dual, inb, bpar, bbase = kernels.mwpm_kernel(
            n, eu, ev, ew, y0, m0, pool_cap
        )
        if status == kernels.MW_OK:
            break
        if status == kernels.MW_POOL_OVERFLOW:
            pool_cap *= 4
            continue
        raise InternalError("matching kernel failed to converge")
    else:
        raise InternalError("matching kernel pool exhausted")

    if require_perfect and (mate_v < 0).any():
        raise NoPerfectMatching("graph admits no perfect matching")

    pairs: List[Edge] = []
    weight = 0
    for vtx in range(n):
        p = int(mate_v[vtx])
        if p > vtx:
            pairs.append((vtx, p))
            weight += int(w[int(mate_e[vtx])])
    duals = dual[:n] - offset  # adjust back: internal dual is for w+offset
    return MatchResult(pairs, weight, duals, mate_v)


def verify_matching_optimal(
    n: int, edges: Sequence[Tuple[int, int, int]], result: MatchResult
) -> bool:
    """Weak-duality check of the returned matching among perfect matchings.

    Uses the adjusted duals only; sufficient for the test suite because the
    kernel is also cross-checked against exhaustive enumeration.
    """
    matched = {edge_id(u, v) for u, v in result.pairs}
    y = result.duals
    for u, v, w in edges:
        s = int(y[u]) + int(y[v]) - 2 * w
        if (u, v) in matched and s > 0:
            # matched edges may sit inside blossoms; slack contributions from
            # blossom duals are not reconstructed here, so only flag negatives
            continue
        if s < 0 and (u, v) not in matched:
            # could still be covered by a blossom dual; treated as failure
            # only in blossom-free certificates
            return False
    return True


def max_weight_perfect_matching(g: GeneralGraph) -> MatchResult:
    """Maximum-weight perfect matching; raises NoPerfectMatching if none."""
    return _solve_matching(g.n, g.edges, require_perfect=True)


def max_weight_matching(g: GeneralGraph) -> MatchResult:
    """Maximum-weight (not necessarily perfect) matching."""
    return _solve_matching(g.n, g.edges, require_perfect=False)


def expand_to_matching_instance(
    g: GeneralGraph, b: Dict[int, int]
) -> Tuple[GeneralGraph, List[Edge]]:
    """Degree-splitting reduction from perfect b-matching to perfect matching.

    Returns the expanded graph (weights on the doubled scale: traversing an
    edge gadget earns exactly 2*w) and a back-map: expanded gadget index k
    corresponds to original edge back_map[k].
    """
    total = 0
    copy_off: Dict[int, int] = {}
    for v in range(g.n):
        bv = b.get(v, 0)
        if bv < 1:
            raise InstanceError(f"demand b({v}) must be >= 1")
        copy_off[v] = total
        total += bv
    exp_edges: List[Tuple[int, int, int]] = []
    back_map: List[Edge] = []
    nxt = total
    for (u, v, w) in g.edges:
        e_u, e_v = nxt, nxt + 1
        nxt += 2
        back_map.append((u, v))
        for i in range(b[u]):
            exp_edges.append((copy_off[u] + i, e_u, w))
        exp_edges.append((e_u, e_v, 0))
        for j in range(b[v]):
            exp_edges.append((e_v, copy_off[v] + j, w))
    return GeneralGraph(nxt, tuple(exp_edges)), back_map


@dataclass
class BMatchResult:
    edges: List[Edge]
    weight: int                  # caller scale
    duals: np.ndarray            # per original vertex: min over copies,
                                 # internal doubled+offset-adjusted scale


def max_weight_perfect_b_matching(g: GeneralGraph, b: Dict[int, int]) -> BMatchResult:
    """Perfect simple b-matching of maximum weight via the expansion."""
    expanded, back_map = expand_to_matching_instance(g, b)
    ncopy = sum(b.get(v, 0) for v in range(g.n))
    if (ncopy % 2) != 0:
        raise Infeasible("sum of demands is odd")

    ne = len(expanded.edges)
    eu = np.fromiter((e[0] for e in expanded.edges), np.int64, ne)
    ev = np.fromiter((e[1] for e in expanded.edges), np.int64, ne)
    w = np.fromiter((e[2] for e in expanded.edges), np.int64, ne)
    offset = int(w.sum()) + 1
    offset += offset % 2
    ew = 2 * (w + offset)

    n_exp = expanded.n
    # warm start: every edge gadget internally matched, copies free
    y0 = np.empty(n_exp, np.int64)
    y0[ncopy:] = offset  # gadget vertices: (e_u,e_v) edges become tight
    maxinc = np.zeros(n_exp, np.int64)
    for k in range(ne):
        ww = int(ew[k])
        if ww > maxinc[eu[k]]:
            maxinc[eu[k]] = ww
        if ww > maxinc[ev[k]]:
            maxinc[ev[k]] = ww
    y0[:ncopy] = maxinc[:ncopy] - offset  # copy + gadget >= w+2offset ... see below
    # feasibility: copy-gadget edge weight 2(w+offset); y(copy)+y(e_u)
    #   = maxinc - offset + offset = maxinc >= 2(w+offset) since maxinc is the
    #   max incident 2(w+offset).  gadget pair: offset+offset = 2*offset = weight.
    y0 += y0 % 2  # even parity (offset is even, ew even, so already even)

    m0 = np.full(n_exp, -1, np.int64)
    gadget_edge = np.full(n_exp, -1, np.int64)
    for k in range(ne):
        if eu[k] >= ncopy and ev[k] >= ncopy:
            gadget_edge[eu[k]] = k
            gadget_edge[ev[k]] = k
    for vtx in range(ncopy, n_exp):
        m0[vtx] = gadget_edge[vtx]

    pool_cap = max(4096, 16 * n_exp)
    for _attempt in range(8):
        status, mate_v, mate_e, dual, inb, bpar, bbase = kernels.mwpm_kernel(
            n_exp, eu, ev, ew, y0, m0, pool_cap
        )
        if status == kernels.MW_OK:
            break
        if status == kernels.MW_POOL_OVERFLOW:
            pool_cap *= 4
            continue
        raise InternalError("matching kernel failed to converge")
    else:
        raise InternalError("matching kernel pool exhausted")

    if (mate_v < 0).any():
        raise Infeasible("no perfect b-matching exists")

    # decode: gadget k selected iff its internal edge is unmatched
    chosen: List[Edge] = []
    weight = 0
    gbase = ncopy
    for k, (u, v, ww) in enumerate(g.edges):
        e_u = gbase + 2 * k
        if mate_v[e_u] != e_u + 1:
            chosen.append((u, v))
            weight += ww

    # duals per original vertex: min over copies, offset removed
    duals = np.zeros(g.n, np.int64)
    off = 0
    for vtx in range(g.n):
        bv = b.get(vtx, 0)
        duals[vtx] = int(dual[off:off + bv].min()) - offset
        off += bv
    return BMatchResult(chosen, weight, duals)
