"""Differential graded structure on homotopy link diagrams.

Grading: defect = 2|E| - |V_seg| - 3|V_free| (0 exactly on trivalent
diagrams) and order = |E| - |V_free|.  The differential contracts one
edge or one arc at a time, raising defect by 1 and preserving order;
the shuffle product interleaves two diagrams' legs segment by segment.

Sign convention for a contraction of e = (u, v): apply the vertex
permutation moving u, v to positions 1, 2 and take its parity; the
stored edge direction is the contraction direction (reversing the edge
negates the term); the merged vertex takes position 1.  Coherence of
the convention is certified by the d.d = 0 and Leibniz test suites, not
assumed.

Contractions whose result has a repeated edge or an edge cycle are
zero.  A contraction result whose merged vertex ties an edge path to a
second vertex on the same segment is kept: it lives in positive defect,
where that exclusion does not apply.  Dropping such results instead
would erase exactly the conditions tying T to U when the S diagram is
the zero element, leaving ker d strictly larger than the STU-condition
space (10 versus 7 dimensions already at order 2 on 3 segments).
Chord edges (both ends on segments) have no well-formed contraction
and contribute zero.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .diagrams import (
    CanonicalKey,
    Diagram,
    LinComb,
    _components,
    _perm_parity,
    canonicalize,
    diagram_from_key,
    validate,
)


def _as_diagram(x) -> Diagram:
    if isinstance(x, CanonicalKey):
        return diagram_from_key(x)
    if isinstance(x, Diagram):
        return x
    raise TypeError(f"expected Diagram or CanonicalKey, got {type(x)!r}")


def defect(x) -> int:
    d = _as_diagram(x)
    n_seg = sum(len(s) for s in d.seg_vertices)
    return 2 * len(d.edges) - n_seg - 3 * len(d.free_vertices)


def order(x) -> int:
    d = _as_diagram(x)
    return len(d.edges) - len(d.free_vertices)


# ---------------------------------------------------------------------------
# contractions


def _renumber(d: Diagram, u: int, v: int, merged_seg_slot, drop_edge: int | None):
    """Shared contraction core: merge vertices u, v.

    merged_seg_slot: (segment, position-in-old-list) when the merged
    vertex sits on a segment, else None (merged vertex is free).
    drop_edge: index of the contracted edge, None for arc contractions.
    Returns the new diagram with the permutation parity folded into its
    sign.
    """
    n_v = sum(len(s) for s in d.seg_vertices) + len(d.free_vertices)
    pu, pv = u - 1, v - 1
    seq = [pu, pv] + [i for i in range(n_v) if i not in (pu, pv)]
    parity = _perm_parity({i + 1: p + 1 for i, p in enumerate(seq)})

    new_id = {u: 1, v: 1}
    for k, oldpos in enumerate(seq[2:]):
        new_id[oldpos + 1] = k + 2

    seg_vertices = []
    for s, seg in enumerate(d.seg_vertices):
        row = []
        for p, w in enumerate(seg):
            if merged_seg_slot is not None and (w == u or w == v):
                if (s, p) == merged_seg_slot:
                    row.append(1)
                # the other merged slot disappears
            else:
                row.append(new_id[w])
        seg_vertices.append(tuple(row))

    free = sorted(
        new_id[w] for w in d.free_vertices if not (w in (u, v) and merged_seg_slot is not None)
    )
    if merged_seg_slot is None:
        free = sorted(set(free) | {1})
    else:
        free = [x for x in free if x != 1]

    edges = tuple(
        (new_id[t], new_id[h])
        for j, (t, h) in enumerate(d.edges)
        if j != drop_edge
    )
    return Diagram(
        m=d.m,
        seg_vertices=tuple(seg_vertices),
        free_vertices=tuple(free),
        edges=edges,
        sign=d.sign * parity,
    )


def _same_segment_path(d: Diagram) -> bool:
    seg_of = {v: s for s, seg in enumerate(d.seg_vertices) for v in seg}
    n_v = len(seg_of) + len(d.free_vertices)
    for comp, _ in _components(n_v, d.edges):
        segs = [seg_of[v] for v in comp if v in seg_of]
        if len(segs) != len(set(segs)):
            return True
    return False


def contract_edge(d: Diagram, idx: int) -> Diagram | None:
    """Contract edge idx; None when the contraction is degenerate
    (both endpoints on segments).  Repeated-edge and edge-cycle
    results are annihilated later, by canonicalize."""
    u, v = d.edges[idx]
    seg_slot = {
        w: (s, p) for s, seg in enumerate(d.seg_vertices) for p, w in enumerate(seg)
    }
    if u in seg_slot and v in seg_slot:
        return None
    if u in seg_slot:
        merged_slot = seg_slot[u]
    elif v in seg_slot:
        # Renumbering places the tail's slot first; the merged vertex
        # keeps the segment slot of whichever endpoint had one.
        merged_slot = seg_slot[v]
    else:
        merged_slot = None
    return _renumber(d, u, v, merged_slot, drop_edge=idx)


def contract_arc(d: Diagram, s: int, p: int) -> Diagram | None:
    """Contract the arc between positions p and p+1 on segment s
    (0-based); None when degenerate."""
    seg = d.seg_vertices[s]
    u, v = seg[p], seg[p + 1]
    return _renumber(d, u, v, (s, p), drop_edge=None)


def differential(x) -> LinComb:
    """Signed sum of all edge and arc contractions, canonicalized.

    Accepts a Diagram, a CanonicalKey, or a LinComb and extends
    linearly.  Terms that are zero by convention (repeated edge, edge
    cycle, same-segment edge path) are dropped.
    """
    if isinstance(x, LinComb):
        out = LinComb()
        for key, coeff in x.items():
            for k2, c2 in differential(diagram_from_key(key)).items():
                out.add_term(k2, coeff * c2)
        return out

    d = _as_diagram(x)
    out = LinComb()
    for idx in range(len(d.edges)):
        nd = contract_edge(d, idx)
        if nd is None:
            continue
        key, sign = canonicalize(nd)
        if sign:
            out.add_term(key, Fraction(sign))
    for s, seg in enumerate(d.seg_vertices):
        for p in range(len(seg) - 1):
            nd = contract_arc(d, s, p)
            if nd is None:
                continue
            key, sign = canonicalize(nd)
            if sign:
                out.add_term(key, Fraction(sign))
    return out


# ---------------------------------------------------------------------------
# shuffle product


def _shuffle_pair(a: CanonicalKey, b: CanonicalKey) -> LinComb:
    """Sum over all per-segment interleavings of two canonical diagrams.

    The composite vertex order is a's vertices then b's; no extra sign
    is applied (on trivalent diagrams the product sign is +1, and the
    derivation certificate validates the same convention at defect 1).
    """
    if a.m != b.m:
        raise ValueError("shuffle requires equal segment counts")
    da, db = diagram_from_key(a), diagram_from_key(b)
    off = sum(a.qs) + a.free
    out = LinComb()
    per_segment = [
        itertools.combinations(range(qa + qb), qa) for qa, qb in zip(a.qs, b.qs)
    ]
    for slots in itertools.product(*per_segment):
        seg_vertices = []
        for s, a_slots in enumerate(slots):
            qa, qb = a.qs[s], b.qs[s]
            ia = iter(da.seg_vertices[s])
            ib = iter(db.seg_vertices[s])
            row = [
                next(ia) if pos in a_slots else next(ib) + off
                for pos in range(qa + qb)
            ]
            seg_vertices.append(tuple(row))
        d = Diagram(
            m=a.m,
            seg_vertices=tuple(seg_vertices),
            free_vertices=tuple(da.free_vertices)
            + tuple(v + off for v in db.free_vertices),
            edges=tuple(da.edges) + tuple((t + off, h + off) for t, h in db.edges),
            sign=1,
        )
        key, sign = canonicalize(d)
        if sign:
            out.add_term(key, Fraction(sign))
    return out


def _as_lincomb(x) -> LinComb:
    if isinstance(x, LinComb):
        return x
    if isinstance(x, CanonicalKey):
        return LinComb({x: Fraction(1)})
    if isinstance(x, Diagram):
        key, sign = canonicalize(x)
        if sign == 0:
            return LinComb()
        return LinComb({key: Fraction(sign)})
    raise TypeError(f"cannot interpret {type(x)!r} as a linear combination")


def _shuffle_raw(a, b) -> LinComb:
    """Bilinear interleaving sum without the defect-0 restriction."""
    la, lb = _as_lincomb(a), _as_lincomb(b)
    out = LinComb()
    for ka, ca in la.items():
        for kb, cb in lb.items():
            for k, c in _shuffle_pair(ka, kb).items():
                out.add_term(k, ca * cb * c)
    return out


def shuffle(a, b) -> LinComb:
    """Shuffle product of two trivalent diagrams or combinations."""
    la, lb = _as_lincomb(a), _as_lincomb(b)
    for lc in (la, lb):
        for key in lc:
            if defect(key):
                raise ValueError("shuffle is defined on defect-0 diagrams only")
    return _shuffle_raw(la, lb)


def is_cocycle(c) -> bool:
    """True iff the differential of the combination vanishes."""
    lc = _as_lincomb(c)
    if lc:
        nm = {(k.order, k.m) for k in lc}
        if len(nm) > 1:
            raise ValueError("combination is not homogeneous in (order, segments)")
        for key in lc:
            if defect(key):
                raise ValueError("cocycle test expects trivalent diagrams")
    return not differential(lc)
