"""Homotopy link diagrams: the combinatorial core.

A diagram is a set of m ordered segments (strands), vertices on the
segments, free vertices off the segments, and edges joining vertices.
Validity means: every vertex is trivalent counting segment adjacencies,
every free vertex connects through edges to some segment, no two
vertices on a common segment are joined by an edge path, and the edge
graph is a forest.  Diagrams with a repeated edge or an edge cycle are
the zero element; canonicalize reports them with sign 0.

Vertex ids are 1..|V| and the id order is the vertex order of the
integration orientation; edges are directed (tail, head).  Orientation
bookkeeping: relabeling by an odd permutation or reversing one edge
negates a diagram.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple


@dataclass(frozen=True)
class Diagram:
    m: int
    seg_vertices: tuple[tuple[int, ...], ...]
    free_vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    sign: int = 1


@dataclass(frozen=True)
class LieDiagram:
    """Same combinatorial data with undirected links and, at every free
    vertex, a cyclic order of its three half-edges (as neighbor ids)."""

    m: int
    seg_vertices: tuple[tuple[int, ...], ...]
    free_vertices: tuple[int, ...]
    links: tuple[tuple[int, int], ...]
    cyclic: tuple[tuple[int, tuple[int, int, int]], ...]

    def cyclic_map(self) -> dict[int, tuple[int, int, int]]:
        return dict(self.cyclic)


class CanonicalKey(NamedTuple):
    """Total serialization of a diagram under canonical labels.

    qs[s] is the vertex count on segment s; segment vertices are numbered
    1..Q through the segments in order, free vertices Q+1..Q+free, and
    edges are the canonically directed, sorted edge list.  Isomorphic
    diagrams have equal keys.
    """

    qs: tuple[int, ...]
    free: int
    edges: tuple[tuple[int, int], ...]

    @property
    def m(self) -> int:
        return len(self.qs)

    @property
    def num_seg(self) -> int:
        return sum(self.qs)

    @property
    def order(self) -> int:
        return len(self.edges) - self.free


def key_to_str(key: CanonicalKey) -> str:
    qs = ",".join(str(q) for q in key.qs)
    es = ",".join(f"{t}-{h}" for t, h in key.edges)
    return f"q{qs}|f{key.free}|e{es}"


def key_from_str(s: str) -> CanonicalKey:
    qpart, fpart, epart = s.split("|")
    qs = tuple(int(x) for x in qpart[1:].split(","))
    free = int(fpart[1:])
    edges = tuple(
        tuple(int(x) for x in e.split("-")) for e in epart[1:].split(",") if e
    )
    return CanonicalKey(qs, free, edges)  # type: ignore[arg-type]


def diagram_from_key(key: CanonicalKey) -> Diagram:
    q = key.num_seg
    seg, nxt = [], 1
    for count in key.qs:
        seg.append(tuple(range(nxt, nxt + count)))
        nxt += count
    return Diagram(
        m=key.m,
        seg_vertices=tuple(seg),
        free_vertices=tuple(range(q + 1, q + 1 + key.free)),
        edges=key.edges,
        sign=1,
    )


# ---------------------------------------------------------------------------
# validation


def _check_structure(m, seg_vertices, free_vertices, edges, sign=1):
    """Hard errors for malformed ids, as opposed to diagram violations."""
    if m != len(seg_vertices) or m < 0:
        raise ValueError("segment count does not match segment list")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    ids = [v for seg in seg_vertices for v in seg] + list(free_vertices)
    n_v = len(ids)
    if sorted(ids) != list(range(1, n_v + 1)):
        raise ValueError("vertex ids must be exactly 1..|V| without repeats")
    for t, h in edges:
        if not (1 <= t <= n_v and 1 <= h <= n_v):
            raise ValueError(f"edge ({t},{h}) references a missing vertex")


def _components(n_v: int, edges) -> list[tuple[set[int], int]]:
    """Connected components of the edge graph: (vertex set, edge count)."""
    parent = list(range(n_v + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t, h in edges:
        rt, rh = find(t), find(h)
        if rt != rh:
            parent[rt] = rh
    comps: dict[int, set[int]] = {}
    ecount: dict[int, int] = {}
    for v in range(1, n_v + 1):
        comps.setdefault(find(v), set()).add(v)
    for t, h in edges:
        ecount[find(t)] = ecount.get(find(t), 0) + 1
    return [(vs, ecount.get(root, 0)) for root, vs in sorted(comps.items())]


def validate(d: Diagram) -> list[str]:
    """Violation codes against the trivalent-diagram constraints.

    Empty list means valid.  Malformed vertex/edge ids raise ValueError
    instead of being reported as violations.
    """
    _check_structure(d.m, d.seg_vertices, d.free_vertices, d.edges, d.sign)
    codes = []
    deg: dict[int, int] = {}
    for t, h in d.edges:
        deg[t] = deg.get(t, 0) + 1
        deg[h] = deg.get(h, 0) + 1
    seg_ids = {v for seg in d.seg_vertices for v in seg}
    if any(deg.get(v, 0) != 1 for v in seg_ids) or any(
        deg.get(v, 0) != 3 for v in d.free_vertices
    ):
        codes.append("not-trivalent")

    n_v = len(seg_ids) + len(d.free_vertices)
    seg_of = {v: s for s, seg in enumerate(d.seg_vertices) for v in seg}
    comps = _components(n_v, d.edges)
    free_set = set(d.free_vertices)
    if any(
        not (comp & seg_ids) for comp, _ in comps if comp & free_set
    ):
        codes.append("disconnected-free-vertex")

    for comp, _ in comps:
        segs = [seg_of[v] for v in comp if v in seg_of]
        if len(segs) != len(set(segs)):
            codes.append("same-segment-path")
            break

    if any(ne >= len(comp) for comp, ne in comps) or any(t == h for t, h in d.edges):
        codes.append("edge-cycle")

    und = [tuple(sorted(e)) for e in d.edges]
    if len(set(und)) < len(und):
        codes.append("repeated-edge")
    return codes


# ---------------------------------------------------------------------------
# canonical form


def _perm_parity(mapping: dict[int, int]) -> int:
    # Parity of the permutation old id -> new id on 1..N.
    seen = set()
    sign = 1
    for start in mapping:
        if start in seen:
            continue
        length = 0
        x = start
        while x not in seen:
            seen.add(x)
            x = mapping[x]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def canonicalize(d: Diagram) -> tuple[CanonicalKey | None, int]:
    """Canonical key and the sign relating d to its canonical labeling.

    Sign 0 (with key None) for diagrams that are the zero element: a
    repeated edge, or an edge cycle.  Works for any valences, so the
    differential can canonicalize its higher-defect output.
    """
    _check_structure(d.m, d.seg_vertices, d.free_vertices, d.edges, d.sign)
    und = [tuple(sorted(e)) for e in d.edges]
    if any(t == h for t, h in d.edges) or len(set(und)) < len(und):
        return None, 0

    seg_ids = {v for seg in d.seg_vertices for v in seg}
    n_v = len(seg_ids) + len(d.free_vertices)
    comps = _components(n_v, d.edges)
    if any(ne >= len(comp) for comp, ne in comps if len(comp) > 1):
        return None, 0

    new_id: dict[int, int] = {}
    nxt = 0
    for seg in d.seg_vertices:
        for v in seg:
            nxt += 1
            new_id[v] = nxt

    adj: dict[int, list[int]] = {v: [] for v in range(1, n_v + 1)}
    for t, h in d.edges:
        adj[t].append(h)
        adj[h].append(t)

    def min_leaf(v: int, parent: int | None) -> int:
        # Least canonical segment-vertex id reachable through this branch.
        best = new_id[v] if v in seg_ids else None
        for w in adj[v]:
            if w == parent:
                continue
            sub = min_leaf(w, v)
            if best is None or sub < best:
                best = sub
        if best is None:
            raise ValueError("free vertex component without segment anchor")
        return best

    grafts = []
    for comp, ne in comps:
        if ne == 0:
            continue
        leaves = [new_id[v] for v in comp if v in seg_ids]
        if not leaves:
            raise ValueError("free vertex component without segment anchor")
        root = next(v for v in comp if v in seg_ids and new_id[v] == min(leaves))
        grafts.append((min(leaves), root))
    grafts.sort()

    free_set = set(d.free_vertices)
    for _, root in grafts:
        stack = [(root, None)]
        while stack:
            v, parent = stack.pop()
            if v in free_set and v not in new_id:
                nxt += 1
                new_id[v] = nxt
            children = [w for w in adj[v] if w != parent]
            children.sort(key=lambda w: min_leaf(w, v), reverse=True)
            stack.extend((w, v) for w in children)

    if len(new_id) != n_v:
        raise ValueError("free vertex component without segment anchor")
    parity = _perm_parity(new_id)
    flips = 0
    mapped = []
    for t, h in d.edges:
        nt, nh = new_id[t], new_id[h]
        if nt > nh:
            nt, nh = nh, nt
            flips += 1
        mapped.append((nt, nh))
    mapped.sort()
    key = CanonicalKey(
        tuple(len(seg) for seg in d.seg_vertices), len(d.free_vertices), tuple(mapped)
    )
    return key, d.sign * parity * (-1) ** flips


def canonical_diagram(d: Diagram) -> tuple[Diagram | None, int]:
    key, sign = canonicalize(d)
    if key is None:
        return None, 0
    return diagram_from_key(key), sign


# ---------------------------------------------------------------------------
# Lie orientation


def lie_to_integration(ld: LieDiagram) -> tuple[Diagram, int]:
    """Convert a Lie orientation to an integration orientation.

    Half-edges are listed grouped by vertex (vertices in id order; each
    free vertex's three half-edges in its cyclic order starting from the
    least neighbor id), then regrouped edge by edge in order of first
    occurrence, each edge directed from its earlier to its later
    half-edge.  The returned sign is the parity of that regrouping.
    """
    cyc = ld.cyclic_map()
    _check_structure(ld.m, ld.seg_vertices, ld.free_vertices, ld.links)
    und = [tuple(sorted(e)) for e in ld.links]
    if len(set(und)) < len(und) or any(t == h for t, h in und):
        raise ValueError("Lie diagram with repeated edge or loop")
    nbrs: dict[int, list[int]] = {}
    for a, b in ld.links:
        nbrs.setdefault(a, []).append(b)
        nbrs.setdefault(b, []).append(a)
    for v in ld.free_vertices:
        order = cyc.get(v)
        if order is None or sorted(order) != sorted(nbrs.get(v, [])):
            raise ValueError(f"cyclic order at {v} does not list its neighbors")

    seg_ids = [v for seg in ld.seg_vertices for v in seg]
    half_edges: list[tuple[int, int]] = []
    for v in sorted(seg_ids + list(ld.free_vertices)):
        if v in cyc:
            order = list(cyc[v])
            k = order.index(min(order))
            for w in order[k:] + order[:k]:
                half_edges.append((v, w))
        else:
            for w in sorted(nbrs.get(v, [])):
                half_edges.append((v, w))

    pos = {he: i for i, he in enumerate(half_edges)}
    seen = set()
    target: list[tuple[int, int]] = []
    edges = []
    for he in half_edges:
        e = tuple(sorted(he))
        if e in seen:
            continue
        seen.add(e)
        partner = (he[1], he[0])
        target.append(he)
        target.append(partner)
        edges.append((he[0], he[1]))

    perm = {i: pos[he] for i, he in enumerate(target)}
    sign = _perm_parity({a + 1: b + 1 for a, b in perm.items()})
    diagram = Diagram(
        m=ld.m,
        seg_vertices=ld.seg_vertices,
        free_vertices=ld.free_vertices,
        edges=tuple(edges),
        sign=1,
    )
    return diagram, sign


# ---------------------------------------------------------------------------
# automorphisms


def automorphism_count(d: Diagram) -> int:
    """Count label- and segment-order-preserving automorphisms.

    Segment vertices are pinned by their (segment, position) slots, so
    only free vertices may move.  Expected to be 1 always; counted by
    brute force rather than assumed.
    """
    if validate(d):
        raise ValueError("invalid diagram")
    edge_set = {frozenset(e) for e in d.edges}
    count = 0
    for perm in itertools.permutations(d.free_vertices):
        mapping = dict(zip(d.free_vertices, perm))
        ok = all(
            frozenset((mapping.get(t, t), mapping.get(h, h))) in edge_set
            for t, h in d.edges
        )
        count += ok
    return count


# ---------------------------------------------------------------------------
# grafts


@dataclass(frozen=True)
class Graft:
    """One connected component of the edge graph.

    leaves are (vertex id, segment, position) with 1-based segment and
    position; free lists the component's free vertices.
    """

    edges: tuple[tuple[int, int], ...]
    free: tuple[int, ...]
    leaves: tuple[tuple[int, int, int], ...]


def grafts(d: Diagram) -> list[Graft]:
    seg_slot = {
        v: (s + 1, p + 1)
        for s, seg in enumerate(d.seg_vertices)
        for p, v in enumerate(seg)
    }
    n_v = len(seg_slot) + len(d.free_vertices)
    out = []
    for comp, ne in _components(n_v, d.edges):
        if ne == 0:
            continue
        comp_edges = tuple(e for e in d.edges if e[0] in comp)
        leaves = tuple(
            sorted((v, *seg_slot[v]) for v in comp if v in seg_slot)
        )
        free = tuple(sorted(v for v in comp if v not in seg_slot))
        out.append(Graft(comp_edges, free, leaves))
    out.sort(key=lambda g: g.leaves)
    return out


def _graft_shape(g: Graft) -> tuple:
    """Canonical shape of one graft with leaves labeled by segment only."""
    adj: dict[int, list[int]] = {}
    for t, h in g.edges:
        adj.setdefault(t, []).append(h)
        adj.setdefault(h, []).append(t)
    leaf_seg = {v: s for v, s, _ in g.leaves}

    def ser(v: int, parent: int | None) -> tuple:
        if v in leaf_seg and parent is not None:
            return ("L", leaf_seg[v])
        children = sorted(ser(w, v) for w in adj[v] if w != parent)
        if v in leaf_seg:
            return ("R", leaf_seg[v], tuple(children))
        return ("V", tuple(children))

    root = min((s, v) for v, s, _ in g.leaves)[1]
    return ser(root, None)


def unitrivalent_class_key(d: Diagram) -> tuple:
    """Underlying unitrivalent diagram: grafts with segment labels only,
    forgetting positions along the segments."""
    return tuple(sorted(_graft_shape(g) for g in grafts(d)))


# ---------------------------------------------------------------------------
# linear combinations


class LinComb(dict):
    """Formal rational combination of canonical diagrams: key -> Fraction."""

    def add_term(self, key: CanonicalKey, coeff) -> None:
        c = self.get(key, Fraction(0)) + Fraction(coeff)
        if c:
            self[key] = c
        else:
            self.pop(key, None)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[CanonicalKey, Fraction]]) -> "LinComb":
        lc = cls()
        for key, coeff in terms:
            lc.add_term(key, coeff)
        return lc

    def __add__(self, other: "LinComb") -> "LinComb":
        out = LinComb(self)
        for k, v in other.items():
            out.add_term(k, v)
        return out

    def __sub__(self, other: "LinComb") -> "LinComb":
        out = LinComb(self)
        for k, v in other.items():
            out.add_term(k, -v)
        return out

    def scaled(self, factor) -> "LinComb":
        factor = Fraction(factor)
        if not factor:
            return LinComb()
        return LinComb({k: v * factor for k, v in self.items()})

    def to_vector(self, basis: list[CanonicalKey]) -> tuple[Fraction, ...]:
        index = {k: i for i, k in enumerate(basis)}
        vec = [Fraction(0)] * len(basis)
        for k, v in self.items():
            if k not in index:
                raise KeyError(f"diagram outside basis: {key_to_str(k)}")
            vec[index[k]] = v
        return tuple(vec)

    @classmethod
    def from_vector(cls, basis: list[CanonicalKey], vec) -> "LinComb":
        return cls.from_terms(zip(basis, (Fraction(x) for x in vec)))


# ---------------------------------------------------------------------------
# enumeration


def _tree_shapes(k: int) -> list[tuple[tuple[int, int], ...]]:
    """Trivalent trees on leaves 0..k-1, internal nodes k..2k-3.

    Built by leaf insertion, which hits every labeled shape exactly once:
    (2k-5)!! shapes for k >= 3, one for k = 2.
    """
    if k < 2:
        raise ValueError("need at least two leaves")
    if k == 2:
        return [((0, 1),)]
    shapes = [(((0, 3), (1, 3), (2, 3)), 3)]
    for leaves in range(3, k):
        nxt = []
        for edges, n_int in shapes:
            # Shift internal ids up one slot so the new leaf takes id
            # `leaves` and the new internal vertex 2*leaves - 1.
            def sh(v):
                return v + 1 if v >= leaves else v

            shifted = [(sh(a), sh(b)) for a, b in edges]
            new_internal = 2 * (leaves + 1) - 3
            for i, (a, b) in enumerate(shifted):
                ne = list(shifted)
                ne[i] = (a, new_internal)
                ne.append((b, new_internal))
                ne.append((leaves, new_internal))
                nxt.append((tuple(ne), n_int + 1))
        shapes = nxt
    return [edges for edges, _ in shapes]


def _assemble(m: int, placed_grafts) -> Iterable[Diagram]:
    """Assemble diagrams from grafts whose leaves carry segment labels.

    placed_grafts: list of (shape_edges, leaf_to_segment dict, n_leaves).
    Yields one diagram per choice of leg order on every segment.
    """
    legs_per_seg: list[list[tuple[int, int]]] = [[] for _ in range(m)]
    for gi, (_, assign, n_leaves) in enumerate(placed_grafts):
        for leaf, seg in assign.items():
            legs_per_seg[seg].append((gi, leaf))

    for arrangement in itertools.product(
        *(itertools.permutations(legs) for legs in legs_per_seg)
    ):
        vid = {}
        nxt = 0
        seg_vertices = []
        for legs in arrangement:
            row = []
            for leg in legs:
                nxt += 1
                vid[leg] = nxt
                row.append(nxt)
            seg_vertices.append(tuple(row))
        free_ids = []
        edges = []
        for gi, (shape, assign, n_leaves) in enumerate(placed_grafts):
            imap = {}
            for node in range(n_leaves):
                imap[node] = vid[(gi, node)]
            for node in range(n_leaves, 2 * n_leaves - 2 if n_leaves > 2 else n_leaves):
                nxt += 1
                imap[node] = nxt
                free_ids.append(nxt)
            for a, b in shape:
                edges.append((imap[a], imap[b]))
        yield Diagram(
            m=m,
            seg_vertices=tuple(seg_vertices),
            free_vertices=tuple(free_ids),
            edges=tuple(edges),
            sign=1,
        )


def _leaf_count_multisets(n: int, max_free: int) -> list[tuple[int, ...]]:
    """Non-increasing tuples (l_1..l_r), l_i >= 2, sum(l_i - 1) = n,
    sum(l_i - 2) <= max_free."""
    out = []

    def rec(remaining, cap, acc):
        if remaining == 0:
            if sum(l - 2 for l in acc) <= max_free:
                out.append(tuple(acc))
            return
        for l in range(min(remaining + 1, cap), 1, -1):
            rec(remaining - (l - 1), l, acc + [l])

    rec(n, n + 1, [])
    return out


def enumerate_trivalent(n: int, m: int, max_free: int | None = None) -> list[CanonicalKey]:
    """All trivalent diagrams of order n on m segments, up to max_free
    free vertices, as sorted canonical keys."""
    if n < 0 or m < 1:
        raise ValueError("need n >= 0 and m >= 1")
    if max_free is None or max_free > n - 1:
        max_free = max(n - 1, 0)
    if n == 0:
        return [CanonicalKey((0,) * m, 0, ())]
    keys = set()
    for counts in _leaf_count_multisets(n, max_free):
        options_per_size = {
            l: [
                (shape, dict(zip(range(l), segs)), l)
                for shape in _tree_shapes(l)
                for segs in itertools.permutations(range(m), l)
            ]
            for l in set(counts)
        }
        pools = []
        i = 0
        while i < len(counts):
            j = i
            while j < len(counts) and counts[j] == counts[i]:
                j += 1
            pools.append(
                itertools.combinations_with_replacement(
                    options_per_size[counts[i]], j - i
                )
            )
            i = j
        for groups in itertools.product(*pools):
            placed = [g for group in groups for g in group]
            for diagram in _assemble(m, placed):
                key, sign = canonicalize(diagram)
                if sign:
                    keys.add(key)
    return sorted(keys)


def enumerate_chord(
    n: int, m: int, *, touch_all: bool = False, distinct_pairs: bool = False
) -> list[CanonicalKey]:
    """Chord diagrams of order n on m segments, as sorted canonical keys.

    touch_all keeps only diagrams with a vertex on every segment;
    distinct_pairs drops diagrams where two chords join the same segment
    pair.  Both off: the full enumeration.
    """
    if n < 0 or m < 1:
        raise ValueError("need n >= 0 and m >= 1")
    pairs = list(itertools.combinations(range(m), 2))
    keys = set()
    for chosen in itertools.combinations_with_replacement(pairs, n):
        if distinct_pairs and len(set(chosen)) < n:
            continue
        if touch_all and set(itertools.chain.from_iterable(chosen)) != set(range(m)):
            continue
        placed = [
            (((0, 1),), {0: a, 1: b}, 2) for a, b in chosen
        ]
        for diagram in _assemble(m, placed):
            key, sign = canonicalize(diagram)
            if sign:
                keys.add(key)
    return sorted(keys)


def enumerate_trees(labels: Iterable[int], m: int | None = None) -> list[CanonicalKey]:
    """Connected single-tree diagrams with exactly one leaf on each
    segment in `labels` (1-based); count (2|I|-5)!! for |I| >= 3."""
    I = sorted(set(labels))
    if len(I) < 2:
        raise ValueError("need at least two labels")
    if m is None:
        m = max(I)
    if max(I) > m or min(I) < 1:
        raise ValueError("labels out of range")
    k = len(I)
    keys = set()
    for shape in _tree_shapes(k):
        for perm in itertools.permutations(I):
            placed = [(shape, {i: perm[i] - 1 for i in range(k)}, k)]
            for diagram in _assemble(m, placed):
                key, sign = canonicalize(diagram)
                if sign:
                    keys.add(key)
    return sorted(keys)


# ---------------------------------------------------------------------------
# JSON


def diagram_to_json(d: Diagram) -> dict:
    return {
        "m": d.m,
        "segVertices": [list(seg) for seg in d.seg_vertices],
        "freeVertices": list(d.free_vertices),
        "edges": [list(e) for e in d.edges],
        "sign": d.sign,
    }


def diagram_from_json(obj: dict) -> Diagram:
    d = Diagram(
        m=obj["m"],
        seg_vertices=tuple(tuple(seg) for seg in obj["segVertices"]),
        free_vertices=tuple(obj["freeVertices"]),
        edges=tuple((t, h) for t, h in obj["edges"]),
        sign=obj.get("sign", 1),
    )
    _check_structure(d.m, d.seg_vertices, d.free_vertices, d.edges, d.sign)
    return d


def lie_to_json(ld: LieDiagram) -> dict:
    return {
        "m": ld.m,
        "segVertices": [list(seg) for seg in ld.seg_vertices],
        "freeVertices": list(ld.free_vertices),
        "links": [list(e) for e in ld.links],
        "cyclic": {str(v): list(order) for v, order in ld.cyclic},
    }


def lie_from_json(obj: dict) -> LieDiagram:
    return LieDiagram(
        m=obj["m"],
        seg_vertices=tuple(tuple(seg) for seg in obj["segVertices"]),
        free_vertices=tuple(obj["freeVertices"]),
        links=tuple((a, b) for a, b in obj["links"]),
        cyclic=tuple(
            sorted((int(v), tuple(order)) for v, order in obj["cyclic"].items())
        ),
    )
