"""Relation systems on trivalent diagrams: STU and IHX condition
spaces, the free-vertex filtration, and tree-to-cocycle completion.

A cocycle is a coefficient vector orthogonal (Kronecker pairing, valid
since diagrams here have trivial automorphisms) to every STU row
S - T + U.  Rows are indexed by a trivalent diagram together with an
adjacent pair of legs on one segment: T is the diagram itself, U has
the two legs exchanged, and S fuses them into a new free vertex.  When
the fused diagram is zero (its free vertex would tie two legs landing
on a common segment, or close an edge cycle, or double an edge) the S
term vanishes and the row still imposes a condition tying T to U; these
degenerate rows are required to cut the space down to the expected
dimensions.

Row signs are not assigned by hand: each row is read off as the
pairing of the stratum with one defect-1 diagram under the
contraction differential, so the joint kernel coincides with ker d by
construction and stays coherent with the shuffle product's Leibniz
rule.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import dgalgebra
from .diagrams import (
    CanonicalKey,
    Diagram,
    LieDiagram,
    LinComb,
    canonicalize,
    diagram_from_key,
    enumerate_trees,
    enumerate_trivalent,
    key_to_str,
    key_from_str,
    lie_to_integration,
    unitrivalent_class_key,
)
from .exactla import RatMatrix, Subspace, kernel_basis, membership, solve_affine


@dataclass(frozen=True)
class StuTriple:
    """One STU condition: s/t/u are (canonical key, coefficient) pairs,
    with s None when the fused diagram is the zero element."""

    s: tuple[CanonicalKey, int] | None
    t: tuple[CanonicalKey, int]
    u: tuple[CanonicalKey, int]

    def row(self) -> LinComb:
        lc = LinComb()
        if self.s is not None:
            lc.add_term(self.s[0], Fraction(self.s[1]))
        lc.add_term(self.t[0], Fraction(-self.t[1]))
        lc.add_term(self.u[0], Fraction(self.u[1]))
        return lc


@dataclass
class CocycleSpace:
    n: int
    m: int
    basis: list[CanonicalKey]
    space: Subspace

    @property
    def dim(self) -> int:
        return self.space.dim

    def vectors(self) -> list[LinComb]:
        return [LinComb.from_vector(self.basis, v) for v in self.space.basis]


@dataclass
class Filtration:
    """Nested cocycle subspaces by maximal free-vertex count."""

    n: int
    m: int
    basis: list[CanonicalKey]
    spaces: list[Subspace]

    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.spaces)

    def quotient_dims(self) -> tuple[int, ...]:
        dims = self.dims()
        return tuple(d - p for d, p in zip(dims, (0,) + dims[:-1]))


# ---------------------------------------------------------------------------
# Lie scaffolding shared by the STU and IHX row builders


def _base_lie(d: Diagram) -> tuple[tuple[tuple[int, int], ...], dict[int, tuple[int, ...]]]:
    links = tuple(tuple(sorted(e)) for e in d.edges)
    nbrs: dict[int, list[int]] = {}
    for a, b in links:
        nbrs.setdefault(a, []).append(b)
        nbrs.setdefault(b, []).append(a)
    cyclic = {v: tuple(sorted(nbrs.get(v, []))) for v in d.free_vertices}
    return links, cyclic


def _signed_term(ld: LieDiagram) -> tuple[CanonicalKey, int]:
    diagram, conv = lie_to_integration(ld)
    key, sign = canonicalize(diagram)
    if sign == 0:
        raise ValueError("Lie diagram canonicalized to zero")
    return key, conv * sign


def _rename_cyclic(cyclic: dict[int, tuple[int, ...]], renames: dict[int, int]):
    return {
        v: tuple(renames.get(x, x) for x in order) for v, order in cyclic.items()
    }


def _replace_link(links, old, new):
    out = list(links)
    out.remove(tuple(sorted(old)))
    out.append(tuple(sorted(new)))
    return tuple(out)


# ---------------------------------------------------------------------------
# STU rows


@lru_cache(maxsize=None)
def _trivalent_keys(n: int, m: int) -> tuple[CanonicalKey, ...]:
    return tuple(enumerate_trivalent(n, m))


def stu_triples(n: int, m: int) -> list[StuTriple]:
    """All STU conditions at (n, m), one per (diagram, adjacent leg
    pair on a segment), deduplicated up to overall sign."""
    triples = []
    seen = set()
    for key in _trivalent_keys(n, m):
        d = diagram_from_key(key)
        links, cyclic = _base_lie(d)
        for s, seg in enumerate(d.seg_vertices):
            for p in range(len(seg) - 1):
                u, v = seg[p], seg[p + 1]
                x = next(b if a == u else a for a, b in links if u in (a, b))
                y = next(b if a == v else a for a, b in links if v in (a, b))

                t_lie = LieDiagram(
                    d.m, d.seg_vertices, d.free_vertices, links,
                    tuple(sorted(cyclic.items())),
                )
                u_links = _replace_link(
                    _replace_link(links, (u, x), (u, y)), (v, y), (v, x)
                )
                u_cyc = _rename_cyclic(cyclic, {u: v, v: u})
                u_lie = LieDiagram(
                    d.m, d.seg_vertices, d.free_vertices, u_links,
                    tuple(sorted(u_cyc.items())),
                )

                s_term = None
                if x != y:
                    s_links = [e for e in links if e not in (tuple(sorted((u, x))), tuple(sorted((v, y))))]
                    s_links += [tuple(sorted((u, v))), tuple(sorted((v, x))), tuple(sorted((v, y)))]
                    s_segs = tuple(
                        tuple(w for w in sv if w != v) if si == s else sv
                        for si, sv in enumerate(d.seg_vertices)
                    )
                    s_free = tuple(sorted(d.free_vertices + (v,)))
                    s_cyc = _rename_cyclic(cyclic, {u: v})
                    s_cyc[v] = (u, x, y)
                    s_diag = Diagram(
                        d.m, s_segs, s_free, tuple(s_links), 1
                    )
                    s_key, s_sign = canonicalize(s_diag)
                    if s_sign != 0 and not dgalgebra._same_segment_path(s_diag):
                        s_lie = LieDiagram(
                            d.m, s_segs, s_free, tuple(s_links),
                            tuple(sorted(s_cyc.items())),
                        )
                        s_term = _signed_term(s_lie)

                triple = StuTriple(s_term, _signed_term(t_lie), _signed_term(u_lie))
                row = triple.row()
                if not row:
                    continue
                items = tuple(sorted((k, c) for k, c in row.items()))
                lead = items[0][1]
                norm = tuple((k, c / lead) for k, c in items)
                if norm in seen:
                    continue
                seen.add(norm)
                triples.append(triple)
    return triples


@lru_cache(maxsize=64)
def _stu_rows_cached(n: int, m: int) -> tuple[LinComb, ...]:
    cols: dict[CanonicalKey, LinComb] = {}
    for key in _trivalent_keys(n, m):
        for xkey, coeff in dgalgebra.differential(key).items():
            cols.setdefault(xkey, LinComb()).add_term(key, coeff)
    return tuple(row for _, row in sorted(cols.items()) if row)


def _stu_rows(n: int, m: int) -> list[LinComb]:
    """Cocycle conditions as differential pairings.

    One row per defect-1 diagram X: the coefficient of X in d(Gamma)
    as Gamma runs over the trivalent stratum, so the joint kernel is
    exactly ker d.  Each row is an S = T - U condition (or its
    degenerate form) in the orientation the contraction signs induce;
    stu_triples keeps the unsigned triple structure for the exchange
    graph.
    """
    return list(_stu_rows_cached(n, m))


def _rows_to_matrix(rows: list[LinComb], basis: list[CanonicalKey]) -> RatMatrix:
    index = {k: i for i, k in enumerate(basis)}
    dicts = []
    for row in rows:
        dicts.append({index[k]: c for k, c in row.items()})
    return RatMatrix.from_rows(dicts, len(basis))


def cocycle_basis(n: int, m: int) -> CocycleSpace:
    """Kernel of the STU conditions over all trivalent diagrams."""
    basis = list(_trivalent_keys(n, m))
    matrix = _rows_to_matrix(_stu_rows(n, m), basis)
    return CocycleSpace(n, m, basis, kernel_basis(matrix))


# ---------------------------------------------------------------------------
# IHX rows and tree spaces


def _ihx_rows_for_trees(tree_keys) -> list[LinComb]:
    rows = []
    seen = set()
    for key in tree_keys:
        d = diagram_from_key(key)
        links, cyclic = _base_lie(d)
        free = set(d.free_vertices)
        for a, b in links:
            if a not in free or b not in free:
                continue
            ca = list(cyclic[a])
            cb = list(cyclic[b])
            ra = ca[ca.index(b):] + ca[: ca.index(b)]
            rb = cb[cb.index(a):] + cb[: cb.index(a)]
            P, Q = ra[1], ra[2]
            R, S = rb[1], rb[2]

            def term(branch_a, branch_b, swaps):
                # swaps: (old_edge, new_edge, (moved_vertex, old_nbr, new_nbr))
                new_links = links
                cyc = dict(cyclic)
                for old, new, (w, frm, to) in swaps:
                    new_links = _replace_link(new_links, old, new)
                    if w in cyc:
                        cyc[w] = tuple(to if x == frm else x for x in cyc[w])
                cyc[a] = (b,) + branch_a
                cyc[b] = (a,) + branch_b
                return _signed_term(
                    LieDiagram(
                        d.m, d.seg_vertices, d.free_vertices, new_links,
                        tuple(sorted(cyc.items())),
                    )
                )

            t1 = term((P, Q), (R, S), [])
            t2 = term(
                (P, R), (Q, S),
                [((a, Q), (b, Q), (Q, a, b)), ((b, R), (a, R), (R, b, a))],
            )
            t3 = term(
                (P, S), (Q, R),
                [((a, Q), (b, Q), (Q, a, b)), ((b, S), (a, S), (S, b, a))],
            )
            row = LinComb()
            row.add_term(t1[0], Fraction(t1[1]))
            row.add_term(t2[0], Fraction(-t2[1]))
            row.add_term(t3[0], Fraction(t3[1]))
            if not row:
                continue
            items = tuple(sorted(row.items()))
            lead = items[0][1]
            norm = tuple((k, c / lead) for k, c in items)
            if norm not in seen:
                seen.add(norm)
                rows.append(row)
    return rows


def tree_cocycle_space(labels, m: int | None = None) -> Subspace:
    """IHX-orthogonal subspace over enumerate_trees(labels); its
    dimension is (|labels| - 2)! for three or more labels."""
    trees = enumerate_trees(labels, m)
    rows = _ihx_rows_for_trees(trees)
    return kernel_basis(_rows_to_matrix(rows, trees))


def ihx_conditions(n: int, m: int) -> list[LinComb]:
    """IHX rows among all connected diagrams at (n, m): these are the
    trees with n+1 leaves on each (n+1)-subset of segments."""
    rows = []
    for I in itertools.combinations(range(1, m + 1), n + 1):
        rows.extend(_ihx_rows_for_trees(enumerate_trees(I, m)))
    return rows


# ---------------------------------------------------------------------------
# filtration


def filtration(n: int, m: int) -> Filtration:
    basis = list(_trivalent_keys(n, m))
    stu = _stu_rows(n, m)
    spaces = []
    for k in range(n):
        rows = list(stu)
        for key in basis:
            if key.free > k:
                rows.append(LinComb({key: Fraction(1)}))
        spaces.append(kernel_basis(_rows_to_matrix(rows, basis)))
    return Filtration(n, m, basis, spaces)


# ---------------------------------------------------------------------------
# completion


def _pivot_reduce(vec, space: Subspace):
    """Zero the vector's coordinates at the subspace's pivot columns by
    subtracting basis vectors; deterministic representative choice."""
    out = list(vec)
    for b in space.basis:
        p = next(i for i, x in enumerate(b) if x)
        f = out[p]
        if f:
            for i, x in enumerate(b):
                if x:
                    out[i] -= f * x
    return tuple(out)


def complete_tree_to_cocycle(n: int, m: int, tree_part: LinComb):
    """Extend a top-stratum tree combination to a full cocycle.

    Returns (cocycle, indeterminacy) where the indeterminacy is the
    next-lower filtration stage.  The tree part must satisfy every IHX
    condition; the representative is chosen to be supported on diagrams
    touching exactly the segments the tree part touches (when that is
    solvable) and to have zero coordinates on the remaining freedom's
    echelon pivots.
    """
    k = n - 1
    basis = list(_trivalent_keys(n, m))
    index = {key: i for i, key in enumerate(basis)}
    for key in tree_part:
        if key not in index:
            raise ValueError("tree part contains a diagram outside the ambient space")
        if key.free != k:
            raise ValueError("tree part must live in the top free-vertex stratum")

    for row in ihx_conditions(n, m):
        pairing = sum(
            (c * tree_part.get(key, Fraction(0)) for key, c in row.items()),
            Fraction(0),
        )
        if pairing:
            raise ValueError(
                "tree part violates an IHX condition: "
                + " ".join(f"{c}*{key_to_str(key)}" for key, c in row.items())
            )

    stu = _stu_rows(n, m)
    top_rows = [LinComb({key: Fraction(1)}) for key in basis if key.free == k]
    rows = stu + top_rows
    rhs = [Fraction(0)] * len(stu) + [
        tree_part.get(key, Fraction(0)) for key in basis if key.free == k
    ]

    touched = set()
    for key in tree_part:
        touched |= {s for s, q in enumerate(key.qs) if q}
    support_rows = [
        LinComb({key: Fraction(1)})
        for key in basis
        if {s for s, q in enumerate(key.qs) if q} != touched
    ]

    solved = solve_affine(
        _rows_to_matrix(rows + support_rows, basis),
        rhs + [Fraction(0)] * len(support_rows),
    )
    if solved is not None:
        particular, freedom = solved
    else:
        solved = solve_affine(_rows_to_matrix(rows, basis), rhs)
        if solved is None:
            raise RuntimeError(
                "no cocycle extends this tree part; the STU system is infeasible"
            )
        particular, freedom = solved

    particular = _pivot_reduce(particular, freedom)

    lower_rows = list(stu)
    for key in basis:
        if key.free > k - 1:
            lower_rows.append(LinComb({key: Fraction(1)}))
    indeterminacy = kernel_basis(_rows_to_matrix(lower_rows, basis))
    return LinComb.from_vector(basis, particular), indeterminacy


# ---------------------------------------------------------------------------
# STU graphs


def _class_groups(n: int, m: int) -> dict[tuple, set[CanonicalKey]]:
    groups: dict[tuple, set[CanonicalKey]] = {}
    for key in _trivalent_keys(n, m):
        cls = unitrivalent_class_key(diagram_from_key(key))
        groups.setdefault(cls, set()).add(key)
    return groups


def _tu_edges(n: int, m: int) -> list[tuple[CanonicalKey, CanonicalKey]]:
    return [(t.t[0], t.u[0]) for t in stu_triples(n, m)]


def stu_graph_components(diagram, n: int | None = None, m: int | None = None) -> int:
    """Number of components of the leg-exchange graph on all diagrams
    sharing the given diagram's underlying unitrivalent diagram."""
    if isinstance(diagram, CanonicalKey):
        key = diagram
    else:
        key, sign = canonicalize(diagram)
        if sign == 0:
            raise ValueError("zero diagram has no STU graph")
    n = key.order if n is None else n
    m = key.m if m is None else m
    cls = unitrivalent_class_key(diagram_from_key(key))
    members = _class_groups(n, m)[cls]
    parent = {k: k for k in members}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in _tu_edges(n, m):
        if a in parent and b in parent:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    return len({find(k) for k in members})


def stu_graphs_all_connected(n: int, m: int) -> bool:
    groups = _class_groups(n, m)
    edges = _tu_edges(n, m)
    for members in groups.values():
        parent = {k: k for k in members}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in edges:
            if a in parent and b in parent:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[ra] = rb
        if len({find(k) for k in members}) != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# shuffle span


@lru_cache(maxsize=128)
def _tree_cocycle_vectors(labels, m: int) -> tuple[LinComb, ...]:
    """Completed cocycles whose top part runs over an IHX basis of the
    trees on the given leaf labels."""
    trees = enumerate_trees(labels, m)
    space = tree_cocycle_space(labels, m)
    out = []
    for v in space.basis:
        tree_part = LinComb.from_vector(trees, v)
        cocycle, _ = complete_tree_to_cocycle(len(labels) - 1, m, tree_part)
        out.append(cocycle)
    return tuple(out)


def shuffle_span_check(n: int, m: int, k: int) -> bool:
    """True iff shuffle products of tree cocycles with total free count
    k span the filtration quotient at stage k."""
    if not 0 <= k <= n - 1:
        raise ValueError("stage out of range")
    filt = filtration(n, m)
    basis = filt.basis
    target = filt.spaces[k]
    lower_basis = filt.spaces[k - 1].basis if k else []

    factor_pool = []
    for size in range(2, m + 1):
        for I in itertools.combinations(range(1, m + 1), size):
            for vec in _tree_cocycle_vectors(I, m):
                factor_pool.append((size - 1, size - 2, vec))

    products: list[LinComb] = []

    def extend(start, order_left, free_left, acc):
        if order_left == 0:
            if free_left == 0:
                products.append(acc)
            return
        for i in range(start, len(factor_pool)):
            o, f, vec = factor_pool[i]
            if o > order_left or f > free_left:
                continue
            extend(i, order_left - o, free_left - f, dgalgebra.shuffle(acc, vec))

    for i in range(len(factor_pool)):
        o, f, vec = factor_pool[i]
        if o <= n and f <= k:
            extend(i, n - o, k - f, vec)

    vectors = []
    for p in products:
        v = p.to_vector(basis)
        if not target.contains(v):
            return False
        vectors.append(v)
    span = Subspace.from_vectors(len(basis), vectors + list(lower_basis))
    return span.dim == target.dim


# ---------------------------------------------------------------------------
# JSON


def basis_to_json(cs: CocycleSpace) -> dict:
    return {
        "n": cs.n,
        "m": cs.m,
        "basis": [
            {"coeffs": {key_to_str(k): str(c) for k, c in vec.items()}}
            for vec in cs.vectors()
        ],
    }


def lincomb_from_json(obj: dict) -> LinComb:
    return LinComb.from_terms(
        (key_from_str(ks), Fraction(cs)) for ks, cs in obj["coeffs"].items()
    )
