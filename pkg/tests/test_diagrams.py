"""Diagram combinatorics: keys, canonical form, enumeration, JSON."""

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from homlink.diagrams import (
    CanonicalKey,
    Diagram,
    LieDiagram,
    automorphism_count,
    canonical_diagram,
    canonicalize,
    diagram_from_json,
    diagram_from_key,
    diagram_to_json,
    enumerate_chord,
    enumerate_trees,
    enumerate_trivalent,
    key_from_str,
    key_to_str,
    lie_to_integration,
    validate,
)

TRIPOD = "q1,1,1|f1|e1-4,2-4,3-4"


def test_key_string_round_trip():
    for s in (TRIPOD, "q1,1,2|f0|e1-3,2-4", "q0,0|f0|e"):
        assert key_to_str(key_from_str(s)) == s


def test_key_order_and_defect_bookkeeping():
    k = key_from_str(TRIPOD)
    assert k.m == 3 and k.num_seg == 3 and k.order == 2


def test_diagram_from_key_is_canonical():
    for s in (TRIPOD, "q1,1,2|f0|e1-3,2-4"):
        key = key_from_str(s)
        back, sign = canonicalize(diagram_from_key(key))
        assert back == key and sign == 1


def test_validate_accepts_enumerated():
    for key in enumerate_trivalent(2, 3):
        assert validate(diagram_from_key(key)) == []


def test_validate_rejects_same_segment_chord():
    bad = Diagram(2, ((1, 2), ()), (), ((1, 2),))
    assert validate(bad)


def test_validate_rejects_disconnected_free_vertex():
    bad = Diagram(1, ((1,),), (2, 3), ((2, 3), (2, 3), (1, 2)))
    assert validate(bad)


def test_repeated_edge_is_zero():
    # a doubled edge is the zero element: sign 0, no key
    d = Diagram(2, ((1,), (2,)), (), ((1, 2), (1, 2)))
    key, sign = canonicalize(d)
    assert sign == 0


def test_enumeration_anchors():
    assert len(enumerate_chord(3, 4, touch_all=True, distinct_pairs=True)) == 72
    onefree = [
        k
        for k in enumerate_trivalent(3, 4, max_free=1)
        if k.free == 1 and all(q > 0 for q in k.qs)
    ]
    assert len(onefree) == 24
    assert len(enumerate_trees([1, 2, 3, 4])) == 3


def test_enumeration_order2_strands3():
    keys = enumerate_trivalent(2, 3)
    touch = [k for k in keys if all(q > 0 for q in k.qs)]
    assert len([k for k in touch if k.free == 0]) == 6
    assert [k for k in touch if k.free == 1] == [key_from_str(TRIPOD)]


def test_tree_counts_double_factorial():
    # (2k-5)!! trees on k labels
    assert len(enumerate_trees([1, 2, 3])) == 1
    assert len(enumerate_trees([1, 2, 3, 4])) == 3
    assert len(enumerate_trees([1, 2, 3, 4, 5])) == 15


def test_enumeration_deterministic_and_sorted():
    a = enumerate_trivalent(2, 3)
    b = enumerate_trivalent(2, 3)
    assert a == b == sorted(a)


def _relabel(d: Diagram, perm: dict[int, int]) -> Diagram:
    return Diagram(
        d.m,
        tuple(tuple(perm[v] for v in seg) for seg in d.seg_vertices),
        tuple(perm[v] for v in d.free_vertices),
        tuple((perm[t], perm[h]) for t, h in d.edges),
        d.sign,
    )


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_canonicalize_invariant_under_relabeling(seed):
    rng = random.Random(seed)
    keys = enumerate_trivalent(2, 3)
    d = diagram_from_key(keys[rng.randrange(len(keys))])
    n_v = sum(len(s) for s in d.seg_vertices) + len(d.free_vertices)
    ids = list(range(1, n_v + 1))
    shuffled = ids[:]
    rng.shuffle(shuffled)
    perm = dict(zip(ids, shuffled))
    key0, sign0 = canonicalize(d)
    key1, sign1 = canonicalize(_relabel(d, perm))
    assert key1 == key0
    assert sign1 in (1, -1)


def test_edge_reversal_flips_sign():
    d = diagram_from_key(key_from_str("q1,1|f0|e1-2"))
    key0, sign0 = canonicalize(d)
    flipped = Diagram(d.m, d.seg_vertices, d.free_vertices, ((2, 1),), d.sign)
    key1, sign1 = canonicalize(flipped)
    assert key1 == key0 and sign1 == -sign0


def test_canonical_diagram_round_trip():
    d = diagram_from_key(key_from_str(TRIPOD))
    cd, sign = canonical_diagram(d)
    assert sign == 1
    assert canonicalize(cd)[0] == canonicalize(d)[0]


def test_automorphisms_trivial_at_low_order():
    for n, m in ((1, 2), (2, 3)):
        for key in enumerate_trivalent(n, m):
            assert automorphism_count(diagram_from_key(key)) == 1


def test_lie_to_integration_tripod():
    # one free vertex joined to three segment legs; cyclic order fixed
    ld = LieDiagram(
        m=3,
        seg_vertices=((1,), (2,), (3,)),
        free_vertices=(4,),
        links=((1, 4), (2, 4), (3, 4)),
        cyclic=((4, (1, 2, 3)),),
    )
    d, sign = lie_to_integration(ld)
    key, csign = canonicalize(d)
    assert key_to_str(key) == TRIPOD
    assert sign * csign == -1


def test_lie_to_integration_cyclic_invariance():
    base = ((1, 2, 3), (2, 3, 1), (3, 1, 2))
    results = set()
    for cyc in base:
        ld = LieDiagram(
            m=3,
            seg_vertices=((1,), (2,), (3,)),
            free_vertices=(4,),
            links=((1, 4), (2, 4), (3, 4)),
            cyclic=((4, cyc),),
        )
        d, sign = lie_to_integration(ld)
        key, csign = canonicalize(d)
        results.add((key, sign * csign))
    assert len(results) == 1


def test_diagram_json_round_trip():
    for key in enumerate_trivalent(2, 3)[:10]:
        d = diagram_from_key(key)
        back = diagram_from_json(diagram_to_json(d))
        assert back == d
