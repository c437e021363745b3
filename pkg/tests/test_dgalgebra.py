"""Differential and shuffle product on the diagram complex."""

import itertools
from fractions import Fraction

import pytest

from homlink import dgalgebra, relations
from homlink.accept import alpha_vector
from homlink.diagrams import LinComb, diagram_from_key, enumerate_trivalent, key_from_str

TRIPOD = key_from_str("q1,1,1|f1|e1-4,2-4,3-4")


def unit(key) -> LinComb:
    return LinComb({key: Fraction(1)})


def test_defect_and_order():
    assert dgalgebra.defect(TRIPOD) == 0
    assert dgalgebra.order(TRIPOD) == 2
    for key in enumerate_trivalent(2, 3):
        assert dgalgebra.defect(key) == 0


def test_differential_raises_defect():
    for key in enumerate_trivalent(2, 3):
        for term in dgalgebra.differential(unit(key)):
            assert dgalgebra.defect(term) == 1
            assert term.order == key.order


def test_differential_squares_to_zero():
    for n, m in ((1, 2), (2, 2), (2, 3), (3, 3)):
        for key in enumerate_trivalent(n, m):
            assert not dgalgebra.differential(dgalgebra.differential(unit(key)))


def test_differential_linear():
    a, b = (unit(k) for k in enumerate_trivalent(2, 3)[:2])
    lhs = dgalgebra.differential(a + b.scaled(Fraction(3)))
    rhs = dgalgebra.differential(a) + dgalgebra.differential(b).scaled(Fraction(3))
    assert lhs == rhs


def test_single_chord_is_closed():
    (key,) = enumerate_trivalent(1, 2)
    assert not dgalgebra.differential(unit(key))


def test_shuffle_commutative():
    keys = enumerate_trivalent(1, 3)
    for ka, kb in itertools.product(keys[:3], repeat=2):
        assert dgalgebra.shuffle(unit(ka), unit(kb)) == dgalgebra.shuffle(unit(kb), unit(ka))


def test_shuffle_bilinear():
    ka, kb, kc = enumerate_trivalent(1, 3)[:3]
    a, b, c = unit(ka), unit(kb), unit(kc)
    lhs = dgalgebra.shuffle(a + b.scaled(Fraction(2)), c)
    rhs = dgalgebra.shuffle(a, c) + dgalgebra.shuffle(b, c).scaled(Fraction(2))
    assert lhs == rhs


def test_shuffle_interleaving_count():
    # two chords sharing both segments interleave 2 x 2 ways
    ka = enumerate_trivalent(1, 3)[0]
    prod = dgalgebra.shuffle(unit(ka), unit(ka))
    assert sum(abs(c) for c in prod.values()) == 4


def test_shuffle_rejects_positive_defect():
    key = enumerate_trivalent(2, 3)[0]
    bent = next(iter(dgalgebra.differential(unit(key))))
    with pytest.raises(ValueError):
        dgalgebra.shuffle(unit(bent), unit(key))


def test_leibniz_on_sample():
    keys2 = enumerate_trivalent(2, 3)[:4]
    keys1 = enumerate_trivalent(1, 3)[:3]
    for ka, kb in itertools.product(keys2, keys1):
        a, b = unit(ka), unit(kb)
        lhs = dgalgebra.differential(dgalgebra.shuffle(a, b))
        rhs = dgalgebra._shuffle_raw(dgalgebra.differential(a), b) + dgalgebra._shuffle_raw(
            a, dgalgebra.differential(b)
        )
        assert lhs == rhs


def test_is_cocycle_alpha_but_not_bare_tripod():
    assert dgalgebra.is_cocycle(alpha_vector())
    assert not dgalgebra.is_cocycle(unit(TRIPOD))


def test_is_cocycle_matches_stu_membership():
    cs = relations.cocycle_basis(2, 3)
    for vec in cs.vectors():
        assert dgalgebra.is_cocycle(vec)
    for key in cs.basis[:6]:
        member = cs.space.contains(unit(key).to_vector(cs.basis))
        assert dgalgebra.is_cocycle(unit(key)) == member


def test_contract_edge_zero_conventions():
    d = diagram_from_key(TRIPOD)
    results = [dgalgebra.contract_edge(d, i) for i in range(len(d.edges))]
    # contracting any tripod leg merges the free vertex into a segment
    assert any(r is not None for r in results)
