"""Relation systems: STU cocycles, IHX trees, filtration, completion.

Dimension anchors are checked against the independent monomial-count
oracle in accept (distinct-index subsets, (|I|-2)! generators each),
which shares no code with the elimination path.
"""

from fractions import Fraction

from homlink import relations
from homlink.accept import alpha_vector, hw_dims_oracle, order2_shuffle_span
from homlink.diagrams import LinComb, enumerate_trivalent, key_from_str
from homlink.exactla import Subspace

TRIPOD = key_from_str("q1,1,1|f1|e1-4,2-4,3-4")


def test_tree_space_dims():
    dims = [relations.tree_cocycle_space(labels).dim for labels in ([1, 2, 3], [1, 2, 3, 4], [1, 2, 3, 4, 5])]
    assert dims == [1, 2, 6]


def test_filtration_dims_vs_oracle():
    for n, m in ((2, 3), (3, 4)):
        assert relations.filtration(n, m).dims() == hw_dims_oracle(n, m)
    assert relations.filtration(2, 3).dims() == (6, 7)
    assert relations.filtration(3, 4).dims() == (56, 80, 82)


def test_cocycle_basis_matches_filtration_top():
    cs = relations.cocycle_basis(2, 3)
    assert cs.space.dim == relations.filtration(2, 3).dims()[-1]


def test_stu_triples_have_consistent_shape():
    triples = relations.stu_triples(2, 3)
    assert triples
    for t in triples:
        # T and U terms are always present; S may be zero
        assert t.t is not None and t.u is not None
        assert t.row()


def test_completion_is_cocycle_and_congruent_to_frozen():
    tree_part = LinComb({TRIPOD: Fraction(1)})
    cocycle, _ = relations.complete_tree_to_cocycle(2, 3, tree_part)
    alpha = alpha_vector()
    basis = list(relations._trivalent_keys(2, 3))
    span = Subspace.from_vectors(
        len(basis), [p.to_vector(basis) for p in order2_shuffle_span()]
    )
    assert span.contains((cocycle - alpha).to_vector(basis))
    # the tripod coefficient itself has no companion freedom
    assert cocycle.get(TRIPOD) == Fraction(1)


def test_completion_deterministic():
    tree_part = LinComb({TRIPOD: Fraction(1)})
    a, _ = relations.complete_tree_to_cocycle(2, 3, tree_part)
    b, _ = relations.complete_tree_to_cocycle(2, 3, tree_part)
    assert a == b


def test_completion_scales_linearly():
    one, _ = relations.complete_tree_to_cocycle(2, 3, LinComb({TRIPOD: Fraction(1)}))
    two, _ = relations.complete_tree_to_cocycle(2, 3, LinComb({TRIPOD: Fraction(2)}))
    assert two == one.scaled(Fraction(2))


def test_ihx_conditions_contain_stu_kernel():
    cs = relations.cocycle_basis(2, 3)
    for row in relations.ihx_conditions(2, 3):
        for vec in cs.vectors():
            pairing = sum(
                (c * vec.get(k, Fraction(0)) for k, c in row.items()), Fraction(0)
            )
            assert pairing == 0


def test_stu_graphs_connected():
    assert relations.stu_graphs_all_connected(2, 3)
    assert relations.stu_graphs_all_connected(3, 4)


def test_stu_graph_components_positive():
    for key in enumerate_trivalent(2, 3)[:5]:
        assert relations.stu_graph_components(key, 2, 3) >= 1


def test_shuffle_span_all_stages():
    for n, m in ((2, 3), (3, 4)):
        for k in range(n):
            assert relations.shuffle_span_check(n, m, k)


def test_basis_json_round_trip():
    cs = relations.cocycle_basis(2, 3)
    obj = relations.basis_to_json(cs)
    assert obj["n"] == 2 and obj["m"] == 3
    assert len(obj["basis"]) == cs.space.dim
    round_tripped = [relations.lincomb_from_json(entry) for entry in obj["basis"]]
    assert round_tripped == cs.vectors()
