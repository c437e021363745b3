"""Free group words, Magnus expansion, Milnor invariants, weights."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homlink import csintegral, relations
from homlink.accept import BORROMEAN_WORD, alpha_vector
from homlink.diagrams import LinComb, enumerate_chord
from homlink.milnor import (
    FreeWord,
    NCSeries,
    PureBraid,
    artin_apply,
    longitudes,
    magnus,
    mu,
    weight_on_chord_diagram,
)

letters = st.integers(min_value=-3, max_value=3).filter(lambda x: x != 0)
words = st.lists(letters, max_size=10).map(
    lambda ls: FreeWord(
        tuple(itertools.chain.from_iterable((x,) for x in ls))
    )
)


@settings(max_examples=80, deadline=None)
@given(words)
def test_free_word_cancels_with_inverse(w):
    assert len(w * w.inverse()) == 0
    assert len(w.inverse() * w) == 0


@settings(max_examples=80, deadline=None)
@given(words, words)
def test_exponent_sum_additive(u, v):
    for i in (1, 2, 3):
        assert (u * v).exponent_sum(i) == u.exponent_sum(i) + v.exponent_sum(i)


@settings(max_examples=40, deadline=None)
@given(words, words)
def test_magnus_is_homomorphism(u, v):
    N = 4
    assert magnus(u * v, N) == magnus(u, N) * magnus(v, N)


@settings(max_examples=40, deadline=None)
@given(words)
def test_magnus_of_inverse(w):
    N = 3
    assert magnus(w, N) * magnus(w.inverse(), N) == NCSeries.one(N)


def test_magnus_degree_one():
    w = FreeWord.generator(2)
    s = magnus(w, 2)
    assert s.coefficient(()) == 1
    assert s.coefficient((2,)) == 1
    assert s.coefficient((1,)) == 0


braid_gens = st.tuples(
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=1, max_value=3),
    st.sampled_from((1, -1)),
).filter(lambda t: t[0] < t[1])
braid_words = st.lists(braid_gens, max_size=6).map(
    lambda w: PureBraid(3, tuple(w))
)


def test_identity_braid_all_mu_zero():
    e = PureBraid(3, ())
    for idx in ((1, 2), (1, 3), (2, 3), (1, 2, 3)):
        assert mu(e, idx) == 0


def test_single_generator_linking():
    b = PureBraid.parse("A(1,2)", 2)
    assert mu(b, (1, 2)) == 1
    assert mu(b, (2, 1)) == 1


def test_borromean_anchors():
    b = PureBraid.parse(BORROMEAN_WORD, 3)
    assert abs(mu(b, (1, 2, 3))) == 1
    for i, j in ((1, 2), (1, 3), (2, 3)):
        assert mu(b, (i, j)) == 0


def test_mu_repeated_index_rejected():
    b = PureBraid.parse("A(1,2)", 2)
    with pytest.raises(ValueError):
        mu(b, (1, 1))


def test_braid_parse_round_trip():
    b = PureBraid.parse("A(1,3) A(2,3)^-1", 3)
    assert b.word == ((1, 3, 1), (2, 3, -1))


def test_artin_action_preserves_exponent_pattern():
    # the Artin action conjugates generators, so exponent sums survive
    b = PureBraid.parse(BORROMEAN_WORD, 3)
    for i in (1, 2, 3):
        w = artin_apply(b, FreeWord.generator(i))
        sums = [w.exponent_sum(j) for j in (1, 2, 3)]
        assert sums == [1 if j == i else 0 for j in (1, 2, 3)]


def test_longitudes_of_identity_trivial():
    for lam in longitudes(PureBraid(3, ())):
        assert len(lam) == 0


@settings(max_examples=40, deadline=None)
@given(braid_words, st.integers(min_value=0, max_value=5), braid_gens)
def test_mu_invariant_under_canceling_insertion(b, pos, gen):
    i, j, e = gen
    pos = min(pos, len(b.word))
    padded = PureBraid(
        3, b.word[:pos] + ((i, j, e), (i, j, -e)) + b.word[pos:]
    )
    for idx in ((1, 2), (1, 3), (2, 3), (1, 2, 3), (2, 1, 3)):
        assert mu(padded, idx) == mu(b, idx)


@settings(max_examples=25, deadline=None)
@given(braid_words)
def test_pairwise_mu_matches_exact_linking(b):
    link = csintegral.from_braid(b, 3)
    for i, j in ((1, 2), (1, 3), (2, 3)):
        got = csintegral.exact_linking(link, i, j)
        assert got == Fraction(mu(b, (i, j)))


def full_weight_vector() -> LinComb:
    """Chord weights of mu(1,2;3) plus the tripod coefficient forced
    by one STU row (free vertices carry no braid realization)."""
    from homlink.diagrams import key_from_str

    vec = LinComb()
    for key in enumerate_chord(2, 3):
        w = weight_on_chord_diagram((1, 2, 3), key)
        if w:
            vec.add_term(key, Fraction(w))
    tripod = key_from_str("q1,1,1|f1|e1-4,2-4,3-4")
    row = next(r for r in relations._stu_rows(2, 3) if tripod in r)
    rest = sum(
        (c * vec.get(k, Fraction(0)) for k, c in row.items() if k != tripod),
        Fraction(0),
    )
    vec.add_term(tripod, -rest / row[tripod])
    return vec


def test_weight_vector_satisfies_stu_rows():
    weights = full_weight_vector()
    for row in relations._stu_rows(2, 3):
        pairing = sum(
            (c * weights.get(k, Fraction(0)) for k, c in row.items()), Fraction(0)
        )
        assert pairing == 0


def test_default_interleaving_respects_segment_orders():
    from homlink.milnor import _chords_of, _default_interleaving

    for key in enumerate_chord(2, 3):
        m, chords, per_segment, _ = _chords_of(key)
        order = _default_interleaving(len(chords), per_segment)
        pos = {c: i for i, c in enumerate(order)}
        cyclic = any(
            pos[a] > pos[b] for seg in per_segment for a, b in zip(seg, seg[1:])
        )
        if cyclic:
            # only the crossed same-pair diagrams admit no compatible
            # order, and there the value must not depend on the choice
            vals = {
                weight_on_chord_diagram((1, 2, 3), key, interleaving=list(p))
                for p in itertools.permutations(range(len(chords)))
            }
            assert len(vals) == 1
        # default always matches the explicit-interleaving call
        assert weight_on_chord_diagram((1, 2, 3), key) == weight_on_chord_diagram(
            (1, 2, 3), key, interleaving=order
        )


def test_weight_below_type_rejected():
    key = enumerate_chord(2, 3, touch_all=True, distinct_pairs=True)[0]
    with pytest.raises(ValueError):
        weight_on_chord_diagram((1, 2), key)


def test_weight_vector_congruent_to_alpha():
    from homlink.accept import order2_shuffle_span
    from homlink.diagrams import key_from_str
    from homlink.exactla import Subspace

    alpha = alpha_vector()
    weights = full_weight_vector()
    tripod = key_from_str("q1,1,1|f1|e1-4,2-4,3-4")
    sign = weights[tripod] / alpha[tripod]
    assert abs(sign) == 1
    basis = list(relations._trivalent_keys(2, 3))
    span = Subspace.from_vectors(
        len(basis), [p.to_vector(basis) for p in order2_shuffle_span()]
    )
    diff = (weights - alpha.scaled(sign)).to_vector(basis)
    assert span.contains(diff)
