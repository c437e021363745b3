"""Acceptance suite: nine checks exercising every module against
pinned anchors, cross-module oracles, and statistical tolerances.

Each criterion is a zero-argument callable returning (ok, detail).
The registry is shared by the test suite and the `check` CLI command.
"""

from __future__ import annotations

import math
from fractions import Fraction

from . import csintegral, dgalgebra, milnor, relations
from .diagrams import (
    Diagram,
    LinComb,
    canonicalize,
    diagram_from_key,
    enumerate_chord,
    enumerate_trees,
    enumerate_trivalent,
    key_from_str,
    automorphism_count,
)
from .exactla import Subspace, membership

# Completed tripod cocycle in canonical coordinates, frozen from the
# Lie-orientation conversion of the order-2 picture combination; the
# tripod carries +1 and each two-chord companion -1.
ALPHA_123 = {
    "q2,1,1|f0|e1-3,2-4": -1,
    "q1,2,1|f0|e1-2,3-4": -1,
    "q1,1,2|f0|e1-3,2-4": -1,
    "q1,1,1|f1|e1-4,2-4,3-4": 1,
}

TRIPOD_KEY = "q1,1,1|f1|e1-4,2-4,3-4"

# Orientation pins fixed once against the first numerical run and then
# frozen: the Monte Carlo combination equals MC_MU_SIGN times the
# Milnor invariant of the same braid.
MC_MU_SIGN = 1

BORROMEAN_WORD = "A(1,3) A(2,3) A(1,3)^-1 A(2,3)^-1"


def alpha_vector() -> LinComb:
    return LinComb.from_terms(
        (key_from_str(k), Fraction(c)) for k, c in ALPHA_123.items()
    )


def _single_chord_cocycles(m: int) -> dict[tuple[int, int], LinComb]:
    out = {}
    for key in enumerate_chord(1, m):
        touched = tuple(s + 1 for s, q in enumerate(key.qs) if q)
        out[touched] = LinComb({key: Fraction(1)})
    return out


def order2_shuffle_span(m: int = 3) -> list[LinComb]:
    """The products of linking-number cocycles spanning the order-2
    indeterminacy: the companions {L+L', M+M', R+R'} at m = 3."""
    chords = _single_chord_cocycles(m)
    import itertools

    prods = []
    for (pa, va), (pb, vb) in itertools.combinations(chords.items(), 2):
        if set(pa) & set(pb):
            prods.append(dgalgebra.shuffle(va, vb))
    return prods


# ---------------------------------------------------------------------------
# independent dimension oracle
#
# The filtration dimensions are predicted by a free polynomial algebra
# on one batch of generators per segment subset S with |S| >= 2: the
# batch holds (|S|-2)! generators, each of order |S|-1 carrying |S|-2
# free vertices.  Stage k counts monomials of total order n with total
# free weight at most k.  Implemented from scratch on binomials only.


def hw_dims_oracle(n: int, m: int) -> tuple[int, ...]:
    groups = []
    for size in range(2, m + 1):
        count = math.comb(m, size) * math.factorial(size - 2)
        groups.append((size - 1, size - 2, count))

    ways: dict[tuple[int, int], int] = {(0, 0): 1}
    for order, free, count in groups:
        nxt: dict[tuple[int, int], int] = {}
        for (o0, f0), w in ways.items():
            j = 0
            while o0 + j * order <= n:
                f = f0 + j * free
                if order == 0 and j > 0:
                    break
                key = (o0 + j * order, f)
                nxt[key] = nxt.get(key, 0) + w * math.comb(count + j - 1, j)
                j += 1
        ways = nxt
    out = []
    for k in range(n):
        out.append(
            sum(w for (o, f), w in ways.items() if o == n and f <= k)
        )
    return tuple(out)


# ---------------------------------------------------------------------------
# criteria


def _fmt(ok: bool, detail: str) -> tuple[bool, str]:
    return ok, detail


def criterion_1_enumeration():
    c34 = len(enumerate_chord(3, 4, touch_all=True, distinct_pairs=True))
    onefree = [
        k
        for k in enumerate_trivalent(3, 4, max_free=1)
        if k.free == 1 and all(q > 0 for q in k.qs)
    ]
    trees34 = enumerate_trees([1, 2, 3, 4])
    d23 = enumerate_trivalent(2, 3)
    touch_all_23 = [k for k in d23 if all(q > 0 for q in k.qs)]
    chords23 = [k for k in touch_all_23 if k.free == 0]
    tripods23 = [k for k in touch_all_23 if k.free == 1]
    ok = (
        c34 == 72
        and len(onefree) == 24
        and len(trees34) == 3
        and len(chords23) == 6
        and len(tripods23) == 1
    )
    return _fmt(
        ok,
        f"chords(3,4)={c34} one-free={len(onefree)} trees={len(trees34)} "
        f"(2,3) touch-all chords={len(chords23)} tripods={len(tripods23)}",
    )


def criterion_2_tree_dims():
    dims = []
    for labels in ([1, 2, 3], [1, 2, 3, 4], [1, 2, 3, 4, 5]):
        dims.append(relations.tree_cocycle_space(labels).dim)
    ok = dims == [1, 2, 6]
    return _fmt(ok, f"tree space dims {dims} expected [1, 2, 6]")


def criterion_3_filtration():
    results = []
    ok = True
    for n, m in ((2, 3), (3, 4)):
        dims = relations.filtration(n, m).dims()
        oracle = hw_dims_oracle(n, m)
        results.append(f"({n},{m}): dims={dims} oracle={oracle}")
        ok = ok and dims == oracle
    ok = ok and relations.filtration(2, 3).dims() == (6, 7)
    ok = ok and relations.filtration(3, 4).dims() == (56, 80, 82)
    return _fmt(ok, "; ".join(results))


def criterion_4_alpha():
    tripod = key_from_str(TRIPOD_KEY)
    tree_part = LinComb({tripod: Fraction(1)})
    cocycle, _ = relations.complete_tree_to_cocycle(2, 3, tree_part)
    alpha = alpha_vector()
    basis = list(relations._trivalent_keys(2, 3))
    span = Subspace.from_vectors(
        len(basis), [p.to_vector(basis) for p in order2_shuffle_span()]
    )
    diff = (cocycle - alpha).to_vector(basis)
    in_span = span.contains(diff)
    cocycle_ok = dgalgebra.is_cocycle(cocycle)
    ok = in_span and cocycle_ok
    return _fmt(
        ok,
        f"completion has {len(cocycle)} terms; difference from frozen "
        f"combination in companion span: {in_span}; is_cocycle: {cocycle_ok}",
    )


def criterion_5_dg():
    pairs_nm = ((1, 2), (1, 3), (2, 2), (2, 3), (3, 3), (3, 4))
    for n, m in pairs_nm:
        for key in enumerate_trivalent(n, m):
            x = LinComb({key: Fraction(1)})
            if dgalgebra.differential(dgalgebra.differential(x)):
                return _fmt(False, f"d(d(x)) != 0 at {key}")

    import itertools

    leib_checked = 0
    for (na, ma), (nb, mb) in itertools.product(((1, 2), (1, 3), (2, 3)), repeat=2):
        if na + nb > 3:
            continue
        m = max(ma, mb)
        for ka in enumerate_trivalent(na, m)[:6]:
            for kb in enumerate_trivalent(nb, m)[:6]:
                a = LinComb({ka: Fraction(1)})
                b = LinComb({kb: Fraction(1)})
                lhs = dgalgebra.differential(dgalgebra.shuffle(a, b))
                rhs = dgalgebra._shuffle_raw(
                    dgalgebra.differential(a), b
                ) + dgalgebra._shuffle_raw(a, dgalgebra.differential(b))
                if lhs != rhs:
                    return _fmt(False, f"Leibniz fails at {ka} x {kb}")
                leib_checked += 1

    for n, m in ((2, 3), (3, 4)):
        cs = relations.cocycle_basis(n, m)
        rows = [r.to_vector(cs.basis) for r in relations._stu_rows(n, m)]
        for vec in cs.vectors():
            if not dgalgebra.is_cocycle(vec):
                return _fmt(False, f"basis vector not a cocycle at ({n},{m})")
        for key in cs.basis[:8]:
            unit = LinComb({key: Fraction(1)})
            member = cs.space.contains(unit.to_vector(cs.basis))
            if dgalgebra.is_cocycle(unit) != member:
                return _fmt(False, f"is_cocycle/membership mismatch at {key}")
        for row in relations.ihx_conditions(n, m):
            for vec in cs.vectors():
                pairing = sum(
                    (c * vec.get(k, Fraction(0)) for k, c in row.items()),
                    Fraction(0),
                )
                if pairing:
                    return _fmt(False, f"IHX row not implied by STU at ({n},{m})")
    return _fmt(
        True,
        f"d(d(x))=0, Leibniz on {leib_checked} pairs, cocycle iff STU, STU implies IHX",
    )


def criterion_6_aut_stu_graph():
    total = 0
    for n, m in ((1, 2), (1, 3), (1, 4), (2, 2), (2, 3), (2, 4), (3, 3), (3, 4)):
        for key in enumerate_trivalent(n, m):
            if automorphism_count(diagram_from_key(key)) != 1:
                return _fmt(False, f"nontrivial automorphism at {key}")
            total += 1
    for n, m in ((2, 3), (3, 4)):
        if not relations.stu_graphs_all_connected(n, m):
            return _fmt(False, f"disconnected STU graph at ({n},{m})")
    return _fmt(True, f"aut=1 for {total} diagrams; STU graphs connected")


def criterion_7_milnor():
    ident = milnor.PureBraid(3, ())
    if any(
        milnor.mu(ident, idx)
        for idx in ((1, 2), (2, 3), (1, 3), (1, 2, 3))
    ):
        return _fmt(False, "identity braid has nonzero invariant")

    clasp_braid = milnor.PureBraid.parse("A(1,2)", 2)
    mu12 = milnor.mu(clasp_braid, (1, 2))
    lk = csintegral.exact_linking(csintegral.from_braid(clasp_braid), 1, 2)
    if mu12 != 1 or lk != 1:
        return _fmt(False, f"clasp: mu={mu12} exact_linking={lk}, expected 1, 1")

    borr = milnor.PureBraid.parse(BORROMEAN_WORD, 3)
    triple = milnor.mu(borr, (1, 2, 3))
    pairwise = [milnor.mu(borr, idx) for idx in ((1, 2), (1, 3), (2, 3))]
    if abs(triple) != 1 or any(pairwise):
        return _fmt(False, f"borromean: mu123={triple} pairwise={pairwise}")

    keys = enumerate_chord(2, 3)
    weights = {
        k: milnor.weight_on_chord_diagram((1, 2, 3), k) for k in keys
    }
    vec = LinComb.from_terms((k, Fraction(w)) for k, w in weights.items())
    tripod = key_from_str(TRIPOD_KEY)
    rows = relations._stu_rows(2, 3)
    tripod_rows = [r for r in rows if tripod in r]
    if not tripod_rows:
        return _fmt(False, "no STU row touches the tripod")
    r0 = tripod_rows[0]
    rest = sum(
        (c * vec.get(k, Fraction(0)) for k, c in r0.items() if k != tripod),
        Fraction(0),
    )
    vec.add_term(tripod, -rest / r0[tripod])
    for row in rows:
        pairing = sum(
            (c * vec.get(k, Fraction(0)) for k, c in row.items()), Fraction(0)
        )
        if pairing:
            return _fmt(False, "weight vector violates an STU condition")

    alpha = alpha_vector()
    sign = vec.get(tripod, Fraction(0)) / alpha.get(tripod, Fraction(0))
    if abs(sign) != 1:
        return _fmt(False, f"tripod weight {vec.get(tripod, Fraction(0))} not ±1")
    basis = list(relations._trivalent_keys(2, 3))
    span = Subspace.from_vectors(
        len(basis), [p.to_vector(basis) for p in order2_shuffle_span()]
    )
    diff = (vec - alpha.scaled(sign)).to_vector(basis)
    if not span.contains(diff):
        return _fmt(
            False, "weight vector differs from the frozen combination by more "
            "than pairwise-linking products"
        )
    return _fmt(
        True,
        f"mu anchors hold; weight vector = {sign} x frozen combination modulo "
        "pairwise-linking products",
    )


def criterion_8_monte_carlo():
    chord = enumerate_chord(1, 2)[0]
    clasp = csintegral.from_braid("A(1,2)", 2)
    est = csintegral.integrate_diagram(chord, clasp, 10**6, seed=42)
    if abs(est.value - 1.0) > 0.05:
        return _fmt(False, f"clasp integral {est.value:.4f} ± {est.std_error:.4f}")

    split = csintegral.split_link(2)
    est_split = csintegral.integrate_diagram(chord, split, 10**6, seed=43)
    if abs(est_split.value) > 3 * est_split.std_error + 1e-12:
        return _fmt(
            False, f"split integral {est_split.value:.5f} ± {est_split.std_error:.5f}"
        )

    borr_link = csintegral.from_braid(BORROMEAN_WORD, 3)
    borr_braid = milnor.PureBraid.parse(BORROMEAN_WORD, 3)
    target = MC_MU_SIGN * milnor.mu(borr_braid, (1, 2, 3))
    combo = csintegral.integrate_cocycle(alpha_vector(), borr_link, 10**6, seed=44)
    tol = min(3 * combo.std_error, 0.25)
    if abs(combo.value - target) > tol:
        return _fmt(
            False,
            f"combination {combo.value:.4f} ± {combo.std_error:.4f} vs {target} (tol {tol:.4f})",
        )

    d = diagram_from_key(chord)
    ((a, b),) = d.edges
    flipped = Diagram(d.m, d.seg_vertices, d.free_vertices, ((b, a),), d.sign)
    e1 = csintegral.integrate_diagram(d, clasp, 10**5, seed=45)
    e2 = csintegral.integrate_diagram(flipped, clasp, 10**5, seed=45)
    if e1.value != -e2.value:
        return _fmt(False, f"edge reversal not exact: {e1.value} vs {-e2.value}")

    return _fmt(
        True,
        f"clasp {est.value:.3f}±{est.std_error:.3f}; split {est_split.value:.4f}; "
        f"combination {combo.value:.3f}±{combo.std_error:.3f} vs {target}; reversal exact",
    )


def criterion_9_shuffle_span():
    for n, m in ((2, 3), (3, 4)):
        for k in range(n):
            if not relations.shuffle_span_check(n, m, k):
                return _fmt(False, f"shuffle products fail to span stage {k} at ({n},{m})")
    return _fmt(True, "shuffle products span every filtration quotient at n <= 3")


CRITERIA = [
    (1, "enumeration anchors", criterion_1_enumeration, "fast"),
    (2, "tree dimensions mod IHX", criterion_2_tree_dims, "fast"),
    (3, "filtration dims vs oracle", criterion_3_filtration, "fast"),
    (4, "tripod completion", criterion_4_alpha, "fast"),
    (5, "dg consistency", criterion_5_dg, "fast"),
    (6, "automorphisms and STU graphs", criterion_6_aut_stu_graph, "fast"),
    (7, "milnor suite", criterion_7_milnor, "fast"),
    (8, "monte carlo suite", criterion_8_monte_carlo, "full"),
    (9, "shuffle span", criterion_9_shuffle_span, "fast"),
]


def run(level: str = "full", out=print) -> bool:
    all_ok = True
    for num, name, func, tier in CRITERIA:
        if level == "fast" and tier != "fast":
            out(f"SKIP criterion {num}: {name} (monte carlo, level=fast)")
            continue
        ok, detail = func()
        all_ok = all_ok and ok
        out(f"{'PASS' if ok else 'FAIL'} criterion {num}: {name} - {detail}")
    return all_ok
