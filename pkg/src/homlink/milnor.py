"""Milnor link-homotopy invariants of pure-braid string links.

Strings links enter as words in the band generators A(i,j); the Artin
action on the free group extracts longitudes, whose Magnus expansion
coefficients are the invariants.  Chord diagrams are paired with an
invariant by realizing each chord as a band insertion and taking the
alternating sum over the 2^n resolutions.
"""

from __future__ import annotations

import heapq
import itertools
import re
from dataclasses import dataclass
from functools import lru_cache

from .diagrams import CanonicalKey, Diagram, diagram_from_key


class FreeWord:
    """Freely reduced word in generators x_1..x_m; a letter is a signed
    integer, -i meaning the inverse of x_i."""

    __slots__ = ("letters",)

    def __init__(self, letters=()):
        stack: list[int] = []
        for a in letters:
            if a == 0:
                raise ValueError("zero letter")
            if stack and stack[-1] == -a:
                stack.pop()
            else:
                stack.append(a)
        self.letters = tuple(stack)

    @classmethod
    def generator(cls, i: int, exp: int = 1) -> "FreeWord":
        return cls((i,) * exp if exp >= 0 else (-i,) * (-exp))

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord(self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(tuple(-a for a in reversed(self.letters)))

    def exponent_sum(self, i: int) -> int:
        return sum(1 if a == i else -1 if a == -i else 0 for a in self.letters)

    def __eq__(self, other):
        return isinstance(other, FreeWord) and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __len__(self):
        return len(self.letters)

    def __repr__(self):
        if not self.letters:
            return "1"
        return "".join(f"x{a}" if a > 0 else f"x{-a}^-1" for a in self.letters)


_A_TOKEN = re.compile(r"^A\((\d+),(\d+)\)(\^-1)?$")


@dataclass(frozen=True)
class PureBraid:
    """Word in the band generators A(i,j)^±1 on m strands, stored as a
    tuple of (i, j, exponent)."""

    m: int
    word: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        for i, j, e in self.word:
            if not (1 <= i < j <= self.m):
                raise ValueError(f"generator A({i},{j}) out of range for {self.m} strands")
            if e not in (1, -1):
                raise ValueError("exponent must be +1 or -1")

    @classmethod
    def parse(cls, text: str, m: int) -> "PureBraid":
        word = []
        for tok in text.split():
            match = _A_TOKEN.match(tok)
            if not match:
                raise ValueError(f"bad braid token: {tok!r}")
            i, j = int(match.group(1)), int(match.group(2))
            word.append((i, j, -1 if match.group(3) else 1))
        return cls(m, tuple(word))

    def __mul__(self, other: "PureBraid") -> "PureBraid":
        if other.m != self.m:
            raise ValueError("strand count mismatch")
        return PureBraid(self.m, self.word + other.word)

    def inverse(self) -> "PureBraid":
        return PureBraid(self.m, tuple((i, j, -e) for i, j, e in reversed(self.word)))

    def sigma_word(self) -> tuple[tuple[int, int], ...]:
        """Expansion into elementary braid letters (k, ±1)."""
        out: list[tuple[int, int]] = []
        for i, j, e in self.word:
            conj = [(k, 1) for k in range(j - 1, i, -1)]
            core = [(i, 1), (i, 1)]
            body = conj + core + [(k, -1) for k, _ in reversed(conj)]
            if e == -1:
                body = [(k, -s) for k, s in reversed(body)]
            out.extend(body)
        return tuple(out)


def _sigma_apply(k: int, exp: int, w: FreeWord) -> FreeWord:
    """Substitute one elementary braid's action into every letter."""
    xk = FreeWord((k,))
    xk1 = FreeWord((k + 1,))
    if exp == 1:
        images = {k: FreeWord((k, k + 1, -k)), k + 1: xk}
    else:
        images = {k: xk1, k + 1: FreeWord((-(k + 1), k, k + 1))}
    out: list[int] = []
    for a in w.letters:
        img = images.get(abs(a))
        if img is None:
            out.append(a)
        else:
            out.extend(img.letters if a > 0 else img.inverse().letters)
    return FreeWord(out)


def artin_apply(b: PureBraid, w: FreeWord) -> FreeWord:
    """Image of w under the braid's automorphism: sigma_k sends
    x_k to x_k x_{k+1} x_k^-1 and x_{k+1} to x_k; letters of the braid
    word act left to right."""
    for a in w.letters:
        if abs(a) > b.m:
            raise ValueError("generator index exceeds strand count")
    for k, e in b.sigma_word():
        w = _sigma_apply(k, e, w)
    return w


@lru_cache(maxsize=256)
def longitudes(b: PureBraid) -> tuple[FreeWord, ...]:
    """The longitude of each strand: the unique word lam_i with
    artin_apply(b, x_i) = lam_i x_i lam_i^-1, normalized to zero total
    x_i-exponent."""
    out = []
    for i in range(1, b.m + 1):
        w = artin_apply(b, FreeWord((i,)))
        peel: list[int] = []
        while w.letters != (i,):
            if len(w.letters) < 3 or w.letters[0] != -w.letters[-1]:
                raise ValueError(f"image of x{i} is not a conjugate of x{i}")
            peel.append(w.letters[0])
            w = FreeWord(w.letters[1:-1])
        lam = FreeWord(peel)
        e = lam.exponent_sum(i)
        if e:
            lam = lam * FreeWord.generator(i, -e)
        out.append(lam)
    return tuple(out)


class NCSeries:
    """Power series in noncommuting variables t_1..t_m truncated at
    total degree N; keys are index tuples, values integers."""

    __slots__ = ("N", "terms")

    def __init__(self, N: int, terms: dict[tuple[int, ...], int] | None = None):
        self.N = N
        self.terms = {k: v for k, v in (terms or {}).items() if v and len(k) <= N}

    @classmethod
    def one(cls, N: int) -> "NCSeries":
        return cls(N, {(): 1})

    def __mul__(self, other: "NCSeries") -> "NCSeries":
        N = min(self.N, other.N)
        out: dict[tuple[int, ...], int] = {}
        for ka, va in self.terms.items():
            room = N - len(ka)
            if room < 0:
                continue
            for kb, vb in other.terms.items():
                if len(kb) > room:
                    continue
                key = ka + kb
                out[key] = out.get(key, 0) + va * vb
        return NCSeries(N, out)

    def coefficient(self, mono: tuple[int, ...]) -> int:
        return self.terms.get(tuple(mono), 0)

    def __eq__(self, other):
        return (
            isinstance(other, NCSeries)
            and self.N == other.N
            and self.terms == other.terms
        )

    def __repr__(self):
        return f"NCSeries(N={self.N}, {len(self.terms)} terms)"


def _generator_series(i: int, N: int) -> NCSeries:
    return NCSeries(N, {(): 1, (i,): 1})


def _inverse_series(i: int, N: int) -> NCSeries:
    terms = {(i,) * d: (-1) ** d for d in range(N + 1)}
    return NCSeries(N, terms)


def magnus(w: FreeWord, N: int) -> NCSeries:
    """Truncated Magnus expansion: x_i maps to 1 + t_i and its inverse
    to the alternating geometric series."""
    if N < 1:
        raise ValueError("truncation degree must be >= 1")
    acc = NCSeries.one(N)
    for a in w.letters:
        factor = _generator_series(a, N) if a > 0 else _inverse_series(-a, N)
        acc = acc * factor
    return acc


def mu(b: PureBraid, indices: tuple[int, ...]) -> int:
    """Milnor invariant mu(i_1 .. i_r; j): the coefficient of
    t_{i_1}...t_{i_r} in the Magnus expansion of strand j's longitude.
    Indices must be pairwise distinct."""
    indices = tuple(indices)
    if len(indices) < 2:
        raise ValueError("need at least two indices")
    if len(set(indices)) != len(indices):
        raise ValueError("repeated index: only distinct-index invariants are defined")
    for i in indices:
        if not 1 <= i <= b.m:
            raise ValueError(f"index {i} out of range")
    *prefix, j = indices
    lam = longitudes(b)[j - 1]
    return magnus(lam, len(prefix)).coefficient(tuple(prefix))


# ---------------------------------------------------------------------------
# weight systems on chord diagrams


def _chords_of(
    gamma,
) -> tuple[int, list[tuple[int, int]], list[list[int]], list[tuple[int, int]]]:
    """Extract (m, chords as (i, j) strand pairs 1-based, per-segment
    chord orderings, chord endpoint vertex pairs) from a chord diagram."""
    d = diagram_from_key(gamma) if isinstance(gamma, CanonicalKey) else gamma
    if not isinstance(d, Diagram):
        raise TypeError("expected a Diagram or CanonicalKey")
    if d.free_vertices:
        raise ValueError("chord diagram required (no free vertices)")
    seg_of = {}
    for s, seg in enumerate(d.seg_vertices):
        for p, v in enumerate(seg):
            seg_of[v] = (s, p)
    chords = []
    for a, b in d.edges:
        sa, sb = seg_of[a][0], seg_of[b][0]
        lo, hi = min(sa, sb) + 1, max(sa, sb) + 1
        chords.append((lo, hi))
    per_segment = []
    for s, seg in enumerate(d.seg_vertices):
        order = []
        for v in seg:
            for ci, (a, b) in enumerate(d.edges):
                if v in (a, b):
                    order.append(ci)
        per_segment.append(order)
    return d.m, chords, per_segment, [tuple(e) for e in d.edges]


def _inversion_parity(seq: list[int]) -> int:
    """+1 or -1 according to the inversion count of a sequence of
    distinct integers."""
    inv = sum(
        1
        for i in range(len(seq))
        for j in range(i + 1, len(seq))
        if seq[i] > seq[j]
    )
    return -1 if inv % 2 else 1


def _default_interleaving(n_chords: int, per_segment: list[list[int]]) -> list[int]:
    """Topological order respecting every segment's chord sequence,
    smallest chord index first; falls back to that index order if the
    constraints are cyclic (two chords joining the same segment pair in
    crossed positions admit no braid-compatible order)."""
    succ: dict[int, set[int]] = {c: set() for c in range(n_chords)}
    indeg = {c: 0 for c in range(n_chords)}
    for order in per_segment:
        for a, b in zip(order, order[1:]):
            if b not in succ[a]:
                succ[a].add(b)
                indeg[b] += 1
    heap = [c for c in range(n_chords) if indeg[c] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        c = heapq.heappop(heap)
        out.append(c)
        for d in sorted(succ[c]):
            indeg[d] -= 1
            if indeg[d] == 0:
                heapq.heappush(heap, d)
    if len(out) != n_chords:
        return list(range(n_chords))
    return out


def weight_on_chord_diagram(
    invariant: tuple[int, ...],
    gamma,
    interleaving: list[int] | None = None,
) -> int:
    """Pair a Milnor invariant with a chord diagram: realize each chord
    as a band generator insertion, ordered by the interleaving, and
    take the alternating sum of the invariant over all 2^n resolutions
    (chord present or absent).

    The result is reported in the diagram's own vertex-order orientation.
    The braid realization implicitly renumbers vertices chord by chord
    (each letter contributes its two endpoints in strand order), so the
    alternating sum is multiplied by the parity of that relabeling; this
    is what makes the values land in the same coordinates as the cocycle
    solver instead of merely agreeing up to a per-diagram sign.
    """
    m, chords, per_segment, endpoints = _chords_of(gamma)
    n = len(chords)
    invariant = tuple(invariant)
    if len(invariant) - 1 < n:
        raise ValueError(
            "invariant type below diagram order: value would depend on the resolution"
        )
    if interleaving is None:
        order = _default_interleaving(n, per_segment)
    else:
        order = list(interleaving)
        if sorted(order) != list(range(n)):
            raise ValueError("interleaving must be a permutation of the chord indices")
    total = 0
    for mask in itertools.product((0, 1), repeat=n):
        word = tuple(
            (chords[c][0], chords[c][1], 1) for c in order if mask[c]
        )
        value = mu(PureBraid(m, word), invariant)
        total += (-1) ** (n - sum(mask)) * value
    relabel = [v for c in order for v in endpoints[c]]
    return total * _inversion_parity(relabel)
