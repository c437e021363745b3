"""Exact sparse linear algebra over the rationals.

Every relation system in this package (STU, IHX, filtration selectors,
completion solves) reduces to ranks, kernels and affine solves of sparse
matrices with small integer entries.  All arithmetic here is exact:
coefficients are `fractions.Fraction`, elimination runs fraction-free on
integer rows with content removal to limit growth, and pivot choices are
deterministic, so identical inputs always produce identical bases.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

Rational = Fraction

Vector = tuple[Fraction, ...]


class RatMatrix:
    """Sparse rational matrix: entries stored as {(row, col): Fraction}."""

    def __init__(self, rows: int, cols: int, entries=None):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        self.rows = rows
        self.cols = cols
        self.entries: dict[tuple[int, int], Fraction] = {}
        if entries:
            for (r, c), v in entries.items():
                self[r, c] = v

    def __getitem__(self, rc):
        return self.entries.get(rc, Fraction(0))

    def __setitem__(self, rc, value):
        r, c = rc
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(rc)
        value = Fraction(value)
        if value:
            self.entries[rc] = value
        else:
            self.entries.pop(rc, None)

    @classmethod
    def from_rows(cls, row_dicts, cols: int) -> "RatMatrix":
        """Build from an iterable of {col: coeff} dicts."""
        row_dicts = list(row_dicts)
        m = cls(len(row_dicts), cols)
        for r, row in enumerate(row_dicts):
            for c, v in row.items():
                m[r, c] = v
        return m

    def row_dicts(self) -> list[dict[int, Fraction]]:
        out: list[dict[int, Fraction]] = [dict() for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def matvec(self, v: Vector) -> Vector:
        if len(v) != self.cols:
            raise ValueError("dimension mismatch")
        acc = [Fraction(0)] * self.rows
        for (r, c), a in self.entries.items():
            if v[c]:
                acc[r] += a * v[c]
        return tuple(acc)


def _int_rows(matrix: RatMatrix) -> list[dict[int, int]]:
    # Clear denominators row by row; scaling a row does not change
    # rank, kernel, or consistency.
    out = []
    for row in matrix.row_dicts():
        if not row:
            continue
        scale = 1
        for v in row.values():
            scale = scale * v.denominator // gcd(scale, v.denominator)
        out.append({c: int(v * scale) for c, v in row.items()})
    return out


def _remove_content(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


def _eliminate(int_rows: list[dict[int, int]]) -> list[dict[int, int]]:
    """Forward elimination, fraction-free.

    Returns pivot rows, each normalized to positive leading entry and no
    common content, sorted by pivot column.  Pivot selection is by
    (sparsest row, smallest |pivot|, insertion order): deterministic.
    """
    rows = [dict(r) for r in int_rows if r]
    pivots: dict[int, dict[int, int]] = {}
    while rows:
        col = min(min(r) for r in rows)
        cands = [(len(r), abs(r[col]), i) for i, r in enumerate(rows) if col in r]
        cands.sort()
        _, _, pi = cands[0]
        piv = rows.pop(pi)
        piv = _remove_content(piv)
        if piv[col] < 0:
            piv = {c: -v for c, v in piv.items()}
        pivots[col] = piv
        p = piv[col]
        nxt = []
        for r in rows:
            q = r.get(col)
            if q:
                new = {}
                for c in set(r) | set(piv):
                    v = p * r.get(c, 0) - q * piv.get(c, 0)
                    if v:
                        new[c] = v
                r = _remove_content(new)
            if r:
                nxt.append(r)
        rows = nxt
    return [pivots[c] for c in sorted(pivots)]


def _back_substitute(pivot_rows: list[dict[int, int]]) -> list[dict[int, Fraction]]:
    """Turn eliminated pivot rows into reduced row echelon form over Q."""
    rref: list[dict[int, Fraction]] = []
    pivot_cols = [min(r) for r in pivot_rows]
    for i in reversed(range(len(pivot_rows))):
        row = {c: Fraction(v) for c, v in pivot_rows[i].items()}
        lead = row[pivot_cols[i]]
        row = {c: v / lead for c, v in row.items()}
        for j, done in zip(range(i + 1, len(pivot_rows)), reversed(rref)):
            f = row.get(pivot_cols[j])
            if f:
                for c, v in done.items():
                    nv = row.get(c, Fraction(0)) - f * v
                    if nv:
                        row[c] = nv
                    else:
                        row.pop(c, None)
        rref.append(row)
    rref.reverse()
    return rref


class Subspace:
    """Subspace of Q^n held as a reduced-row-echelon basis.

    Pivot columns are strictly increasing and each basis vector has a
    leading 1 with zeros in every other vector's pivot column, so equal
    subspaces always compare equal.
    """

    def __init__(self, ambient_dim: int, basis: list[Vector]):
        self.ambient_dim = ambient_dim
        self.basis = list(basis)

    @classmethod
    def from_vectors(cls, ambient_dim: int, vectors) -> "Subspace":
        rows = []
        for v in vectors:
            if len(v) != ambient_dim:
                raise ValueError("vector length mismatch")
            rows.append({c: Fraction(x) for c, x in enumerate(v) if x})
        rref = _back_substitute(_eliminate(_int_rows(RatMatrix.from_rows(rows, ambient_dim))))
        basis = []
        for row in rref:
            vec = [Fraction(0)] * ambient_dim
            for c, x in row.items():
                vec[c] = x
            basis.append(tuple(vec))
        return cls(ambient_dim, basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def pivots(self) -> list[int]:
        return [next(i for i, x in enumerate(v) if x) for v in self.basis]

    def reduce(self, v: Vector) -> Vector:
        """Subtract the projection onto the basis, pivot by pivot."""
        if len(v) != self.ambient_dim:
            raise ValueError("vector length mismatch")
        w = list(v)
        for b in self.basis:
            p = next(i for i, x in enumerate(b) if x)
            f = w[p]
            if f:
                for i, x in enumerate(b):
                    if x:
                        w[i] -= f * x
        return tuple(w)

    def contains(self, v: Vector) -> bool:
        return not any(self.reduce(v))

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.ambient_dim == other.ambient_dim
            and self.basis == other.basis
        )

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def rank(m: RatMatrix) -> int:
    return len(_eliminate(_int_rows(m)))


def kernel_basis(m: RatMatrix) -> Subspace:
    """Basis of the right kernel {v : m v = 0} in echelon form."""
    rref = _back_substitute(_eliminate(_int_rows(m)))
    pivot_cols = [min(r) for r in rref]
    pivot_set = set(pivot_cols)
    free_cols = [c for c in range(m.cols) if c not in pivot_set]
    vectors = []
    for f in free_cols:
        vec = [Fraction(0)] * m.cols
        vec[f] = Fraction(1)
        for pc, row in zip(pivot_cols, rref):
            x = row.get(f)
            if x:
                vec[pc] = -x
        vectors.append(tuple(vec))
    return Subspace.from_vectors(m.cols, vectors)


def solve_affine(m: RatMatrix, b) -> tuple[Vector, Subspace] | None:
    """Particular solution of m x = b plus the homogeneous kernel.

    Returns None when the system is inconsistent.
    """
    b = [Fraction(x) for x in b]
    if len(b) != m.rows:
        raise ValueError("right-hand side length mismatch")
    aug = RatMatrix(m.rows, m.cols + 1)
    for rc, v in m.entries.items():
        aug[rc] = v
    for r, v in enumerate(b):
        aug[r, m.cols] = v
    rref = _back_substitute(_eliminate(_int_rows(aug)))
    pivot_cols = [min(r) for r in rref]
    if m.cols in pivot_cols:
        return None
    x = [Fraction(0)] * m.cols
    for pc, row in zip(pivot_cols, rref):
        # Free variables are 0, so only the constant column contributes.
        x[pc] = row.get(m.cols, Fraction(0))
    return tuple(x), kernel_basis(m)


def membership(s: Subspace, v) -> bool:
    v = tuple(Fraction(x) for x in v)
    return s.contains(v)
