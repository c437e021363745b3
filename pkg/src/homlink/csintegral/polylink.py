"""Piecewise-linear string links with affine tails.

Strands are polylines parameterized on [-1, 1] with uniformly spaced
breakpoints, extended outside by rays with a fixed direction per end.
Fixtures are built from pure-braid words on a dyadic grid so that all
coordinates are exactly representable doubles; the combinatorial
linking number is then computed in rational arithmetic with no rounding.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from ..milnor import PureBraid


@dataclass(frozen=True)
class Strand:
    points: tuple[tuple[float, float, float], ...]
    dir_in: tuple[float, float, float]
    dir_out: tuple[float, float, float]

    def __post_init__(self):
        if len(self.points) < 2:
            raise ValueError("strand needs at least two points")
        if all(c == 0 for c in self.dir_in) or all(c == 0 for c in self.dir_out):
            raise ValueError("tail direction must be nonzero")


@dataclass(frozen=True)
class PolyLink:
    strands: tuple[Strand, ...]

    @property
    def m(self) -> int:
        return len(self.strands)

    def __post_init__(self):
        dirs = []
        for s in self.strands:
            dirs.append(s.dir_in)
            dirs.append(s.dir_out)
        for i in range(len(dirs)):
            for j in range(i + 1, len(dirs)):
                if i // 2 == j // 2:
                    continue  # same strand may reuse its direction
                if _parallel_same_way(dirs[i], dirs[j]):
                    raise ValueError("tail directions must be pairwise distinct")
        if self.m > 1 and self.min_distance() == 0.0:
            raise ValueError("strands intersect")

    def min_distance(self, grid: int = 64) -> float:
        """Approximate minimum inter-strand distance, sampled on a
        parameter grid over the compact parts."""
        import math

        best = float("inf")
        polys = [s.points for s in self.strands]
        for a in range(len(polys)):
            for b in range(a + 1, len(polys)):
                for p in _resample(polys[a], grid):
                    for q in _resample(polys[b], grid):
                        d = math.dist(p, q)
                        if d < best:
                            best = d
        return 0.0 if best == float("inf") else best

    def to_json(self) -> dict:
        return {
            "strands": [
                {
                    "points": [list(p) for p in s.points],
                    "dirIn": list(s.dir_in),
                    "dirOut": list(s.dir_out),
                }
                for s in self.strands
            ]
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PolyLink":
        strands = tuple(
            Strand(
                tuple(tuple(float(c) for c in p) for p in s["points"]),
                tuple(float(c) for c in s["dirIn"]),
                tuple(float(c) for c in s["dirOut"]),
            )
            for s in obj["strands"]
        )
        return cls(strands)

    def dump(self, path: str):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)

    @classmethod
    def load(cls, path: str) -> "PolyLink":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def translated(self, offset) -> "PolyLink":
        ox, oy, oz = (float(c) for c in offset)
        return PolyLink(
            tuple(
                Strand(
                    tuple((p[0] + ox, p[1] + oy, p[2] + oz) for p in s.points),
                    s.dir_in,
                    s.dir_out,
                )
                for s in self.strands
            )
        )


def _parallel_same_way(u, v) -> bool:
    cx = u[1] * v[2] - u[2] * v[1]
    cy = u[2] * v[0] - u[0] * v[2]
    cz = u[0] * v[1] - u[1] * v[0]
    if (cx, cy, cz) != (0.0, 0.0, 0.0):
        return False
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2] > 0


def _resample(points, grid):
    n = len(points) - 1
    out = []
    for g in range(grid + 1):
        u = g * n / grid
        j = min(int(u), n - 1)
        f = u - j
        p, q = points[j], points[j + 1]
        out.append((p[0] + f * (q[0] - p[0]), p[1] + f * (q[1] - p[1]), p[2] + f * (q[2] - p[2])))
    return out


# ---------------------------------------------------------------------------
# braid fixtures
#
# Strand i runs near x = (current position), y = 0, z from -2K to 2K
# with one height-4 slab per crossing.  Two ratios control the Monte
# Carlo variance of integrals against the realization: clearance (no
# two strands come closer than about one lane spacing) and slope (no
# strand moves faster than about 2/3 lane per unit height; the
# integrand's determinant grows with the transverse speed).  In a
# crossing slab the under strand detours to y = 1 through two extra
# breakpoints so the single projected crossing happens mid-slab in
# segment interiors.
# Tail directions (0, i/16, 1) are vertical in the xz projection, so
# tails never contribute crossings, and distinct across strands.


def _next_pow2(n: int) -> int:
    k = 1
    while k < n:
        k *= 2
    return k


def from_braid(braid, m: int | None = None) -> PolyLink:
    """Geometric realization of a pure braid word (a PureBraid or the
    A(i,j) text form) as a string link on a dyadic grid."""
    if isinstance(braid, str):
        if m is None:
            raise ValueError("strand count required with a text braid word")
        braid = PureBraid.parse(braid, m)
    m = braid.m
    sigma = braid.sigma_word()
    L = max(len(sigma), 1)
    K = _next_pow2(L)
    ztop = 2.0 * K

    pos = list(range(1, m + 1))  # pos[p-1] = strand at position p (1-based strands)
    paths: list[list[tuple[float, float, float]]] = [
        [(float(i), 0.0, -ztop)] for i in range(1, m + 1)
    ]

    for step, (k, e) in enumerate(sigma):
        z0 = -ztop + 4.0 * step
        z1 = z0 + 4.0
        over_pos, under_pos = (k, k + 1) if e == 1 else (k + 1, k)
        over = pos[over_pos - 1]
        under = pos[under_pos - 1]
        xo, xu = float(over_pos), float(under_pos)
        if paths[over - 1][-1][2] < z0:
            paths[over - 1].append((xo, 0.0, z0))
        if paths[under - 1][-1][2] < z0:
            paths[under - 1].append((xu, 0.0, z0))
        # over strand: straight slab diagonal
        paths[over - 1].append((xu, 0.0, z1))
        # under strand: detour to y = 1
        paths[under - 1].append((xu + (xo - xu) * 0.25, 1.0, z0 + 1.5))
        paths[under - 1].append((xu + (xo - xu) * 0.75, 1.0, z0 + 2.5))
        paths[under - 1].append((xo, 0.0, z1))
        pos[k - 1], pos[k] = pos[k], pos[k - 1]
    if pos != list(range(1, m + 1)):
        raise ValueError("braid word is not pure")

    strands = []
    for i in range(1, m + 1):
        pts = paths[i - 1]
        if pts[-1][2] < ztop:
            pts.append((pts[-1][0], 0.0, ztop))
        # outgoing tail mirrors the incoming tilt through the z axis:
        # straight tails (dirIn == dirOut) make the four asymptotic
        # directions of any strand pair antipodally symmetric on S^2,
        # which shifts every pairwise Gauss integral by exactly 1/2;
        # mirrored tails pinch that boundary curve on a shared
        # equatorial point, leaving an O(tilt^2) remainder instead.
        strands.append(
            Strand(_uniformize(pts), (0.0, i / 16.0, 1.0), (0.0, -i / 16.0, 1.0))
        )
    return PolyLink(tuple(strands))


def _uniformize(pts):
    """Re-sample a polyline onto a uniform dyadic parameter grid fine
    enough to pass through every original breakpoint exactly."""
    zs = sorted({p[2] for p in pts})
    span = (zs[-1] - zs[0]) if len(zs) > 1 else 2.0
    gaps = [b - a for a, b in zip(zs, zs[1:])]
    step = min(gaps) if gaps else span
    # all z values are dyadic; choose a dyadic step dividing every gap
    k = 1
    while span / k > step or any(_not_multiple(g, span / k) for g in gaps):
        k *= 2
        if k > 1 << 20:
            raise ValueError("could not fit breakpoints on a dyadic grid")
    out = []
    for j in range(k + 1):
        z = zs[0] + j * (span / k)
        out.append(_eval_at_z(pts, z))
    return tuple(out)


def _not_multiple(gap: float, step: float) -> bool:
    q = gap / step
    return q != round(q)


def _eval_at_z(pts, z: float):
    if z <= pts[0][2]:
        return (pts[0][0], pts[0][1], z)
    for a, b in zip(pts, pts[1:]):
        if a[2] <= z <= b[2]:
            if a[2] == b[2]:
                continue
            f = (z - a[2]) / (b[2] - a[2])
            return (a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1]), z)
    return (pts[-1][0], pts[-1][1], z)


def split_link(m: int, separation: float = 64.0) -> PolyLink:
    """Far-separated straight strands; every connected integrand is
    concentrated where strands are near each other, so estimates on
    this link vanish."""
    strands = []
    for i in range(1, m + 1):
        x = i * separation
        # mirrored tails, as in from_braid
        strands.append(
            Strand(
                ((x, 0.0, -1.0), (x, 0.0, 1.0)),
                (0.0, i / 16.0, 1.0),
                (0.0, -i / 16.0, 1.0),
            )
        )
    return PolyLink(tuple(strands))


# ---------------------------------------------------------------------------
# exact linking number
#
# Crossing count in the projection along +y (viewer at y = -infinity,
# smaller y passes in front).  All arithmetic in Fraction, coordinates
# taken exactly from the stored doubles; degenerate projections are
# resolved by a deterministic rational shear.


class _Piece:
    __slots__ = ("p", "d", "hi")

    def __init__(self, p, d, hi):
        self.p = p  # base point (Fraction 3-vector)
        self.d = d  # direction (Fraction 3-vector)
        self.hi = hi  # parameter upper bound (Fraction) or None for a ray


def _pieces(strand: Strand) -> list[_Piece]:
    pts = [tuple(Fraction(c) for c in p) for p in strand.points]
    din = tuple(Fraction(c) for c in strand.dir_in)
    dout = tuple(Fraction(c) for c in strand.dir_out)
    out = [_Piece(pts[0], tuple(-c for c in din), None)]
    for a, b in zip(pts, pts[1:]):
        out.append(_Piece(a, tuple(y - x for x, y in zip(a, b)), Fraction(1)))
    out.append(_Piece(pts[-1], dout, None))
    return out


def _shear(pieces: list[_Piece], eps: Fraction) -> list[_Piece]:
    def sh(v):
        return (v[0] + eps * v[1], v[1], v[2] + eps * eps * v[1])

    return [_Piece(sh(q.p), sh(q.d), q.hi) for q in pieces]


def _collinear_forward(d1, d2) -> bool:
    # Same projected line, same direction: a subdivision point, not a corner.
    return d1[0] * d2[2] - d1[2] * d2[0] == 0 and d1[0] * d2[0] + d1[2] * d2[2] > 0


def _collinear_ranges_touch(A: _Piece, B: _Piece) -> bool:
    """Whether two pieces on the same projected line have intersecting
    parameter ranges (then the projection is degenerate; distinct
    strands sharing a line at disjoint heights are harmless)."""
    c = 0 if A.d[0] else 2
    i0 = (B.p[c] - A.p[c]) / A.d[c]
    step = B.d[c] / A.d[c]
    if B.hi is None:
        blo, bhi = (i0, None) if step > 0 else (None, i0)
    else:
        i1 = i0 + B.hi * step
        blo, bhi = (i0, i1) if i0 <= i1 else (i1, i0)
    alo, ahi = Fraction(0), A.hi
    lo = alo if blo is None else max(alo, blo)
    if ahi is None and bhi is None:
        return True
    hi = bhi if ahi is None else (ahi if bhi is None else min(ahi, bhi))
    return lo <= hi


def _endpoint_class(pieces: list[_Piece], idx: int, param):
    """Classify a crossing parameter on pieces[idx].

    "count": interior, or the start of a piece continuing its collinear
    predecessor (the canonical representative of a subdivision-vertex
    crossing).  "skip": the end of a piece with a collinear successor
    (counted there instead).  None: a genuine corner or a ray base, so
    the projection is not generic and the caller must shear.
    """
    q = pieces[idx]
    if q.hi is None:
        return None if param == 0 else "count"
    if param == 0:
        prev = pieces[idx - 1]
        if prev.hi is not None and _collinear_forward(prev.d, q.d):
            return "count"
        return None
    if param == q.hi:
        nxt = pieces[idx + 1]
        if nxt.hi is not None and _collinear_forward(q.d, nxt.d):
            return "skip"
        return None
    return "count"


def _crossings(pa: list[_Piece], pb: list[_Piece]):
    """Signed crossings between two strands' pieces in the xz
    projection, or None if the projection is degenerate.

    Crossings exactly at a collinear subdivision vertex are exact and
    counted once, via the piece starting there; only corners, ray
    bases, and overlapping collinear lines force a reprojection.
    """
    total = 0
    for ia, A in enumerate(pa):
        for ib, B in enumerate(pb):
            ax, az = A.d[0], A.d[2]
            bx, bz = B.d[0], B.d[2]
            den = ax * bz - az * bx
            rx = B.p[0] - A.p[0]
            rz = B.p[2] - A.p[2]
            if den == 0:
                if (
                    rx * bz - rz * bx == 0
                    and rx * az - rz * ax == 0
                    and _collinear_ranges_touch(A, B)
                ):
                    return None  # overlapping collinear projected pieces
                continue
            s = (rx * bz - rz * bx) / den
            t = (rx * az - rz * ax) / den
            in_a = s >= 0 if A.hi is None else 0 <= s <= A.hi
            in_b = t >= 0 if B.hi is None else 0 <= t <= B.hi
            if not (in_a and in_b):
                continue
            ca = _endpoint_class(pa, ia, s)
            cb = _endpoint_class(pb, ib, t)
            if ca is None or cb is None:
                return None
            if ca == "skip" or cb == "skip":
                continue
            ya = A.p[1] + s * A.d[1]
            yb = B.p[1] + t * B.d[1]
            if ya == yb:
                raise ValueError("strands intersect")
            over_d = (ax, az) if ya < yb else (bx, bz)
            under_d = (bx, bz) if ya < yb else (ax, az)
            sign = over_d[0] * under_d[1] - over_d[1] * under_d[0]
            total += 1 if sign > 0 else -1
    return total


def exact_linking(link: PolyLink, i: int, j: int) -> int:
    """Linking number of strands i and j (1-based): half the signed
    crossing count in a generic projection, computed exactly."""
    if not (1 <= i <= link.m and 1 <= j <= link.m) or i == j:
        raise ValueError("need two distinct strand indices in range")
    pa = _pieces(link.strands[i - 1])
    pb = _pieces(link.strands[j - 1])
    for attempt in range(9):
        if attempt == 0:
            qa, qb = pa, pb
        else:
            eps = Fraction(1, 2 ** (9 + attempt))
            qa, qb = _shear(pa, eps), _shear(pb, eps)
        try:
            total = _crossings(qa, qb)
        except ValueError:
            raise
        if total is not None:
            if total % 2:
                raise ValueError("odd crossing parity: tails cross in projection")
            return total // 2
    raise ValueError("no generic projection found after maximum shear attempts")
