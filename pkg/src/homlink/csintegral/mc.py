"""Monte Carlo evaluation of configuration space integrals.

The fiber over a trivalent diagram is coordinatized by one real
parameter per segment vertex (position along its strand) and three per
free vertex.  Each edge contributes the unit-area spherical form pulled
back along its direction map; on the trivalent stratum the product is a
top form, evaluated as a determinant of frame projections.

Sampling: strand parameters are standard Cauchy draws sorted within
each strand (arctangent substitution), mixed with one banded component
per chord direction that places an endpoint's height Cauchy-close to
its partner's height (the integrand concentrates where chord endpoints
are at comparable heights, and the determinant is largest there); each
free vertex is drawn from a mixture of isotropic r^-2 (r^2 + s^2)^-1
radial densities centered on its already-placed neighbor vertices,
which cancels the integrand's 1/r^2 collision singularity so the
estimator has finite variance.  Sorting same-strand parameters under a
non-exchangeable proposal is accounted for by summing the density over
slice permutations.  All geometry is evaluated in coordinates centered
exactly (rational arithmetic) on the bounding box, which makes
estimates bit-for-bit translation invariant whenever the translation
is exact in floating point.

A counter-based generator keyed by (seed, block index) makes results
independent of thread count; the integrand kernel exists twice, as a
compiled extension and as a vectorized fallback, selected at import and
kept bit-for-bit identical.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..diagrams import CanonicalKey, Diagram, diagram_from_key, validate
from ..dgalgebra import defect
from .polylink import PolyLink

BLOCK = 65536
_FOURPI = 4.0 * math.pi
_TWO_PI2 = 2.0 * math.pi * math.pi


def _load_backend():
    if os.environ.get("HOMLINK_PURE"):
        from . import _gauss_py

        return _gauss_py, "python"
    try:
        from . import _gauss_cy

        return _gauss_cy, "cython"
    except ImportError:
        from . import _gauss_py

        return _gauss_py, "python"


_KERNEL, _BACKEND_NAME = _load_backend()


def kernel_backend() -> str:
    """Which integrand kernel is active: 'cython' or 'python'."""
    return _BACKEND_NAME


def _kernel_module(backend: str | None):
    if backend is None:
        return _KERNEL
    if backend == "python":
        from . import _gauss_py

        return _gauss_py
    if backend == "cython":
        from . import _gauss_cy

        return _gauss_cy
    raise ValueError(f"unknown backend {backend!r}")


@dataclass(frozen=True)
class IntegralEstimate:
    value: float
    std_error: float
    samples: int
    seed: int

    def __add__(self, other: "IntegralEstimate") -> "IntegralEstimate":
        if other == 0:
            return self
        return IntegralEstimate(
            self.value + other.value,
            math.sqrt(self.std_error**2 + other.std_error**2),
            min(self.samples, other.samples),
            self.seed,
        )

    __radd__ = __add__

    def scaled(self, c: float) -> "IntegralEstimate":
        return IntegralEstimate(c * self.value, abs(c) * self.std_error, self.samples, self.seed)

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "stderr": self.std_error,
            "samples": self.samples,
            "seed": self.seed,
        }


def edge_form_factor(tail, head):
    """Density of the unit-area spherical form for one edge, with the
    direction sample; coincident points get weight zero."""
    dx = (head[0] - tail[0], head[1] - tail[1], head[2] - tail[2])
    r2 = (dx[0] * dx[0] + dx[1] * dx[1]) + dx[2] * dx[2]
    if r2 == 0.0:
        return 0.0, (0.0, 0.0, 0.0)
    r = math.sqrt(r2)
    return 1.0 / (_FOURPI * r2), (dx[0] / r, dx[1] / r, dx[2] / r)


# ---------------------------------------------------------------------------
# geometry packing


class _Pack:
    def __init__(self, d: Diagram, link: PolyLink):
        bad = validate(d)
        if bad:
            raise ValueError(f"invalid diagram: {','.join(bad)}")
        if defect(d) != 0:
            raise ValueError("diagram is not trivalent")
        if d.m > link.m:
            raise ValueError("diagram uses more segments than the link has strands")

        exact = [
            [tuple(Fraction(c) for c in p) for p in s.points] for s in link.strands
        ]
        los = [min(p[c] for pts in exact for p in pts) for c in range(3)]
        his = [max(p[c] for pts in exact for p in pts) for c in range(3)]
        center = [(lo + hi) / 2 for lo, hi in zip(los, his)]
        half = [float(hi - lo) / 2.0 for lo, hi in zip(los, his)]
        diag = math.sqrt(half[0] ** 2 + half[1] ** 2 + half[2] ** 2)
        self.s_scale = max(1.0, diag)
        # radial scale of the neighbor-centered components: the nearest
        # approach between distinct strands, i.e. the shortest an edge
        # can get. The heavy radial tail still reaches the whole box.
        near = diag
        for a in range(link.m):
            pa = np.array([[float(c) for c in p] for p in exact[a]])
            for b in range(a + 1, link.m):
                pb = np.array([[float(c) for c in p] for p in exact[b]])
                gap = np.sqrt(
                    ((pa.reshape(-1, 1, 3) - pb.reshape(1, -1, 3)) ** 2).sum(axis=2)
                ).min()
                near = min(near, float(gap))
        self.s_near = max(near, 1e-9)

        max_pts = max(len(pts) for pts in exact)
        mS = link.m
        self.points = np.zeros((mS, max_pts, 3), dtype=np.float64)
        self.nseg = np.zeros(mS, dtype=np.int64)
        self.dirin = np.zeros((mS, 3), dtype=np.float64)
        self.dirout = np.zeros((mS, 3), dtype=np.float64)
        for s, pts in enumerate(exact):
            for j, p in enumerate(pts):
                for c in range(3):
                    self.points[s, j, c] = float(p[c] - center[c])
            self.nseg[s] = len(pts) - 1
            self.dirin[s] = link.strands[s].dir_in
            self.dirout[s] = link.strands[s].dir_out

        col_of: dict[int, int] = {}
        col_strand = []
        self.slices = []
        off = 0
        for s, seg in enumerate(d.seg_vertices):
            for p, v in enumerate(seg):
                col_of[v] = off + p
                col_strand.append(s)
            if seg:
                self.slices.append((off, off + len(seg)))
            off += len(seg)
        self.Q = off
        self.T = len(d.free_vertices)
        free_of = {v: f for f, v in enumerate(d.free_vertices)}
        self.col_strand = np.array(col_strand, dtype=np.int64)

        E = len(d.edges)
        self.e_tail_kind = np.zeros(E, dtype=np.int64)
        self.e_tail_idx = np.zeros(E, dtype=np.int64)
        self.e_head_kind = np.zeros(E, dtype=np.int64)
        self.e_head_idx = np.zeros(E, dtype=np.int64)
        for e, (t, h) in enumerate(d.edges):
            self.e_tail_kind[e] = 1 if t in free_of else 0
            self.e_tail_idx[e] = free_of.get(t, col_of.get(t, -1))
            self.e_head_kind[e] = 1 if h in free_of else 0
            self.e_head_idx[e] = free_of.get(h, col_of.get(h, -1))
        self.E = E
        self.W = self.Q + 3 * self.T
        if 2 * E != self.W:
            raise ValueError("diagram is not trivalent")

        # proposal structure: each free vertex is drawn from a mixture of
        # densities centered on its already-placed neighbors, which cancels
        # the 1/r^2 edge singularity at collisions (else the estimator has
        # infinite variance).  Order the free vertices so every one has at
        # least one placed neighbor when its turn comes.
        nbrs: list[list[tuple[int, int]]] = [[] for _ in range(self.T)]
        for e, (t, h) in enumerate(d.edges):
            if t in free_of and h in free_of:
                nbrs[free_of[t]].append((1, free_of[h]))
                nbrs[free_of[h]].append((1, free_of[t]))
            elif t in free_of:
                nbrs[free_of[t]].append((0, col_of[h]))
            elif h in free_of:
                nbrs[free_of[h]].append((0, col_of[t]))
        placed: set[int] = set()
        self.free_order: list[int] = []
        self.free_centers: list[list[tuple[int, int]]] = [[] for _ in range(self.T)]
        while len(self.free_order) < self.T:
            progress = False
            for f in range(self.T):
                if f in placed:
                    continue
                ready = [
                    (k, i) for k, i in nbrs[f] if k == 0 or i in placed
                ]
                if ready or not nbrs[f]:
                    self.free_order.append(f)
                    self.free_centers[f] = ready
                    placed.add(f)
                    progress = True
            if not progress:  # free-free cycle: fall back to box centers
                for f in range(self.T):
                    if f not in placed:
                        self.free_order.append(f)
                        placed.add(f)

        # banded chord proposal: for a chord between strand vertices the
        # integrand peaks where the endpoint heights agree (there the
        # frame rows pick up the full vertical tangent), so mix in one
        # component per chord direction that draws an endpoint's height
        # Cauchy-close to its partner's.  Heights are taken through a
        # fixed per-strand piecewise-affine chart (body affine between
        # the endpoint heights, tails at the tail-direction rate); the
        # chart only shapes the proposal, so it never biases the
        # estimate.  Scale = nearest breakpoint distance of the strand
        # pair, the width over which 1/r^2 stays near its peak.
        self.zchart = np.zeros((mS, 5), dtype=np.float64)  # zlo, zhi, G, gin, gout
        chart_ok = []
        for s in range(mS):
            k = int(self.nseg[s])
            zlo = self.points[s, 0, 2]
            zhi = self.points[s, k, 2]
            gin = self.dirin[s, 2]
            gout = self.dirout[s, 2]
            self.zchart[s] = (zlo, zhi, (zhi - zlo) / 2.0, gin, gout)
            chart_ok.append(zhi > zlo and gin > 0.0 and gout > 0.0)

        n_perms = 1
        for seg in d.seg_vertices:
            n_perms *= math.factorial(len(seg))

        def pair_gap(sa: int, sb: int) -> float:
            ka, kb = int(self.nseg[sa]), int(self.nseg[sb])
            pa = self.points[sa, : ka + 1].reshape(-1, 1, 3)
            pb = self.points[sb, : kb + 1].reshape(1, -1, 3)
            return float(np.sqrt(((pa - pb) ** 2).sum(axis=2).min()))

        def bandable(ci: int, cj: int) -> float | None:
            sa, sb = int(col_strand[ci]), int(col_strand[cj])
            if sa == sb or not (chart_ok[sa] and chart_ok[sb]):
                return None
            w = pair_gap(sa, sb)
            return w if w > 0.0 else None

        chords: list[tuple[int, int, float]] = []
        groups: list[list[int]] = []  # strand cols adjacent to one free vertex
        if n_perms <= 24:
            for t, h in d.edges:
                if t in free_of or h in free_of:
                    continue
                # unordered: sampling must not depend on edge direction,
                # or reversal would break exact sign flips at fixed seed
                ci, cj = sorted((col_of[t], col_of[h]))
                w = bandable(ci, cj)
                if w is not None:
                    chords.append((ci, cj, w))
            chords.sort()
            for f, v in enumerate(d.free_vertices):
                ns = sorted(
                    col_of[t if h == v else h]
                    for t, h in d.edges
                    if (h == v and t in col_of) or (t == v and h in col_of)
                )
                if len(ns) >= 2:
                    groups.append(ns)
        # one component per chord direction and per co-neighbor pair
        # (strand columns tied to a common free vertex), plus compound
        # components that align several at once: the integrand is
        # largest when every edge is height-aligned, and aligning one
        # does not make the others likely.  Each component comes in two
        # anchor flavors: anchors drawn uniformly on the body (covers
        # the aligned bulk) and anchors left Cauchy (covers aligned
        # pairs far out on the tails, where the integrand-over-density
        # plateaus at a constant and needs the extra coverage).
        self.bcomps: list[tuple[list[int], list[tuple[int, int, float]]]] = []
        seen: set[tuple] = set()

        def add(pairs: list[tuple[int, int, float]]):
            key = tuple(pairs)
            if key in seen:
                return
            seen.add(key)
            moved = {p[0] for p in pairs}
            anchors = sorted({p[1] for p in pairs} - moved)
            self.bcomps.append((anchors, pairs))
            if anchors:
                self.bcomps.append(([], pairs))

        for ci, cj, w in chords:
            add([(ci, cj, w)])
            add([(cj, ci, w)])
        for a in range(len(chords)):
            ia, ja, wa = chords[a]
            for b in range(a + 1, len(chords)):
                ib, jb, wb = chords[b]
                for pa_ in ((ia, ja, wa), (ja, ia, wa)):
                    for pb_ in ((ib, jb, wb), (jb, ib, wb)):
                        add([pa_, pb_])
        for ns in groups:
            for j in ns:
                comp = []
                for i in ns:
                    if i == j:
                        continue
                    w = bandable(i, j)
                    if w is not None:
                        comp.append((i, j, w))
                for one in comp:
                    add([one])
                if len(comp) >= 2:
                    add(comp)
        self.pi0 = 0.5 if self.bcomps else 1.0
        self.pic = (1.0 - self.pi0) / len(self.bcomps) if self.bcomps else 0.0

        import itertools

        self.perms: list[np.ndarray] = []
        if self.bcomps:
            slots = [list(itertools.permutations(range(st, sp))) for st, sp in self.slices]
            for combo in itertools.product(*slots):
                sigma = np.arange(self.Q, dtype=np.int64)
                for (st, sp), block in zip(self.slices, combo):
                    sigma[st:sp] = block
                self.perms.append(sigma)
        self.n_perms = n_perms
        self.const = float(d.sign)


def _chart_z(pack: _Pack, s: int, t):
    zlo, zhi, G, gin, gout = pack.zchart[s]
    return np.where(
        t < -1.0,
        zlo + (t + 1.0) * gin,
        np.where(t > 1.0, zhi + (t - 1.0) * gout, zlo + (t + 1.0) * G),
    )


def _chart_t(pack: _Pack, s: int, z):
    zlo, zhi, G, gin, gout = pack.zchart[s]
    return np.where(
        z < zlo,
        -1.0 + (z - zlo) / gin,
        np.where(z > zhi, 1.0 + (z - zhi) / gout, -1.0 + (z - zlo) / G),
    )


def _chart_jac(pack: _Pack, s: int, t):
    zlo, zhi, G, gin, gout = pack.zchart[s]
    return np.where(t < -1.0, gin, np.where(t > 1.0, gout, G))


def _sample_block(pack: _Pack, seed: int, block: int):
    key = np.array([seed & (2**64 - 1), block], dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key))
    u = gen.random((BLOCK, 1 + pack.Q + 4 * pack.T), dtype=np.float64)

    weight = np.full(BLOCK, pack.const, dtype=np.float64)
    tvals = np.empty((BLOCK, pack.Q), dtype=np.float64)
    if pack.Q:
        raw = np.tan(np.pi * (u[:, 1 : 1 + pack.Q] - 0.5))
        tvals[:] = raw
        if pack.bcomps:
            pick = np.floor((u[:, 0] - pack.pi0) / pack.pic).astype(np.int64)
            np.minimum(pick, len(pack.bcomps) - 1, out=pick)
            for c, (anchors, pairs) in enumerate(pack.bcomps):
                mask = pick == c
                if not mask.any():
                    continue
                for ca in anchors:
                    tvals[mask, ca] = 2.0 * u[mask, 1 + ca] - 1.0
                for ci, cj, w in pairs:
                    sa = int(pack.col_strand[ci])
                    sb = int(pack.col_strand[cj])
                    zj = _chart_z(pack, sb, tvals[mask, cj])
                    tvals[mask, ci] = _chart_t(pack, sa, zj + w * raw[mask, ci])
        for st, sp in pack.slices:
            tvals[:, st:sp] = np.sort(tvals[:, st:sp], axis=1)
        p0inv = np.pi * (1.0 + tvals * tvals)
        prod_p0inv = np.ones(BLOCK, dtype=np.float64)
        for col in range(pack.Q):
            prod_p0inv = prod_p0inv * p0inv[:, col]
        if pack.bcomps:
            Z = np.empty_like(tvals)
            J = np.empty_like(tvals)
            for col in range(pack.Q):
                s = int(pack.col_strand[col])
                Z[:, col] = _chart_z(pack, s, tvals[:, col])
                J[:, col] = _chart_jac(pack, s, tvals[:, col])
            dens = np.zeros(BLOCK, dtype=np.float64)
            for sigma in pack.perms:
                part = np.full(BLOCK, pack.pi0, dtype=np.float64)
                for anchors, pairs in pack.bcomps:
                    ratio = np.full(BLOCK, pack.pic, dtype=np.float64)
                    for ca in anchors:
                        aa = int(sigma[ca])
                        ta = tvals[:, aa]
                        body = np.abs(ta) <= 1.0
                        ratio = ratio * np.where(body, 0.5 * p0inv[:, aa], 0.0)
                    for ci, cj, w in pairs:
                        ii = int(sigma[ci])
                        jj = int(sigma[cj])
                        dz = Z[:, ii] - Z[:, jj]
                        ce = (w / (np.pi * (w * w + dz * dz))) * J[:, ii]
                        ratio = ratio * (ce * p0inv[:, ii])
                    part = part + ratio
                dens = dens + part
            weight = weight * (prod_p0inv / dens)
        else:
            weight = weight * (prod_p0inv / pack.n_perms)

    free_pos = np.empty((BLOCK, pack.T, 3), dtype=np.float64)
    if pack.T:
        from ._gauss_py import _positions

        spos, _ = _positions(
            tvals, pack.points, pack.nseg, pack.dirin, pack.dirout, pack.col_strand
        )
        s = pack.s_scale
        for f in pack.free_order:
            uc = u[:, 1 + pack.Q + 4 * f]
            u1 = u[:, 1 + pack.Q + 4 * f + 1]
            u2 = u[:, 1 + pack.Q + 4 * f + 2]
            u3 = u[:, 1 + pack.Q + 4 * f + 3]
            z = 2.0 * u1 - 1.0
            rho = np.sqrt(1.0 - z * z)
            phi = (2.0 * np.pi) * u2
            dirx = rho * np.cos(phi)
            diry = rho * np.sin(phi)
            centers = pack.free_centers[f]
            if not centers:
                R = s * np.tan((0.5 * np.pi) * u3)
                free_pos[:, f, 0] = R * dirx
                free_pos[:, f, 1] = R * diry
                free_pos[:, f, 2] = R * z
                a = R * R
                weight = weight * (((_TWO_PI2 * a) * (s * s + a)) / s)
                continue
            k = len(centers)
            sn = pack.s_near
            pick = np.minimum((uc * k).astype(np.int64), k - 1)
            ys = np.empty((k, BLOCK, 3), dtype=np.float64)
            for i, (kind, idx) in enumerate(centers):
                ys[i] = free_pos[:, idx] if kind else spos[:, idx]
            base = ys[pick, np.arange(BLOCK)]
            r = sn * np.tan((0.5 * np.pi) * u3)
            free_pos[:, f, 0] = base[:, 0] + r * dirx
            free_pos[:, f, 1] = base[:, 1] + r * diry
            free_pos[:, f, 2] = base[:, 2] + r * z
            # mixture density q(v) = (1/k) sum_i sn / (2 pi^2 ri^2 (ri^2+sn^2))
            dens = np.zeros(BLOCK, dtype=np.float64)
            for i in range(k):
                d = free_pos[:, f] - ys[i]
                r2 = d[:, 0] ** 2 + d[:, 1] ** 2 + d[:, 2] ** 2
                r2 = np.where(r2 == 0.0, np.inf, r2)
                dens = dens + sn / (_TWO_PI2 * r2 * (r2 + sn * sn))
            dens = dens / k
            weight = weight * np.where(dens > 0.0, 1.0 / dens, 0.0)

    return np.ascontiguousarray(tvals), np.ascontiguousarray(free_pos), weight


def _run_block(pack: _Pack, seed: int, block: int, kernel):
    tvals, free_pos, weight = _sample_block(pack, seed, block)
    vals = kernel.kernel_block(
        tvals,
        free_pos,
        pack.points,
        pack.nseg,
        pack.dirin,
        pack.dirout,
        pack.col_strand,
        pack.e_tail_kind,
        pack.e_tail_idx,
        pack.e_head_kind,
        pack.e_head_idx,
    )
    return vals * weight


def integrate_diagram(
    gamma,
    link: PolyLink,
    samples: int,
    seed: int,
    threads: int = 1,
    backend: str | None = None,
) -> IntegralEstimate:
    """Estimate the configuration space integral of one trivalent
    diagram (taken with its stored sign and edge directions) against a
    polyline link."""
    if isinstance(gamma, CanonicalKey):
        gamma = diagram_from_key(gamma)
    if samples < 2:
        raise ValueError("need at least two samples")
    pack = _Pack(gamma, link)
    kernel = _kernel_module(backend)
    n_blocks = (samples + BLOCK - 1) // BLOCK

    def one(block: int) -> tuple[float, float]:
        vals = _run_block(pack, seed, block, kernel)
        if block == n_blocks - 1:
            rem = samples - block * BLOCK
            vals = vals[:rem]
        lst = vals.tolist()
        return math.fsum(lst), math.fsum(v * v for v in lst)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(one, range(n_blocks)))
    else:
        parts = [one(b) for b in range(n_blocks)]

    s1 = math.fsum(p[0] for p in parts)
    s2 = math.fsum(p[1] for p in parts)
    mean = s1 / samples
    var = max(s2 - samples * mean * mean, 0.0) / (samples - 1)
    return IntegralEstimate(mean, math.sqrt(var / samples), samples, seed)


def integrate_cocycle(
    comb,
    link: PolyLink,
    samples: int,
    seed: int,
    threads: int = 1,
    backend: str | None = None,
) -> IntegralEstimate:
    """Coefficient-weighted sum of per-diagram estimates on a shared
    seed, so the estimate is exactly linear in the combination."""
    total = 0.0
    err2 = 0.0
    n = 0
    for key in sorted(comb):
        coeff = float(comb[key])
        est = integrate_diagram(key, link, samples, seed, threads, backend)
        total += coeff * est.value
        err2 += (coeff * est.std_error) ** 2
        n = est.samples
    return IntegralEstimate(total, math.sqrt(err2), n, seed)
