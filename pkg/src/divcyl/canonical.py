"""Equivalence of point multisets under semilinear collineations.

The canonical form of a multiset is the lexicographically largest multiplicity
vector (indexed by point id) over the full collineation group of PG(v-1,q),
i.e. over all invertible matrices combined with field automorphisms.  Because
point ids sort by packed coordinate keys, ids below (q^j - 1)/(q - 1) are
exactly the points supported on the first j coordinates.  A collineation given
by a matrix B therefore produces its image vector segment by segment: segment
j (the points whose last nonzero coordinate is j-1) depends only on the first
j rows of B.  The search picks rows of B depth first, keeps branches whose
segment ties the best known vector, and prunes siblings that a discovered
automorphism maps onto each other.

Choosing the largest vector rather than the smallest makes the canonical
support sit on the smallest point ids, so for sets the canonical form agrees
with the lexicographically minimal sorted id tuple.  That is the orientation
the orderly-generation classifier wants.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .geometry import ProjectiveSpace, gf_rref, projective_space
from .gf import GF, make_field
from .pointsets import PointMultiset

MAX_POINTS = 400


class CanonicalError(ValueError):
    pass


def pgl_order(v: int, q: int) -> int:
    """Order of the group of projectivities of PG(v-1,q)."""
    total = 1
    for i in range(v):
        total *= q**v - q**i
    return total // (q - 1)


def pgammal_order(v: int, q: int, h: int) -> int:
    return h * pgl_order(v, q)


# ------------------------------------------------- small GF matrix helpers


def gf_matmul(field: GF, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of two uint8 matrices over the field."""
    ADD, MUL = field.ADD, field.MUL
    acc = np.zeros((a.shape[0], b.shape[1]), dtype=np.uint8)
    for t in range(a.shape[1]):
        acc = ADD[acc, MUL[a[:, t][:, None], b[t][None, :]]]
    return acc


def gf_matinv(field: GF, a: np.ndarray) -> np.ndarray:
    k = a.shape[0]
    aug = [tuple(int(c) for c in row) + tuple(int(i == j) for j in range(k))
           for i, row in enumerate(a)]
    red = gf_rref(field, aug, width=2 * k)
    if len(red) != k or any(red[i][i] != 1 for i in range(k)):
        raise CanonicalError("matrix is singular")
    return np.array([row[k:] for row in red], dtype=np.uint8)


# --------------------------------------------------------- canonical class


@dataclass(frozen=True)
class CanonicalClass:
    """Complete invariant: two multisets are equivalent iff these compare equal.

    aut_order is the number of semilinear transformations of the vector space
    (invertible matrix combined with a field automorphism) that fix the point
    multiset.  Scalar matrices act trivially on points, so this equals q-1
    times the collineation stabilizer order; for a set it also equals the
    number of semilinear monomial maps fixing the associated projective code,
    which is the count classification software usually reports.
    """

    q: int
    v: int
    vector: tuple[int, ...]
    aut_order: Optional[int] = dc_field(default=None, compare=False)

    @property
    def n(self) -> int:
        return sum(self.vector)

    def multiset(self, space: Optional[ProjectiveSpace] = None) -> PointMultiset:
        """The canonical representative, rebuilt in the default space if none given."""
        if space is None:
            space = projective_space(make_field(self.q), self.v)
        return PointMultiset(space, np.array(self.vector, dtype=np.int64))

    def __repr__(self):
        supp = [(i, c) for i, c in enumerate(self.vector) if c]
        aut = f", aut={self.aut_order}" if self.aut_order is not None else ""
        return f"CanonicalClass(q={self.q}, v={self.v}, support={supp}{aut})"


# ---------------------------------------------------------------- searcher


class _Searcher:
    """Depth-first lex-max search over projectivities of one space."""

    def __init__(self, space: ProjectiveSpace):
        self.sp = space
        self.v = space.v
        self.q = space.q
        self.nvec = space.q**space.v
        self.qpow = space.qpow
        self.unpack = space.unpack  # (q^v, v) uint8, row i = vector with key i
        self.vec2pid = space.vec2pid
        self.ADD = space.field.ADD
        self.MUL = space.field.MUL
        self.point_keys = space.pts.astype(np.int64) @ space.qpow
        # segment d holds the points whose last nonzero coordinate is d,
        # in id order; their image under B is (first d coords)·B[:d] plus
        # (coordinate d)·B[d], and that last coordinate is not 1 in general
        from .geometry import bracket
        self.seg_pts = []
        self.seg_last = []
        for d in range(space.v):
            block = space.pts[bracket(d, space.q):bracket(d + 1, space.q)]
            self.seg_pts.append(np.ascontiguousarray(block[:, :d]))
            self.seg_last.append(np.ascontiguousarray(block[:, d]))

    # -- plumbing ---------------------------------------------------------

    def keys_of(self, rows: np.ndarray) -> np.ndarray:
        return rows.astype(np.int64) @ self.qpow

    def vec_perm(self, a: np.ndarray) -> np.ndarray:
        """Permutation of packed keys induced by right multiplication with a."""
        imgs = gf_matmul(self.sp.field, self.unpack, a)
        return self.keys_of(imgs)

    def segments(self, rows: list, depth: int, cand_keys: np.ndarray,
                 counts: np.ndarray) -> np.ndarray:
        """Image segment vectors, one row per candidate next row of B.

        Row c of the result lists, in id order, the multiplicities at the
        images of the segment-`depth` points when B's next row is candidate
        c: image_t = (prefix coords of point t)·B[:depth] + c_t·candidate.
        """
        lastco = self.seg_last[depth]
        if depth:
            pre = gf_matmul(self.sp.field, self.seg_pts[depth],
                            np.array(rows, dtype=np.uint8))
        else:
            pre = np.zeros((1, self.v), dtype=np.uint8)
        L = lastco.shape[0]
        C = cand_keys.shape[0]
        out = np.empty((C, L), dtype=np.int64)
        step = max(1, 2**22 // max(1, L * self.v))
        cand_vecs = self.unpack[cand_keys]
        for lo in range(0, C, step):
            chunk = cand_vecs[lo:lo + step]
            scaled = self.MUL[lastco[None, :, None], chunk[:, None, :]]
            imgs = self.ADD[pre[None, :, :], scaled]
            keys = imgs.astype(np.int64) @ self.qpow
            out[lo:lo + step] = counts[self.vec2pid[keys]]
        return out

    @staticmethod
    def lexmax_rows(segs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """The lex-largest row and the mask of rows equal to it."""
        alive = np.ones(segs.shape[0], dtype=bool)
        for col in range(segs.shape[1]):
            m = segs[alive, col].max()
            alive &= segs[:, col] == m
            if alive.sum() == 1:
                break
        best = segs[int(np.flatnonzero(alive)[0])]
        if alive.sum() > 1:
            alive = np.all(segs == best[None, :], axis=1)
        return best, alive

    @staticmethod
    def compare_rows(segs: np.ndarray, target: np.ndarray):
        """Masks of rows lex-greater than / equal to the target vector."""
        diff = segs - target[None, :]
        nz = diff != 0
        anydiff = nz.any(axis=1)
        first = nz.argmax(axis=1)
        firstval = diff[np.arange(segs.shape[0]), first]
        greater = anydiff & (firstval > 0)
        return greater, ~anydiff

    def grow_combos(self, combos: np.ndarray, row: np.ndarray) -> np.ndarray:
        blocks = [self.ADD[combos, self.MUL[lam, row][None, :]]
                  for lam in range(self.q)]
        return np.concatenate(blocks, axis=0)

    def candidates(self, depth: int, span_keys: np.ndarray) -> np.ndarray:
        if depth == 0:
            return self.point_keys
        mask = np.ones(self.nvec, dtype=bool)
        mask[span_keys] = False
        mask[0] = False
        return np.flatnonzero(mask)

    def complete_rows(self, rows: list) -> np.ndarray:
        """Extend a partial row list to a full invertible matrix."""
        out = list(rows)
        combos = np.zeros((1, self.v), dtype=np.uint8)
        for row in out:
            combos = self.grow_combos(combos, row)
        while len(out) < self.v:
            mask = np.ones(self.nvec, dtype=bool)
            mask[self.keys_of(combos)] = False
            key = int(np.flatnonzero(mask)[0])
            row = self.unpack[key]
            out.append(row)
            combos = self.grow_combos(combos, row)
        return np.array(out, dtype=np.uint8)

    # -- automorphism bookkeeping -----------------------------------------

    @staticmethod
    def _fixing(auts: list, prefix_keys: np.ndarray) -> list:
        return [perm for perm in auts
                if np.array_equal(perm[prefix_keys], prefix_keys)]

    def _register_aut(self, ctx: dict, mat: np.ndarray):
        key = mat.tobytes()
        if key in ctx["aut_keys"]:
            return
        ctx["aut_keys"].add(key)
        ctx["auts"].append(self.vec_perm(mat))

    def _leaf(self, ctx: dict, rows: list):
        mat = self.complete_rows(rows)
        if ctx["anchor"] is None:
            ctx["anchor"] = mat
            ctx["anchor_inv"] = gf_matinv(self.sp.field, mat)
        else:
            self._register_aut(ctx, gf_matmul(self.sp.field, ctx["anchor_inv"], mat))

    def _orbit_of(self, key: int, perms: list, index: dict) -> list[int]:
        """Indices (into the tied-key list) of the orbit through one key."""
        seen = {index[key]}
        stack = [key]
        while stack:
            cur = stack.pop()
            for perm in perms:
                nxt = int(perm[cur])
                j = index.get(nxt)
                if j is not None and j not in seen:
                    seen.add(j)
                    stack.append(nxt)
        return sorted(seen)

    def _prefix_keys(self, rows: list) -> np.ndarray:
        if not rows:
            return np.empty(0, dtype=np.int64)
        return self.keys_of(np.array(rows, dtype=np.uint8))

    # -- lex-max over all projectivities ----------------------------------

    def max_vector(self, counts: np.ndarray) -> np.ndarray:
        n = int(counts.sum())
        best = np.full(self.sp.num_points, -1, dtype=np.int64)
        ctx = {"auts": [], "aut_keys": set(), "anchor": None}
        self._max_rec(counts, n, 0, [], np.zeros((1, self.v), dtype=np.uint8),
                      best, 0, ctx)
        return best

    def _max_rec(self, counts, n, depth, rows, combos, best, offset, ctx):
        if depth == self.v:
            self._leaf(ctx, rows)
            return
        if offset > 0 and int(best[:offset].sum()) == n:
            # all multiplicity placed: the rest of the vector is zero
            # whatever rows follow, and every completion is a tie
            best[offset:] = 0
            self._leaf(ctx, rows)
            return
        width = self.q**depth
        cands = self.candidates(depth, self.keys_of(combos))
        segs = self.segments(rows, depth, cands, counts)
        seg_best, tied = self.lexmax_rows(segs)
        delta = seg_best - best[offset:offset + width]
        nzd = np.flatnonzero(delta)
        if len(nzd) and delta[nzd[0]] < 0:
            return  # cannot even tie the best vector from here
        if len(nzd):
            best[offset:offset + width] = seg_best
            best[offset + width:] = -1
            # leaves found before this improvement tie an older vector, so
            # they cannot pair with leaves below to yield automorphisms
            ctx["anchor"] = None
        self._visit_tied(cands[tied], rows, ctx,
                         lambda row: self._max_rec(
                             counts, n, depth + 1, rows + [row],
                             self.grow_combos(combos, row), best,
                             offset + width, ctx))

    def _visit_tied(self, tied_keys: np.ndarray, rows: list, ctx: dict, visit):
        """Run `visit` on one representative per orbit of the tied candidates.

        Orbits are taken under the automorphisms discovered so far that fix
        the chosen prefix rows; the orbit partition is refreshed after each
        visit so later siblings benefit from automorphisms found below.
        """
        prefix_keys = self._prefix_keys(rows)
        index = {int(k): i for i, k in enumerate(tied_keys)}
        consumed = np.zeros(len(tied_keys), dtype=bool)
        while not consumed.all():
            perms = self._fixing(ctx["auts"], prefix_keys)
            i = int(np.flatnonzero(~consumed)[0])
            key = int(tied_keys[i])
            for j in self._orbit_of(key, perms, index):
                consumed[j] = True
            stop = visit(self.unpack[key])
            if stop:
                return True
        return False

    # -- does any image lex-exceed the target vector? ----------------------

    def beats(self, counts: np.ndarray, target: np.ndarray) -> bool:
        ctx = {"auts": [], "aut_keys": set(), "anchor": None}
        n = int(counts.sum())
        return bool(self._beats_rec(counts, n, np.asarray(target), 0, [],
                                    np.zeros((1, self.v), dtype=np.uint8), 0, ctx))

    def _beats_rec(self, counts, n, target, depth, rows, combos, offset, ctx):
        if depth == self.v:
            self._leaf(ctx, rows)
            return False
        if offset > 0 and int(target[:offset].sum()) == n:
            self._leaf(ctx, rows)
            return False  # only zeros remain on both sides
        width = self.q**depth
        cands = self.candidates(depth, self.keys_of(combos))
        segs = self.segments(rows, depth, cands, counts)
        greater, equal = self.compare_rows(segs, target[offset:offset + width])
        if greater.any():
            return True
        return self._visit_tied(cands[equal], rows, ctx,
                                lambda row: self._beats_rec(
                                    counts, n, target, depth + 1, rows + [row],
                                    self.grow_combos(combos, row),
                                    offset + width, ctx))

    # -- stabilizer order ---------------------------------------------------

    def aut_order_pgl(self, counts: np.ndarray, best: np.ndarray) -> int:
        """Order of the stabilizer among projectivities.

        Walks one canonical chain.  At each depth the tied candidates that
        extend to a full tie form whole orbits under the stabilizer of the
        chain prefix, and the stabilizer order is the product over depths of
        their number (a coset count, exact even though only a conservative
        subgroup of the stabilizer is known at pruning time).
        """
        n = int(counts.sum())
        ctx = {"auts": [], "aut_keys": set(), "anchor": None}
        total = 1
        rows: list = []
        combos = np.zeros((1, self.v), dtype=np.uint8)
        offset = 0
        for depth in range(self.v):
            if offset > 0 and int(best[:offset].sum()) == n:
                for d in range(depth, self.v):
                    total *= self.nvec - self.q**d
                return total
            width = self.q**depth
            cands = self.candidates(depth, self.keys_of(combos))
            segs = self.segments(rows, depth, cands, counts)
            _greater, equal = self.compare_rows(segs, best[offset:offset + width])
            tied_keys = cands[equal]
            prefix_keys = self._prefix_keys(rows)
            index = {int(k): i for i, k in enumerate(tied_keys)}
            consumed = np.zeros(len(tied_keys), dtype=bool)
            e_depth = 0
            chosen = None
            while not consumed.all():
                perms = self._fixing(ctx["auts"], prefix_keys)
                i = int(np.flatnonzero(~consumed)[0])
                key = int(tied_keys[i])
                orbit = [j for j in self._orbit_of(key, perms, index)
                         if not consumed[j]]
                for j in orbit:
                    consumed[j] = True
                row = self.unpack[key]
                if self._extends(counts, n, best, depth + 1, rows + [row],
                                 self.grow_combos(combos, row),
                                 offset + width, ctx):
                    e_depth += len(orbit)
                    if chosen is None:
                        chosen = key
            if chosen is None:
                raise CanonicalError("canonical chain lost; internal error")
            total *= e_depth
            row = self.unpack[chosen]
            combos = self.grow_combos(combos, row)
            rows.append(row)
            offset += width
        return total

    def _extends(self, counts, n, best, depth, rows, combos, offset, ctx) -> bool:
        """Can this prefix reach a full tie against the best vector?"""
        if depth == self.v or int(best[:offset].sum()) == n:
            self._leaf(ctx, rows)
            return True
        width = self.q**depth
        cands = self.candidates(depth, self.keys_of(combos))
        segs = self.segments(rows, depth, cands, counts)
        _greater, equal = self.compare_rows(segs, best[offset:offset + width])
        return bool(self._visit_tied(
            cands[equal], rows, ctx,
            lambda row: self._extends(counts, n, best, depth + 1, rows + [row],
                                      self.grow_combos(combos, row),
                                      offset + width, ctx)))


_searchers: dict = {}


def _searcher(space: ProjectiveSpace) -> _Searcher:
    key = (space.q, space.v, space.field.modulus)
    if key not in _searchers:
        _searchers[key] = _Searcher(space)
    return _searchers[key]


# ------------------------------------------------------------- public API


def _guard(space: ProjectiveSpace, stretch: bool):
    if not stretch and space.num_points > MAX_POINTS:
        raise CanonicalError(
            f"space has {space.num_points} points, over the {MAX_POINTS} cap; "
            "pass stretch=True to force")


def _frobenius_variants(m: PointMultiset) -> list[np.ndarray]:
    """Multiplicity vectors of the images under each field automorphism."""
    sp = m.space
    out = []
    for amap in sp.field.automorphisms():
        imgs = amap[sp.pts]
        perm = sp.vec2pid[imgs.astype(np.int64) @ sp.qpow]
        twisted = np.zeros_like(m.counts)
        twisted[perm] = m.counts
        out.append(twisted)
    return out


def canonical_form(m: PointMultiset, aut: bool = False,
                   stretch: bool = False) -> CanonicalClass:
    sp = m.space
    _guard(sp, stretch)
    if m.counts.max(initial=0) == m.counts.min(initial=0):
        # constant multiplicity: every semilinear map stabilizes
        order = (sp.q - 1) * pgammal_order(sp.v, sp.q, sp.field.h) if aut else None
        return CanonicalClass(sp.q, sp.v, tuple(int(c) for c in m.counts), order)
    s = _searcher(sp)
    variants = _frobenius_variants(m)
    maxes = [s.max_vector(c) for c in variants]
    best_idx = 0
    for i in range(1, len(maxes)):
        d = maxes[i] - maxes[best_idx]
        nz = np.flatnonzero(d)
        if len(nz) and d[nz[0]] > 0:
            best_idx = i
    vector = tuple(int(c) for c in maxes[best_idx])
    order = None
    if aut:
        own = maxes[0]  # identity automorphism comes first
        galois = sum(1 for mx in maxes if np.array_equal(mx, own))
        order = (sp.q - 1) * s.aut_order_pgl(variants[0], own) * galois
    return CanonicalClass(sp.q, sp.v, vector, order)


def aut_order(m: PointMultiset, stretch: bool = False) -> int:
    return canonical_form(m, aut=True, stretch=stretch).aut_order


def is_canonical(m: PointMultiset, stretch: bool = False) -> bool:
    """Is this multiset its own canonical representative?

    Used by the orderly classifier: a multiset is accepted only when no
    collineation image has a lex-larger multiplicity vector.
    """
    sp = m.space
    _guard(sp, stretch)
    if m.counts.max(initial=0) == m.counts.min(initial=0):
        return True
    s = _searcher(sp)
    target = m.counts
    return not any(s.beats(c, target) for c in _frobenius_variants(m))


def are_equivalent(m1: PointMultiset, m2: PointMultiset,
                   stretch: bool = False) -> bool:
    if (m1.space.q, m1.v, m1.n) != (m2.space.q, m2.v, m2.n):
        raise CanonicalError(
            f"parameter mismatch: ({m1.space.q},{m1.v},{m1.n}) vs "
            f"({m2.space.q},{m2.v},{m2.n})")
    if np.array_equal(m1.counts, m2.counts):
        return True
    return canonical_form(m1, stretch=stretch) == canonical_form(m2, stretch=stretch)
