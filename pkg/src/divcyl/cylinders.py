"""Cylinders: point sets fibered over a common axis subspace.

An (r+1)-cylinder in PG(v-1,q) is the union of the affine parts L_i \\ F of
q subspaces L_1, ..., L_q of vector dimension r+1 that pairwise intersect in
a common subspace F of vector dimension r, the axis.  Each part A(P_i, F)
has q^r points, so a cylinder carries q^(r+1) points and is q^r-divisible:
a hyperplane through F meets every part in 0 or q^r points, any other
hyperplane meets every part in exactly q^(r-1).

Recognition pivots on the direction set: the points of multiplicity zero
through which some member of the set sees a full affine line inside the set.
Every point of a valid axis is such a direction, so axis candidates can be
restricted to subspaces spanned inside the direction set without losing
completeness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import (
    Subspace,
    affine_part,
    bracket,
    enumerate_subspaces,
    projective_space,
)
from .gf import make_field
from .pointsets import PointMultiset


class CylinderError(ValueError):
    pass


@dataclass(frozen=True)
class CylinderWitness:
    """Certificate that a point set is an (r+1)-cylinder.

    axis is the shared subspace F (vector dimension r); rep_ids holds one
    point id per part in ascending order; parts lists the q affine parts
    A(rep, axis) as sorted id tuples.  For a set the parts are pairwise
    disjoint and partition the support.
    """

    axis: Subspace
    rep_ids: tuple[int, ...]
    parts: tuple[tuple[int, ...], ...]

    @property
    def r(self) -> int:
        return self.axis.dim

    def __repr__(self):
        return (f"CylinderWitness(r={self.r}, axis_points="
                f"{self.axis.point_ids()}, reps={list(self.rep_ids)})")


@dataclass(frozen=True)
class AffineSubspaceWitness:
    """A full affine d-space inside a point set: T \\ F with F < T."""

    t: Subspace
    f: Subspace


# ------------------------------------------------------------- construction


def construct_cylinder(base: PointMultiset, r: int) -> tuple[PointMultiset, CylinderWitness]:
    """Build an (r+1)-cylinder over a base of q points.

    The base lives in some v'-space; the result lives in a (v'+r)-space with
    the axis spanned by the r appended coordinates, and consists of the parts
    A(P_i, F) for the embedded base points P_i.  Multiplicities of repeated
    base points accumulate on their shared part.
    """
    sp = base.space
    q = sp.q
    if base.n != q:
        raise CylinderError(f"base must consist of exactly q={q} points, got {base.n}")
    if r < 0:
        raise CylinderError("r must be nonnegative")
    nsp = projective_space(sp.field, sp.v + r)
    axis_rows = tuple(
        tuple(1 if i == sp.v + j else 0 for i in range(nsp.v)) for j in range(r)
    )
    axis = Subspace(nsp, axis_rows)
    counts = np.zeros(nsp.num_points, dtype=np.int64)
    reps = []
    parts = []
    for pid in base.support():
        coords = tuple(int(c) for c in sp.pts[pid]) + (0,) * r
        npid = nsp.point_id(coords)
        part = affine_part(nsp, npid, axis)
        mult = int(base.counts[pid])
        for p in part:
            counts[p] += mult
        for _ in range(mult):  # one witness entry per covering subspace
            reps.append(npid)
            parts.append(tuple(part))
    result = PointMultiset(nsp, counts)
    assert result.n == q ** (r + 1)
    return result, CylinderWitness(axis, tuple(reps), tuple(parts))


def spanning_cylinder_exists(v: int, r: int, q: int) -> bool:
    """Whether some spanning (r+1)-cylinder exists in PG(v-1,q).

    The parts span the axis plus the span of the base, so a spanning cylinder
    needs a base of q points spanning v-r dimensions: possible exactly when
    2 <= v-r <= q.
    """
    return r >= 0 and r + 2 <= v <= r + q


# -------------------------------------------------------------- recognition


def direction_set(s: PointMultiset) -> frozenset[int]:
    """Ids of the points of multiplicity zero that complete an affine line.

    A point f belongs to the direction set when some member of the set sees
    the whole affine line with infinite point f inside the set, i.e.
    A(p, <f>) is contained in the support for some support point p.
    """
    if not s.is_set():
        raise CylinderError("direction sets are defined for sets, not multisets")
    sp = s.space
    inside = s.counts > 0
    support = s.support()
    out = []
    for f in range(sp.num_points):
        if inside[f]:
            continue
        line = Subspace.from_point_ids(sp, [f])
        if any(all(inside[p] for p in affine_part(sp, pid, line)) for pid in support):
            out.append(f)
    return frozenset(out)


def _axis_candidates(s: PointMultiset, r: int, dirs: frozenset[int]):
    """Dimension-r subspaces spanned inside the direction set, least first."""
    sp = s.space
    seen = set()
    cands = []
    for pick in itertools.combinations(sorted(dirs), r):
        sub = Subspace.from_point_ids(sp, pick)
        if sub.dim != r or sub.rows in seen:
            continue
        pids = sub.point_ids()
        if not all(p in dirs for p in pids):
            continue
        seen.add(sub.rows)
        cands.append((tuple(pids), sub))
    cands.sort()
    return [sub for _, sub in cands]


def _verify_axis(s: PointMultiset, axis: Subspace) -> Optional[CylinderWitness]:
    """Check that every part through the axis is full; None on any leak."""
    sp = s.space
    q = sp.q
    inside = s.counts > 0
    if any(inside[p] for p in axis.point_ids()):
        return None
    covered = np.zeros(sp.num_points, dtype=bool)
    reps = []
    parts = []
    for pid in s.support():
        if covered[pid]:
            continue
        part = affine_part(sp, pid, axis)
        if not all(inside[p] for p in part):
            return None
        covered[part] = True
        reps.append(pid)
        parts.append(tuple(part))
    assert len(reps) == q
    return CylinderWitness(axis, tuple(reps), tuple(parts))


def recognize_cylinder(s: PointMultiset, r: int) -> Optional[CylinderWitness]:
    """Find a cylinder witness with a dimension-r axis, or report none.

    Axis candidates are first taken inside the direction set, which loses
    nothing: every point of a valid axis is a direction.  For small ambient
    dimension an exhaustive sweep over all r-subspaces re-checks a negative
    answer.  Candidates are tried in ascending point-id order, so the
    returned witness is the least one.
    """
    if not s.is_set():
        raise CylinderError("cylinder recognition is defined for sets only")
    sp = s.space
    q = sp.q
    if s.n != q ** (r + 1):
        raise CylinderError(
            f"cardinality mismatch: a {r + 1}-cylinder has q^{r + 1} = "
            f"{q ** (r + 1)} points, got {s.n}")
    if r == 0:
        support = s.support()
        return CylinderWitness(Subspace(sp, ()), tuple(support),
                               tuple((p,) for p in support))
    if r >= sp.v:
        return None
    dirs = direction_set(s)
    if len(dirs) >= bracket(r, q):
        for axis in _axis_candidates(s, r, dirs):
            w = _verify_axis(s, axis)
            if w is not None:
                return w
    if sp.v <= 5:
        # defense in depth: sweep every r-subspace on small instances
        swept = sorted(
            ((tuple(sub.point_ids()), sub) for sub in enumerate_subspaces(sp, r)),
        )
        for _, axis in swept:
            w = _verify_axis(s, axis)
            if w is not None:
                return w
    return None


def contains_affine_subspace(s: PointMultiset, d: int) -> Optional[AffineSubspaceWitness]:
    """Search for a full affine d-space T \\ F inside the set.

    Candidate rims F of dimension d-1 are first spanned inside the direction
    set; since F may meet the set here (unlike a cylinder axis), that pass is
    only a heuristic, and ambient dimension up to 6 gets an exhaustive sweep.
    """
    if not s.is_set():
        raise CylinderError("affine subspace search is defined for sets only")
    if d < 1:
        raise CylinderError("d must be at least 1")
    sp = s.space
    if d > sp.v or s.n < sp.q ** (d - 1):
        return None

    def probe(f: Subspace) -> Optional[AffineSubspaceWitness]:
        inside = s.counts > 0
        for pid in s.support():
            if f.contains_point(pid):
                continue
            if all(inside[p] for p in affine_part(sp, pid, f)):
                t = Subspace.from_vectors(sp, f.rows + (tuple(sp.pts[pid]),))
                return AffineSubspaceWitness(t, f)
        return None

    if d == 1:
        return probe(Subspace(sp, ()))
    dirs = direction_set(s)
    if len(dirs) >= bracket(d - 1, sp.q):
        for f in _axis_candidates(s, d - 1, dirs):
            w = probe(f)
            if w is not None:
                return w
    if sp.v <= 6:
        swept = sorted(
            ((tuple(sub.point_ids()), sub) for sub in enumerate_subspaces(sp, d - 1)),
        )
        for _, f in swept:
            w = probe(f)
            if w is not None:
                return w
        return None
    raise CylinderError(
        "no affine subspace found among direction-spanned candidates and the "
        f"ambient dimension {sp.v} is too large for the exhaustive sweep")


# ---------------------------------------------------------- transformations


def lift(s: PointMultiset) -> PointMultiset:
    """Replace every point by the affine line toward a fresh coordinate.

    The result lives one dimension higher; each point P of the input becomes
    the q points A(P, <e_new>), so the size multiplies by q.  On q^r-divisible
    sets the lift is q^(r+1)-divisible, which the tests check per instance.
    """
    sp = s.space
    nsp = projective_space(sp.field, sp.v + 1)
    new_dir = Subspace(nsp, (tuple(0 if i < sp.v else 1 for i in range(nsp.v)),))
    counts = np.zeros(nsp.num_points, dtype=np.int64)
    for pid in s.support():
        coords = tuple(int(c) for c in sp.pts[pid]) + (0,)
        part = affine_part(nsp, nsp.point_id(coords), new_dir)
        counts[part] += int(s.counts[pid])
    return PointMultiset(nsp, counts)


def subfield_embed(s: PointMultiset, h: int) -> PointMultiset:
    """Read the point coordinates over the degree-h extension field.

    Within the supported field range (q^h <= 9) the base field is prime, so
    element codes carry over unchanged and only the ambient space changes.
    Distinct points stay distinct since normalized coordinates are preserved.
    """
    if h < 2:
        raise CylinderError("embedding degree h must be at least 2")
    sp = s.space
    if sp.field.h != 1:
        raise CylinderError(
            "embedding a non-prime base field would need an extension beyond "
            "the supported field range")
    nsp = projective_space(make_field(sp.q**h), sp.v)
    counts = np.zeros(nsp.num_points, dtype=np.int64)
    for pid in s.support():
        coords = tuple(int(c) for c in sp.pts[pid])
        counts[nsp.point_id(coords)] += int(s.counts[pid])
    return PointMultiset(nsp, counts)
