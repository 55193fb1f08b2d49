"""Multisets of projective points and their hyperplane spectra.

A multiset over PG(v-1, q) is a dense vector of nonnegative multiplicities
indexed by point id.  Spectra count subspaces by multiplicity and always use
the raw indices a_i (number of hyperplanes meeting the multiset in i points,
never divided by anything).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .gf import GF
from .geometry import (
    GeometryError, ProjectiveSpace, Subspace, bracket, gaussian_binomial,
    hyperplanes_through, projective_space, quotient_chart,
)


class PointMultiset:
    """An immutable multiset of points; counts is a read-only numpy vector."""

    def __init__(self, space: ProjectiveSpace, counts: Sequence[int]):
        counts = np.asarray(counts, dtype=np.int64)
        if counts.shape != (space.num_points,):
            raise ValueError("counts must have one entry per point")
        if (counts < 0).any():
            raise ValueError("multiplicities must be nonnegative")
        counts.setflags(write=False)
        self.space = space
        self.counts = counts
        self.n = int(counts.sum())

    @classmethod
    def from_point_ids(cls, space: ProjectiveSpace, pids: Iterable[int]) -> "PointMultiset":
        counts = np.zeros(space.num_points, dtype=np.int64)
        for p in pids:
            counts[p] += 1
        return cls(space, counts)

    @classmethod
    def from_coords(cls, space: ProjectiveSpace, rows: Iterable[Sequence[int]]) -> "PointMultiset":
        return cls.from_point_ids(space, (space.point_id(r) for r in rows))

    @property
    def field(self) -> GF:
        return self.space.field

    @property
    def v(self) -> int:
        return self.space.v

    def is_set(self) -> bool:
        return bool((self.counts <= 1).all())

    def max_multiplicity(self) -> int:
        return int(self.counts.max()) if self.n else 0

    def support(self) -> list[int]:
        return [int(p) for p in np.flatnonzero(self.counts)]

    def multiplicity_of_point(self, pid: int) -> int:
        return int(self.counts[pid])

    def multiplicity(self, sub: Subspace) -> int:
        return int(sum(self.counts[p] for p in sub.point_ids()))

    def spanning_dimension(self) -> int:
        return self.space.rank(self.space.pts[p] for p in self.support())

    def is_spanning(self) -> bool:
        return self.spanning_dimension() == self.v

    def hyperplane_counts(self) -> np.ndarray:
        """|M ∩ H| for every hyperplane, indexed by the dual point id."""
        return self.counts @ self.space.incidence_matrix().astype(np.int64)

    def __eq__(self, other):
        return (
            isinstance(other, PointMultiset)
            and self.space is other.space
            and np.array_equal(self.counts, other.counts)
        )

    def __hash__(self):
        return hash((id(self.space), self.counts.tobytes()))

    def __repr__(self):
        return f"PointMultiset(n={self.n}, v={self.v}, q={self.space.q})"


@dataclass(frozen=True)
class Spectrum:
    """a_i = number of codimension-j subspaces meeting the multiset i times."""

    q: int
    v: int
    n: int
    codim: int
    a: tuple[tuple[int, int], ...]  # (i, a_i) pairs, zero entries omitted

    def as_dict(self) -> dict[int, int]:
        return dict(self.a)

    def __getitem__(self, i: int) -> int:
        return dict(self.a).get(i, 0)

    def total(self) -> int:
        return sum(c for _, c in self.a)


def spectrum(m: PointMultiset, codim: int = 1) -> Spectrum:
    """The codimension-1 or codimension-2 spectrum of a multiset."""
    sp = m.space
    if codim == 1:
        counts = m.hyperplane_counts()
    elif codim == 2:
        if sp.v < 2:
            raise GeometryError("codimension 2 needs v >= 2")
        if sp.v > 6:
            raise GeometryError("codimension-2 spectra are limited to v <= 6")
        counts = _codim2_counts(m)
    else:
        raise GeometryError("only codimension 1 and 2 spectra are supported")
    vals, cnts = np.unique(np.asarray(counts), return_counts=True)
    pairs = tuple((int(i), int(c)) for i, c in zip(vals, cnts))
    spec = Spectrum(sp.q, sp.v, m.n, codim, pairs)
    assert spec.total() == gaussian_binomial(sp.v, sp.v - codim, sp.q)
    return spec


def _codim2_counts(m: PointMultiset) -> np.ndarray:
    """Multiplicities of all codim-2 subspaces via hyperplane pair counts.

    Two distinct hyperplanes meet in a codim-2 subspace and each such
    subspace lies in exactly q+1 hyperplanes, so the multiset of pairwise
    intersection counts covers every codim-2 subspace exactly C(q+1,2) times.
    """
    sp = m.space
    if sp.v == 2:  # the only codim-2 subspace is the zero space
        return np.array([0])
    inc = sp.incidence_matrix().astype(np.int64)
    weighted = inc * m.counts[:, None]
    pair = inc.T @ weighted  # pair[h1, h2] = |M ∩ H1 ∩ H2|
    iu = np.triu_indices(sp.num_points, k=1)
    vals, cnts = np.unique(pair[iu], return_counts=True)
    per = (sp.q + 1) * sp.q // 2
    counts: list[int] = []
    for val, cnt in zip(vals, cnts):
        assert cnt % per == 0
        counts.extend([int(val)] * int(cnt // per))
    return np.array(counts)


def is_divisible(m: PointMultiset, delta: int) -> tuple[bool, Optional[int]]:
    """Whether |M ∩ H| ≡ |M| (mod delta) for every hyperplane.

    Returns (True, None) or (False, witness_hyperplane_id).
    """
    if delta < 1:
        raise ValueError("delta must be positive")
    res = (m.hyperplane_counts() - m.n) % delta
    bad = np.flatnonzero(res)
    if len(bad):
        return False, int(bad[0])
    return True, None


def divisibility_exponent(m: PointMultiset) -> int:
    """The largest r with M being q^r-divisible; 0 if only trivially divisible."""
    q = m.space.q
    r = 0
    while m.n and is_divisible(m, q ** (r + 1))[0]:
        r += 1
    return r


def pencil_distribution(m: PointMultiset, k: Subspace) -> list[int]:
    """Multiplicities of the q+1 hyperplanes through a codim-2 subspace.

    Their sum is |M| + q * |M ∩ K|, which the tests exercise as an identity.
    """
    sp = m.space
    hyps = hyperplanes_through(sp, k)
    inc = sp.incidence_matrix()
    return sorted(
        int(m.counts @ inc[:, h.normal.id].astype(np.int64)) for h in hyps
    )


def count_pencil_distributions(
    q: int,
    n: int,
    m: int,
    allowed: Iterable[int],
    required: Iterable[int] = (),
) -> list[tuple[int, ...]]:
    """All multisets of q+1 values from `allowed` summing to n + q*m.

    `required` values must each occur at least once.  Results are multisets
    sorted descending, listed in descending lexicographic order.
    """
    allowed = sorted(set(allowed), reverse=True)
    required = list(required)
    if any(r not in allowed for r in required):
        return []
    target = n + q * m
    out: list[tuple[int, ...]] = []

    def rec(idx: int, left: int, total: int, acc: list[int]):
        if left == 0:
            if total == 0 and all(acc.count(r) >= required.count(r) for r in set(required)):
                out.append(tuple(acc))
            return
        if idx == len(allowed):
            return
        val = allowed[idx]
        if total - val * left > 0:
            return  # even the largest remaining value cannot absorb the total
        max_take = left if val == 0 else min(left, total // val) if val > 0 else left
        for take in range(max_take, -1, -1):
            rest = total - take * val
            if rest < 0:
                continue
            # the remaining values are all smaller; quick feasibility cut
            if idx + 1 == len(allowed) and rest != 0 and left - take > 0:
                continue
            rec(idx + 1, left - take, rest, acc + [val] * take)

    rec(0, q + 1, target, [])
    out.sort(reverse=True)
    return out


def format_distribution(dist: Sequence[int]) -> str:
    """Render a pencil distribution like '0^3 3^3 5^3' (ascending values)."""
    from collections import Counter

    c = Counter(dist)
    return " ".join(f"{v}^{c[v]}" for v in sorted(c))


def is_blocking_set(m: PointMultiset) -> bool:
    """Every hyperplane meets the support (v = 3: every line is blocked)."""
    return bool((m.hyperplane_counts() > 0).all())


def symmetric_difference_with_line(m: PointMultiset, line: Subspace) -> PointMultiset:
    """Flip membership on a line; only defined for sets in the plane."""
    if m.space.v != 3 or line.dim != 2:
        raise GeometryError("symmetric difference is a plane operation on lines")
    if not m.is_set():
        raise ValueError("symmetric difference needs a set, not a multiset")
    counts = np.array(m.counts)
    for p in line.point_ids():
        counts[p] = 1 - counts[p]
    return PointMultiset(m.space, counts)


def restrict_to_subspace(m: PointMultiset, x: Subspace) -> PointMultiset:
    """The multiset M ∩ X in X's own coordinates, PG(dim X - 1, q).

    With X given by an RREF basis the chart costs nothing: the coefficients
    of a point of X on that basis sit in the pivot columns.
    """
    if x.dim < 1:
        raise GeometryError("restriction needs a subspace of dimension >= 1")
    sp = m.space
    pivots = [next(i for i, c in enumerate(r) if c) for r in x.rows]
    xsp = projective_space(sp.field, x.dim)
    counts = np.zeros(xsp.num_points, dtype=np.int64)
    for p in m.support():
        if x.contains_point(p):
            coeffs = [int(sp.pts[p][pc]) for pc in pivots]
            counts[xsp.point_id(coeffs)] += m.counts[p]
    return PointMultiset(xsp, counts)


def quotient_multiset(m: PointMultiset, b: Subspace) -> PointMultiset:
    """Push the multiset to the quotient by B; B must avoid the support."""
    qspace, to_q = quotient_chart(m.space, b)
    counts = np.zeros(qspace.num_points, dtype=np.int64)
    for p in m.support():
        img = to_q(p)
        if img is None:
            raise GeometryError("support meets the subspace being factored out")
        counts[img] += m.counts[p]
    return PointMultiset(qspace, counts)


def affine_geometry(field: GF, v: int) -> PointMultiset:
    """The q^(v-1) points outside the hyperplane x_1 = 0."""
    sp = projective_space(field, v)
    pids = [pt.id for pt in sp.points() if pt.coords[0] != 0]
    return PointMultiset.from_point_ids(sp, pids)


def standard_equation_residuals(m: PointMultiset):
    """Exact residuals of the three standard counting identities.

    For any multiset the first two vanish; the third counts point pairs and
    is only an identity when M is a set.
    """
    sp = m.space
    spec = spectrum(m, codim=1)
    q, v, n = sp.q, sp.v, m.n
    s0 = spec.total() - bracket(v, q)
    s1 = sum(i * c for i, c in spec.a) - n * bracket(v - 1, q)
    s2 = sum(i * (i - 1) // 2 * c for i, c in spec.a) - n * (n - 1) // 2 * bracket(v - 2, q)
    return s0, s1, s2
