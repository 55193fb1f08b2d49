"""The projective geometry PG(v-1, q) over a small field.

Points are the normalized nonzero vectors of GF(q)^v (first nonzero
coordinate equal to 1).  They carry dense integer ids: point i is the one
whose packed key sum(c_j * q^j) is the i-th smallest, i.e. coordinate tuples
are compared last coordinate first.  That puts (1,0,...,0) at id 0 and makes
the points supported on the first j coordinates exactly the ids below [j]_q,
which the canonical form search relies on.

Subspaces use the vector-space dimension convention throughout: a "line" in
the plane has dim 2, a hyperplane of PG(v-1,q) has dim v-1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

import numpy as np

from .gf import GF, FieldError


def bracket(x: int, q: int) -> int:
    """[x]_q = (q^x - 1)/(q - 1), the number of points of PG(x-1, q)."""
    return (q**x - 1) // (q - 1)


def gaussian_binomial(v: int, k: int, q: int) -> int:
    if k < 0 or k > v:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (v - i) - 1
        den *= q ** (i + 1) - 1
    assert num % den == 0
    return num // den


def gf_rref(field: GF, rows: Iterable[Sequence[int]], width: Optional[int] = None) -> tuple[tuple[int, ...], ...]:
    """Reduced row echelon form of length-`width` vectors; zero rows dropped."""
    work = [list(int(c) for c in r) for r in rows]
    if width is None:
        if not work:
            return ()
        width = len(work[0])
    out: list[list[int]] = []
    for col in range(width):
        src = None
        for r in work:
            if r[col] != 0 and all(r[c] == 0 for c in range(col)):
                src = r
                break
        if src is None:
            continue
        work.remove(src)
        inv = field.inv(src[col])
        src = [field.mul(inv, c) for c in src]
        for r in work + out:
            if r[col] != 0:
                f = r[col]
                for j in range(width):
                    r[j] = field.sub(r[j], field.mul(f, src[j]))
        out.append(src)
    return tuple(tuple(r) for r in out)


def gf_reduce(field: GF, vec: Sequence[int], rows: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Eliminate the pivot coordinates of vec using RREF rows."""
    out = [int(c) for c in vec]
    width = len(out)
    for r in rows:
        piv = next(i for i, c in enumerate(r) if c)
        if out[piv]:
            f = out[piv]
            for j in range(width):
                out[j] = field.sub(out[j], field.mul(f, r[j]))
    return tuple(out)


class ProjectivePoint(NamedTuple):
    coords: tuple[int, ...]
    id: int


class GeometryError(ValueError):
    pass


class ProjectiveSpace:
    """Cached coordinate tables for PG(v-1, q)."""

    def __init__(self, field: GF, v: int):
        if v < 1:
            raise GeometryError("need v >= 1")
        self.field = field
        self.v = v
        q = field.q
        self.q = q
        self.num_points = bracket(v, q)
        qpow = q ** np.arange(v, dtype=np.int64)
        self.qpow = qpow
        # all vectors of GF(q)^v, indexed by packed key
        nvec = q**v
        unpack = np.zeros((nvec, v), dtype=np.uint8)
        for j in range(v):
            unpack[:, j] = (np.arange(nvec) // q**j) % q
        self.unpack = unpack
        # normalized points in ascending key order
        lead = np.zeros(nvec, dtype=np.int64)  # value of first nonzero coord
        nz = unpack != 0
        first_nz = np.where(nz.any(axis=1), nz.argmax(axis=1), -1)
        rows = np.arange(nvec)
        lead[1:] = unpack[rows[1:], first_nz[1:]]
        normalized_keys = np.flatnonzero(lead == 1)
        assert len(normalized_keys) == self.num_points
        self.pts = unpack[normalized_keys]  # (N, v) uint8
        # id of the normalization of every nonzero vector
        vec2pid = np.full(nvec, -1, dtype=np.int64)
        MUL = field.MUL
        for lam in range(1, q):
            scaled = MUL[lam, self.pts]  # (N, v)
            keys = scaled.astype(np.int64) @ qpow
            vec2pid[keys] = np.arange(self.num_points)
        self.vec2pid = vec2pid
        self._incidence: Optional[np.ndarray] = None
        self._pair_counts_cache: dict = {}

    # -- point helpers --

    def point(self, pid: int) -> ProjectivePoint:
        return ProjectivePoint(tuple(int(c) for c in self.pts[pid]), pid)

    def point_id(self, coords: Sequence[int]) -> int:
        key = int(np.asarray(coords, dtype=np.int64) @ self.qpow)
        if key == 0:
            raise GeometryError("the zero vector is not a point")
        pid = int(self.vec2pid[key])
        return pid

    def normalize(self, vec: Sequence[int]) -> ProjectivePoint:
        pid = self.point_id(vec)
        return self.point(pid)

    def points(self) -> Iterator[ProjectivePoint]:
        for pid in range(self.num_points):
            yield self.point(pid)

    # -- GF(q)-linear algebra on coordinate rows --

    def dot(self, u: Sequence[int], w: Sequence[int]) -> int:
        F = self.field
        acc = 0
        for a, b in zip(u, w):
            acc = F.add(acc, F.mul(int(a), int(b)))
        return acc

    def vec_add(self, u, w):
        F = self.field
        return tuple(F.add(int(a), int(b)) for a, b in zip(u, w))

    def vec_scale(self, lam: int, u):
        F = self.field
        return tuple(F.mul(lam, int(a)) for a in u)

    def rref(self, rows: Iterable[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
        """Reduced row echelon form over GF(q); zero rows dropped."""
        return gf_rref(self.field, rows, self.v)

    def reduce_vector(self, vec: Sequence[int], rows: Sequence[Sequence[int]]) -> tuple[int, ...]:
        """Eliminate the pivot coordinates of vec using RREF rows."""
        return gf_reduce(self.field, vec, rows)

    def rank(self, rows: Iterable[Sequence[int]]) -> int:
        return len(self.rref(rows))

    # -- incidence --

    def incidence_matrix(self) -> np.ndarray:
        """I[p, h] = 1 iff point p lies on the hyperplane with normal point h."""
        if self._incidence is None:
            F, n = self.field, self.num_points
            acc = np.zeros((n, n), dtype=np.uint8)
            for t in range(self.v):
                prod = F.MUL[self.pts[:, t][:, None], self.pts[None, :, t]]
                acc = F.ADD[acc, prod]
            self._incidence = (acc == 0).astype(np.uint8)
        return self._incidence

    def hyperplane_ids_through_point(self, pid: int) -> np.ndarray:
        return np.flatnonzero(self.incidence_matrix()[pid])


_SPACE_CACHE: dict[tuple, ProjectiveSpace] = {}


def projective_space(field: GF, v: int) -> ProjectiveSpace:
    key = (field.p, field.h, field.modulus, v)
    if key not in _SPACE_CACHE:
        _SPACE_CACHE[key] = ProjectiveSpace(field, v)
    return _SPACE_CACHE[key]


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of GF(q)^v given by its RREF basis rows."""

    space: ProjectiveSpace
    rows: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.rows)

    @classmethod
    def from_vectors(cls, space: ProjectiveSpace, vectors: Iterable[Sequence[int]]) -> "Subspace":
        return cls(space, space.rref(vectors))

    @classmethod
    def from_point_ids(cls, space: ProjectiveSpace, pids: Iterable[int]) -> "Subspace":
        return cls.from_vectors(space, (space.pts[p] for p in pids))

    def contains_vector(self, vec: Sequence[int]) -> bool:
        return not any(self.space.reduce_vector(vec, self.rows))

    def contains_point(self, pid: int) -> bool:
        return self.contains_vector(self.space.pts[pid])

    def vectors(self) -> Iterator[tuple[int, ...]]:
        """All q^dim vectors, the zero vector included."""
        sp, F = self.space, self.space.field
        for coeffs in itertools.product(range(sp.q), repeat=self.dim):
            vec = (0,) * sp.v
            for c, row in zip(coeffs, self.rows):
                if c:
                    vec = sp.vec_add(vec, sp.vec_scale(c, row))
            yield vec

    def point_ids(self) -> list[int]:
        sp = self.space
        out = {sp.point_id(vec) for vec in self.vectors() if any(vec)}
        assert len(out) == bracket(self.dim, sp.q)
        return sorted(out)

    def __le__(self, other: "Subspace") -> bool:
        return all(other.contains_vector(r) for r in self.rows)


class Hyperplane(NamedTuple):
    """A hyperplane, represented by its normal vector as a point."""

    normal: ProjectivePoint

    def contains(self, space: ProjectiveSpace, pid: int) -> bool:
        return bool(space.incidence_matrix()[pid, self.normal.id])

    def subspace(self, space: ProjectiveSpace) -> Subspace:
        ids = np.flatnonzero(space.incidence_matrix()[:, self.normal.id])
        rows: tuple = ()
        for pid in ids:  # kernel of a nonzero functional has dim v-1
            rows = space.rref(list(rows) + [space.pts[pid]])
            if len(rows) == space.v - 1:
                break
        return Subspace(space, rows)


def enumerate_points(space: ProjectiveSpace) -> list[ProjectivePoint]:
    return list(space.points())


def enumerate_subspaces(space: ProjectiveSpace, d: int) -> Iterator[Subspace]:
    """All subspaces of vector dimension d, as RREF matrices.

    Enumerated by pivot-column choice, then free entries; the total count is
    the Gaussian binomial, which the tests check exhaustively.
    """
    v, q = space.v, space.q
    if d < 0 or d > v:
        return
    if d == 0:
        yield Subspace(space, ())
        return
    for pivots in itertools.combinations(range(v), d):
        free_pos = [
            (r, c)
            for r in range(d)
            for c in range(pivots[r] + 1, v)
            if c not in pivots
        ]
        base = [[0] * v for _ in range(d)]
        for r, p in enumerate(pivots):
            base[r][p] = 1
        for vals in itertools.product(range(q), repeat=len(free_pos)):
            rows = [row[:] for row in base]
            for (r, c), val in zip(free_pos, vals):
                rows[r][c] = val
            yield Subspace(space, tuple(tuple(r) for r in rows))


def hyperplanes_through(space: ProjectiveSpace, k: Subspace) -> list[Hyperplane]:
    """The q+1 hyperplanes through a subspace of codimension 2 (the pencil)."""
    if k.dim != space.v - 2:
        raise GeometryError("pencils are defined for codimension-2 subspaces")
    normals = kernel_vectors(space, k)
    pids = sorted({space.point_id(n) for n in normals})
    assert len(pids) == space.q + 1
    return [Hyperplane(space.point(p)) for p in pids]


def kernel_vectors(space: ProjectiveSpace, sub: Subspace) -> list[tuple[int, ...]]:
    """Nonzero vectors n with n . x = 0 for every x in the subspace."""
    F = space.field
    rows = sub.rows
    if not rows:
        return [tuple(int(c) for c in space.pts[p]) for p in range(space.num_points)]
    pivots = [next(i for i, c in enumerate(r) if c) for r in rows]
    free = [c for c in range(space.v) if c not in pivots]
    basis = []
    for fc in free:
        vec = [0] * space.v
        vec[fc] = 1
        for r, piv in zip(rows, pivots):
            vec[piv] = F.neg(r[fc])
        basis.append(tuple(vec))
    out = []
    for coeffs in itertools.product(range(space.q), repeat=len(basis)):
        if not any(coeffs):
            continue
        vec = (0,) * space.v
        for c, b in zip(coeffs, basis):
            if c:
                vec = space.vec_add(vec, space.vec_scale(c, b))
        out.append(vec)
    return out


def span_of_points(space: ProjectiveSpace, pids: Iterable[int]) -> Subspace:
    return Subspace.from_point_ids(space, pids)


def affine_part(space: ProjectiveSpace, pid: int, f: Subspace) -> list[int]:
    """The point set <P, F> \\ F, of size q^dim(F).

    These are exactly the normalizations of p + x for x running over the
    vectors of F, each giving a distinct point.
    """
    if f.contains_point(pid):
        raise GeometryError("P must lie outside F")
    p = space.pts[pid]
    out = [space.point_id(space.vec_add(p, x)) for x in f.vectors()]
    assert len(set(out)) == space.q**f.dim
    return sorted(out)


def quotient_chart(space: ProjectiveSpace, b: Subspace):
    """Coordinates on the quotient by B via basis extension.

    Returns (quotient_space, to_quotient) where to_quotient maps a point id of
    the ambient space to a point id of PG(v - dim B - 1, q), or None for
    points inside B.  The chart extends B's RREF basis by the standard vectors
    of its non-pivot columns in ascending order.
    """
    pivots = [next(i for i, c in enumerate(r) if c) for r in b.rows]
    free = [c for c in range(space.v) if c not in pivots]
    if not free:
        raise GeometryError("quotient by the full space is empty")
    qspace = projective_space(space.field, len(free))

    def to_quotient(pid: int) -> Optional[int]:
        red = space.reduce_vector(space.pts[pid], b.rows)
        if not any(red):
            return None
        return qspace.point_id([red[c] for c in free])

    return qspace, to_quotient
