"""Linear codes attached to point multisets and their weight analysis.

A multiset of n points spanning GF(q)^v gives a [n, v]_q code generated by
the matrix whose columns are the point representatives.  Hyperplane
multiplicities and nonzero weights determine each other: a codeword x.G
vanishes exactly on the columns inside the hyperplane with normal x, so
A_w = (q-1) * a_{n-w} for w > 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .gf import GF, make_field
from .geometry import gf_reduce, gf_rref, projective_space
from .pointsets import PointMultiset

MAX_CODEWORDS = 2 ** 24
_CHUNK = 2 ** 16


class CodeError(Exception):
    pass


@dataclass(frozen=True)
class GeneratorMatrix:
    """A full-rank k x n matrix over a small field, rows as element codes.

    ambient_spanned is a bookkeeping flag set by code_from_points when the
    input multiset did not span its ambient space; it never affects equality.
    """

    field: GF
    rows: tuple[tuple[int, ...], ...]
    ambient_spanned: bool = dc_field(default=True, compare=False)

    def __post_init__(self):
        if not self.rows or not self.rows[0]:
            raise CodeError("empty generator matrix")
        n = len(self.rows[0])
        if any(len(r) != n for r in self.rows):
            raise CodeError("ragged rows")
        q = self.field.q
        if any(not (0 <= int(c) < q) for r in self.rows for c in r):
            raise CodeError("entry out of field range")
        if len(gf_rref(self.field, self.rows, n)) != len(self.rows):
            raise CodeError("rows must be linearly independent")

    @property
    def k(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.rows[0])

    def array(self) -> np.ndarray:
        return np.array(self.rows, dtype=np.uint8)

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    def __repr__(self):
        return f"GeneratorMatrix(q={self.field.q}, k={self.k}, n={self.n})"


@dataclass(frozen=True)
class WeightDistribution:
    """(w, A_w) pairs, ascending, zero counts omitted."""

    counts: tuple[tuple[int, int], ...]

    def as_dict(self) -> dict[int, int]:
        return dict(self.counts)

    def __getitem__(self, w: int) -> int:
        return dict(self.counts).get(w, 0)

    def weights(self) -> list[int]:
        return [w for w, _ in self.counts if w > 0]

    def total(self) -> int:
        return sum(c for _, c in self.counts)

    def polynomial(self, var: str = "z") -> str:
        return " + ".join(f"{c}{var}^{w}" for w, c in self.counts)


def code_from_points(m: PointMultiset) -> GeneratorMatrix:
    """Generator matrix with the points as columns, ascending id.

    When the multiset does not span, the rows are replaced by a basis of
    their span, so k drops to the span dimension and ambient_spanned is
    False; the row space, hence the code, is unchanged.
    """
    if m.n == 0:
        raise CodeError("empty multiset has no code")
    cols = np.repeat(m.space.pts, m.counts, axis=0)  # n x v
    rows = [tuple(int(c) for c in col) for col in cols.T]
    spanned = m.spanning_dimension() == m.v
    if not spanned:
        rows = list(gf_rref(m.field, rows, m.n))
    return GeneratorMatrix(m.field, tuple(rows), ambient_spanned=spanned)


def points_from_code(g: GeneratorMatrix) -> PointMultiset:
    """Columns as a point multiset in PG(k-1, q); zero columns are dropped."""
    sp = projective_space(g.field, g.k)
    counts = np.zeros(sp.num_points, dtype=np.int64)
    for j in range(g.n):
        col = g.column(j)
        if any(col):
            counts[sp.point_id(col)] += 1
    return PointMultiset(sp, counts)


def effective_length(g: GeneratorMatrix) -> int:
    return sum(1 for j in range(g.n) if any(g.column(j)))


def is_projective(g: GeneratorMatrix) -> bool:
    """No zero column and no two proportional columns."""
    sp = projective_space(g.field, g.k)
    pids = []
    for j in range(g.n):
        col = g.column(j)
        if not any(col):
            return False
        pids.append(sp.point_id(col))
    return len(set(pids)) == len(pids)


def weight_distribution(g: GeneratorMatrix) -> WeightDistribution:
    """Exact weight census by sweeping all q^k codewords (chunked)."""
    F = g.field
    q, k, n = F.q, g.k, g.n
    if q ** k > MAX_CODEWORDS:
        raise CodeError(f"{q}^{k} codewords exceed the sweep budget")
    rows = g.array()
    ADD, MUL = F.ADD, F.MUL
    scalars = np.arange(q, dtype=np.uint8)

    base = np.zeros((1, n), dtype=np.uint8)
    split = 0
    while split < k and base.shape[0] * q <= _CHUNK:
        scaled = MUL[scalars[:, None], rows[split][None, :]]
        base = ADD[base[:, None, :], scaled[None, :, :]].reshape(-1, n)
        split += 1

    counts = np.zeros(n + 1, dtype=np.int64)
    for combo in itertools.product(range(q), repeat=k - split):
        offset = np.zeros(n, dtype=np.uint8)
        for c, row in zip(combo, rows[split:]):
            offset = ADD[offset, MUL[c, row]]
        block = ADD[base, offset[None, :]]
        counts += np.bincount((block != 0).sum(axis=1), minlength=n + 1)

    dist = WeightDistribution(
        tuple((int(w), int(c)) for w, c in enumerate(counts) if c)
    )
    assert dist.total() == q ** k and dist[0] == 1
    return dist


def reinterpret_prime_subfield(g: GeneratorMatrix) -> GeneratorMatrix:
    """Read a matrix whose entries lie in the prime subfield over GF(p)."""
    p = g.field.p
    if any(int(c) >= p for r in g.rows for c in r):
        raise CodeError("entries outside the prime subfield")
    return GeneratorMatrix(make_field(p), g.rows)


def codeword(g: GeneratorMatrix, message: Sequence[int]) -> tuple[int, ...]:
    """The codeword message . G."""
    F = g.field
    if len(message) != g.k:
        raise CodeError("message length must be k")
    out = [0] * g.n
    for c, row in zip(message, g.rows):
        if c:
            out = [F.add(x, F.mul(int(c), y)) for x, y in zip(out, row)]
    return tuple(out)


def contains_word(g: GeneratorMatrix, word: Sequence[int]) -> bool:
    basis = gf_rref(g.field, g.rows, g.n)
    return not any(gf_reduce(g.field, word, basis))


def residual_code(g: GeneratorMatrix, word: Sequence[int]) -> GeneratorMatrix:
    """The code restricted to the zero coordinates of a nonzero codeword."""
    word = tuple(int(c) for c in word)
    if len(word) != g.n:
        raise CodeError("word length must be n")
    if not any(word):
        raise CodeError("residual needs a nonzero codeword")
    if not contains_word(g, word):
        raise CodeError("word is not in the code")
    zeros = [j for j, c in enumerate(word) if c == 0]
    if not zeros:
        raise CodeError("full-weight codeword leaves no residual coordinates")
    restricted = [tuple(r[j] for j in zeros) for r in g.rows]
    rows = gf_rref(g.field, restricted, len(zeros))
    return GeneratorMatrix(g.field, rows)


def spectrum_from_weights(dist: WeightDistribution, n: int, q: int) -> dict[int, int]:
    """Hyperplane multiplicity census implied by A_w = (q-1) a_{n-w}."""
    out = {}
    for w, c in dist.counts:
        if w == 0:
            continue
        assert c % (q - 1) == 0
        out[n - w] = c // (q - 1)
    return out
