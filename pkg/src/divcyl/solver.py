"""Exact rational machinery for hyperplane-spectrum equations.

Everything here is integer/Fraction arithmetic: systems are built with exact
coefficients, enumeration returns exact nonnegative integer solutions, and
the linear-programming bounds come from exhaustive basic-solution
enumeration, so every bound is an exact rational, not a float.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .geometry import bracket


class SolverError(Exception):
    pass


class InfeasibleSystem(SolverError):
    pass


class BudgetExhausted(SolverError):
    """A capped enumeration ran out of steps before reaching a decision."""


Constraint = tuple[int, str, int]  # (index, op, value), op in {"==", "<=", ">="}


@dataclass(frozen=True)
class ExactSystem:
    """A small exact linear system over spectrum variables a_i.

    indices are the raw multiplicities; rows/rhs hold Fractions.  The tag
    records which family of equations produced the system.
    """

    tag: str
    q: int
    v: int
    n: int
    indices: tuple[int, ...]
    rows: tuple[tuple[Fraction, ...], ...]
    rhs: tuple[Fraction, ...]
    r: Optional[int] = None

    def residuals(self, assignment: dict) -> tuple[Fraction, ...]:
        vals = [Fraction(assignment.get(i, 0)) for i in self.indices]
        return tuple(
            sum(c * x for c, x in zip(row, vals)) - b
            for row, b in zip(self.rows, self.rhs)
        )

    def column(self, index: int) -> tuple[Fraction, ...]:
        j = self.indices.index(index)
        return tuple(row[j] for row in self.rows)


@dataclass(frozen=True)
class SpectrumSolution:
    """One nonnegative integer solution; residuals are kept as a zero check."""

    assignment: tuple[tuple[int, int], ...]
    residuals: tuple[Fraction, ...]

    def as_dict(self) -> dict[int, int]:
        return dict(self.assignment)

    def __getitem__(self, index: int) -> int:
        return dict(self.assignment).get(index, 0)

    def as_tuple(self, indices: Sequence[int]) -> tuple[int, ...]:
        d = dict(self.assignment)
        return tuple(d.get(i, 0) for i in indices)


@dataclass(frozen=True)
class AffineForm:
    """constant + sum of coeff * a_free, exact in every coefficient."""

    constant: Fraction
    coeffs: tuple[tuple[int, Fraction], ...]

    def evaluate(self, assignment: dict) -> Fraction:
        return self.constant + sum(
            c * Fraction(assignment.get(i, 0)) for i, c in self.coeffs
        )

    def render(self, var: str = "a") -> str:
        parts = [_fmt_frac(self.constant)]
        for i, c in self.coeffs:
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            head = f"{var}{i}" if mag == 1 else f"{_fmt_frac(mag)}*{var}{i}"
            parts.append(f"{sign} {head}")
        return " ".join(parts)


def _fmt_frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ------------------------------------------------------------ constructors


def standard_system(n: int, v: int, q: int, spanning: bool = False) -> ExactSystem:
    """The three double-counting identities for an n-multiset in PG(v-1,q).

    Variables are a_0..a_n; spanning drops a_n (forces it to zero).  The
    third equation counts point pairs and is exact for sets.
    """
    if n < 0 or v < 2:
        raise SolverError("need n >= 0 and v >= 2")
    indices = tuple(range(n + 1 - (1 if spanning and n > 0 else 0)))
    rows = (
        tuple(Fraction(1) for _ in indices),
        tuple(Fraction(i) for i in indices),
        tuple(Fraction(i * (i - 1), 2) for i in indices),
    )
    rhs = (
        Fraction(bracket(v, q)),
        Fraction(n * bracket(v - 1, q)),
        Fraction(n * (n - 1), 2) * bracket(v - 2, q),
    )
    return ExactSystem("standard", q, v, n, indices, rows, rhs)


def divisible_system(v: int, r: int, q: int) -> ExactSystem:
    """Spectrum equations for a spanning q^r-divisible set of q^(r+1) points.

    Hyperplane multiplicities are then restricted to 0, q^r, ..., (q-1)q^r,
    and the standard identities collapse to three equations in the q
    variables a_0, a_{q^r}, ..., a_{(q-1)q^r} (indices stored raw).
    """
    if v < r + 2:
        raise SolverError("need v >= r + 2")
    d = q ** r
    indices = tuple(i * d for i in range(q))
    rows = (
        tuple(Fraction(q - 1) for _ in range(q)),
        tuple(Fraction((q - 1) * i) for i in range(q)),
        tuple(Fraction((q - 1) * i * (i * d - 1)) for i in range(q)),
    )
    rhs = (
        Fraction(q ** v - 1),
        Fraction(q * (q ** (v - 1) - 1)),
        Fraction(q * (q ** (r + 1) - 1) * (q ** (v - 2) - 1)),
    )
    return ExactSystem("divisible", q, v, q ** (r + 1), indices, rows, rhs, r=r)


def plane_line_system(q: int, n: int, allowed: Iterable[int]) -> ExactSystem:
    """Line spectrum equations for n points in a plane, multiplicities capped."""
    if n > q * q:
        raise SolverError("a plane section of a divisible set has at most q^2 points")
    return restrict(standard_system(n, 3, q), allowed, tag="plane-line")


def restrict(system: ExactSystem, allowed: Iterable[int], tag: Optional[str] = None) -> ExactSystem:
    """Force variables outside `allowed` to zero by dropping their columns."""
    keep = [j for j, i in enumerate(system.indices) if i in set(allowed)]
    return ExactSystem(
        tag or system.tag,
        system.q,
        system.v,
        system.n,
        tuple(system.indices[j] for j in keep),
        tuple(tuple(row[j] for j in keep) for row in system.rows),
        system.rhs,
        r=system.r,
    )


# ------------------------------------------------------- exact elimination


def _gauss_jordan(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """In-place reduced echelon form; returns (matrix, pivot column list)."""
    nrow = len(rows)
    ncol = len(rows[0]) if nrow else 0
    pivots: list[int] = []
    rank = 0
    for col in range(ncol):
        src = next((r for r in range(rank, nrow) if rows[r][col] != 0), None)
        if src is None:
            continue
        rows[rank], rows[src] = rows[src], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [c * inv for c in rows[rank]]
        for r in range(nrow):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        pivots.append(col)
        rank += 1
    return rows, pivots


def _solve_square(cols: list[tuple[Fraction, ...]], rhs: Sequence[Fraction]) -> Optional[list[Fraction]]:
    """Unique solution of the system with the given columns, if it exists."""
    m = len(rhs)
    k = len(cols)
    aug = [[cols[j][r] for j in range(k)] + [rhs[r]] for r in range(m)]
    red, pivots = _gauss_jordan(aug)
    if k in pivots:
        return None  # inconsistent: a pivot fell into the rhs column
    if len(pivots) != k:
        return None  # dependent columns: no unique solution
    sol = [Fraction(0)] * k
    for r, col in enumerate(pivots):
        sol[col] = red[r][k]
    return sol


# ------------------------------------------------------------ enumeration


def parse_constraints(text: str) -> tuple[Constraint, ...]:
    """Parse 'a5<=1,a0>=8,a3=2' into (index, op, value) triples."""
    out: list[Constraint] = []
    for chunk in re.split(r"[,;\s]+", text.strip()):
        if not chunk:
            continue
        m = re.fullmatch(r"a(\d+)(<=|>=|==|=)(-?\d+)", chunk)
        if not m:
            raise SolverError(f"cannot parse constraint {chunk!r}")
        op = "==" if m.group(2) in ("=", "==") else m.group(2)
        out.append((int(m.group(1)), op, int(m.group(3))))
    return tuple(out)


class _SearchBudget(Exception):
    """Internal: the step cap of a bounded enumeration ran out."""


def _fold_bounds(
    sys2: ExactSystem, extra: Iterable[Constraint]
) -> Optional[tuple[dict[int, int], dict[int, Optional[int]]]]:
    """Per-variable integer bounds from the extra constraints, None if absurd."""
    lo = {i: 0 for i in sys2.indices}
    hi: dict[int, Optional[int]] = {i: None for i in sys2.indices}
    for idx, op, val in extra:
        if idx not in lo:
            # constraining a variable that is forced to zero
            if (op == "==" and val != 0) or (op == ">=" and val > 0):
                return None
            continue
        if op == "==":
            lo[idx] = max(lo[idx], val)
            hi[idx] = val if hi[idx] is None else min(hi[idx], val)
        elif op == "<=":
            hi[idx] = val if hi[idx] is None else min(hi[idx], val)
        elif op == ">=":
            lo[idx] = max(lo[idx], val)
        else:
            raise SolverError(f"unknown constraint operator {op!r}")
    if any(h is not None and lo[i] > h for i, h in hi.items()):
        return None
    return lo, hi


def enumerate_integer_spectra(
    system: ExactSystem,
    allowed: Optional[Iterable[int]] = None,
    extra: Iterable[Constraint] = (),
    limit: Optional[int] = None,
    step_cap: Optional[int] = None,
) -> list[SpectrumSolution]:
    """Nonnegative integer solutions; empty list means infeasible.

    Backtracking over variables in descending index order with exact budget
    pruning per equation; completeness needs every coefficient nonnegative,
    which all the constructors above provide.  With `limit` the search stops
    after that many solutions, which turns the call into a cheap feasibility
    probe (limit=1) even when the full solution set is enormous.  A step_cap
    bounds the number of search nodes and raises SolverError when exceeded.
    """
    sys2 = restrict(system, allowed) if allowed is not None else system
    nvar = len(sys2.indices)

    bounds = _fold_bounds(sys2, extra)
    if bounds is None:
        return []
    lo, hi = bounds

    # clear denominators so residual arithmetic stays in plain ints
    int_rows: list[list[int]] = []
    int_rhs: list[int] = []
    for row, b in zip(sys2.rows, sys2.rhs):
        lcm = math.lcm(b.denominator, *(c.denominator for c in row))
        int_rows.append([int(c * lcm) for c in row])
        int_rhs.append(int(b * lcm))
    if any(c < 0 for row in int_rows for c in row):
        raise SolverError("enumeration requires nonnegative coefficients")

    order = sorted(range(nvar), key=lambda j: -sys2.indices[j])
    neq = len(int_rows)

    # static upper bounds; the guarded error fires when a variable is free
    cap: list[int] = []
    for j in order:
        best: Optional[int] = hi[sys2.indices[j]]
        for k in range(neq):
            c = int_rows[k][j]
            if c > 0 and int_rhs[k] >= 0:
                b = int_rhs[k] // c
                best = b if best is None else min(best, b)
        if best is None:
            raise SolverError("unbounded variable box")
        cap.append(max(best, 0))

    # suffix maxima: the most positions t.. can contribute to each equation
    suffix = [[0] * (nvar + 1) for _ in range(neq)]
    for t in range(nvar - 1, -1, -1):
        j = order[t]
        for k in range(neq):
            suffix[k][t] = suffix[k][t + 1] + cap[t] * int_rows[k][j]

    solutions: list[tuple[int, ...]] = []
    values = [0] * nvar
    steps = 0

    def rec(t: int, res: list[int]):
        nonlocal steps
        steps += 1
        if step_cap is not None and steps > step_cap:
            raise _SearchBudget
        if limit is not None and len(solutions) >= limit:
            return
        if t == nvar:
            if all(x == 0 for x in res):
                solutions.append(tuple(values))
            return
        j = order[t]
        idx = sys2.indices[j]
        ub = cap[t]
        lb = lo[idx]
        for k in range(neq):
            c = int_rows[k][j]
            if res[k] < 0:
                return
            if c > 0:
                ub = min(ub, res[k] // c)
                need = res[k] - suffix[k][t + 1]
                if need > 0:
                    lb = max(lb, -(-need // c))
            elif res[k] > suffix[k][t + 1]:
                return
        if lb > ub:
            return
        for x in range(lb, ub + 1):
            values[j] = x
            rec(t + 1, [rk - x * int_rows[k][j] for k, rk in enumerate(res)])
            if limit is not None and len(solutions) >= limit:
                break
        values[j] = 0

    try:
        rec(0, list(int_rhs))
    except _SearchBudget:
        raise BudgetExhausted("enumeration step budget exhausted") from None
    solutions.sort()
    out = []
    for tup in solutions:
        assignment = tuple(zip(sys2.indices, tup))
        resid = sys2.residuals(dict(assignment))
        assert all(x == 0 for x in resid)
        out.append(SpectrumSolution(assignment, resid))
    return out


def has_integer_spectrum(
    system: ExactSystem,
    allowed: Optional[Iterable[int]] = None,
    extra: Iterable[Constraint] = (),
    step_cap: int = 200_000,
) -> Optional[bool]:
    """Does a nonnegative integer solution exist?  True, False, or None.

    Systems whose equality part leaves at most one degree of freedom are
    decided exactly however large the numbers get: the single parameter is
    pinned down by an exact rational interval plus a congruence, so no
    value scan is needed.  Everything else falls back to the bounded
    backtracking search, and None means the step budget ran out before a
    decision, i.e. the question is left open rather than answered.
    """
    sys2 = restrict(system, allowed) if allowed is not None else system
    nvar = len(sys2.indices)
    if nvar == 0:
        return all(b == 0 for b in sys2.rhs)

    if not extra:
        aug = [list(row) + [b] for row, b in zip(sys2.rows, sys2.rhs)]
        red, pivots = _gauss_jordan(aug)
        if nvar in pivots:
            return False  # inconsistent equalities
        free_cols = [j for j in range(nvar) if j not in pivots]
        if len(free_cols) == 0:
            sol = [Fraction(0)] * nvar
            for k, col in enumerate(pivots):
                sol[col] = red[k][nvar]
            return all(x >= 0 and x.denominator == 1 for x in sol)
        if len(free_cols) == 1:
            fc = free_cols[0]
            # every pivot variable is an exact affine form c + d*t
            forms = [(red[k][nvar], -red[k][fc]) for k in range(len(pivots))]
            return _affine_line_has_lattice_point(forms)

    try:
        found = enumerate_integer_spectra(
            sys2, extra=extra, limit=1, step_cap=step_cap
        )
    except BudgetExhausted:
        return None
    return bool(found)


def _affine_line_has_lattice_point(forms: Sequence[tuple[Fraction, Fraction]]) -> bool:
    """Is there an integer t >= 0 with c + d*t a nonnegative integer for all forms?"""
    tlo = Fraction(0)
    thi: Optional[Fraction] = None
    residue, modulus = 0, 1
    for c, d in forms:
        if d == 0:
            if c < 0 or c.denominator != 1:
                return False
            continue
        bound = -c / d
        if d > 0:
            tlo = max(tlo, bound)
        else:
            thi = bound if thi is None else min(thi, bound)
        lcm = math.lcm(c.denominator, d.denominator)
        if lcm > 1:
            a = int(d * lcm) % lcm
            b = (-int(c * lcm)) % lcm
            g = math.gcd(a, lcm)
            if b % g:
                return False
            m2 = lcm // g
            r2 = (b // g) * pow(a // g, -1, m2) % m2 if m2 > 1 else 0
            g2 = math.gcd(modulus, m2)
            if (residue - r2) % g2:
                return False
            # merge t = residue (mod modulus) with t = r2 (mod m2)
            lift = (r2 - residue) // g2 * pow(modulus // g2, -1, m2 // g2) if m2 > g2 else 0
            merged = residue + modulus * (lift % (m2 // g2)) if m2 > g2 else residue
            modulus = modulus // g2 * m2
            residue = merged % modulus
    lo_int = math.ceil(tlo)
    first = lo_int + (residue - lo_int) % modulus
    if thi is None:
        return True
    return first <= math.floor(thi)


# -------------------------------------------------------- parametric form


def parametric_solve(system: ExactSystem, free: Sequence[int]) -> dict[int, AffineForm]:
    """Express the non-free variables as exact affine forms in the free ones."""
    free = list(free)
    if len(set(free)) != len(free) or any(i not in system.indices for i in free):
        raise SolverError("free variables must be distinct system indices")
    pivots = [i for i in system.indices if i not in free]
    neq = len(system.rows)
    if len(pivots) != neq:
        raise SolverError(
            f"need exactly {neq} pivot variables, got {len(pivots)}"
        )
    pos = {i: j for j, i in enumerate(system.indices)}
    # augmented system: pivot block | rhs | -free columns
    aug = []
    for k, row in enumerate(system.rows):
        line = [row[pos[i]] for i in pivots]
        line.append(system.rhs[k])
        line.extend(-row[pos[i]] for i in free)
        aug.append(line)
    red, pivcols = _gauss_jordan(aug)
    if pivcols != list(range(neq)):
        raise SolverError("singular pivot block")
    out = {}
    for k, i in enumerate(pivots):
        const = red[k][neq]
        coeffs = tuple(
            (f, red[k][neq + 1 + t]) for t, f in enumerate(free) if red[k][neq + 1 + t]
        )
        out[i] = AffineForm(const, coeffs)
    return out


# ------------------------------------------------------------- exact LP


def bound_spectrum_value(system: ExactSystem, index: int, direction: str) -> Fraction:
    """Exact min or max of a_index over the nonnegative solution polytope.

    Works by enumerating candidate basic solutions: every vertex is the
    unique solution supported on some independent set of at most
    len(rhs) columns.  Boundedness comes from an all-positive equation row,
    which is checked before trusting a maximum.
    """
    if direction not in ("min", "max"):
        raise SolverError("direction must be 'min' or 'max'")
    if index not in system.indices:
        raise SolverError(f"a{index} is not a variable of this system")
    if not any(
        all(c > 0 for c in row) and b >= 0
        for row, b in zip(system.rows, system.rhs)
    ):
        raise SolverError("cannot certify a bounded polytope")
    nvar = len(system.indices)
    neq = len(system.rhs)
    cols = [system.column(i) for i in system.indices]
    best: Optional[Fraction] = None
    for size in range(0, min(neq, nvar) + 1):
        for subset in combinations(range(nvar), size):
            sol = _solve_square([cols[j] for j in subset], system.rhs)
            if sol is None or any(x < 0 for x in sol):
                continue
            val = Fraction(0)
            for j, x in zip(subset, sol):
                if system.indices[j] == index:
                    val = x
            if best is None:
                best = val
            elif direction == "min":
                best = min(best, val)
            else:
                best = max(best, val)
    if best is None:
        raise InfeasibleSystem("no feasible point")
    return best


# ------------------------------------------------- closed-form certificates


def min_count_full_step(v: int, r: int, q: int) -> Fraction:
    """Lower bound for a_{q^r}: [v]_q - (q^(v-r-1) - q + 1)."""
    return Fraction(bracket(v, q) - (q ** (v - r - 1) - q + 1))


def max_count_empty(v: int, r: int, q: int) -> Fraction:
    """Upper bound for a_0: (q^(v-r-1) - q + 2) / 2."""
    return Fraction(q ** (v - r - 1) - q + 2, 2)


def min_count_empty(v: int, r: int, q: int) -> Fraction:
    """Lower bound for a_0: (q^(v-r-1) - 1) / (q - 1)."""
    return Fraction(q ** (v - r - 1) - 1, q - 1)
