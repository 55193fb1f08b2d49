"""Plain-text and JSON formats for the toolkit's artifacts.

All formats use single-digit field element codes (so q <= 9 on disk) and
round-trip byte-identically: parse(dump(x)) == x and dump(parse(s)) == s for
any s that dump could have produced.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .codes import GeneratorMatrix
from .gf import GF, make_field
from .geometry import projective_space
from .pointsets import PointMultiset, Spectrum

FIXTURE_DIR = Path(__file__).parent / "fixtures"


class FormatError(ValueError):
    pass


def _field_for(q: int, modulus: Optional[Sequence[int]]) -> GF:
    if q > 9:
        raise FormatError("text formats carry single-digit symbols, q <= 9")
    return make_field(q, tuple(modulus) if modulus is not None else None)


def _digits(token: str, width: int, q: int, where: str) -> tuple[int, ...]:
    if not re.fullmatch(r"[0-9]+", token):
        raise FormatError(f"{where}: expected digit string, got {token!r}")
    if len(token) != width:
        raise FormatError(f"{where}: expected {width} symbols, got {len(token)}")
    out = tuple(int(ch) for ch in token)
    if any(c >= q for c in out):
        raise FormatError(f"{where}: symbol out of range for q={q}")
    return out


# -------------------------------------------------------------- point sets


def dump_pointset(m: PointMultiset) -> str:
    lines = [f"q {m.space.q} v {m.v}"]
    for pid in m.support():
        coords = "".join(str(int(c)) for c in m.space.pts[pid])
        mult = m.multiplicity_of_point(pid)
        lines.append(coords if mult == 1 else f"{coords} x{mult}")
    return "\n".join(lines) + "\n"


def parse_pointset(text: str, modulus: Optional[Sequence[int]] = None) -> PointMultiset:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty point-set file")
    head = re.fullmatch(r"q\s+(\d+)\s+v\s+(\d+)", lines[0])
    if not head:
        raise FormatError(f"bad point-set header: {lines[0]!r}")
    q, v = int(head.group(1)), int(head.group(2))
    field = _field_for(q, modulus)
    sp = projective_space(field, v)
    counts = np.zeros(sp.num_points, dtype=np.int64)
    for ln in lines[1:]:
        m = re.fullmatch(r"([0-9]+)(?:\s+x(\d+))?", ln)
        if not m:
            raise FormatError(f"bad point line: {ln!r}")
        coords = _digits(m.group(1), v, q, "point")
        first = next((c for c in coords if c), None)
        if first is None:
            raise FormatError("zero vector is not a point")
        if first != 1:
            raise FormatError(f"point {m.group(1)} is not normalized")
        mult = int(m.group(2)) if m.group(2) else 1
        if mult < 1:
            raise FormatError("multiplicity must be positive")
        counts[sp.point_id(coords)] += mult
    return PointMultiset(sp, counts)


# ---------------------------------------------------------------- matrices


def dump_matrix(g: GeneratorMatrix) -> str:
    lines = [f"q {g.field.q} k {g.k} n {g.n}"]
    for row in g.rows:
        lines.append("".join(str(int(c)) for c in row))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str, modulus: Optional[Sequence[int]] = None) -> GeneratorMatrix:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty matrix file")
    head = re.fullmatch(r"q\s+(\d+)\s+k\s+(\d+)\s+n\s+(\d+)", lines[0])
    if not head:
        raise FormatError(f"bad matrix header: {lines[0]!r}")
    q, k, n = (int(head.group(i)) for i in (1, 2, 3))
    if len(lines) - 1 != k:
        raise FormatError(f"expected {k} rows, found {len(lines) - 1}")
    field = _field_for(q, modulus)
    rows = tuple(_digits(ln, n, q, f"row {i}") for i, ln in enumerate(lines[1:]))
    return GeneratorMatrix(field, rows)


# ----------------------------------------------------------------- spectra


def dump_spectrum(spec: Spectrum) -> str:
    payload = {
        "codim": spec.codim,
        "n": spec.n,
        "v": spec.v,
        "q": spec.q,
        "a": {str(i): c for i, c in spec.a},  # insertion order is ascending i
    }
    return json.dumps(payload) + "\n"


def parse_spectrum(text: str) -> Spectrum:
    try:
        payload = json.loads(text)
        a = tuple(sorted((int(i), int(c)) for i, c in payload["a"].items()))
        return Spectrum(
            q=int(payload["q"]),
            v=int(payload["v"]),
            n=int(payload["n"]),
            codim=int(payload["codim"]),
            a=a,
        )
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as e:
        raise FormatError(f"bad spectrum JSON: {e}") from e


# ---------------------------------------------------------------- witnesses


def dump_witness(witness) -> str:
    """Cylinder witness as JSON: axis RREF rows plus one point per part."""
    sp = witness.axis.space
    payload = {
        "q": sp.q,
        "v": sp.v,
        "axis": ["".join(str(int(c)) for c in row) for row in witness.axis.rows],
        "reps": [
            "".join(str(int(c)) for c in sp.pts[pid]) for pid in witness.rep_ids
        ],
    }
    return json.dumps(payload) + "\n"


# ------------------------------------------------------------ path helpers


def read_pointset(path, modulus=None) -> PointMultiset:
    return parse_pointset(Path(path).read_text(), modulus)


def write_pointset(path, m: PointMultiset) -> None:
    Path(path).write_text(dump_pointset(m))


def read_matrix(path, modulus=None) -> GeneratorMatrix:
    return parse_matrix(Path(path).read_text(), modulus)


def write_matrix(path, g: GeneratorMatrix) -> None:
    Path(path).write_text(dump_matrix(g))


def fixture_matrix(name: str) -> GeneratorMatrix:
    """Load one of the matrices shipped with the package."""
    path = FIXTURE_DIR / name
    if not path.exists():
        known = sorted(p.name for p in FIXTURE_DIR.glob("*.mat"))
        raise FormatError(f"no fixture {name!r}; shipped: {', '.join(known)}")
    return read_matrix(path)
