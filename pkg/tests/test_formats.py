"""Text and JSON serialization round trips."""

import json

import pytest

from divcyl.codes import GeneratorMatrix
from divcyl.formats import (
    FIXTURE_DIR,
    FormatError,
    dump_matrix,
    dump_pointset,
    dump_spectrum,
    fixture_matrix,
    parse_matrix,
    parse_pointset,
    parse_spectrum,
    read_matrix,
    read_pointset,
    write_matrix,
    write_pointset,
)
from divcyl.gf import make_field
from divcyl.geometry import projective_space
from divcyl.pointsets import PointMultiset, spectrum

F2 = make_field(2)
F3 = make_field(3)


def test_fixture_files_round_trip_byte_identically():
    for name in ("ce_16_5_q4.mat", "arc_10_3_q5.mat"):
        text = (FIXTURE_DIR / name).read_text()
        g = parse_matrix(text)
        assert dump_matrix(g) == text


def test_matrix_round_trip_through_files(tmp_path):
    g = GeneratorMatrix(F3, ((1, 0, 2), (0, 1, 1)))
    path = tmp_path / "g.mat"
    write_matrix(path, g)
    assert read_matrix(path) == g


def test_pointset_round_trip_with_multiplicities(tmp_path):
    sp = projective_space(F3, 3)
    m = PointMultiset.from_point_ids(sp, [0, 0, 0, 2, 5, 5])
    text = dump_pointset(m)
    assert " x3" in text and " x2" in text
    assert parse_pointset(text) == m
    path = tmp_path / "m.pts"
    write_pointset(path, m)
    assert read_pointset(path) == m
    assert dump_pointset(parse_pointset(text)) == text


def test_pointset_header_and_point_validation():
    with pytest.raises(FormatError, match="header"):
        parse_pointset("v 3 q 2\n110\n")
    with pytest.raises(FormatError, match="normalized"):
        parse_pointset("q 3 v 3\n210\n")
    with pytest.raises(FormatError, match="zero vector"):
        parse_pointset("q 2 v 3\n000\n")
    with pytest.raises(FormatError, match="range"):
        parse_pointset("q 2 v 3\n120\n")
    with pytest.raises(FormatError, match="symbols"):
        parse_pointset("q 2 v 3\n11\n")
    with pytest.raises(FormatError, match="empty"):
        parse_pointset("   \n")
    with pytest.raises(FormatError, match="positive"):
        parse_pointset("q 2 v 3\n110 x0\n")


def test_matrix_validation():
    with pytest.raises(FormatError, match="header"):
        parse_matrix("q 2 k 2\n10\n01\n")
    with pytest.raises(FormatError, match="expected 2 rows"):
        parse_matrix("q 2 k 2 n 3\n101\n")
    with pytest.raises(FormatError, match="range"):
        parse_matrix("q 2 k 1 n 3\n102\n")
    with pytest.raises(FormatError):
        parse_matrix("q 11 k 1 n 2\n10\n")


def test_spectrum_json_round_trip():
    sp = projective_space(F2, 3)
    m = PointMultiset.from_point_ids(sp, [0, 1, 2, 4])
    spec = spectrum(m, 1)
    text = dump_spectrum(spec)
    assert parse_spectrum(text) == spec
    payload = json.loads(text)
    assert list(payload) == ["codim", "n", "v", "q", "a"]
    keys = [int(k) for k in payload["a"]]
    assert keys == sorted(keys)


def test_spectrum_json_rejects_garbage():
    with pytest.raises(FormatError):
        parse_spectrum("not json")
    with pytest.raises(FormatError):
        parse_spectrum('{"q": 2}')


def test_fixture_loader_names_available_fixtures():
    with pytest.raises(FormatError, match="arc_10_3_q5.mat"):
        fixture_matrix("nope.mat")
