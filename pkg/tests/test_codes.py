"""Linear codes and their interplay with projective point sets."""

import itertools

import numpy as np
import pytest

from divcyl.codes import (
    CodeError,
    GeneratorMatrix,
    code_from_points,
    codeword,
    contains_word,
    effective_length,
    is_projective,
    points_from_code,
    reinterpret_prime_subfield,
    residual_code,
    spectrum_from_weights,
    weight_distribution,
)
from divcyl.formats import fixture_matrix
from divcyl.gf import make_field
from divcyl.geometry import projective_space
from divcyl.pointsets import PointMultiset, divisibility_exponent, spectrum

F2 = make_field(2)
F3 = make_field(3)
F4 = make_field(4)

SIMPLEX_7_3 = GeneratorMatrix(F2, (
    (1, 0, 0, 1, 1, 0, 1),
    (0, 1, 0, 1, 0, 1, 1),
    (0, 0, 1, 0, 1, 1, 1),
))


def weight(word):
    return sum(1 for c in word if c)


# ----------------------------------------------------------- construction


def test_generator_matrix_basic_properties():
    g = SIMPLEX_7_3
    assert (g.k, g.n) == (3, 7)
    assert g.column(3) == (1, 1, 0)
    assert g.array().shape == (3, 7)


def test_generator_matrix_rejects_rank_deficient_rows():
    with pytest.raises(CodeError):
        GeneratorMatrix(F2, ((1, 0, 1), (1, 0, 1)))


def test_generator_matrix_rejects_bad_symbols_and_shapes():
    with pytest.raises(CodeError):
        GeneratorMatrix(F2, ((0, 2, 1),))
    with pytest.raises(CodeError):
        GeneratorMatrix(F2, ((1, 0), (1, 0, 1)))
    with pytest.raises(CodeError):
        GeneratorMatrix(F2, ())


def test_codeword_and_membership():
    w = codeword(SIMPLEX_7_3, (1, 1, 0))
    assert w == (1, 1, 0, 0, 1, 1, 0)
    assert contains_word(SIMPLEX_7_3, w)
    assert not contains_word(SIMPLEX_7_3, (1, 0, 0, 0, 0, 0, 0))


# ---------------------------------------------------- weight distributions


def test_simplex_code_weight_distribution():
    wd = weight_distribution(SIMPLEX_7_3)
    assert wd.as_dict() == {0: 1, 4: 7}
    assert wd.polynomial() == "1z^0 + 7z^4"
    assert wd.polynomial(var="x") == "1x^0 + 7x^4"


def test_weight_distribution_invariants_random_codes():
    rng = np.random.default_rng(7)
    for field, k, n in [(F2, 4, 9), (F3, 3, 7), (F4, 2, 6)]:
        q = field.q
        for _ in range(6):
            rows = rng.integers(0, q, size=(k, n))
            try:
                g = GeneratorMatrix(field, tuple(map(tuple, rows.tolist())))
            except CodeError:
                continue
            wd = weight_distribution(g)
            assert wd.total() == q**k
            assert wd[0] == 1
            # each position that is not identically zero contributes
            # (q-1) q^(k-1) to the weight mass
            mass = sum(w * c for w, c in wd.as_dict().items())
            assert mass == (q - 1) * q ** (k - 1) * effective_length(g)


def test_weight_sweep_guard_rejects_huge_codes():
    rows = tuple(
        tuple(1 if i == j else 0 for j in range(25)) for i in range(25)
    )
    g = GeneratorMatrix(F2, rows)
    with pytest.raises(CodeError, match="sweep budget"):
        weight_distribution(g)


# ---------------------------------------------------------- the two fixtures


def test_fixture_16_5_q4_weight_distribution():
    g = fixture_matrix("ce_16_5_q4.mat")
    assert (g.k, g.n) == (5, 16)
    assert g.ambient_spanned
    assert is_projective(g)
    wd = weight_distribution(g)
    assert wd.as_dict() == {0: 1, 8: 90, 12: 840, 16: 93}


def test_fixture_16_5_q4_point_set_is_divisible():
    g = fixture_matrix("ce_16_5_q4.mat")
    m = points_from_code(g)
    assert m.is_set() and m.n == 16
    assert spectrum(m, 1).a == ((0, 31), (4, 280), (8, 30))
    assert divisibility_exponent(m) == 1  # 4-divisible but not 16-divisible


def test_weight_spectrum_duality_on_fixture():
    g = fixture_matrix("ce_16_5_q4.mat")
    wd = weight_distribution(g)
    assert spectrum_from_weights(wd, g.n, 4) == {0: 31, 4: 280, 8: 30}
    m = points_from_code(g)
    assert spectrum(m, 1).as_dict() == spectrum_from_weights(wd, g.n, 4)


def test_fixture_16_5_q4_reinterpreted_over_prime_subfield():
    g = fixture_matrix("ce_16_5_q4.mat")
    g2 = reinterpret_prime_subfield(g)
    assert g2.field.q == 2 and (g2.k, g2.n) == (5, 16)
    assert weight_distribution(g2).as_dict() == {0: 1, 8: 30, 16: 1}


def test_fixture_arc_10_3_q5():
    g = fixture_matrix("arc_10_3_q5.mat")
    assert (g.k, g.n) == (3, 10)
    assert is_projective(g)
    assert weight_distribution(g).as_dict() == {0: 1, 7: 40, 8: 60, 10: 24}
    m = points_from_code(g)
    assert m.is_set()
    assert spectrum(m, 1).a == ((0, 6), (2, 15), (3, 10))


# ----------------------------------------------------- points <-> matrices


def test_round_trip_points_to_code_and_back():
    sp = projective_space(F3, 3)
    m = PointMultiset.from_point_ids(sp, [0, 1, 4, 7, 9])
    g = code_from_points(m)
    assert g.ambient_spanned
    assert points_from_code(g) == m


def test_repeated_column_gives_multiplicity_two():
    g = GeneratorMatrix(F2, ((1, 1, 0), (0, 0, 1)))
    m = points_from_code(g)
    assert m.n == 3 and m.max_multiplicity() == 2
    assert not is_projective(g)


def test_identity_matrix_gives_unit_points():
    g = GeneratorMatrix(F3, ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    m = points_from_code(g)
    sp = m.space
    expected = {sp.point_id((1, 0, 0)), sp.point_id((0, 1, 0)),
                sp.point_id((0, 0, 1))}
    assert set(m.support()) == expected


def test_zero_columns_are_dropped_and_shrink_effective_length():
    g = GeneratorMatrix(F2, ((1, 0, 0, 1), (0, 0, 1, 1)))
    assert effective_length(g) == 3
    assert not is_projective(g)
    m = points_from_code(g)
    assert m.n == 3


def test_proportional_columns_collapse_to_one_point():
    # columns (1,2) and (2,4)=(2,1) over GF(3) name the same point
    g = GeneratorMatrix(F3, ((1, 2, 0), (2, 1, 1)))
    m = points_from_code(g)
    assert m.n == 3 and m.max_multiplicity() == 2


def test_non_spanning_point_set_is_flagged():
    sp = projective_space(F2, 3)
    ids = [pid for pid in range(sp.num_points)
           if sp.pts[pid][2] == 0][:3]
    m = PointMultiset.from_point_ids(sp, ids)
    g = code_from_points(m)
    assert not g.ambient_spanned
    assert g.k == m.spanning_dimension()


def test_code_from_empty_multiset_raises():
    sp = projective_space(F2, 3)
    with pytest.raises(CodeError):
        code_from_points(PointMultiset.from_point_ids(sp, []))


# ------------------------------------------------------------- residuals


def test_residual_of_simplex_code():
    w = codeword(SIMPLEX_7_3, (1, 0, 0))
    assert weight(w) == 4
    res = residual_code(SIMPLEX_7_3, w)
    assert (res.k, res.n) == (2, 3)
    assert weight_distribution(res).as_dict() == {0: 1, 2: 3}


def test_residual_length_is_complement_of_weight():
    g = fixture_matrix("ce_16_5_q4.mat")
    for msg in [(1, 0, 0, 0, 0), (0, 1, 0, 0, 0), (1, 1, 0, 1, 0)]:
        w = codeword(g, msg)
        if weight(w) == g.n:
            continue
        res = residual_code(g, w)
        assert res.n == g.n - weight(w)


def test_residual_of_binary_reinterpretation_stays_divisible():
    g2 = reinterpret_prime_subfield(fixture_matrix("ce_16_5_q4.mat"))
    w8 = next(
        codeword(g2, msg)
        for msg in itertools.product(range(2), repeat=5)
        if weight(codeword(g2, msg)) == 8
    )
    res = residual_code(g2, w8)
    assert (res.k, res.n) == (4, 8)
    wd = weight_distribution(res)
    assert wd.as_dict() == {0: 1, 4: 14, 8: 1}
    assert all(w % 4 == 0 for w in wd.weights())


def test_residual_rejects_bad_words():
    with pytest.raises(CodeError):
        residual_code(SIMPLEX_7_3, (0,) * 7)  # zero word
    with pytest.raises(CodeError):
        residual_code(SIMPLEX_7_3, (1, 0, 0, 0, 0, 0, 0))  # not in code
    with pytest.raises(CodeError):
        residual_code(SIMPLEX_7_3, (1, 0, 1))  # wrong length
    g = GeneratorMatrix(F2, ((1, 1),))
    with pytest.raises(CodeError):
        residual_code(g, (1, 1))  # full weight leaves nothing


def test_reinterpret_rejects_proper_extension_symbols():
    g = GeneratorMatrix(F4, ((1, 2, 0), (0, 1, 1)))
    with pytest.raises(CodeError):
        reinterpret_prime_subfield(g)
