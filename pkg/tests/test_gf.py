import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from divcyl.gf import (
    FieldError, GF, default_modulus, make_field, poly_is_irreducible,
    subfield_embedding,
)

SMALL_Q = [2, 3, 4, 5, 7, 8, 9]


def gf4_oracle():
    """GF(4) built by hand from polynomial arithmetic mod x^2+x+1."""
    add = {}
    mul = {}
    for a, b in itertools.product(range(4), repeat=2):
        a0, a1 = a & 1, a >> 1
        b0, b1 = b & 1, b >> 1
        add[a, b] = (a0 ^ b0) | ((a1 ^ b1) << 1)
        # (a0 + a1 x)(b0 + b1 x) mod x^2+x+1 over GF(2)
        c0 = a0 * b0
        c1 = a0 * b1 + a1 * b0
        c2 = a1 * b1
        c0, c1 = (c0 + c2) % 2, (c1 + c2) % 2
        mul[a, b] = c0 | (c1 << 1)
    return add, mul


def test_gf4_matches_polynomial_oracle():
    F = make_field(4)
    add, mul = gf4_oracle()
    for a, b in itertools.product(range(4), repeat=2):
        assert F.add(a, b) == add[a, b]
        assert F.mul(a, b) == mul[a, b]
    assert F.mul(2, 2) == 3  # x * x = x + 1


def test_default_moduli():
    assert default_modulus(2, 2) == (1, 1, 1)          # x^2+x+1
    assert default_modulus(2, 3) == (1, 0, 1, 1)       # x^3+x^2+1
    assert default_modulus(3, 2) == (1, 0, 1)          # x^2+1
    # each is genuinely the first irreducible in low-degree-first order
    assert not poly_is_irreducible((1, 0, 0, 1), 2)    # x^3+1 = (x+1)(x^2+x+1)


def test_tables_are_latin_squares():
    for q in SMALL_Q:
        F = make_field(q)
        for a in range(q):
            assert sorted(F.ADD[a]) == list(range(q))
        for a in range(1, q):
            assert sorted(int(F.MUL[a, b]) for b in range(q)) == list(range(q))


@pytest.mark.parametrize("q", SMALL_Q)
def test_field_axioms_exhaustive(q):
    F = make_field(q)
    els = range(q)
    for a, b in itertools.product(els, repeat=2):
        assert F.add(a, b) == F.add(b, a)
        assert F.mul(a, b) == F.mul(b, a)
    for a, b, c in itertools.product(els, repeat=3):
        assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    for a in els:
        assert F.add(a, 0) == a
        assert F.mul(a, 1) == a
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
            assert F.div(1, a) == F.inv(a)


def test_sub_and_pow():
    F = make_field(9)
    for a, b in itertools.product(range(9), repeat=2):
        assert F.add(F.sub(a, b), b) == a
    for a in range(1, 9):
        assert F.pow(a, 8) == 1        # unit group has order q-1
        assert F.pow(a, -1) == F.inv(a)
    assert F.pow(0, 0) == 1
    assert F.pow(0, 5) == 0
    with pytest.raises(FieldError):
        F.div(3, 0)
    with pytest.raises(FieldError):
        F.pow(0, -2)


def test_arith_dispatch():
    F = make_field(4)
    assert F.arith("mul", 2, 2) == 3
    assert F.arith("add", 2, 3) == 1
    with pytest.raises(FieldError):
        F.arith("xor", 1, 1)


@pytest.mark.parametrize("q", [4, 8, 9, 16, 27, 81])
def test_frobenius_is_automorphism_fixing_prime_field(q):
    F = make_field(q)
    fr = F.frobenius(1)
    for a, b in itertools.product(range(q), repeat=2):
        assert fr[F.add(a, b)] == F.add(int(fr[a]), int(fr[b]))
        assert fr[F.mul(a, b)] == F.mul(int(fr[a]), int(fr[b]))
    fixed = [a for a in range(q) if fr[a] == a]
    assert fixed == list(range(F.p))
    # the h powers are pairwise distinct and close under composition
    autos = F.automorphisms()
    assert len({aut.tobytes() for aut in autos}) == F.h
    comp = autos[1 % F.h][autos[1 % F.h]]
    assert np.array_equal(comp, autos[2 % F.h])


def test_modulus_validation():
    with pytest.raises(FieldError):
        make_field(4, modulus=(1, 0, 1))   # x^2+1 = (x+1)^2 over GF(2)
    with pytest.raises(FieldError):
        make_field(6)
    with pytest.raises(FieldError):
        GF(4)                              # 4 is not prime
    F = make_field(8, modulus=(1, 1, 0, 1))  # the other irreducible cubic
    assert F.mul(2, 2) == 4
    assert F != make_field(8)


@pytest.mark.parametrize("q,ext_q", [(2, 4), (2, 16), (4, 16), (3, 9), (3, 81), (9, 81), (2, 8), (5, 25)])
def test_subfield_embedding_is_injective_homomorphism(q, ext_q):
    B, E = make_field(q), make_field(ext_q)
    emb = subfield_embedding(B, E)
    assert len(set(emb.image)) == q
    assert emb(0) == 0 and emb(1) == 1
    for a, b in itertools.product(range(q), repeat=2):
        assert emb(B.add(a, b)) == E.add(emb(a), emb(b))
        assert emb(B.mul(a, b)) == E.mul(emb(a), emb(b))
    # image is exactly the set of elements fixed by x -> x^q
    fixed = {a for a in range(ext_q) if E.pow(a, q) == a}
    assert set(emb.image) == fixed


def test_prime_field_embeds_as_identity_codes():
    emb = subfield_embedding(make_field(2), make_field(4))
    assert emb.image == (0, 1)
    emb3 = subfield_embedding(make_field(3), make_field(9))
    assert emb3.image == (0, 1, 2)


def test_embedding_rejects_mismatches():
    with pytest.raises(FieldError):
        subfield_embedding(make_field(4), make_field(8))
    with pytest.raises(FieldError):
        subfield_embedding(make_field(2), make_field(9))


@settings(derandomize=True, max_examples=60)
@given(st.sampled_from(SMALL_Q), st.data())
def test_inverse_roundtrip(q, data):
    F = make_field(q)
    a = data.draw(st.integers(0, q - 1))
    b = data.draw(st.integers(1, q - 1))
    assert F.mul(F.div(a, b), b) == a
    assert F.sub(F.add(a, b), b) == a
