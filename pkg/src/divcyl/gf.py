"""Arithmetic in small finite fields GF(p^h), q = p^h <= 81.

Elements are plain integers 0..q-1.  A code is read base p as the coefficient
vector, low degree first, of a polynomial of degree < h over GF(p); code 0 is
the zero element and code 1 the one element.  For h > 1 multiplication is done
modulo an explicit irreducible monic polynomial.  All binary operations are
backed by dense q x q numpy tables so they vectorise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

MAX_Q = 81


class FieldError(ValueError):
    """Raised for invalid field constructions or arithmetic requests."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# -- polynomial helpers over GF(p), coefficient tuples low degree first --

def _poly_trim(c: Sequence[int]) -> tuple[int, ...]:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def _poly_mod(a: Sequence[int], b: Sequence[int], p: int) -> tuple[int, ...]:
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    lb_inv = pow(lb, p - 2, p)
    while len(a) - 1 >= db and _poly_trim(a):
        a = list(_poly_trim(a))
        if len(a) - 1 < db:
            break
        shift = len(a) - 1 - db
        f = a[-1] * lb_inv % p
        for i, bc in enumerate(b):
            a[shift + i] = (a[shift + i] - f * bc) % p
    return _poly_trim(a)


def _poly_mulmod(a, b, mod, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ca in enumerate(a):
        if not ca:
            continue
        for j, cb in enumerate(b):
            out[i + j] = (out[i + j] + ca * cb) % p
    return _poly_mod(out, mod, p)


def poly_is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    """Irreducibility of a monic polynomial over GF(p) by trial division."""
    c = _poly_trim(coeffs)
    deg = len(c) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    if c[0] == 0:  # divisible by x
        return False
    # trial divide by every monic polynomial of degree 1 .. deg // 2
    for d in range(1, deg // 2 + 1):
        for tail in range(p**d):
            div = [tail // p**i % p for i in range(d)] + [1]
            if not _poly_mod(c, div, p):
                return False
    return True


def default_modulus(p: int, h: int) -> tuple[int, ...]:
    """Lexicographically least irreducible monic modulus of degree h.

    Coefficient tuples are compared low degree first, which makes the choice
    reproducible without any table of Conway polynomials.
    """
    if h == 1:
        return (0, 1)
    for tail in range(p**h):
        # c0 is the most significant digit: low-degree-first comparison
        cand = tuple(tail // p ** (h - 1 - i) % p for i in range(h)) + (1,)
        if poly_is_irreducible(cand, p):
            return cand
    raise FieldError(f"no irreducible polynomial of degree {h} over GF({p})")


class GF:
    """A concrete finite field with dense add/mul/inv tables."""

    def __init__(self, p: int, h: int = 1, modulus: Optional[Sequence[int]] = None):
        if not _is_prime(p):
            raise FieldError(f"{p} is not prime")
        if h < 1 or p**h > MAX_Q:
            raise FieldError(f"GF({p}^{h}) is outside the supported range q <= {MAX_Q}")
        self.p = p
        self.h = h
        self.q = p**h
        if modulus is None:
            modulus = default_modulus(p, h)
        modulus = tuple(int(c) % p for c in modulus)
        if h == 1:
            if _poly_trim(modulus) != (0, 1):
                raise FieldError("prime fields take the fixed modulus x")
        else:
            if len(modulus) != h + 1 or modulus[-1] != 1:
                raise FieldError("modulus must be monic of degree h")
            if not poly_is_irreducible(modulus, p):
                raise FieldError(f"modulus {modulus} is reducible over GF({p})")
        self.modulus = modulus
        self._build_tables()

    # element code <-> coefficient vector, low degree first
    def coeffs(self, a: int) -> tuple[int, ...]:
        return tuple(a // self.p**i % self.p for i in range(self.h))

    def from_coeffs(self, c: Sequence[int]) -> int:
        return sum(int(ci) % self.p * self.p**i for i, ci in enumerate(c))

    def _build_tables(self):
        p, h, q = self.p, self.h, self.q
        add = np.zeros((q, q), dtype=np.uint8)
        mul = np.zeros((q, q), dtype=np.uint8)
        for a in range(q):
            ca = self.coeffs(a)
            for b in range(a, q):
                cb = self.coeffs(b)
                s = self.from_coeffs((x + y) % p for x, y in zip(ca, cb))
                add[a, b] = add[b, a] = s
                pr = _poly_mulmod(_poly_trim(ca), _poly_trim(cb), self.modulus, p)
                m = self.from_coeffs(pr + (0,) * h)
                mul[a, b] = mul[b, a] = m
        self.ADD = add
        self.MUL = mul
        neg = np.zeros(q, dtype=np.uint8)
        inv = np.zeros(q, dtype=np.uint8)
        for a in range(q):
            neg[a] = next(b for b in range(q) if add[a, b] == 0)
            if a:
                inv[a] = next(b for b in range(1, q) if mul[a, b] == 1)
        self.NEG = neg
        self.INV = inv
        sub = add[:, neg]  # sub[a, b] = a + (-b)
        self.SUB = np.ascontiguousarray(sub)
        # frobenius powers x -> x^(p^i), as code permutation tables
        frob = [np.arange(q, dtype=np.uint8)]
        for _ in range(1, h):
            prev = frob[-1]
            frob.append(np.array([self.pow(int(prev[a]), p) for a in range(q)], dtype=np.uint8))
        self.FROB = frob

    # -- scalar operations --

    def add(self, a: int, b: int) -> int:
        return int(self.ADD[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self.SUB[a, b])

    def mul(self, a: int, b: int) -> int:
        return int(self.MUL[a, b])

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise FieldError("division by zero")
        return int(self.MUL[a, self.INV[b]])

    def neg(self, a: int) -> int:
        return int(self.NEG[a])

    def inv(self, a: int) -> int:
        if a == 0:
            raise FieldError("zero has no inverse")
        return int(self.INV[a])

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a, e = self.inv(a), -e
        r, base = 1, a
        while e:
            if e & 1:
                r = self.mul(r, base)
            base = self.mul(base, base)
            e >>= 1
        return r

    def arith(self, op: str, a: int, b: int) -> int:
        """Single dispatch point for the binary operations."""
        try:
            f = {"add": self.add, "sub": self.sub, "mul": self.mul,
                 "div": self.div, "pow": self.pow}[op]
        except KeyError:
            raise FieldError(f"unknown operation {op!r}") from None
        return f(a, b)

    def frobenius(self, e: int = 1) -> np.ndarray:
        """The automorphism x -> x^(p^e) as a code table."""
        return self.FROB[e % self.h]

    def automorphisms(self) -> list[np.ndarray]:
        return list(self.FROB)

    def elements(self) -> range:
        return range(self.q)

    def units(self) -> range:
        return range(1, self.q)

    def __repr__(self):
        return f"GF({self.q})"

    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.h, self.modulus) == (
            other.p, other.h, other.modulus)

    def __hash__(self):
        return hash((self.p, self.h, self.modulus))


_FIELD_CACHE: dict[tuple, GF] = {}


def make_field(q: int, modulus: Optional[Sequence[int]] = None) -> GF:
    """Field of order q = p^h, with the default modulus unless one is given."""
    p, h = None, None
    for cand_p in range(2, q + 1):
        if _is_prime(cand_p):
            e, x = 0, q
            while x % cand_p == 0:
                x //= cand_p
                e += 1
            if x == 1:
                p, h = cand_p, e
                break
    if p is None:
        raise FieldError(f"{q} is not a prime power")
    key = (p, h, tuple(modulus) if modulus is not None else None)
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = GF(p, h, modulus)
    return _FIELD_CACHE[key]


@dataclass(frozen=True)
class EmbeddingMap:
    """A field homomorphism GF(q) -> GF(q^s) as an image table."""

    source: GF
    target: GF
    image: tuple[int, ...]

    def __call__(self, a: int) -> int:
        return self.image[a]


def subfield_embedding(base: GF, ext: GF) -> EmbeddingMap:
    """Canonical embedding of base into ext.

    Requires equal characteristic and base.h | ext.h.  The base generator
    (code p) is sent to the root of the base modulus in ext with the smallest
    element code, and prime-field scalars map to themselves; that pins the
    embedding among the h conjugate choices.
    """
    if base.p != ext.p:
        raise FieldError("characteristics differ")
    if ext.h % base.h:
        raise FieldError(f"GF({base.q}) is not a subfield of GF({ext.q})")
    if base.h == 1:
        image = tuple(range(base.p))
    else:
        root = None
        for z in ext.elements():
            acc = 0
            for c in reversed(base.modulus):  # horner
                acc = ext.add(ext.mul(acc, z), c % ext.p)
            if acc == 0:
                root = z
                break
        if root is None:
            raise FieldError("base modulus has no root in the extension")
        image = []
        for a in base.elements():
            val, zpow = 0, 1
            for c in base.coeffs(a):
                val = ext.add(val, ext.mul(c, zpow))
                zpow = ext.mul(zpow, root)
            image.append(val)
        image = tuple(image)
    emb = EmbeddingMap(base, ext, image)
    # paranoia: embeddings must be ring homomorphisms
    for a in (0, 1, base.q - 1, base.p % base.q):
        for b in (1, base.q - 1):
            assert emb(base.mul(a, b)) == ext.mul(emb(a), emb(b))
            assert emb(base.add(a, b)) == ext.add(emb(a), emb(b))
    return emb
