"""Table-based arithmetic for small finite fields GF(q).

Elements of GF(p^e) are encoded as integers 0..q-1: the element with
polynomial coordinates (c_0, ..., c_{e-1}) over GF(p) is encoded as
sum(c_i * p^i).  Encoding 0 is the zero element and encoding 1 is the
multiplicative identity.  Construction uses a fixed irreducible polynomial
per (p, e) so encodings are reproducible across runs and machines.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field

from .errors import DivisionByZero, NotPrimePower

# Monic irreducible polynomials used for the extension fields, given as
# coefficient tuples (c_0, c_1, ..., c_{e-1}) of x^e = -(c_0 + c_1 x + ...).
# These are the standard Conway polynomials, so GF(4) has x^2+x+1,
# GF(8) has x^3+x+1, GF(9) has x^2+2x+2, etc.
_IRREDUCIBLE = {
    (2, 2): (1, 1),
    (2, 3): (1, 1, 0),
    (2, 4): (1, 1, 0, 0),
    (2, 5): (1, 0, 1, 0, 0),
    (2, 6): (1, 1, 0, 1, 1, 0),
    (2, 7): (1, 1, 0, 0, 0, 0, 0),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0),
    (3, 2): (2, 2),
    (3, 3): (1, 2, 0),
    (3, 4): (2, 0, 0, 2),
    (5, 2): (2, 4),
    (5, 3): (3, 3, 0),
    (7, 2): (3, 6),
    (7, 3): (4, 0, 6),
    (11, 2): (2, 7),
    (13, 2): (2, 12),
}


def _factor_prime_power(q):
    """Return (p, e) with q = p^e, or raise NotPrimePower."""
    if q < 2:
        raise NotPrimePower(f"field size must be >= 2, got {q}")
    for p in range(2, q + 1):
        if p * p > q and p != q:
            break
        if q % p:
            continue
        e = 0
        m = q
        while m % p == 0:
            m //= p
            e += 1
        if m != 1:
            raise NotPrimePower(f"{q} is not a prime power")
        return p, e
    return q, 1


def _poly_mul_mod(a, b, red, p, e):
    """Multiply coefficient tuples a*b modulo the reduction rule x^e = red."""
    prod = [0] * (2 * e - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for deg in range(2 * e - 2, e - 1, -1):
        c = prod[deg]
        if c:
            prod[deg] = 0
            for j, rj in enumerate(red):
                prod[deg - e + j] = (prod[deg - e + j] + c * rj) % p
    return tuple(prod[:e])


def _lex_min_irreducible(p, e):
    """Deterministic fallback: lexicographically smallest monic irreducible."""
    for tail in itertools.product(range(p), repeat=e):
        coeffs = tail[::-1]  # low degree first
        if _is_irreducible(coeffs, p, e):
            return coeffs
    raise NotPrimePower(f"no irreducible polynomial found for GF({p}^{e})")


def _is_irreducible(coeffs, p, e):
    # x^e + sum(coeffs_i x^i) has no root trial for e <= 3 suffices; use
    # full gcd-free check via brute factor search over monic divisors.
    def poly_eval(x):
        v = pow(x, e, p)
        acc = 0
        for i, c in enumerate(coeffs):
            acc = (acc + c * pow(x, i, p)) % p
        return (v + acc) % p

    if e <= 3:
        return all(poly_eval(x) for x in range(p))
    # generic: no divisor of degree d <= e//2; test by trial division
    full = list(coeffs) + [1]
    for d in range(1, e // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            div = list(tail) + [1]
            if _poly_divides(div, full, p):
                return False
    return True


def _poly_divides(div, poly, p):
    rem = list(poly)
    dd = len(div) - 1
    inv_lead = pow(div[-1], -1, p)
    for i in range(len(rem) - 1, dd - 1, -1):
        c = rem[i] * inv_lead % p
        if c:
            for j in range(dd + 1):
                rem[i - dd + j] = (rem[i - dd + j] - c * div[j]) % p
    return not any(rem[:dd])


@dataclass(frozen=True)
class FieldSpec:
    """Precomputed arithmetic tables for GF(q)."""

    q: int
    p: int
    e: int
    add_table: tuple = field(repr=False)
    mul_table: tuple = field(repr=False)
    neg_table: tuple = field(repr=False)
    inv_table: tuple = field(repr=False)
    frob_table: tuple = field(repr=False)

    def add(self, a, b):
        return self.add_table[a][b]

    def sub(self, a, b):
        return self.add_table[a][self.neg_table[b]]

    def mul(self, a, b):
        return self.mul_table[a][b]

    def neg(self, a):
        return self.neg_table[a]

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of 0 is undefined")
        return self.inv_table[a]

    def pow(self, a, n):
        if n < 0:
            return self.pow(self.inv(a), -n)
        result = 1
        base = a
        while n:
            if n & 1:
                result = self.mul_table[result][base]
            base = self.mul_table[base][base]
            n >>= 1
        return result

    def frobenius(self, a):
        return self.frob_table[a]

    def dot(self, u, v):
        acc = 0
        for a, b in zip(u, v):
            acc = self.add_table[acc][self.mul_table[a][b]]
        return acc

    def elements(self):
        return range(self.q)

    def units(self):
        return range(1, self.q)


@functools.lru_cache(maxsize=None)
def field_make(q: int) -> FieldSpec:
    """Construct GF(q) for a prime power q; results are cached."""
    p, e = _factor_prime_power(q)
    if e == 1:
        add = tuple(tuple((a + b) % p for b in range(p)) for a in range(p))
        mul = tuple(tuple(a * b % p for b in range(p)) for a in range(p))
    else:
        red = _IRREDUCIBLE.get((p, e)) or _lex_min_irreducible(p, e)
        red = tuple(c % p for c in red)
        # reduction rule: x^e = -(red) as coefficient vector
        neg_red = tuple((-c) % p for c in red)

        def decode(a):
            cs = []
            for _ in range(e):
                cs.append(a % p)
                a //= p
            return tuple(cs)

        def encode(cs):
            v = 0
            for c in reversed(cs):
                v = v * p + c
            return v

        vecs = [decode(a) for a in range(q)]
        add = tuple(
            tuple(encode(tuple((x + y) % p for x, y in zip(vecs[a], vecs[b])))
                  for b in range(q))
            for a in range(q)
        )
        mul = tuple(
            tuple(encode(_poly_mul_mod(vecs[a], vecs[b], neg_red, p, e))
                  for b in range(q))
            for a in range(q)
        )
    neg = tuple(next(b for b in range(q) if add[a][b] == 0) for a in range(q))
    inv = [0] * q
    for a in range(1, q):
        inv[a] = next(b for b in range(1, q) if mul[a][b] == 1)
    frob = tuple(_int_pow(mul, a, p) for a in range(q))
    return FieldSpec(q=q, p=p, e=e, add_table=add, mul_table=mul,
                     neg_table=neg, inv_table=tuple(inv), frob_table=frob)


def _int_pow(mul, a, n):
    result = 1
    base = a
    while n:
        if n & 1:
            result = mul[result][base]
        base = mul[base][base]
        n >>= 1
    return result


def field_op(f: FieldSpec, op: str, a: int, b: int | None = None) -> int:
    """Dispatch a single field operation by name."""
    if op == "add":
        return f.add(a, b)
    if op == "mul":
        return f.mul(a, b)
    if op == "neg":
        return f.neg(a)
    if op == "inv":
        return f.inv(a)
    if op == "pow":
        return f.pow(a, b)
    if op == "frobenius":
        return f.frobenius(a)
    raise ValueError(f"unknown field operation {op!r}")


# -- small dense linear algebra over GF(q) ---------------------------------

def mat_rank(f: FieldSpec, rows):
    """Rank of a matrix given as a list of row tuples."""
    rows = [list(r) for r in rows]
    ncols = len(rows[0]) if rows else 0
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = f.inv(rows[rank][col])
        rows[rank] = [f.mul(inv, x) for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                c = rows[i][col]
                rows[i] = [f.sub(x, f.mul(c, y))
                           for x, y in zip(rows[i], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def mat_inv(f: FieldSpec, mat):
    """Inverse of a square matrix (list of row tuples) over GF(q)."""
    n = len(mat)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)]
           for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col]), None)
        if piv is None:
            raise ValueError("matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = f.inv(aug[col][col])
        aug[col] = [f.mul(inv, x) for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col]:
                c = aug[i][col]
                aug[i] = [f.sub(x, f.mul(c, y))
                          for x, y in zip(aug[i], aug[col])]
    return [tuple(row[n:]) for row in aug]


def mat_vec(f: FieldSpec, mat, vec):
    """Matrix times column vector over GF(q)."""
    return tuple(f.dot(row, vec) for row in mat)
