"""Finite-field linear algebra for broadcast coding matrices.

GF(2) rows are bit-packed into Python ints (bit i-1 = packet i) so rank and
elimination run word-parallel.  Extension fields GF(2^w) use log/antilog
tables built over a fixed irreducible polynomial per degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

__all__ = [
    "Field",
    "field",
    "GF2",
    "GF256",
    "CodingMatrix",
    "Decoding",
    "rank",
    "row_basis",
    "mds_generator",
    "conditional_entropy",
    "solve_decode",
    "gf2_rank_masks",
]

# Irreducible polynomial per extension degree, bit i = coefficient of x^i.
# Degree 8 is x^8 + x^4 + x^3 + x + 1.
_IRREDUCIBLE = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011011,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
    16: 0b10001000000001011,
}


def _prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n by trial division (n <= 2^16 here)."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class Field:
    """Arithmetic in GF(2^w) for 1 <= w <= 16.  Elements are ints 0..2^w-1;
    addition is XOR, multiplication goes through log/antilog tables."""

    __slots__ = ("w", "order", "poly", "_exp", "_log")

    def __init__(self, w: int):
        if not 1 <= w <= 16:
            raise ValueError(f"extension degree must be in 1..16, got {w}")
        self.w = w
        self.order = 1 << w
        self.poly = _IRREDUCIBLE[w]
        self._exp, self._log = self._build_tables()

    def _mul_noTable(self, a: int, b: int) -> int:
        """Carry-less multiply modulo the field polynomial (table bootstrap)."""
        r = 0
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
            if a & self.order:
                a ^= self.poly
        return r

    def _pow_noTable(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self._mul_noTable(r, a)
            a = self._mul_noTable(a, a)
            e >>= 1
        return r

    def _find_generator(self) -> int:
        n = self.order - 1
        if n == 1:
            return 1
        factors = _prime_factors(n)
        for g in range(2, self.order):
            if all(self._pow_noTable(g, n // p) != 1 for p in factors):
                return g
        raise AssertionError("no multiplicative generator found")

    def _build_tables(self) -> tuple[list[int], list[int]]:
        n = self.order - 1
        g = self._find_generator()
        exp = [0] * (2 * n if n > 1 else 2)
        log = [0] * self.order
        x = 1
        for i in range(n):
            exp[i] = x
            log[x] = i
            x = self._mul_noTable(x, g)
        for i in range(n, len(exp)):
            exp[i] = exp[i - n]
        return exp, log

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        return self._exp[self.order - 1 - self._log[a]]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            return 0 if e else 1
        return self._exp[(self._log[a] * e) % (self.order - 1)]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Field) and other.w == self.w

    def __hash__(self) -> int:
        return hash(("Field", self.w))

    def __repr__(self) -> str:
        return f"GF(2^{self.w})"


@lru_cache(maxsize=None)
def field(w: int) -> Field:
    """Shared Field instance per extension degree."""
    return Field(w)


GF2 = field(1)
GF256 = field(8)


@dataclass(frozen=True)
class CodingMatrix:
    """Immutable matrix over GF(2^w); rows[r][c] is the coefficient of packet
    c+1 in coded symbol r."""

    field: Field
    ncols: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.ncols < 1:
            raise ValueError("matrix needs at least one column")
        for r, row in enumerate(self.rows):
            if len(row) != self.ncols:
                raise ValueError(f"row {r} has {len(row)} entries, expected {self.ncols}")
            for e in row:
                if not 0 <= e < self.field.order:
                    raise ValueError(f"row {r} entry {e} outside {self.field}")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def dump(self) -> str:
        """One row per line, space-separated field elements in decimal."""
        return "\n".join(" ".join(str(e) for e in row) for row in self.rows)


def _row_mask(row: Sequence[int]) -> int:
    mask = 0
    for c, e in enumerate(row):
        if e:
            mask |= 1 << c
    return mask


def _mask_row(mask: int, ncols: int) -> tuple[int, ...]:
    return tuple((mask >> c) & 1 for c in range(ncols))


def matrix_from_masks(masks: Iterable[int], ncols: int) -> CodingMatrix:
    """GF(2) matrix from bit-packed rows."""
    return CodingMatrix(GF2, ncols, tuple(_mask_row(m, ncols) for m in masks))


def gf2_rank_masks(masks: Iterable[int]) -> int:
    """Rank over GF(2) of bit-packed rows."""
    basis: dict[int, int] = {}
    for row in masks:
        while row:
            low = row & -row
            other = basis.get(low)
            if other is None:
                basis[low] = row
                break
            row ^= other
    return len(basis)


def _ff_insert(basis: dict[int, list[int]], vec: Sequence[int], fld: Field) -> bool:
    """Reduce vec against a pivot-column-keyed echelon basis; insert the
    normalized remainder.  Returns True iff vec was independent."""
    v = list(vec)
    while True:
        p = next((j for j, e in enumerate(v) if e), None)
        if p is None:
            return False
        b = basis.get(p)
        if b is None:
            s = fld.inv(v[p])
            basis[p] = [fld.mul(s, e) for e in v]
            return True
        f = v[p]
        v = [e ^ fld.mul(f, be) for e, be in zip(v, b)]


def rank(M: CodingMatrix) -> int:
    """Rank of M over its field."""
    if M.field.w == 1:
        return gf2_rank_masks(_row_mask(r) for r in M.rows)
    basis: dict[int, list[int]] = {}
    n = 0
    for row in M.rows:
        if _ff_insert(basis, row, M.field):
            n += 1
    return n


def row_basis(M: CodingMatrix) -> CodingMatrix:
    """Greedy maximal independent subset of M's rows, kept in original order.
    Every dropped row is a linear combination of the kept ones."""
    keep = []
    if M.field.w == 1:
        basis: dict[int, int] = {}
        for row in M.rows:
            r = _row_mask(row)
            while r:
                low = r & -r
                other = basis.get(low)
                if other is None:
                    basis[low] = r
                    keep.append(row)
                    break
                r ^= other
    else:
        fbasis: dict[int, list[int]] = {}
        for row in M.rows:
            if _ff_insert(fbasis, row, M.field):
                keep.append(row)
    return CodingMatrix(M.field, M.ncols, tuple(keep))


def mds_generator(n: int, r: int, fld: Field) -> CodingMatrix:
    """Generator matrix of an (n, r) MDS code: r x n with every r x r
    submatrix invertible.  r=1 gives the all-ones parity row, r=n the
    identity; otherwise a Cauchy matrix (needs 2^w >= n + r)."""
    if n < 1 or r < 1:
        raise ValueError("matrix dimensions must be positive")
    if r > n:
        raise ValueError(f"need r <= n, got r={r} n={n}")
    if r == n:
        rows = tuple(tuple(1 if j == i else 0 for j in range(n)) for i in range(r))
    elif r == 1:
        rows = ((1,) * n,)
    else:
        if fld.order < n + r:
            raise ValueError(f"{fld} too small for a Cauchy matrix: need order >= {n + r}")
        rows = _cauchy_rows(n, r, fld)
    return CodingMatrix(fld, n, rows)


def _cauchy_rows(n: int, r: int, fld: Field) -> tuple[tuple[int, ...], ...]:
    """Cauchy rows 1/(a_i + b_j) with a_i = i, b_j = r + j (char 2: + is XOR)."""
    return tuple(tuple(fld.inv(i ^ (r + j)) for j in range(n)) for i in range(r))


def conditional_entropy(M: CodingMatrix, known: Iterable[int]) -> int:
    """Residual information in M's rows for a receiver holding the packets in
    `known` (1-based): rank after zeroing the known columns."""
    kset = set(known)
    for p in kset:
        if not 1 <= p <= M.ncols:
            raise ValueError(f"known packet {p} outside 1..{M.ncols}")
    if M.field.w == 1:
        kmask = 0
        for p in kset:
            kmask |= 1 << (p - 1)
        return gf2_rank_masks(_row_mask(r) & ~kmask for r in M.rows)
    rows = [tuple(0 if (c + 1) in kset else e for c, e in enumerate(row)) for row in M.rows]
    basis: dict[int, list[int]] = {}
    return sum(1 for row in rows if _ff_insert(basis, row, M.field))


@dataclass(frozen=True)
class Decoding:
    """Certificate that a unit vector lies in span(rows + known units):
    e_target = sum(row_coeffs[r] * rows[r]) + sum(c * e_p for (p, c))."""

    target: int
    row_coeffs: tuple[int, ...]
    known_coeffs: tuple[tuple[int, int], ...]


def solve_decode(M: CodingMatrix, known: Iterable[int], target: int) -> Decoding | None:
    """Express e_target as a combination of M's rows and the unit vectors of
    the known packets; None when the target is outside the span."""
    fld = M.field
    m = M.ncols
    if not 1 <= target <= m:
        raise ValueError(f"target packet {target} outside 1..{m}")
    kcols = sorted(set(known))
    if target in kcols:
        raise ValueError(f"target packet {target} already known")
    sources: list[tuple[int, ...]] = list(M.rows)
    for p in kcols:
        sources.append(tuple(1 if c == p - 1 else 0 for c in range(m)))
    nsrc = len(sources)

    # Echelon basis with combination tracking: vec == combo . sources.
    basis: dict[int, tuple[list[int], list[int]]] = {}
    for idx, row in enumerate(sources):
        v = list(row)
        combo = [0] * nsrc
        combo[idx] = 1
        while True:
            p = next((j for j, e in enumerate(v) if e), None)
            if p is None:
                break
            hit = basis.get(p)
            if hit is None:
                s = fld.inv(v[p])
                basis[p] = ([fld.mul(s, e) for e in v], [fld.mul(s, e) for e in combo])
                break
            bv, bc = hit
            f = v[p]
            v = [e ^ fld.mul(f, be) for e, be in zip(v, bv)]
            combo = [e ^ fld.mul(f, be) for e, be in zip(combo, bc)]

    v = [1 if c == target - 1 else 0 for c in range(m)]
    acc = [0] * nsrc
    while True:
        p = next((j for j, e in enumerate(v) if e), None)
        if p is None:
            break
        hit = basis.get(p)
        if hit is None:
            return None
        bv, bc = hit
        f = v[p]
        v = [e ^ fld.mul(f, be) for e, be in zip(v, bv)]
        acc = [e ^ fld.mul(f, be) for e, be in zip(acc, bc)]
    nrows = len(M.rows)
    return Decoding(
        target=target,
        row_coeffs=tuple(acc[:nrows]),
        known_coeffs=tuple((p, acc[nrows + i]) for i, p in enumerate(kcols)),
    )
