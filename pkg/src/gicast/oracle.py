"""Ground-truth checks for scheme outputs.

The optimality reference is the minimum rank over GF(2) of any matrix with a
forced 1 in each receiver's demanded column, free entries in its
side-information columns, and zeros elsewhere — the best possible
scalar-linear GF(2) code length.  The decode simulator certifies achievable
solutions symbolically and on random payloads.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .gf import Decoding, solve_decode
from .model import GicInstance, UserId
from .partition import SchemeSolution

__all__ = [
    "DEFAULT_FREE_BIT_BUDGET",
    "MinrankBudgetError",
    "MinrankTemplate",
    "minrank_gf2",
    "DecodeReport",
    "simulate_decode",
]

#: Refuse minimum-rank searches with more than this many free cells.
DEFAULT_FREE_BIT_BUDGET = 26


class MinrankBudgetError(ValueError):
    """Completion space too large for the configured free-bit budget."""


@dataclass(frozen=True)
class MinrankTemplate:
    """Per receiver: the forced demanded-column bit and the free columns."""

    m: int
    rows: tuple[tuple[int, tuple[int, ...]], ...]

    @staticmethod
    def from_instance(inst: GicInstance) -> "MinrankTemplate":
        rows = tuple(
            (1 << (uid.packet - 1), tuple(sorted(side))) for uid, side in inst.users
        )
        return MinrankTemplate(inst.m, rows)

    @property
    def free_bits(self) -> int:
        return sum(len(cols) for _, cols in self.rows)


def minrank_gf2(inst: GicInstance, budget: int = DEFAULT_FREE_BIT_BUDGET) -> int:
    """Minimum rank over GF(2) over all completions of the instance template.

    Walks receivers depth-first, choosing each row among its 2^|A| admissible
    completions while maintaining an echelon basis; branches whose partial
    rank already reaches the incumbent are cut, which prunes without ever
    changing the exact minimum."""
    tmpl = MinrankTemplate.from_instance(inst)
    if tmpl.free_bits > budget:
        raise MinrankBudgetError(
            f"{tmpl.free_bits} free cells exceed the budget of {budget}"
        )
    candidates: list[list[int]] = []
    for base, cols in tmpl.rows:
        opts = [base]
        for p in cols:
            bit = 1 << (p - 1)
            opts = opts + [o | bit for o in opts]
        candidates.append(opts)

    nrows = len(candidates)
    best = nrows + 1
    basis: dict[int, int] = {}

    def insert(row: int) -> int | None:
        """Reduce and insert; returns the new pivot bit, or None if dependent."""
        while row:
            low = row & -row
            other = basis.get(low)
            if other is None:
                basis[low] = row
                return low
            row ^= other
        return None

    def walk(idx: int) -> None:
        nonlocal best
        if len(basis) >= best:
            return
        if idx == nrows:
            best = len(basis)
            return
        for row in candidates[idx]:
            pivot = insert(row)
            walk(idx + 1)
            if pivot is not None:
                del basis[pivot]
            if best == 1:
                return

    walk(0)
    return best


@dataclass(frozen=True)
class DecodeReport:
    """Simulator verdict: symbolic decodability for every receiver plus
    random-payload trials run through the decoding coefficients."""

    passed: bool
    trials: int
    failures: tuple[tuple[UserId, int | None, str], ...]

    @property
    def first_failure(self) -> tuple[UserId, int | None, str] | None:
        return self.failures[0] if self.failures else None


def simulate_decode(
    inst: GicInstance, solution: SchemeSolution, trials: int = 16, seed: int = 0
) -> DecodeReport:
    """Check that every receiver can recover its packet from the solution's
    transmissions plus its own side information: first symbolically (span
    membership with explicit coefficients), then on `trials` random payload
    vectors drawn from the solution's field."""
    M = solution.matrix
    fld = M.field
    failures: list[tuple[UserId, int | None, str]] = []
    decodings: dict[UserId, Decoding] = {}
    for uid, side in inst.users:
        dec = solve_decode(M, side, uid.packet)
        if dec is None:
            failures.append(
                (uid, None, f"packet {uid.packet} outside span of rows + side info; rows:\n{M.dump()}")
            )
        else:
            decodings[uid] = dec

    rng = random.Random(seed)
    for t in range(trials):
        x = [rng.randrange(fld.order) for _ in range(inst.m)]
        y = []
        for row in M.rows:
            acc = 0
            for e, xp in zip(row, x):
                acc ^= fld.mul(e, xp)
            y.append(acc)
        for uid, dec in decodings.items():
            est = 0
            for f, sym in zip(dec.row_coeffs, y):
                est ^= fld.mul(f, sym)
            for p, f in dec.known_coeffs:
                est ^= fld.mul(f, x[p - 1])
            if est != x[uid.packet - 1]:
                failures.append(
                    (uid, t, f"trial {t}: reconstructed {est}, payload {x[uid.packet - 1]}")
                )
    return DecodeReport(passed=not failures, trials=trials, failures=tuple(failures))
