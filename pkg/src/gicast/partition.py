"""Partition-based multicast schemes and exhaustive minimization.

Two scheme families share one search engine: packet partitions (each block
multicast with an MDS code sized by the worst-informed demander) and user
partitions (blocks of receivers, coded over the packets the block demands).
Stacking the user-partition transmissions and dropping linearly dependent
rows gives the rank-reduced variant.  Exhaustive searches enumerate every
set partition in restricted-growth-string order.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Callable, Iterable, Iterator, Sequence

from .gf import (
    GF2,
    GF256,
    CodingMatrix,
    Field,
    gf2_rank_masks,
    matrix_from_masks,
    mds_generator,
    rank,
    row_basis,
)
from .model import GicInstance, UserId

__all__ = [
    "DEFAULT_CAP",
    "PartitionCapError",
    "PacketPartition",
    "UserPartition",
    "SchemeSolution",
    "CoeffPolicy",
    "DETERMINISTIC",
    "enumerate_partitions",
    "group_partition",
    "ppm_rate",
    "upm_rate",
    "ppm_as_upm",
    "build_transmissions",
    "iupm_rate",
    "exhaustive_ppm",
    "exhaustive_upm",
    "exhaustive_iupm",
]

#: Largest ground set enumerated by default; Bell(13) is ~27.6 million.
DEFAULT_CAP = 13


class PartitionCapError(ValueError):
    """Ground set too large for exhaustive enumeration."""


def _canon(blocks: Iterable[Iterable]) -> tuple[frozenset, ...]:
    return tuple(sorted((frozenset(b) for b in blocks), key=min))


@dataclass(frozen=True)
class PacketPartition:
    """Disjoint nonempty packet blocks covering 1..m, ordered by smallest
    member."""

    blocks: tuple[frozenset[int], ...]

    @staticmethod
    def of(blocks: Iterable[Iterable[int]]) -> "PacketPartition":
        return PacketPartition(_canon(blocks))

    def check(self, m: int) -> None:
        seen: set[int] = set()
        for b in self.blocks:
            if not b:
                raise ValueError("empty block")
            if b & seen:
                raise ValueError(f"overlapping blocks at {sorted(b & seen)}")
            seen |= b
        if seen != set(range(1, m + 1)):
            raise ValueError(f"blocks do not cover 1..{m}")


@dataclass(frozen=True)
class UserPartition:
    """Disjoint nonempty receiver blocks covering all users, ordered by
    smallest member."""

    blocks: tuple[frozenset[UserId], ...]

    @staticmethod
    def of(blocks: Iterable[Iterable[UserId]]) -> "UserPartition":
        return UserPartition(_canon(blocks))

    def check(self, inst: GicInstance) -> None:
        seen: set[UserId] = set()
        for b in self.blocks:
            if not b:
                raise ValueError("empty block")
            if b & seen:
                raise ValueError("overlapping blocks")
            seen |= b
        if seen != set(inst.user_ids):
            raise ValueError("blocks do not cover the user set")


@dataclass(frozen=True)
class SchemeSolution:
    """A complete achievable scheme: its rate always equals the number of
    transmitted coded symbols."""

    scheme: str
    rate: int
    partition: PacketPartition | UserPartition | None
    matrix: CodingMatrix
    policy: str = "deterministic"
    trace: tuple[str, ...] = ()

    def __post_init__(self):
        if self.rate != self.matrix.nrows:
            raise ValueError(f"rate {self.rate} != {self.matrix.nrows} transmitted rows")


@dataclass(frozen=True)
class CoeffPolicy:
    """Coefficient selection for rank reduction: the deterministic matrices
    alone, or additionally `trials` seeded resamples keeping the best rank."""

    kind: str = "deterministic"
    trials: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("deterministic", "randomized"):
            raise ValueError(f"unknown policy kind {self.kind!r}")


DETERMINISTIC = CoeffPolicy()


# ---------------------------------------------------------------- enumeration

def _rgs_stream(n: int) -> Iterator[list[int]]:
    """Restricted growth strings of length n in lexicographic order; the
    yielded list is reused, callers must copy."""
    a = [0] * n
    maxes = [0] * (n + 1)  # maxes[t] = max(a[:t]); position t may rise to maxes[t]+1
    t = n - 1
    yield a
    while t > 0:
        if a[t] <= maxes[t]:
            a[t] += 1
            maxes[t + 1] = max(maxes[t], a[t])
            for s in range(t + 1, n):
                a[s] = 0
                maxes[s + 1] = maxes[s]
            t = n - 1
            yield a
        else:
            t -= 1


def enumerate_partitions(n: int, cap: int = DEFAULT_CAP) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Every set partition of {1..n} exactly once, in restricted-growth
    lexicographic order, as tuples of ascending blocks."""
    if n < 1:
        raise ValueError(f"ground set must be nonempty, got n={n}")
    if n > cap:
        raise PartitionCapError(f"ground set of {n} exceeds enumeration cap {cap}")
    for a in _rgs_stream(n):
        nblocks = max(a) + 1
        blocks: list[list[int]] = [[] for _ in range(nblocks)]
        for x, b in enumerate(a, 1):
            blocks[b].append(x)
        yield tuple(tuple(b) for b in blocks)


# ---------------------------------------------------------------- block rates

def ppm_rate(inst: GicInstance, part: PacketPartition) -> tuple[int, tuple[int, ...]]:
    """Rate of a packet partition and the per-block guaranteed-overlap counts:
    block T costs |T| - min over demanders of packets in T of |A cap T|."""
    part.check(inst.m)
    overlaps = []
    for T in part.blocks:
        d = min(len(side & T) for uid, side in inst.users if uid.packet in T)
        overlaps.append(d)
    rate = sum(len(T) - d for T, d in zip(part.blocks, overlaps))
    return rate, tuple(overlaps)


def upm_rate(inst: GicInstance, part: UserPartition) -> tuple[int, tuple[int, ...]]:
    """Rate of a user partition and the per-block overlap counts: block W
    demands Y = {packets of W} and costs |Y| - min over W of |A cap Y|."""
    part.check(inst)
    overlaps = []
    rate = 0
    for W in part.blocks:
        Y = frozenset(uid.packet for uid in W)
        c = min(len(inst.side_of(uid) & Y) for uid in W)
        overlaps.append(c)
        rate += len(Y) - c
    return rate, tuple(overlaps)


def ppm_as_upm(inst: GicInstance, part: PacketPartition) -> UserPartition:
    """A packet partition viewed as a user partition: block T becomes all
    receivers demanding a packet of T.  Rates coincide."""
    part.check(inst.m)
    return UserPartition.of(
        frozenset(uid for uid in inst.user_ids if uid.packet in T) for T in part.blocks
    )


def group_partition(inst: GicInstance) -> UserPartition:
    """Cluster receivers whose demanded-plus-known packet set coincides.

    On the k-group family with k >= 3 this recovers the group structure;
    for k = 2 the two receivers share a signature and collapse into one
    block, so family-specific callers should build the partition from the
    generator's GroupStructure instead."""
    byset: dict[frozenset[int], set[UserId]] = {}
    for uid, side in inst.users:
        byset.setdefault(side | {uid.packet}, set()).add(uid)
    return UserPartition.of(byset.values())


# ---------------------------------------------------------------- transmissions

def _block_plan(inst: GicInstance, part: UserPartition) -> list[tuple[list[int], int]]:
    """Per block: ascending demanded packets and the number of coded symbols
    |Y| - c the block needs."""
    plan = []
    for W in part.blocks:
        Y = sorted({uid.packet for uid in W})
        c = min(len(inst.side_of(uid) & set(Y)) for uid in W)
        plan.append((Y, len(Y) - c))
    return plan


def _place(coeffs: Sequence[int], cols: Sequence[int], m: int) -> tuple[int, ...]:
    row = [0] * m
    for e, p in zip(coeffs, cols):
        row[p - 1] = e
    return tuple(row)


def build_transmissions(inst: GicInstance, part: UserPartition) -> CodingMatrix:
    """Stack per-block MDS transmissions.  Everything stays over GF(2) when
    each block needs a single parity symbol; any wider block switches the
    whole stack to GF(256) Cauchy rows."""
    part.check(inst)
    plan = _block_plan(inst, part)
    fld = GF2 if all(b == 1 for _, b in plan) else GF256
    rows: list[tuple[int, ...]] = []
    for Y, b in plan:
        gen = mds_generator(len(Y), b, fld)
        for coeffs in gen.rows:
            rows.append(_place(coeffs, Y, inst.m))
    return CodingMatrix(fld, inst.m, tuple(rows))


def _random_block_rows(nY: int, b: int, fld: Field, rng: random.Random) -> list[tuple[int, ...]]:
    """Random generator rows that are still MDS: nonzero entries for a single
    parity row, a row/column-scaled Cauchy matrix otherwise."""
    if b == 1:
        return [tuple(rng.randrange(1, fld.order) for _ in range(nY))]
    pts = rng.sample(range(fld.order), b + nY)
    a, bs = pts[:b], pts[b:]
    u = [rng.randrange(1, fld.order) for _ in range(b)]
    v = [rng.randrange(1, fld.order) for _ in range(nY)]
    return [
        tuple(fld.mul(u[i], fld.mul(v[j], fld.inv(a[i] ^ bs[j]))) for j in range(nY))
        for i in range(b)
    ]


def _random_transmissions(
    inst: GicInstance, plan: Sequence[tuple[list[int], int]], fld: Field, rng: random.Random
) -> CodingMatrix:
    rows: list[tuple[int, ...]] = []
    for Y, b in plan:
        for coeffs in _random_block_rows(len(Y), b, fld, rng):
            rows.append(_place(coeffs, Y, inst.m))
    return CodingMatrix(fld, inst.m, tuple(rows))


def iupm_rate(
    inst: GicInstance, part: UserPartition, policy: CoeffPolicy = DETERMINISTIC
) -> tuple[int, CodingMatrix, str]:
    """Rank-reduced rate of a user partition: stack the block transmissions,
    drop dependent rows, transmit the basis.  Returns (rate, basis matrix,
    label of the coefficient policy that achieved it)."""
    M = build_transmissions(inst, part)
    best = (rank(M), M, "deterministic")
    if policy.kind == "randomized":
        plan = _block_plan(inst, part)
        fld = GF256 if any(b > 1 for _, b in plan) or M.field.w > 1 else GF2
        rng = random.Random(policy.seed)
        for t in range(policy.trials):
            Mt = _random_transmissions(inst, plan, fld, rng)
            r = rank(Mt)
            if r < best[0]:
                best = (r, Mt, f"randomized[trial={t},seed={policy.seed}]")
    r, M, label = best
    return r, row_basis(M), label


# ---------------------------------------------------------------- exhaustive search
#
# Both partition families minimize a sum of per-block costs, so the searches
# share one engine: precompute cost[mask] for every subset of the ground set,
# then walk the restricted-growth tree keeping a running total.  Parallel runs
# split the tree by RGS prefix; reduction by (rate, rgs) reproduces the
# sequential first-witness tie-break exactly.

_WORKER: dict = {}


def _init_worker(n: int, cost: list[int]) -> None:
    _WORKER["n"] = n
    _WORKER["cost"] = cost


def _scan_prefix(prefix: list[int]) -> tuple[int, list[int]] | None:
    n, cost = _WORKER["n"], _WORKER["cost"]
    return _best_completion(n, cost, prefix)


def _best_completion(n: int, cost: Sequence[int], prefix: Sequence[int]) -> tuple[int, list[int]] | None:
    """Best (total, rgs) over all partitions extending the given RGS prefix,
    scanning completions in lexicographic order and keeping the first
    minimum."""
    blocks = [0] * (n + 1)
    total = 0
    nb = 0
    for t, b in enumerate(prefix):
        bit = 1 << t
        total += cost[blocks[b] | bit] - cost[blocks[b]]
        blocks[b] |= bit
        nb = max(nb, b + 1)
    a = list(prefix) + [0] * (n - len(prefix))
    best_total: list = [None, None]

    def rec(t: int, nb: int, total: int) -> None:
        if t == n:
            if best_total[0] is None or total < best_total[0]:
                best_total[0] = total
                best_total[1] = a.copy()
            return
        bit = 1 << t
        for b in range(nb):
            old = blocks[b]
            new = old | bit
            a[t] = b
            blocks[b] = new
            rec(t + 1, nb, total + cost[new] - cost[old])
            blocks[b] = old
        a[t] = nb
        blocks[nb] = bit
        rec(t + 1, nb + 1, total + cost[bit])
        blocks[nb] = 0
    rec(len(prefix), nb, total)
    if best_total[0] is None:
        return None
    return best_total[0], best_total[1]


def _min_partition_sum(n: int, cost: list[int], jobs: int) -> tuple[int, list[int]]:
    """Minimize sum of cost[block] over all set partitions of n elements;
    returns the total and the lexicographically first optimal RGS."""
    if jobs <= 1 or n < 9:
        found = _best_completion(n, cost, [0])
        assert found is not None
        return found
    plen = 6
    prefixes = [list(a) for a in _rgs_stream_prefix(n, plen)]
    with Pool(jobs, initializer=_init_worker, initargs=(n, cost)) as pool:
        results = pool.map(_scan_prefix, prefixes, chunksize=max(1, len(prefixes) // (jobs * 8)))
    best = min((r for r in results if r is not None), key=lambda r: (r[0], r[1]))
    return best


def _rgs_stream_prefix(n: int, plen: int) -> Iterator[list[int]]:
    """All restricted growth strings of length min(plen, n), lex order."""
    plen = min(plen, n)
    for a in _rgs_stream(plen):
        yield a.copy()


def _user_cost_table(inst: GicInstance) -> list[int]:
    """cost[mask] = |Y| - c for the receiver block given by mask over the
    canonical user order."""
    ids = inst.user_ids
    n = len(ids)
    pmask = [1 << (uid.packet - 1) for uid in ids]
    smask = []
    for uid in ids:
        s = 0
        for p in inst.side_of(uid):
            s |= 1 << (p - 1)
        smask.append(s)
    cost = [0] * (1 << n)
    ymask = [0] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        t = low.bit_length() - 1
        y = ymask[mask ^ low] | pmask[t]
        ymask[mask] = y
        c = None
        mm = mask
        while mm:
            lb = mm & -mm
            u = lb.bit_length() - 1
            o = (smask[u] & y).bit_count()
            if c is None or o < c:
                c = o
            mm ^= lb
        cost[mask] = y.bit_count() - c
    return cost


def _packet_cost_table(inst: GicInstance) -> list[int]:
    """cost[mask] = |T| - d for the packet block given by mask."""
    m = inst.m
    sides_by_packet: list[list[int]] = [[] for _ in range(m)]
    for uid, side in inst.users:
        s = 0
        for p in side:
            s |= 1 << (p - 1)
        sides_by_packet[uid.packet - 1].append(s)
    cost = [0] * (1 << m)
    for mask in range(1, 1 << m):
        d = None
        mm = mask
        while mm:
            lb = mm & -mm
            i = lb.bit_length() - 1
            for s in sides_by_packet[i]:
                o = (s & mask).bit_count()
                if d is None or o < d:
                    d = o
            mm ^= lb
        cost[mask] = mask.bit_count() - d
    return cost


def _rgs_to_blocks(a: Sequence[int]) -> list[list[int]]:
    blocks: list[list[int]] = [[] for _ in range(max(a) + 1)]
    for t, b in enumerate(a):
        blocks[b].append(t)
    return blocks


def exhaustive_ppm(inst: GicInstance, cap: int = DEFAULT_CAP, jobs: int = 1) -> SchemeSolution:
    """Minimum-rate packet partition by full enumeration (first optimum in
    enumeration order), with its MDS transmissions."""
    if inst.m > cap:
        raise PartitionCapError(f"{inst.m} packets exceed enumeration cap {cap}")
    cost = _packet_cost_table(inst)
    total, a = _min_partition_sum(inst.m, cost, jobs)
    part = PacketPartition.of([x + 1 for x in blk] for blk in _rgs_to_blocks(a))
    matrix = build_transmissions(inst, ppm_as_upm(inst, part))
    return SchemeSolution("ppm-exhaustive", total, part, matrix)


def exhaustive_upm(inst: GicInstance, cap: int = DEFAULT_CAP, jobs: int = 1) -> SchemeSolution:
    """Minimum-rate user partition by full enumeration (first optimum in
    enumeration order), with its MDS transmissions."""
    ids = inst.user_ids
    if len(ids) > cap:
        raise PartitionCapError(f"{len(ids)} users exceed enumeration cap {cap}")
    cost = _user_cost_table(inst)
    total, a = _min_partition_sum(len(ids), cost, jobs)
    part = UserPartition.of([ids[t] for t in blk] for blk in _rgs_to_blocks(a))
    matrix = build_transmissions(inst, part)
    return SchemeSolution("upm-exhaustive", total, part, matrix)


# IUPM's objective (rank of the stacked rows) is not a sum of block costs, so
# its exhaustive search evaluates whole partitions at the leaves.

_IWORK: dict = {}


def _init_iupm_worker(payload: tuple) -> None:
    _IWORK["payload"] = payload


def _iupm_eval_partition(
    inst: GicInstance, ids: Sequence[UserId], blocks: Sequence[Sequence[int]], policy: CoeffPolicy, salt: int
) -> int:
    part = UserPartition.of([ids[t] for t in blk] for blk in blocks)
    pol = policy if policy.kind == "deterministic" else CoeffPolicy("randomized", policy.trials, salt)
    r, _, _ = iupm_rate(inst, part, pol)
    return r


def _iupm_scan_prefix(prefix: list[int]) -> tuple[int, list[int]] | None:
    inst, policy = _IWORK["payload"]
    return _iupm_best_completion(inst, policy, prefix)


def _iupm_best_completion(
    inst: GicInstance, policy: CoeffPolicy, prefix: Sequence[int]
) -> tuple[int, list[int]] | None:
    ids = inst.user_ids
    n = len(ids)
    pmask = [1 << (uid.packet - 1) for uid in ids]
    smask = []
    for uid in ids:
        s = 0
        for p in inst.side_of(uid):
            s |= 1 << (p - 1)
        smask.append(s)
    best: list = [None, None]
    a = list(prefix) + [0] * (n - len(prefix))

    def leaf_rank() -> int:
        # Blocks where a single parity symbol suffices contribute their XOR
        # row; that case never leaves GF(2), so rank it on bit masks.  Any
        # wider block falls back to the full construction.
        rows = []
        for blk in _rgs_to_blocks(a):
            y = 0
            for t in blk:
                y |= pmask[t]
            c = min((smask[t] & y).bit_count() for t in blk)
            if y.bit_count() - c != 1:
                salt = policy.seed
                for d in a:
                    salt = salt * 31 + d + 1
                return _iupm_eval_partition(inst, ids, _rgs_to_blocks(a), policy, salt)
            rows.append(y)
        return gf2_rank_masks(rows)

    def rec(t: int, nb: int) -> None:
        if t == n:
            r = leaf_rank()
            if best[0] is None or r < best[0]:
                best[0] = r
                best[1] = a.copy()
            return
        for b in range(nb):
            a[t] = b
            rec(t + 1, nb)
        a[t] = nb
        rec(t + 1, nb + 1)
    nb = max(prefix) + 1 if prefix else 0
    rec(len(prefix), nb)
    if best[0] is None:
        return None
    return best[0], best[1]


def exhaustive_iupm(
    inst: GicInstance,
    cap: int = DEFAULT_CAP,
    jobs: int = 1,
    policy: CoeffPolicy = DETERMINISTIC,
) -> SchemeSolution:
    """Minimum rank-reduced rate over every user partition; the witness keeps
    the reduced basis as its transmissions."""
    ids = inst.user_ids
    n = len(ids)
    if n > cap:
        raise PartitionCapError(f"{n} users exceed enumeration cap {cap}")
    if jobs <= 1 or n < 9:
        found = _iupm_best_completion(inst, policy, [0])
    else:
        prefixes = [a for a in _rgs_stream_prefix(n, 6)]
        with Pool(jobs, initializer=_init_iupm_worker, initargs=((inst, policy),)) as pool:
            results = pool.map(_iupm_scan_prefix, prefixes, chunksize=max(1, len(prefixes) // (jobs * 8)))
        found = min((r for r in results if r is not None), key=lambda r: (r[0], r[1]))
    assert found is not None
    total, a = found
    part = UserPartition.of([ids[t] for t in blk] for blk in _rgs_to_blocks(a))
    salt = policy.seed
    for d in a:
        salt = salt * 31 + d + 1
    pol = policy if policy.kind == "deterministic" else CoeffPolicy("randomized", policy.trials, salt)
    rate, basis, label = iupm_rate(inst, part, pol)
    return SchemeSolution("iupm-exhaustive", rate, part, basis, policy=label)
