"""Three-step partition heuristic.

Step 1 buckets packets into subsets keyed by receiver tuples: a receiver's
key is itself plus everyone who both demands one of its side-information
packets and already holds the receiver's own packet.  (The packet-initialized
variant gives each packet one key, the union over its receivers.)  Step 2
repeatedly promotes any subset that is worthless to one of its key members —
zero residual information — into higher-level subsets until every subset is
equally useful to all its key members.  Step 3 compresses co-bucketed packet
groups to single XOR rows and charges each subset its worst-case residual
information, realized with MDS-combined transmissions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .gf import (
    GF2,
    GF256,
    CodingMatrix,
    gf2_rank_masks,
    mds_generator,
    solve_decode,
)
from .model import GicInstance, UserId
from .partition import SchemeSolution

__all__ = [
    "SubsetKey",
    "WorkingSubset",
    "initial_subsets_user",
    "initial_subsets_packet",
    "step2_merge",
    "step3_rate",
    "run_heuristic",
]


@dataclass(frozen=True, order=True)
class SubsetKey:
    """Sorted tuple of receivers owning a working subset; level is the tuple
    length, and ordering is lexicographic on the members."""

    members: tuple[UserId, ...]

    @staticmethod
    def of(users) -> "SubsetKey":
        return SubsetKey(tuple(sorted(set(users))))

    @property
    def level(self) -> int:
        return len(self.members)

    def extended(self, uid: UserId) -> "SubsetKey":
        return SubsetKey(tuple(sorted(self.members + (uid,))))

    def fmt(self) -> str:
        return "".join(u.label() for u in self.members)


@dataclass(frozen=True)
class WorkingSubset:
    """Subset contents as packet groups; packets of one group shared a Step-1
    key and will collapse to a single XOR row in Step 3."""

    key: SubsetKey
    groups: tuple[frozenset[int], ...]

    @property
    def packets(self) -> frozenset[int]:
        out: frozenset[int] = frozenset()
        for g in self.groups:
            out |= g
        return out


def _receiver_keys(inst: GicInstance) -> dict[UserId, SubsetKey]:
    """Step-1 key per receiver: itself plus (demanders of its side packets
    intersected with holders of its own packet)."""
    holders: dict[int, set[UserId]] = {i: set() for i in range(1, inst.m + 1)}
    for uid, side in inst.users:
        for p in side:
            holders[p].add(uid)
    keys = {}
    for uid, side in inst.users:
        demanders = {v for p in side for v in inst.users_of_packet.get(p, ())}
        keys[uid] = SubsetKey.of({uid} | (demanders & holders[uid.packet]))
    return keys


def initial_subsets_user(inst: GicInstance) -> dict[SubsetKey, WorkingSubset]:
    """One insertion of packet i per receiver of i, under that receiver's
    key; packets meeting at a key form a single group."""
    buckets: dict[SubsetKey, set[int]] = {}
    for uid, key in _receiver_keys(inst).items():
        buckets.setdefault(key, set()).add(uid.packet)
    return {k: WorkingSubset(k, (frozenset(v),)) for k, v in buckets.items()}


def initial_subsets_packet(inst: GicInstance) -> dict[SubsetKey, WorkingSubset]:
    """Packet-initialized variant: each packet inserted once, keyed by the
    union of its receivers' keys."""
    rkeys = _receiver_keys(inst)
    buckets: dict[SubsetKey, set[int]] = {}
    for i in range(1, inst.m + 1):
        merged: set[UserId] = set()
        for uid in inst.users_of_packet.get(i, ()):
            merged |= set(rkeys[uid].members)
        buckets.setdefault(SubsetKey.of(merged), set()).add(i)
    return {k: WorkingSubset(k, (frozenset(v),)) for k, v in buckets.items()}


def step2_merge(
    inst: GicInstance, subsets: dict[SubsetKey, WorkingSubset]
) -> tuple[dict[SubsetKey, WorkingSubset], tuple[str, ...]]:
    """Promote subsets until, for every subset, all key members see the same
    strictly positive residual information.

    Promotion of a level-v subset moves its groups into the lexicographically
    smallest subset at level v+1 when one exists; otherwise its key grows by
    the smallest absent receiver tuple, merging on key collision.  Candidates
    are processed in ascending (level, key) order, zero-residual subsets
    first; a subset whose key already spans every receiver cannot grow and is
    left as is."""
    subs: dict[SubsetKey, tuple[frozenset[int], ...]] = {
        k: ws.groups for k, ws in subsets.items()
    }
    all_users = inst.user_ids
    side = inst.side_map
    trace: list[str] = []
    stuck: set[SubsetKey] = set()
    while True:
        zero: list[SubsetKey] = []
        unequal: list[SubsetKey] = []
        for key, groups in subs.items():
            pkts: set[int] = set()
            for g in groups:
                pkts |= g
            ents = [len(pkts - side[u]) for u in key.members]
            if any(e == 0 for e in ents):
                zero.append(key)
            elif len(set(ents)) > 1:
                unequal.append(key)
        zero = [k for k in zero if k not in stuck]
        unequal = [k for k in unequal if k not in stuck]
        cands = zero or unequal
        if not cands:
            break
        key = min(cands, key=lambda k: (k.level, k))
        v = key.level
        if v == len(all_users):
            stuck.add(key)
            continue
        higher = [k2 for k2 in subs if k2 != key and k2.level == v + 1]
        if higher:
            target = min(higher)
            subs[target] = subs[target] + subs.pop(key)
            trace.append(f"promote {key.fmt()} level {v} -> {v + 1} merge into {target.fmt()}")
            continue
        missing = next(u for u in all_users if u not in key.members)
        grown = key.extended(missing)
        groups = subs.pop(key)
        if grown in subs:
            subs[grown] = subs[grown] + groups
            trace.append(f"promote {key.fmt()} level {v} -> {v + 1} merge into {grown.fmt()}")
        else:
            subs[grown] = groups
            trace.append(f"promote {key.fmt()} level {v} -> {v + 1}")
    return {k: WorkingSubset(k, g) for k, g in subs.items()}, tuple(trace)


def _subset_rows(ws: WorkingSubset) -> list[int]:
    """Post-compression content rows as GF(2) masks: one XOR row per packet
    group, duplicates dropped."""
    rows: list[int] = []
    for g in ws.groups:
        mask = 0
        for p in g:
            mask |= 1 << (p - 1)
        if mask not in rows:
            rows.append(mask)
    return rows


def _subset_residual(ws: WorkingSubset, side: frozenset[int]) -> int:
    kmask = 0
    for p in side:
        kmask |= 1 << (p - 1)
    return gf2_rank_masks(r & ~kmask for r in _subset_rows(ws))


def _combine(rows: list[int], rho: int, m: int, style: str, rng: random.Random | None) -> tuple:
    """rho coded symbols from the given content rows.  style picks the MDS
    coefficients: 'plain' keeps the rows / all-ones summary, 'cauchy' uses
    distinct GF(256) coefficients, 'random' a scaled random Cauchy."""
    q = len(rows)
    bits = [tuple((r >> c) & 1 for c in range(m)) for r in rows]
    if rho == q:
        return tuple(bits)
    if style == "plain":
        gen = mds_generator(q, rho, GF256).rows
    elif style == "cauchy":
        gen = tuple(
            tuple(GF256.inv(i ^ (rho + j)) for j in range(q)) for i in range(rho)
        )
    else:
        assert rng is not None
        pts = rng.sample(range(GF256.order), rho + q)
        gen = tuple(
            tuple(
                GF256.mul(
                    rng.randrange(1, GF256.order), GF256.inv(pts[i] ^ pts[rho + j])
                )
                for j in range(q)
            )
            for i in range(rho)
        )
    out = []
    for coeffs in gen:
        row = [0] * m
        for f, bvec in zip(coeffs, bits):
            if f:
                for c, e in enumerate(bvec):
                    if e:
                        row[c] ^= f
        out.append(tuple(row))
    return tuple(out)


def step3_rate(
    inst: GicInstance, subsets: dict[SubsetKey, WorkingSubset], scheme: str, trace: tuple[str, ...] = ()
) -> SchemeSolution:
    """Charge each final subset the worst residual information among its key
    members and realize that rate with MDS combinations of the subset's
    compressed rows.  Coefficients escalate from the plain choice through
    Cauchy to seeded random resamples until every receiver's decode check
    passes (the rate never changes, only the coefficients)."""
    finals = sorted(subsets.values(), key=lambda ws: (ws.key.level, ws.key))
    plans: list[tuple[list[int], int]] = []
    for ws in finals:
        rows = _subset_rows(ws)
        rho = max(_subset_residual(ws, side) for side in (inst.side_map[u] for u in ws.key.members))
        plans.append((rows, rho))
    total = sum(rho for _, rho in plans)

    rng = random.Random(0)
    solution_rows: tuple = ()
    for attempt, style in enumerate(("plain", "cauchy", "random", "random", "random")):
        chunks = []
        for rows, rho in plans:
            if rho:
                chunks.append(_combine(rows, rho, inst.m, style, rng))
        solution_rows = tuple(row for chunk in chunks for row in chunk)
        fld = GF2 if all(e <= 1 for row in solution_rows for e in row) else GF256
        matrix = CodingMatrix(fld, inst.m, solution_rows)
        if all(
            solve_decode(matrix, side, uid.packet) is not None for uid, side in inst.users
        ):
            break
    return SchemeSolution(scheme, total, None, matrix, trace=trace)


def run_heuristic(inst: GicInstance, init: str = "user") -> SchemeSolution:
    """Full pipeline with the chosen initialization ('user' or 'packet')."""
    if init == "user":
        start = initial_subsets_user(inst)
    elif init == "packet":
        start = initial_subsets_packet(inst)
    else:
        raise ValueError(f"init must be 'user' or 'packet', got {init!r}")
    merged, trace = step2_merge(inst, start)
    return step3_rate(inst, merged, f"heuristic-{init}", trace)
