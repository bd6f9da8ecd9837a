"""Randomized invariants across the whole pipeline."""

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from gicast import (
    GF2,
    GF256,
    CodingMatrix,
    GicInstance,
    PacketPartition,
    conditional_entropy,
    enumerate_partitions,
    exhaustive_iupm,
    exhaustive_ppm,
    exhaustive_upm,
    load_instance,
    minrank_gf2,
    ppm_as_upm,
    ppm_rate,
    save_instance,
    upm_rate,
)
from gicast.gf import rank


@st.composite
def instances(draw, max_m=4, max_users=6):
    m = draw(st.integers(1, max_m))
    extra = draw(st.integers(0, max_users - m))
    fills = draw(st.lists(st.integers(1, m), min_size=extra, max_size=extra))
    copies = {}
    users = []
    for i in sorted(list(range(1, m + 1)) + fills):
        copies[i] = copies.get(i, 0) + 1
        side = draw(st.sets(st.integers(1, m).filter(lambda p: p != i), max_size=m - 1))
        users.append(((i, copies[i]), side))
    return GicInstance.make(m, users)


@st.composite
def gf2_matrices(draw, max_rows=6, max_cols=8):
    ncols = draw(st.integers(1, max_cols))
    nrows = draw(st.integers(1, max_rows))
    rows = tuple(
        tuple(draw(st.integers(0, 1)) for _ in range(ncols)) for _ in range(nrows)
    )
    return CodingMatrix(GF2, ncols, rows)


@given(instances())
@settings(max_examples=40, deadline=None)
def test_scheme_ordering_chain(inst):
    mr = minrank_gf2(inst)
    iu = exhaustive_iupm(inst).rate
    up = exhaustive_upm(inst).rate
    pp = exhaustive_ppm(inst).rate
    assert mr <= iu <= up <= pp
    assert pp <= inst.m  # sending everything raw is always available


@given(instances())
@settings(max_examples=30, deadline=None)
def test_packet_partition_reduction(inst):
    for blocks in enumerate_partitions(inst.m):
        P = PacketPartition.of(blocks)
        r1, _ = ppm_rate(inst, P)
        r2, _ = upm_rate(inst, ppm_as_upm(inst, P))
        assert r1 == r2


@given(instances())
@settings(max_examples=50, deadline=None)
def test_save_load_round_trip(inst):
    assert load_instance(save_instance(inst)) == inst


@given(gf2_matrices())
@settings(max_examples=60, deadline=None)
def test_rank_invariant_under_row_shuffle(M):
    rng = random.Random(0)
    rows = list(M.rows)
    rng.shuffle(rows)
    assert rank(CodingMatrix(GF2, M.ncols, tuple(rows))) == rank(M)


@given(gf2_matrices(), st.integers(1, 255))
@settings(max_examples=40, deadline=None)
def test_rank_invariant_under_scaling(M, scalar):
    lifted = CodingMatrix(GF256, M.ncols, M.rows)
    scaled = CodingMatrix(
        GF256,
        M.ncols,
        tuple(tuple(GF256.mul(scalar, v) for v in row) for row in M.rows),
    )
    assert rank(scaled) == rank(lifted)


@given(gf2_matrices())
@settings(max_examples=40, deadline=None)
def test_entropy_boundaries(M):
    assert conditional_entropy(M, set()) == rank(M)
    assert conditional_entropy(M, set(range(1, M.ncols + 1))) == 0


@given(st.integers(1, 7))
@settings(max_examples=7, deadline=None)
def test_partitions_unique_and_complete(n):
    seen = set()
    for blocks in enumerate_partitions(n):
        flat = sorted(i for b in blocks for i in b)
        assert flat == list(range(1, n + 1))
        key = tuple(sorted(tuple(sorted(b)) for b in blocks))
        assert key not in seen
        seen.add(key)


@given(instances(max_m=3, max_users=5))
@settings(max_examples=30, deadline=None)
def test_block_order_invariance(inst):
    parts = [PacketPartition.of(blocks) for blocks in enumerate_partitions(inst.m)]
    for P in parts:
        reversed_blocks = PacketPartition.of(tuple(reversed(P.blocks)))
        assert ppm_rate(inst, P)[0] == ppm_rate(inst, reversed_blocks)[0]
