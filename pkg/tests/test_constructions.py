from __future__ import annotations

import itertools
import random

import pytest

from rankstore import bounds
from rankstore.arraycode import mds_array_rowwise, zigzag_5_3
from rankstore.constructions import (
    NodeView,
    build_construction_one,
    build_construction_two,
    c1_decode,
    c1_encode,
    c2_decode,
    c2_encode,
    c2_local_repair,
    c2_msr_variant,
    decode_with_erasures,
    transform_eval_points,
)
from rankstore.errors import GroupUnrepairable, MalformedInput
from rankstore.field import linear_combination, rank_q


@pytest.fixture(scope="module")
def zz():
    return zigzag_5_3(5)


@pytest.fixture(scope="module")
def c1(zz):
    return build_construction_one(zz, 1)


@pytest.fixture(scope="module")
def c2(zz):
    return c2_msr_variant(zz, 15, 5, 1, m=36)


def _add(block, err):
    return [a + b for a, b in zip(block, err)]


def test_c1_layout(c1):
    f = c1.field
    assert (c1.outer.n, c1.outer.k, c1.outer.d, f.m) == (12, 4, 9, 12)
    assert c1.file_size == 4 * (3 - 2)
    rng = random.Random(0)
    file = [f.random(rng) for _ in range(4)]
    c = c1.outer.encode(file)
    nodes = c1_encode(c1, file)
    for i in range(3):
        assert nodes[i].block == c[4 * i : 4 * i + 4]
    assert all(s == f.zero for v in c1.encode([f.zero] * 4) for s in v.block)


def test_transformed_points(c1):
    g = c1.outer.points
    assert c1.transform_points([0, 1, 2]) == list(g)
    pts = c1.transform_points([0, 1, 3])
    assert pts[:8] == list(g[:8])
    assert pts[8:] == [g[i] + g[i + 4] + g[i + 8] for i in range(4)]
    for nodes in itertools.combinations(range(5), 3):
        assert rank_q(c1.transform_points(list(nodes))) == 12
    with pytest.raises(MalformedInput):
        transform_eval_points(c1.inner, [0, 0, 1], g)


def test_transformed_points_evaluate_stored_symbols(c1):
    f = c1.field
    rng = random.Random(1)
    file = [f.random(rng) for _ in range(4)]
    poly = c1.outer.polynomial(file)
    nodes = c1.encode(file)
    for j in range(5):
        assert [poly(p) for p in c1.transform_points([j])] == nodes[j].block


def test_c1_example_cases(c1, zz):
    f = c1.field
    rng = random.Random(2)
    file = [f.random(rng) for _ in range(4)]
    blocks = [v.block for v in c1.encode(file)]
    e = [f.random(rng) for _ in range(4)]
    blocks[0] = _add(blocks[0], e)
    plan = zz.plan_for(1)
    blocks[1] = c1.repair(1, list(plan.helpers), [blocks[j] for j in plan.helpers])
    truth = [v.block for v in c1.encode(file)]
    err = [a - b for j in range(5) for a, b in zip(blocks[j], truth[j])]
    assert rank_q(err) <= 4
    b21 = zz.transfer(plan, 0)
    assert blocks[1] == _add(truth[1], [linear_combination(col, e, 5) for col in zip(*b21)])
    assert c1_decode(c1, {j: blocks[j] for j in (0, 1, 2)}) == file
    assert c1_decode(c1, {j: blocks[j] for j in (0, 1, 3)}) == file


def test_c1_every_subset_after_static_history(c1, zz):
    f = c1.field
    rng = random.Random(3)
    for target in range(5):
        for _ in range(20):
            file = [f.random(rng) for _ in range(4)]
            blocks = [v.block for v in c1.encode(file)]
            blocks[target] = _add(blocks[target], [f.random(rng) for _ in range(4)])
            for _ in range(rng.randrange(6)):
                failed = rng.randrange(5)
                plan = zz.plan_for(failed)
                blocks[failed] = c1.repair(failed, list(plan.helpers), [blocks[j] for j in plan.helpers])
            for nodes in itertools.combinations(range(5), 3):
                assert c1.decode({j: blocks[j] for j in nodes}) == file


def test_c1_optimal_file_size(zz):
    for t in (0, 1):
        s = build_construction_one(zz, t, m=12)
        assert s.file_size == 4 * (3 - 2 * t) == bounds.regen_resilience_bound(4, 2, 4, 3, t)
    with pytest.raises(ValueError):
        build_construction_one(zz, 1, file_size=5)


def test_c2_layout(c2):
    f = c2.field
    assert (c2.outer.n, c2.outer.k, c2.outer.d, f.m) == (36, 20, 17, 36)
    assert [list(g) for g in c2.groups] == [list(range(0, 5)), list(range(5, 10)), list(range(10, 15))]
    rng = random.Random(4)
    file = [f.random(rng) for _ in range(20)]
    c = c2.outer.encode(file)
    nodes = c2_encode(c2, file)
    for g in range(3):
        for i in range(3):
            assert nodes[5 * g + i].block == c[12 * g + 4 * i : 12 * g + 4 * i + 4]
    assert all(s == f.zero for v in c2.encode([f.zero] * 20) for s in v.block)


def test_c2_group_repair_example(c2):
    f = c2.field
    rng = random.Random(5)
    file = [f.random(rng) for _ in range(20)]
    truth = [v.block for v in c2.encode(file)]
    blocks = [list(b) for b in truth]
    e = [f.random(rng) for _ in range(4)]
    blocks[2] = _add(blocks[2], e)
    blocks[1] = c2_local_repair(c2, [0, 2, 4], [blocks[0], blocks[2], blocks[4]], 1)
    half = f(3)
    assert blocks[1] == [truth[1][0] - e[3], truth[1][1] - e[2] * 2, truth[1][2] - e[1], truth[1][3] - e[0] * half]
    assert c2_decode(c2, {j: blocks[j] for j in range(11)}) == file
    assert c2.local_repair(1, [0, 2, 4], [truth[0], truth[2], truth[4]]) == truth[1]


def test_c2_local_repair_errors(c2):
    f = c2.field
    zero = [f.zero] * 4
    with pytest.raises(MalformedInput):
        c2.local_repair(1, [0, 5, 4], [zero] * 3)
    with pytest.raises(GroupUnrepairable):
        c2.local_repair(1, [0, 2], [zero] * 2)


def test_c2_any_collection_error_free(c2):
    f = c2.field
    rng = random.Random(6)
    file = [f.random(rng) for _ in range(20)]
    blocks = [v.block for v in c2.encode(file)]
    for _ in range(8):
        nodes = sorted(rng.sample(range(15), 11))
        assert c2.decode({j: blocks[j] for j in nodes}) == file
    assert c2.useful_nodes(list(range(15))) == [0, 1, 2, 5, 6, 7, 10, 11, 12]


def test_c2_optimality_identity(zz):
    rowwise = mds_array_rowwise(3, 3, 4, 5)
    for code in (zz, rowwise):
        for t in (0, 1, 2):
            s = build_construction_two(code, 15, 5, t, m=36)
            rho, h = bounds.collector_split(15, 5, 3, 3)
            assert s.file_size == (rho * 3 - 2 * t) * 4 + min(h * 4, 3 * 4)
            assert s.file_size == bounds.lrc_resilience_bound(15, 5, 3, 3, 4, t)
    with pytest.raises(ValueError):
        build_construction_two(zz, 15, 6, 1, m=36)


def test_c2_rowwise_matches_zigzag_decode_path():
    rowwise = build_construction_two(mds_array_rowwise(3, 3, 4, 5), 15, 5, 1, m=36)
    f = rowwise.field
    rng = random.Random(7)
    file = [f.random(rng) for _ in range(20)]
    blocks = [v.block for v in rowwise.encode(file)]
    blocks[7] = _add(blocks[7], [f.random(rng) for _ in range(4)])
    blocks[6] = rowwise.local_repair(6, [5, 7, 8], [blocks[5], blocks[7], blocks[8]])
    assert rowwise.decode({j: blocks[j] for j in range(4, 15)}) == file


def test_zigzag_groups_cut_repair_bandwidth(zz):
    rowwise = mds_array_rowwise(3, 3, 4, 5)
    assert zz.plan_for(1).bandwidth == 8
    assert rowwise.plan_for(1).bandwidth == 12


def test_decode_with_erasures_handles_polluted_nodes(c1, zz):
    """A liar's in-space answer spreads into a repaired node; erasing the liar must still decode."""
    f = c1.field
    rng = random.Random(8)
    for _ in range(20):
        file = [f.random(rng) for _ in range(4)]
        truth = [v.block for v in c1.encode(file)]
        blocks = [list(b) for b in truth]
        liar = rng.randrange(5)
        # pollution: other nodes pick up errors inside span(truth[liar])
        for j in rng.sample([x for x in range(5) if x != liar], 2):
            w = [[rng.randrange(5) for _ in range(4)] for _ in range(4)]
            blocks[j] = _add(blocks[j], [linear_combination(col, truth[liar], 5) for col in zip(*w)])
        nodes = sorted(rng.sample(range(5), 3))
        if liar not in nodes:
            nodes = sorted(nodes[:2] + [liar])
        views = [NodeView(j, blocks[j]) for j in nodes if j != liar]
        assert decode_with_erasures(c1, views, [liar]) == file
