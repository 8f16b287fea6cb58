from __future__ import annotations

import itertools
import random

import pytest

from rankstore import linalg
from rankstore.arraycode import (
    array_encode,
    array_erasure_decode,
    code_from_descriptor,
    mds_array_rowwise,
    msr_repair,
    zigzag_5_3,
)
from rankstore.errors import MalformedInput, RepairFailure
from rankstore.field import ExtField, rank_q

Q = 5


@pytest.fixture(scope="module")
def zz():
    return zigzag_5_3(Q)


def _rand_blocks(rng, k, alpha, q=Q):
    return [[rng.randrange(q) for _ in range(alpha)] for _ in range(k)]


def test_zigzag_matrices(zz):
    a2 = zz.blocks[1][4]
    a3 = zz.blocks[2][4]
    assert list(a2[2]) == [2, 0, 0, 0]
    assert list(a3[1]) == [2, 0, 0, 0]
    for i in range(3):
        assert [list(r) for r in zz.blocks[i][3]] == linalg.identity(4)


def test_encode_examples(zz):
    rng = random.Random(0)
    x = _rand_blocks(rng, 3, 4)
    y = array_encode(zz, x)
    assert y[:3] == x
    assert y[3] == [(a + b + c) % Q for a, b, c in zip(*x)]
    assert array_encode(zz, [[0] * 4] * 3) == [[0] * 4] * 5


def test_encode_over_extension_field(zz):
    f = ExtField(5, 3)
    rng = random.Random(1)
    x = [[f.random(rng) for _ in range(4)] for _ in range(3)]
    y = zz.encode(x)
    assert y[3] == [a + b + c for a, b, c in zip(*x)]
    assert zz.erasure_decode([1, 3, 4], [y[1], y[3], y[4]]) == x


@pytest.mark.parametrize("q", [3, 5, 7, 11])
def test_zigzag_is_mds(q):
    code = zigzag_5_3(q)
    for nodes in itertools.combinations(range(5), 3):
        assert linalg.rank(code.submatrix(list(nodes)), q) == 12
    assert code.is_mds()


def test_erasure_decode(zz):
    rng = random.Random(2)
    x = _rand_blocks(rng, 3, 4)
    y = zz.encode(x)
    assert array_erasure_decode(zz, [0, 1, 2], y[:3]) == x
    x3 = [(d - a - b) % Q for d, a, b in zip(y[3], x[0], x[1])]
    assert array_erasure_decode(zz, [0, 1, 3], [y[0], y[1], y[3]])[2] == x3 == x[2]
    for nodes in itertools.combinations(range(5), 3):
        assert zz.erasure_decode(list(nodes), [y[j] for j in nodes]) == x
    with pytest.raises(MalformedInput):
        zz.erasure_decode([0, 0, 1], [y[0], y[0], y[1]])


@pytest.mark.parametrize("q", [3, 5, 7, 11])
def test_every_node_repairs_exactly(q):
    code = zigzag_5_3(q)
    rng = random.Random(q)
    for _ in range(10):
        y = code.encode(_rand_blocks(rng, 3, 4, q))
        for failed in range(5):
            plan = code.plan_for(failed)
            got = msr_repair(code, failed, list(plan.helpers), [y[j] for j in plan.helpers])
            assert got == y[failed]


def test_repair_bandwidth(zz):
    for failed in range(4):
        plan = zz.plan_for(failed)
        assert len(plan.helpers) == 4 and plan.betas == (2, 2, 2, 2) and plan.bandwidth == 8
    assert zz.repair.d == 4 and zz.repair.beta == 2 == 4 // (4 - 3 + 1)
    # the second parity has no 8-symbol plan over F_5; its plan still beats reading 3 blocks
    assert zz.plan_for(4).bandwidth == 9


def test_node_two_repair_expression(zz):
    """Node 2 rebuilt after node 1 carries error e: (c5..c8) + (-e1, -e2, -e1/2, -e2/2)."""
    f = ExtField(5, 4)
    rng = random.Random(3)
    x = [[f.random(rng) for _ in range(4)] for _ in range(3)]
    y = zz.encode(x)
    e = [f.random(rng) for _ in range(4)]
    bad = list(y)
    bad[0] = [a + b for a, b in zip(y[0], e)]
    plan = zz.plan_for(1)
    got = msr_repair(zz, 1, list(plan.helpers), [bad[j] for j in plan.helpers])
    half = f(3)  # 2^-1 in F_5
    assert got == [y[1][0] - e[0], y[1][1] - e[1], y[1][2] - e[0] * half, y[1][3] - e[1] * half]


def test_group_repair_expression(zz):
    """Node 2 rebuilt from {1,3,5} after node 3 carries e: adds (-e4, -2e3, -e2, -e1/2)."""
    f = ExtField(5, 4)
    rng = random.Random(4)
    x = [[f.random(rng) for _ in range(4)] for _ in range(3)]
    y = zz.encode(x)
    e = [f.random(rng) for _ in range(4)]
    bad = list(y)
    bad[2] = [a + b for a, b in zip(y[2], e)]
    got = msr_repair(zz, 1, [0, 2, 4], [bad[0], bad[2], bad[4]])
    assert got == [y[1][0] - e[3], y[1][1] - e[2] * 2, y[1][2] - e[1], y[1][3] - e[0] * 3]


def test_repair_is_linear(zz):
    rng = random.Random(5)
    for failed in range(5):
        plan = zz.plan_for(failed)
        a = {j: [rng.randrange(Q) for _ in range(4)] for j in plan.helpers}
        b = {j: [rng.randrange(Q) for _ in range(4)] for j in plan.helpers}
        s = {j: [(u + v) % Q for u, v in zip(a[j], b[j])] for j in plan.helpers}
        h = list(plan.helpers)
        ra = msr_repair(zz, failed, h, [a[j] for j in h])
        rb = msr_repair(zz, failed, h, [b[j] for j in h])
        rs = msr_repair(zz, failed, h, [s[j] for j in h])
        assert rs == [(u + v) % Q for u, v in zip(ra, rb)]


def test_error_propagation_superposition(zz):
    """After any repair sequence, stored - truth == e B for an F_q matrix B."""
    f = ExtField(5, 4)
    rng = random.Random(6)
    basis = [f.gen**i for i in range(4)]
    for _ in range(30):
        # start from the zero codeword so stored blocks are pure error terms
        nodes = [[f.zero] * 4 for _ in range(5)]
        nodes[rng.randrange(5)] = list(basis)
        for _ in range(rng.randrange(1, 6)):
            failed = rng.randrange(5)
            plan = zz.plan_for(failed)
            nodes[failed] = msr_repair(zz, failed, list(plan.helpers), [nodes[j] for j in plan.helpers])
        flat = [s for blk in nodes for s in blk]
        # every symbol lies in span(e_1..e_4), so the aggregate error rank stays <= 4
        assert rank_q(flat) <= 4


def test_transfer_matrices_match_b21(zz):
    assert zz.transfer(zz.plan_for(1), 0) == [[4, 0, 2, 0], [0, 4, 0, 2], [0, 0, 0, 0], [0, 0, 0, 0]]
    assert zz.transfer(zz.plan_for(1, [0, 2, 4]), 2) == [[0, 0, 0, 2], [0, 0, 4, 0], [0, 3, 0, 0], [4, 0, 0, 0]]


def test_bad_helper_sets(zz):
    with pytest.raises(RepairFailure):
        zz.plan_for(0, [1, 2])
    with pytest.raises(RepairFailure):
        zz.plan_for(0, [0, 1, 2])
    with pytest.raises(RepairFailure):
        zz.make_plan(0, [1, 2, 3, 4], [[[1], [0], [0], [0]]] * 4)


def test_rowwise_shape_and_mds():
    code = mds_array_rowwise(3, 3, 4, 5)
    assert (code.n, code.k, code.d_min, code.alpha) == (5, 3, 3, 4)
    assert code.is_mds()
    ident = mds_array_rowwise(3, 1, 2, 5)
    assert ident.n == 3 and ident.generator == linalg.identity(6)


def test_rowwise_all_erasure_patterns():
    code = mds_array_rowwise(3, 3, 2, 5)
    rng = random.Random(7)
    x = _rand_blocks(rng, 3, 2)
    y = code.encode(x)
    for nodes in itertools.combinations(range(5), 3):
        assert code.erasure_decode(list(nodes), [y[j] for j in nodes]) == x
    for failed in range(5):
        helpers = [j for j in range(5) if j != failed][:3]
        assert msr_repair(code, failed, helpers, [y[j] for j in helpers]) == y[failed]


def test_rowwise_field_too_small():
    with pytest.raises(ValueError):
        mds_array_rowwise(3, 3, 2, 3)


def test_descriptor_roundtrip(zz):
    again = code_from_descriptor(zz.descriptor())
    assert again.generator == zz.generator
    rw = mds_array_rowwise(3, 3, 4, 5)
    assert code_from_descriptor(rw.descriptor()).generator == rw.generator
