from __future__ import annotations

import random

import pytest

from rankstore import linalg
from rankstore.arraycode import zigzag_5_3
from rankstore.constructions import build_construction_one, c2_msr_variant
from rankstore.errors import DecodeFailure, MalformedInput, ScenarioError
from rankstore.field import linear_combination, rank_q
from rankstore.simulator import (
    AdversaryModel,
    DynamicStrategy,
    aggregate_error_rank,
    random_error,
    sim_collect,
    sim_collect_detailed,
    sim_corrupt,
    sim_fail_repair,
    sim_init,
    sim_verify,
    verifier_check,
)


@pytest.fixture(scope="module")
def c1():
    return build_construction_one(zigzag_5_3(5), 1)


@pytest.fixture(scope="module")
def c2():
    return c2_msr_variant(zigzag_5_3(5), 15, 5, 1, m=36)


def _file(scheme, seed):
    rng = random.Random(seed)
    return [scheme.field.random(rng) for _ in range(scheme.file_size)]


def test_init_and_collect_without_adversary(c1):
    file = _file(c1, 0)
    state = sim_init(c1, file)
    assert aggregate_error_rank(state) == 0
    for nodes in ([0, 1, 2], [2, 3, 4], [0, 3, 4]):
        assert sim_collect(state, nodes) == file


def test_example_three_layout(c2):
    state = sim_init(c2, _file(c2, 1))
    assert state.n == 15 and c2.outer.n == 36 and len(c2.groups) == 3


def test_static_corruption(c1):
    file = _file(c1, 2)
    state = sim_init(c1, file, seed=2)
    e = random_error(state)
    before = list(state.nodes[0])
    sim_corrupt(state, 0, e)
    assert state.nodes[0] == [a + b for a, b in zip(before, e)]
    assert aggregate_error_rank(state) == rank_q(e)
    with pytest.raises(ScenarioError):
        sim_corrupt(state, 0, e)
    with pytest.raises(ScenarioError):
        sim_corrupt(state, 1, e)  # t = 1 already used


def test_zero_error_is_noop(c1):
    state = sim_init(c1, _file(c1, 3))
    truth = [list(b) for b in state.nodes]
    sim_corrupt(state, 2, [c1.field.zero] * 4)
    assert state.nodes == truth and aggregate_error_rank(state) == 0


def test_bandwidth_repair_propagates_b21(c1):
    state = sim_init(c1, _file(c1, 4), seed=4)
    e = random_error(state)
    sim_corrupt(state, 0, e)
    sim_fail_repair(state, 1)
    b21 = c1.inner.transfer(c1.inner.plan_for(1), 0)
    want = [t + linear_combination(col, e, 5) for t, col in zip(state.truth[1], zip(*b21))]
    assert state.nodes[1] == want
    assert sim_collect(state, [0, 1, 2]) == state.file
    assert sim_collect(state, [0, 1, 3]) == state.file


@pytest.mark.parametrize("mode", ["bandwidth", "local", "naive_verified"])
def test_error_free_repair_restores_truth(c1, mode):
    state = sim_init(c1, _file(c1, 5), verify=True)
    for failed in range(5):
        sim_fail_repair(state, failed, None, mode)
        assert state.nodes[failed] == state.truth[failed]


def test_c2_local_repair_stays_in_group(c2):
    state = sim_init(c2, _file(c2, 6), seed=6)
    sim_corrupt(state, 7, random_error(state))
    sim_fail_repair(state, 6, [5, 7, 8], "local")
    rec = state.log[-1].payload
    assert set(rec["helpers"]) <= set(c2.groups[1])
    with pytest.raises(ScenarioError):
        sim_fail_repair(state, 6, [5, 7, 11], "local")
    assert aggregate_error_rank(state) <= 4
    assert sim_collect(state, list(range(4, 15))) == state.file


def test_static_rank_confinement(c1):
    rng = random.Random(7)
    for seed in range(30):
        state = sim_init(c1, _file(c1, seed), seed=seed)
        sim_corrupt(state, rng.randrange(5), random_error(state))
        for _ in range(8):
            sim_fail_repair(state, rng.randrange(5))
            assert aggregate_error_rank(state) <= 4


def test_verifier_soundness(c1):
    state = sim_init(c1, _file(c1, 8), verify=True)
    rng = random.Random(8)
    q = 5
    for j in range(5):
        block = state.nodes[j]
        assert verifier_check(state, j, block)
        # any F_q-combination of the stored symbols passes, including lies y_j V'
        w = [[rng.randrange(q) for _ in range(3)] for _ in range(4)]
        assert verifier_check(state, j, [linear_combination(col, block, q) for col in zip(*w)])
        # a vector outside the 4-dim span fails
        expanded = [list(s.coeffs) for s in block]
        complement = linalg.kernel(expanded, q)
        outside = c1.field(complement[0])
        if rank_q(block + [outside]) > rank_q(block):
            assert not verifier_check(state, j, [outside])
    with pytest.raises(MalformedInput):
        verifier_check(state, 9, [])


def test_dynamic_junk_grows_response_rank(c1):
    strat = DynamicStrategy("junk", 3)
    state = sim_init(c1, _file(c1, 9))
    honest = state.nodes[0][:2]
    seen = []
    ranks = []
    for counter in range(1, 5):
        seen += strat.respond(0, counter, "repair", state.nodes[0], honest)
        ranks.append(rank_q(seen))
    assert ranks == sorted(ranks) and ranks[-1] > ranks[0]


def test_dynamic_inspace_passes_verifier(c1):
    state = sim_init(c1, _file(c1, 10), verify=True, adversary=AdversaryModel("dynamic", 1))
    sim_corrupt(state, 0, DynamicStrategy("inspace", 1))
    assert sim_verify(state, 0)
    state2 = sim_init(c1, _file(c1, 10), verify=True, adversary=AdversaryModel("dynamic", 1))
    sim_corrupt(state2, 0, DynamicStrategy("junk", 1))
    assert not sim_verify(state2, 0)


def test_dynamic_without_verification_breaks_confinement(c1):
    state = sim_init(c1, _file(c1, 11), adversary=AdversaryModel("dynamic", 1))
    sim_corrupt(state, 0, DynamicStrategy("junk", 11))
    for failed in (1, 2, 3):
        sim_fail_repair(state, failed)
    assert aggregate_error_rank(state) > 4
    assert state.tolerance_exceeded
    res = sim_collect_detailed(state, [1, 2, 3])
    assert res.outcome != "success" and not res.in_tolerance
    if res.outcome == "decode_failure":
        with pytest.raises(DecodeFailure):
            sim_collect(state, [1, 2, 3])


def test_dynamic_verified_confinement(c1):
    for seed in range(20):
        rng = random.Random(seed)
        state = sim_init(c1, _file(c1, seed), seed=seed, verify=True, adversary=AdversaryModel("dynamic", 1))
        sim_corrupt(state, rng.randrange(5), DynamicStrategy(rng.choice(["junk", "inspace", "mixed"]), seed))
        for _ in range(5):
            sim_fail_repair(state, rng.randrange(5))
            assert aggregate_error_rank(state) <= 4
        assert sim_collect(state, sorted(rng.sample(range(5), 3))) == state.file


def test_erasures_within_budget(c1):
    """s nodes failing checks: still decodes when 2(t - s) alpha + s alpha <= D - 1."""
    state = sim_init(c1, _file(c1, 12), verify=True, adversary=AdversaryModel("dynamic", 1))
    sim_corrupt(state, 2, DynamicStrategy("junk", 12))
    res = sim_collect_detailed(state, [0, 1, 2])
    assert res.erased == [2] and res.outcome == "success"


def test_determinism(c1):
    def run(seed):
        state = sim_init(c1, _file(c1, 13), seed=seed, verify=True, adversary=AdversaryModel("dynamic", 1))
        sim_corrupt(state, 1, DynamicStrategy("mixed", seed))
        for failed in (0, 2, 3, 4, 0):
            sim_fail_repair(state, failed)
        sim_collect_detailed(state, [0, 2, 4])
        return [r.to_dict() for r in state.log], state.nodes

    assert run(5) == run(5)


def test_mode_mismatches(c1):
    state = sim_init(c1, _file(c1, 14))
    with pytest.raises(ScenarioError):
        sim_corrupt(state, 0, DynamicStrategy("junk"))
    with pytest.raises(MalformedInput):
        DynamicStrategy("nonsense")
    with pytest.raises(MalformedInput):
        sim_fail_repair(state, 0, None, "teleport")
    with pytest.raises(MalformedInput):
        sim_collect(state, [0, 1])
