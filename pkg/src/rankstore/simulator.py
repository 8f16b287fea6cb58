"""Deterministic simulator of a storage system under static or dynamic attack.

The state keeps every node's stored block next to the ground truth (which no
decoder ever consults), a trusted verifier's per-node subspace record, and
an append-only event log.  All randomness derives from the scenario seed, so
replaying the same script gives the same log.

Node indices are 0-based here; scenario files use 1-based numbering.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence, Union

from . import linalg
from .bounds import naive_dynamic_bound
from .constructions import ConstructionOne, ConstructionTwo, NodeView, decode_with_erasures
from .errors import DecodeFailure, MalformedInput, RepairFailure, ScenarioError
from .field import ExtElem, linear_combination, rank_q
from .gabidulin import welch_berlekamp

Scheme = Union[ConstructionOne, ConstructionTwo]

STRATEGIES = ("junk", "inspace", "honest", "mixed")


@dataclass(frozen=True)
class DynamicStrategy:
    """What a dynamically compromised node sends when asked for data.

    junk: fresh random field elements; inspace: y_j W for a fresh random F_q
    matrix W (undetectable by the verifier); honest: the correct answer;
    mixed: junk on odd requests, inspace on even ones.  Each answer depends
    only on (seed, node, request counter, request kind).
    """

    kind: str = "junk"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in STRATEGIES:
            raise MalformedInput(f"unknown strategy {self.kind!r}; expected one of {STRATEGIES}")

    def respond(self, node: int, counter: int, request: str, stored: Sequence[ExtElem], honest: list) -> list:
        kind = self.kind
        if kind == "mixed":
            kind = "junk" if counter % 2 else "inspace"
        if kind == "honest":
            return list(honest)
        rng = random.Random(f"{self.seed}:{node}:{counter}:{request}")
        field = stored[0].field
        if kind == "junk":
            return [field.random(rng) for _ in honest]
        q = field.q
        w = [[rng.randrange(q) for _ in honest] for _ in stored]
        return [linear_combination(col, list(stored), q) for col in zip(*w)]


@dataclass
class AdversaryModel:
    mode: str = "static"  # or "dynamic"
    t: int = 1
    compromised: set = dc_field(default_factory=set)
    static_errors: dict = dc_field(default_factory=dict)
    strategies: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in ("static", "dynamic"):
            raise MalformedInput(f"adversary mode must be static or dynamic, got {self.mode!r}")


@dataclass
class EventRecord:
    kind: str
    payload: dict
    outcome: str
    aggregate_error_rank: int = 0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "payload": self.payload,
            "outcome": self.outcome,
            "aggregate_error_rank": self.aggregate_error_rank,
        }


@dataclass
class SystemState:
    scheme: Scheme
    file: list
    nodes: list
    truth: list
    signatures: list
    adversary: AdversaryModel
    seed: int
    verify: bool = False
    provenance: list = dc_field(default_factory=list)
    log: list = dc_field(default_factory=list)
    counters: dict = dc_field(default_factory=dict)
    tolerance_exceeded: bool = False
    rng: random.Random = dc_field(default_factory=random.Random)

    @property
    def n(self) -> int:
        return len(self.nodes)

    def views(self, indices: Sequence[int]) -> list[NodeView]:
        return [NodeView(i, self.nodes[i], self.provenance[i]) for i in indices]


def _signature(block: Sequence[ExtElem]):
    q = block[0].field.q
    return linalg.rref([list(s.coeffs) for s in block], q)


def sim_init(
    scheme: Scheme,
    file: Sequence,
    seed: int = 0,
    verify: bool = False,
    adversary: Optional[AdversaryModel] = None,
) -> SystemState:
    """Encode ``file`` onto a fresh system and sign every node."""
    blocks = [v.block for v in scheme.encode(file)]
    state = SystemState(
        scheme=scheme,
        file=[scheme.field(x) for x in file],
        nodes=[list(b) for b in blocks],
        truth=[list(b) for b in blocks],
        signatures=[_signature(b) for b in blocks],
        adversary=adversary if adversary is not None else AdversaryModel(t=scheme.t_max),
        seed=seed,
        verify=verify,
        provenance=["original"] * len(blocks),
        rng=random.Random(seed),
    )
    return state


def _log(state: SystemState, kind: str, payload: dict, outcome: str) -> EventRecord:
    rec = EventRecord(kind, payload, outcome, aggregate_error_rank(state))
    state.log.append(rec)
    return rec


def aggregate_error_rank(state: SystemState) -> int:
    """F_q-rank of all stored-minus-true symbols across the system."""
    diff = [a - b for node, true in zip(state.nodes, state.truth) for a, b in zip(node, true)]
    return rank_q(diff)


def random_error(state: SystemState) -> list:
    field = state.scheme.field
    return [field.random(state.rng) for _ in range(state.scheme.alpha)]


def _register(state: SystemState, node: int) -> None:
    adv = state.adversary
    if node not in adv.compromised and len(adv.compromised) >= adv.t:
        raise ScenarioError(f"adversary already controls {adv.t} node(s); cannot add node {node}")
    adv.compromised.add(node)


def sim_corrupt(state: SystemState, node: int, action: Union[Sequence[ExtElem], DynamicStrategy]) -> SystemState:
    """Static: add an error block once.  Dynamic: register a response strategy."""
    if not 0 <= node < state.n:
        raise MalformedInput(f"node {node} out of range")
    adv = state.adversary
    if isinstance(action, DynamicStrategy):
        if adv.mode != "dynamic":
            raise ScenarioError("dynamic strategy given to a static adversary")
        _register(state, node)
        adv.strategies[node] = action
        _log(state, "corrupt", {"node": node, "strategy": action.kind}, "registered")
        return state
    if adv.mode != "static":
        raise ScenarioError("error block given to a dynamic adversary")
    if node in adv.static_errors:
        raise ScenarioError(f"node {node} was already corrupted; static errors happen once")
    err = [state.scheme.field(e) for e in action]
    if len(err) != state.scheme.alpha:
        raise MalformedInput(f"error block must have {state.scheme.alpha} symbols")
    _register(state, node)
    adv.static_errors[node] = err
    state.nodes[node] = [a + e for a, e in zip(state.nodes[node], err)]
    _log(state, "corrupt", {"node": node, "error_rank": rank_q(err)}, "applied")
    return state


# -- node responses and verification ------------------------------------------------


def _respond(state: SystemState, node: int, request: str, honest: list) -> list:
    """What ``node`` actually sends when the honest answer would be ``honest``."""
    strat = state.adversary.strategies.get(node)
    if strat is None:
        return honest
    count = state.counters.get(node, 0) + 1
    state.counters[node] = count
    return strat.respond(node, count, request, state.nodes[node], honest)


def verifier_check(state: SystemState, node: int, sent: Sequence[ExtElem]) -> bool:
    """True iff every sent symbol lies in the node's certified F_q-subspace."""
    if not 0 <= node < state.n:
        raise MalformedInput(f"node {node} out of range")
    q = state.scheme.field.q
    sig = state.signatures[node]
    return all(linalg.in_column_space(sig, list(s.coeffs), q) for s in sent)


def sim_verify(state: SystemState, node: int) -> bool:
    """Ask ``node`` for its block and check it; logged as a verify event."""
    block = _respond(state, node, "full", list(state.nodes[node]))
    passed = verifier_check(state, node, block)
    _log(state, "verify", {"node": node}, "pass" if passed else "fail")
    return passed


def _resign(state: SystemState, node: int) -> None:
    state.signatures[node] = _signature(state.nodes[node])


# -- repair ----------------------------------------------------------------------


def _group_context(state: SystemState, failed: int):
    """(code, offset, candidate helpers) for the code that owns ``failed``."""
    scheme = state.scheme
    if isinstance(scheme, ConstructionOne):
        return scheme.inner, 0, [j for j in range(state.n) if j != failed]
    g = scheme.group_of(failed)
    members = scheme.groups[g]
    return scheme.group_code, members[0], [j for j in members if j != failed]


def _default_helpers(state: SystemState, failed: int, mode: str) -> list[int]:
    code, off, others = _group_context(state, failed)
    if mode == "local":
        return others[: code.k]
    scheme_ = code.repair
    if scheme_ is not None and (failed - off) in scheme_.plans:
        return [h + off for h in scheme_.plans[failed - off].helpers]
    return others[: code.k]


def _plan(state: SystemState, failed: int, helpers: Sequence[int], mode: str):
    code, off, others = _group_context(state, failed)
    if any(h not in others for h in helpers):
        raise ScenarioError(f"helpers {list(helpers)} are not admissible for node {failed}")
    local = [h - off for h in helpers]
    try:
        if mode == "local":
            if len(local) < code.k:
                raise RepairFailure(f"local repair needs {code.k} helpers")
            return code, off, code.make_plan(failed - off, local, [linalg.identity(code.alpha)] * len(local))
        return code, off, code.plan_for(failed - off, local)
    except RepairFailure as exc:
        raise ScenarioError(str(exc)) from None


def sim_fail_repair(
    state: SystemState, failed: int, helpers: Optional[Sequence[int]] = None, mode: str = "bandwidth"
) -> SystemState:
    """Fail node ``failed`` and rebuild it.

    bandwidth: the code's repair plan (within the group for Construction II).
    local: whole blocks from r (or k) helpers, Construction II groups or any
    code with erasure-style repair.  naive_verified: the error-correcting
    repair that decodes the outer code; see :func:`_naive_repair`.
    With verification on, a failed transfer check in any mode switches to
    the naive repair of the failed node plus every node caught lying.
    """
    if not 0 <= failed < state.n:
        raise MalformedInput(f"node {failed} out of range")
    if mode not in ("bandwidth", "local", "naive_verified"):
        raise MalformedInput(f"unknown repair mode {mode!r}")
    if mode == "local" and isinstance(state.scheme, ConstructionOne) and state.scheme.inner.repair is None:
        raise ScenarioError("local repair needs a code with erasure-style repair")
    if helpers is None:
        helpers = _default_helpers(state, failed, mode if mode != "naive_verified" else "bandwidth")
    helpers = list(helpers)
    if len(set(helpers)) != len(helpers) or failed in helpers:
        raise ScenarioError(f"helper set {helpers} is not admissible for node {failed}")
    code, off, plan = _plan(state, failed, helpers, "local" if mode == "local" else "bandwidth")

    sent: dict[int, list] = {}
    for j in plan.helpers:
        node = j + off
        honest = code.repair_download(plan, j, state.nodes[node])
        sent[node] = _respond(state, node, "repair", honest)
    failed_check = [j for j in sent if state.verify and not verifier_check(state, j, sent[j])]

    if mode == "naive_verified" or failed_check:
        return _naive_repair(state, failed, helpers, plan, code, off, sent, failed_check, mode)

    if any(j in state.adversary.strategies for j in sent) and not state.verify:
        state.tolerance_exceeded = True
    block = code.repair_rebuild(plan, [sent[j + off] for j in plan.helpers])
    state.nodes[failed] = block
    state.provenance[failed] = "repaired"
    if state.verify:
        _resign(state, failed)
    _log(
        state,
        "repair",
        {"node": failed, "mode": mode, "helpers": sorted(sent), "bandwidth": plan.bandwidth},
        "repaired",
    )
    return state


def _naive_repair(state, failed, helpers, plan, code, off, sent, failed_check, mode) -> SystemState:
    """Decode the outer code to restore exact blocks.

    First try the transfers already received (d beta symbols) when the file
    is small enough for that to be safe; otherwise fetch whole blocks from
    the lowest-indexed helpers that passed the check, verifying those too.
    """
    scheme = state.scheme
    unverified_dynamic = not state.verify and any(j in state.adversary.strategies for j in sent)
    file = None
    used = "transfers"
    if not failed_check and isinstance(scheme, ConstructionOne):
        safe = False
        k, t = scheme.k, state.adversary.t
        if 2 * t < k:
            beta = min(plan.betas)
            safe = scheme.file_size <= naive_dynamic_bound(scheme.alpha, beta, k, t)
        if safe:
            pts: list[ExtElem] = []
            vals: list[ExtElem] = []
            for j, v in zip(plan.helpers, plan.matrices):
                cols = linalg.mat_mul(code.column_block(j), [list(r) for r in v], code.q)
                pts.extend(linear_combination(col, list(scheme.outer.points), code.q) for col in zip(*cols))
                vals.extend(sent[j + off])
            try:
                file = welch_berlekamp(scheme.field, scheme.file_size, pts, vals)
            except DecodeFailure:
                file = None
    if file is None:
        used = "blocks"
        if unverified_dynamic:
            state.tolerance_exceeded = True
        file, failed_check = _decode_from_blocks(state, failed, helpers, failed_check)
    restored = [failed] + [j for j in failed_check if j != failed]
    encoded = [v.block for v in scheme.encode(file)]
    for j in restored:
        state.nodes[j] = list(encoded[j])
        state.provenance[j] = "repaired"
        if state.verify:
            _resign(state, j)
    _log(
        state,
        "repair",
        {
            "node": failed,
            "mode": mode,
            "helpers": sorted(sent),
            "failed_check": sorted(failed_check),
            "decoded_from": used,
            "restored": sorted(restored),
        },
        "repaired",
    )
    return state


def _decode_from_blocks(state: SystemState, failed: int, helpers: Sequence[int], excluded: Sequence[int]):
    """Fetch whole blocks from the lowest-indexed passing nodes and decode.

    Returns (file, nodes caught lying).  Nodes failing a check count as
    erasures; see :func:`decode_with_erasures`.
    """
    scheme = state.scheme
    erased = sorted(excluded)
    if isinstance(scheme, ConstructionOne):
        target = scheme.k
        pool = sorted(j for j in helpers if j not in erased and j != failed)
    else:
        target = scheme.collect_size
        pool = sorted(j for j in range(state.n) if j not in erased and j != failed)
    views = []
    for j in pool:
        if len(views) + len(erased) >= target:
            break
        block = _respond(state, j, "full", list(state.nodes[j]))
        if state.verify and not verifier_check(state, j, block):
            erased.append(j)
            continue
        views.append(NodeView(j, block))
    try:
        return decode_with_erasures(scheme, views, erased), erased
    except DecodeFailure as exc:
        raise RepairFailure(f"naive repair of node {failed} could not decode: {exc}") from None


# -- collection --------------------------------------------------------------------


@dataclass
class CollectResult:
    outcome: str  # success | decode_failure | miscorrection
    file: Optional[list]
    nodes: list
    erased: list
    in_tolerance: bool


def sim_collect_detailed(state: SystemState, subset: Sequence[int], verified: Optional[bool] = None) -> CollectResult:
    scheme = state.scheme
    subset = list(subset)
    if len(set(subset)) != len(subset) or any(not 0 <= j < state.n for j in subset):
        raise MalformedInput(f"bad node subset {subset}")
    if len(subset) != scheme.collect_size:
        raise MalformedInput(f"collection needs exactly {scheme.collect_size} nodes, got {len(subset)}")
    verified = state.verify if verified is None else verified
    views, erased = [], []
    for j in sorted(subset):
        block = _respond(state, j, "full", list(state.nodes[j]))
        if verified and not verifier_check(state, j, block):
            erased.append(j)
            continue
        views.append(NodeView(j, block))
    in_tol = not state.tolerance_exceeded and len(state.adversary.compromised) <= scheme.t_max
    try:
        if not views:
            raise DecodeFailure("every node was erased")
        file = decode_with_erasures(scheme, views, erased)
    except DecodeFailure as exc:
        res = CollectResult("decode_failure", None, sorted(subset), erased, in_tol)
        _log(state, "collect", {"nodes": sorted(subset), "erased": erased, "error": str(exc)}, res.outcome)
        return res
    outcome = "success" if file == state.file else "miscorrection"
    res = CollectResult(outcome, file, sorted(subset), erased, in_tol)
    _log(state, "collect", {"nodes": sorted(subset), "erased": erased}, outcome)
    return res


def sim_collect(state: SystemState, subset: Sequence[int], verified: Optional[bool] = None) -> list:
    """Decode the file from ``subset``; raises DecodeFailure when that fails."""
    res = sim_collect_detailed(state, subset, verified)
    if res.file is None:
        raise DecodeFailure(f"collection from {res.nodes} failed")
    return res.file
