"""Scenario files: parse, validate, run, report.

A scenario is a JSON object::

    {"name": ..., "seed": 7, "verify": false,
     "scheme": {"construction": "two", "q": 5, "m": 36, "inner": "zigzag",
                "n": 15, "d_min": 5, "t": 1},
     "adversary": {"mode": "static", "t": 1},
     "file": {"random": true} | {"hex": "..."} | {"symbols": [[...], ...]},
     "events": [{"op": "corrupt", "node": 3, "error": "random"},
                {"op": "repair", "node": 2, "helpers": [1, 3, 5], "mode": "local"},
                {"op": "collect", "nodes": [1, 2, ..., 11]}]}

Node numbers in scenario files start at 1.
"""

from __future__ import annotations

import functools
import json
import random
import time
from dataclasses import dataclass, field as dc_field
from typing import Any, Optional

from . import bounds
from .arraycode import mds_array_rowwise, zigzag_5_3
from .constructions import ConstructionOne, ConstructionTwo, build_construction_one, build_construction_two
from .errors import DecodeFailure, MalformedInput, RankStoreError, RepairFailure, ScenarioError
from .payload import bytes_to_symbols, capacity_bytes
from .simulator import (
    AdversaryModel,
    DynamicStrategy,
    SystemState,
    aggregate_error_rank,
    random_error,
    sim_collect_detailed,
    sim_corrupt,
    sim_fail_repair,
    sim_init,
    sim_verify,
)

EVENT_OPS = ("corrupt", "repair", "collect", "verify")
REPAIR_MODES = ("bandwidth", "local", "naive_verified")


def _need(d: dict, key: str, kind=int):
    if key not in d:
        raise ScenarioError(f"missing field {key!r}")
    v = d[key]
    if kind is int and (not isinstance(v, int) or isinstance(v, bool)):
        raise ScenarioError(f"field {key!r} must be an integer")
    return v


def normalize_scheme(desc: dict) -> dict:
    """Fill defaults and check field types; the result is canonical."""
    if not isinstance(desc, dict):
        raise ScenarioError("scheme must be an object")
    kind = desc.get("construction")
    if kind not in ("one", "two"):
        raise ScenarioError("scheme.construction must be 'one' or 'two'")
    inner = desc.get("inner", "zigzag")
    if inner not in ("zigzag", "rowwise"):
        raise ScenarioError("scheme.inner must be 'zigzag' or 'rowwise'")
    out: dict[str, Any] = {"construction": kind, "inner": inner, "q": _need(desc, "q"), "t": desc.get("t", 0)}
    if kind == "one":
        if inner != "zigzag":
            raise ScenarioError("construction one needs an inner code with bandwidth-efficient repair (zigzag)")
        out["m"] = desc.get("m", 12)
        if desc.get("file_size") is not None:
            out["file_size"] = _need(desc, "file_size")
        return out
    out["n"] = _need(desc, "n")
    out["d_min"] = _need(desc, "d_min")
    if inner == "zigzag":
        out.update(r=3, delta=3, alpha=4)
        for key, val in (("r", 3), ("delta", 3), ("alpha", 4)):
            if key in desc and desc[key] != val:
                raise ScenarioError(f"zigzag groups fix {key} = {val}")
    else:
        out.update(r=_need(desc, "r"), delta=_need(desc, "delta"), alpha=_need(desc, "alpha"))
    size = out["r"] + out["delta"] - 1
    out["m"] = desc.get("m", out["n"] * out["r"] * out["alpha"] // size)
    return out


@functools.lru_cache(maxsize=32)
def _build_cached(key: str):
    d = json.loads(key)
    q, t, m = d["q"], d["t"], d["m"]
    if d["inner"] == "zigzag":
        inner = zigzag_5_3(q)
    else:
        inner = mds_array_rowwise(d["r"], d["delta"], d["alpha"], q)
    if d["construction"] == "one":
        return build_construction_one(inner, t, m=m, file_size=d.get("file_size"))
    return build_construction_two(inner, d["n"], d["d_min"], t, m=m)


def build_scheme(desc: dict):
    """Scheme object for a scheme description; identical descriptions share one object."""
    d = normalize_scheme(desc)
    try:
        return _build_cached(json.dumps(d, sort_keys=True))
    except (ValueError, RankStoreError) as exc:
        raise ScenarioError(f"invalid scheme: {exc}") from None


def scheme_bounds(scheme) -> dict:
    if isinstance(scheme, ConstructionOne):
        inner = scheme.inner
        beta = inner.repair.beta if inner.repair else inner.alpha
        d = inner.repair.d if inner.repair else inner.k
        params = {"alpha": inner.alpha, "beta": beta, "d": d, "k": inner.k, "t": scheme.t_max}
    else:
        params = {
            "n": scheme.n,
            "d_min": scheme.d_min,
            "r": scheme.r,
            "delta": scheme.delta,
            "alpha": scheme.alpha,
            "t": scheme.t_max,
        }
    return bounds.all_bounds(params)


@dataclass
class ScenarioConfig:
    scheme: dict
    events: list
    seed: int = 0
    verify: bool = False
    adversary: dict = dc_field(default_factory=lambda: {"mode": "static"})
    file: dict = dc_field(default_factory=lambda: {"random": True})
    name: str = ""

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        if not isinstance(d, dict):
            raise ScenarioError("scenario must be a JSON object")
        unknown = set(d) - {"scheme", "events", "seed", "verify", "adversary", "file", "name"}
        if unknown:
            raise ScenarioError(f"unknown scenario fields {sorted(unknown)}")
        scheme = normalize_scheme(d.get("scheme", {}))
        adv = dict(d.get("adversary", {"mode": "static"}))
        if adv.get("mode", "static") not in ("static", "dynamic"):
            raise ScenarioError("adversary.mode must be 'static' or 'dynamic'")
        adv = {"mode": adv.get("mode", "static"), "t": adv.get("t", scheme["t"])}
        events = d.get("events", [])
        if not isinstance(events, list):
            raise ScenarioError("events must be a list")
        events = [_normalize_event(e, i) for i, e in enumerate(events)]
        file = d.get("file", {"random": True})
        if not isinstance(file, dict) or len(file) != 1 or next(iter(file)) not in ("random", "hex", "symbols"):
            raise ScenarioError("file must be one of {'random': true}, {'hex': ...}, {'symbols': [...]}")
        seed = d.get("seed", 0)
        if not isinstance(seed, int):
            raise ScenarioError("seed must be an integer")
        return cls(
            scheme=scheme,
            events=events,
            seed=seed,
            verify=bool(d.get("verify", False)),
            adversary=adv,
            file=dict(file),
            name=str(d.get("name", "")),
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "verify": self.verify,
            "scheme": dict(self.scheme),
            "adversary": dict(self.adversary),
            "file": dict(self.file),
            "events": [dict(e) for e in self.events],
        }


def _normalize_event(e: dict, i: int) -> dict:
    if not isinstance(e, dict) or e.get("op") not in EVENT_OPS:
        raise ScenarioError(f"event {i}: op must be one of {EVENT_OPS}")
    op = e["op"]
    if op == "corrupt":
        out = {"op": op, "node": _need(e, "node")}
        if "strategy" in e:
            if e["strategy"] not in ("junk", "inspace", "honest", "mixed"):
                raise ScenarioError(f"event {i}: unknown strategy {e['strategy']!r}")
            out["strategy"] = e["strategy"]
            if "seed" in e:
                out["seed"] = _need(e, "seed")
        else:
            out["error"] = e.get("error", "random")
        return out
    if op == "repair":
        mode = e.get("mode", "bandwidth")
        if mode not in REPAIR_MODES:
            raise ScenarioError(f"event {i}: repair mode must be one of {REPAIR_MODES}")
        out = {"op": op, "node": _need(e, "node"), "mode": mode}
        if e.get("helpers") is not None:
            out["helpers"] = [int(h) for h in e["helpers"]]
        return out
    if op == "collect":
        if not isinstance(e.get("nodes"), list):
            raise ScenarioError(f"event {i}: collect needs a node list")
        out = {"op": op, "nodes": [int(x) for x in e["nodes"]]}
        if "verified" in e:
            out["verified"] = bool(e["verified"])
        return out
    return {"op": op, "node": _need(e, "node")}


def load_config(path: str) -> ScenarioConfig:
    with open(path) as fh:
        return ScenarioConfig.from_dict(json.load(fh))


def file_symbols(config: ScenarioConfig, scheme) -> list:
    field = scheme.field
    spec = config.file
    if "symbols" in spec:
        syms = spec["symbols"]
        if len(syms) != scheme.file_size:
            raise ScenarioError(f"file has {len(syms)} symbols, scheme stores {scheme.file_size}")
        return [field([int(c) for c in s]) for s in syms]
    if "hex" in spec:
        data = bytes.fromhex(spec["hex"])
        if len(data) > capacity_bytes(field, scheme.file_size):
            raise ScenarioError("hex payload exceeds the scheme's capacity")
        return bytes_to_symbols(data, field, scheme.file_size)
    rng = random.Random(f"file:{config.seed}")
    return [field.random(rng) for _ in range(scheme.file_size)]


def _node(state: SystemState, one_based: int, i: int) -> int:
    if not 1 <= one_based <= state.n:
        raise ScenarioError(f"event {i}: node {one_based} out of range 1..{state.n}")
    return one_based - 1


def run_config(config: ScenarioConfig, seed: Optional[int] = None) -> dict:
    """Execute every event on a fresh system and return the report."""
    start = time.perf_counter()
    if seed is not None:
        config = ScenarioConfig.from_dict({**config.to_dict(), "seed": seed})
    scheme = build_scheme(config.scheme)
    file = file_symbols(config, scheme)
    adv = AdversaryModel(mode=config.adversary["mode"], t=config.adversary["t"])
    state = sim_init(scheme, file, seed=config.seed, verify=config.verify, adversary=adv)
    roundtrip = _roundtrip(scheme, file)
    outcomes = []
    collects = []
    violation = None
    for i, ev in enumerate(config.events):
        entry: dict[str, Any] = {"index": i, "op": ev["op"]}
        try:
            entry.update(_run_event(state, ev, i))
        except (ScenarioError, MalformedInput) as exc:
            violation = f"event {i}: {exc}"
            entry["outcome"] = "invalid"
            entry["error"] = str(exc)
            entry["aggregate_error_rank"] = aggregate_error_rank(state)
            outcomes.append(entry)
            break
        entry["aggregate_error_rank"] = aggregate_error_rank(state)
        outcomes.append(entry)
        if ev["op"] == "collect":
            collects.append(entry)
    failed_in_tolerance = [
        e["index"] for e in outcomes if e.get("in_tolerance") and e["outcome"] in ("decode_failure", "miscorrection", "repair_failure")
    ]
    ok = violation is None and roundtrip and not failed_in_tolerance
    report = {
        "name": config.name,
        "seed": config.seed,
        "scheme": scheme.descriptor() | {"description": config.scheme},
        "bounds": scheme_bounds(scheme),
        "encode_roundtrip": roundtrip,
        "events": outcomes,
        "aggregate_error_rank_trace": [e["aggregate_error_rank"] for e in outcomes],
        "collect_verdicts": [{"index": e["index"], "outcome": e["outcome"], "in_tolerance": e["in_tolerance"]} for e in collects],
        "tolerance_exceeded": state.tolerance_exceeded,
        "violation": violation,
        "ok": ok,
        "timing_s": round(time.perf_counter() - start, 4),
    }
    report["scheme"].pop("inner", None)
    return report


def _roundtrip(scheme, file: list) -> bool:
    views = scheme.encode(file)
    return scheme.decode(views[: scheme.collect_size]) == list(file)


def _in_tolerance(state: SystemState) -> bool:
    return not state.tolerance_exceeded and len(state.adversary.compromised) <= state.scheme.t_max


def _run_event(state: SystemState, ev: dict, i: int) -> dict:
    op = ev["op"]
    if op == "corrupt":
        node = _node(state, ev["node"], i)
        if "strategy" in ev:
            sim_corrupt(state, node, DynamicStrategy(ev["strategy"], ev.get("seed", state.seed)))
            return {"node": ev["node"], "outcome": "registered"}
        err = ev["error"]
        if err == "random":
            block = random_error(state)
        else:
            if not isinstance(err, list):
                raise ScenarioError(f"event {i}: error must be 'random' or a list of symbols")
            block = [state.scheme.field([int(c) for c in s]) for s in err]
        sim_corrupt(state, node, block)
        return {"node": ev["node"], "outcome": "applied"}
    if op == "repair":
        node = _node(state, ev["node"], i)
        helpers = [_node(state, h, i) for h in ev["helpers"]] if "helpers" in ev else None
        tol = _in_tolerance(state)
        try:
            sim_fail_repair(state, node, helpers, ev["mode"])
        except RepairFailure as exc:
            return {"node": ev["node"], "outcome": "repair_failure", "error": str(exc), "in_tolerance": tol and _in_tolerance(state)}
        rec = state.log[-1].payload
        out = {"node": ev["node"], "mode": ev["mode"], "outcome": "repaired", "helpers": [h + 1 for h in rec["helpers"]]}
        if "restored" in rec:
            out["restored"] = [h + 1 for h in rec["restored"]]
            out["failed_check"] = [h + 1 for h in rec["failed_check"]]
        return out
    if op == "collect":
        nodes = [_node(state, x, i) for x in ev["nodes"]]
        res = sim_collect_detailed(state, nodes, ev.get("verified"))
        return {
            "nodes": ev["nodes"],
            "outcome": res.outcome,
            "erased": [j + 1 for j in res.erased],
            "in_tolerance": res.in_tolerance,
        }
    node = _node(state, ev["node"], i)
    passed = sim_verify(state, node)
    return {"node": ev["node"], "outcome": "pass" if passed else "fail"}


def run_path(path: str, seed: Optional[int] = None) -> dict:
    return run_config(load_config(path), seed)
