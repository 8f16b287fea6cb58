"""Command-line interface: bounds, encode, decode, run.

Exit codes: 0 success, 1 a decode or an in-tolerance collection failed,
2 bad input (unreadable files, invalid parameters or scenarios).
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

from .bounds import all_bounds
from .constructions import NodeView
from .errors import DecodeFailure, RankStoreError
from .payload import bytes_to_symbols, capacity_bytes, symbols_to_bytes
from .scenario import build_scheme, load_config, normalize_scheme, run_config

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2


class InputError(Exception):
    pass


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _emit(obj, out: Optional[str]) -> None:
    text = json.dumps(obj, indent=2, sort_keys=False)
    if out:
        try:
            with open(out, "w") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            raise InputError(f"cannot write {out}: {exc}") from None
    else:
        print(text)


def _scheme_desc(path: Optional[str], fallback: Optional[dict] = None) -> dict:
    if path is None:
        if fallback is None:
            raise InputError("--config is required")
        return fallback
    data = _read_json(path)
    return data.get("scheme", data) if isinstance(data, dict) else data


def cmd_bounds(args) -> int:
    params: dict = {}
    if args.config:
        params.update(_read_json(args.config))
    for item in args.params:
        key, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"expected key=value, got {item!r}")
        try:
            params[key] = int(value)
        except ValueError:
            raise InputError(f"{key} must be an integer") from None
    if not params:
        raise InputError("no parameters given")
    result = {"inputs": params, "bounds": all_bounds(params)}
    _emit(result, args.out)
    return EXIT_OK


def cmd_encode(args) -> int:
    desc = normalize_scheme(_scheme_desc(args.config))
    scheme = build_scheme(desc)
    if args.hex is not None:
        data = bytes.fromhex(args.hex)
    elif args.input:
        try:
            with open(args.input, "rb") as fh:
                data = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {args.input}: {exc}") from None
    else:
        data = sys.stdin.buffer.read()
    cap = capacity_bytes(scheme.field, scheme.file_size)
    if len(data) > cap:
        raise InputError(f"payload of {len(data)} bytes exceeds the scheme capacity of {cap} bytes")
    symbols = bytes_to_symbols(data, scheme.field, scheme.file_size)
    nodes = scheme.encode(symbols)
    out = {
        "scheme": desc,
        "length": len(data),
        "nodes": [{"index": v.index + 1, "block": [list(s.coeffs) for s in v.block]} for v in nodes],
    }
    _emit(out, args.out)
    return EXIT_OK


def cmd_decode(args) -> int:
    if not args.input:
        raise InputError("--in is required")
    data = _read_json(args.input)
    desc = normalize_scheme(_scheme_desc(args.config, data.get("scheme")))
    scheme = build_scheme(desc)
    entries = {int(e["index"]): e["block"] for e in data["nodes"]}
    if args.nodes:
        wanted = [int(x) for x in args.nodes.split(",")]
    else:
        wanted = sorted(entries)[: scheme.collect_size]
    missing = [j for j in wanted if j not in entries]
    if missing:
        raise InputError(f"nodes {missing} are not in {args.input}")
    field = scheme.field
    views = [NodeView(j - 1, [field([int(c) for c in s]) for s in entries[j]]) for j in wanted]
    try:
        file = scheme.decode(views)
    except DecodeFailure as exc:
        print(f"decode failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    payload = symbols_to_bytes(file, int(data["length"]))
    if args.out:
        try:
            with open(args.out, "wb") as fh:
                fh.write(payload)
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc}") from None
    else:
        sys.stdout.buffer.write(payload)
    return EXIT_OK


def _run_one(path: str, seed: Optional[int]) -> dict:
    try:
        return run_config(load_config(path), seed)
    except RankStoreError as exc:
        return {"config": path, "ok": False, "violation": str(exc), "invalid": True}


def cmd_run(args) -> int:
    paths = list(args.configs)
    if args.config:
        paths.insert(0, args.config)
    if not paths:
        raise InputError("no scenario given")
    for p in paths:
        _read_json(p)
    if args.jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_run_one, paths, [args.seed] * len(paths)))
    else:
        reports = [_run_one(p, args.seed) for p in paths]
    for p, r in zip(paths, reports):
        r.setdefault("config", p)
    _emit(reports[0] if len(reports) == 1 else reports, args.out)
    if any(r.get("invalid") or r.get("violation") for r in reports):
        for r in reports:
            if r.get("violation"):
                print(f"{r['config']}: {r['violation']}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK if all(r["ok"] for r in reports) else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rankstore", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="evaluate every applicable bound")
    p.add_argument("params", nargs="*", help="key=value pairs, e.g. n=15 d_min=5 r=3 delta=3 alpha=4 t=1")
    p.add_argument("--config", help="JSON object of parameters")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("encode", help="encode a byte payload onto nodes")
    p.add_argument("--config", required=True, help="scheme JSON (or a scenario holding one)")
    p.add_argument("--in", dest="input", help="payload file (default: stdin)")
    p.add_argument("--hex", help="payload given as hex on the command line")
    p.add_argument("--out", help="node file to write (default: stdout)")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="recover the payload from node blocks")
    p.add_argument("--config", help="scheme JSON; defaults to the one stored in the node file")
    p.add_argument("--in", dest="input", required=True, help="node file from encode")
    p.add_argument("--nodes", help="comma-separated 1-based node numbers to read")
    p.add_argument("--out", help="payload file to write (default: stdout)")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("run", help="execute scenario scripts")
    p.add_argument("configs", nargs="*", help="scenario files")
    p.add_argument("--config", help="scenario file")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--out", help="report file (default: stdout)")
    p.add_argument("--jobs", type=int, default=1, help="run several scenarios in parallel")
    p.set_defaults(func=cmd_run)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (RankStoreError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
