"""Closed-form resilience-capacity and distance bounds.

All functions take and return plain integers.  Throughout, for an LRC with
n nodes, distance d_min and local groups of size r + delta - 1, a data
collector reading n - d_min + 1 nodes sees rho full groups plus h extra
nodes: rho = (n - d_min + 1) // (r + delta - 1) and
h = (n - d_min + 1) - rho (r + delta - 1).
"""

from __future__ import annotations

import itertools

from .errors import InfeasibleAdversary


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _require_nonneg(**kw) -> None:
    for name, v in kw.items():
        if not isinstance(v, int) or v < 0:
            raise ValueError(f"{name} must be a nonnegative integer, got {v!r}")


def _require_pos(**kw) -> None:
    for name, v in kw.items():
        if not isinstance(v, int) or v < 1:
            raise ValueError(f"{name} must be a positive integer, got {v!r}")


def collector_split(n: int, d_min: int, r: int, delta: int) -> tuple[int, int]:
    """(rho, h) for a collector of n - d_min + 1 nodes."""
    _require_pos(n=n, d_min=d_min, r=r, delta=delta)
    if d_min > n:
        raise ValueError("d_min cannot exceed n")
    reach = n - d_min + 1
    size = r + delta - 1
    rho = reach // size
    return rho, reach - rho * size


def regen_resilience_bound(alpha: int, beta: int, d: int, k: int, t: int) -> int:
    """sum_{i=2t+1}^{k} min((d - i + 1) beta, alpha)."""
    _require_pos(alpha=alpha, beta=beta, d=d, k=k)
    _require_nonneg(t=t)
    if k > d:
        raise ValueError(f"need k <= d, got k={k}, d={d}")
    if 2 * t >= k:
        raise InfeasibleAdversary(f"2t = {2 * t} must be below k = {k}")
    return sum(min((d - i + 1) * beta, alpha) for i in range(2 * t + 1, k + 1))


def lrc_dmin_bound(n: int, M: int, r: int, delta: int, alpha: int) -> int:
    """n - ceil(M/alpha) + 1 - (ceil(M/(r alpha)) - 1)(delta - 1)."""
    _require_pos(n=n, M=M, r=r, delta=delta, alpha=alpha)
    return n - _ceil_div(M, alpha) + 1 - (_ceil_div(M, r * alpha) - 1) * (delta - 1)


def lrc_resilience_bound(n: int, d_min: int, r: int, delta: int, alpha: int, t: int) -> int:
    """(rho r - 2t) alpha + min(h alpha, r alpha)."""
    _require_pos(alpha=alpha)
    _require_nonneg(t=t)
    rho, h = collector_split(n, d_min, r, delta)
    if 2 * t >= rho * r + min(h, r):
        raise InfeasibleAdversary(f"need 2t < rho r + min(h, r) = {rho * r + min(h, r)}")
    return (rho * r - 2 * t) * alpha + min(h * alpha, r * alpha)


def c2_required_D(n: int, d_min: int, r: int, delta: int, alpha: int, t: int) -> int:
    """Smallest outer rank distance that lets any n - d_min + 1 nodes decode.

    2 t alpha + (n/(r+delta-1) - rho) r alpha - min(h alpha, r alpha) + 1,
    but never below 1.
    """
    _require_pos(alpha=alpha)
    _require_nonneg(t=t)
    size = r + delta - 1
    if n % size:
        raise ValueError(f"group size r + delta - 1 = {size} must divide n = {n}")
    rho, h = collector_split(n, d_min, r, delta)
    value = 2 * t * alpha + (n // size - rho) * r * alpha - min(h * alpha, r * alpha) + 1
    return max(value, 1)


def _check_local_regen(r: int, delta: int, d: int) -> None:
    if not r < d < r + delta - 1:
        raise ValueError(f"need r < d < r + delta - 1, got r={r}, d={d}, delta={delta}")


def msr_lrc_bound(n: int, d_min: int, r: int, delta: int, alpha: int, beta: int, d: int, t: int) -> int:
    """(rho - 2 floor(t/d)) r alpha + (min(h, r) - 2 min(g, r)) alpha, g = t mod d."""
    _require_pos(alpha=alpha, beta=beta, d=d)
    _require_nonneg(t=t)
    _check_local_regen(r, delta, d)
    rho, h = collector_split(n, d_min, r, delta)
    if 2 * t >= rho * r + min(h, r):
        raise InfeasibleAdversary(f"need 2t < rho r + min(h, r) = {rho * r + min(h, r)}")
    full, rest = divmod(t, d)
    return (rho - 2 * full) * r * alpha + (min(h, r) - 2 * min(rest, r)) * alpha


def mbr_storage(r: int, alpha: int, beta: int) -> int:
    """B_MBR = r alpha - r (r - 1) beta / 2."""
    return r * alpha - r * (r - 1) * beta // 2


def _tail(d: int, start: int, stop: int, beta: int) -> int:
    """sum_{i=start}^{stop} (d - i + 1) beta; empty ranges give 0."""
    return sum((d - i + 1) * beta for i in range(start, stop + 1))


def mbr_lrc_terms(n: int, d_min: int, r: int, delta: int, alpha: int, beta: int, d: int, t: int):
    """Term I and the minimized term II (None if no admissible split of t exists)."""
    _require_pos(alpha=alpha, beta=beta, d=d)
    _require_nonneg(t=t)
    _check_local_regen(r, delta, d)
    rho, h = collector_split(n, d_min, r, delta)
    if 2 * t >= rho * r + min(h, r):
        raise InfeasibleAdversary(f"need 2t < rho r + min(h, r) = {rho * r + min(h, r)}")
    full, rest = divmod(t, d)
    term1 = (
        (rho - 2 * full) * mbr_storage(r, alpha, beta)
        - 2 * _tail(d, 1, min(rest, r), beta)
        + _tail(d, 1, min(h, r), beta)
    )
    best = None
    for rt, s, st, sh in itertools.product(
        range(rho + 1), range(d // 2 + 1), range(d // 2 + 1), range(min(h, r) // 2 + 1)
    ):
        if rt * s + (rho - rt) * st + sh != t:
            continue
        val = (
            rt * _tail(d, 2 * s + 1, d, beta)
            + (rho - rt) * _tail(d, 2 * st + 1, d, beta)
            + _tail(d, 2 * sh + 1, min(h, d), beta)
        )
        if best is None or val < best:
            best = val
    return term1, best


def mbr_lrc_bound(n: int, d_min: int, r: int, delta: int, alpha: int, beta: int, d: int, t: int) -> int:
    """min(term I, term II), term II minimized over every admissible split of t."""
    term1, term2 = mbr_lrc_terms(n, d_min, r, delta, alpha, beta, d, t)
    return term1 if term2 is None else min(term1, term2)


def naive_dynamic_bound(alpha: int, beta: int, k: int, t: int) -> int:
    """alpha + (k - 2t - 1) beta: file size for error-free naive repair."""
    _require_pos(alpha=alpha, beta=beta, k=k)
    _require_nonneg(t=t)
    if k < 2 * t + 1:
        raise InfeasibleAdversary(f"need k >= 2t + 1, got k={k}, t={t}")
    return alpha + (k - 2 * t - 1) * beta


def all_bounds(params: dict) -> dict:
    """Every bound whose inputs are present in ``params``.

    Keys follow the function names; a bound whose preconditions fail is
    reported as {"error": message}.
    """
    p = dict(params)
    out: dict = {}

    def attempt(name, fn, keys):
        if all(k in p for k in keys):
            try:
                out[name] = fn(*(p[k] for k in keys))
            except (ValueError, InfeasibleAdversary) as exc:
                out[name] = {"error": str(exc)}

    t = p.get("t", 0)
    p["t"] = t
    if "M" not in p and all(k in p for k in ("n", "d_min", "r", "delta", "alpha")):
        try:
            rho, h = collector_split(p["n"], p["d_min"], p["r"], p["delta"])
            p["M"] = (rho * p["r"] + min(h, p["r"])) * p["alpha"]
        except ValueError:
            pass
    attempt("regen_resilience_bound", regen_resilience_bound, ("alpha", "beta", "d", "k", "t"))
    attempt("naive_dynamic_bound", naive_dynamic_bound, ("alpha", "beta", "k", "t"))
    attempt("lrc_dmin_bound", lrc_dmin_bound, ("n", "M", "r", "delta", "alpha"))
    attempt("lrc_resilience_bound", lrc_resilience_bound, ("n", "d_min", "r", "delta", "alpha", "t"))
    attempt("c2_required_D", c2_required_D, ("n", "d_min", "r", "delta", "alpha", "t"))
    attempt("msr_lrc_bound", msr_lrc_bound, ("n", "d_min", "r", "delta", "alpha", "beta", "d", "t"))
    attempt("mbr_lrc_bound", mbr_lrc_bound, ("n", "d_min", "r", "delta", "alpha", "beta", "d", "t"))
    return out
