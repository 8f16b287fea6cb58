"""Concatenated storage schemes: a Gabidulin outer code over an F_q array code.

Because the inner generator has entries in F_q and the Gabidulin encoder is
F_q-linear, every stored symbol is itself an evaluation f(g') at a point g'
that is an F_q-combination of the outer points.  Any set of stored symbols
whose inner columns are independent therefore forms a (shortened) Gabidulin
codeword at the transformed points, which is what the decoders below use.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import bounds
from .arraycode import ArrayCode, msr_repair
from .errors import DecodeFailure, GroupUnrepairable, InsufficientNodes, MalformedInput
from .field import ExtElem, ExtField, ext_field_create, linear_combination, rank_q
from .gabidulin import GabidulinCode, welch_berlekamp


@dataclass
class NodeView:
    """One node's content as seen by a reader."""

    index: int
    block: list
    provenance: str = "original"  # or "repaired"

    def __post_init__(self):
        self.block = list(self.block)


def transform_eval_points(inner: ArrayCode, nodes: Sequence[int], base_points: Sequence[ExtElem]) -> list[ExtElem]:
    """Points at which the symbols stored on ``nodes`` evaluate the message polynomial.

    Returns g G_S: alpha points per listed node, in order.  Partial node sets
    are allowed; the result is independent whenever G_S has full column rank.
    """
    if len(base_points) != inner.k * inner.alpha:
        raise MalformedInput(f"expected {inner.k * inner.alpha} base points")
    if len(set(nodes)) != len(nodes):
        raise MalformedInput("repeated node index")
    g_s = inner.submatrix(nodes)
    return [linear_combination(col, list(base_points), inner.q) for col in zip(*g_s)]


def _as_views(views) -> list[NodeView]:
    if isinstance(views, dict):
        return [NodeView(i, b) for i, b in sorted(views.items())]
    out = [v if isinstance(v, NodeView) else NodeView(*v) for v in views]
    if len({v.index for v in out}) != len(out):
        raise MalformedInput("repeated node index")
    return out


def _file_symbols(field: ExtField, file: Sequence, size: int) -> list[ExtElem]:
    if len(file) != size:
        raise MalformedInput(f"file has {len(file)} symbols, scheme stores {size}")
    return [field(x) for x in file]


class ConstructionOne:
    """Gabidulin [alpha k, M', D] outer code followed by an MDS array code."""

    kind = "one"

    def __init__(self, outer: GabidulinCode, inner: ArrayCode, t_max: int):
        if outer.n != inner.alpha * inner.k:
            raise ValueError(f"outer length {outer.n} != alpha k = {inner.alpha * inner.k}")
        if outer.field.q != inner.q:
            raise ValueError("outer field must extend the inner code's base field")
        if 2 * t_max * inner.alpha + 1 > outer.d:
            raise ValueError(f"D = {outer.d} cannot absorb t = {t_max} corrupted nodes (needs {2 * t_max * inner.alpha + 1})")
        self.outer = outer
        self.inner = inner
        self.t_max = t_max

    @property
    def field(self) -> ExtField:
        return self.outer.field

    @property
    def n(self) -> int:
        return self.inner.n

    @property
    def k(self) -> int:
        return self.inner.k

    @property
    def alpha(self) -> int:
        return self.inner.alpha

    @property
    def file_size(self) -> int:
        return self.outer.k

    @property
    def collect_size(self) -> int:
        return self.inner.k

    def __repr__(self):
        return f"ConstructionOne({self.outer!r}, {self.inner!r}, t_max={self.t_max})"

    def encode(self, file: Sequence) -> list[NodeView]:
        c = self.outer.encode(_file_symbols(self.field, file, self.file_size))
        a = self.alpha
        x = [c[i * a : (i + 1) * a] for i in range(self.k)]
        return [NodeView(j, y) for j, y in enumerate(self.inner.encode(x))]

    def transform_points(self, nodes: Sequence[int]) -> list[ExtElem]:
        return transform_eval_points(self.inner, nodes, self.outer.points)

    def decode(self, views) -> list[ExtElem]:
        """Decode from up to k nodes; fewer than k nodes count as erasures."""
        views = _as_views(views)
        if not views or len(views) > self.k:
            raise MalformedInput(f"need between 1 and {self.k} nodes, got {len(views)}")
        nodes = [v.index for v in views]
        values = [s for v in views for s in v.block]
        pts = self.transform_points(nodes)
        return welch_berlekamp(self.field, self.file_size, pts, values)

    def repair(self, failed: int, helpers: Sequence[int], helper_blocks: Sequence[Sequence]) -> list:
        return msr_repair(self.inner, failed, helpers, helper_blocks)

    def descriptor(self) -> dict:
        return {
            "construction": "one",
            "field": self.field.descriptor(),
            "file_size": self.file_size,
            "t": self.t_max,
            "inner": self.inner.descriptor(),
        }


def build_construction_one(
    inner: ArrayCode,
    t: int,
    m: Optional[int] = None,
    file_size: Optional[int] = None,
    field: Optional[ExtField] = None,
) -> ConstructionOne:
    """Construction I at tolerance t; the default file size alpha (k - 2t) is optimal."""
    big_n = inner.alpha * inner.k
    if field is None:
        field = ext_field_create(inner.q, m if m is not None else big_n)
    if file_size is None:
        file_size = inner.alpha * (inner.k - 2 * t)
    if file_size < 1:
        raise ValueError(f"t = {t} leaves no room for data")
    return ConstructionOne(GabidulinCode(field, big_n, file_size), inner, t)


def c1_encode(scheme: ConstructionOne, file):
    return scheme.encode(file)


def c1_decode(scheme: ConstructionOne, views):
    return scheme.decode(views)


class ConstructionTwo:
    """Gabidulin outer code split into groups of r alpha symbols, each coded by a local array code."""

    kind = "two"

    def __init__(self, outer: GabidulinCode, group_code: ArrayCode, n: int, d_min: int, t_max: int):
        r, alpha = group_code.k, group_code.alpha
        size = group_code.n
        delta = size - r + 1
        if n % size:
            raise ValueError(f"group size {size} must divide n = {n}")
        if outer.n != n * r * alpha // size:
            raise ValueError(f"outer length {outer.n} != n r alpha / (r + delta - 1) = {n * r * alpha // size}")
        if outer.field.q != group_code.q:
            raise ValueError("outer field must extend the group code's base field")
        need = bounds.c2_required_D(n, d_min, r, delta, alpha, t_max)
        if outer.d < need:
            raise ValueError(f"outer distance {outer.d} below the required {need} for t = {t_max}")
        self.outer = outer
        self.group_code = group_code
        self.n = n
        self.r = r
        self.delta = delta
        self.alpha = alpha
        self.d_min = d_min
        self.t_max = t_max
        self.groups: tuple[tuple[int, ...], ...] = tuple(
            tuple(range(g * size, (g + 1) * size)) for g in range(n // size)
        )

    @property
    def field(self) -> ExtField:
        return self.outer.field

    @property
    def file_size(self) -> int:
        return self.outer.k

    @property
    def collect_size(self) -> int:
        return self.n - self.d_min + 1

    def __repr__(self):
        return (
            f"ConstructionTwo({self.outer!r}, {self.group_code!r}, n={self.n}, "
            f"d_min={self.d_min}, t_max={self.t_max})"
        )

    def group_of(self, node: int) -> int:
        if not 0 <= node < self.n:
            raise MalformedInput(f"node {node} out of range")
        return node // self.group_code.n

    def encode(self, file: Sequence) -> list[NodeView]:
        c = self.outer.encode(_file_symbols(self.field, file, self.file_size))
        a, r = self.alpha, self.r
        out: list[NodeView] = []
        for g, members in enumerate(self.groups):
            chunk = c[g * r * a : (g + 1) * r * a]
            x = [chunk[i * a : (i + 1) * a] for i in range(r)]
            for j, y in zip(members, self.group_code.encode(x)):
                out.append(NodeView(j, y))
        return out

    def _group_points(self, g: int) -> list[ExtElem]:
        ra = self.r * self.alpha
        return list(self.outer.points[g * ra : (g + 1) * ra])

    def local_repair(self, failed: int, helpers: Sequence[int], helper_blocks: Sequence[Sequence]) -> list:
        """Rebuild ``failed`` from nodes of its own group only."""
        g = self.group_of(failed)
        members = self.groups[g]
        if any(h not in members or h == failed for h in helpers):
            raise MalformedInput(f"helpers {list(helpers)} must be other nodes of group {list(members)}")
        if len(helpers) < self.r:
            raise GroupUnrepairable(f"group {g} has {len(helpers)} usable nodes, needs {self.r}")
        base = members[0]
        local = [h - base for h in helpers]
        return msr_repair(self.group_code, failed - base, local, helper_blocks)

    def useful_nodes(self, nodes: Sequence[int]) -> list[int]:
        """Per group, the r lowest-indexed of the given nodes."""
        chosen = []
        for members in self.groups:
            have = sorted(j for j in nodes if j in members)
            chosen.extend(have[: self.r])
        return chosen

    def decode(self, views) -> list[ExtElem]:
        views = _as_views(views)
        by_index = {v.index: v for v in views}
        pts: list[ExtElem] = []
        values: list[ExtElem] = []
        for g, members in enumerate(self.groups):
            have = sorted(j for j in by_index if j in members)[: self.r]
            if not have:
                continue
            local = [j - members[0] for j in have]
            pts.extend(transform_eval_points(self.group_code, local, self._group_points(g)))
            for j in have:
                values.extend(by_index[j].block)
        if len(values) < self.file_size:
            raise InsufficientNodes(f"{len(values)} useful symbols, need {self.file_size}")
        return welch_berlekamp(self.field, self.file_size, pts, values)

    def descriptor(self) -> dict:
        return {
            "construction": "two",
            "field": self.field.descriptor(),
            "n": self.n,
            "d_min": self.d_min,
            "file_size": self.file_size,
            "t": self.t_max,
            "inner": self.group_code.descriptor(),
        }


def build_construction_two(
    group_code: ArrayCode,
    n: int,
    d_min: int,
    t: int,
    m: Optional[int] = None,
    field: Optional[ExtField] = None,
) -> ConstructionTwo:
    """Construction II with the smallest admissible outer distance.

    ``d_min`` must be the optimal LRC distance for the error-free file size
    (rho r + min(h, r)) alpha it implies; the outer distance is then
    c2_required_D and the file size N - D + 1 meets the resilience bound.
    """
    r, alpha = group_code.k, group_code.alpha
    delta = group_code.n - r + 1
    rho, h = bounds.collector_split(n, d_min, r, delta)
    plain = (rho * r + min(h, r)) * alpha
    if bounds.lrc_dmin_bound(n, plain, r, delta, alpha) != d_min:
        raise ValueError(f"d_min = {d_min} is not the optimal distance for n={n}, r={r}, delta={delta}, alpha={alpha}")
    size = group_code.n
    if n % size:
        raise ValueError(f"group size {size} must divide n = {n}")
    big_n = n * r * alpha // size
    big_d = bounds.c2_required_D(n, d_min, r, delta, alpha, t)
    file_size = big_n - big_d + 1
    if file_size < 1:
        raise ValueError(f"t = {t} leaves no room for data")
    if field is None:
        field = ext_field_create(group_code.q, m if m is not None else big_n)
    return ConstructionTwo(GabidulinCode(field, big_n, file_size), group_code, n, d_min, t)


def c2_msr_variant(group_code: ArrayCode, n: int, d_min: int, t: int, m: Optional[int] = None) -> ConstructionTwo:
    """Construction II whose groups use a code with bandwidth-efficient repair."""
    if group_code.repair is None or not group_code.repair.plans:
        raise ValueError(f"{group_code!r} has no bandwidth-efficient repair plans")
    return build_construction_two(group_code, n, d_min, t, m)


def c2_encode(scheme: ConstructionTwo, file):
    return scheme.encode(file)


def c2_local_repair(scheme: ConstructionTwo, helpers, helper_blocks, failed: int):
    return scheme.local_repair(failed, helpers, helper_blocks)


def c2_decode(scheme: ConstructionTwo, views):
    return scheme.decode(views)


def decode_with_erasures(scheme, views, erased: Sequence[int]) -> list[ExtElem]:
    """Decode when the nodes in ``erased`` are known to be bad.

    The erased nodes are first dropped (shortening).  That answer is kept only
    if the word with the erased blocks set to zero lies within rank t alpha of
    its re-encoding; otherwise the zero-filled word itself is decoded, which
    succeeds whenever the total error, including the erased content, has rank
    at most t alpha.  With D >= 2 t alpha + 1 at most one file passes the
    check, so the two routes never disagree on a certified answer.
    """
    views = _as_views(views)
    if not erased:
        return scheme.decode(views)
    field = scheme.field
    zero = [field.zero] * scheme.alpha
    filled = sorted(views + [NodeView(j, zero) for j in erased], key=lambda v: v.index)
    limit = scheme.t_max * scheme.alpha
    try:
        file = scheme.decode(views)
    except DecodeFailure:
        file = None
    if file is not None:
        blocks = [v.block for v in scheme.encode(file)]
        residual = [a - b for v in filled for a, b in zip(v.block, blocks[v.index])]
        if rank_q(residual) <= limit:
            return file
    return scheme.decode(filled)
