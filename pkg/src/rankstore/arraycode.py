"""Vector (MDS array) codes over F_q with optional bandwidth-efficient repair.

The message is k blocks x_1..x_k of alpha symbols; node j stores
y_j = sum_i x_i A_{i,j}, i.e. y = x G with G the k x n block matrix of
alpha x alpha blocks over F_q.  Symbols may live in F_q itself or in any
extension F_{q^m}; G always acts through F_q scalars.

Repair plans use the column convention: helper j sends y_j V_j for an
alpha x beta_j matrix V_j, and the newcomer forms z R where z concatenates
everything received.  R is found once by solving D R = G_i over F_q, with
D the matrix whose columns describe the downloaded symbols.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from . import linalg
from .errors import InconsistentSystem, MalformedInput, RepairFailure, SingularMatrix
from .field import linear_combination

Matrix = list[list[int]]


@dataclass(frozen=True)
class RepairPlan:
    """How to rebuild node ``failed`` from ``helpers``."""

    failed: int
    helpers: tuple[int, ...]
    matrices: tuple[tuple[tuple[int, ...], ...], ...]  # one alpha x beta_j matrix per helper
    rebuild: tuple[tuple[int, ...], ...]  # (sum beta_j) x alpha

    @property
    def betas(self) -> tuple[int, ...]:
        return tuple(len(v[0]) if v else 0 for v in self.matrices)

    @property
    def bandwidth(self) -> int:
        return sum(self.betas)

    def matrix_for(self, helper: int) -> Matrix:
        return [list(r) for r in self.matrices[self.helpers.index(helper)]]


@dataclass
class RepairScheme:
    """Repair parameters of a code.

    ``plans`` holds a fixed plan per failed node.  When ``any_helpers`` is set
    the code also accepts any ``d``-subset of survivors, each sending its whole
    block (erasure-style repair).
    """

    d: int
    beta: int
    plans: dict[int, RepairPlan] = dc_field(default_factory=dict)
    any_helpers: bool = False


def _freeze(m: Matrix) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in row) for row in m)


class ArrayCode:
    """A linear [n, k, d_min, alpha] array code over F_q in block form."""

    def __init__(
        self,
        q: int,
        n: int,
        k: int,
        alpha: int,
        blocks: Sequence[Sequence[Matrix]],
        d_min: int,
        name: str = "array",
    ):
        if not 1 <= k <= n:
            raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
        if len(blocks) != k or any(len(row) != n for row in blocks):
            raise MalformedInput("blocks must be a k x n table")
        for row in blocks:
            for a in row:
                if linalg.shape(a) != (alpha, alpha):
                    raise MalformedInput("every block must be alpha x alpha")
        self.q = q
        self.n = n
        self.k = k
        self.alpha = alpha
        self.blocks = tuple(tuple(_freeze([[x % q for x in r] for r in a]) for a in row) for row in blocks)
        self.d_min = d_min
        self.name = name
        self.repair: Optional[RepairScheme] = None
        self._gen = self._build_generator()
        self._inv_cache: dict[tuple[int, ...], Matrix] = {}

    def __repr__(self):
        return f"ArrayCode({self.name}, n={self.n}, k={self.k}, alpha={self.alpha}, q={self.q})"

    # -- generator ------------------------------------------------------------

    def _build_generator(self) -> Matrix:
        a, k, n = self.alpha, self.k, self.n
        g = linalg.zeros(k * a, n * a)
        for i in range(k):
            for j in range(n):
                blk = self.blocks[i][j]
                for r in range(a):
                    for c in range(a):
                        g[i * a + r][j * a + c] = blk[r][c]
        return g

    @property
    def generator(self) -> Matrix:
        return [row[:] for row in self._gen]

    def column_block(self, j: int) -> Matrix:
        """The k*alpha x alpha column of G belonging to node j."""
        a = self.alpha
        return [row[j * a : (j + 1) * a] for row in self._gen]

    def submatrix(self, nodes: Sequence[int]) -> Matrix:
        """G_S: the columns of G belonging to ``nodes``, in the given order."""
        cols = [c for j in nodes for c in range(j * self.alpha, (j + 1) * self.alpha)]
        return [[row[c] for c in cols] for row in self._gen]

    def is_mds(self) -> bool:
        full = self.k * self.alpha
        return all(
            linalg.rank(self.submatrix(s), self.q) == full for s in itertools.combinations(range(self.n), self.k)
        )

    # -- encode / decode ------------------------------------------------------

    def _check_blocks(self, blocks: Sequence[Sequence], count: int) -> list:
        if len(blocks) != count:
            raise MalformedInput(f"expected {count} blocks, got {len(blocks)}")
        flat = []
        for b in blocks:
            if len(b) != self.alpha:
                raise MalformedInput(f"block length {len(b)} != alpha={self.alpha}")
            flat.extend(b)
        _check_symbols(flat, self.q)
        return flat

    def encode(self, x: Sequence[Sequence]) -> list[list]:
        flat = self._check_blocks(x, self.k)
        return self._apply(flat, self._gen, self.n)

    def _apply(self, flat: list, mat: Matrix, nblocks: int) -> list[list]:
        a = self.alpha
        cols = list(zip(*mat))
        out = [linear_combination(col, flat, self.q) for col in cols]
        return [out[j * a : (j + 1) * a] for j in range(nblocks)]

    def decode_matrix(self, nodes: Sequence[int]) -> Matrix:
        key = tuple(nodes)
        if key not in self._inv_cache:
            try:
                self._inv_cache[key] = linalg.invert(self.submatrix(nodes), self.q)
            except SingularMatrix:
                raise SingularMatrix(f"nodes {list(nodes)} do not determine the message") from None
        return self._inv_cache[key]

    def erasure_decode(self, nodes: Sequence[int], blocks: Sequence[Sequence]) -> list[list]:
        """Recover x from k blocks: x = y_S G_S^{-1}."""
        if len(nodes) != self.k or len(set(nodes)) != self.k:
            raise MalformedInput(f"need {self.k} distinct node indices")
        flat = self._check_blocks(blocks, self.k)
        return self._apply(flat, self.decode_matrix(nodes), self.k)

    # -- repair ---------------------------------------------------------------

    def make_plan(self, failed: int, helpers: Sequence[int], matrices: Sequence[Matrix]) -> RepairPlan:
        """Build a plan from per-helper download matrices, solving for the rebuild rule."""
        cols = []
        for j, v in zip(helpers, matrices):
            if v and v[0]:
                cols.append(linalg.mat_mul(self.column_block(j), v, self.q))
        if not cols:
            raise RepairFailure("empty repair plan")
        d = linalg.hstack(*cols)
        try:
            rebuild = linalg.solve(d, self.column_block(failed), self.q)
        except InconsistentSystem:
            raise RepairFailure(f"helpers {list(helpers)} cannot rebuild node {failed} with these downloads") from None
        return RepairPlan(
            failed=failed,
            helpers=tuple(helpers),
            matrices=tuple(_freeze(v) for v in matrices),
            rebuild=_freeze(rebuild),
        )

    def plan_for(self, failed: int, helpers: Optional[Sequence[int]] = None) -> RepairPlan:
        if self.repair is None:
            raise RepairFailure(f"{self.name} has no repair scheme")
        if not 0 <= failed < self.n:
            raise MalformedInput(f"node {failed} out of range")
        plan = self.repair.plans.get(failed)
        if plan is not None and (helpers is None or sorted(helpers) == sorted(plan.helpers)):
            return plan
        if self.repair.any_helpers:
            if helpers is None:
                helpers = [j for j in range(self.n) if j != failed][: self.repair.d]
            helpers = list(helpers)
            if failed in helpers or len(set(helpers)) != len(helpers) or len(helpers) < self.k:
                raise RepairFailure(f"inadmissible helper set {helpers} for node {failed}")
            eye = linalg.identity(self.alpha)
            return self.make_plan(failed, helpers, [eye] * len(helpers))
        raise RepairFailure(f"inadmissible helper set {list(helpers or [])} for node {failed}")

    def transfer(self, plan: RepairPlan, helper: int) -> Matrix:
        """alpha x alpha matrix T: helper j contributes y_j T to the rebuilt block.

        An error e on helper j therefore shows up as e T on the new node.
        """
        pos = plan.helpers.index(helper)
        start = sum(plan.betas[:pos])
        v = [list(r) for r in plan.matrices[pos]]
        rows = [list(r) for r in plan.rebuild[start : start + plan.betas[pos]]]
        return linalg.mat_mul(v, rows, self.q)

    def repair_download(self, plan: RepairPlan, helper: int, block: Sequence) -> list:
        """What an honest helper sends: y_j V_j."""
        v = plan.matrix_for(helper)
        _check_symbols(list(block), self.q)
        return [linear_combination(col, list(block), self.q) for col in zip(*v)]

    def repair_rebuild(self, plan: RepairPlan, downloads: Sequence[Sequence]) -> list:
        """Combine the helpers' transfers (in plan order) into the new block."""
        if len(downloads) != len(plan.helpers):
            raise MalformedInput("one download per helper expected")
        z = []
        for beta, sent in zip(plan.betas, downloads):
            if len(sent) != beta:
                raise MalformedInput(f"expected {beta} symbols from a helper, got {len(sent)}")
            z.extend(sent)
        return [linear_combination(col, z, self.q) for col in zip(*plan.rebuild)]

    def descriptor(self) -> dict:
        return {
            "name": self.name,
            "q": self.q,
            "n": self.n,
            "k": self.k,
            "alpha": self.alpha,
            "d_min": self.d_min,
            "blocks": [[[list(r) for r in a] for a in row] for row in self.blocks],
        }


def _check_symbols(symbols: list, q: int) -> None:
    from .field import ExtElem

    if not symbols:
        return
    if isinstance(symbols[0], ExtElem):
        f = symbols[0].field
        if f.q != q:
            raise MalformedInput(f"symbols over F_{f.q}^m cannot carry a code over F_{q}")
        for s in symbols:
            f.check(s)
    elif not all(isinstance(s, int) for s in symbols):
        raise MalformedInput("symbols must be ints or extension-field elements")


def array_encode(code: ArrayCode, x):
    return code.encode(x)


def array_erasure_decode(code: ArrayCode, nodes, blocks):
    return code.erasure_decode(nodes, blocks)


def msr_repair(code: ArrayCode, failed: int, helpers: Sequence[int], helper_blocks: Sequence[Sequence]) -> list:
    """Rebuild node ``failed`` from the helpers' full blocks via the repair plan."""
    plan = code.plan_for(failed, helpers)
    by_node = dict(zip(helpers, helper_blocks))
    downloads = [code.repair_download(plan, j, by_node[j]) for j in plan.helpers]
    return code.repair_rebuild(plan, downloads)


# ---------------------------------------------------------------------------
# row-wise MDS array codes
# ---------------------------------------------------------------------------


def mds_array_rowwise(r: int, delta: int, alpha: int, q: int) -> ArrayCode:
    """[r + delta - 1, r, delta, alpha] code: a systematic GRS code on every row.

    Evaluation points are 0, 1, ..., r + delta - 2 with unit multipliers.
    Repair downloads whole blocks from any r survivors.
    """
    n = r + delta - 1
    if r < 1 or delta < 1:
        raise ValueError("need r >= 1 and delta >= 1")
    if q < n:
        raise ValueError(f"field F_{q} too small for length {n}; need q >= r + delta - 1")
    vander = [[pow(x, i, q) for x in range(n)] for i in range(r)]
    head = [row[:r] for row in vander]
    sys_gen = linalg.mat_mul(linalg.invert(head, q), vander, q)
    eye = linalg.identity(alpha)
    blocks = [[linalg.scale(eye, sys_gen[i][j], q) for j in range(n)] for i in range(r)]
    code = ArrayCode(q, n, r, alpha, blocks, d_min=delta, name=f"rowwise({r},{delta},{alpha})")
    code.repair = RepairScheme(d=r, beta=alpha, any_helpers=True)
    return code


# ---------------------------------------------------------------------------
# the (5, 3) zigzag code
# ---------------------------------------------------------------------------

_A2 = [[0, 0, 1, 0], [0, 0, 0, 1], [2, 0, 0, 0], [0, 2, 0, 0]]
_A3 = [[0, 1, 0, 0], [2, 0, 0, 0], [0, 0, 0, 2], [0, 0, 1, 0]]

# Downloads for node 5 (the zigzag parity), found by search over F_5: no
# 8-symbol plan exists there, so node 3 sends one extra symbol.
_NODE5_PLAN_Q5 = (
    [[1, 1, 3, 0], [0, 0, 0, 1]],
    [[3, 0, 2, 2], [0, 1, 0, 0]],
    [[1, 2, 0, 3], [0, 0, 2, 0], [0, 1, 0, 0]],
    [[0, 1, 0, 2], [0, 0, 1, 1]],
)


def _rows(*idx: int) -> Matrix:
    """4 x len(idx) selector picking the listed symbol positions."""
    v = linalg.zeros(4, len(idx))
    for c, i in enumerate(idx):
        v[i][c] = 1
    return v


def _subspaces_2d(q: int, dim: int = 4):
    """All 2-dim subspaces of F_q^dim, as RREF bases, in a fixed order."""
    for p1, p2 in itertools.combinations(range(dim), 2):
        free1 = [c for c in range(p1 + 1, dim) if c != p2]
        free2 = list(range(p2 + 1, dim))
        for vals1 in itertools.product(range(q), repeat=len(free1)):
            for vals2 in itertools.product(range(q), repeat=len(free2)):
                u = [0] * dim
                w = [0] * dim
                u[p1] = 1
                w[p2] = 1
                for c, x in zip(free1, vals1):
                    u[c] = x
                for c, x in zip(free2, vals2):
                    w[c] = x
                yield [u, w]


def _aligned_row_parity_plan(code: ArrayCode, a2: Matrix, a3: Matrix) -> Optional[RepairPlan]:
    """Optimal plan for node 4: helper 5 sends y_5 W, the others y_j U.

    Subtracting the x_1 part leaves x_2 (A2 - I) W and x_3 (A3 - I) W, which
    must fall inside span(U) for the interference to cancel.
    """
    q = code.q
    eye = linalg.identity(4)
    n2 = linalg.mat_add(a2, linalg.neg(eye, q), q)
    n3 = linalg.mat_add(a3, linalg.neg(eye, q), q)
    subspaces = list(_subspaces_2d(q))
    for wb in subspaces:
        w = linalg.transpose(wb)
        spill = linalg.hstack(linalg.mat_mul(n2, w, q), linalg.mat_mul(n3, w, q))
        rk = linalg.rank(spill, q)
        if rk > 2:
            continue
        if rk == 2:
            rr, piv = linalg.rref(linalg.transpose(spill), q)
            candidates = [[rr[0], rr[1]]]
        else:
            # spill too small to pin U down: try every U containing it
            candidates = [
                ub for ub in subspaces if linalg.rank(linalg.hstack(linalg.transpose(ub), spill), q) == 2
            ]
        for ub in candidates:
            u = linalg.transpose(ub)
            if linalg.rank(linalg.hstack(u, w), q) != 4:
                continue
            try:
                return code.make_plan(3, [0, 1, 2, 4], [u, u, u, w])
            except RepairFailure:
                continue
    return None


def zigzag_5_3(q: int) -> ArrayCode:
    """The (5,3) zigzag code with alpha = 4 and its repair plans (0-based nodes).

    Systematic nodes and node 4 are rebuilt from 2 symbols per helper.  Node 5
    uses the 9-symbol plan above when it is valid over F_q and otherwise
    downloads the three systematic blocks.
    """
    if q < 3:
        raise ValueError("zigzag code needs q >= 3")
    from .field import PrimeField

    PrimeField(q)
    eye = linalg.identity(4)
    zero = linalg.zeros(4, 4)
    a2 = [[x % q for x in r] for r in _A2]
    a3 = [[x % q for x in r] for r in _A3]
    blocks = [
        [eye, zero, zero, eye, eye],
        [zero, eye, zero, eye, a2],
        [zero, zero, eye, eye, a3],
    ]
    code = ArrayCode(q, 5, 3, 4, blocks, d_min=3, name="zigzag(5,3)")
    if not code.is_mds():
        raise ValueError(f"the zigzag generator is not MDS over F_{q}")
    plans = {
        0: code.make_plan(0, [1, 2, 3, 4], [_rows(0, 3)] * 3 + [_rows(1, 2)]),
        1: code.make_plan(1, [0, 2, 3, 4], [_rows(0, 1)] * 4),
        2: code.make_plan(2, [0, 1, 3, 4], [_rows(0, 2)] * 4),
    }
    plan4 = _aligned_row_parity_plan(code, a2, a3)
    plans[3] = plan4 if plan4 is not None else code.make_plan(3, [0, 1, 2], [eye] * 3)
    try:
        plans[4] = code.make_plan(4, [0, 1, 2, 3], [linalg.transpose(v) for v in _NODE5_PLAN_Q5])
    except RepairFailure:
        plans[4] = code.make_plan(4, [0, 1, 2], [eye] * 3)
    code.repair = RepairScheme(d=4, beta=2, plans=plans, any_helpers=True)
    return code


def code_from_descriptor(desc: dict) -> ArrayCode:
    name = desc.get("name", "")
    if name == "zigzag(5,3)":
        return zigzag_5_3(int(desc["q"]))
    if name.startswith("rowwise("):
        r, delta, alpha = (int(x) for x in name[len("rowwise(") : -1].split(","))
        return mds_array_rowwise(r, delta, alpha, int(desc["q"]))
    code = ArrayCode(
        int(desc["q"]), int(desc["n"]), int(desc["k"]), int(desc["alpha"]), desc["blocks"], int(desc["d_min"]), name
    )
    return code
