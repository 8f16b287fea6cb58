"""Gabidulin codes: evaluation encoding and bounded rank-distance decoding.

A message (a_0, ..., a_{K-1}) is the linearized polynomial
f(x) = sum_i a_i x^(q^i); its codeword is (f(g_1), ..., f(g_N)) for
F_q-independent evaluation points g_i.

Erased coordinates are simply dropped (shortening), so decoding always works
on the available positions and their points.  With n' available positions
the decoder corrects any error of rank at most floor((n' - K) / 2).
"""

from __future__ import annotations

from typing import Optional, Sequence

from .errors import DecodeFailure, InsufficientNodes, InvalidPoints, MalformedInput
from .field import ExtElem, ExtField, rank_q
from .linearized import LinearizedPolynomial, left_divide


def gab_points_default(field: ExtField, n: int) -> list[ExtElem]:
    """The first n polynomial-basis elements 1, x, ..., x^(n-1)."""
    if n > field.m:
        raise ValueError(f"need N <= m, got N={n}, m={field.m}")
    if n < 1:
        raise ValueError("N must be positive")
    return field.basis()[:n]


def _frobenius_table(field: ExtField, points: Sequence[ExtElem], depth: int) -> list[list[int]]:
    """table[i][j] = points[i]^(q^j) as packed ints, for j < depth."""
    ring = field._ring
    q = field.q
    out = []
    for p in points:
        row = [p.v]
        for _ in range(depth - 1):
            row.append(ring.pow(row[-1], q))
        out.append(row)
    return out


class GabidulinCode:
    """An [N, K, D = N - K + 1] Gabidulin code over F_{q^m}."""

    def __init__(self, field: ExtField, n: int, k: int, points: Optional[Sequence[ExtElem]] = None):
        if not 1 <= k <= n <= field.m:
            raise ValueError(f"need 1 <= K <= N <= m, got K={k}, N={n}, m={field.m}")
        pts = list(points) if points is not None else gab_points_default(field, n)
        if len(pts) != n:
            raise MalformedInput(f"expected {n} evaluation points, got {len(pts)}")
        for p in pts:
            field.check(p)
        if rank_q(pts) != n:
            raise InvalidPoints("evaluation points are not linearly independent over F_q")
        self.field = field
        self.n = n
        self.k = k
        self.points: tuple[ExtElem, ...] = tuple(pts)
        self._powers = _frobenius_table(field, pts, k)

    @property
    def d(self) -> int:
        return self.n - self.k + 1

    def __repr__(self):
        return f"GabidulinCode(N={self.n}, K={self.k}, D={self.d}, q={self.field.q}, m={self.field.m})"

    def descriptor(self) -> dict:
        return {
            "N": self.n,
            "K": self.k,
            "field": self.field.descriptor(),
            "points": [list(p.coeffs) for p in self.points],
        }

    def encode(self, msg: Sequence[ExtElem]) -> list[ExtElem]:
        if len(msg) != self.k:
            raise MalformedInput(f"message length {len(msg)} != K={self.k}")
        field = self.field
        for a in msg:
            field.check(a)
        ring = field._ring
        out = []
        for row in self._powers:
            acc = 0
            for a, gp in zip(msg, row):
                if a.v:
                    acc = ring.add(acc, ring.mul(a.v, gp))
            out.append(ExtElem(field, acc))
        return out

    def polynomial(self, msg: Sequence[ExtElem]) -> LinearizedPolynomial:
        return LinearizedPolynomial(self.field, msg)

    def decode(self, received: Sequence[Optional[ExtElem]]) -> list[ExtElem]:
        """Decode a length-N word; ``None`` marks an erased coordinate."""
        if len(received) != self.n:
            raise MalformedInput(f"received word length {len(received)} != N={self.n}")
        positions = [i for i, v in enumerate(received) if v is not None]
        return self.decode_subset(positions, [received[i] for i in positions])

    def decode_subset(
        self,
        positions: Sequence[int],
        values: Sequence[ExtElem],
        points: Optional[Sequence[ExtElem]] = None,
    ) -> list[ExtElem]:
        """Decode from the listed coordinates only.

        ``points`` overrides the evaluation points of those coordinates, e.g.
        after the inner code has mixed them; they must be F_q-independent.
        """
        if len(positions) != len(values):
            raise MalformedInput("positions and values differ in length")
        if len(set(positions)) != len(positions):
            raise MalformedInput("repeated position")
        if any(not 0 <= i < self.n for i in positions):
            raise MalformedInput("position out of range")
        if points is None:
            pts = [self.points[i] for i in positions]
        else:
            pts = list(points)
            if len(pts) != len(positions):
                raise MalformedInput("points and positions differ in length")
            if pts and rank_q(pts) != len(pts):
                raise InvalidPoints("override points are not linearly independent over F_q")
        for v in values:
            self.field.check(v)
        return welch_berlekamp(self.field, self.k, pts, values)


def welch_berlekamp(field: ExtField, k: int, points: Sequence[ExtElem], values: Sequence[ExtElem]) -> list[ExtElem]:
    """Find f of q-degree < k with rank(values - f(points)) <= (n - k) // 2.

    Solves V(r_i) = N(g_i) for V of q-degree <= tau and N of q-degree
    <= tau + k - 1, then divides N = V o f.  An exact division proves the
    residual error lies in the root space of V, so its rank is at most tau.
    Raises DecodeFailure when no such f exists.
    """
    n = len(points)
    if n < k:
        raise InsufficientNodes(f"{n} coordinates available, need at least K={k}")
    tau = (n - k) // 2
    ring = field._ring
    rpow = _frobenius_table(field, values, tau + 1)
    gpow = _frobenius_table(field, points, tau + k)
    rows = [rp + [ring.neg(x) for x in gp] for rp, gp in zip(rpow, gpow)]
    vec = _kernel_vector(field, rows, 2 * tau + k + 1)
    v_poly = LinearizedPolynomial(field, [ExtElem(field, x) for x in vec[: tau + 1]])
    n_poly = LinearizedPolynomial(field, [ExtElem(field, x) for x in vec[tau + 1 :]])
    if v_poly.is_zero():
        raise DecodeFailure("degenerate key equation")  # pragma: no cover - excluded by independence
    f, rem = left_divide(n_poly, v_poly)
    if not rem.is_zero() or f.qdegree >= k:
        raise DecodeFailure(f"rank error exceeds the correctable radius {tau}")
    return list(f.coeffs) + [field.zero] * (k - len(f.coeffs))


def _kernel_vector(field: ExtField, rows: list[list[int]], ncols: int) -> list[int]:
    """A nonzero null vector of a packed matrix with more columns than rank."""
    ring = field._ring
    mul, sub = ring.mul, ring.sub
    rows = [r[:] for r in rows]
    pivots: list[int] = []
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        prow = rows[rank]
        inv = field._inv_raw(prow[col])
        for j in range(col, ncols):
            if prow[j]:
                prow[j] = mul(prow[j], inv)
        for i, row in enumerate(rows):
            if i != rank and row[col]:
                c = row[col]
                for j in range(col, ncols):
                    if prow[j]:
                        row[j] = sub(row[j], mul(c, prow[j]))
        pivots.append(col)
        rank += 1
        if rank == len(rows):
            break
    free = next(c for c in range(ncols) if c not in pivots)
    vec = [0] * ncols
    vec[free] = 1
    for r, col in enumerate(pivots):
        if col < free and rows[r][free]:
            vec[col] = ring.neg(rows[r][free])
    return vec


def gab_encode(code: GabidulinCode, msg: Sequence[ExtElem]) -> list[ExtElem]:
    return code.encode(msg)


def gab_decode(code: GabidulinCode, received: Sequence[Optional[ExtElem]]) -> list[ExtElem]:
    return code.decode(received)


def gab_decode_subset(code, positions, values, points=None) -> list[ExtElem]:
    return code.decode_subset(positions, values, points)
