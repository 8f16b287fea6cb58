"""Exact linear algebra over a prime field F_q.

Matrices are plain lists of row lists holding ints in ``[0, q)``.  Inputs are
never modified; every function returns fresh lists.  Vectors are column
vectors unless a docstring says otherwise.
"""

from __future__ import annotations

from typing import Sequence

from .errors import InconsistentSystem, MalformedInput, SingularMatrix

Matrix = list[list[int]]


def shape(a: Sequence[Sequence[int]]) -> tuple[int, int]:
    rows = len(a)
    cols = len(a[0]) if rows else 0
    if any(len(row) != cols for row in a):
        raise MalformedInput("ragged matrix")
    return rows, cols


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def transpose(a: Sequence[Sequence[int]]) -> Matrix:
    return [list(col) for col in zip(*a)]


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], q: int) -> Matrix:
    ra, ca = shape(a)
    rb, cb = shape(b)
    if ca != rb:
        raise MalformedInput(f"cannot multiply {ra}x{ca} by {rb}x{cb}")
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) % q for col in bt] for row in a]


def mat_vec(a: Sequence[Sequence[int]], v: Sequence[int], q: int) -> list[int]:
    if shape(a)[1] != len(v):
        raise MalformedInput("dimension mismatch in matrix-vector product")
    return [sum(x * y for x, y in zip(row, v)) % q for row in a]


def mat_add(a, b, q: int) -> Matrix:
    if shape(a) != shape(b):
        raise MalformedInput("dimension mismatch in matrix sum")
    return [[(x + y) % q for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(a, c: int, q: int) -> Matrix:
    return [[(c * x) % q for x in row] for row in a]


def neg(a, q: int) -> Matrix:
    return [[(-x) % q for x in row] for row in a]


def hstack(*blocks: Sequence[Sequence[int]]) -> Matrix:
    rows = {len(b) for b in blocks}
    if len(rows) != 1:
        raise MalformedInput("hstack needs equal row counts")
    return [sum((list(b[i]) for b in blocks), []) for i in range(rows.pop())]


def vstack(*blocks: Sequence[Sequence[int]]) -> Matrix:
    out: Matrix = []
    for b in blocks:
        out.extend(list(row) for row in b)
    return out


def submatrix(a, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
    return [[a[i][j] for j in cols] for i in rows]


def rref(a: Sequence[Sequence[int]], q: int) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    m = [[x % q for x in row] for row in a]
    rows, cols = shape(m)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = pow(m[r][c], q - 2, q)
        pivot_row = [(x * inv) % q for x in m[r]]
        m[r] = pivot_row
        for i in range(rows):
            f = m[i][c]
            if i != r and f:
                m[i] = [(x - f * y) % q for x, y in zip(m[i], pivot_row)]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: Sequence[Sequence[int]], q: int) -> int:
    if not a or not a[0]:
        return 0
    return len(rref(a, q)[1])


def invert(a: Sequence[Sequence[int]], q: int) -> Matrix:
    n, c = shape(a)
    if n != c:
        raise MalformedInput("only square matrices can be inverted")
    aug = [list(row) + ident for row, ident in zip(a, identity(n))]
    r, pivots = rref(aug, q)
    if pivots[:n] != list(range(n)):
        raise SingularMatrix("matrix is singular over F_%d" % q)
    return [row[n:] for row in r]


def solve(a: Sequence[Sequence[int]], b, q: int):
    """One solution x of ``a x = b``.

    ``b`` may be a vector (returns a vector) or a matrix with one column per
    right-hand side (returns a matrix).  Free variables are set to zero.
    """
    rows, cols = shape(a)
    vector = bool(b) and not isinstance(b[0], (list, tuple))
    rhs = [[x] for x in b] if vector else [list(row) for row in b]
    if len(rhs) != rows:
        raise MalformedInput("right-hand side has wrong length")
    nrhs = len(rhs[0]) if rhs else 0
    r, pivots = rref([list(ra) + rb for ra, rb in zip(a, rhs)], q)
    if any(p >= cols for p in pivots):
        raise InconsistentSystem("system has no solution")
    x = zeros(cols, nrhs)
    for i, p in enumerate(pivots):
        x[p] = r[i][cols:]
    return [row[0] for row in x] if vector else x


def kernel(a: Sequence[Sequence[int]], q: int) -> Matrix:
    """Basis (list of vectors) of the right null space of ``a``."""
    rows, cols = shape(a)
    r, pivots = rref(a, q)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * cols
        v[f] = 1
        for i, p in enumerate(pivots):
            v[p] = (-r[i][f]) % q
        basis.append(v)
    return basis


def in_column_space(basis_rref: tuple[Matrix, list[int]], v: Sequence[int], q: int) -> bool:
    """Membership test against a subspace given by the RREF of its spanning rows.

    ``basis_rref`` is the output of :func:`rref` applied to a matrix whose rows
    span the subspace.
    """
    r, pivots = basis_rref
    w = [x % q for x in v]
    for i, p in enumerate(pivots):
        f = w[p]
        if f:
            w = [(x - f * y) % q for x, y in zip(w, r[i])]
    return not any(w)
