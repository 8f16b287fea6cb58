"""Linearized polynomials f(x) = sum_i a_i x^(q^i) over F_{q^m}."""

from __future__ import annotations

from typing import Sequence

from .errors import FieldMismatch, MalformedInput
from .field import ExtElem, ExtField


class LinearizedPolynomial:
    """Immutable linearized polynomial in canonical form.

    ``coeffs[i]`` multiplies x^(q^i).  Trailing zero coefficients are dropped,
    so the zero polynomial has no coefficients and q-degree -1.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: ExtField, coeffs: Sequence[ExtElem | int] = ()):
        cs = [field(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.field = field
        self.coeffs: tuple[ExtElem, ...] = tuple(cs)

    @classmethod
    def identity(cls, field: ExtField) -> "LinearizedPolynomial":
        return cls(field, [field.one])

    @classmethod
    def monomial(cls, field: ExtField, qdeg: int, coeff: ExtElem | int = 1) -> "LinearizedPolynomial":
        return cls(field, [0] * qdeg + [coeff])

    @property
    def qdegree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self):
        terms = [f"({list(c.coeffs)})x^[{i}]" for i, c in enumerate(self.coeffs) if c]
        return "LinearizedPolynomial(" + (" + ".join(terms) or "0") + ")"

    def __eq__(self, other):
        if not isinstance(other, LinearizedPolynomial):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def _check(self, other: "LinearizedPolynomial") -> None:
        if not isinstance(other, LinearizedPolynomial):
            raise TypeError("expected a LinearizedPolynomial")
        if other.field != self.field:
            raise FieldMismatch("linearized polynomials over different fields")

    def __call__(self, x: ExtElem) -> ExtElem:
        return lin_eval(self, x)

    def __add__(self, other):
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        z = self.field.zero
        a = self.coeffs + (z,) * (n - len(self.coeffs))
        b = other.coeffs + (z,) * (n - len(other.coeffs))
        return LinearizedPolynomial(self.field, [x + y for x, y in zip(a, b)])

    def __neg__(self):
        return LinearizedPolynomial(self.field, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: ExtElem | int) -> "LinearizedPolynomial":
        """Left scalar multiple c * f(x)."""
        return LinearizedPolynomial(self.field, [c * a for a in self.coeffs])

    def compose(self, other: "LinearizedPolynomial") -> "LinearizedPolynomial":
        """(self o other)(x) = self(other(x))."""
        self._check(other)
        if self.is_zero() or other.is_zero():
            return LinearizedPolynomial(self.field)
        out = [self.field.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[i + j] = out[i + j] + a * b.frobenius(i)
        return LinearizedPolynomial(self.field, out)

    __matmul__ = compose

    def kernel_dimension(self) -> int:
        """dim_{F_q} of the roots in F_{q^m}, via the matrix of the F_q-linear map."""
        from . import linalg
        from .field import expand_vector

        images = [self(b) for b in self.field.basis()]
        return self.field.m - linalg.rank(expand_vector(images), self.field.q)


def lin_eval(f: LinearizedPolynomial, x: ExtElem) -> ExtElem:
    f.field.check(x)
    field = f.field
    ring = field._ring
    acc = 0
    p = x.v
    for i, a in enumerate(f.coeffs):
        if i:
            p = ring.pow(p, field.q)
        if a.v:
            acc = ring.add(acc, ring.mul(a.v, p))
    return ExtElem(field, acc)


def lin_arith(f: LinearizedPolynomial, g: LinearizedPolynomial, op: str) -> LinearizedPolynomial:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "compose":
        return f.compose(g)
    raise ValueError(f"unknown operation {op!r}")


def min_subspace_poly(points: Sequence[ExtElem]) -> LinearizedPolynomial:
    """Monic linearized polynomial whose roots are exactly span_{F_q}(points).

    Built one point at a time: M <- M^q - M(p)^(q-1) M, skipping points whose
    value is already zero (they lie in the current span).
    """
    if not points:
        raise MalformedInput("need at least one point")
    field = points[0].field
    for p in points:
        field.check(p)
    poly = LinearizedPolynomial.identity(field)
    for p in points:
        val = poly(p)
        if not val:
            continue
        raised = LinearizedPolynomial(field, [field.zero] + [c.frobenius(1) for c in poly.coeffs])
        poly = raised - poly.scale(val ** (field.q - 1))
    return poly


def left_divide(n: LinearizedPolynomial, v: LinearizedPolynomial) -> tuple[LinearizedPolynomial, LinearizedPolynomial]:
    """Find f, rem with n = v o f + rem and q-deg rem < q-deg v.

    Coefficients of f are recovered from the top down; each step peels one
    coefficient using the q^d-th root, i.e. the inverse Frobenius power.
    """
    v._check(n)
    if v.is_zero():
        raise ZeroDivisionError("division by the zero linearized polynomial")
    field = n.field
    dv = v.qdegree
    lead_inv = v.coeffs[-1].inverse()
    rem = list(n.coeffs)
    if len(rem) <= dv:
        return LinearizedPolynomial(field), n
    f = [field.zero] * (len(rem) - dv)
    for j in range(len(rem) - 1 - dv, -1, -1):
        top = rem[j + dv]
        if not top:
            continue
        # v_dv * f_j^(q^dv) = top  =>  f_j = (top / v_dv)^(q^(m - dv))
        fj = (top * lead_inv).frobenius(field.m - dv % field.m)
        f[j] = fj
        for i, vi in enumerate(v.coeffs):
            if vi:
                rem[i + j] = rem[i + j] - vi * fj.frobenius(i)
    return LinearizedPolynomial(field, f), LinearizedPolynomial(field, rem[:dv])
