"""Arithmetic in a prime field F_q and its degree-m extension F_{q^m}.

Extension elements are polynomials of degree < m over F_q, taken modulo a
fixed monic irreducible polynomial.  The canonical modulus for ``(q, m)`` is
the lexicographically least monic irreducible polynomial of degree m, where
coefficient tuples ``(c_0, ..., c_{m-1})`` are compared low degree first.

Internally an element is one Python integer holding its m coefficients in
fixed-width bit slots.  Sums and products then become single big-integer
operations; per-slot reduction modulo q uses a multiply-by-reciprocal trick,
and reduction modulo the field polynomial uses Barrett's method, which is
exact for polynomials.  All of it is exact integer arithmetic.
"""

from __future__ import annotations

import functools
import itertools
import random
from typing import Iterable, Iterator, Sequence

from . import linalg
from .errors import FieldMismatch, MalformedInput

# ---------------------------------------------------------------------------
# prime field and plain coefficient-list polynomials over it
# ---------------------------------------------------------------------------


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class PrimeField:
    """The base field F_q for prime q; elements are plain ints in [0, q)."""

    __slots__ = ("q",)

    def __init__(self, q: int):
        if not isinstance(q, int) or not is_prime(q):
            raise ValueError(f"base field order must be prime, got {q!r}")
        self.q = q

    def __repr__(self):
        return f"PrimeField({self.q})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self):
        return hash(("F", self.q))

    def inv(self, a: int) -> int:
        a %= self.q
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in F_%d" % self.q)
        return pow(a, self.q - 2, self.q)


def _trim(p: list[int]) -> list[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_divmod(a: Sequence[int], b: Sequence[int], q: int) -> tuple[list[int], list[int]]:
    """Quotient and remainder of coefficient lists (low degree first)."""
    a = _trim([x % q for x in a])
    b = _trim([x % q for x in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(b[-1], q - 2, q)
    quot = [0] * max(len(a) - len(b) + 1, 0)
    rem = a[:]
    db = len(b) - 1
    for i in range(len(rem) - 1, db - 1, -1):
        c = rem[i] * inv_lead % q
        if c:
            quot[i - db] = c
            for j, bj in enumerate(b):
                rem[i - db + j] = (rem[i - db + j] - c * bj) % q
    return _trim(quot), _trim(rem[:db])


def poly_gcd(a: Sequence[int], b: Sequence[int], q: int) -> list[int]:
    a = _trim([x % q for x in a])
    b = _trim([x % q for x in b])
    while b:
        a, b = b, poly_divmod(a, b, q)[1]
    if a:
        inv = pow(a[-1], q - 2, q)
        a = [x * inv % q for x in a]
    return a


def _poly_mul(a: Sequence[int], b: Sequence[int], q: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([x % q for x in out])


def _poly_sub(a: Sequence[int], b: Sequence[int], q: int) -> list[int]:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([(x - y) % q for x, y in zip(a, b)])


# ---------------------------------------------------------------------------
# packed arithmetic modulo a monic polynomial
# ---------------------------------------------------------------------------


class _PackedRing:
    """F_q[x]/(f) for monic f, on slot-packed integers.

    Used both for finished fields and for irreducibility testing of candidate
    moduli, so it does not assume f is irreducible.
    """

    def __init__(self, q: int, modulus: Sequence[int]):
        self.q = q
        self.modulus = tuple(modulus)
        m = len(modulus) - 1
        self.m = m
        # Largest value any slot holds before reduction: a convolution of two
        # reduced polynomials, plus headroom for subtraction offsets.
        vmax = max(m, 1) * (q - 1) ** 2 + 2 * q
        vbits = vmax.bit_length()
        self.k = vbits + q.bit_length() + 1
        self.w = self.k + vbits + 1
        self.magic = -(-(1 << self.k) // q)
        slots = 2 * m + 2
        w = self.w
        self.slot_mask = (1 << w) - 1
        self.quot_mask = sum(((1 << (w - self.k)) - 1) << (i * w) for i in range(slots))
        self.low_mask = (1 << (m * w)) - 1
        self.q_ones = sum(q << (i * w) for i in range(m))
        self.mod_packed = self.pack(modulus)
        mu, _ = poly_divmod([0] * (2 * m) + [1], modulus, q)
        self.mu_packed = self.pack(mu)
        self.x_packed = self.pack([0, 1]) if m > 1 else self.pack(poly_divmod([0, 1], modulus, q)[1])

    def pack(self, coeffs: Iterable[int]) -> int:
        w = self.w
        v = 0
        for i, c in enumerate(coeffs):
            v |= (c % self.q) << (i * w)
        return v

    def unpack(self, v: int, length: int | None = None) -> list[int]:
        n = self.m if length is None else length
        w, mask = self.w, self.slot_mask
        return [(v >> (i * w)) & mask for i in range(n)]

    def reduce_slots(self, v: int) -> int:
        quot = ((v * self.magic) >> self.k) & self.quot_mask
        return v - quot * self.q

    def add(self, a: int, b: int) -> int:
        return self.reduce_slots(a + b)

    def sub(self, a: int, b: int) -> int:
        return self.reduce_slots(a + self.q_ones - b)

    def neg(self, a: int) -> int:
        return self.reduce_slots(self.q_ones - a)

    def scale(self, a: int, c: int) -> int:
        return self.reduce_slots(a * (c % self.q))

    def mul(self, a: int, b: int) -> int:
        mw = self.m * self.w
        p = self.reduce_slots(a * b)
        high = p >> mw
        if not high:
            return p
        t = self.reduce_slots(high * self.mu_packed) >> mw
        s = self.reduce_slots(t * self.mod_packed) & self.low_mask
        return self.reduce_slots((p & self.low_mask) + self.q_ones - s)

    def pow(self, a: int, e: int) -> int:
        result = 1
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result


def _is_irreducible(q: int, f: Sequence[int]) -> bool:
    """Ben-Or test: f has no factor of degree <= m/2.  Exact and deterministic."""
    m = len(f) - 1
    if m < 1 or f[-1] != 1:
        raise ValueError("expected a monic polynomial of positive degree")
    if m == 1:
        return True
    if f[0] % q == 0:
        return False
    if any(_eval_poly(f, x, q) == 0 for x in range(q)):
        return False
    ring = _PackedRing(q, f)
    h = ring.x_packed
    for _ in range(1, m // 2 + 1):
        h = ring.pow(h, q)
        g = poly_gcd(f, _poly_sub(ring.unpack(h), [0, 1], q), q)
        if len(g) > 1:
            return False
    return True


def _eval_poly(f: Sequence[int], x: int, q: int) -> int:
    acc = 0
    for c in reversed(f):
        acc = (acc * x + c) % q
    return acc


@functools.lru_cache(maxsize=None)
def canonical_modulus(q: int, m: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible polynomial of degree m over F_q."""
    PrimeField(q)
    if m < 1:
        raise ValueError("extension degree must be >= 1")
    if m == 1:
        return (0, 1)
    # c_0 = 0 means x divides the polynomial, so the search starts at c_0 = 1.
    for c0 in range(1, q):
        for rest in itertools.product(range(q), repeat=m - 1):
            f = (c0,) + rest + (1,)
            if _is_irreducible(q, f):
                return f
    raise RuntimeError(f"no irreducible polynomial of degree {m} over F_{q}")  # pragma: no cover


# ---------------------------------------------------------------------------
# extension field
# ---------------------------------------------------------------------------


class ExtField:
    """The finite field F_{q^m} with a fixed polynomial basis {1, x, ..., x^(m-1)}.

    ``ExtField(q, m)`` always yields the canonical modulus; pass ``modulus``
    explicitly to work with another irreducible polynomial.
    """

    def __init__(self, q: int, m: int, modulus: Sequence[int] | None = None):
        self.base = PrimeField(q)
        if not isinstance(m, int) or m < 1:
            raise ValueError(f"extension degree must be a positive integer, got {m!r}")
        if modulus is None:
            modulus = canonical_modulus(q, m)
        else:
            modulus = tuple(int(c) % q for c in modulus)
            if len(modulus) != m + 1 or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree m")
            if not _is_irreducible(q, modulus):
                raise ValueError("modulus is reducible over F_%d" % q)
        self.q = q
        self.m = m
        self.modulus: tuple[int, ...] = tuple(modulus)
        self._ring = _PackedRing(q, self.modulus)
        self.order = q**m
        self.zero = ExtElem(self, 0)
        self.one = ExtElem(self, 1)

    def __repr__(self):
        return f"ExtField(q={self.q}, m={self.m})"

    def __eq__(self, other):
        return isinstance(other, ExtField) and other.q == self.q and other.modulus == self.modulus

    def __hash__(self):
        return hash((self.q, self.modulus))

    # -- element construction ------------------------------------------------

    def __call__(self, coeffs) -> "ExtElem":
        if isinstance(coeffs, ExtElem):
            self.check(coeffs)
            return coeffs
        if isinstance(coeffs, int):
            return self.scalar(coeffs)
        coeffs = list(coeffs)
        if len(coeffs) > self.m:
            raise MalformedInput(f"expected at most {self.m} coefficients, got {len(coeffs)}")
        if any(not isinstance(c, int) for c in coeffs):
            raise MalformedInput("coefficients must be integers")
        return ExtElem(self, self._ring.pack(coeffs))

    def scalar(self, c: int) -> "ExtElem":
        """Embed an element of F_q."""
        return ExtElem(self, c % self.q)

    @property
    def gen(self) -> "ExtElem":
        """The class of x, i.e. the generator of the polynomial basis."""
        return ExtElem(self, self._ring.x_packed)

    def basis(self) -> list["ExtElem"]:
        return [self([0] * i + [1]) for i in range(self.m)]

    def from_int(self, n: int) -> "ExtElem":
        """Element whose coefficients are the little-endian base-q digits of n."""
        if not 0 <= n < self.order:
            raise MalformedInput(f"{n} out of range for a field of order {self.order}")
        digits = []
        for _ in range(self.m):
            n, d = divmod(n, self.q)
            digits.append(d)
        return self(digits)

    def random(self, rng: random.Random) -> "ExtElem":
        return self([rng.randrange(self.q) for _ in range(self.m)])

    def random_nonzero(self, rng: random.Random) -> "ExtElem":
        while True:
            a = self.random(rng)
            if a:
                return a

    def elements(self) -> Iterator["ExtElem"]:
        for digits in itertools.product(range(self.q), repeat=self.m):
            yield self(digits[::-1])

    def check(self, a: "ExtElem") -> None:
        if a.field is not self and a.field != self:
            raise FieldMismatch(f"element of {a.field!r} used with {self!r}")

    # -- serialization -------------------------------------------------------

    def descriptor(self) -> dict:
        return {"q": self.q, "m": self.m, "modulus": list(self.modulus)}

    @classmethod
    def from_descriptor(cls, desc: dict) -> "ExtField":
        return cls(int(desc["q"]), int(desc["m"]), desc.get("modulus"))

    # -- raw helpers on packed ints (hot paths) ------------------------------

    def _inv_raw(self, v: int) -> int:
        if v == 0:
            raise ZeroDivisionError("inverse of zero field element")
        q = self.q
        a = _trim(self._ring.unpack(v))
        # extended Euclid: track s with s*a == r (mod modulus)
        r0, r1 = list(self.modulus), a
        s0, s1 = [], [1]
        while r1:
            quot, rem = poly_divmod(r0, r1, q)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul(quot, s1, q), q)
        inv_c = pow(r0[0], q - 2, q)
        return self._ring.pack([c * inv_c for c in s0])


@functools.lru_cache(maxsize=None)
def ext_field_create(q: int, m: int) -> ExtField:
    """Canonical F_{q^m}; the same (q, m) always returns the same object."""
    return ExtField(q, m)


class ExtElem:
    """Immutable element of an :class:`ExtField`.

    Plain ints mix in as elements of the prime subfield, so ``3 * a`` scales by
    an F_q scalar and ``a == 0`` tests for zero.
    """

    __slots__ = ("field", "v")

    def __init__(self, field: ExtField, v: int):
        self.field = field
        self.v = v

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(self.field._ring.unpack(self.v))

    def to_int(self) -> int:
        n = 0
        for c in reversed(self.coeffs):
            n = n * self.field.q + c
        return n

    def _other(self, other) -> int | None:
        if isinstance(other, ExtElem):
            if other.field is not self.field and other.field != self.field:
                raise FieldMismatch(f"cannot combine elements of {self.field!r} and {other.field!r}")
            return other.v
        if isinstance(other, int):
            return other % self.field.q
        return None

    def __repr__(self):
        return f"ExtElem({list(self.coeffs)})"

    def __eq__(self, other):
        if isinstance(other, ExtElem):
            return other.v == self.v and (other.field is self.field or other.field == self.field)
        if isinstance(other, int):
            return self.v == other % self.field.q
        return NotImplemented

    def __hash__(self):
        return hash(self.v)

    def __bool__(self):
        return self.v != 0

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return ExtElem(self.field, self.field._ring.add(self.v, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return ExtElem(self.field, self.field._ring.sub(self.v, o))

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return ExtElem(self.field, self.field._ring.sub(o, self.v))

    def __neg__(self):
        return ExtElem(self.field, self.field._ring.neg(self.v))

    def __mul__(self, other):
        ring = self.field._ring
        if isinstance(other, int):
            return ExtElem(self.field, ring.scale(self.v, other))
        o = self._other(other)
        if o is None:
            return NotImplemented
        return ExtElem(self.field, ring.mul(self.v, o))

    __rmul__ = __mul__

    def inverse(self) -> "ExtElem":
        return ExtElem(self.field, self.field._inv_raw(self.v))

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return ExtElem(self.field, self.field._ring.mul(self.v, self.field._inv_raw(o)))

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return ExtElem(self.field, self.field._ring.mul(o, self.field._inv_raw(self.v)))

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return ExtElem(self.field, self.field._ring.pow(self.v, e))

    def frobenius(self, times: int = 1) -> "ExtElem":
        """x -> x^(q^times); times is taken modulo m."""
        ring = self.field._ring
        v = self.v
        for _ in range(times % self.field.m):
            v = ring.pow(v, self.field.q)
        return ExtElem(self.field, v)


def ext_arith(a: ExtElem, b: ExtElem | int | None, op: str) -> ExtElem:
    """Dispatch helper: op is one of add, sub, mul, div, inv, pow."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "inv":
        return a.inverse()
    if op == "pow":
        return a**b
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# expansion over the base field
# ---------------------------------------------------------------------------


def _common_field(v: Sequence[ExtElem]) -> ExtField:
    if not v:
        raise MalformedInput("empty vector")
    field = v[0].field
    for x in v[1:]:
        field.check(x)
    return field


def expand_vector(v: Sequence[ExtElem]) -> list[list[int]]:
    """m x N matrix over F_q whose column j holds the coefficients of v[j]."""
    field = _common_field(v)
    cols = [x.coeffs for x in v]
    return [[col[i] for col in cols] for i in range(field.m)]


def collapse_matrix(field: ExtField, mat: Sequence[Sequence[int]]) -> list[ExtElem]:
    """Inverse of :func:`expand_vector`."""
    if len(mat) != field.m:
        raise MalformedInput(f"expected {field.m} rows")
    return [field(list(col)) for col in zip(*mat)]


def rank_q(v: Sequence[ExtElem]) -> int:
    """Rank over F_q of the expansion of v."""
    field = _common_field(v)
    return linalg.rank(expand_vector(v), field.q)


def linear_combination(coeffs: Sequence[int], symbols: Sequence, q: int):
    """sum_i coeffs[i] * symbols[i] for F_q coefficients.

    Works for symbols in F_q (ints) and for :class:`ExtElem` symbols.  Packed
    sums are reduced every m terms so slot values never overflow.
    """
    if symbols and isinstance(symbols[0], ExtElem):
        field = symbols[0].field
        ring = field._ring
        step = max(field.m, 1)
        total = 0
        for start in range(0, len(symbols), step):
            acc = 0
            for c, s in zip(coeffs[start : start + step], symbols[start : start + step]):
                if c:
                    acc += s.v * (c % q)
            total = ring.add(total, ring.reduce_slots(acc))
        return ExtElem(field, total)
    return sum(c * s for c, s in zip(coeffs, symbols)) % q
