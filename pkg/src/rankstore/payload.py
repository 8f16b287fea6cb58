"""Byte payload <-> field symbols.

The payload is read as one little-endian integer, which is written out in
little-endian base-q digits.  Symbol i takes digits i*m .. i*m + m - 1 as its
coefficients of x^0 .. x^(m-1).  Unused high digits are zero.  The byte
length travels separately, so trailing zero bytes survive the round trip.
"""

from __future__ import annotations

from typing import Sequence

from .errors import MalformedInput
from .field import ExtElem, ExtField


def capacity_bytes(field: ExtField, count: int) -> int:
    """Largest L with 256^L <= q^(m * count)."""
    total = field.q ** (field.m * count)
    return (total.bit_length() - 1) // 8


def bytes_to_symbols(data: bytes, field: ExtField, count: int) -> list[ExtElem]:
    cap = capacity_bytes(field, count)
    if len(data) > cap:
        raise MalformedInput(f"payload of {len(data)} bytes exceeds the {cap}-byte capacity")
    n = int.from_bytes(data, "little")
    q, m = field.q, field.m
    out = []
    for _ in range(count):
        digits = []
        for _ in range(m):
            n, d = divmod(n, q)
            digits.append(d)
        out.append(field(digits))
    return out


def symbols_to_bytes(symbols: Sequence[ExtElem], length: int) -> bytes:
    if not symbols:
        return b""
    q = symbols[0].field.q
    n = 0
    for s in reversed(symbols):
        for c in reversed(s.coeffs):
            n = n * q + c
    if n >= 1 << (8 * length):
        raise MalformedInput(f"symbols encode more than {length} bytes")
    return n.to_bytes(length, "little")
