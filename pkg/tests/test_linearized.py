from __future__ import annotations

import random

import pytest

from rankstore.errors import FieldMismatch
from rankstore.field import ExtField, linear_combination, rank_q
from rankstore.linearized import LinearizedPolynomial as LP, left_divide, lin_arith, lin_eval, min_subspace_poly


def _random_poly(field, deg, rng):
    return LP(field, [field.random(rng) for _ in range(deg + 1)])


def _naive_eval(f, x):
    """Oracle: sum a_i x^(q^i) with plain powers."""
    acc = f.field.zero
    for i, a in enumerate(f.coeffs):
        acc = acc + a * x ** (f.field.q**i)
    return acc


def test_degree_zero_is_scaling():
    f = ExtField(5, 4)
    rng = random.Random(0)
    a = f.random(rng)
    p = LP(f, [a])
    for _ in range(20):
        x = f.random(rng)
        assert lin_eval(p, x) == a * x


def test_x_squared_over_gf4():
    f = ExtField(2, 2)
    w = f.gen
    assert LP.monomial(f, 1)(w) == w + 1


def test_eval_matches_naive_powers():
    f = ExtField(3, 5)
    rng = random.Random(1)
    for _ in range(50):
        p = _random_poly(f, rng.randrange(4), rng)
        x = f.random(rng)
        assert p(x) == _naive_eval(p, x)


def test_evaluation_is_fq_linear():
    f = ExtField(5, 6)
    rng = random.Random(2)
    for _ in range(500):
        p = _random_poly(f, rng.randrange(4), rng)
        g1, g2 = f.random(rng), f.random(rng)
        a, b = rng.randrange(5), rng.randrange(5)
        assert p(g1 * a + g2 * b) == p(g1) * a + p(g2) * b


def test_identity_and_negation():
    f = ExtField(2, 4)
    rng = random.Random(3)
    p = _random_poly(f, 2, rng)
    ident = LP.identity(f)
    assert p @ ident == p and ident @ p == p
    assert (p + (-p)).is_zero()
    assert LP(f).qdegree == -1
    assert lin_arith(p, p, "sub") == LP(f)


def test_compose_pointwise_exhaustive_gf16():
    f = ExtField(2, 4)
    rng = random.Random(4)
    elems = list(f.elements())
    for _ in range(10):
        p = _random_poly(f, rng.randrange(3), rng)
        g = _random_poly(f, rng.randrange(3), rng)
        pg = p @ g
        assert pg.qdegree <= p.qdegree + g.qdegree
        assert all(pg(x) == p(g(x)) for x in elems)


def test_compose_associative():
    f = ExtField(5, 5)
    rng = random.Random(5)
    for _ in range(50):
        a, b, c = (_random_poly(f, rng.randrange(3), rng) for _ in range(3))
        assert (a @ b) @ c == a @ (b @ c)


@pytest.mark.parametrize("q,m", [(2, 4), (2, 8), (3, 4), (5, 3)])
def test_kernel_dimension_exhaustive(q, m):
    f = ExtField(q, m)
    rng = random.Random(q * 100 + m)
    elems = list(f.elements())
    for _ in range(6):
        p = _random_poly(f, rng.randrange(1, 3), rng)
        roots = [x for x in elems if not p(x)]
        # roots form a subspace: closed under addition and scaling
        rootset = set(roots)
        for _ in range(20):
            x, y = rng.choice(roots), rng.choice(roots)
            assert x + y in rootset and x * rng.randrange(q) in rootset
        dim = 0
        while q**dim < len(roots):
            dim += 1
        assert q**dim == len(roots)
        assert dim == p.kernel_dimension() <= p.qdegree


def test_min_subspace_poly_examples():
    f = ExtField(2, 2)
    assert min_subspace_poly([f.zero]) == LP.identity(f)
    p = f.gen
    m1 = min_subspace_poly([p])
    assert m1 == LP(f, [-(p ** (f.q - 1)), f.one])
    assert not m1(p)
    m2 = min_subspace_poly([f.one, f.gen])
    assert all(not m2(x) for x in f.elements())
    assert m2.qdegree == 2


def test_min_subspace_poly_vanishes_on_span_only():
    f = ExtField(5, 8)
    rng = random.Random(6)
    for _ in range(20):
        pts = [f.random(rng) for _ in range(rng.randrange(1, 5))]
        dim = rank_q(pts)
        m = min_subspace_poly(pts)
        assert m.coeffs[-1] == f.one and m.qdegree == dim == m.kernel_dimension()
        for _ in range(10):
            combo = linear_combination([rng.randrange(5) for _ in pts], pts, 5)
            assert not m(combo)
        x = f.random(rng)
        while rank_q(pts + [x]) == dim:
            x = f.random(rng)
        assert m(x)


def test_left_divide_roundtrip():
    f = ExtField(5, 10)
    rng = random.Random(7)
    for _ in range(30):
        v = _random_poly(f, rng.randrange(0, 4), rng)
        g = _random_poly(f, rng.randrange(0, 4), rng)
        quot, rem = left_divide(v @ g, v)
        assert quot == g and rem.is_zero()
        extra = _random_poly(f, max(v.qdegree - 1, 0), rng) if v.qdegree > 0 else LP(f)
        quot, rem = left_divide((v @ g) + extra, v)
        assert (v @ quot) + rem == (v @ g) + extra
        assert rem.qdegree < v.qdegree or rem.is_zero()


def test_field_mismatch():
    with pytest.raises(FieldMismatch):
        LP.identity(ExtField(2, 3)) + LP.identity(ExtField(2, 4))
