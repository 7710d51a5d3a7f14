"""Grading, bases, depth polynomials, Rankin brackets and the Serre-style
derivative on K[E,g,h]."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from dqmf.algebra import FieldConfig, RatT
from dqmf.qmring import (
    NotIsobaric,
    NotModular,
    QmPoly,
    associated_polynomial,
    d1,
    depth_coefficient_transform,
    grading,
    isobaric_decompose,
    modular_basis,
    qm_basis,
    rankin_bracket,
    serre_derivative,
)
from dqmf.verify import random_isobaric


def test_grading_of_generators(cfg, q):
    assert grading(QmPoly.gen_E(cfg)) .w == 2
    assert grading(QmPoly.gen_E(cfg)).m == 1 and grading(QmPoly.gen_E(cfg)).l == 1
    sg = grading(QmPoly.gen_g(cfg))
    assert (sg.w, sg.m, sg.l) == (q - 1, 0, 0)
    sh = grading(QmPoly.gen_h(cfg))
    assert (sh.w, sh.m, sh.l) == (q + 1, 1 % (q - 1), 0)


def test_grading_zero_and_not_isobaric(cfg, q):
    assert grading(QmPoly.zero(cfg)) is None
    # E + g mixes weights for q != 3 and types for q = 3
    with pytest.raises(NotIsobaric):
        grading(QmPoly.gen_E(cfg) + QmPoly.gen_g(cfg))
    # E g + T h is isobaric: weight q+1, type 1 on both monomials
    f = QmPoly.monomial(cfg, 1, 1, 0) + QmPoly.monomial(
        cfg, 0, 0, 1, RatT(cfg, cfg.poly_T)
    )
    s = grading(f)
    assert (s.w, s.m, s.l) == (q + 1, 1 % (q - 1), 1)


def test_grading_multiplicativity(cfg, q):
    rng = random.Random(100 + q)
    for _ in range(30):
        f = random_isobaric(cfg, rng, 16)
        g = random_isobaric(cfg, rng, 16)
        prod = f * g
        if prod.is_zero():
            continue
        sf, sg, sp = grading(f), grading(g), grading(prod)
        assert sp.w == sf.w + sg.w
        assert q == 2 or sp.m == (sf.m + sg.m) % (q - 1)
        assert sp.l <= sf.l + sg.l


def test_isobaric_decompose_sums_back(cfg):
    E, g, h = QmPoly.gen_E(cfg), QmPoly.gen_g(cfg), QmPoly.gen_h(cfg)
    f = (E + h) * g
    parts = isobaric_decompose(f)
    total = QmPoly.zero(cfg)
    seen = set()
    for sig, comp in parts:
        assert grading(comp) == sig
        assert (sig.w, sig.m) not in seen
        seen.add((sig.w, sig.m))
        total = total + comp
    assert total == f
    assert isobaric_decompose(QmPoly.zero(cfg)) == []
    assert len(isobaric_decompose(E + g)) == 2


def test_modular_basis_examples(cfg, q):
    if q >= 4:
        w = 2 * q * q + 2
        m = (q * q + 1) % (q - 1)
        assert modular_basis(w, m, cfg) == [(q - 1, q + 1), (2 * q, 2)]
        assert modular_basis(2, 0, cfg) == []
        assert modular_basis(2, 1, cfg) == []
    assert modular_basis(0, 0, cfg) == [(0, 0)]


def test_qm_basis_examples(cfg, q):
    if q >= 4:
        assert qm_basis(2, 1, 1, cfg) == [(1, 0, 0)]
    assert qm_basis(q + 1, 1, 1, cfg) == sorted([(0, 0, 1), (1, 1, 0)])
    # depth-0 slice is the modular basis
    for w in range(0, 20):
        for m in range(max(q - 1, 1)):
            assert qm_basis(w, m, 0, cfg) == [(0, b, c) for b, c in modular_basis(w, m, cfg)]


def test_qm_basis_dimension_is_sum_of_modular_dims(cfg, q):
    for w in range(0, 25):
        for l in range(0, 4):
            m = w % max(q - 1, 1)
            dim = sum(len(modular_basis(w - 2 * i, m - i, cfg)) for i in range(l + 1) if w - 2 * i >= 0)
            assert len(qm_basis(w, m, l, cfg)) == dim


def test_associated_polynomial_generators(cfg):
    E = QmPoly.gen_E(cfg)
    P = associated_polynomial(E)
    assert P.degree == 1 and P.coeff(0) == E and P.coeff(1) == QmPoly.one(cfg)
    h = QmPoly.gen_h(cfg)
    Ph = associated_polynomial(h)
    assert Ph.degree == 0 and Ph.coeff(0) == h


def test_associated_polynomial_multiplicative(cfg):
    rng = random.Random(42)
    for _ in range(20):
        f = random_isobaric(cfg, rng, 12)
        g = random_isobaric(cfg, rng, 12)
        lhs = associated_polynomial(f * g)
        rhs = associated_polynomial(f) * associated_polynomial(g)
        assert lhs == rhs
        assert associated_polynomial(f).coeff(0) == f


def test_associated_polynomial_additive_on_equal_gradings(cfg):
    rng = random.Random(cfg.q * 13)
    for _ in range(12):
        f = random_isobaric(cfg, rng, 14)
        s = grading(f)
        basis = qm_basis(s.w, s.m, s.l + 1, cfg)
        g = QmPoly.zero(cfg)
        for expo in basis:
            g.terms[expo] = RatT(cfg, cfg.poly_T)
        lhs = associated_polynomial(f + g)
        rhs = associated_polynomial(f) + associated_polynomial(g)
        assert lhs == rhs


def test_associated_polynomial_square_example(cfg):
    E = QmPoly.gen_E(cfg)
    g = QmPoly.gen_g(cfg)
    P = associated_polynomial(E * E * g)
    # (E+Y)^2 g
    assert P.coeff(0) == E * E * g
    assert P.coeff(1) == (E * g).scale_int(2)
    assert P.coeff(2) == g


def test_depth_coefficient_transform(cfg):
    E = QmPoly.gen_E(cfg)
    P = associated_polynomial(E)
    t1 = depth_coefficient_transform(P, 1)
    assert t1.degree == 0 and t1.coeff(0) == QmPoly.one(cfg)
    assert depth_coefficient_transform(P, 0) == P
    P2 = associated_polynomial(E * E)
    t = depth_coefficient_transform(P2, 1)
    assert t == associated_polynomial(E.scale_int(2))
    with pytest.raises(IndexError):
        depth_coefficient_transform(P, 5)


def test_depth_coefficient_transform_random_dual_route(cfg):
    """P_{f_i} via the transform equals associated_polynomial of coeff i."""
    rng = random.Random(cfg.q * 17)
    for _ in range(25):
        f = random_isobaric(cfg, rng, 14)
        P = associated_polynomial(f)
        for i in range(P.degree + 1):
            assert depth_coefficient_transform(P, i) == associated_polynomial(P.coeff(i))


def test_depth_poly_coefficients_carry_shifted_grading(cfg, q):
    """Y has weight 2, type 1, depth 1: coefficient j of the depth polynomial
    of an isobaric f is isobaric of weight w - 2j and type m - j."""
    rng = random.Random(cfg.q * 7)
    for _ in range(15):
        f = random_isobaric(cfg, rng, 14)
        s = grading(f)
        P = associated_polynomial(f)
        for j in range(P.degree + 1):
            cj = P.coeff(j)
            if cj.is_zero():
                continue
            sj = grading(cj)
            assert sj.w == s.w - 2 * j
            assert q == 2 or sj.m == (s.m - j) % (q - 1)
            assert sj.l <= s.l - j


def test_top_coefficient_is_modular(cfg):
    rng = random.Random(cfg.q * 31)
    for _ in range(25):
        f = random_isobaric(cfg, rng, 14)
        P = associated_polynomial(f)
        top = depth_coefficient_transform(P, P.degree)
        assert top.degree == 0
        assert top.coeff(0).deg_E() <= 0


def test_d1_system(cfg):
    E, g, h = QmPoly.gen_E(cfg), QmPoly.gen_g(cfg), QmPoly.gen_h(cfg)
    assert d1(E) == E * E
    assert d1(g) == -(E * g + h)
    assert d1(h) == E * h


def test_d1_is_a_derivation(cfg):
    rng = random.Random(cfg.q)
    for _ in range(20):
        f = random_isobaric(cfg, rng, 12)
        g = random_isobaric(cfg, rng, 12)
        assert d1(f * g) == d1(f) * g + f * d1(g)


def test_rankin_bracket_golden(cfg):
    E, g, h = QmPoly.gen_E(cfg), QmPoly.gen_g(cfg), QmPoly.gen_h(cfg)
    assert rankin_bracket(g, h) == h * h
    assert rankin_bracket(g, g).is_zero()
    assert rankin_bracket(h, h).is_zero()
    # hand-expanded: [g, E] = -g E^2 + 2 E (Eg + h) = E^2 g + 2 E h
    expected = (E * E * g) + (E * h).scale_int(2)
    assert rankin_bracket(g, E) == expected


def test_serre_derivative_values(cfg, q):
    g, h = QmPoly.gen_g(cfg), QmPoly.gen_h(cfg)
    assert serre_derivative(g) == -h
    assert serre_derivative(h).is_zero()
    assert serre_derivative(g * g) == (g * h).scale_int(-2)
    with pytest.raises(NotModular):
        serre_derivative(QmPoly.gen_E(cfg))


def test_qmpoly_str_and_json_roundtrip(cfg):
    from dqmf.cli import qmpoly_from_json

    rng = random.Random(3)
    for _ in range(10):
        f = random_isobaric(cfg, rng, 12)
        assert qmpoly_from_json(cfg, f.to_json()) == f
    assert str(QmPoly.zero(cfg)) == "0"
    assert str(QmPoly.one(cfg)) == "1"


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3),
       st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
def test_monomial_products_grade_additively(a1, b1, c1, a2, b2, c2):
    cfg = FieldConfig.from_q(5)
    m1 = QmPoly.monomial(cfg, a1, b1, c1)
    m2 = QmPoly.monomial(cfg, a2, b2, c2)
    s1, s2, sp = grading(m1), grading(m2), grading(m1 * m2)
    assert sp.w == s1.w + s2.w
    assert sp.m == (s1.m + s2.m) % (cfg.q - 1)
    assert sp.l == s1.l + s2.l
