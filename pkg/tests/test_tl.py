import pytest

from uqfoel.errors import DomainError, ShapeError
from uqfoel.qalg import QFraction, q_factorial, q_integer
from uqfoel.suite import run_identity_suite
from uqfoel.tl import (
    LOOP, PlanarDiagram, RationalCombination, U, compose, enumerate_tl_basis, identity, jones_wenzl,
    jw_positive_expansion, jw_scaled, jwfk_rhs,
)

CATALAN = [1, 1, 2, 5, 14, 42, 132]


def test_enumerate_examples():
    assert len(enumerate_tl_basis(3, 3)) == 5
    assert len(enumerate_tl_basis(0, 0)) == 1
    assert len(enumerate_tl_basis(2, 0)) == 1


def test_catalan_counts():
    for n, c in enumerate(CATALAN):
        assert len(enumerate_tl_basis(n, n)) == c


def test_enumeration_is_deterministic_and_unique():
    a = enumerate_tl_basis(4, 2)
    assert a == enumerate_tl_basis(4, 2)
    assert len(set(a)) == len(a)


def test_odd_boundary_rejected():
    with pytest.raises(DomainError):
        enumerate_tl_basis(3, 2)


def test_canonical_form_is_unique():
    d1 = PlanarDiagram.from_pairs(2, 2, [(0, 1), (2, 3)])
    d2 = PlanarDiagram.from_pairs(2, 2, [(3, 2), (1, 0)])
    assert d1 == d2 and hash(d1) == hash(d2)


def test_loop_relation():
    assert compose(U(1, 2), U(1, 2)) == U(1, 2).scale(LOOP)


def test_braid_like_relation():
    assert compose(compose(U(1, 3), U(2, 3)), U(1, 3)) == U(1, 3)


def test_identity_is_neutral():
    for d in enumerate_tl_basis(4, 4):
        assert compose(identity(4), d) == compose(d, identity(4))


def test_shape_mismatch():
    with pytest.raises(ShapeError):
        compose(U(1, 2), U(1, 3))


def test_jones_wenzl_small():
    assert jones_wenzl(1) == RationalCombination(identity(1))
    p2 = jones_wenzl(2)
    assert jw_scaled(2) == identity(2).scale(q_integer(2)) + U(1, 2)
    cup_cap = next(iter(U(1, 2).terms))
    assert p2.coefficient(PlanarDiagram.build(2, 2)) == QFraction(1)
    assert p2.coefficient(cup_cap) == QFraction(1, q_integer(2))
    assert compose(p2, p2) == p2
    assert compose(U(1, 2), p2).is_zero()


def test_jones_wenzl_three_annihilated():
    p3 = jones_wenzl(3)
    assert compose(U(1, 3), p3).is_zero()
    assert compose(U(2, 3), p3).is_zero()


def test_jones_wenzl_rejects_zero():
    with pytest.raises(DomainError):
        jones_wenzl(0)


def test_positive_expansion_exponent_bound():
    for n in range(1, 6):
        top = n * (n - 1) // 2
        coeffs = jw_positive_expansion(n)
        assert all(c.max_exponent <= top and c.has_nonnegative_integer_coeffs() for c in coeffs.values())
        # identity coefficient is [n]!
        assert coeffs[PlanarDiagram.build(n, n)] == q_factorial(n)


def test_jwfk_diagrammatic_small():
    for n in range(1, 5):
        for m in range(n + 1):
            assert jwfk_rhs(m, n - m) == jones_wenzl(n)


def test_identity_suite_up_to_four():
    results = run_identity_suite(4)
    assert results and all(r.passed for r in results)


def test_identity_suite_fault_is_detected():
    results = run_identity_suite(3, fault="wenzl")
    failed = {r.identity for r in results if not r.passed}
    assert failed == {"wenzl"}
