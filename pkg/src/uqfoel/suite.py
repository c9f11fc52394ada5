"""Exact identity suite for Jones-Wenzl projectors and the JWFK expansion.

Sizes up to ``DIAGRAM_MAX`` are checked by diagram composition over
Laurent polynomials.  Larger sizes (up to 8) are checked as tensor-space
matrices at the rational points in ``TENSOR_Q``.  The positive-expansion
test is always diagrammatic.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass
from typing import Callable

from gmpy2 import mpq

from .errors import InvariantViolation, ResourceError
from .qalg import QFraction, parse_q, q_factorial, q_integer, specialize
from .repspaces import fundamental_action, jw_matrix, represent
from .sparse import SparseOperator
from .tl import (
    RationalCombination, U, absorption_sides, arc_middle, compose, enumerate_tl_basis, identity,
    in_positive_cone, jones_wenzl, jw_positive_expansion, jw_scaled, jwfk_decompose, jwfk_rhs,
    nested_caps, nested_cups, single_clasp_sides, tensor, wenzl_form1, wenzl_form2,
)

DIAGRAM_MAX = 6
JWFK_DIAGRAM_MAX = 5
SUITE_MAX = 8
TENSOR_Q = ("1/2", "1", "2")
FAMILIES = ("idempotency", "annihilation", "wenzl", "absorption", "single_clasp", "positive_expansion", "jwfk")


@dataclass
class CheckResult:
    identity: str
    n: int
    mode: str
    passed: bool
    seconds: float
    detail: str = ""

    @property
    def name(self) -> str:
        return f"{self.identity}[n={self.n},{self.mode}]"


def _perturb(x):
    """Deterministic corruption used by the fault-injection mode."""
    if isinstance(x, SparseOperator):
        return x + SparseOperator(x.shape, {0: {0: mpq(1, 997)}})
    x = RationalCombination.coerce(x)
    return x + enumerate_tl_basis(x.a, x.b)[0]


def _same(lhs, rhs, corrupt: bool) -> bool:
    return (_perturb(lhs) if corrupt else lhs) == rhs


def _is_zero(x, corrupt: bool) -> bool:
    x = _perturb(x) if corrupt else x
    return x.is_zero()


# diagrammatic checks

def _diagram_checks(n: int, fault: str | None) -> list[tuple[str, str, Callable[[], bool]]]:
    out = []

    def f(name):
        return fault == name

    def idem():
        p = jones_wenzl(n)
        return _same(compose(p, p), p, f("idempotency"))

    def annih():
        p = jones_wenzl(n)
        return all(_is_zero(compose(U(i, n), p), f("annihilation")) and _is_zero(compose(p, U(i, n)), f("annihilation"))
                   for i in range(1, n))

    def wenzl():
        p = jones_wenzl(n)
        return _same(wenzl_form1(n), p, f("wenzl")) and _same(wenzl_form2(n), p, f("wenzl"))

    def absorb():
        for m in range(1, n + 1):
            a, b, p = absorption_sides(m, n)
            if not (_same(a, p, f("absorption")) and _same(b, p, f("absorption"))):
                return False
        return True

    def clasp():
        lhs, rhs = single_clasp_sides(n)
        return _same(lhs, rhs, f("single_clasp"))

    def positive():
        if jones_wenzl(n).scale(QFraction(q_factorial(n))) != RationalCombination(jw_scaled(n)):
            return False
        if not f("positive_expansion"):
            jw_positive_expansion(n)
            return True
        return all(in_positive_cone(-c, n) for c in jw_positive_expansion(n).values())

    def jwfk():
        p = jones_wenzl(n)
        return all(_same(jwfk_rhs(m, n - m), p, f("jwfk")) for m in range(0, n + 1))

    out.append(("idempotency", "diagram", idem))
    if n >= 2:
        out.append(("annihilation", "diagram", annih))
        out.append(("wenzl", "diagram", wenzl))
    out.append(("absorption", "diagram", absorb))
    out.append(("single_clasp", "diagram", clasp))
    out.append(("positive_expansion", "diagram", positive))
    if n <= JWFK_DIAGRAM_MAX:
        out.append(("jwfk", "diagram", jwfk))
    return out


# tensor-space checks

def jwfk_tensor_check(m: int, n: int, q0, corrupt: bool = False) -> bool:
    """``p_{m+n} = sum_k c_{m,n,k} (p_m (x) p_n) X_k (p_m (x) p_n)`` as exact matrices at ``q0``."""
    q0 = parse_q(q0)
    side = jw_matrix(m, q0).kron(jw_matrix(n, q0))
    rhs = SparseOperator(side.shape)
    for k, c in jwfk_decompose(m, n):
        rhs = rhs + (side @ represent(arc_middle(m, n, k), q0) @ side).scale(specialize(c, q0))
    return _same(rhs, jw_matrix(m + n, q0), corrupt)


def _tensor_checks(n: int, fault: str | None, q_values=TENSOR_Q) -> list[tuple[str, str, Callable[[], bool]]]:
    out = []

    def f(name):
        return fault == name

    def for_all_q(test):
        return lambda: all(test(parse_q(q)) for q in q_values)

    def idem(q):
        p = jw_matrix(n, q)
        return _same(p @ p, p, f("idempotency"))

    def annih(q):
        p = jw_matrix(n, q)
        return all(_is_zero(fundamental_action("U", n, q, i) @ p, f("annihilation"))
                   and _is_zero(p @ fundamental_action("U", n, q, i), f("annihilation")) for i in range(1, n))

    def wenzl(q):
        p = jw_matrix(n, q)
        A = jw_matrix(n - 1, q).kron(SparseOperator.identity(2))
        c = specialize(q_integer(n - 1), q) / specialize(q_integer(n), q)
        form1 = A + (A @ fundamental_action("U", n, q, n - 1) @ A).scale(c)
        cup = represent(tensor(identity(n - 2), nested_cups(1)), q)
        cap = represent(tensor(identity(n - 2), nested_caps(1)), q)
        form2 = A + (A @ cup @ cap @ A).scale(c)
        return _same(form1, p, f("wenzl")) and _same(form2, p, f("wenzl"))

    def absorb(q):
        p = jw_matrix(n, q)
        for m in range(1, n + 1):
            small = jw_matrix(m, q).kron(SparseOperator.identity(1 << (n - m)))
            if not (_same(small @ p, p, f("absorption")) and _same(p @ small, p, f("absorption"))):
                return False
        return True

    def clasp(q):
        lhs = represent(tensor(identity(n - 1), nested_caps(1)), q) @ jw_matrix(n, q).kron(SparseOperator.identity(2))
        rhs = SparseOperator(lhs.shape)
        for k in range(1, n + 1):
            cap = represent(tensor(identity(k - 1), nested_caps(1), identity(n - k)), q)
            c = specialize(q_integer(k), q) / specialize(q_integer(n), q)
            rhs = rhs + (jw_matrix(n - 1, q) @ cap).scale(c)
        return _same(lhs, rhs, f("single_clasp"))

    def jwfk(q):
        return all(jwfk_tensor_check(m, n - m, q, f("jwfk")) for m in range(0, n + 1))

    out.append(("idempotency", "tensor", for_all_q(idem)))
    if n >= 2:
        out.append(("annihilation", "tensor", for_all_q(annih)))
        out.append(("wenzl", "tensor", for_all_q(wenzl)))
    out.append(("absorption", "tensor", for_all_q(absorb)))
    out.append(("single_clasp", "tensor", for_all_q(clasp)))
    out.append(("jwfk", "tensor", for_all_q(jwfk)))
    return out


def run_identity_suite(max_n: int, fault: str | None = None) -> list[CheckResult]:
    """Run every check for sizes ``1..max_n``.

    ``fault`` names one identity family whose computed side is deliberately
    corrupted, to show that the suite notices.

    Raises
    ------
    ResourceError
        If ``max_n`` exceeds ``SUITE_MAX``.
    """
    if max_n > SUITE_MAX:
        raise ResourceError(f"max_n={max_n} exceeds the suite cap {SUITE_MAX}")
    if fault is not None and fault not in FAMILIES:
        raise ValueError(f"unknown identity family {fault!r}")
    results = []
    for n in range(1, max_n + 1):
        checks = _diagram_checks(n, fault)
        if n > DIAGRAM_MAX:
            checks = [c for c in checks if c[0] == "positive_expansion"]
        checks += [c for c in _tensor_checks(n, fault) if n > DIAGRAM_MAX or c[0] == "jwfk"]
        for name, mode, fn in checks:
            t0 = time.perf_counter()
            try:
                ok, detail = bool(fn()), ""
            except InvariantViolation as exc:
                ok, detail = False, str(exc)
            results.append(CheckResult(name, n, mode, ok, round(time.perf_counter() - t0, 4), detail))
    return results


def suite_report(results: list[CheckResult], max_n: int) -> dict:
    return {
        "max_n": max_n,
        "passed": all(r.passed for r in results),
        "failures": [r.name for r in results if not r.passed],
        "checks": [asdict(r) for r in results],
    }
