"""Temperley-Lieb diagrams, composition with loop removal, Jones-Wenzl projectors.

Conventions
-----------
A diagram ``a -> b`` has ``a`` bottom points labelled ``0..a-1`` (the domain)
and ``b`` top points labelled ``a..a+b-1`` (the codomain), both left to right.
``compose(f, g)`` stacks ``g`` on top of ``f`` and is the morphism ``g o f``.
Every closed loop contributes a factor ``-[2]``, so ``U_i**2 = -[2] U_i``.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, InvariantViolation, NotDivisible, ShapeError
from .qalg import LaurentPoly, QFraction, q_binomial, q_factorial, q_integer

LOOP = -q_integer(2)


class PlanarDiagram:
    """A noncrossing perfect matching between ``a`` bottom and ``b`` top points.

    Parameters
    ----------
    a, b : int
        Bottom and top point counts.
    partner : sequence of int
        ``partner[i]`` is the point joined to ``i``.  Must be an involution
        without fixed points and noncrossing in the planar embedding.
    """

    __slots__ = ("a", "b", "partner", "_hash")

    def __init__(self, a: int, b: int, partner: Sequence[int], check: bool = True):
        self.a, self.b = int(a), int(b)
        self.partner = tuple(partner)
        self._hash = hash((self.a, self.b, self.partner))
        if check:
            self._validate()

    def _validate(self):
        n = self.a + self.b
        if len(self.partner) != n or n % 2:
            raise DomainError("a + b must be even and match the pairing length")
        for i, j in enumerate(self.partner):
            if not 0 <= j < n or j == i or self.partner[j] != i:
                raise DomainError(f"pairing is not a perfect matching: {self.partner}")
        pos = [self._circ(i) for i in range(n)]
        arcs = sorted(tuple(sorted((pos[i], pos[j]))) for i, j in self.pairs())
        for (x1, y1), (x2, y2) in combinations(arcs, 2):
            if x1 < x2 < y1 < y2 or x2 < x1 < y2 < y1:
                raise DomainError(f"pairing crosses: {self.partner}")

    def _circ(self, i: int) -> int:
        # walk the boundary: bottom left to right, then top right to left
        return i if i < self.a else self.a + self.b - 1 - (i - self.a)

    @classmethod
    def from_pairs(cls, a: int, b: int, pairs: Iterable[tuple[int, int]]) -> "PlanarDiagram":
        partner = [-1] * (a + b)
        for i, j in pairs:
            partner[i], partner[j] = j, i
        return cls(a, b, partner)

    @classmethod
    def build(cls, a: int, b: int, caps: Iterable[tuple[int, int]] = (),
              cups: Iterable[tuple[int, int]] = ()) -> "PlanarDiagram":
        """Diagram from bottom caps and top cups (both in local 0-based
        positions); the remaining points are joined by through-strands in order."""
        partner = [-1] * (a + b)
        for i, j in caps:
            partner[i], partner[j] = j, i
        for i, j in cups:
            partner[a + i], partner[a + j] = a + j, a + i
        free_bot = [i for i in range(a) if partner[i] < 0]
        free_top = [a + i for i in range(b) if partner[a + i] < 0]
        if len(free_bot) != len(free_top):
            raise ShapeError("unequal numbers of free bottom and top points")
        for i, j in zip(free_bot, free_top):
            partner[i], partner[j] = j, i
        return cls(a, b, partner)

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in enumerate(self.partner) if i < j]

    def through_count(self) -> int:
        return sum(1 for i in range(self.a) if self.partner[i] >= self.a)

    def is_identity(self) -> bool:
        return self.a == self.b and all(self.partner[i] == self.a + i for i in range(self.a))

    def __eq__(self, other) -> bool:
        return (isinstance(other, PlanarDiagram) and self.a == other.a and self.b == other.b
                and self.partner == other.partner)

    def __lt__(self, other: "PlanarDiagram") -> bool:
        return (self.a, self.b, self.partner) < (other.a, other.b, other.partner)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"PlanarDiagram({self.a}->{self.b}, {self.pairs()})"


def _noncrossing_circular(points: tuple[int, ...]) -> list[list[tuple[int, int]]]:
    """All noncrossing perfect matchings of points in circular order."""
    if not points:
        return [[]]
    out = []
    first = points[0]
    for k in range(1, len(points), 2):
        inside = points[1:k]
        outside = points[k + 1:]
        for m1 in _noncrossing_circular(inside):
            for m2 in _noncrossing_circular(outside):
                out.append([(first, points[k])] + m1 + m2)
    return out


@lru_cache(maxsize=None)
def _tl_basis(a: int, b: int) -> tuple[PlanarDiagram, ...]:
    n = a + b
    # circular position -> label
    label = list(range(a)) + [a + b - 1 - (p - a) for p in range(a, n)]
    out = []
    for m in _noncrossing_circular(tuple(range(n))):
        out.append(PlanarDiagram.from_pairs(a, b, [(label[x], label[y]) for x, y in m]))
    return tuple(sorted(out))


def enumerate_tl_basis(a: int, b: int) -> list[PlanarDiagram]:
    """All planar diagrams ``a -> b`` in lexicographic order of the pairing.

    Raises
    ------
    DomainError
        If ``a + b`` is odd or a count is negative.
    """
    if a < 0 or b < 0 or (a + b) % 2:
        raise DomainError(f"no diagrams with a={a}, b={b}")
    return list(_tl_basis(a, b))


@lru_cache(maxsize=1 << 18)
def _compose_pairings(a: int, b: int, c: int, pf: tuple, pg: tuple) -> tuple[tuple, int]:
    """Stack ``g`` (b -> c) on ``f`` (a -> b); return the new partner tuple and loop count."""
    n = a + c
    partner = [-1] * n
    seen_mid = [False] * b

    def walk(side: str, i: int) -> int:
        # follow a strand from an outer point until it exits at an outer point
        while True:
            if side == "f":
                j = pf[i]
                if j < a:
                    return j
                m = j - a
                seen_mid[m] = True
                side, i = "g", m
            else:
                j = pg[i]
                if j >= b:
                    return a + (j - b)
                seen_mid[j] = True
                side, i = "f", a + j

    for i in range(a):
        if partner[i] < 0:
            j = walk("f", i)
            partner[i], partner[j] = j, i
    for t in range(c):
        o = a + t
        if partner[o] < 0:
            j = walk("g", b + t)
            partner[o], partner[j] = j, o
    loops = 0
    for m in range(b):
        if seen_mid[m]:
            continue
        loops += 1
        # a closed loop alternates f-arcs and g-arcs through middle points
        cur = m
        while True:
            seen_mid[cur] = True
            nxt = pf[a + cur] - a
            seen_mid[nxt] = True
            cur = pg[nxt]
            if seen_mid[cur]:
                break
    return tuple(partner), loops


def compose_diagrams(f: PlanarDiagram, g: PlanarDiagram) -> tuple[PlanarDiagram, int]:
    """``g o f`` for single diagrams; returns the diagram and its loop count."""
    if f.b != g.a:
        raise ShapeError(f"cannot stack {g.a}-point bottom on {f.b}-point top")
    partner, loops = _compose_pairings(f.a, f.b, g.b, f.partner, g.partner)
    return PlanarDiagram(f.a, g.b, partner, check=False), loops


def tensor_diagrams(f: PlanarDiagram, g: PlanarDiagram) -> PlanarDiagram:
    """Place ``g`` to the right of ``f``."""
    a1, b1, a2, b2 = f.a, f.b, g.a, g.b

    def fl(i):
        return i if i < a1 else a1 + a2 + (i - a1)

    def gl(i):
        return a1 + i if i < a2 else a1 + a2 + b1 + (i - a2)

    partner = [-1] * (a1 + a2 + b1 + b2)
    for i, j in enumerate(f.partner):
        partner[fl(i)] = fl(j)
    for i, j in enumerate(g.partner):
        partner[gl(i)] = gl(j)
    return PlanarDiagram(a1 + a2, b1 + b2, partner, check=False)


@lru_cache(maxsize=None)
def _loop_power(k: int) -> LaurentPoly:
    return LOOP ** k


class DiagramCombination:
    """A Laurent-polynomial-weighted sum of diagrams ``a -> b``.

    Parameters
    ----------
    a, b : int
        Domain and codomain strand counts.
    terms : mapping PlanarDiagram -> LaurentPoly
        Zero coefficients are dropped.
    """

    __slots__ = ("a", "b", "terms")

    def __init__(self, a: int, b: int, terms: Mapping[PlanarDiagram, LaurentPoly] | None = None):
        self.a, self.b = int(a), int(b)
        self.terms: dict[PlanarDiagram, LaurentPoly] = {}
        for d, c in (terms or {}).items():
            if (d.a, d.b) != (self.a, self.b):
                raise ShapeError(f"diagram {d} does not live in Hom({a},{b})")
            c = LaurentPoly.coerce(c)
            if not c.is_zero():
                self.terms[d] = c

    @classmethod
    def from_diagram(cls, d: PlanarDiagram, coeff=1) -> "DiagramCombination":
        return cls(d.a, d.b, {d: LaurentPoly.coerce(coeff)})

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, d: PlanarDiagram) -> LaurentPoly:
        return self.terms.get(d, LaurentPoly())

    def sorted_terms(self) -> list[tuple[PlanarDiagram, LaurentPoly]]:
        return sorted(self.terms.items(), key=lambda t: t[0])

    def _check(self, other: "DiagramCombination"):
        if (self.a, self.b) != (other.a, other.b):
            raise ShapeError(f"Hom({self.a},{self.b}) vs Hom({other.a},{other.b})")

    def __add__(self, other: "DiagramCombination") -> "DiagramCombination":
        self._check(other)
        out = dict(self.terms)
        for d, c in other.terms.items():
            out[d] = out.get(d, LaurentPoly()) + c
        return DiagramCombination(self.a, self.b, out)

    def __neg__(self) -> "DiagramCombination":
        return DiagramCombination(self.a, self.b, {d: -c for d, c in self.terms.items()})

    def __sub__(self, other: "DiagramCombination") -> "DiagramCombination":
        return self + (-other)

    def scale(self, c) -> "DiagramCombination":
        c = LaurentPoly.coerce(c)
        return DiagramCombination(self.a, self.b, {d: x * c for d, x in self.terms.items()})

    def __mul__(self, c) -> "DiagramCombination":
        return self.scale(c)

    __rmul__ = __mul__

    def exact_div(self, c) -> "DiagramCombination":
        """Divide every coefficient exactly; raises :class:`NotDivisible`."""
        c = LaurentPoly.coerce(c)
        return DiagramCombination(self.a, self.b, {d: x.exact_div(c) for d, x in self.terms.items()})

    def then(self, other: "DiagramCombination") -> "DiagramCombination":
        """``other o self``."""
        return compose(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiagramCombination):
            return NotImplemented
        return (self.a, self.b) == (other.a, other.b) and self.terms == other.terms

    __hash__ = None

    def __repr__(self) -> str:
        return f"DiagramCombination({self.a}->{self.b}, {len(self.terms)} terms)"


def compose(f, g):
    """Stack ``g`` on top of ``f``: the morphism ``g o f``.

    Accepts :class:`DiagramCombination`, :class:`RationalCombination` or a
    bare :class:`PlanarDiagram` for either argument.

    Raises
    ------
    ShapeError
        If the codomain of ``f`` differs from the domain of ``g``.
    """
    if isinstance(f, RationalCombination) or isinstance(g, RationalCombination):
        rf, rg = RationalCombination.coerce(f), RationalCombination.coerce(g)
        return RationalCombination(compose(rf.numerator, rg.numerator), rf.denominator * rg.denominator)
    f, g = _as_comb(f), _as_comb(g)
    if f.b != g.a:
        raise ShapeError(f"codomain {f.b} does not match domain {g.a}")
    out: dict[PlanarDiagram, LaurentPoly] = {}
    for df, cf in f.terms.items():
        for dg, cg in g.terms.items():
            d, loops = compose_diagrams(df, dg)
            c = cf * cg
            if loops:
                c = c * _loop_power(loops)
            prev = out.get(d)
            out[d] = c if prev is None else prev + c
    return DiagramCombination(f.a, g.b, out)


def tensor(*items):
    """Horizontal juxtaposition, left to right."""
    if any(isinstance(x, RationalCombination) for x in items):
        rs = [RationalCombination.coerce(x) for x in items]
        den = LaurentPoly.one()
        for r in rs:
            den = den * r.denominator
        return RationalCombination(tensor(*[r.numerator for r in rs]), den)
    combs = [_as_comb(x) for x in items]
    out = combs[0]
    for g in combs[1:]:
        terms: dict[PlanarDiagram, LaurentPoly] = {}
        for df, cf in out.terms.items():
            for dg, cg in g.terms.items():
                d = tensor_diagrams(df, dg)
                terms[d] = terms.get(d, LaurentPoly()) + cf * cg
        out = DiagramCombination(out.a + g.a, out.b + g.b, terms)
    return out


def _as_comb(x) -> DiagramCombination:
    if isinstance(x, DiagramCombination):
        return x
    if isinstance(x, PlanarDiagram):
        return DiagramCombination.from_diagram(x)
    raise TypeError(f"not a TL morphism: {x!r}")


class RationalCombination:
    """A TL morphism ``numerator / denominator`` with a common scalar denominator.

    Jones-Wenzl projectors live here: ``p_n = P_n / [n]!`` where ``P_n`` has
    Laurent-polynomial coefficients.
    """

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator: DiagramCombination, denominator=1):
        self.numerator = _as_comb(numerator)
        self.denominator = LaurentPoly.coerce(denominator)
        if self.denominator.is_zero():
            raise ZeroDivisionError("zero denominator")

    @classmethod
    def coerce(cls, x) -> "RationalCombination":
        return x if isinstance(x, RationalCombination) else cls(_as_comb(x))

    @property
    def a(self) -> int:
        return self.numerator.a

    @property
    def b(self) -> int:
        return self.numerator.b

    def coefficient(self, d: PlanarDiagram) -> QFraction:
        return QFraction(self.numerator.coefficient(d), self.denominator)

    def coefficients(self) -> dict[PlanarDiagram, QFraction]:
        return {d: QFraction(c, self.denominator) for d, c in self.numerator.sorted_terms()}

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def __add__(self, other) -> "RationalCombination":
        o = RationalCombination.coerce(other)
        return RationalCombination(self.numerator.scale(o.denominator) + o.numerator.scale(self.denominator),
                                   self.denominator * o.denominator)

    def __neg__(self) -> "RationalCombination":
        return RationalCombination(-self.numerator, self.denominator)

    def __sub__(self, other) -> "RationalCombination":
        return self + (-RationalCombination.coerce(other))

    def scale(self, c) -> "RationalCombination":
        c = QFraction.coerce(c)
        return RationalCombination(self.numerator.scale(c.num), self.denominator * c.den)

    __mul__ = scale
    __rmul__ = scale

    def __eq__(self, other) -> bool:
        try:
            o = RationalCombination.coerce(other)
        except TypeError:
            return NotImplemented
        return self.numerator.scale(o.denominator) == o.numerator.scale(self.denominator)

    __hash__ = None

    def __repr__(self) -> str:
        return f"RationalCombination({self.a}->{self.b}, {len(self.numerator.terms)} terms / {self.denominator})"


# elementary morphisms

def identity(n: int) -> DiagramCombination:
    return DiagramCombination.from_diagram(PlanarDiagram.build(n, n))


def U(i: int, n: int) -> DiagramCombination:
    """Cap-cup generator ``U_i`` on ``n`` strands, ``1 <= i <= n-1``."""
    if not 1 <= i <= n - 1:
        raise DomainError(f"U_{i} needs 1 <= i <= {n - 1}")
    return DiagramCombination.from_diagram(PlanarDiagram.build(n, n, caps=[(i - 1, i)], cups=[(i - 1, i)]))


def nested_caps(k: int) -> DiagramCombination:
    """``k`` nested caps ``2k -> 0`` (an evaluation map)."""
    return DiagramCombination.from_diagram(PlanarDiagram.build(2 * k, 0, caps=[(i, 2 * k - 1 - i) for i in range(k)]))


def nested_cups(k: int) -> DiagramCombination:
    """``k`` nested cups ``0 -> 2k`` (a coevaluation map)."""
    return DiagramCombination.from_diagram(PlanarDiagram.build(0, 2 * k, cups=[(i, 2 * k - 1 - i) for i in range(k)]))


def arc_middle(m: int, n: int, k: int) -> DiagramCombination:
    """``X_k`` on ``m+n`` strands: ``k`` nested caps over ``k`` nested cups
    straddling the boundary between the first ``m`` and last ``n`` strands."""
    if not 0 <= k <= min(m, n):
        raise DomainError(f"need 0 <= k <= min(m, n), got {k}")
    arcs = [(m - 1 - i, m + i) for i in range(k)]
    return DiagramCombination.from_diagram(PlanarDiagram.build(m + n, m + n, caps=arcs, cups=arcs))


# Jones-Wenzl projectors

@lru_cache(maxsize=None)
def _jw_scaled(n: int) -> DiagramCombination:
    if n == 0:
        return DiagramCombination.from_diagram(PlanarDiagram(0, 0, ()))
    if n == 1:
        return identity(1)
    prev = tensor(_jw_scaled(n - 1), identity(1))
    middle = compose(compose(prev, U(n - 1, n)), prev)
    try:
        middle = middle.exact_div(q_factorial(n - 2))
    except NotDivisible as exc:
        raise InvariantViolation(f"Wenzl recursion not divisible at n={n}") from exc
    return prev.scale(q_integer(n)) + middle


def jw_scaled(n: int) -> DiagramCombination:
    """Fraction-free projector ``[n]! p_n`` with Laurent-polynomial coefficients.

    Uses ``[n]! p_n = [n] ([n-1]! p_{n-1} (x) 1)
    + ([n-1]! p_{n-1} (x) 1) U_{n-1} ([n-1]! p_{n-1} (x) 1) / [n-2]!``
    where the division is exact.
    """
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    return _jw_scaled(n)


def jones_wenzl(n: int) -> RationalCombination:
    """Jones-Wenzl projector ``p_n`` as ``jw_scaled(n) / [n]!``.

    Raises
    ------
    DomainError
        If ``n <= 0``.
    """
    if n <= 0:
        raise DomainError(f"jones_wenzl needs n >= 1, got {n}")
    return RationalCombination(_jw_scaled(n), q_factorial(n))


def _jw_any(n: int) -> RationalCombination:
    return RationalCombination(_jw_scaled(n), q_factorial(n)) if n > 0 else RationalCombination(_jw_scaled(0))


def in_positive_cone(p: LaurentPoly, n: int) -> bool:
    """``p`` lies in ``q^{n(n-1)/2} N[q^{-1}]``."""
    if p.is_zero():
        return True
    return p.max_exponent <= n * (n - 1) // 2 and p.has_nonnegative_integer_coeffs()


def jw_positive_expansion(n: int) -> dict[PlanarDiagram, LaurentPoly]:
    """Coefficients ``P(d)`` of ``[n]! p_n`` in the diagram basis.

    Raises
    ------
    InvariantViolation
        If some coefficient is outside ``q^{n(n-1)/2} N[q^{-1}]``.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    out = dict(jw_scaled(n).sorted_terms())
    for d, c in out.items():
        if not in_positive_cone(c, n):
            raise InvariantViolation(f"coefficient {c} of {d} is not in q^{n * (n - 1) // 2} N[q^-1]")
    return out


# coefficient formulas

def jwfk_coefficient(m: int, n: int, k: int) -> QFraction:
    """``c_{m,n,k} = [m brack k][n brack k] / [m+n brack k]``."""
    return QFraction(q_binomial(m, k) * q_binomial(n, k), q_binomial(m + n, k))


def jwfk_decompose(m: int, n: int) -> list[tuple[int, QFraction]]:
    """Coefficients ``(k, c_{m,n,k})`` for ``k = 0..min(m, n)``."""
    if m < 0 or n < 0:
        raise DomainError("m, n must be nonnegative")
    return [(k, jwfk_coefficient(m, n, k)) for k in range(min(m, n) + 1)]


def jwfk_term(m: int, n: int, k: int) -> RationalCombination:
    """``(p_m (x) p_n) X_k (p_m (x) p_n)``, the ``k``-th diagram of the expansion."""
    side = tensor(_jw_any(m), _jw_any(n))
    return compose(compose(side, arc_middle(m, n, k)), side)


def jwfk_rhs(m: int, n: int) -> RationalCombination:
    """``sum_k c_{m,n,k} (p_m (x) p_n) X_k (p_m (x) p_n)`` as a diagram sum."""
    out = None
    for k, c in jwfk_decompose(m, n):
        t = jwfk_term(m, n, k).scale(c)
        out = t if out is None else out + t
    return out


def triangle_reduce(j: int, k: int, l: int) -> QFraction:
    """``[j+k]! [k+l]! / ([k]! [j+k+l]!)``, the factor removing the inner projector."""
    if min(j, k, l) < 0:
        raise DomainError("indices must be nonnegative")
    return QFraction(q_factorial(j + k) * q_factorial(k + l), q_factorial(k) * q_factorial(j + k + l))


def triangle_diagrams(j: int, k: int, l: int) -> tuple[RationalCombination, RationalCombination]:
    """Both sides of the triangle reduction as morphisms
    ``V(k+l) (x) V(j+l) -> V(j+k)``.

    The first has an inner ``p_{j+k+l}`` fed by all ``k+l`` strands of the
    left box and the first ``j`` strands of the right box, whose remaining
    ``l`` strands cap onto the last ``l`` outputs of the inner box.  The
    second joins the boxes directly by ``l`` nested arcs.
    """
    pa, pb, pc = _jw_any(j + k), _jw_any(k + l), _jw_any(j + l)
    inputs = tensor(pb, pc)
    inner = tensor(_jw_any(j + k + l), identity(l))
    close = tensor(identity(j + k), nested_caps(l))
    lhs = compose(compose(compose(inputs, inner), close), pa)
    join = tensor(identity(k), nested_caps(l), identity(j))
    rhs = compose(compose(inputs, join), pa)
    return lhs, rhs


def wenzl_form1(n: int) -> RationalCombination:
    """``p_{n-1} (x) 1 + ([n-1]/[n]) (p_{n-1} (x) 1) U_{n-1} (p_{n-1} (x) 1)``."""
    if n < 2:
        raise DomainError("Wenzl relation needs n >= 2")
    prev = tensor(_jw_any(n - 1), identity(1))
    mid = compose(compose(prev, U(n - 1, n)), prev)
    return prev + mid.scale(QFraction(q_integer(n - 1), q_integer(n)))


def wenzl_form2(n: int) -> RationalCombination:
    """Same relation with the middle term routed through ``n-2`` strands:
    ``(p_{n-1} (x) 1)(1^{n-2} (x) cup) o (1^{n-2} (x) cap)(p_{n-1} (x) 1)``."""
    if n < 2:
        raise DomainError("Wenzl relation needs n >= 2")
    prev = tensor(_jw_any(n - 1), identity(1))
    down = compose(prev, tensor(identity(n - 2), nested_caps(1)))
    up = compose(tensor(identity(n - 2), nested_cups(1)), prev)
    return prev + compose(down, up).scale(QFraction(q_integer(n - 1), q_integer(n)))


def single_clasp_sides(n: int) -> tuple[RationalCombination, RationalCombination]:
    """Both sides of the single clasp expansion as morphisms ``n+1 -> n-1``.

    Left: ``(1^{n-1} (x) cap)(p_n (x) 1)``.  Right:
    ``sum_k ([k]/[n]) p_{n-1} (1^{k-1} (x) cap (x) 1^{n-k})``.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    lhs = compose(tensor(_jw_any(n), identity(1)), tensor(identity(n - 1), nested_caps(1)))
    rhs = None
    for k in range(1, n + 1):
        cap = tensor(identity(k - 1), nested_caps(1), identity(n - k))
        t = compose(cap, _jw_any(n - 1)).scale(QFraction(q_integer(k), q_integer(n)))
        rhs = t if rhs is None else rhs + t
    return lhs, rhs


def absorption_sides(m: int, n: int) -> tuple[RationalCombination, RationalCombination, RationalCombination]:
    """``(p_m (x) 1^{n-m}) p_n``, ``p_n (p_m (x) 1^{n-m})`` and ``p_n``."""
    if not 1 <= m <= n:
        raise DomainError("need 1 <= m <= n")
    small = tensor(_jw_any(m), identity(n - m))
    pn = _jw_any(n)
    return compose(pn, small), compose(small, pn), pn
