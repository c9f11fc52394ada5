"""Exact arithmetic on Laurent polynomials in ``q`` and q-combinatorics.

Coefficients are :class:`gmpy2.mpq` rationals.  A polynomial is stored as
``min_exponent`` plus a tuple of coefficients with nonzero first and last
entries, so structural equality is mathematical equality.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Mapping, Union

from gmpy2 import mpq

from .errors import DomainError, NotDivisible

Scalar = Union[int, Fraction, "mpq"]

_MPQ_TYPE = type(mpq(0))


def to_mpq(x) -> "mpq":
    """Coerce an int, Fraction, mpq or ``"p/r"`` string to ``mpq``."""
    if isinstance(x, _MPQ_TYPE):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational scalar")
    if isinstance(x, (int, Fraction, Rational)):
        return mpq(x.numerator, x.denominator) if not isinstance(x, int) else mpq(x)
    if isinstance(x, str):
        return mpq(Fraction(x.strip()))
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def parse_q(text) -> "mpq":
    """Parse a positive exact rational such as ``"1/2"``.

    Raises
    ------
    DomainError
        If the value is not strictly positive or cannot be parsed.
    """
    try:
        val = to_mpq(text)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"not a rational number: {text!r}") from exc
    if val <= 0:
        raise DomainError(f"q must be positive, got {text!r}")
    return val


class LaurentPoly:
    """Immutable Laurent polynomial in ``q`` with exact rational coefficients.

    Parameters
    ----------
    min_exponent : int
        Exponent of the first stored coefficient.
    coefficients : iterable
        Coefficients of ``q**min_exponent``, ``q**(min_exponent+1)``, ...

    Examples
    --------
    >>> LaurentPoly(-1, [1, 0, 1])
    LaurentPoly(q^-1 + q)
    """

    __slots__ = ("min_exponent", "coefficients", "_hash")

    def __init__(self, min_exponent: int = 0, coefficients: Iterable = ()):
        coeffs = [to_mpq(c) for c in coefficients]
        lo, hi = 0, len(coeffs)
        while lo < hi and coeffs[lo] == 0:
            lo += 1
        while hi > lo and coeffs[hi - 1] == 0:
            hi -= 1
        if lo == hi:
            self.min_exponent = 0
            self.coefficients = ()
        else:
            self.min_exponent = int(min_exponent) + lo
            self.coefficients = tuple(coeffs[lo:hi])
        self._hash = None

    # construction helpers
    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls()

    @classmethod
    def one(cls) -> "LaurentPoly":
        return cls(0, [1])

    @classmethod
    def const(cls, c) -> "LaurentPoly":
        return cls(0, [c])

    @classmethod
    def monomial(cls, exponent: int, c=1) -> "LaurentPoly":
        return cls(exponent, [c])

    @classmethod
    def from_dict(cls, terms: Mapping[int, Scalar]) -> "LaurentPoly":
        """Build from ``{exponent: coefficient}``."""
        terms = {e: c for e, c in terms.items() if c != 0}
        if not terms:
            return cls()
        lo, hi = min(terms), max(terms)
        return cls(lo, [terms.get(e, 0) for e in range(lo, hi + 1)])

    @classmethod
    def coerce(cls, x) -> "LaurentPoly":
        return x if isinstance(x, LaurentPoly) else cls.const(x)

    # inspection
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def max_exponent(self) -> int:
        """Largest exponent present (``min_exponent - 1`` for zero)."""
        return self.min_exponent + len(self.coefficients) - 1

    def to_dict(self) -> dict[int, "mpq"]:
        return {self.min_exponent + i: c for i, c in enumerate(self.coefficients) if c != 0}

    def coeff(self, exponent: int) -> "mpq":
        i = exponent - self.min_exponent
        if 0 <= i < len(self.coefficients):
            return self.coefficients[i]
        return mpq(0)

    def is_constant(self) -> bool:
        return self.is_zero() or (self.min_exponent == 0 and len(self.coefficients) == 1)

    # arithmetic
    def __add__(self, other) -> "LaurentPoly":
        other = LaurentPoly.coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        lo = min(self.min_exponent, other.min_exponent)
        hi = max(self.max_exponent, other.max_exponent)
        out = [mpq(0)] * (hi - lo + 1)
        for i, c in enumerate(self.coefficients):
            out[self.min_exponent - lo + i] += c
        for i, c in enumerate(other.coefficients):
            out[other.min_exponent - lo + i] += c
        return LaurentPoly(lo, out)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.min_exponent, [-c for c in self.coefficients])

    def __sub__(self, other) -> "LaurentPoly":
        return self + (-LaurentPoly.coerce(other))

    def __rsub__(self, other) -> "LaurentPoly":
        return LaurentPoly.coerce(other) - self

    def __mul__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            try:
                c = to_mpq(other)
            except TypeError:
                return NotImplemented
            return LaurentPoly(self.min_exponent, [x * c for x in self.coefficients])
        if self.is_zero() or other.is_zero():
            return LaurentPoly()
        a, b = self.coefficients, other.coefficients
        out = [mpq(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] += x * y
        return LaurentPoly(self.min_exponent + other.min_exponent, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            if len(self.coefficients) == 1:
                return LaurentPoly(-self.min_exponent * (-n), [1 / self.coefficients[0] ** (-n)])
            raise NotDivisible("negative power of a non-monomial")
        out = LaurentPoly.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by ``q**k``."""
        if self.is_zero():
            return self
        return LaurentPoly(self.min_exponent + k, self.coefficients)

    def divmod(self, divisor: "LaurentPoly") -> tuple["LaurentPoly", "LaurentPoly"]:
        """Long division from the top degree down.

        Returns ``(quotient, remainder)``.  The remainder is zero exactly when
        ``divisor`` divides ``self`` in the Laurent ring, because ``q`` is a
        unit there.
        """
        divisor = LaurentPoly.coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return LaurentPoly(), LaurentPoly()
        rem = list(self.coefficients)
        rlo = self.min_exponent
        d = divisor.coefficients
        dlo, dlen = divisor.min_exponent, len(d)
        lead = d[-1]
        nq = len(rem) - dlen + 1
        if nq <= 0:
            return LaurentPoly(), self
        quot = [mpq(0)] * nq
        for i in range(nq - 1, -1, -1):
            c = rem[i + dlen - 1]
            if c == 0:
                continue
            f = c / lead
            quot[i] = f
            for j in range(dlen):
                rem[i + j] -= f * d[j]
        return LaurentPoly(rlo - dlo, quot), LaurentPoly(rlo, rem)

    def exact_div(self, divisor) -> "LaurentPoly":
        """Exact quotient; raises :class:`NotDivisible` on a nonzero remainder."""
        quot, rem = self.divmod(LaurentPoly.coerce(divisor))
        if not rem.is_zero():
            raise NotDivisible(f"{self} is not divisible by {divisor}")
        return quot

    def __floordiv__(self, other) -> "LaurentPoly":
        return self.exact_div(other)

    def __truediv__(self, other) -> "QFraction":
        return QFraction(self, other)

    def __rtruediv__(self, other) -> "QFraction":
        return QFraction(other, self)

    # evaluation and symmetry
    def specialize(self, q0, exact: bool | None = None):
        """Evaluate at ``q = q0`` (see :func:`specialize`)."""
        return specialize(self, q0, exact)

    def bar(self) -> "LaurentPoly":
        """Apply ``q -> q^{-1}``."""
        if self.is_zero():
            return self
        return LaurentPoly(-self.max_exponent, reversed(self.coefficients))

    def is_palindromic(self) -> bool:
        return self == self.bar()

    def has_nonnegative_integer_coeffs(self) -> bool:
        return all(c >= 0 and c.denominator == 1 for c in self.coefficients)

    # comparison and display
    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            try:
                other = LaurentPoly.const(to_mpq(other))
            except TypeError:
                return NotImplemented
        return self.min_exponent == other.min_exponent and self.coefficients == other.coefficients

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.min_exponent, self.coefficients))
        return self._hash

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for e, c in self.to_dict().items():
            if e == 0:
                mono = ""
            elif e == 1:
                mono = "q"
            else:
                mono = f"q^{e}"
            if mono and c == 1:
                term = mono
            elif mono and c == -1:
                term = "-" + mono
            elif mono:
                term = f"{c}*{mono}"
            else:
                term = str(c)
            parts.append(term)
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"


Q = LaurentPoly.monomial(1)


def _poly_gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Monic gcd of the ordinary polynomials underlying ``a`` and ``b``."""
    a = LaurentPoly(0, a.coefficients)
    b = LaurentPoly(0, b.coefficients)
    while not b.is_zero():
        _, r = a.divmod(b)
        a, b = b, LaurentPoly(0, r.coefficients)
    if a.is_zero():
        return LaurentPoly.one()
    return a * (1 / a.coefficients[-1])


class QFraction:
    """Ratio of two Laurent polynomials kept in lowest terms.

    Needed for quantities such as ``1/[2]`` that are not Laurent
    polynomials.  When the denominator is a monomial the value is a Laurent
    polynomial and :meth:`as_poly` returns it.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        num = LaurentPoly.coerce(num)
        den = LaurentPoly.coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            self.num, self.den = LaurentPoly(), LaurentPoly.one()
            return
        g = _poly_gcd(num, den)
        if not (len(g.coefficients) == 1):
            num = num.exact_div(g)
            den = den.exact_div(g)
        # normalise denominator to a monic ordinary polynomial with q^0 term
        shift = den.min_exponent
        lead = den.coefficients[-1]
        self.num = num.shift(-shift) * (1 / lead)
        self.den = den.shift(-shift) * (1 / lead)

    @classmethod
    def coerce(cls, x) -> "QFraction":
        return x if isinstance(x, QFraction) else cls(x)

    def is_poly(self) -> bool:
        return len(self.den.coefficients) == 1

    def as_poly(self) -> LaurentPoly:
        if not self.is_poly():
            raise NotDivisible(f"{self} is not a Laurent polynomial")
        return self.num

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other):
        o = QFraction.coerce(other)
        return QFraction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return QFraction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-QFraction.coerce(other))

    def __rsub__(self, other):
        return QFraction.coerce(other) - self

    def __mul__(self, other):
        o = QFraction.coerce(other)
        return QFraction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = QFraction.coerce(other)
        return QFraction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return QFraction.coerce(other) / self

    def __eq__(self, other):
        try:
            o = QFraction.coerce(other)
        except TypeError:
            return NotImplemented
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    def specialize(self, q0, exact: bool | None = None):
        d = specialize(self.den, q0, exact)
        if d == 0:
            raise ZeroDivisionError(f"denominator vanishes at q={q0}")
        return specialize(self.num, q0, exact) / d

    def bar(self) -> "QFraction":
        return QFraction(self.num.bar(), self.den.bar())

    def __str__(self):
        if self.is_poly():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"QFraction({self})"


def specialize(p, q0, exact: bool | None = None):
    """Evaluate a Laurent polynomial (or fraction) at ``q = q0``.

    Parameters
    ----------
    p : LaurentPoly or QFraction
    q0 : positive rational, ``"p/r"`` string, or positive float
    exact : bool, optional
        Force exact (``mpq``) or float evaluation.  By default the result is
        exact whenever ``q0`` is rational.

    Raises
    ------
    DomainError
        If ``q0 <= 0``.
    """
    if isinstance(p, QFraction):
        return p.specialize(q0, exact)
    if isinstance(q0, float):
        if not q0 > 0:
            raise DomainError(f"q must be positive, got {q0}")
        if exact:
            q0 = mpq(Fraction(q0))
    else:
        q0 = parse_q(q0)
        if exact is False:
            q0 = float(q0)
    if p.is_zero():
        return mpq(0) if not isinstance(q0, float) else 0.0
    # Horner on the ordinary polynomial, then the monomial shift.
    acc = q0 * 0
    for c in reversed(p.coefficients):
        acc = acc * q0 + (float(c) if isinstance(q0, float) else c)
    return acc * q0 ** p.min_exponent


@lru_cache(maxsize=None)
def q_integer(n: int) -> LaurentPoly:
    """Quantum integer ``[n] = q^{-n+1} + q^{-n+3} + ... + q^{n-1}``.

    Negative ``n`` follows ``[-n] = -[n]``; ``[0] = 0``.
    """
    if n < 0:
        return -q_integer(-n)
    if n == 0:
        return LaurentPoly()
    coeffs = [0] * (2 * n - 1)
    coeffs[::2] = [1] * n
    return LaurentPoly(-n + 1, coeffs)


@lru_cache(maxsize=None)
def q_factorial(n: int) -> LaurentPoly:
    """``[n]! = [1][2]...[n]`` with ``[0]! = 1``."""
    if n < 0:
        raise DomainError(f"q_factorial needs n >= 0, got {n}")
    if n == 0:
        return LaurentPoly.one()
    return q_factorial(n - 1) * q_integer(n)


@lru_cache(maxsize=None)
def q_binomial(n: int, k: int) -> LaurentPoly:
    """Gaussian binomial ``[n]!/([k]![n-k]!)`` by exact division.

    Zero when ``k < 0`` or ``k > n``.
    """
    if k < 0 or n < 0 or k > n:
        return LaurentPoly()
    return q_factorial(n).exact_div(q_factorial(k) * q_factorial(n - k))


def laurent_arith(a: LaurentPoly, b: LaurentPoly, op: str) -> LaurentPoly:
    """Dispatch ``add``, ``mul`` or ``exact_div`` on two polynomials."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "exact_div":
        return a.exact_div(b)
    raise DomainError(f"unknown operation {op!r}")
