"""Urn-mixing Markov chain: generators per red-ball sector and their spectral gaps."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb, prod
from typing import Sequence

import numpy as np
from gmpy2 import mpq

from .errors import DomainError
from .sparse import SparseOperator
from .spectra import jacobi_eigenvalues


def hypergeometric_rho(n: int, k: int) -> list[mpq]:
    """``rho_k(j) = C(k, j) C(n, k - j) / C(n + k, k)`` for ``j = 0..n``.

    Raises
    ------
    DomainError
        Unless ``0 <= k <= n``.

    Examples
    --------
    >>> [str(x) for x in hypergeometric_rho(2, 1)]
    ['2/3', '1/3', '0']
    """
    if not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n, got n={n}, k={k}")
    total = comb(n + k, k)
    return [mpq(comb(k, j) * comb(n, k - j), total) if j <= k else mpq(0) for j in range(n + 1)]


def _frac(x) -> mpq:
    return mpq(Fraction(str(x)))


@dataclass
class UrnModel:
    """``L`` urns of ``n`` balls with one rate and one exchange law per bond.

    ``mixing`` entries are dicts, either
    ``{"type": "hypergeometric_mixture", "weights": [w_0..w_n]}`` or
    ``{"type": "explicit", "probs": [p_0..p_n]}``.  A single entry is used
    for every bond.
    """

    L: int
    n: int
    rates: list
    mixing: list

    def __post_init__(self):
        if self.L < 1 or self.n < 1:
            raise DomainError("need L >= 1 and n >= 1")
        bonds = self.L - 1
        self.rates = [_frac(r) for r in self.rates]
        if len(self.rates) == 1 and bonds > 1:
            self.rates = self.rates * bonds
        if len(self.rates) != bonds or any(r < 0 for r in self.rates):
            raise DomainError(f"need {bonds} nonnegative rates")
        mixing = list(self.mixing)
        if len(mixing) == 1 and bonds > 1:
            mixing = mixing * bonds
        if len(mixing) != bonds:
            raise DomainError(f"need {bonds} mixing laws")
        self.mixing = [dict(m) for m in mixing]
        self._laws = [self._law(m) for m in self.mixing]

    def _law(self, m: dict) -> list[mpq]:
        kind = m.get("type")
        if kind == "hypergeometric_mixture":
            w = [_frac(x) for x in m["weights"]]
            if len(w) != self.n + 1 or any(x < 0 for x in w) or sum(w) != 1:
                raise DomainError("mixture weights must be n+1 nonnegative numbers summing to 1")
            law = [mpq(0)] * (self.n + 1)
            for k, wk in enumerate(w):
                for j, p in enumerate(hypergeometric_rho(self.n, k)):
                    law[j] += wk * p
            return law
        if kind == "explicit":
            p = [_frac(x) for x in m["probs"]]
            if len(p) != self.n + 1 or any(x < 0 for x in p) or sum(p) != 1:
                raise DomainError("explicit law must be n+1 nonnegative numbers summing to 1")
            return p
        raise DomainError(f"unknown mixing type {kind!r}")

    @property
    def laws(self) -> list[list[mpq]]:
        """Exchange-size distribution of each bond."""
        return self._laws

    @property
    def hypergeometric(self) -> bool:
        return all(m.get("type") == "hypergeometric_mixture" for m in self.mixing)

    def to_json(self) -> str:
        def out(x):
            return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"

        mixing = []
        for m in self.mixing:
            key = "weights" if m["type"] == "hypergeometric_mixture" else "probs"
            mixing.append({"type": m["type"], key: [out(_frac(x)) for x in m[key]]})
        return json.dumps({"L": self.L, "n": self.n, "rates": [out(r) for r in self.rates], "mixing": mixing})

    @classmethod
    def from_json(cls, text: str) -> "UrnModel":
        """Parse the JSON model format; malformed input raises :class:`DomainError`."""
        try:
            d = json.loads(text)
            return cls(int(d["L"]), int(d["n"]), list(d["rates"]), list(d["mixing"]))
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise DomainError(f"malformed urn model: {exc}") from exc


def configurations(L: int, n: int, red_total: int) -> list[tuple[int, ...]]:
    """All ``(k_1..k_L)`` with ``0 <= k_x <= n`` and ``sum k_x = red_total``, lexicographic."""
    return [c for c in itertools.product(range(n + 1), repeat=L) if sum(c) == red_total]


def _draw(n: int, red: int, size: int) -> list[tuple[int, mpq]]:
    """Red count among ``size`` balls drawn uniformly from an urn with ``red`` red of ``n``."""
    total = comb(n, size)
    return [(r, mpq(comb(red, r) * comb(n - red, size - r), total))
            for r in range(size + 1) if comb(red, r) and comb(n - red, size - r)]


def build_urn_generator(model: UrnModel, red_total: int) -> SparseOperator:
    """Exact generator on configurations with ``red_total`` red balls.

    Each bond ``(x, x+1)`` fires at its rate; the exchange size ``N`` follows
    the bond's law, ``N`` balls are drawn uniformly from each urn and the two
    groups are swapped.  Rows sum to 0; row and column labels are the
    configurations.

    Raises
    ------
    DomainError
        Unless ``0 <= red_total <= n L``.
    """
    L, n = model.L, model.n
    if not 0 <= red_total <= n * L:
        raise DomainError(f"need 0 <= red_total <= {n * L}")
    states = configurations(L, n, red_total)
    index = {s: i for i, s in enumerate(states)}
    rows: dict[int, dict[int, object]] = {}
    for i, s in enumerate(states):
        row: dict[int, object] = {}
        for x in range(L - 1):
            lam = model.rates[x]
            if lam == 0:
                continue
            for N, pN in enumerate(model.laws[x]):
                if pN == 0:
                    continue
                for r1, p1 in _draw(n, s[x], N):
                    for r2, p2 in _draw(n, s[x + 1], N):
                        t = list(s)
                        t[x] += r2 - r1
                        t[x + 1] += r1 - r2
                        j = index[tuple(t)]
                        if j != i:
                            rate = lam * pN * p1 * p2
                            row[j] = row.get(j, 0) + rate
                            row[i] = row.get(i, 0) - rate
        rows[i] = row
    return SparseOperator((len(states), len(states)), rows, states, states)


def stationary_weights(model: UrnModel, red_total: int) -> list[mpq]:
    """``pi(k) = prod_x C(n, k_x)``, unnormalised; the chain is reversible for it."""
    return [mpq(prod(comb(model.n, k) for k in s)) for s in configurations(model.L, model.n, red_total)]


def detailed_balance_holds(model: UrnModel, red_total: int) -> bool:
    """Exact check of ``pi(a) Q(a, b) = pi(b) Q(b, a)``."""
    Q = build_urn_generator(model, red_total)
    pi = stationary_weights(model, red_total)
    return all(pi[i] * v == pi[j] * Q[j, i] for i, j, v in Q.entries())


def symmetrized_generator(model: UrnModel, red_total: int) -> np.ndarray:
    """``D^{1/2} Q D^{-1/2}`` with ``D = diag(pi)``: symmetric, same spectrum as ``Q``."""
    Q = build_urn_generator(model, red_total).to_dense(float)
    d = np.sqrt(np.array([float(p) for p in stationary_weights(model, red_total)]))
    S = Q * d[:, None] / d[None, :]
    return 0.5 * (S + S.T)


def sector_gap(model: UrnModel, red_total: int) -> float:
    """Smallest nonzero eigenvalue of ``-Q`` on the sector (second smallest overall).

    Returns 0 for one-state sectors and for chains that do not mix.
    """
    S = symmetrized_generator(model, red_total)
    if S.shape[0] < 2:
        return 0.0
    ev = jacobi_eigenvalues(-S)
    return float(ev[1])


def sector_gaps(model: UrnModel) -> list[tuple[int, float]]:
    """``(k, gamma_k)`` for ``k = 1 .. nL - 1``."""
    return [(k, sector_gap(model, k)) for k in range(1, model.n * model.L)]


def gap_spread(gaps: Sequence[tuple[int, float]]) -> float:
    vals = [g for _, g in gaps]
    return max(vals) - min(vals) if vals else 0.0
