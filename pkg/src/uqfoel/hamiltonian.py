"""Cascade operators, chain Hamiltonians in the dual canonical basis, structural checks."""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from gmpy2 import mpq
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DomainError, InvariantViolation, ResourceError
from .qalg import LaurentPoly, QFraction, parse_q, q_binomial, q_factorial, specialize, to_mpq
from .repspaces import (
    DualCanonicalVector, SpanSolver, _q, dcb_basis, represent, site_apply, site_generator,
    site_index, site_states, symmetrizer, weight_space_dcb, inv_minus, state_from_index, DOWN,
)
from .sparse import SparseOperator
from .tl import arc_middle

FULL_TENSOR_CAP = 14


def _fmt_q(q0) -> str:
    q0 = to_mpq(q0)
    return f"{q0.numerator}/{q0.denominator}" if q0.denominator != 1 else str(q0.numerator)


@dataclass
class ChainSpec:
    """Open chain ``V(n_1) (x) ... (x) V(n_L)`` with cascade couplings.

    Parameters
    ----------
    site_weights : sequence of int
        ``n_i = 2 s_i``, all positive.
    couplings : sequence of sequence
        ``couplings[i][k] = J_k^{(i)}`` for bond ``(i, i+1)`` and
        ``0 <= k <= min(n_i, n_{i+1})``; shorter lists are zero padded.
    q0 : positive rational (or ``"p/r"`` string)
    """

    site_weights: tuple[int, ...]
    couplings: list[list]
    q0: object = field(default_factory=lambda: mpq(1))

    def __post_init__(self):
        self.site_weights = tuple(int(n) for n in self.site_weights)
        if not self.site_weights or any(n <= 0 for n in self.site_weights):
            raise DomainError("site weights must be positive integers")
        self.q0 = parse_q(self.q0)
        L = len(self.site_weights)
        if len(self.couplings) != L - 1:
            raise DomainError(f"expected {L - 1} coupling lists, got {len(self.couplings)}")
        out = []
        for i, row in enumerate(self.couplings):
            kmax = min(self.site_weights[i], self.site_weights[i + 1])
            row = [to_mpq(x) for x in row]
            if len(row) > kmax + 1:
                if any(x != 0 for x in row[kmax + 1:]):
                    raise DomainError(f"bond {i}: coupling index exceeds min(n_i, n_i+1) = {kmax}")
                row = row[:kmax + 1]
            out.append(row + [mpq(0)] * (kmax + 1 - len(row)))
        self.couplings = out

    @property
    def L(self) -> int:
        return len(self.site_weights)

    @property
    def N(self) -> int:
        return sum(self.site_weights)

    @property
    def foel_cone(self) -> bool:
        """All ``J_k^{(i)} <= 0`` for ``k >= 1``."""
        return all(J <= 0 for row in self.couplings for J in row[1:])

    @property
    def nondegenerate(self) -> bool:
        """Every bond has some nonzero ``J_k`` with ``k >= 1``."""
        return all(any(J != 0 for J in row[1:]) for row in self.couplings)

    def with_q(self, q0) -> "ChainSpec":
        return ChainSpec(self.site_weights, [list(r) for r in self.couplings], q0)

    def to_json(self) -> str:
        return json.dumps({
            "weights": list(self.site_weights),
            "couplings": [[_fmt_q(x) if x.denominator != 1 else int(x) for x in row] for row in self.couplings],
            "q": _fmt_q(self.q0),
        })

    @classmethod
    def from_json(cls, text: str) -> "ChainSpec":
        """Parse ``{"weights": [...], "couplings": [[...], ...], "q": "p/r"}``.

        Raises
        ------
        DomainError
            On malformed content.
        """
        try:
            d = json.loads(text)
            weights = d["weights"]
            couplings = [[Fraction(str(x)) for x in row] for row in d["couplings"]]
            q = str(d.get("q", "1"))
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise DomainError(f"malformed chain spec: {exc}") from exc
        return cls(weights, couplings, q)


def random_cone_spec(rng: random.Random, max_total: int = 10, max_weight: int = 3,
                     max_sites: int = 5, q0="1") -> ChainSpec:
    """Random spec in the cone ``J_k <= 0`` (``k >= 1``) with every bond nondegenerate.

    Some couplings are zero on purpose; ``J_0`` is an arbitrary rational.
    """
    while True:
        L = rng.randint(2, max_sites)
        weights = [rng.randint(1, max_weight) for _ in range(L)]
        if sum(weights) <= max_total:
            break
    couplings = []
    for i in range(L - 1):
        kmax = min(weights[i], weights[i + 1])
        row = [Fraction(rng.randint(-3, 3), rng.randint(1, 3))]
        for _ in range(kmax):
            row.append(Fraction(0) if rng.random() < 0.3 else -Fraction(rng.randint(1, 6), rng.randint(1, 4)))
        if all(x == 0 for x in row[1:]):
            row[rng.randint(1, kmax)] = Fraction(-1)
        couplings.append(row)
    return ChainSpec(weights, couplings, q0)


# cascade operators

def _transfer(m: int, n: int, k: int, q0) -> SparseOperator:
    """``U = (T_{m+k} (x) T_{n-k})(T_m* (x) T_n*)`` on site bases."""
    Tm, Tn = symmetrizer(m, "inject", q0), symmetrizer(n, "inject", q0)
    a, c = m + k, n - k
    rows: dict[int, dict[int, object]] = {}
    colsm = Tm.transpose().rows
    colsn = Tn.transpose().rows
    for b1 in range(m + 1):
        for b2 in range(n + 1):
            col = b1 * (n + 1) + b2
            for i1, x1 in colsm.get(b1, {}).items():
                s1 = state_from_index(i1, m)
                for i2, x2 in colsn.get(b2, {}).items():
                    s = s1 + state_from_index(i2, n)
                    left, right = s[:a], s[a:]
                    w = x1 * x2 * q0 ** (inv_minus(left) + inv_minus(right))
                    row = left.count(DOWN) * (c + 1) + right.count(DOWN)
                    r = rows.setdefault(row, {})
                    r[col] = r.get(col, 0) + w
    return SparseOperator(((a + 1) * (c + 1), (m + 1) * (n + 1)), rows)


@lru_cache(maxsize=None, typed=True)
def _cascade(m: int, n: int, k: int, q0) -> SparseOperator:
    forward = _transfer(m, n, k, q0)
    back = _transfer(m + k, n - k, -k, q0)
    labels = [(b1, b2) for b1 in range(m + 1) for b2 in range(n + 1)]
    return (back @ forward).with_labels(labels, labels)


def cascade_operator(m: int, n: int, k: int, q0) -> SparseOperator:
    """``K_{m,n}(k) = U* U`` on ``V(m) (x) V(n)`` in the basis ``(b_1, b_2)``.

    ``U = (T_{m+k} (x) T_{n-k})(T_m* (x) T_n*)`` moves ``k`` strands from the
    right site to the left one (``k < 0`` moves them the other way).  The
    matrix is self-adjoint for the metric ``diag(q^{-ab}/[n brack b])`` on
    each site; it is symmetric in the lifted form :func:`cascade_lifted`.

    Raises
    ------
    DomainError
        If ``k`` lies outside ``-m..n``.
    """
    if m < 0 or n < 0 or not -m <= k <= n:
        raise DomainError(f"K_{{{m},{n}}}({k}) needs -m <= k <= n")
    return _cascade(m, n, k, _q(q0))


def cascade_lifted(m: int, n: int, k: int, q0) -> SparseOperator:
    """``(p_m (x) p_n)(p_{m+k} (x) p_{n-k})(p_m (x) p_n)`` on ``V(1)^{(x)(m+n)}``.

    Symmetric and positive semidefinite; equals ``(T_m* (x) T_n*) K (T_m (x) T_n)``.
    """
    q0 = _q(q0)
    inj = symmetrizer(m, "inject", q0).kron(symmetrizer(n, "inject", q0))
    proj = symmetrizer(m, "project", q0).kron(symmetrizer(n, "project", q0))
    return inj @ cascade_operator(m, n, k, q0) @ proj


def site_metric(weights: Sequence[int], q0) -> list:
    """Diagonal ``G`` with ``T T^t = G`` on each site, tensored over sites.

    ``G(b) = q^{ab} [n brack b]``; the inner product ``x^t G^{-1} y`` makes
    every ``K_{m,n}(k)`` self-adjoint.
    """
    q0 = _q(q0)
    out = []
    for t in site_states(weights):
        g = mpq(1) if not isinstance(q0, float) else 1.0
        for n, b in zip(weights, t):
            g = g * q0 ** ((n - b) * b) * specialize(q_binomial(n, b), q0)
        out.append(g)
    return out


def cascade_psd_certificate(m: int, n: int, k: int, q0) -> bool:
    """Exact positive-semidefiniteness witness.

    Checks ``G^{-1} K = U^t G'^{-1} U`` with positive diagonal ``G, G'``, which
    exhibits the metric form of ``K`` as a Gram matrix.
    """
    q0 = _q(q0)
    K = cascade_operator(m, n, k, q0)
    U = _transfer(m, n, k, q0)
    G = site_metric((m, n), q0)
    Gp = site_metric((m + k, n - k), q0)
    lhs = SparseOperator(K.shape, {i: {j: v / G[i] for j, v in r.items()} for i, r in K.rows.items()})
    UGi = SparseOperator(U.shape, {i: {j: v / Gp[i] for j, v in r.items()} for i, r in U.rows.items()})
    return lhs == U.transpose() @ UGi and all(g > 0 for g in G + Gp)


def tl_basis_element(m: int, n: int, l: int, q0) -> SparseOperator:
    """``(T_m (x) T_n) X_l (T_m* (x) T_n*)``, the ``l``-arc Temperley-Lieb basis element."""
    q0 = _q(q0)
    inj = symmetrizer(m, "inject", q0).kron(symmetrizer(n, "inject", q0))
    proj = symmetrizer(m, "project", q0).kron(symmetrizer(n, "project", q0))
    return proj @ represent(arc_middle(m, n, l), q0) @ inj


def cascade_to_tl_coeffs(m: int, n: int, k: int) -> list[tuple[int, QFraction]]:
    """Coefficients ``[m brack l][k brack l] / [m+k brack l]`` expressing
    ``K_{m,n}(k)`` in the Temperley-Lieb basis, ``l = 0..min(m, k)``.

    Raises
    ------
    DomainError
        If ``k`` lies outside ``0..min(m, n)``.
    """
    if not 0 <= k <= min(m, n):
        raise DomainError(f"need 0 <= k <= min(m, n), got {k}")
    return [(l, QFraction(q_binomial(m, l) * q_binomial(k, l), q_binomial(m + k, l)))
            for l in range(min(m, k) + 1)]


def change_of_basis_matrix(m: int, n: int) -> list[list[QFraction]]:
    """Rows ``k``, columns ``l``: the coefficient of TL element ``l`` in ``K_{m,n}(k)``."""
    size = min(m, n) + 1
    out = [[QFraction(0) for _ in range(size)] for _ in range(size)]
    for k in range(size):
        for l, c in cascade_to_tl_coeffs(m, n, k):
            out[k][l] = c
    return out


def q_matrix_elements(n_i: int, n_next: int, j: int, k: int, l: int) -> QFraction:
    """Coefficient ``Q_{jkl}`` of the two-site expansion of a cascade term.

    ``[n_i]![k]![n'-j]![n'-k]![n_i+k-j-l]!`` over
    ``[n']![l]![n_i+k]![k-l]![n'-j-k]![n_i-j-l]!`` (``n' = n_{i+1}``) when
    ``k >= l``, ``n'-j >= k`` and ``n_i-j >= l``; zero otherwise.  The
    larger weight is taken as ``n_i``.
    """
    if min(n_i, n_next, j, k, l) < 0:
        raise DomainError("indices must be nonnegative")
    if n_i < n_next:
        n_i, n_next = n_next, n_i
    if not (k >= l and n_next - j >= k and n_i - j >= l):
        return QFraction(0)
    f = q_factorial
    num = f(n_i) * f(k) * f(n_next - j) * f(n_next - k) * f(n_i + k - j - l)
    den = f(n_next) * f(l) * f(n_i + k) * f(k - l) * f(n_next - j - k) * f(n_i - j - l)
    return QFraction(num, den)


# Hamiltonian assembly

def _local_terms(spec: ChainSpec) -> list[SparseOperator]:
    out = []
    w = spec.site_weights
    for i, row in enumerate(spec.couplings):
        m, n = w[i], w[i + 1]
        acc = SparseOperator(((m + 1) * (n + 1), (m + 1) * (n + 1)))
        for k, J in enumerate(row):
            if J != 0:
                acc = acc + cascade_operator(m, n, k, spec.q0).scale(J)
        out.append(acc)
    return out


def hamiltonian_apply(spec: ChainSpec, vec: dict, local: list[SparseOperator] | None = None) -> dict:
    """Apply ``H`` to a sparse site vector ``{(b_1..b_L): coeff}``."""
    local = local if local is not None else _local_terms(spec)
    w = spec.site_weights
    out: dict[tuple, object] = {}
    for i, op in enumerate(local):
        if op.is_zero():
            continue
        n2 = w[i + 1] + 1
        cols = op.transpose().rows
        for t, x in vec.items():
            col = t[i] * n2 + t[i + 1]
            for row, a in cols.get(col, {}).items():
                u = t[:i] + (row // n2, row % n2) + t[i + 2:]
                out[u] = out.get(u, 0) + a * x
    return {t: v for t, v in out.items() if v != 0}


def _parse_representation(rep):
    if isinstance(rep, tuple):
        return rep
    if rep in ("full", "full_tensor"):
        return ("full_tensor",)
    m = re.fullmatch(r"\s*(hw_sector|weight_space|weight)\s*\(\s*(\d+)\s*\)\s*", str(rep))
    if not m:
        raise DomainError(f"unknown representation {rep!r}")
    return ("weight_space" if m.group(1).startswith("weight") else "hw_sector", int(m.group(2)))


def sector_basis(spec: ChainSpec, representation) -> list[DualCanonicalVector]:
    kind, *args = _parse_representation(representation)
    N = spec.N
    if kind == "hw_sector":
        k = args[0]
        if not 0 <= 2 * k <= N:
            raise DomainError(f"sector k={k} needs 0 <= 2k <= {N}")
        return dcb_basis(spec.site_weights, k, spec.q0)
    if kind == "weight_space":
        b = args[0]
        if not 0 <= b <= N:
            raise DomainError(f"weight space b={b} needs 0 <= b <= {N}")
        return weight_space_dcb(spec.site_weights, b, spec.q0)
    raise DomainError(f"no DCB for representation {representation!r}")


def build_hamiltonian(spec: ChainSpec, representation="full_tensor", cap: int = FULL_TENSOR_CAP) -> SparseOperator:
    """Assemble ``H = sum_i sum_k J_k^{(i)} K_{n_i, n_{i+1}}(k)``.

    Parameters
    ----------
    spec : ChainSpec
    representation : str or tuple
        ``"full_tensor"`` gives the matrix on the site space
        ``V(n_1) (x) ... (x) V(n_L)``.  ``"hw_sector(k)"`` or
        ``("hw_sector", k)`` gives the matrix in the dual canonical basis of
        the highest-weight space of weight ``sum(n_i) - 2k``.
        ``("weight_space", b)`` uses the dual canonical basis of the whole
        weight space with ``b`` down arrows.
    cap : int
        Largest ``sum(n_i)`` accepted in full-tensor mode.

    Raises
    ------
    ResourceError
        If ``sum(n_i)`` exceeds ``cap`` in full-tensor mode.
    DomainError
        For an invalid sector.
    """
    kind, *args = _parse_representation(representation)
    local = _local_terms(spec)
    if kind == "full_tensor":
        if spec.N > cap:
            raise ResourceError(f"sum of weights {spec.N} exceeds the full-tensor cap {cap}")
        states = site_states(spec.site_weights)
        rows: dict[int, dict[int, object]] = {}
        for j, t in enumerate(states):
            for u, v in hamiltonian_apply(spec, {t: mpq(1)}, local).items():
                rows.setdefault(site_index(u, spec.site_weights), {})[j] = v
        return SparseOperator((len(states), len(states)), rows, states, states)
    basis = sector_basis(spec, representation)
    solver = SpanSolver([v.site_coordinates(spec.q0) for v in basis])
    rows = {}
    for j, v in enumerate(basis):
        img = hamiltonian_apply(spec, v.site_coordinates(spec.q0), local)
        for i, c in enumerate(solver.solve(img)):
            if c != 0:
                rows.setdefault(i, {})[j] = c
    return SparseOperator((len(basis), len(basis)), rows, basis, basis)


def commutator_residuals(spec: ChainSpec) -> dict[str, SparseOperator]:
    """``[H, E]``, ``[H, F]``, ``[H, K]`` on the full site space (exact)."""
    H = build_hamiltonian(spec, "full_tensor")
    out = {}
    for g in "EFK":
        X = site_generator(g, spec.site_weights, spec.q0)
        out[g] = H @ X - X @ H
    return out


def sector_gram(spec: ChainSpec, basis: Sequence[DualCanonicalVector]) -> list[list]:
    """Gram matrix ``V^t G^{-1} V`` of DCB vectors in the invariant metric."""
    w = spec.site_weights
    G = site_metric(w, spec.q0)
    coords = [v.site_coordinates(spec.q0) for v in basis]
    n = len(basis)
    out = [[mpq(0)] * n for _ in range(n)]
    for a in range(n):
        for b in range(a, n):
            s = mpq(0)
            ca, cb = coords[a], coords[b]
            if len(cb) < len(ca):
                ca, cb = cb, ca
            for t, x in ca.items():
                y = cb.get(t)
                if y is not None:
                    s += x * y / G[site_index(t, w)]
            out[a][b] = out[b][a] = s
    return out


def sector_metric_form(spec: ChainSpec, basis: Sequence[DualCanonicalVector]) -> list[list]:
    """``V^t G^{-1} H V``: symmetric because ``H`` is self-adjoint for the metric."""
    w = spec.site_weights
    G = site_metric(w, spec.q0)
    local = _local_terms(spec)
    coords = [v.site_coordinates(spec.q0) for v in basis]
    images = [hamiltonian_apply(spec, c, local) for c in coords]
    n = len(basis)
    out = [[mpq(0)] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            s = mpq(0)
            for t, x in coords[a].items():
                y = images[b].get(t)
                if y is not None:
                    s += x * y / G[site_index(t, w)]
            out[a][b] = s
    return out


# structural checks

@dataclass
class StructuralReport:
    offdiag_nonpositive: bool
    positive_offdiag: list = field(default_factory=list)
    irreducible: bool = True
    components: int = 1
    arc_nondecreasing: bool = True
    arc_violations: list = field(default_factory=list)
    dimension: int = 0

    def as_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "offdiag_nonpositive": self.offdiag_nonpositive,
            "positive_offdiag": [(i, j, str(v)) for i, j, v in self.positive_offdiag],
            "irreducible": self.irreducible,
            "components": self.components,
            "arc_nondecreasing": self.arc_nondecreasing,
            "arc_violations": self.arc_violations,
        }


def support_components(H: SparseOperator) -> tuple[int, np.ndarray]:
    """Strongly connected components of the off-diagonal support graph."""
    n = H.shape[0]
    if n == 0:
        return 0, np.zeros(0, dtype=int)
    r, c = [], []
    for i, j, _ in H.entries():
        if i != j:
            r.append(i)
            c.append(j)
    g = csr_matrix((np.ones(len(r)), (r, c)), shape=(n, n))
    return connected_components(g, directed=True, connection="strong")


def structural_checks(H: SparseOperator, spec: ChainSpec | None = None) -> StructuralReport:
    """Sign, connectivity and block-triangularity tests on a DCB matrix.

    The off-diagonal support of ``H`` equals that of ``t - H`` for any ``t``,
    so irreducibility is strong connectivity of that support graph.  The arc
    test reads the cap count from the basis labels and needs
    :class:`DualCanonicalVector` labels.
    """
    pos = [(i, j, v) for i, j, v in H.entries() if i != j and v > 0]
    ncomp, _ = support_components(H)
    report = StructuralReport(
        offdiag_nonpositive=not pos, positive_offdiag=pos,
        irreducible=H.shape[0] <= 1 or ncomp == 1, components=int(ncomp), dimension=H.shape[0],
    )
    labels = H.row_labels
    if labels and isinstance(labels[0], DualCanonicalVector):
        for i, j, v in H.entries():
            if labels[i].cap.k < labels[j].cap.k:
                report.arc_violations.append((i, j))
        report.arc_nondecreasing = not report.arc_violations
    return report


def check_q_expansion(n_i: int, n_next: int, j: int, k: int, q0) -> bool:
    """Verify the two-site expansion defining ``Q_{jkl}`` as tensor matrices.

    Left side: ``(p_{n_i-j} (x) p_{n'-j})(1 (x) cap_j (x) 1)`` applied after the
    lifted ``K_{n_i,n'}(k)``.  Right side: ``sum_l Q_{jkl}`` times
    ``(p_{n_i-j} (x) p_{n'-j})(1 (x) cup_l (x) 1)(1 (x) cap_{j+l} (x) 1)(p_{n_i} (x) p_{n'})``.
    """
    from .repspaces import jw_matrix
    from .tl import identity, nested_caps, nested_cups, tensor

    q0 = _q(q0)
    if n_i < n_next:
        n_i, n_next = n_next, n_i
    top = jw_matrix(n_i - j, q0).kron(jw_matrix(n_next - j, q0))
    bottom = jw_matrix(n_i, q0).kron(jw_matrix(n_next, q0))
    capj = represent(tensor(identity(n_i - j), nested_caps(j), identity(n_next - j)), q0)
    lhs = top @ capj @ cascade_lifted(n_i, n_next, k, q0)
    rhs = SparseOperator(lhs.shape)
    for l in range(0, k + 1):
        c = specialize(q_matrix_elements(n_i, n_next, j, k, l), q0)
        if c == 0:
            continue
        if n_i - j - l < 0 or n_next - j - l < 0:
            continue
        cup = represent(tensor(identity(n_i - j - l), nested_cups(l), identity(n_next - j - l)), q0)
        cap = represent(tensor(identity(n_i - j - l), nested_caps(j + l), identity(n_next - j - l)), q0)
        rhs = rhs + (top @ cup @ cap @ bottom).scale(c)
    return lhs == rhs
