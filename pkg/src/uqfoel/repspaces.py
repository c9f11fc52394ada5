"""Matrix realisations: V(1)^{(x)N}, symmetrizers, site spaces and the dual canonical basis.

Tensor states are tuples of ``+1`` (up) and ``-1`` (down); the index of a
state reads it as a binary number with up = 0 and the first factor most
significant, so ``(+1, +1)`` is index 0.  A site space ``V(n)`` has basis
``v^n, v^{n-2}, ..., v^{-n}`` indexed by the number ``b`` of down arrows.

The Hopf structure is ``D(E) = E(x)K + 1(x)E``, ``D(F) = F(x)1 + K^-1(x)F``,
``D(K) = K(x)K``; the cup is ``delta(1) = up(x)down - q^-1 down(x)up`` and the
cap is ``eps(up,down) = -q``, ``eps(down,up) = 1``.  Then ``eps o delta = -[2]``
and both maps intertwine.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product
from math import comb
from typing import Iterable, Sequence

from gmpy2 import mpq

from .errors import DomainError, InvariantViolation
from .qalg import LaurentPoly, parse_q, q_binomial, q_integer, specialize
from .sparse import SparseOperator
from .tl import DiagramCombination, PlanarDiagram, RationalCombination, _as_comb

UP, DOWN = 1, -1


# tensor states

@dataclass(frozen=True)
class TensorState:
    """A basis vector ``v^{s_1} (x) ... (x) v^{s_N}`` of ``V(1)^{(x)N}``."""

    arrows: tuple[int, ...]

    @property
    def weight(self) -> int:
        return sum(self.arrows)

    @property
    def index(self) -> int:
        return state_index(self.arrows)

    @classmethod
    def from_index(cls, i: int, N: int) -> "TensorState":
        return cls(state_from_index(i, N))


def state_index(s: Sequence[int]) -> int:
    i = 0
    for x in s:
        i = (i << 1) | (x == DOWN)
    return i


def state_from_index(i: int, N: int) -> tuple[int, ...]:
    return tuple(DOWN if (i >> (N - 1 - p)) & 1 else UP for p in range(N))


def inv_minus(s: Sequence[int]) -> int:
    """``#{i < j : s_i = down, s_j = up}``."""
    downs = 0
    out = 0
    for x in s:
        if x == DOWN:
            downs += 1
        else:
            out += downs
    return out


def _q(q0):
    return parse_q(q0) if not isinstance(q0, float) else q0


def qint(n: int, q0):
    """``[n]`` at ``q0`` (exact for rational ``q0``)."""
    return specialize(q_integer(n), q0)


# elementary intertwiners on V(1)^{(x)N}

def _cup_coeff(left: int, right: int, q0):
    if left == UP and right == DOWN:
        return 1 if isinstance(q0, float) else mpq(1)
    if left == DOWN and right == UP:
        return -1 / q0
    return 0


def _cap_coeff(left: int, right: int, q0):
    if left == UP and right == DOWN:
        return -q0
    if left == DOWN and right == UP:
        return 1 if isinstance(q0, float) else mpq(1)
    return 0


def represent_diagram(d: PlanarDiagram, q0) -> SparseOperator:
    """Matrix ``2^b x 2^a`` of one planar diagram."""
    q0 = _q(q0)
    a, b = d.a, d.b
    caps = [(i, j) for i, j in d.pairs() if j < a]
    cups = [(i - a, j - a) for i, j in d.pairs() if i >= a]
    through = sorted((i, j - a) for i, j in d.pairs() if i < a <= j)
    rows: dict[int, dict[int, object]] = {}
    for s_idx in range(1 << a):
        s = state_from_index(s_idx, a)
        w = mpq(1) if not isinstance(q0, float) else 1.0
        for i, j in caps:
            w = w * _cap_coeff(s[i], s[j], q0)
            if w == 0:
                break
        if w == 0:
            continue
        base = [0] * b
        for i, t in through:
            base[t] = s[i]
        for choice in product((0, 1), repeat=len(cups)):
            t = list(base)
            c = w
            for (i, j), bit in zip(cups, choice):
                t[i], t[j] = (UP, DOWN) if bit == 0 else (DOWN, UP)
                c = c * _cup_coeff(t[i], t[j], q0)
            rows.setdefault(state_index(t), {})[s_idx] = c
    return SparseOperator((1 << b, 1 << a), rows)


def represent(f, q0) -> SparseOperator:
    """Matrix of a TL morphism on ``V(1)`` tensor powers at ``q = q0``.

    The matrix acts on column vectors, so
    ``represent(compose(f, g)) == represent(g) @ represent(f)``.
    """
    q0 = _q(q0)
    if isinstance(f, RationalCombination):
        den = specialize(f.denominator, q0)
        return represent(f.numerator, q0).scale(1 / den)
    f = _as_comb(f)
    out = SparseOperator((1 << f.b, 1 << f.a))
    for d, c in f.sorted_terms():
        out = out + represent_diagram(d, q0).scale(specialize(c, q0))
    return out


def _site_action(N: int, q0, which: str) -> SparseOperator:
    # coproduct on N copies of V(1)
    rows: dict[int, dict[int, object]] = {}
    for idx in range(1 << N):
        s = state_from_index(idx, N)
        if which == "K":
            rows[idx] = {idx: q0 ** sum(s)}
            continue
        for p in range(N):
            if which == "E" and s[p] == DOWN:
                c = q0 ** sum(s[p + 1:])
            elif which == "F" and s[p] == UP:
                c = q0 ** (-sum(s[:p]))
            else:
                continue
            t = list(s)
            t[p] = -s[p]
            j = state_index(t)
            r = rows.setdefault(j, {})
            r[idx] = r.get(idx, 0) + c
    return SparseOperator((1 << N, 1 << N), rows)


def fundamental_action(which: str, N: int, q0, i: int | None = None) -> SparseOperator:
    """Matrix of an intertwiner or generator on ``V(1)^{(x)N}``.

    Parameters
    ----------
    which : {"delta", "epsilon", "U", "E", "F", "K"}
        ``delta`` maps ``N-2`` strands to ``N`` with the cup at positions
        ``i, i+1``; ``epsilon`` maps ``N`` strands to ``N-2``; ``U`` is
        ``U_i`` on ``N`` strands.  Positions are 1-based.
    N : int
    q0 : positive rational
    i : int, optional
        Position for ``delta``, ``epsilon`` and ``U`` (default 1).

    Raises
    ------
    DomainError
        For an unknown name or a position out of range.
    """
    q0 = _q(q0)
    if which in ("E", "F", "K"):
        return _site_action(N, q0, which)
    i = 1 if i is None else i
    if not 1 <= i <= N - 1:
        raise DomainError(f"position {i} out of range for N={N}")
    if which == "delta":
        d = PlanarDiagram.build(N - 2, N, cups=[(i - 1, i)])
    elif which == "epsilon":
        d = PlanarDiagram.build(N, N - 2, caps=[(i - 1, i)])
    elif which in ("U", "U_i"):
        d = PlanarDiagram.build(N, N, caps=[(i - 1, i)], cups=[(i - 1, i)])
    else:
        raise DomainError(f"unknown action {which!r}")
    return represent_diagram(d, q0)


# symmetrizers

@lru_cache(maxsize=None, typed=True)
def _symmetrizer(n: int, direction: str, q0) -> SparseOperator:
    rows: dict[int, dict[int, object]] = {}
    for idx in range(1 << n):
        s = state_from_index(idx, n)
        b = s.count(DOWN)
        w = q0 ** inv_minus(s)
        if direction == "project":
            rows.setdefault(b, {})[idx] = w
        else:
            a = n - b
            rows.setdefault(idx, {})[b] = w * q0 ** (-a * b) / specialize(q_binomial(n, b), q0)
    shape = (n + 1, 1 << n) if direction == "project" else (1 << n, n + 1)
    return SparseOperator(shape, rows)


def symmetrizer(n: int, direction: str, q0) -> SparseOperator:
    """``T_n`` (``direction="project"``, shape ``(n+1) x 2^n``) or ``T_n*``
    (``"inject"``, shape ``2^n x (n+1)``).

    ``T_n(v^s) = q^{inv(s)} v^{|s|}`` and
    ``T_n*(v^m) = q^{-ab} [n brack b]^{-1} sum_{|s|=m} q^{inv(s)} v^s`` where
    ``a, b`` count up and down arrows and ``inv(s)`` counts down-before-up
    pairs.  ``T_n T_n* = 1`` and ``T_n* T_n = p_n``.
    """
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if direction not in ("project", "inject"):
        raise DomainError(f"direction must be 'project' or 'inject', got {direction!r}")
    return _symmetrizer(n, direction, _q(q0))


@lru_cache(maxsize=None, typed=True)
def jw_matrix(n: int, q0) -> SparseOperator:
    """``p_n = T_n* T_n`` on ``V(1)^{(x)n}``."""
    q0 = _q(q0)
    return symmetrizer(n, "inject", q0) @ symmetrizer(n, "project", q0)


def kron_symmetrizers(weights: Sequence[int], direction: str, q0) -> SparseOperator:
    out = symmetrizer(weights[0], direction, q0)
    for n in weights[1:]:
        out = out.kron(symmetrizer(n, direction, q0))
    return out


# site spaces V(n_1) (x) ... (x) V(n_L)

def site_states(weights: Sequence[int], b_total: int | None = None) -> list[tuple[int, ...]]:
    """Site basis tuples ``(b_1, ..., b_L)`` in lexicographic order,
    optionally restricted to ``sum b_i = b_total``."""
    out = []
    for t in product(*[range(n + 1) for n in weights]):
        if b_total is None or sum(t) == b_total:
            out.append(t)
    return out


def site_index(t: Sequence[int], weights: Sequence[int]) -> int:
    i = 0
    for b, n in zip(t, weights):
        i = i * (n + 1) + b
    return i


def site_apply(which: str, vec: dict, weights: Sequence[int], q0) -> dict:
    """Apply total ``E``, ``F`` or ``K`` to a sparse site vector ``{tuple: coeff}``."""
    q0 = _q(q0)
    out: dict[tuple, object] = {}
    L = len(weights)
    for t, x in vec.items():
        if which == "K":
            out[t] = out.get(t, 0) + x * q0 ** sum(n - 2 * b for n, b in zip(weights, t))
            continue
        for i in range(L):
            n, b = weights[i], t[i]
            if which == "E":
                if b == 0:
                    continue
                c = qint(b, q0) * q0 ** sum(weights[j] - 2 * t[j] for j in range(i + 1, L))
                nb = b - 1
            elif which == "F":
                if b == n:
                    continue
                c = qint(n - b, q0) * q0 ** (-sum(weights[j] - 2 * t[j] for j in range(i)))
                nb = b + 1
            else:
                raise DomainError(f"unknown generator {which!r}")
            u = t[:i] + (nb,) + t[i + 1:]
            out[u] = out.get(u, 0) + c * x
    return {t: v for t, v in out.items() if v != 0}


def site_generator(which: str, weights: Sequence[int], q0) -> SparseOperator:
    """Total ``E``, ``F`` or ``K`` on the full site space as a matrix."""
    states = site_states(weights)
    rows: dict[int, dict[int, object]] = {}
    for j, t in enumerate(states):
        for u, v in site_apply(which, {t: mpq(1) if not isinstance(q0, float) else 1.0}, weights, q0).items():
            rows.setdefault(site_index(u, weights), {})[j] = v
    return SparseOperator((len(states), len(states)), rows, states, states)


# cap diagrams and tableaux

@dataclass(frozen=True, order=True)
class CapDiagram:
    """``k`` noncrossing caps on ``L`` points (1-based); other points are through-lines."""

    L: int
    caps: tuple[tuple[int, int], ...]

    @property
    def k(self) -> int:
        return len(self.caps)

    @property
    def right_legs(self) -> tuple[int, ...]:
        return tuple(sorted(r for _, r in self.caps))

    @property
    def through(self) -> tuple[int, ...]:
        used = {p for c in self.caps for p in c}
        return tuple(p for p in range(1, self.L + 1) if p not in used)

    @classmethod
    def from_right_legs(cls, L: int, legs: Sequence[int]) -> "CapDiagram":
        """Match each right leg with the nearest free point to its left.

        Raises
        ------
        DomainError
            If some right leg has no free point to its left.
        """
        legs = set(legs)
        stack, caps = [], []
        for p in range(1, L + 1):
            if p in legs:
                if not stack:
                    raise DomainError(f"right legs {sorted(legs)} do not form a cap diagram")
                caps.append((stack.pop(), p))
            else:
                stack.append(p)
        return cls(L, tuple(sorted(caps)))


def enumerate_caps(L: int, k: int) -> list[CapDiagram]:
    """All of ``C(L, k)`` in lexicographic order of right-leg tuples.

    Raises
    ------
    DomainError
        If ``2k > L`` or ``k < 0``.
    """
    if k < 0 or 2 * k > L:
        raise DomainError(f"no cap diagrams with L={L}, k={k}")
    out = []
    for legs in combinations(range(1, L + 1), k):
        try:
            out.append(CapDiagram.from_right_legs(L, legs))
        except DomainError:
            continue
    return out


def cap_to_syt(c: CapDiagram) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Standard Young tableau of shape ``(L-k, k)``: the second row holds the right legs."""
    second = c.right_legs
    first = tuple(p for p in range(1, c.L + 1) if p not in second)
    return first, second


def syt_to_cap(rows: tuple[Sequence[int], Sequence[int]]) -> CapDiagram:
    """Inverse of :func:`cap_to_syt`."""
    first, second = rows
    L = len(first) + len(second)
    if sorted(list(first) + list(second)) != list(range(1, L + 1)):
        raise DomainError("not a filling of 1..L")
    if len(second) > len(first) or any(second[i] <= first[i] for i in range(len(second))):
        raise DomainError("not a standard Young tableau")
    return CapDiagram.from_right_legs(L, second)


def is_syt(rows) -> bool:
    first, second = rows
    if len(second) > len(first):
        return False
    if list(first) != sorted(first) or list(second) != sorted(second):
        return False
    if any(second[i] <= first[i] for i in range(len(second))):
        return False
    return sorted(list(first) + list(second)) == list(range(1, len(first) + len(second) + 1))


# dual canonical basis

def site_blocks(weights: Sequence[int]) -> list[int]:
    """Site number (0-based) of each fundamental strand, strands numbered from 1."""
    out = [None]
    for i, n in enumerate(weights):
        out.extend([i] * n)
    return out


@dataclass(frozen=True)
class DualCanonicalVector:
    """Image of ``down^d up^u`` through a cap diagram, projected to the sites.

    Attributes
    ----------
    cap : CapDiagram
        Caps on ``N = sum(site_weights)`` fundamental strands.
    downs : int
        Number of through-lines carrying a down arrow (they are the leftmost).
    site_weights : tuple of int
    """

    cap: CapDiagram
    downs: int
    site_weights: tuple[int, ...]
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    @property
    def N(self) -> int:
        return self.cap.L

    @property
    def weight(self) -> int:
        return len(self.cap.through) - 2 * self.downs

    @property
    def arrows(self) -> tuple[int, ...]:
        th = self.cap.through
        return tuple(DOWN if i < self.downs else UP for i in range(len(th)))

    def sort_key(self):
        return (self.cap.k, self.cap.right_legs, self.downs)

    def tensor_image(self, q0) -> dict[tuple[int, ...], object]:
        """Unprojected vector in ``V(1)^{(x)N}`` as ``{arrow tuple: coeff}``."""
        q0 = _q(q0)
        key = ("raw", type(q0), q0)
        if key in self._cache:
            return self._cache[key]
        base = [0] * (self.N + 1)
        for p, a in zip(self.cap.through, self.arrows):
            base[p] = a
        out = {}
        caps = self.cap.caps
        for choice in product((0, 1), repeat=len(caps)):
            s = list(base)
            c = mpq(1) if not isinstance(q0, float) else 1.0
            for (l, r), bit in zip(caps, choice):
                if bit == 0:
                    s[l], s[r] = UP, DOWN
                else:
                    s[l], s[r] = DOWN, UP
                    c = c * (-1 / q0)
            out[tuple(s[1:])] = c
        self._cache[key] = out
        return out

    def site_coordinates(self, q0) -> dict[tuple[int, ...], object]:
        """Image under ``T_{n_1} (x) ... (x) T_{n_L}`` as ``{(b_1..b_L): coeff}``."""
        q0 = _q(q0)
        key = ("site", type(q0), q0)
        if key in self._cache:
            return self._cache[key]
        out: dict[tuple, object] = {}
        bounds = []
        pos = 0
        for n in self.site_weights:
            bounds.append((pos, pos + n))
            pos += n
        for s, c in self.tensor_image(q0).items():
            t = []
            w = 0
            for lo, hi in bounds:
                chunk = s[lo:hi]
                t.append(chunk.count(DOWN))
                w += inv_minus(chunk)
            t = tuple(t)
            out[t] = out.get(t, 0) + c * q0 ** w
        out = {t: v for t, v in out.items() if v != 0}
        self._cache[key] = out
        return out

    def tensor_coordinates(self, q0) -> dict[int, object]:
        """Projected vector ``(p_{n_1} (x) ... (x) p_{n_L})`` applied to the image,
        as ``{tensor index: coeff}``."""
        q0 = _q(q0)
        inj = kron_symmetrizers(self.site_weights, "inject", q0)
        vec = {site_index(t, self.site_weights): v for t, v in self.site_coordinates(q0).items()}
        return inj.apply(vec)

    def is_nonzero(self, q0="1/2") -> bool:
        return bool(self.site_coordinates(q0))

    def label(self) -> str:
        legs = ",".join(map(str, self.cap.right_legs))
        return f"caps({legs})|d={self.downs}"


def caps_within_site(cap: CapDiagram, weights: Sequence[int]) -> bool:
    blocks = site_blocks(weights)
    return any(blocks[l] == blocks[r] for l, r in cap.caps)


def dcb_basis(site_weights: Sequence[int], k: int, q0="1/2", downs: int = 0) -> list[DualCanonicalVector]:
    """Dual canonical basis vectors with ``k`` caps and ``downs`` flipped through-lines.

    With ``downs=0`` this is a basis of the highest-weight space of weight
    ``sum(n_i) - 2k``.  Vectors whose projected image vanishes at ``q0`` are
    dropped.  Order: lexicographic in the right-leg tuple.

    Raises
    ------
    DomainError
        If ``2k > sum(n_i)`` or ``downs`` exceeds the through-line count.
    """
    weights = tuple(int(n) for n in site_weights)
    N = sum(weights)
    if k < 0 or 2 * k > N:
        raise DomainError(f"need 0 <= 2k <= {N}, got k={k}")
    if not 0 <= downs <= N - 2 * k:
        raise DomainError(f"downs must lie in 0..{N - 2 * k}")
    out = []
    for c in enumerate_caps(N, k):
        v = DualCanonicalVector(c, downs, weights)
        if v.is_nonzero(q0):
            out.append(v)
    return out


def weight_space_dcb(site_weights: Sequence[int], b: int, q0="1/2") -> list[DualCanonicalVector]:
    """Dual canonical basis of the full weight space with ``b`` total down arrows
    (weight ``sum(n_i) - 2b``), ordered by cap count then right legs."""
    N = sum(site_weights)
    out = []
    for k in range(0, b + 1):
        d = b - k
        if 2 * k > N or d > N - 2 * k:
            continue
        out.extend(dcb_basis(site_weights, k, q0, downs=d))
    return out


class SpanSolver:
    """Exact coordinates of vectors in the span of a fixed list of sparse vectors.

    Chooses pivot rows by Gaussian elimination once, then solves each request
    on the pivot rows and verifies the full residual.

    Raises
    ------
    InvariantViolation
        If the vectors are dependent, or a solved vector is outside the span.
    """

    def __init__(self, vectors: Sequence[dict]):
        self.vectors = [dict(v) for v in vectors]
        self.dim = len(self.vectors)
        rows = sorted({key for v in self.vectors for key in v})
        self.rows = rows
        # Gauss-Jordan on the transposed system to find pivot rows
        work = [dict(v) for v in self.vectors]
        pivots = []
        for col in range(self.dim):
            vcol = work[col]
            piv = None
            for key in rows:
                if key in pivots:
                    continue
                if vcol.get(key, 0) != 0:
                    piv = key
                    break
            if piv is None:
                raise InvariantViolation("vectors are linearly dependent")
            pivots.append(piv)
            pv = vcol[piv]
            for other in range(col + 1, self.dim):
                x = work[other].get(piv, 0)
                if x != 0:
                    f = x / pv
                    w = work[other]
                    for key, val in vcol.items():
                        nv = w.get(key, 0) - f * val
                        if nv == 0:
                            w.pop(key, None)
                        else:
                            w[key] = nv
        self.pivots = pivots
        # square system A c = x restricted to the pivot rows, inverted exactly
        d = self.dim
        A = [[self.vectors[j].get(p, 0) for j in range(d)] for p in pivots]
        self._inv = _invert(A)

    def solve(self, x: dict, check: bool = True) -> list:
        rhs = [x.get(p, 0) for p in self.pivots]
        c = [sum((row[j] * rhs[j] for j in range(self.dim) if rhs[j] != 0), 0) for row in self._inv]
        if check:
            recon: dict = {}
            for j, cj in enumerate(c):
                if cj == 0:
                    continue
                for key, val in self.vectors[j].items():
                    recon[key] = recon.get(key, 0) + cj * val
            keys = set(recon) | set(x)
            for key in keys:
                diff = recon.get(key, 0) - x.get(key, 0)
                if diff != 0 and (not isinstance(diff, float) or abs(diff) > 1e-9 * (1 + abs(x.get(key, 0)))):
                    raise InvariantViolation(f"vector not in span (residual at {key})")
        return c


def _invert(A: list[list]) -> list[list]:
    n = len(A)
    M = [list(r) + [mpq(1) if i == j else mpq(0) for j in range(n)] for i, r in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise InvariantViolation("singular pivot block")
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        M[col] = [x / pv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [r[n:] for r in M]


def operator_in_basis(apply, src: Sequence[DualCanonicalVector], dst: Sequence[DualCanonicalVector],
                      q0, solver: SpanSolver | None = None) -> SparseOperator:
    """Matrix of a linear map given as ``apply(site_vector) -> site_vector``
    from the span of ``src`` to the span of ``dst`` (columns are images)."""
    solver = solver or SpanSolver([v.site_coordinates(q0) for v in dst])
    rows: dict[int, dict[int, object]] = {}
    for j, v in enumerate(src):
        img = apply(v.site_coordinates(q0))
        for i, c in enumerate(solver.solve(img)):
            if c != 0:
                rows.setdefault(i, {})[j] = c
    return SparseOperator((len(dst), len(src)), rows, [v.label() for v in dst], [v.label() for v in src])


def generator_on_dcb(which: str, site_weights: Sequence[int], b: int, q0) -> SparseOperator:
    """Matrix of ``E``, ``F`` or ``K`` from the weight space with ``b`` downs
    into the one it maps to, both in the dual canonical basis."""
    q0 = _q(q0)
    weights = tuple(site_weights)
    src = weight_space_dcb(weights, b, q0)
    nb = {"E": b - 1, "F": b + 1, "K": b}[which]
    N = sum(weights)
    if nb < 0 or nb > N:
        return SparseOperator((0, len(src)))
    dst = weight_space_dcb(weights, nb, q0)
    return operator_in_basis(lambda v: site_apply(which, v, weights, q0), src, dst, q0)


def lowering_on_dcb(v: DualCanonicalVector) -> dict[DualCanonicalVector, LaurentPoly]:
    """Lowering operator on a dual canonical basis vector by the arrow rule.

    For the ``i``-th up arrow counted from the right: flip it; if another up
    arrow lies to its left, join the nearest one and the flipped arrow into a
    cap; weight the term by ``[i]``.  Terms whose new cap lies inside one site
    are dropped because the projector kills them.

    The returned combination equals ``q K F v`` (``K`` acting by ``q^{weight}``
    on the lowered vector); see :func:`lowering_normalisation`.
    """
    th = list(v.cap.through)
    d = v.downs
    ups = th[d:]
    u = len(ups)
    out: dict[DualCanonicalVector, LaurentPoly] = {}
    for i in range(1, u + 1):
        pos = u - i
        if pos == 0:
            new = DualCanonicalVector(v.cap, d + 1, v.site_weights)
        else:
            left, right = ups[pos - 1], ups[pos]
            caps = tuple(sorted(v.cap.caps + ((left, right),)))
            cap = CapDiagram(v.cap.L, caps)
            if caps_within_site(cap, v.site_weights):
                continue
            new = DualCanonicalVector(cap, d, v.site_weights)
        out[new] = out.get(new, LaurentPoly()) + q_integer(i)
    return {k: c for k, c in out.items() if not c.is_zero()}


def lowering_normalisation(v: DualCanonicalVector) -> int:
    """Exponent ``e`` with ``lowering_on_dcb(v) = q^e F v``: ``e = weight(v) - 1``."""
    return v.weight - 1
