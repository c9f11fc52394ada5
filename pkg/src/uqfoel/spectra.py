"""Ground energies per total-spin sector, the FOEL verdict and two-site tools."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Sequence

import numpy as np
from gmpy2 import mpq

from .errors import ConvergenceError, DomainError
from .hamiltonian import (
    ChainSpec, build_hamiltonian, cascade_operator, sector_basis, sector_gram,
    sector_metric_form, site_metric, support_components,
)
from .qalg import parse_q, q_factorial, specialize, to_mpq
from .repspaces import site_generator
from .sparse import SparseOperator


# Perron iteration

@dataclass
class PerronResult:
    rho: float
    vector: np.ndarray
    iterations: int
    residual: float
    lower: float
    upper: float


def _as_dense(M) -> np.ndarray:
    if isinstance(M, SparseOperator):
        return M.to_dense(float)
    return np.asarray(M, dtype=float)


def perron_extremal(M, tol: float = 1e-12, max_iter: int = 10**6) -> PerronResult:
    """Spectral radius and Perron vector of a nonnegative irreducible matrix.

    Power iteration from the uniform vector.  When the diagonal is entirely
    zero the iteration runs on ``M + 1`` so that periodic matrices still
    converge.  Each step yields the Collatz-Wielandt bracket
    ``min_i (Mv)_i / v_i <= rho <= max_i (Mv)_i / v_i``; the iteration stops
    once the bracket is narrower than ``tol * max(1, rho)``.  The bracket is
    a certificate, so it is also returned.

    Parameters
    ----------
    M : SparseOperator or array_like
        Square, entrywise nonnegative, irreducible.
    tol : float
    max_iter : int

    Returns
    -------
    PerronResult
        ``rho``, the positive eigenvector normalised to sum 1, the number of
        iterations, ``max |Mv - rho v|`` and the bracket.

    Raises
    ------
    DomainError
        Negative entry, empty matrix, or an iterate with a nonpositive entry
        (the input was reducible).
    ConvergenceError
        Bracket still too wide after ``max_iter`` steps.

    Examples
    --------
    >>> r = perron_extremal([[0, 1], [1, 0]])
    >>> round(r.rho, 12), r.vector.tolist()
    (1.0, [0.5, 0.5])
    """
    A = _as_dense(M)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise DomainError(f"need a nonempty square matrix, got shape {A.shape}")
    if (A < 0).any():
        raise DomainError("matrix has a negative entry")
    n = A.shape[0]
    shift = 0.0 if (np.diag(A) > 0).any() else 1.0
    B = A + shift * np.eye(n)
    v = np.full(n, 1.0 / n)
    w = B @ v
    for it in range(1, max_iter + 1):
        if (w <= 0).any():
            raise DomainError("iterate has a nonpositive entry; the matrix is reducible")
        ratios = w / v
        lo, hi = float(ratios.min()), float(ratios.max())
        if hi - lo <= tol * max(1.0, abs(hi)):
            rho = 0.5 * (lo + hi)
            v = w / w.sum()
            residual = float(np.abs(B @ v - rho * v).max())
            return PerronResult(rho - shift, v, it, residual, lo - shift, hi - shift)
        v = w / w.sum()
        w = B @ v
    raise ConvergenceError(f"power iteration did not converge in {max_iter} steps")


def spectral_radius_by_blocks(M, tol: float = 1e-12, max_iter: int = 10**6) -> tuple[float, int, list[int]]:
    """Spectral radius of a nonnegative matrix that may be reducible.

    The spectrum is the union of the spectra of the diagonal blocks on the
    strongly connected components of the support graph, so the radius is the
    largest block radius.  Returns ``(rho, total_iterations, block_sizes)``.
    """
    S = M if isinstance(M, SparseOperator) else SparseOperator.from_dense(np.asarray(M), exact=False)
    A = S.to_dense(float)
    if (A < 0).any():
        raise DomainError("matrix has a negative entry")
    ncomp, labels = support_components(S)
    best, iters, sizes = -np.inf, 0, []
    for c in range(ncomp):
        idx = np.flatnonzero(labels == c)
        sizes.append(len(idx))
        block = A[np.ix_(idx, idx)]
        if len(idx) == 1:
            r = float(block[0, 0])
        else:
            res = perron_extremal(block, tol, max_iter)
            r, iters = res.rho, iters + res.iterations
        best = max(best, r)
    return float(best), iters, sorted(sizes)


# dense oracle

def jacobi_eigenvalues(A, tol: float = 1e-14, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Used as an independent oracle for the Perron route.  Returns the
    eigenvalues sorted ascending.

    Raises
    ------
    DomainError
        If ``A`` is not square and symmetric.
    ConvergenceError
        If off-diagonal mass survives ``max_sweeps`` sweeps.
    """
    a = np.array(A, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError("need a square matrix")
    if not np.allclose(a, a.T, atol=1e-12 * max(1.0, np.abs(a).max(initial=0.0))):
        raise DomainError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    scale = max(1.0, np.abs(a).max(initial=0.0))
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.triu(a, 1) ** 2))
        if off <= tol * scale:
            return np.sort(np.diag(a))
        for p in range(n - 1):
            for r in range(p + 1, n):
                apr = a[p, r]
                if abs(apr) <= 1e-300:
                    continue
                theta = (a[r, r] - a[p, p]) / (2.0 * apr)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap, ar = a[:, p].copy(), a[:, r].copy()
                a[:, p] = c * ap - s * ar
                a[:, r] = s * ap + c * ar
                ap, ar = a[p, :].copy(), a[r, :].copy()
                a[p, :] = c * ap - s * ar
                a[r, :] = s * ap + c * ar
    raise ConvergenceError("Jacobi sweeps did not converge")


def sector_oracle_eigenvalues(spec: ChainSpec, k: int) -> np.ndarray:
    """Eigenvalues of ``H`` on the highest-weight sector ``k`` without Perron.

    With ``V`` the DCB coordinates, ``Gamma = V^t G^{-1} V`` and
    ``A = V^t G^{-1} H V`` are symmetric and ``Gamma`` is positive definite;
    the sector matrix is similar to ``L^{-1} A L^{-t}`` where
    ``Gamma = L L^t``.  That symmetric matrix goes to :func:`jacobi_eigenvalues`.
    """
    basis = sector_basis(spec, ("hw_sector", k))
    gram = np.array([[float(x) for x in row] for row in sector_gram(spec, basis)])
    form = np.array([[float(x) for x in row] for row in sector_metric_form(spec, basis)])
    L = np.linalg.cholesky(gram)
    C = np.linalg.solve(L, np.linalg.solve(L, form.T).T)
    return jacobi_eigenvalues(0.5 * (C + C.T))


# sector energies

@dataclass
class SectorEnergy:
    """Lowest energy on one total-spin sector.

    ``E0`` is a float; ``bounds`` is the certified ``(lower, upper)`` pair
    from the Collatz-Wielandt bracket (equal to ``E0`` for exact routes).
    ``perron_vector`` is ``None`` when the sector matrix is reducible or
    outside the nonnegative cone.
    """

    k: int
    sector_weight: int
    total_spin: Fraction
    E0: float
    bounds: tuple[float, float]
    dimension: int
    perron_vector: np.ndarray | None = None
    iterations: int = 0
    residual: float = 0.0
    method: str = "perron"
    shift: float = 0.0

    def csv_row(self) -> str:
        return f"{self.total_spin},{self.E0!r},{self.dimension},{self.iterations},{self.residual:.3e}"


CSV_HEADER = "spin,E0,sector_dim,iterations,residual"


def sector_energy(spec: ChainSpec, k: int, tol: float = 1e-12, max_iter: int = 10**6) -> SectorEnergy | None:
    """``E_0`` on the highest-weight sector with ``k`` caps, ``None`` if it is empty.

    ``t`` is one more than the largest diagonal entry of ``H``.  When every
    off-diagonal entry is ``<= 0`` the Perron radius of ``t - H`` gives
    ``E_0 = t - rho``; reducible matrices are split into strongly connected
    blocks.  Otherwise (couplings outside the cone) the lowest real
    eigenvalue is taken from a dense solve.
    """
    H = build_hamiltonian(spec, ("hw_sector", k))
    n = H.shape[0]
    weight = spec.N - 2 * k
    spin = Fraction(weight, 2)
    if n == 0:
        return None
    if n == 1:
        e = float(H[0, 0])
        return SectorEnergy(k, weight, spin, e, (e, e), 1, np.ones(1), 0, 0.0, "diagonal", e)
    Hf = H.to_dense(float)
    t = float(np.diag(Hf).max()) + 1.0
    M = t * np.eye(n) - Hf
    if (M < 0).any():
        ev = np.linalg.eigvals(Hf)
        e = float(ev.real.min())
        return SectorEnergy(k, weight, spin, e, (e, e), n, None, 0, 0.0, "dense", t)
    ncomp, _ = support_components(H)
    if ncomp == 1:
        res = perron_extremal(M, tol, max_iter)
        return SectorEnergy(k, weight, spin, t - res.rho, (t - res.upper, t - res.lower), n,
                            res.vector, res.iterations, res.residual, "perron", t)
    rho, iters, _ = spectral_radius_by_blocks(SparseOperator.from_dense(M, exact=False), tol, max_iter)
    return SectorEnergy(k, weight, spin, t - rho, (t - rho, t - rho), n, None, iters, 0.0, "perron-blocks", t)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("FOEL_THREADS", "1")))
    except ValueError:
        return 1


def sector_energies(spec: ChainSpec, tol: float = 1e-12, max_iter: int = 10**6,
                    threads: int | None = None) -> list[SectorEnergy]:
    """One :class:`SectorEnergy` per nonempty sector ``k = 0 .. floor(N/2)``, sorted by ``k``.

    Sectors with no highest-weight vector (total spin absent from the
    chain) are skipped.  ``threads`` defaults to ``FOEL_THREADS``.
    """
    ks = list(range(spec.N // 2 + 1))
    threads = threads or _threads()
    if threads > 1 and len(ks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            out = list(pool.map(lambda k: sector_energy(spec, k, tol, max_iter), ks))
    else:
        out = [sector_energy(spec, k, tol, max_iter) for k in ks]
    return [s for s in out if s is not None]


@dataclass
class FoelVerdict:
    levels: list[tuple[Fraction, float]]
    foel_holds: bool
    slack: float
    theorem_violation: bool
    sectors: list[SectorEnergy] = field(default_factory=list)


def foel_verify(spec: ChainSpec, tol: float = 1e-9, **kw) -> FoelVerdict:
    """Check that ``E_0`` is non-increasing in total spin.

    ``slack`` is ``min (E_0(s) - E_0(s'))`` over ``s < s'``; FOEL holds when
    it is ``>= -tol``.  ``theorem_violation`` is set when the couplings lie in
    the cone with every bond nondegenerate and FOEL still fails, which would
    mean a defect in this library.
    """
    sectors = sector_energies(spec, **kw)
    levels = sorted(((s.total_spin, s.E0) for s in sectors), key=lambda x: x[0])
    slack = np.inf
    for a in range(len(levels)):
        for b in range(a + 1, len(levels)):
            slack = min(slack, levels[a][1] - levels[b][1])
    slack = float(slack) if np.isfinite(slack) else 0.0
    holds = slack >= -tol
    violation = (not holds) and spec.foel_cone and spec.nondegenerate
    return FoelVerdict(levels, holds, slack, violation, sectors)


# two-site toolkit

def _poly_mul(a: Sequence, b: Sequence) -> list:
    out = [mpq(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_add(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _poly_trim(a: Sequence) -> list:
    a = [mpq(x) for x in a]
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def poly_eval(coeffs: Sequence, z):
    """Horner evaluation of ascending coefficients."""
    acc = 0
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _parse_spin(s) -> mpq:
    try:
        v = to_mpq(Fraction(str(s)))
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"invalid spin {s!r}") from exc
    if v <= 0 or (2 * v).denominator != 1:
        raise DomainError(f"spin must be a positive half-integer, got {s!r}")
    return v


def _matrix_poly(X: SparseOperator, coeffs: Sequence) -> SparseOperator:
    n = X.shape[0]
    out = SparseOperator((n, n))
    power = SparseOperator.identity(n)
    for c in coeffs:
        if c != 0:
            out = out + power.scale(mpq(c))
        power = power @ X
    return out


@dataclass
class TwoSiteToolkit:
    """Exact analytic data for the pair ``V(2 s_1) (x) V(2 s_2)`` at ``q = 1``.

    Spins are half-integers; every polynomial is a list of ascending
    ``mpq`` coefficients.  Matrices act on the site basis ``(b_1, b_2)``.
    """

    s1: mpq
    s2: mpq
    spins: list[mpq]
    energies: dict

    @property
    def n1(self) -> int:
        return int(2 * self.s1)

    @property
    def n2(self) -> int:
        return int(2 * self.s2)

    def energy(self, j) -> mpq:
        """``((s1+s2)(s1+s2+1) - j(j+1)) / 2``, the spectrum of ``s1 s2 - S.S``."""
        j = mpq(Fraction(str(j)))
        t = self.s1 + self.s2
        return (t * (t + 1) - j * (j + 1)) / 2

    def lagrange_node(self) -> list:
        """``prod_j (z - E(j))``."""
        out = [mpq(1)]
        for j in self.spins:
            out = _poly_mul(out, [-self.energies[j], mpq(1)])
        return out

    def _basis_poly(self, j) -> list:
        out = [mpq(1)]
        e = self.energies[j]
        for jp in self.spins:
            if jp != j:
                d = e - self.energies[jp]
                out = _poly_mul(out, [-self.energies[jp] / d, 1 / d])
        return out

    def step_polynomial(self, j) -> list:
        """``Q_j``: equal to 1 on ``E(j')`` for ``j' <= j`` and 0 for ``j' > j``."""
        j = mpq(Fraction(str(j)))
        if j not in self.energies:
            raise DomainError(f"{j} is not an allowed total spin")
        out = [mpq(0)]
        for jp in self.spins:
            if jp <= j:
                out = _poly_add(out, self._basis_poly(jp))
        return _poly_trim(out)

    def step_polynomial_ordinal(self, i: int) -> list:
        """``Q`` indexed by the 1-based position of the spin in the sorted J-set."""
        if not 1 <= i <= len(self.spins):
            raise DomainError(f"ordinal must lie in 1..{len(self.spins)}")
        return self.step_polynomial(self.spins[i - 1])

    def heisenberg(self) -> SparseOperator:
        """``S_1 . S_2`` with ``S^z = (n - 2b)/2``, ``S^+ = E``, ``S^- = F``."""
        ops = []
        for n in (self.n1, self.n2):
            E = site_generator("E", [n], mpq(1))
            F = site_generator("F", [n], mpq(1))
            Z = SparseOperator((n + 1, n + 1), {b: {b: mpq(n - 2 * b, 2)} for b in range(n + 1)})
            ops.append((E, F, Z))
        (E1, F1, Z1), (E2, F2, Z2) = ops
        return Z1.kron(Z2) + (E1.kron(F2) + F1.kron(E2)).scale(mpq(1, 2))

    def projector_polynomial(self, j) -> list:
        """``P^{(j)}`` as ascending coefficients in ``x = S_1 . S_2``."""
        j = mpq(Fraction(str(j)))
        if j not in self.energies:
            raise DomainError(f"{j} is not an allowed total spin")
        # basis polynomial in h, then substitute h = s1 s2 - x
        ph = self._basis_poly(j)
        out = [mpq(0)]
        sub = [mpq(1)]
        lin = [self.s1 * self.s2, mpq(-1)]
        for c in ph:
            out = _poly_add(out, [c * x for x in sub])
            sub = _poly_mul(sub, lin)
        return _poly_trim(out)

    def projector(self, j) -> SparseOperator:
        return _matrix_poly(self.heisenberg(), self.projector_polynomial(j))

    def indicator(self, j) -> SparseOperator:
        """``X_j = sum_{j' >= j} P^{(j')}``."""
        j = mpq(Fraction(str(j)))
        dim = (self.n1 + 1) * (self.n2 + 1)
        out = SparseOperator((dim, dim))
        for jp in self.spins:
            if jp >= j:
                out = out + self.projector(jp)
        return out

    def power_in_projectors(self, p: int) -> dict:
        """``(S_1 . S_2)^p = sum_j c_j P^{(j)}``; returns ``{j: c_j}``."""
        x = {j: self.s1 * self.s2 - self.energies[j] for j in self.spins}
        return {j: x[j] ** p for j in self.spins}


def two_site_toolkit(s1, s2) -> TwoSiteToolkit:
    """Analytic bundle for two spins ``s1, s2`` (half-integers, e.g. ``"3/2"``).

    Raises
    ------
    DomainError
        For a spin that is not a positive half-integer.

    Examples
    --------
    >>> tk = two_site_toolkit(1, 1)
    >>> [int(tk.energies[j]) for j in tk.spins]
    [3, 2, 0]
    """
    a, b = _parse_spin(s1), _parse_spin(s2)
    lo = abs(a - b)
    spins = [lo + i for i in range(int(a + b - lo) + 1)]
    t = a + b
    energies = {j: (t * (t + 1) - j * (j + 1)) / 2 for j in spins}
    return TwoSiteToolkit(a, b, spins, energies)


# closed-form cascade spectrum

def cascade_spectrum_formula(n1: int, n2: int, k: int, q0=1) -> dict[int, object]:
    """Eigenvalue of ``K_{n1,n2}(k)`` on the summand with deviate ``j``.

    The summand with deviate ``j`` has weight ``n1 + n2 - 2j``,
    ``j = 0..min(n1, n2)``.  For ``k >= 0``::

        [n1+k-j]! [n1]! [n2-j]! [n2-k]! / ([n1-j]! [n1+k]! [n2-j-k]! [n2]!)

    when ``n2 - j >= k`` and 0 otherwise.  The expression holds for either
    order of ``n1, n2``; a negative ``k`` moves strands to the right and is
    evaluated as ``K_{n2,n1}(-k)``, which has the same spectrum.  Values are
    exact ``mpq`` for rational ``q0`` and floats otherwise.

    Raises
    ------
    DomainError
        Unless ``-n1 <= k <= n2``.

    Examples
    --------
    >>> {j: str(v) for j, v in cascade_spectrum_formula(2, 2, 1).items()}
    {0: '1', 1: '1/3', 2: '0'}
    """
    if not -n1 <= k <= n2 or n1 < 0 or n2 < 0:
        raise DomainError(f"need {-n1} <= k <= {n2}, got {k}")
    if k < 0:
        n1, n2, k = n2, n1, -k
    q0 = parse_q(q0)

    def f(x):
        return specialize(q_factorial(x), q0)

    out = {}
    for j in range(min(n1, n2) + 1):
        if n2 - j >= k:
            out[j] = (f(n1 + k - j) * f(n1) * f(n2 - j) * f(n2 - k)) / (
                f(n1 - j) * f(n1 + k) * f(n2 - j - k) * f(n2))
        else:
            out[j] = mpq(0) if not isinstance(q0, float) else 0.0
    return out


def zero_multiplicity(n1: int, n2: int, k: int) -> int:
    """Number of summands on which ``K_{n1,n2}(k)`` vanishes (``k >= 0``).

    Equals ``k`` when ``n1 >= n2`` and ``max(0, n1 - n2 + k)`` otherwise.
    """
    return sum(1 for v in cascade_spectrum_formula(n1, n2, k).values() if v == 0)


def equal_spin_lambda(s, k: int, j) -> Fraction:
    """``(2j+k)!(2s-k)! / ((2j-k)!(2s+k)!)`` for ``j >= k/2``, else 0 (``q = 1``).

    Equal-spin closed form at ``q = 1``.  It agrees with
    :func:`cascade_spectrum_formula` when ``j`` is half the total spin of the
    summand, not the total spin itself.
    """
    s, j = Fraction(str(s)), Fraction(str(j))
    if (2 * s).denominator != 1 or (2 * j).denominator != 1:
        raise DomainError("s and j must be half-integers")
    if 2 * j < k:
        return Fraction(0)
    a, b = int(2 * j), int(2 * s)
    if a - k < 0 or b - k < 0:
        return Fraction(0)
    return Fraction(factorial(a + k) * factorial(b - k), factorial(a - k) * factorial(b + k))


def cascade_eigenvalues_direct(n1: int, n2: int, k: int, q0) -> np.ndarray:
    """Eigenvalues of ``K_{n1,n2}(k)`` by a dense symmetric solve.

    ``G^{-1} K`` is symmetric for the site metric ``G``, so
    ``G^{-1/2} K G^{1/2}`` is a symmetric matrix with the same spectrum.
    """
    q0 = parse_q(q0)
    K = cascade_operator(n1, n2, k, q0).to_dense(float)
    g = np.sqrt(np.array([float(x) for x in site_metric((n1, n2), q0)]))
    S = K * g[None, :] / g[:, None]
    return np.linalg.eigvalsh(0.5 * (S + S.T))


def cascade_eigenvalues_by_sector(n1: int, n2: int, k: int, q0) -> dict[int, float]:
    """Eigenvalue of ``K_{n1,n2}(k)`` on each highest-weight vector.

    For each deviate ``j`` the highest-weight vector spans the kernel of ``E``
    on the weight space with ``j`` down arrows; ``K`` acts on it by a scalar.
    """
    q0 = parse_q(q0)
    K = cascade_operator(n1, n2, k, q0).to_dense(float)
    E = site_generator("E", (n1, n2), q0).to_dense(float)
    idx = {(b1, b2): b1 * (n2 + 1) + b2 for b1 in range(n1 + 1) for b2 in range(n2 + 1)}
    out = {}
    for j in range(min(n1, n2) + 1):
        cols = [idx[(b1, j - b1)] for b1 in range(n1 + 1) if 0 <= j - b1 <= n2]
        Ej = E[:, cols]
        _, sv, vt = np.linalg.svd(Ej)
        v = np.zeros(E.shape[0])
        v[cols] = vt[-1]
        Kv = K @ v
        out[j] = float(v @ Kv / (v @ v))
    return out
