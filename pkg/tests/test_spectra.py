from fractions import Fraction

import numpy as np
import pytest
from gmpy2 import mpq

from uqfoel.errors import DomainError
from uqfoel.hamiltonian import ChainSpec, build_hamiltonian, cascade_operator, site_metric, tl_basis_element
from uqfoel.sparse import SparseOperator
from uqfoel.spectra import (
    CSV_HEADER, cascade_eigenvalues_by_sector, cascade_eigenvalues_direct, cascade_spectrum_formula,
    equal_spin_lambda, foel_verify, jacobi_eigenvalues, perron_extremal, poly_eval, sector_energies,
    sector_energy, sector_oracle_eigenvalues, spectral_radius_by_blocks, two_site_toolkit, zero_multiplicity,
)

HALF_SPINS = [Fraction(n, 2) for n in range(1, 6)]


def _by_spin(spec):
    return {s.total_spin: s for s in sector_energies(spec)}


def test_perron_swap_matrix():
    r = perron_extremal(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert abs(r.rho - 1) < 1e-12
    assert np.allclose(r.vector, [0.5, 0.5])


def test_perron_shifted_ones():
    r = perron_extremal(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert abs(r.rho - 3) < 1e-12
    assert np.allclose(r.vector, [0.5, 0.5]) and r.lower <= 3 <= r.upper


def test_perron_rejects_negative_entry():
    with pytest.raises(DomainError):
        perron_extremal(np.array([[1.0, -1.0], [0.5, 1.0]]))


def test_perron_matches_dense_on_random_matrices():
    rng = np.random.default_rng(5)
    for _ in range(20):
        A = rng.random((6, 6))
        r = perron_extremal(A)
        assert abs(r.rho - max(abs(np.linalg.eigvals(A)))) < 1e-9
        assert (r.vector > 0).all() and abs(r.vector.sum() - 1) < 1e-12


def test_blocks_on_reducible_matrix():
    M = SparseOperator.from_dense(np.array([[1.0, 1.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, 2.0]]), exact=False)
    rho, _, sizes = spectral_radius_by_blocks(M)
    assert abs(rho - 3) < 1e-12 and sorted(sizes) == [1, 1, 1]


def test_jacobi_against_numpy():
    rng = np.random.default_rng(2)
    for n in (1, 2, 5, 12):
        A = rng.standard_normal((n, n))
        A = A + A.T
        assert np.allclose(jacobi_eigenvalues(A), np.linalg.eigvalsh(A), atol=1e-10)
    with pytest.raises(DomainError):
        jacobi_eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_spin_half_three_site_sector():
    spec = ChainSpec([1, 1, 1], [[0, -1], [0, -1]])
    s = sector_energy(spec, 1)
    assert s.dimension == 2 and s.method == "perron"
    dense = np.linalg.eigvals(build_hamiltonian(spec, ("hw_sector", 1)).to_dense(float)).real.min()
    assert abs(s.E0 - dense) < 1e-10
    assert (s.perron_vector > 0).all()


def test_zero_couplings():
    spec = ChainSpec([2, 1, 2], [[0], [0]])
    assert all(s.E0 == 0 for s in sector_energies(spec))


def test_spin_one_pair():
    levels = _by_spin(ChainSpec([2, 2], [[0, -1]]))
    assert levels[2].E0 == -1
    assert abs(levels[1].E0 + 1 / 3) < 1e-12
    assert levels[0].E0 == 0


def test_spin_half_four_site_strictly_decreasing():
    spec = ChainSpec([1, 1, 1, 1], [[0, -1]] * 3)
    E = [s.E0 for s in sorted(sector_energies(spec), key=lambda s: s.total_spin)]
    assert all(a > b + 1e-9 for a, b in zip(E, E[1:]))
    # oracle: metric-symmetrised full 16x16 spectrum
    H = build_hamiltonian(spec).to_dense(float)
    g = np.sqrt(np.array([float(x) for x in site_metric(spec.site_weights, 1)]))
    full = np.linalg.eigvalsh(H * g[None, :] / g[:, None])
    for e in E:
        assert np.isclose(full, e, atol=1e-10).any()


def test_sector_oracle_agrees():
    spec = ChainSpec([2, 1, 2], [[1, -1], [0, -1]], "1/2")
    for s in sector_energies(spec):
        assert abs(sector_oracle_eigenvalues(spec, s.k)[0] - s.E0) < 1e-9


def test_foel_spin_one_chain():
    v = foel_verify(ChainSpec([2, 2, 2], [[0, -1, -1], [0, -1, -1]]))
    assert v.foel_holds and not v.theorem_violation


def test_foel_violation_detected():
    v = foel_verify(ChainSpec([2, 2], [[0, 0, 1]]))
    levels = dict(v.levels)
    assert levels[2] == 1 and levels[1] == 0
    assert not v.foel_holds and not v.theorem_violation


def test_single_site():
    v = foel_verify(ChainSpec([3], []))
    assert v.foel_holds and len(v.levels) == 1


def test_csv_row():
    s = sector_energy(ChainSpec([1, 1], [[0, -1]]), 0)
    assert len(s.csv_row().split(",")) == len(CSV_HEADER.split(","))


def test_toolkit_spin_one_energies():
    tk = two_site_toolkit(1, 1)
    assert [tk.energies[j] for j in tk.spins] == [3, 2, 0]


def test_toolkit_spin_one_step_polynomials():
    tk = two_site_toolkit(1, 1)
    assert tk.step_polynomial_ordinal(1) == [0, mpq(-2, 3), mpq(1, 3)]
    assert tk.step_polynomial_ordinal(2) == [0, mpq(5, 6), mpq(-1, 6)]


def test_toolkit_projector_zero():
    tk = two_site_toolkit(1, 1)
    assert tk.projector_polynomial(0) == [mpq(-1, 3), 0, mpq(1, 3)]
    X = tk.heisenberg()
    expected = SparseOperator.identity(9).scale(mpq(-1, 3)) + (X @ X).scale(mpq(1, 3))
    assert tk.projector(0) == expected


def test_monotone_step_property():
    for s1 in HALF_SPINS:
        for s2 in HALF_SPINS:
            tk = two_site_toolkit(str(s1), str(s2))
            for j in tk.spins:
                Q = tk.step_polynomial(j)
                for jp in tk.spins:
                    assert poly_eval(Q, tk.energies[jp]) == (1 if jp <= j else 0)


def test_projectors_resolve_identity():
    for s1, s2 in [("1/2", "1/2"), ("1", "1/2"), ("3/2", "1")]:
        tk = two_site_toolkit(s1, s2)
        P = [tk.projector(j) for j in tk.spins]
        dim = (tk.n1 + 1) * (tk.n2 + 1)
        total = SparseOperator((dim, dim))
        for p in P:
            assert p @ p == p
            total = total + p
        assert total == SparseOperator.identity(dim)
        assert tk.indicator(tk.spins[0]) == SparseOperator.identity(dim)


def test_power_in_projectors():
    tk = two_site_toolkit("3/2", 1)
    X = tk.heisenberg()
    dim = 12
    rhs = SparseOperator((dim, dim))
    for j, c in tk.power_in_projectors(2).items():
        rhs = rhs + tk.projector(j).scale(c)
    assert X @ X == rhs


def test_toolkit_rejects_bad_spin():
    with pytest.raises(DomainError):
        two_site_toolkit("1/3", 1)
    with pytest.raises(DomainError):
        two_site_toolkit(1, 1).step_polynomial(3)


def test_spin_one_tables():
    tk = two_site_toolkit(1, 1)
    P = {int(j): tk.projector(j) for j in tk.spins}
    assert cascade_operator(2, 2, 1, 1) == P[1].scale(mpq(1, 3)) + P[2]
    assert cascade_operator(2, 2, 2, 1) == P[2]
    assert tl_basis_element(2, 2, 1, 1) == -P[1] - P[0].scale(mpq(3, 2))
    assert tl_basis_element(2, 2, 2, 1) == P[0].scale(3)


def test_formula_examples():
    assert cascade_spectrum_formula(2, 2, 1) == {0: 1, 1: mpq(1, 3), 2: 0}
    assert cascade_spectrum_formula(2, 2, 2) == {0: 1, 1: 0, 2: 0}
    assert all(v == 1 for v in cascade_spectrum_formula(3, 2, 0).values())
    with pytest.raises(DomainError):
        cascade_spectrum_formula(2, 1, 2)


@pytest.mark.parametrize("q0", ["1/2", "1", "2"])
def test_formula_against_diagonalisation(q0):
    for n1 in range(1, 5):
        for n2 in range(1, 5):
            for k in range(-n1, n2 + 1):
                lam = cascade_spectrum_formula(n1, n2, k, q0)
                by_sector = cascade_eigenvalues_by_sector(n1, n2, k, q0) if k >= 0 else None
                expected = sorted(float(lam[j]) for j in lam for _ in range(n1 + n2 - 2 * j + 1))
                assert np.allclose(cascade_eigenvalues_direct(n1, n2, k, q0), expected, atol=1e-10)
                if by_sector:
                    assert all(abs(by_sector[j] - float(lam[j])) < 1e-10 for j in lam)


def test_formula_is_nonincreasing():
    for n1 in range(1, 6):
        for n2 in range(1, 6):
            for k in range(n2 + 1):
                lam = cascade_spectrum_formula(n1, n2, k, "1/2")
                assert all(lam[j + 1] <= lam[j] for j in range(len(lam) - 1))


def test_zero_multiplicity():
    assert zero_multiplicity(3, 3, 2) == 2
    assert zero_multiplicity(4, 2, 2) == 2
    assert zero_multiplicity(2, 4, 3) == 1


def test_equal_spin_formula_reads_half_total_spin():
    for n in range(1, 5):
        for k in range(n + 1):
            lam = cascade_spectrum_formula(n, n, k)
            for j, v in lam.items():
                half_total = Fraction(2 * n - 2 * j, 2) / 2
                assert equal_spin_lambda(Fraction(n, 2), k, half_total) == Fraction(int(v.numerator), int(v.denominator))
