import random

import numpy as np
import pytest
from gmpy2 import mpq

from uqfoel.errors import DomainError
from uqfoel.urnsim import (
    UrnModel, build_urn_generator, configurations, detailed_balance_holds, gap_spread, hypergeometric_rho,
    sector_gap, sector_gaps, stationary_weights, symmetrized_generator,
)


def _explicit(L, n, probs, rate=1):
    return UrnModel(L, n, [rate], [{"type": "explicit", "probs": probs}])


def _mixture(L, n, weights, rate=1):
    return UrnModel(L, n, [rate], [{"type": "hypergeometric_mixture", "weights": weights}])


def test_rho_examples():
    assert hypergeometric_rho(4, 0) == [1, 0, 0, 0, 0]
    assert hypergeometric_rho(2, 1) == [mpq(2, 3), mpq(1, 3), 0]


def test_rho_sums_to_one():
    for n in range(9):
        for k in range(n + 1):
            rho = hypergeometric_rho(n, k)
            assert sum(rho) == 1 and all(x >= 0 for x in rho)


def test_rho_out_of_range():
    with pytest.raises(DomainError):
        hypergeometric_rho(2, 3)


def test_single_configuration_sector():
    Q = build_urn_generator(_explicit(3, 2, [0, 1, 0]), 0)
    assert Q.shape == (1, 1) and Q.is_zero()


def test_two_state_swap():
    Q = build_urn_generator(_explicit(2, 1, [0, 1]), 1)
    assert Q.to_dense(float).tolist() == [[-1.0, 1.0], [1.0, -1.0]]
    assert abs(sector_gap(_explicit(2, 1, [0, 1]), 1) - 2) < 1e-12


def test_rows_sum_to_zero_random_models():
    rng = random.Random(4)
    for _ in range(20):
        L, n = rng.randint(2, 4), rng.randint(1, 3)
        w = [rng.randint(0, 3) for _ in range(n + 1)]
        w[rng.randrange(n + 1)] += 1
        probs = [f"{x}/{sum(w)}" for x in w]
        rates = [rng.choice(["0", "1", "1/2", "2"]) for _ in range(L - 1)]
        model = UrnModel(L, n, rates, [{"type": "explicit", "probs": probs}])
        for k in range(n * L + 1):
            Q = build_urn_generator(model, k)
            assert all(sum(r.values()) == 0 for r in Q.rows.values())
            assert detailed_balance_holds(model, k)


def test_exclusion_generator_is_symmetric():
    model = _explicit(4, 1, [0, 1])
    for k in range(5):
        assert build_urn_generator(model, k).is_symmetric()


def test_generator_not_symmetric_for_two_balls():
    Q = build_urn_generator(_explicit(2, 2, [0, 1, 0]), 2)
    idx = {s: i for i, s in enumerate(configurations(2, 2, 2))}
    assert Q[idx[(0, 2)], idx[(1, 1)]] == 1
    assert Q[idx[(1, 1)], idx[(0, 2)]] == mpq(1, 4)
    assert stationary_weights(_explicit(2, 2, [0, 1, 0]), 2) == [1, 4, 1]


def test_constant_vector_in_kernel():
    model = _mixture(3, 2, ["1/3", "1/3", "1/3"])
    for k in range(7):
        Q = build_urn_generator(model, k).to_dense(float)
        assert np.allclose(Q @ np.ones(Q.shape[0]), 0)
        S = symmetrized_generator(model, k)
        assert np.allclose(S, S.T)


def test_mixture_gaps_coincide():
    for w in (["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"], ["1/2", "1/4", "1/4"]):
        gaps = sector_gaps(_mixture(3, 2, w))
        if w[0] == "1":
            assert all(g == 0 for _, g in gaps)  # no exchange at all
        else:
            assert gap_spread(gaps) <= 1e-9


def test_exclusion_gaps_coincide():
    for L in range(2, 6):
        assert gap_spread(sector_gaps(_explicit(L, 1, [0, 1]))) <= 1e-9


def test_single_bond_gap_matches_kernel():
    model = _mixture(2, 2, ["0", "1/2", "1/2"])
    for k in range(1, 4):
        Q = build_urn_generator(model, k).to_dense(float)
        d = np.sqrt([float(x) for x in stationary_weights(model, k)])
        ev = np.sort(np.linalg.eigvalsh(-(Q * d[:, None] / d[None, :])))
        assert abs(sector_gap(model, k) - ev[1]) < 1e-12


def test_zero_rates():
    assert all(g == 0 for _, g in sector_gaps(_explicit(3, 2, [0, 1, 0], rate=0)))


def test_json_roundtrip_and_broadcast():
    model = _mixture(3, 2, ["1/2", "1/2", "0"])
    again = UrnModel.from_json(model.to_json())
    assert again.rates == model.rates and again.laws == model.laws and again.hypergeometric
    assert len(model.rates) == 2


@pytest.mark.parametrize("text", [
    "{}",
    '{"L": 2, "n": 1, "rates": [1], "mixing": [{"type": "explicit", "probs": [1, 1]}]}',
    '{"L": 2, "n": 1, "rates": [-1], "mixing": [{"type": "explicit", "probs": [0, 1]}]}',
    '{"L": 2, "n": 1, "rates": [1], "mixing": [{"type": "other"}]}',
    "not json",
])
def test_malformed_models(text):
    with pytest.raises(DomainError):
        UrnModel.from_json(text)
