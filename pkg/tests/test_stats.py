import csv
import math
from pathlib import Path

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from labelspace.stats import (
    LikelihoodTable,
    aggregate_likelihoods,
    aggregate_values,
    f_cdf,
    f_sf,
    friedman_ranks,
    iman_davenport,
    likelihood_better,
    metric_direction,
    normal_cdf,
    read_aggregates_csv,
    rom_familywise_error,
    rom_posthoc,
    rom_reject,
    rom_thresholds,
    write_aggregates_csv,
)

FIXTURES = Path(__file__).parent / "fixtures"
mpmath.mp.dps = 30


def f_cdf_oracle(x, d1, d2):
    """Numerical integration of the F density."""
    d1, d2 = mpmath.mpf(d1), mpmath.mpf(d2)
    norm = mpmath.beta(d1 / 2, d2 / 2)

    def density(t):
        return (d1 / d2) ** (d1 / 2) * t ** (d1 / 2 - 1) * (1 + d1 * t / d2) ** (-(d1 + d2) / 2) / norm

    return float(mpmath.quad(density, [0, x / 4, x / 2, x]))


def normal_cdf_oracle(x):
    return float(mpmath.mpf(1) / 2 + mpmath.quad(lambda t: mpmath.exp(-t * t / 2), [0, x]) / mpmath.sqrt(2 * mpmath.pi))


# --- likelihoods and aggregates ---------------------------------------------

def test_likelihood_examples():
    assert likelihood_better(0.9, [0.1, 0.5]) == 1.0
    assert likelihood_better(0.0, [0.1, 0.5]) == 0.0
    assert likelihood_better(0.7, [0.5, 0.6, 0.8, 0.9]) == 0.5
    assert likelihood_better(0.6, [0.6, 0.6]) == 0.0  # ties are not worse
    assert likelihood_better(0.1, [0.2, 0.05, 0.3], higher_is_better=False) == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        likelihood_better(0.5, [])


@given(st.lists(st.floats(0, 1), min_size=1, max_size=30), st.floats(0, 1), st.floats(0, 1), st.booleans())
def test_likelihood_monotone(samples, a, b, higher):
    lo, hi = sorted((a, b))
    better, worse = (hi, lo) if higher else (lo, hi)
    assert likelihood_better(better, samples, higher) >= likelihood_better(worse, samples, higher)


def test_aggregate_examples():
    assert aggregate_values([0.3, 0.3, 0.3]) == (0.3, 0.3, 0.3, 0.0)
    a = aggregate_values([0.0, 1.0])
    assert a.median == 0.5
    assert a.std == pytest.approx(math.sqrt(0.5), abs=1e-12)
    with pytest.raises(ValueError):
        aggregate_values([0.4])


def test_reference_aggregates_reproduce():
    table = LikelihoodTable.from_csv(FIXTURES / "reference_likelihoods.csv")
    expected = read_aggregates_csv(FIXTURES / "reference_aggregates.csv")
    assert len(table.datasets()) == 12 and len(table.methods()) == 12
    assert len(expected) == 60
    for (method, metric), agg in expected.items():
        got = aggregate_likelihoods(table, method, metric)
        np.testing.assert_allclose(got, agg, atol=1e-5, rtol=0)
    br = aggregate_likelihoods(table, "BR", "f1_micro")
    np.testing.assert_allclose(br, (0.5, 0.885556, 0.840028, 0.152530), atol=1e-6, rtol=0)


def test_likelihood_table_csv_round_trip(tmp_path):
    t = LikelihoodTable()
    t["d1", "BR", "jaccard"] = 0.25
    t["d2", "BR", "jaccard"] = 1.0
    with pytest.raises(ValueError):
        t["d3", "BR", "jaccard"] = 1.5
    t.to_csv(tmp_path / "l.csv")
    assert (tmp_path / "l.csv").read_text().splitlines()[1] == "d1,BR,jaccard,0.250000"
    assert LikelihoodTable.from_csv(tmp_path / "l.csv").entries == t.entries
    aggs = {("BR", "jaccard"): aggregate_likelihoods(t, "BR", "jaccard")}
    write_aggregates_csv(aggs, tmp_path / "a.csv")
    back = read_aggregates_csv(tmp_path / "a.csv")
    np.testing.assert_allclose(back["BR", "jaccard"], aggs["BR", "jaccard"], atol=5e-7)


# --- Friedman / Iman-Davenport -----------------------------------------------

def test_friedman_fixture_by_hand():
    # datasets x methods; method 0 is best on 3 of 4 datasets
    scores = [[0.9, 0.8, 0.7], [0.85, 0.86, 0.6], [0.7, 0.6, 0.5], [0.7, 0.5, 0.6]]
    ranks, mean = friedman_ranks(scores)
    np.testing.assert_array_equal(ranks, [[1, 2, 3], [2, 1, 3], [1, 2, 3], [1, 3, 2]])
    np.testing.assert_allclose(mean, [1.25, 2.0, 2.75])
    r = iman_davenport(mean, 4)
    assert r.chi2 == pytest.approx(4.5)
    assert r.f == pytest.approx(27 / 7)
    assert (r.df1, r.df2) == (2, 6)
    assert r.p == pytest.approx(1 - f_cdf_oracle(27 / 7, 2, 6), abs=1e-10)
    assert 0.08 < r.p < 0.09


def test_friedman_trivial_cases():
    _, mean = friedman_ranks([[3, 2, 1]] * 5)
    np.testing.assert_array_equal(mean, [1, 2, 3])
    _, mean = friedman_ranks([[1, 2, 3]] * 5, higher_is_better=False)
    np.testing.assert_array_equal(mean, [1, 2, 3])
    _, mean = friedman_ranks([[0.5] * 4] * 3)
    np.testing.assert_array_equal(mean, [2.5] * 4)
    r = iman_davenport(mean, 3)
    assert (r.chi2, r.f, r.p) == (0.0, 0.0, 1.0)


def test_iman_davenport_degenerate():
    r = iman_davenport([1.0, 2.0, 3.0], 4)
    assert r.degenerate and r.p == 0.0 and math.isinf(r.f)
    with pytest.raises(ValueError):
        iman_davenport([1.0, 2.0], 1)


@given(st.integers(1, 8), st.integers(2, 6), st.data())
def test_ranks_sum_and_monotone_invariance(n, k, data):
    scores = np.array(data.draw(st.lists(st.lists(st.integers(0, 5), min_size=k, max_size=k), min_size=n, max_size=n)), dtype=float)
    ranks, _ = friedman_ranks(scores)
    np.testing.assert_allclose(ranks.sum(axis=1), k * (k + 1) / 2)
    transformed, _ = friedman_ranks(np.exp(scores) * 3 + 1)
    np.testing.assert_array_equal(ranks, transformed)


def test_iman_davenport_p_decreases_with_spread():
    ps = [iman_davenport([2 - d, 2.0, 2 + d], 10).p for d in (0.1, 0.3, 0.5, 0.7)]
    assert ps == sorted(ps, reverse=True)


# --- distribution functions ---------------------------------------------------

def test_cdf_fixed_points():
    assert f_cdf(0.0, 3, 4) == 0.0
    assert normal_cdf(0.0) == 0.5
    assert f_cdf(3.857, 2, 6) == pytest.approx(0.916, abs=1e-3)
    assert f_cdf(math.inf, 2, 3) == 1.0 and f_sf(math.inf, 2, 3) == 0.0


@pytest.mark.slow
def test_f_cdf_against_quadrature():
    rng = np.random.default_rng(5)
    worst = 0.0
    for d1 in range(1, 41, 3):
        for d2 in range(1, 41, 3):
            for x in rng.uniform(0.05, 6.0, size=2):
                got = f_cdf(x, d1, d2)
                worst = max(worst, abs(got - f_cdf_oracle(x, d1, d2)))
                assert got + f_sf(x, d1, d2) == pytest.approx(1.0, abs=1e-12)
    assert worst <= 1e-10


@pytest.mark.parametrize("x", [-4.0, -1.3, -0.2, 0.7, 2.0, 3.9])
def test_normal_cdf_against_quadrature(x):
    assert normal_cdf(x) == pytest.approx(normal_cdf_oracle(x), abs=1e-12)


# --- Rom ------------------------------------------------------------------------

def test_rom_thresholds_by_hand():
    c = rom_thresholds(4, 0.05)
    c3 = (0.05 + 0.05**2 - 3 * 0.025**2) / 3
    c4 = (0.05 + 0.05**2 + 0.05**3 - 4 * 0.025**3 - 6 * c3**2) / 4
    np.testing.assert_allclose(c, [0.05, 0.025, c3, c4], rtol=0, atol=1e-15)
    assert rom_thresholds(1, 0.05).tolist() == [0.05]
    assert np.all(np.diff(rom_thresholds(20)) < 0)


def test_rom_step_up_decisions():
    # largest p passes its threshold, so everything is rejected
    assert rom_reject([0.01, 0.04, 0.03]).tolist() == [True, True, True]
    # only the smallest clears c_3 = 0.016875
    assert rom_reject([0.01, 0.06, 0.03]).tolist() == [True, False, False]
    assert rom_reject([0.02, 0.06, 0.03]).tolist() == [False, False, False]
    # second largest clears c_2 = 0.025
    assert rom_reject([0.02, 0.06, 0.024]).tolist() == [True, False, True]


def test_rom_posthoc_examples():
    k, n = 12, 12
    mean = np.full(k, 7.0)
    mean[3] = 3.0
    res = {r.index: r for r in rom_posthoc(mean, n, control_index=0)}
    assert 0 not in res and len(res) == k - 1
    assert res[3].z == pytest.approx(4.0 / math.sqrt(13 / 6), abs=1e-12)
    assert res[3].z == pytest.approx(2.717, abs=1e-3)
    assert res[3].p == pytest.approx(1 - normal_cdf_oracle(res[3].z), abs=1e-12)
    assert res[3].p == pytest.approx(0.0033, abs=1e-4)
    assert res[5].z == 0.0 and res[5].p == 0.5 and not res[5].reject
    single = rom_posthoc([1.0, 2.0], 10, control_index=1)
    assert single[0].threshold == 0.05
    with pytest.raises(IndexError):
        rom_posthoc([1.0, 2.0], 10, control_index=2)


def test_rom_fwer_quick():
    assert rom_familywise_error(12, 13, trials=20_000, seed=1) <= 0.06


def test_metric_direction():
    assert metric_direction("hamming_loss") is False
    assert metric_direction("f1_macro") is True


def test_fixture_layout():
    with open(FIXTURES / "reference_likelihoods.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 12 * 12 * 5
    assert all(0.0 <= float(r["likelihood"]) <= 1.0 for r in rows)
