import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gofkit.binned import (
    Histogram,
    asymptotic_p_value,
    bin_count_rule,
    bin_uniform,
    chi2_statistic,
)
from gofkit.core import Sample, exponential, gauss1d, uniform01


class TestChi2Statistic:
    def test_exact_match_is_zero(self):
        h = Histogram(counts=[10, 10], expectations=[10.0, 10.0])
        value, dof = chi2_statistic(h, mode="pearson")
        assert value == 0.0 and dof == 2

    def test_pearson_value(self):
        h = Histogram(counts=[12, 8], expectations=[10.0, 10.0])
        value, dof = chi2_statistic(h, mode="pearson")
        assert value == pytest.approx(0.8, abs=1e-14)
        assert dof == 2

    def test_multinomial_dof(self):
        h = Histogram(counts=[25, 25, 25, 25], expectations=[25.0] * 4)
        value, dof = chi2_statistic(h, mode="multinomial")
        assert value == 0.0 and dof == 3

    def test_multinomial_requires_matching_total(self):
        h = Histogram(counts=[30, 30], expectations=[25.0, 25.0])
        with pytest.raises(ValueError):
            chi2_statistic(h, mode="multinomial")

    def test_gaussian_mode_uses_variances(self):
        h = Histogram(counts=[12, 8], expectations=[10.0, 10.0], variances=[4.0, 4.0])
        value, dof = chi2_statistic(h, mode="gaussian")
        assert value == pytest.approx(2.0, abs=1e-14)
        assert dof == 2

    def test_zero_expectation_rejected(self):
        h = Histogram(counts=[1, 1], expectations=[0.0, 2.0])
        with pytest.raises(ValueError):
            chi2_statistic(h, mode="pearson")

    def test_unknown_mode(self):
        h = Histogram(counts=[1], expectations=[1.0])
        with pytest.raises(ValueError):
            chi2_statistic(h, mode="nope")


class TestBinCountRule:
    def test_spec_values(self):
        assert bin_count_rule(100) == 13
        assert bin_count_rule(1) == 2
        assert bin_count_rule(32) == 8

    @given(st.integers(1, 10**6))
    def test_at_least_one_bin(self, n):
        assert bin_count_rule(n) >= 1


class TestBinUniform:
    def test_equal_width_counts(self):
        h = bin_uniform(Sample.from_1d([0.2, 0.7]), uniform01(), 2, policy="equal_width")
        assert h.counts.tolist() == [1, 1]

    def test_equal_probability_edges_exponential(self):
        h = bin_uniform(Sample.from_1d([0.5]), exponential(1.0), 4, policy="equal_probability")
        expected = [-np.log(1 - q) for q in (0.25, 0.5, 0.75)]
        assert np.allclose(h.edges[1:-1], expected, atol=1e-8)
        assert np.allclose(h.expectations, 0.25, atol=1e-9)

    def test_point_on_interior_edge_goes_right(self):
        h = bin_uniform(Sample.from_1d([0.5]), uniform01(), 2, policy="equal_width")
        assert h.counts.tolist() == [0, 1]

    def test_top_edge_point_stays_in_last_bin(self):
        h = bin_uniform(Sample.from_1d([1.0]), uniform01(), 4, policy="equal_width")
        assert h.counts.tolist() == [0, 0, 0, 1]

    def test_unbounded_support_needs_probability_binning(self):
        with pytest.raises(ValueError):
            bin_uniform(Sample.from_1d([0.5]), exponential(1.0), 4, policy="equal_width")

    def test_gaussian_quantile_binning(self):
        h = bin_uniform(Sample.from_1d([0.0]), gauss1d(0.0, 1.0), 2, policy="equal_probability")
        assert h.edges[1] == pytest.approx(0.0, abs=1e-10)

    @given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=80), st.integers(1, 12))
    def test_counts_always_sum_to_n(self, xs, nbins):
        h = bin_uniform(Sample.from_1d(xs), uniform01(), nbins, policy="equal_width")
        assert h.counts.sum() == len(xs)

    def test_multivariate_sample_rejected(self):
        with pytest.raises(ValueError):
            bin_uniform(Sample(np.zeros((3, 2))), uniform01(), 2)


def test_asymptotic_p_value_is_chi2_tail():
    # median of chi2 with 1 dof is ~0.4549
    assert asymptotic_p_value(0.4549364, 1) == pytest.approx(0.5, abs=1e-6)
