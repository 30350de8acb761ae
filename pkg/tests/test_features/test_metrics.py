"""Metrics tests: position error, histograms, relative entropy"""
import math

import numpy as np
import pytest
from scipy.special import ndtr

from features.metrics import (
    discretized_gaussian, entropy_report, error_moments, histogram, histogram_frame,
    interval_fraction, position_error, relative_entropy, tail_fraction,
)
from type_defs import NetworkTruth, Point2
from utils.errors import EmptyInput, LengthMismatch, NotNormalized


def _truth(*sensors):
    return NetworkTruth(anchors=(Point2(0.0, 0.0),), sensors=tuple(Point2(*s) for s in sensors))


class TestPositionError:
    """Mean Euclidean distance between true and estimated sensors"""

    def test_exact(self):
        truth = _truth((0.1, 0.2), (0.3, -0.4))
        assert position_error(truth, truth.sensor_array()).pe == 0.0

    def test_three_four_five(self):
        report = position_error(_truth((0.0, 0.0)), np.array([[0.3, 0.4]]))
        assert report.pe == pytest.approx(0.5)

    def test_mean_over_sensors(self):
        report = position_error(_truth((0.0, 0.0), (1.0, 1.0)), np.array([[0.5, 0.0], [1.0, 1.0]]))
        assert report.pe == pytest.approx(0.25)
        assert report.per_sensor_errors.tolist() == pytest.approx([0.5, 0.0])

    def test_moments_attached(self):
        report = position_error(_truth((0.0, 0.0)), np.zeros((1, 2)), errors=[1.0, -1.0, 3.0])
        assert report.f1 == pytest.approx(1.0)
        assert report.f2 == pytest.approx(8.0 / 3.0)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            position_error(_truth((0.0, 0.0)), np.zeros((2, 2)))


class TestErrorMoments:
    """Mean and variance of signed and absolute errors"""

    def test_values(self):
        m = error_moments([-1.0, 1.0])
        assert m.f1 == 0.0 and m.f2 == 1.0
        assert m.f1_abs == 1.0 and m.f2_abs == 0.0

    def test_empty(self):
        with pytest.raises(EmptyInput):
            error_moments([])


class TestHistogram:
    """Symmetric bins around a zero-straddling bin"""

    def test_all_zero(self):
        h = histogram([0.0, 0.0, 0.0], 0.0049)
        assert h.num_bins == 1
        assert h.probabilities.tolist() == [1.0]
        assert h.edges == pytest.approx([-0.00245, 0.00245])

    def test_values_just_outside_zero_bin(self):
        h = histogram([-0.003, 0.003], 0.0049)
        assert h.counts.tolist() == [1, 0, 1]
        assert h.probabilities.tolist() == [0.5, 0.0, 0.5]

    def test_half_open_bins(self):
        w = 0.5
        h = histogram([0.25, -0.25], w)
        # [-0.25, 0.25) holds -0.25, 0.25 opens the next bin
        assert h.counts.tolist() == [0, 1, 1]

    def test_mass_conservation(self):
        rng = np.random.default_rng(4)
        e = rng.normal(0.0, 0.02, size=500)
        h = histogram(e, 0.0049)
        assert h.total == 500
        assert h.probabilities.sum() == pytest.approx(1.0)
        assert len(h.bins) == h.num_bins
        assert np.all((e >= h.edges[0]) & (e < h.edges[-1]))

    def test_counts_match_reported_edges(self):
        w = 0.0049
        e = np.append((np.arange(-30, 31) + 0.5) * w, 0.14454999999999998)
        h = histogram(e, w)
        expected = [int(np.sum((e >= lo) & (e < hi))) for lo, hi in zip(h.edges[:-1], h.edges[1:])]
        assert h.counts.tolist() == expected
        assert h.total == e.size
        assert h.num_bins % 2 == 1
        assert h.edges[0] == pytest.approx(-h.edges[-1])

    def test_gaussian_zero_bin(self):
        rng = np.random.default_rng(0)
        h = histogram(rng.normal(0.0, 0.008, size=1000), 0.0049)
        zero = h.num_bins // 2
        expected = 2.0 * ndtr(0.00245 / 0.008) - 1.0
        assert abs(h.probabilities[zero] - expected) < 0.05

    def test_empty(self):
        with pytest.raises(EmptyInput):
            histogram([], 0.0049)

    def test_bad_width(self):
        with pytest.raises(ValueError):
            histogram([0.1], 0.0)


class TestDiscretizedGaussian:
    """Reference probabilities per bin"""

    def test_single_wide_bin(self):
        assert discretized_gaussian([-1e3, 1e3], 1.0).tolist() == [1.0]

    def test_symmetric(self):
        edges = (np.arange(-5, 7) - 0.5) * 0.0049
        q = discretized_gaussian(edges, 0.008)
        assert np.array_equal(q, q[::-1])
        assert q.sum() == pytest.approx(1.0)

    def test_zero_bin_mass(self):
        edges = np.array([-0.00245, 0.00245])
        wide = (np.arange(-200, 202) - 0.5) * 0.0049
        q = discretized_gaussian(wide, 0.008)
        assert q[200] == pytest.approx(2.0 * ndtr(0.00245 / 0.008) - 1.0, rel=1e-9)
        assert discretized_gaussian(edges, 0.008).tolist() == [1.0]

    def test_floor(self):
        q = discretized_gaussian([50.0, 51.0, 52.0], 1.0, q_floor=1e-12)
        assert np.all(q > 0)

    def test_bad_edges(self):
        with pytest.raises(ValueError):
            discretized_gaussian([0.0, 0.0], 1.0)


class TestRelativeEntropy:
    """D(p || q) in bits"""

    def test_one_bit(self):
        assert relative_entropy([1.0, 0.0], [0.5, 0.5]) == pytest.approx(1.0)

    def test_hand_value(self):
        expected = 0.75 * math.log2(1.5) + 0.25 * math.log2(0.5)
        assert relative_entropy([0.75, 0.25], [0.5, 0.5]) == pytest.approx(expected)
        assert expected == pytest.approx(0.1887, abs=1e-4)

    def test_identical_is_zero(self):
        p = np.array([0.2, 0.3, 0.5])
        assert relative_entropy(p, p) == 0.0

    def test_nonnegative_on_random_simplex(self):
        rng = np.random.default_rng(17)
        for _ in range(1000):
            k = int(rng.integers(1, 12))
            p, q = rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))
            d = relative_entropy(p, q)
            assert d >= 0.0 and math.isfinite(d)

    def test_zero_q_is_floored(self):
        assert math.isfinite(relative_entropy([0.5, 0.5], [1.0, 0.0]))

    def test_errors(self):
        with pytest.raises(LengthMismatch):
            relative_entropy([1.0], [0.5, 0.5])
        with pytest.raises(NotNormalized):
            relative_entropy([0.6, 0.6], [0.5, 0.5])


class TestTailAndReport:
    """Tail fractions, intervals and the combined report"""

    def test_tail_fraction(self):
        assert tail_fraction([0.01, -0.03, 0.05, 0.0], 0.022) == 0.5

    def test_interval_fraction(self):
        assert interval_fraction([-0.00245, 0.0, 0.00245, 0.1], -0.00245, 0.00245) == 0.5

    def test_report_and_frame(self):
        rng = np.random.default_rng(3)
        errors = rng.normal(0.0, 0.008, size=300)
        report = entropy_report(errors, 0.0049, 0.008)
        assert report.d_bits >= 0.0
        assert report.p.sum() == pytest.approx(1.0)
        df = histogram_frame(report)
        assert list(df.columns) == ["bin_lo", "bin_hi", "count", "p", "q"]
        assert int(df["count"].sum()) == 300
        assert df["q"].sum() == pytest.approx(1.0)

    def test_matched_reference_beats_wide_errors(self):
        rng = np.random.default_rng(5)
        narrow = entropy_report(rng.normal(0.0, 0.008, size=2000), 0.0049, 0.008).d_bits
        wide = entropy_report(rng.normal(0.0, 0.05, size=2000), 0.0049, 0.008).d_bits
        assert narrow < wide
