import numpy as np
import pytest

from fractal_xcorr import (
    AlignedPair,
    DegenerateFluctuationError,
    DetrendConfig,
    InputError,
    TimeSeries,
    correlation_profile,
    moving_average,
    q_fluctuations,
    q_fluctuations_dcca,
    rho_dmca_classic,
    rho_q_dmca,
)
from fractal_xcorr.fluctuation import (
    FluctuationSet,
    detrended_segments,
    n_segments,
    segment_cross,
    segment_rms,
)
from fractal_xcorr.mc_arfima import McArfimaSpec, generate
from conftest import gaussian_pair


def _profile_pair(pair):
    return np.cumsum(pair.x.values), np.cumsum(pair.y.values)


class TestMovingAverage:
    def test_centered_hand_example(self):
        ma = moving_average([1.0, 2.0, 3.0, 4.0, 5.0], 3, theta=0.5)
        # value at 1-based position 3 is (2+3+4)/3
        assert ma.start == 1
        assert np.allclose(ma.values, [2.0, 3.0, 4.0])
        assert ma.values[3 - 1 - ma.start] == pytest.approx(3.0)

    def test_backward_hand_example(self):
        ma = moving_average([1.0, 2.0, 3.0, 4.0], 2, theta=0.0)
        # theta=0: each value averages the point and its predecessor
        assert ma.start == 1
        assert np.allclose(ma.values, [1.5, 2.5, 3.5])

    def test_forward_variant(self):
        ma = moving_average([1.0, 2.0, 3.0, 4.0], 2, theta=1.0)
        assert ma.start == 0
        assert np.allclose(ma.values, [1.5, 2.5, 3.5])

    def test_constant_profile(self):
        for theta in (0.0, 0.3, 0.5, 1.0):
            ma = moving_average(np.full(40, 7.0), 9, theta=theta)
            assert np.allclose(ma.values, 7.0)
            assert ma.values.size == 32

    def test_window_errors(self):
        with pytest.raises(InputError):
            moving_average(np.arange(5.0), 6)
        with pytest.raises(InputError):
            moving_average(np.arange(5.0), 1)
        with pytest.raises(InputError):
            moving_average(np.arange(5.0), 3, theta=1.5)


class TestSegments:
    def test_segment_counts(self):
        assert n_segments(100, 25) == 3
        assert n_segments(40, 10) == 3
        assert n_segments(39, 10) == 2

    def test_detrended_segments_shape_and_discard(self):
        x = np.cumsum(np.random.default_rng(0).standard_normal(100))
        ma = moving_average(x, 25)
        segs = detrended_segments(x, ma, 25)
        assert segs.shape == (3, 25)
        resid = x[ma.start : ma.stop] - ma.values
        assert np.array_equal(segs.ravel(), resid[:75])

    def test_zero_residual_for_constant_input(self):
        x = np.full(60, 3.0)
        segs = detrended_segments(x, moving_average(x, 10), 10)
        assert np.all(segs == 0.0)

    def test_segment_rms(self):
        assert segment_rms([0.0, 0.0, 0.0]) == 0.0
        assert segment_rms([3.0, -4.0]) == pytest.approx(np.sqrt(12.5))
        seg = np.array([1.0, -2.0, 0.5])
        assert segment_rms(3.0 * seg) == pytest.approx(3.0 * segment_rms(seg))

    def test_segment_cross(self):
        seg = np.array([1.0, -2.0, 0.5])
        assert segment_cross(seg, seg) == pytest.approx(segment_rms(seg) ** 2)
        assert segment_cross(seg, -seg) == pytest.approx(-segment_rms(seg) ** 2)
        assert segment_cross([1.0, -1.0], [1.0, 1.0]) == 0.0
        with pytest.raises(InputError, match="mismatch"):
            segment_cross([1.0, 2.0], [1.0])


class TestQFluctuations:
    def test_identical_pair(self, pair_200):
        same = AlignedPair(pair_200.x, pair_200.x)
        for q in (2.0, 4.0):
            cfg = DetrendConfig(scale_grid=(5, 10, 25), q=q)
            for fs in q_fluctuations(same, cfg):
                assert fs.f_xy_q == pytest.approx(fs.f_x_q, rel=1e-12)
                assert fs.f_y_q == pytest.approx(fs.f_x_q, rel=1e-12)

    def test_negated_pair(self, pair_200):
        neg = AlignedPair(pair_200.x, TimeSeries(-pair_200.x.values))
        cfg = DetrendConfig(scale_grid=(5, 10, 25), q=2.0)
        for fs in q_fluctuations(neg, cfg):
            assert fs.f_xy_q == pytest.approx(-fs.f_x_q, rel=1e-12)

    def test_scale_too_large_rejected(self, pair_200):
        cfg = DetrendConfig(scale_grid=(5, 60), q=2.0)
        with pytest.raises(InputError, match="N/4"):
            q_fluctuations(pair_200, cfg)

    def test_config_validation(self):
        with pytest.raises(InputError):
            DetrendConfig(scale_grid=())
        with pytest.raises(InputError):
            DetrendConfig(scale_grid=(10, 10))
        with pytest.raises(InputError):
            DetrendConfig(scale_grid=(2, 10))
        with pytest.raises(InputError):
            DetrendConfig(scale_grid=(5, 10), q=0.0)
        with pytest.raises(InputError):
            DetrendConfig(scale_grid=(5, 10), theta=-0.1)


class TestRhoProperties:
    scales = (5, 10, 25)

    def test_identity(self):
        for seed in range(100):
            n = 200 if seed % 2 else 1000
            pair = gaussian_pair(seed, n)
            same = AlignedPair(pair.x, pair.x)
            for q in (2.0, 4.0):
                cfg = DetrendConfig(scale_grid=self.scales, q=q)
                for fs in q_fluctuations(same, cfg):
                    rho, _ = rho_q_dmca(fs)
                    assert abs(rho - 1.0) <= 1e-12

    def test_antisymmetry_and_symmetry(self):
        for seed in range(50):
            pair = gaussian_pair(seed, 400, corr=0.4)
            neg = AlignedPair(pair.x, TimeSeries(-pair.y.values))
            swp = AlignedPair(pair.y, pair.x)
            for q in (2.0, 4.0):
                cfg = DetrendConfig(scale_grid=self.scales, q=q)
                rhos = [rho_q_dmca(fs)[0] for fs in q_fluctuations(pair, cfg)]
                rhos_neg = [rho_q_dmca(fs)[0] for fs in q_fluctuations(neg, cfg)]
                rhos_swp = [rho_q_dmca(fs)[0] for fs in q_fluctuations(swp, cfg)]
                assert np.allclose(rhos_neg, -np.array(rhos), atol=1e-12)
                assert np.allclose(rhos_swp, rhos, atol=1e-12)

    def test_scale_invariance(self):
        for seed in range(50):
            pair = gaussian_pair(seed, 400, corr=0.4)
            a, b = 17.0, 0.003
            scaled = AlignedPair(
                TimeSeries(a * pair.x.values), TimeSeries(b * pair.y.values)
            )
            for q in (2.0, 4.0):
                cfg = DetrendConfig(scale_grid=self.scales, q=q)
                rhos = [rho_q_dmca(fs)[0] for fs in q_fluctuations(pair, cfg)]
                rhos_s = [rho_q_dmca(fs)[0] for fs in q_fluctuations(scaled, cfg)]
                assert np.allclose(rhos_s, rhos, atol=1e-10)

    def test_bound(self):
        for seed in range(100):
            pair = gaussian_pair(seed, 200 if seed % 2 else 1000, corr=0.7)
            for q in (2.0, 4.0):
                cfg = DetrendConfig(scale_grid=self.scales, q=q)
                for fs in q_fluctuations(pair, cfg):
                    raw = fs.f_xy_q / np.sqrt(fs.f_x_q * fs.f_y_q)
                    assert abs(raw) <= 1.0 + 1e-9

    def test_capping_branch(self):
        fs = FluctuationSet(scale=10, q=-2.0, f_x_q=1.0, f_y_q=1.0,
                            f_xy_q=1.25, n_segments=5)
        rho, capped = rho_q_dmca(fs)
        assert rho == pytest.approx(0.8)
        assert capped

    def test_degenerate_error(self):
        fs = FluctuationSet(scale=10, q=2.0, f_x_q=0.0, f_y_q=1.0,
                            f_xy_q=0.0, n_segments=5)
        with pytest.raises(DegenerateFluctuationError):
            rho_q_dmca(fs)

    def test_shift_robustness(self):
        # adding a constant to the increments only adds a linear ramp to the
        # profile, which the centered moving average absorbs; odd windows
        # only, since even ones are asymmetric by one point
        pair = gaussian_pair(23, 1000, corr=0.5)
        shifted = AlignedPair(TimeSeries(pair.x.values + 5.0), pair.y)
        cfg = DetrendConfig(scale_grid=(5, 9, 25), q=2.0)
        rhos = [rho_q_dmca(fs)[0] for fs in q_fluctuations(pair, cfg)]
        rhos_sh = [rho_q_dmca(fs)[0] for fs in q_fluctuations(shifted, cfg)]
        assert np.allclose(rhos_sh, rhos, atol=1e-6)


class TestNegativeQ:
    def test_zero_rms_segments_skipped(self):
        # first 30 increments are zero, so early segments have zero residual
        vals = np.random.default_rng(5).standard_normal(200)
        vals[:30] = 0.0
        pair = AlignedPair(TimeSeries(vals), TimeSeries(vals.copy()))
        cfg = DetrendConfig(scale_grid=(5,), q=-2.0)
        fs = q_fluctuations(pair, cfg)[0]
        assert fs.n_skipped > 0
        assert fs.n_segments + fs.n_skipped == 200 // 5 - 1
        assert np.isfinite(fs.f_x_q)


class TestClassicDmca:
    def test_identity_exact(self, pair_1000):
        same = AlignedPair(pair_1000.x, pair_1000.x)
        for s in (10, 50, 200):
            assert rho_dmca_classic(same, s) == pytest.approx(1.0, abs=1e-14)

    def test_independent_pair_small(self):
        hits = 0
        for seed in range(100):
            pair = gaussian_pair(1000 + seed, 10_000)
            if abs(rho_dmca_classic(pair, 20)) < 0.1:
                hits += 1
        assert hits >= 95

    def test_agrees_with_q2_on_arfima(self):
        sample = generate(McArfimaSpec(cross_corr=0.9, length=5000, seed=8))
        pair = AlignedPair(sample.x, sample.y)
        cfg = DetrendConfig(scale_grid=(10, 20, 50, 100), q=2.0)
        for fs in q_fluctuations(pair, cfg):
            rho_seg, _ = rho_q_dmca(fs)
            rho_cls = rho_dmca_classic(pair, fs.scale)
            assert abs(rho_seg - rho_cls) < 0.05


class TestDcca:
    def test_identity(self, pair_1000):
        same = AlignedPair(pair_1000.x, pair_1000.x)
        for q in (2.0, 4.0):
            for fs in q_fluctuations_dcca(same, (5, 10, 50), q):
                rho, _ = rho_q_dmca(fs)
                assert rho == pytest.approx(1.0, abs=1e-12)

    def test_box_count_pooled(self, pair_1000):
        fs = q_fluctuations_dcca(pair_1000, (30,), 2.0)[0]
        assert fs.n_segments == 2 * (1000 // 30)

    def test_linear_pair_degenerate(self):
        t = np.arange(100.0)
        pair = AlignedPair(TimeSeries(np.full(100, 2.0)), TimeSeries(np.full(100, 3.0)))
        fs = q_fluctuations_dcca(pair, (10,), 2.0)[0]
        with pytest.raises(DegenerateFluctuationError):
            rho_q_dmca(fs)
        assert t.size == 100  # profile of a constant series is exactly linear


class TestCorrelationProfile:
    def test_profile_records(self, pair_1000):
        cfg = DetrendConfig(scale_grid=(10, 25, 50), q=2.0)
        prof = correlation_profile(pair_1000, cfg, method="q-DMCA")
        assert prof.method == "q-DMCA"
        assert [s for s, _, _ in prof.points] == [10, 25, 50]
        recs = prof.to_records()
        assert recs[0]["scale"] == 10 and recs[0]["q"] == 2.0
        assert prof.rho_at(25) == prof.points[1][1]
        with pytest.raises(KeyError):
            prof.rho_at(11)

    def test_unknown_method(self, pair_1000):
        cfg = DetrendConfig(scale_grid=(10, 25), q=2.0)
        with pytest.raises(InputError):
            correlation_profile(pair_1000, cfg, method="DFA")
