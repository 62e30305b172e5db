import numpy as np
import pytest
from conftest import LAMBDA
from hypothesis import given, settings
from hypothesis import strategies as st

from aim3d import (ArrayGeometry, ChannelData, Element, LfmSpec, NoiseSpec, PointTarget,
                   RadarDataCube, SampledWaveform, Scene, build_data_cube, compress_channels,
                   generate_lfm, generate_noise, lfm_train, matched_filter, synthesize_received)
from aim3d.compression import mainlobe_width, peak_sidelobe_level_db, reference_from_loopback
from aim3d.geometry import random_lattice_array

SPEC = LfmSpec()


def delayed(x, k, n=None):
    n = n or x.size + k
    out = np.zeros(n, dtype=complex)
    out[k:k + x.size] = x
    return out


def oversampled_chirp_autocorrelation(factor=10):
    """Oracle: direct autocorrelation of the chirp sampled ``factor`` times faster."""
    B, T = SPEC.bandwidth_hz, SPEC.pulse_width_s
    t = np.arange(int(round(T / SPEC.sample_interval_s * factor))) * SPEC.sample_interval_s / factor
    x = np.exp(2j * np.pi * (-0.5 * B * t + 0.5 * B / T * t**2))
    return np.correlate(x, x, mode="full")


class TestMatchedFilter:
    def test_autocorrelation_peak(self):
        pulse = generate_lfm(SPEC)
        out = matched_filter(pulse, pulse)
        assert out.peak_lag() == 0
        assert out.values[0].real == pytest.approx(1000.0)
        assert len(out) == 1000

    def test_delay_of_ten_samples(self):
        pulse = generate_lfm(SPEC)
        sig = SampledWaveform(delayed(pulse.samples, 10, 5000), SPEC.sample_interval_s)
        assert matched_filter(sig, pulse).peak_lag() == 10

    def test_peak_sidelobe_level(self):
        pulse = generate_lfm(SPEC)
        sig = SampledWaveform(delayed(pulse.samples, 1500, 4000), SPEC.sample_interval_s)
        psl = peak_sidelobe_level_db(matched_filter(sig, pulse).values, upsample=8)
        oracle = peak_sidelobe_level_db(oversampled_chirp_autocorrelation())
        assert psl == pytest.approx(-13.2, abs=0.7)
        assert oracle == pytest.approx(-13.2, abs=0.7)
        assert psl == pytest.approx(oracle, abs=0.7)

    def test_integer_lags_fall_on_sinc_nulls(self):
        # at fs = B the un-interpolated sidelobes are far below the continuous ones
        pulse = generate_lfm(SPEC)
        sig = SampledWaveform(delayed(pulse.samples, 1500, 4000), SPEC.sample_interval_s)
        assert peak_sidelobe_level_db(matched_filter(sig, pulse).values) < -20

    def test_mainlobe_width_is_one_over_bandwidth(self):
        pulse = generate_lfm(SPEC)
        sig = SampledWaveform(delayed(pulse.samples, 500, 3000), SPEC.sample_interval_s)
        width_s = mainlobe_width(matched_filter(sig, pulse).values, SPEC.sample_interval_s)
        assert width_s * 3e8 / 2 == pytest.approx(1.5, rel=0.15)

    @settings(max_examples=25, deadline=None)
    @given(n=st.integers(8, 300), m=st.integers(1, 64), seed=st.integers(0, 2**32 - 1))
    def test_direct_and_fft_agree(self, n, m, seed):
        m = min(m, n)
        rng = np.random.default_rng(seed)
        s = SampledWaveform(rng.standard_normal(n) + 1j * rng.standard_normal(n), 1.0)
        h = SampledWaveform(rng.standard_normal(m) + 1j * rng.standard_normal(m), 1.0)
        a = matched_filter(s, h, method="fft").values
        b = matched_filter(s, h, method="direct").values
        assert np.max(np.abs(a - b)) <= 1e-6 * np.max(np.abs(b))

    def test_matches_numpy_correlate(self):
        rng = np.random.default_rng(3)
        s = rng.standard_normal(50) + 1j * rng.standard_normal(50)
        h = rng.standard_normal(7) + 1j * rng.standard_normal(7)
        out = matched_filter(SampledWaveform(s, 1.0), SampledWaveform(h, 1.0)).values
        # np.correlate(s, h)[k] = sum_n s[n + k] conj(h[n])
        full = np.correlate(np.concatenate([s, np.zeros(7)]), h, mode="valid")
        np.testing.assert_allclose(out, full[:50], atol=1e-12)

    def test_rejects_bad_inputs(self):
        pulse = generate_lfm(SPEC)
        with pytest.raises(ValueError):
            matched_filter(SampledWaveform(np.ones(10), SPEC.sample_interval_s), pulse)
        with pytest.raises(ValueError):
            matched_filter(SampledWaveform(np.ones(5000), 2e-8), pulse)
        with pytest.raises(ValueError):
            matched_filter(pulse, pulse, method="sparse")


class TestCompressionGain:
    def test_peak_snr_gain_is_time_bandwidth_product(self):
        pulse = generate_lfm(SPEC)
        noise = generate_noise(NoiseSpec(1.0, SPEC.sample_interval_s, 100e-6, seed=21)).samples
        echo = delayed(pulse.samples, 3000, noise.size)
        ref = SampledWaveform(pulse.samples / np.sqrt(pulse.energy), SPEC.sample_interval_s)
        clean = matched_filter(SampledWaveform(echo, SPEC.sample_interval_s), ref).values
        noisy = matched_filter(SampledWaveform(noise, SPEC.sample_interval_s), ref).values
        gain_db = 10 * np.log10(np.abs(clean[3000]) ** 2 / np.mean(np.abs(noisy) ** 2))
        assert gain_db == pytest.approx(30.0, abs=2.0)


def small_array_channels(n_targets=1, noise=0.0, spec=SPEC, with_noise_tx=False):
    tx = [(0.15, 0.15, "lfm_tx")]
    if with_noise_tx:
        tx += [(-0.15, -0.15, "noise_tx"), (0.15, -0.15, "noise_tx"), (-0.15, 0.15, "noise_tx")]
    geo = random_lattice_array(23, 2 * LAMBDA, (10, 10), LAMBDA, seed=38, transmitters=tx,
                               loopback=True)
    targets = [PointTarget((0.1 * i, 0, 6.0 + 3 * i)) for i in range(n_targets)]
    waves = {geo.by_role("lfm_tx")[0].id: lfm_train(spec)}
    for i, e in enumerate(geo.by_role("noise_tx")):
        waves[e.id] = generate_noise(NoiseSpec(0.1, spec.sample_interval_s,
                                               spec.total_duration_s, i))
    return geo, synthesize_received(Scene(targets, noise), geo, waves, seed=5)


class TestCompressChannels:
    def test_reference_from_loopback_is_unit_energy_first_pulse(self):
        _, ch = small_array_channels(0)
        ref = reference_from_loopback(ch, 1000)
        pulse = generate_lfm(SPEC)
        assert ref.energy == pytest.approx(1.0)
        np.testing.assert_allclose(ref.samples, pulse.samples / np.sqrt(1000), atol=1e-12)

    def test_loopback_and_ideal_references_agree(self):
        _, ch = small_array_channels(1)
        a = compress_channels(ch, generate_lfm(SPEC), use_loopback=True)
        b = compress_channels(ch, generate_lfm(SPEC), use_loopback=False)
        for cid in a:
            np.testing.assert_allclose(a[cid].values, b[cid].values, atol=1e-9)

    def test_all_zero_channel_compresses_to_zero(self):
        _, ch = small_array_channels(0)
        out = compress_channels(ch, generate_lfm(SPEC))
        assert all(not np.any(o.values) for o in out.values())

    def test_loopback_excluded(self):
        geo, ch = small_array_channels(0)
        out = compress_channels(ch, generate_lfm(SPEC))
        assert list(out) == geo.receiver_ids
        assert len(out) == 23 and ch.loopback_id not in out

    def test_hamming_taper_lowers_sidelobes(self):
        pulse = generate_lfm(SPEC)
        ch = ChannelData(delayed(pulse.samples, 1500, 4000)[None, :], [0], SPEC.sample_interval_s)
        plain = compress_channels(ch, pulse)[0].values
        tapered = compress_channels(ch, pulse, taper="hamming")[0].values
        assert peak_sidelobe_level_db(tapered, 8) < peak_sidelobe_level_db(plain, 8) - 10
        with pytest.raises(ValueError):
            compress_channels(ch, pulse, taper="kaiser")


class TestDataCube:
    def test_shape_and_range_bin(self):
        _, ch = small_array_channels(1)
        cube = build_data_cube(compress_channels(ch, generate_lfm(SPEC)), SPEC)
        assert cube.shape == (5000, 10, 23)
        assert cube.range_bin_m == pytest.approx(1.5, rel=1e-3)
        assert cube.pulse_interval_s == pytest.approx(50e-6)

    def test_target_is_stationary_across_pulses(self):
        _, ch = small_array_channels(1, noise=1e-4, with_noise_tx=True)
        cube = build_data_cube(compress_channels(ch, generate_lfm(SPEC)), SPEC)
        k = int(np.argmax(np.abs(cube.data[:, 0, 0])))
        assert k == 4
        mags = np.abs(cube.data[k, :, 0])
        np.testing.assert_allclose(mags, mags.mean(), rtol=0.05)

    def test_length_mismatch_needs_truncate_flag(self):
        rec = np.zeros((2, 50_001), dtype=complex)
        with pytest.raises(ValueError, match="truncate"):
            RadarDataCube.from_records(rec, 5000, 10, 1e-8, [0, 1])
        cube = RadarDataCube.from_records(rec, 5000, 10, 1e-8, [0, 1], truncate=True)
        assert cube.shape == (5000, 10, 2)

    def test_short_records_rejected_even_with_truncate(self):
        rec = np.zeros((1, 49_999), dtype=complex)
        with pytest.raises(ValueError):
            RadarDataCube.from_records(rec, 5000, 10, 1e-8, [0], truncate=True)

    @settings(max_examples=20, deadline=None)
    @given(n_range=st.integers(1, 20), n_pulse=st.integers(1, 6), n_ch=st.integers(1, 5))
    def test_records_round_trip(self, n_range, n_pulse, n_ch):
        rng = np.random.default_rng(n_range * 100 + n_pulse * 10 + n_ch)
        rec = rng.standard_normal((n_ch, n_range * n_pulse)) + 0j
        cube = RadarDataCube.from_records(rec, n_range, n_pulse, 1e-8, list(range(n_ch)))
        np.testing.assert_array_equal(cube.channel_records(), rec)
        # cube[k, p, c] is record c at sample p * n_range + k
        np.testing.assert_array_equal(cube.data[:, :, 0].T.ravel(), rec[0])

    def test_range_axis(self):
        cube = RadarDataCube(np.zeros((4, 1, 1)), 1.5, 1e-5)
        np.testing.assert_allclose(cube.range_axis(), [0, 1.5, 3.0, 4.5])

    def test_to_channels_recovers_sample_interval(self):
        cube = RadarDataCube.from_records(np.ones((2, 20)), 10, 2, 1e-8, [4, 7])
        ch = cube.to_channels()
        assert ch.sample_interval_s == pytest.approx(1e-8)
        assert ch.channel_ids == [4, 7]


def test_geometry_with_two_receivers_only():
    geo = ArrayGeometry([Element(0, 0, 0), Element(1, LAMBDA / 2, 0),
                         Element(2, 0, 0.1, "lfm_tx")], LAMBDA)
    assert len(geo.receivers) == 2
