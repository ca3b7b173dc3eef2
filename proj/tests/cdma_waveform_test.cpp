#include <gtest/gtest.h>

#include <cmath>

#include "support/oracles.hpp"
#include "synthrf/acquisition.hpp"
#include "synthrf/cdma_waveform.hpp"
#include "synthrf/multipath.hpp"

using namespace synthrf;
using cdma::CdmaGenConfig;
using dsp::Complex;

namespace {

CdmaGenConfig short_config(double duration_s, std::vector<cdma::CdmaSource> sources) {
    auto cfg = CdmaGenConfig::satellite();
    cfg.duration_s = duration_s;
    cfg.sources = std::move(sources);
    cfg.data_seed = 5;
    return cfg;
}

channel::ChannelSet static_channels(const std::vector<oracle::SceneSource>& scene, double duration_s,
                                    double base_delay_s = 0.0672) {
    return channel::generate_synthetic_channel(oracle::scene_spec(scene, duration_s, 1, base_delay_s));
}

}  // namespace

TEST(CdmaConfig, Defaults) {
    const auto sat = CdmaGenConfig::satellite();
    EXPECT_EQ(sat.sample_rate_hz, 38.192e6);
    EXPECT_EQ(sat.if_hz, 9.548e6);
    EXPECT_EQ(sat.chipping_rate_hz, 1.023e6);
    const auto haps = CdmaGenConfig::haps();
    EXPECT_EQ(haps.if_hz, 15e6);
    EXPECT_EQ(haps.chipping_rate_hz, 10.23e6);
    EXPECT_NO_THROW(haps.validate());
    auto full = sat;
    full.duration_s = 0.4;
    EXPECT_EQ(full.sample_count(), 15'276'800u);
}

TEST(CdmaConfig, Invariants) {
    auto cfg = short_config(0.001, {});
    cfg.sample_rate_hz = 1.5e6;
    cfg.if_hz = 0.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = short_config(0.001, {});
    cfg.if_hz = 20e6;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = short_config(0.001, {});
    cfg.data_bit_s = 0.0205;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = short_config(0.001, {{"x", 40}});
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(CleanSignal, OneMillisecondIsOneCodePeriod) {
    const auto code = prn::generate_ca_code(1);
    const auto sig = cdma::generate_clean_signal(code, short_config(0.001, {}));
    EXPECT_EQ(sig.size(), 38192u);
    EXPECT_EQ(sig.if_offset_hz(), 9.548e6);
    EXPECT_NEAR(dsp::mean_power(sig.samples()), 1.0, 0.02);
}

TEST(CleanSignal, AllOnesCodeIsPureIfTone) {
    const prn::SpreadingCode ones(1, std::vector<double>(1023, 1.0), 1.023e6);
    auto cfg = short_config(0.001, {});
    cfg.data_modulation = false;
    auto sig = cdma::generate_clean_signal(ones, cfg);
    std::vector<Complex> spec(sig.samples().begin(), sig.samples().end());
    dsp::fft_in_place(spec);
    std::size_t best = 0;
    for (std::size_t k = 1; k < spec.size(); ++k) {
        if (std::norm(spec[k]) > std::norm(spec[best])) best = k;
    }
    // One bin is 1 kHz over one code period.
    EXPECT_EQ(static_cast<double>(best) * 1000.0, 9.548e6);
    double rest = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        if (k != best) rest += std::norm(spec[k]);
    }
    EXPECT_LT(rest / std::norm(spec[best]), 1e-6);
}

TEST(CleanSignal, SelfAcquisitionPeakAtZeroLag) {
    const auto code = prn::generate_ca_code(7);
    const auto sig = cdma::generate_clean_signal(code, short_config(0.001, {}));
    const auto base = dsp::mix_carrier(sig, -sig.if_offset_hz());
    const auto local = receiver::local_code(code, 38.192e6, 38192);
    const auto corr = dsp::fft_correlate(base.samples(), local);
    std::vector<double> r(corr.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::norm(corr[i]);
    std::size_t peak = 0;
    for (std::size_t i = 1; i < r.size(); ++i) {
        if (r[i] > r[peak]) peak = i;
    }
    EXPECT_EQ(peak, 0u);
    // Secondary peak: the largest value once both skirts of the main lobe
    // have stopped falling.
    const std::size_t n = r.size();
    std::size_t right = 0, left = 0;
    while (right + 1 < n && r[right + 1] < r[right]) ++right;
    while (left + 1 < n && r[n - 1 - left] < r[(n - left) % n]) ++left;
    double secondary = 0.0;
    for (std::size_t i = right + 1; i < n - left; ++i) secondary = std::max(secondary, r[i]);
    // The chip stream is band-limited to 0.45 R_c, so the pulse correlation
    // rings like sinc(0.9 x): first sidelobe |sinc(1.43)| = 0.217, i.e.
    // 13.3 dB below the peak in power, less the Gold sidelobe perturbation.
    EXPECT_GE(10.0 * std::log10(r[peak] / secondary), 11.0);
}

TEST(CleanSignal, ChipLevelSelfCorrelationClearsTwentyDb) {
    // The sequence itself, one sample per chip, keeps the Gold bound:
    // 20 log10(1023 / 65) = 23.9 dB.
    for (int prn : {1, 7, 14, 19, 21}) {
        const auto code = prn::generate_ca_code(prn);
        std::vector<Complex> chips(code.chips().begin(), code.chips().end());
        const auto corr = oracle::direct_circular_correlation(chips, chips);
        double secondary = 0.0;
        for (std::size_t i = 1; i < corr.size(); ++i) secondary = std::max(secondary, std::norm(corr[i]));
        EXPECT_GE(10.0 * std::log10(std::norm(corr[0]) / secondary), 20.0) << prn;
    }
}

TEST(CleanSignal, DataBitsFlipOnlyAtBitEdges) {
    const auto code = prn::generate_ca_code(3);
    auto with = short_config(0.1, {});
    auto without = with;
    without.data_modulation = false;
    const auto a = cdma::generate_clean_signal(code, with);
    const auto b = cdma::generate_clean_signal(code, without);
    const std::size_t bit_len = 763840;
    int flips = 0;
    for (std::size_t bit = 0; bit < 5; ++bit) {
        const Complex ratio = a.samples()[bit * bit_len + 100] / b.samples()[bit * bit_len + 100];
        EXPECT_NEAR(std::abs(std::abs(ratio.real()) - 1.0), 0.0, 1e-9);
        for (std::size_t i = bit * bit_len; i < (bit + 1) * bit_len; i += 997) {
            ASSERT_LT(std::abs(a.samples()[i] - ratio.real() * b.samples()[i]), 1e-9);
        }
        if (bit > 0) {
            const Complex prev = a.samples()[bit * bit_len - 1] / b.samples()[bit * bit_len - 1];
            flips += (prev.real() * ratio.real()) < 0;
        }
    }
    EXPECT_GT(flips, 0);
    const auto again = cdma::generate_clean_signal(code, with);
    EXPECT_TRUE(std::equal(a.samples().begin(), a.samples().end(), again.samples().begin()));
}

TEST(ApplyChannel, UnitGainSingleSourceIsClean) {
    const auto code = prn::generate_ca_code(1);
    const auto cfg = short_config(0.002, {{"A", 1}});
    const auto clean = cdma::generate_clean_signal(code, cfg);
    const auto channels = static_channels({{"A", 1}}, 0.002);
    const auto out = channel::apply_channel_and_sum({{"A", clean}}, channels);
    ASSERT_EQ(out.size(), clean.size());
    for (std::size_t i = 0; i < out.size(); ++i) ASSERT_EQ(out.samples()[i], clean.samples()[i]);
}

TEST(ApplyChannel, HalfGainScales) {
    const auto code = prn::generate_ca_code(1);
    const auto cfg = short_config(0.002, {{"A", 1}});
    const auto clean = cdma::generate_clean_signal(code, cfg);
    oracle::SceneSource src{"A", 1};
    src.power_db = 20.0 * std::log10(0.5);
    const auto channels = static_channels({src}, 0.002);
    const auto out = channel::apply_channel_and_sum({{"A", clean}}, channels);
    for (std::size_t i = 0; i < out.size(); ++i) {
        ASSERT_NEAR(std::abs(out.samples()[i] - 0.5 * clean.samples()[i]), 0.0, 1e-12);
    }
}

TEST(ApplyChannel, Errors) {
    const auto code = prn::generate_ca_code(1);
    const auto clean = cdma::generate_clean_signal(code, short_config(0.002, {}));
    const auto channels = static_channels({{"A", 1}}, 0.002);
    EXPECT_THROW(channel::apply_channel_and_sum({{"B", clean}}, channels), std::invalid_argument);
    const auto short_channels = static_channels({{"A", 1}}, 0.001);
    EXPECT_THROW(channel::apply_channel_and_sum({{"A", clean}}, short_channels), std::out_of_range);
}

TEST(Synthesize, RelativeDelayShiftsCodePhase) {
    // Initial delays 10 us and 12 us: source B lands 2 us (76.384 samples) after A.
    // The correlation top is flat to well under 0.1 % across +-1 sample, so
    // cross-correlation from the other code decides which integer lag wins;
    // a parabola through the peak and its neighbours recovers the delay itself.
    auto cfg = short_config(0.002, {{"A", 1}, {"B", 2}});
    cfg.data_modulation = false;
    const auto channels = static_channels({{"A", 1, 0.0}, {"B", 2, 2e-6}}, 0.002, 10e-6);
    const auto rx = cdma::synthesize(cfg, channels);
    receiver::AcquisitionConfig acq;
    acq.keep_surface = true;
    const auto a = receiver::acquire(rx, prn::generate_ca_code(1), acq);
    const auto b = receiver::acquire(rx, prn::generate_ca_code(2), acq);
    ASSERT_TRUE(a.acquired);
    ASSERT_TRUE(b.acquired);
    const auto refined = [](const receiver::AcquisitionResult& r) {
        const auto lags = static_cast<long>(r.surface_lags);
        std::size_t row = 0;
        while (r.surface_freqs_hz[row] != r.coarse_freq_hz) ++row;
        const auto at = [&](long lag) { return r.surface[row * r.surface_lags + static_cast<std::size_t>((lag + lags) % lags)]; };
        const long c = r.code_phase_samples;
        const double lo = at(c - 1), mid = at(c), hi = at(c + 1);
        double tau = static_cast<double>(c) + 0.5 * (lo - hi) / (lo - 2.0 * mid + hi);
        return tau > static_cast<double>(lags) / 2.0 ? tau - static_cast<double>(lags) : tau;
    };
    const double expected = 2e-6 * 38.192e6;
    EXPECT_LE(std::abs(static_cast<double>(a.code_phase_samples)), 1.0);
    const auto whole = b.code_phase_samples - a.code_phase_samples;
    EXPECT_TRUE(whole == 76 || whole == 77) << whole;
    EXPECT_NEAR(refined(b) - refined(a), expected, 0.25);
}

TEST(Synthesize, Superposition) {
    auto both = short_config(0.003, {{"A", 1}, {"B", 14}});
    const std::vector<oracle::SceneSource> scene{{"A", 1, 0.0, 1200.0, 0.0, true, 100.0},
                                                 {"B", 14, 3e-6, -700.0, -2.0, false, 80.0}};
    const auto channels = static_channels(scene, 0.003);
    const double d_min = 0.0672;
    auto only_a = both;
    only_a.sources = {{"A", 1}};
    auto only_b = both;
    only_b.sources = {{"B", 14}};
    const auto sum = cdma::synthesize(both, channels, d_min);
    const auto a = cdma::synthesize(only_a, channels, d_min);
    const auto b = cdma::synthesize(only_b, channels, d_min);
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < sum.size(); ++i) {
        err += std::norm(sum.samples()[i] - a.samples()[i] - b.samples()[i]);
        ref += std::norm(sum.samples()[i]);
    }
    EXPECT_LT(std::sqrt(err / ref), 1e-9);
}

TEST(Synthesize, ReceivedPowerTracksChannelPower) {
    for (double p_db : {0.0, -6.0}) {
        auto cfg = short_config(0.05, {{"A", 9}});
        std::vector<oracle::SceneSource> scene{{"A", 9, 0.0, 2000.0, p_db, false, 300.0}};
        const auto channels = static_channels(scene, 0.05);
        const auto rx = cdma::synthesize(cfg, channels);
        double h_power = 0.0;
        for (auto v : channels.sources[0].paths[0].coefficients) h_power += std::norm(v);
        h_power /= static_cast<double>(channels.snapshot_count());
        const double measured = dsp::mean_power(rx.samples());
        EXPECT_NEAR(10.0 * std::log10(measured / h_power), 0.0, 0.5) << p_db;
    }
}

TEST(Synthesize, SubSampleDelayKeepsIfPower) {
    // The IF sits at f_s / 4, where plain linear interpolation loses up to 3 dB.
    const auto cfg = short_config(0.005, {{"A", 9}});
    const auto reference = dsp::mean_power(cdma::synthesize(cfg, static_channels({{"A", 9}}, 0.005)).samples());
    for (double frac : {0.25, 0.38, 0.5, 0.73}) {
        const double extra = (1000.0 + frac) / 38.192e6;
        const auto channels = static_channels({{"A", 9, extra}}, 0.005);
        const auto rx = cdma::synthesize(cfg, channels, 0.0672);
        const auto tail = rx.samples().subspan(2000);
        EXPECT_NEAR(10.0 * std::log10(dsp::mean_power(tail) / reference), 0.0, 0.05) << frac;
    }
}

TEST(Synthesize, NoiseFollowsCn0) {
    auto cfg = short_config(0.01, {{"A", 4}});
    cfg.cn0_dbhz = 45.0;
    cfg.noise_seed = 9;
    const auto channels = static_channels({{"A", 4}}, 0.01);
    const auto noisy = cdma::synthesize(cfg, channels);
    auto quiet_cfg = cfg;
    quiet_cfg.cn0_dbhz.reset();
    const auto quiet = cdma::synthesize(quiet_cfg, channels);
    std::vector<Complex> noise(noisy.size());
    for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = noisy.samples()[i] - quiet.samples()[i];
    const double want = std::pow(10.0, (10.0 * std::log10(38.192e6) - 45.0) / 10.0);
    EXPECT_NEAR(dsp::mean_power(noise), want, 0.01 * want);
    const auto again = cdma::synthesize(cfg, channels);
    EXPECT_TRUE(std::equal(noisy.samples().begin(), noisy.samples().end(), again.samples().begin()));
}

TEST(Synthesize, EmptySourceListIsAnError) {
    const auto channels = static_channels({{"A", 1}}, 0.001);
    EXPECT_THROW(cdma::synthesize(short_config(0.001, {}), channels), std::invalid_argument);
}

TEST(Synthesize, UnknownSourceIsAnError) {
    const auto channels = static_channels({{"A", 1}}, 0.001);
    EXPECT_THROW(cdma::synthesize(short_config(0.001, {{"Z", 1}}), channels), std::invalid_argument);
}

TEST(Synthesize, HapsProfile) {
    auto cfg = CdmaGenConfig::haps();
    cfg.duration_s = 0.002;
    cfg.sources = {{"H1", 21}};
    cfg.data_modulation = false;
    const auto channels = static_channels({{"H1", 21, 0.0, 300.0}}, 0.002);
    const auto rx = cdma::synthesize(cfg, channels);
    EXPECT_EQ(rx.size(), 76384u);
    receiver::AcquisitionConfig acq;
    const auto res = receiver::acquire(rx, prn::generate_ca_code(21, 10.23e6), acq);
    EXPECT_TRUE(res.acquired);
    EXPECT_EQ(res.code_phase_samples, 0);
    EXPECT_NEAR(res.coarse_freq_hz, 300.0, 250.0);
}
