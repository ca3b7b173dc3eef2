#include "synthrf/dsp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "synthrf/random.hpp"

namespace synthrf::dsp {

SignalBuffer::SignalBuffer(std::vector<Complex> samples, double sample_rate_hz, double if_offset_hz,
                           double epoch_s)
    : samples_(std::move(samples)),
      sample_rate_hz_(sample_rate_hz),
      if_offset_hz_(if_offset_hz),
      epoch_s_(epoch_s) {
    if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_)) {
        throw std::invalid_argument("sample rate must be positive and finite");
    }
}

void mix_in_place(std::span<Complex> samples, double sample_rate_hz, double freq_hz,
                  double phase_rad, std::int64_t first_index) {
    if (freq_hz == 0.0 && phase_rad == 0.0) return;
    const double step = freq_hz / sample_rate_hz;  // cycles per sample
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double cycles = step * static_cast<double>(first_index + static_cast<std::int64_t>(i));
        cycles -= std::floor(cycles);
        samples[i] *= std::polar(1.0, 2.0 * std::numbers::pi * cycles + phase_rad);
    }
}

SignalBuffer mix_carrier(const SignalBuffer& buf, double freq_hz, double phase_rad) {
    std::vector<Complex> out(buf.samples().begin(), buf.samples().end());
    mix_in_place(out, buf.sample_rate_hz(), freq_hz, phase_rad);
    return SignalBuffer(std::move(out), buf.sample_rate_hz(), buf.if_offset_hz() + freq_hz,
                        buf.epoch_s());
}

SampleDelay SampleDelay::from_seconds(double delay_s, double sample_rate_hz) {
    if (!(delay_s >= 0.0) || !std::isfinite(delay_s)) {
        throw std::invalid_argument("delay must be finite and non-negative");
    }
    const double d = delay_s * sample_rate_hz;
    const double whole = std::floor(d);
    return SampleDelay{static_cast<std::int64_t>(whole), d - whole};
}

std::pair<Complex, Complex> SampleDelay::carrier_weights(double cycles_per_sample) const {
    if (frac == 0.0) return {Complex(1.0, 0.0), Complex{}};
    const double w = 2.0 * std::numbers::pi * cycles_per_sample;
    return {(1.0 - frac) * std::polar(1.0, -w * frac), frac * std::polar(1.0, w * (1.0 - frac))};
}

DelayedSignal fractional_delay(const SignalBuffer& buf, double delay_s) {
    const auto delay = SampleDelay::from_seconds(delay_s, buf.sample_rate_hz());
    const auto x = buf.samples();
    const auto n = static_cast<std::int64_t>(x.size());
    std::vector<Complex> out(x.size());
    if (delay.whole >= n) {
        return {buf.with_samples(std::move(out)), true};
    }
    for (std::int64_t i = delay.whole; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = delay.sample(x, i);
    }
    return {buf.with_samples(std::move(out)), false};
}

void add_awgn_in_place(std::span<Complex> samples, double noise_power_dbw, std::uint64_t seed) {
    if (std::isinf(noise_power_dbw) && noise_power_dbw < 0) return;
    if (std::isnan(noise_power_dbw) || std::isinf(noise_power_dbw)) {
        throw std::invalid_argument("noise power must be finite or off");
    }
    const double sigma = std::sqrt(std::pow(10.0, noise_power_dbw / 10.0) / 2.0);
    Rng rng(seed);
    for (auto& s : samples) {
        const double i = rng.gaussian();
        const double q = rng.gaussian();
        s += Complex(sigma * i, sigma * q);
    }
}

SignalBuffer add_awgn(const SignalBuffer& buf, double noise_power_dbw, std::uint64_t seed) {
    std::vector<Complex> out(buf.samples().begin(), buf.samples().end());
    add_awgn_in_place(out, noise_power_dbw, seed);
    return buf.with_samples(std::move(out));
}

double noise_power_for_cn0(double signal_power_w, double cn0_dbhz, double sample_rate_hz) {
    return 10.0 * std::log10(signal_power_w * sample_rate_hz) - cn0_dbhz;
}

std::vector<Complex> fft_correlate(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("fft_correlate: sequences differ in length");
    }
    std::vector<Complex> fa(a.begin(), a.end());
    std::vector<Complex> fb(b.begin(), b.end());
    fft_in_place(fa);
    fft_in_place(fb);
    for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= std::conj(fb[k]);
    ifft_in_place(fa);
    return fa;
}

double mean_power(std::span<const Complex> x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& v : x) acc += std::norm(v);
    return acc / static_cast<double>(x.size());
}

}  // namespace synthrf::dsp
