#include "synthrf/resampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace synthrf::dsp {

namespace {

constexpr double kStopbandDb = 60.0;

double kaiser_beta(double attenuation_db) {
    if (attenuation_db > 50.0) return 0.1102 * (attenuation_db - 8.7);
    if (attenuation_db >= 21.0) {
        return 0.5842 * std::pow(attenuation_db - 21.0, 0.4) + 0.07886 * (attenuation_db - 21.0);
    }
    return 0.0;
}

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

}  // namespace

RationalRatio approximate_ratio(double target_rate_hz, double source_rate_hz, std::int64_t max_term,
                                double rel_tol) {
    if (!(target_rate_hz > 0.0) || !(source_rate_hz > 0.0)) {
        throw std::invalid_argument("resampling rates must be positive");
    }
    const double x = target_rate_hz / source_rate_hz;
    // Convergents h/k of the continued fraction of x.
    std::int64_t h_prev = 1, h = static_cast<std::int64_t>(std::floor(x));
    std::int64_t k_prev = 0, k = 1;
    double frac = x - std::floor(x);
    for (int iter = 0; iter < 64; ++iter) {
        if (h > 0 && h <= max_term && k <= max_term &&
            std::abs(static_cast<double>(h) / static_cast<double>(k) - x) <= rel_tol * x) {
            return {h, k};
        }
        if (frac < 1e-300) break;
        const double inv = 1.0 / frac;
        const auto a = static_cast<std::int64_t>(std::floor(inv));
        frac = inv - std::floor(inv);
        const std::int64_t h_next = a * h + h_prev;
        const std::int64_t k_next = a * k + k_prev;
        if (h_next > max_term || k_next > max_term) break;
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
    }
    throw UnsupportedRatioError("rate ratio " + std::to_string(x) +
                                " is not representable with terms <= " + std::to_string(max_term));
}

PolyphaseResampler::PolyphaseResampler(std::int64_t up, std::int64_t down) : up_(up), down_(down) {
    if (up <= 0 || down <= 0) throw std::invalid_argument("resampling factors must be positive");
    // Frequencies normalized to the upsampled rate (source rate * up).
    const double lower = 1.0 / static_cast<double>(std::max(up, down));
    const double cutoff = 0.45 * lower;
    const double transition = 0.1 * lower;
    const double beta = kaiser_beta(kStopbandDb);
    auto n = static_cast<std::int64_t>(
        std::ceil((kStopbandDb - 7.95) / (2.285 * 2.0 * std::numbers::pi * transition))) + 1;
    if (n % 2 == 0) ++n;
    center_ = (n - 1) / 2;
    taps_.resize(static_cast<std::size_t>(n));
    const double i0_beta = std::cyl_bessel_i(0.0, beta);
    for (std::int64_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i - center_);
        const double r = t / static_cast<double>(center_);
        const double window = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
        taps_[static_cast<std::size_t>(i)] =
            static_cast<double>(up) * 2.0 * cutoff * sinc(2.0 * cutoff * t) * window;
    }
}

std::size_t PolyphaseResampler::natural_output_count(std::size_t input_count) const {
    const auto num = static_cast<std::int64_t>(input_count) * up_;
    return static_cast<std::size_t>((num + down_ - 1) / down_);
}

std::vector<Complex> PolyphaseResampler::process(std::span<const Complex> input,
                                                 std::size_t output_count,
                                                 std::int64_t start_offset) const {
    std::vector<Complex> out(output_count);
    const auto n_in = static_cast<std::int64_t>(input.size());
    const auto n_taps = static_cast<std::int64_t>(taps_.size());
    for (std::size_t m = 0; m < output_count; ++m) {
        // y[m] = sum_j h[j] * x_up[u + center - j], x_up nonzero at multiples of up.
        const std::int64_t pos = static_cast<std::int64_t>(m) * down_ + start_offset + center_;
        std::int64_t j0 = pos % up_;
        if (j0 < 0) j0 += up_;
        std::int64_t k = (pos - j0) / up_;
        Complex acc{};
        for (std::int64_t j = j0; j < n_taps; j += up_, --k) {
            if (k < 0) break;
            if (k < n_in) acc += taps_[static_cast<std::size_t>(j)] * input[static_cast<std::size_t>(k)];
        }
        out[m] = acc;
    }
    return out;
}

SignalBuffer resample(const SignalBuffer& buf, double target_rate_hz) {
    if (!(target_rate_hz > 0.0)) throw std::invalid_argument("target rate must be positive");
    if (target_rate_hz == buf.sample_rate_hz()) {
        return buf;
    }
    const auto ratio = approximate_ratio(target_rate_hz, buf.sample_rate_hz());
    if (ratio.up == ratio.down) {
        return SignalBuffer(std::vector<Complex>(buf.samples().begin(), buf.samples().end()),
                            target_rate_hz, buf.if_offset_hz(), buf.epoch_s());
    }
    PolyphaseResampler rs(ratio.up, ratio.down);
    auto out = rs.process(buf.samples(), rs.natural_output_count(buf.size()));
    return SignalBuffer(std::move(out), target_rate_hz, buf.if_offset_hz(), buf.epoch_s());
}

}  // namespace synthrf::dsp
