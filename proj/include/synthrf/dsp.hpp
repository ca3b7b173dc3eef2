#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "synthrf/fft.hpp"

namespace synthrf::dsp {

/// Uniformly sampled complex I/Q series. The IF annotation records where the
/// carrier sits inside the complex band (0 for baseband).
class SignalBuffer {
public:
    /// Throws std::invalid_argument for a non-positive or non-finite rate.
    SignalBuffer(std::vector<Complex> samples, double sample_rate_hz, double if_offset_hz = 0.0,
                 double epoch_s = 0.0);

    std::span<const Complex> samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    double sample_rate_hz() const { return sample_rate_hz_; }
    double if_offset_hz() const { return if_offset_hz_; }
    double epoch_s() const { return epoch_s_; }
    double duration_s() const { return static_cast<double>(samples_.size()) / sample_rate_hz_; }

    /// Moves the sample storage out, leaving this buffer empty.
    std::vector<Complex> release() && { return std::move(samples_); }

    SignalBuffer with_samples(std::vector<Complex> samples) const {
        return SignalBuffer(std::move(samples), sample_rate_hz_, if_offset_hz_, epoch_s_);
    }

private:
    std::vector<Complex> samples_;
    double sample_rate_hz_;
    double if_offset_hz_;
    double epoch_s_;
};

/// Multiplies every sample by exp(j(2 pi f i / fs + phase)); the IF
/// annotation moves by freq_hz.
SignalBuffer mix_carrier(const SignalBuffer& buf, double freq_hz, double phase_rad = 0.0);

/// In-place version over a raw span. first_index offsets the time origin so
/// a long signal can be mixed in pieces with a continuous phase.
void mix_in_place(std::span<Complex> samples, double sample_rate_hz, double freq_hz,
                  double phase_rad = 0.0, std::int64_t first_index = 0);

/// Integer + fractional part of a delay expressed in samples.
struct SampleDelay {
    std::int64_t whole;
    double frac;  // in [0, 1)

    static SampleDelay from_seconds(double delay_s, double sample_rate_hz);

    /// Linearly interpolated x(i - delay); zero before the delayed start.
    Complex sample(std::span<const Complex> x, std::int64_t i) const {
        const std::int64_t k = i - whole;
        const auto n = static_cast<std::int64_t>(x.size());
        const Complex a = (k >= 0 && k < n) ? x[static_cast<std::size_t>(k)] : Complex{};
        if (frac == 0.0) return a;
        const Complex b = (k - 1 >= 0 && k - 1 < n) ? x[static_cast<std::size_t>(k - 1)] : Complex{};
        return (1.0 - frac) * a + frac * b;
    }

    /// Tap weights for x(i - delay) when x carries exp(j 2 pi c n) with c in
    /// cycles per sample: the envelope is interpolated linearly and the
    /// carrier phase is carried over exactly. Weights apply to x[i - whole]
    /// and x[i - whole - 1]; c = 0 gives the plain linear weights.
    std::pair<Complex, Complex> carrier_weights(double cycles_per_sample) const;
};

struct DelayedSignal {
    SignalBuffer buffer;
    bool delay_exceeds_duration = false;  // output is all zeros
};

/// output[i] = input(i/fs - delay_s) by linear interpolation. Throws
/// std::invalid_argument for a negative delay.
DelayedSignal fractional_delay(const SignalBuffer& buf, double delay_s);

inline constexpr double kNoiseOff = -std::numeric_limits<double>::infinity();

/// Adds circular complex Gaussian noise with total power 10^(dBW/10),
/// split evenly between I and Q. kNoiseOff returns the input unchanged.
SignalBuffer add_awgn(const SignalBuffer& buf, double noise_power_dbw, std::uint64_t seed);
void add_awgn_in_place(std::span<Complex> samples, double noise_power_dbw, std::uint64_t seed);

/// Noise power (dBW) that puts a signal of the given power at cn0_dbhz
/// when sampled at sample_rate_hz (complex sampling, noise bandwidth fs).
double noise_power_for_cn0(double signal_power_w, double cn0_dbhz, double sample_rate_hz);

/// Circular cross-correlation c[l] = sum_i a[i + l] * conj(b[i]) computed as
/// IFFT(FFT(a) * conj(FFT(b))). Throws std::invalid_argument on length
/// mismatch.
std::vector<Complex> fft_correlate(std::span<const Complex> a, std::span<const Complex> b);

double mean_power(std::span<const Complex> x);

}  // namespace synthrf::dsp
