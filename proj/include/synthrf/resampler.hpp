#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "synthrf/dsp.hpp"

namespace synthrf::dsp {

class UnsupportedRatioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RationalRatio {
    std::int64_t up;
    std::int64_t down;
};

inline constexpr std::int64_t kMaxRatioTerm = std::int64_t{1} << 20;

/// Best continued-fraction convergent up/down of target/source with both
/// terms <= max_term whose relative error is within rel_tol. Throws
/// UnsupportedRatioError when no such convergent exists.
RationalRatio approximate_ratio(double target_rate_hz, double source_rate_hz,
                                std::int64_t max_term = kMaxRatioTerm, double rel_tol = 1e-9);

/// Rational-ratio polyphase resampler: upsample by L, Kaiser-windowed sinc
/// low-pass, downsample by M. The filter has 60 dB stopband attenuation,
/// cutoff at 0.45 of the lower of the two rates and a transition band of
/// 0.1 of that rate, so the stopband starts at the lower Nyquist frequency.
/// The filter is linear phase with its delay removed.
class PolyphaseResampler {
public:
    PolyphaseResampler(std::int64_t up, std::int64_t down);

    std::int64_t up() const { return up_; }
    std::int64_t down() const { return down_; }
    std::size_t tap_count() const { return taps_.size(); }

    /// Output sample m is the filtered upsampled stream at index
    /// m * down + start_offset (in units of the upsampled rate), so input
    /// sample k sits at upsampled index k * up. Inputs outside the span are
    /// taken as zero.
    std::vector<Complex> process(std::span<const Complex> input, std::size_t output_count,
                                 std::int64_t start_offset = 0) const;

    /// Output length matching the input duration.
    std::size_t natural_output_count(std::size_t input_count) const;

private:
    std::int64_t up_;
    std::int64_t down_;
    std::vector<double> taps_;  // already scaled by up_
    std::int64_t center_;
};

/// Resamples to target_rate_hz; identity (a copy) when the rates match.
SignalBuffer resample(const SignalBuffer& buf, double target_rate_hz);

}  // namespace synthrf::dsp
