#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "synthrf/dsp.hpp"

namespace synthrf::channel {

using dsp::Complex;

enum class SourceKind { satellite, haps, gnb };

std::string_view to_string(SourceKind kind);
/// Throws std::invalid_argument for an unknown name.
SourceKind parse_source_kind(std::string_view name);

/// Complex gain H[k,t] and delay D[k,t] of one propagation path, one entry
/// per channel snapshot.
struct PathSeries {
    std::vector<Complex> coefficients;
    std::vector<double> delays_s;

    std::size_t size() const { return coefficients.size(); }
    friend bool operator==(const PathSeries&, const PathSeries&) = default;
};

struct SourceChannel {
    std::string source_id;
    SourceKind kind = SourceKind::satellite;
    bool los = true;
    std::vector<PathSeries> paths;  // path 0 arrives first at snapshot 0

    double initial_delay_s() const { return paths.front().delays_s.front(); }
    friend bool operator==(const SourceChannel&, const SourceChannel&) = default;
};

struct ChannelSet {
    std::vector<SourceChannel> sources;
    double update_rate_hz = 40e3;
    double duration_s = 0.4;

    std::size_t snapshot_count() const;
    const SourceChannel& find(std::string_view source_id) const;  // throws std::out_of_range
    const SourceChannel* find_if_present(std::string_view source_id) const;

    /// Throws std::invalid_argument naming the first violated invariant.
    void validate() const;

    friend bool operator==(const ChannelSet&, const ChannelSet&) = default;
};

inline constexpr double kPureLos = std::numeric_limits<double>::infinity();

struct PathSpec {
    double initial_delay_s = 0.0;
    double delay_rate = 0.0;  // seconds per second
    double power_db = 0.0;
    double doppler_hz = 0.0;
    double rician_k_db = kPureLos;  // path 0 of a LOS source only
};

struct SourceSpec {
    std::string source_id;
    SourceKind kind = SourceKind::satellite;
    bool los = true;
    double fading_spread_hz = 100.0;  // maximum Doppler of the diffuse component
    std::vector<PathSpec> paths;
};

struct ChannelSpec {
    std::vector<SourceSpec> sources;
    double update_rate_hz = 40e3;
    double duration_s = 0.4;
    std::uint64_t seed = 0;
};

inline constexpr int kFadingOscillators = 128;

/// Built-in stand-in for an external channel generator. Each path is
/// H[k,t] = sqrt(P_k) g_k(t) exp(j 2 pi f_d,k t / f_ch), D[k,t] = D_k + rate_k t / f_ch,
/// where g_k is Rician (path 0 of a LOS source) or Rayleigh fading from a
/// sum of sinusoids, normalized to unit power over the generated window.
ChannelSet generate_synthetic_channel(const ChannelSpec& spec);

/// Unit-power fading gain from a sum of kFadingOscillators sinusoids.
std::vector<Complex> sum_of_sinusoids(std::size_t snapshots, double update_rate_hz,
                                      double max_doppler_hz, std::uint64_t seed);

/// Evaluates a path series, sampled at f_ch, at an arbitrary sample index
/// of a signal running at target_rate_hz: I/Q and delay are interpolated
/// linearly; the last snapshot is held beyond the end.
class CoefficientInterpolator {
public:
    CoefficientInterpolator(const PathSeries& series, double update_rate_hz, double target_rate_hz);

    Complex coefficient(std::size_t sample_index) const;
    double delay_s(std::size_t sample_index) const;

private:
    struct Position {
        std::size_t index;
        double frac;
    };
    Position locate(std::size_t sample_index) const;

    const PathSeries* series_;
    double step_;  // snapshots per output sample
};

/// Brings a path series from f_ch to target_rate_hz. Throws
/// std::invalid_argument when target < f_ch and std::out_of_range when
/// n_samples runs more than one snapshot past the series.
PathSeries resample_coefficients(const PathSeries& series, double update_rate_hz,
                                 double target_rate_hz, std::size_t n_samples);

struct SpectrumResult {
    std::vector<double> frequency_hz;  // ascending, (-f_ch/2, +f_ch/2]
    std::vector<double> power_db;
    double peak_frequency_hz = 0.0;
    double peak_power_db = 0.0;
};

/// Doppler spectrum of the path-summed coefficient series over the first
/// nfft snapshots (Hann window). 0 dB is a unit-amplitude tone.
SpectrumResult doppler_spectrum(const SourceChannel& source, double update_rate_hz,
                                std::size_t nfft = 1024);

/// Power-weighted mean phase advance of the path sum, in Hz. Used as the
/// ground-truth Doppler of a source.
double mean_doppler_hz(const SourceChannel& source, double update_rate_hz);

}  // namespace synthrf::channel
