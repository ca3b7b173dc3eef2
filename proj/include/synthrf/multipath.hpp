#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synthrf/channel.hpp"
#include "synthrf/dsp.hpp"

namespace synthrf::channel {

/// Smallest initial delay D[n,k,0] over the paths of the named sources.
/// Throws std::invalid_argument when a name is missing from the set.
double minimum_initial_delay(const ChannelSet& channels, std::span<const std::string> source_ids);

/// Accumulates delayed, coefficient-weighted copies of clean per-source
/// signals into one output buffer, one source at a time, so callers can
/// drop each clean signal as soon as it has been added. Path k of source n
/// is shifted by D[n,k,0] - D_min and multiplied by its coefficient series
/// interpolated to the signal rate.
class MultipathCombiner {
public:
    /// Throws std::out_of_range when the channel series is shorter than
    /// sample_count at sample_rate_hz.
    MultipathCombiner(const ChannelSet& channels, double sample_rate_hz, std::size_t sample_count,
                      double reference_delay_s);

    /// carrier_hz names a carrier already present in clean (an IF); the
    /// sub-sample part of each delay then interpolates only the envelope so
    /// the carrier keeps its amplitude. Throws std::invalid_argument for an
    /// unknown source or a length mismatch.
    void add(const std::string& source_id, std::span<const dsp::Complex> clean, double carrier_hz = 0.0);

    dsp::SignalBuffer finish(double if_offset_hz = 0.0, double epoch_s = 0.0) &&;

private:
    const ChannelSet* channels_;
    double sample_rate_hz_;
    double reference_delay_s_;
    std::vector<dsp::Complex> out_;
};

/// Applies each source's channel to its clean signal and sums the results,
/// sources in key order then paths in index order. D_min defaults to the
/// minimum initial delay over the sources in clean; pass reference_delay_s
/// to share one reference across separate calls.
dsp::SignalBuffer apply_channel_and_sum(const std::map<std::string, dsp::SignalBuffer>& clean,
                                        const ChannelSet& channels,
                                        std::optional<double> reference_delay_s = std::nullopt);

}  // namespace synthrf::channel
