#include "synthrf/multipath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace synthrf::channel {

double minimum_initial_delay(const ChannelSet& channels, std::span<const std::string> source_ids) {
    double d_min = std::numeric_limits<double>::infinity();
    for (const auto& id : source_ids) {
        const auto* src = channels.find_if_present(id);
        if (!src) throw std::invalid_argument("channel set has no source '" + id + "'");
        for (const auto& path : src->paths) d_min = std::min(d_min, path.delays_s.front());
    }
    return d_min;
}

MultipathCombiner::MultipathCombiner(const ChannelSet& channels, double sample_rate_hz,
                                     std::size_t sample_count, double reference_delay_s)
    : channels_(&channels),
      sample_rate_hz_(sample_rate_hz),
      reference_delay_s_(reference_delay_s),
      out_(sample_count) {
    if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("sample rate must be positive");
    if (!(sample_rate_hz >= channels.update_rate_hz)) {
        throw std::invalid_argument("signal rate is below the channel update rate");
    }
    const double ratio = sample_rate_hz / channels.update_rate_hz;
    const double limit = static_cast<double>(channels.snapshot_count()) * ratio + ratio;
    if (static_cast<double>(sample_count) > limit + 1e-9) {
        throw std::out_of_range("channel covers " + std::to_string(channels.duration_s) +
                                " s, shorter than the " +
                                std::to_string(static_cast<double>(sample_count) / sample_rate_hz) +
                                " s signal");
    }
}

void MultipathCombiner::add(const std::string& source_id, std::span<const dsp::Complex> clean, double carrier_hz) {
    const auto* src = channels_->find_if_present(source_id);
    if (!src) throw std::invalid_argument("channel set has no source '" + source_id + "'");
    if (clean.size() != out_.size()) {
        throw std::invalid_argument("clean signal for '" + source_id + "' has " +
                                    std::to_string(clean.size()) + " samples, expected " +
                                    std::to_string(out_.size()));
    }
    for (const auto& path : src->paths) {
        const double rel = path.delays_s.front() - reference_delay_s_;
        if (rel < 0.0) {
            throw std::invalid_argument("source '" + source_id + "' arrives before the reference delay");
        }
        const auto delay = dsp::SampleDelay::from_seconds(rel, sample_rate_hz_);
        const CoefficientInterpolator h(path, channels_->update_rate_hz, sample_rate_hz_);
        const auto [w0, w1] = delay.carrier_weights(carrier_hz / sample_rate_hz_);
        const auto n = static_cast<std::int64_t>(out_.size());
        for (std::int64_t i = std::min(delay.whole, n); i < n; ++i) {
            const std::int64_t k = i - delay.whole;
            dsp::Complex v = w0 * clean[static_cast<std::size_t>(k)];
            if (k > 0) v += w1 * clean[static_cast<std::size_t>(k - 1)];
            out_[static_cast<std::size_t>(i)] += v * h.coefficient(static_cast<std::size_t>(i));
        }
    }
}

dsp::SignalBuffer MultipathCombiner::finish(double if_offset_hz, double epoch_s) && {
    return dsp::SignalBuffer(std::move(out_), sample_rate_hz_, if_offset_hz, epoch_s);
}

dsp::SignalBuffer apply_channel_and_sum(const std::map<std::string, dsp::SignalBuffer>& clean,
                                        const ChannelSet& channels,
                                        std::optional<double> reference_delay_s) {
    if (clean.empty()) throw std::invalid_argument("no source signals to combine");
    std::vector<std::string> ids;
    for (const auto& [id, buf] : clean) ids.push_back(id);
    const double d_min = reference_delay_s.value_or(minimum_initial_delay(channels, ids));

    const auto& first = clean.begin()->second;
    for (const auto& [id, buf] : clean) {
        if (buf.sample_rate_hz() != first.sample_rate_hz()) {
            throw std::invalid_argument("source '" + id + "' sample rate differs");
        }
    }
    MultipathCombiner combiner(channels, first.sample_rate_hz(), first.size(), d_min);
    for (const auto& [id, buf] : clean) combiner.add(id, buf.samples(), buf.if_offset_hz());
    return std::move(combiner).finish(first.if_offset_hz(), first.epoch_s());
}

}  // namespace synthrf::channel
