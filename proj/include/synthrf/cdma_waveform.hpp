#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "synthrf/channel.hpp"
#include "synthrf/dsp.hpp"
#include "synthrf/prn.hpp"

namespace synthrf::cdma {

struct CdmaSource {
    std::string source_id;
    int prn_id = 1;
};

struct CdmaGenConfig {
    double sample_rate_hz = 38.192e6;
    double if_hz = 9.548e6;
    double chipping_rate_hz = 1.023e6;
    double data_bit_s = 0.020;
    double duration_s = 0.4;
    std::vector<CdmaSource> sources;
    std::uint64_t data_seed = 0;
    bool data_modulation = true;
    // AWGN at this C/N0 relative to a unit-power (0 dB) path; none when unset.
    std::optional<double> cn0_dbhz;
    std::uint64_t noise_seed = 0;

    static CdmaGenConfig satellite();
    static CdmaGenConfig haps();

    std::size_t sample_count() const;
    double code_period_s() const { return prn::kCaCodeLength / chipping_rate_hz; }

    /// Throws std::invalid_argument. Sampling is complex, so adequacy means
    /// f_s >= 2 R_c and |f_IF| < f_s / 2.
    void validate() const;
};

/// d(t) c(t) exp(j 2 pi f_IF t) for the configured duration. The chip
/// stream passes through the polyphase resampler (R_c -> f_s), is aligned
/// so chip k is centred at (k + 1/2) / R_c and scaled to unit mean power.
/// d(t) is a +-1 bit stream at 1/t_D seeded from data_seed and the PRN.
dsp::SignalBuffer generate_clean_signal(const prn::SpreadingCode& code, const CdmaGenConfig& cfg);

/// Band-limited, unit-power code samples at baseband with no data bits.
std::vector<dsp::Complex> sampled_code(const prn::SpreadingCode& code, double sample_rate_hz,
                                       std::size_t sample_count);

/// Clean signal per configured source, channel applied and summed, then
/// optional AWGN. The reference delay defaults to the earliest initial
/// path delay among the configured sources.
dsp::SignalBuffer synthesize(const CdmaGenConfig& cfg, const channel::ChannelSet& channels,
                             std::optional<double> reference_delay_s = std::nullopt);

}  // namespace synthrf::cdma
