#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "synthrf/channel.hpp"
#include "synthrf/ofdm.hpp"

namespace synthrf::nr {

struct PrsResourceConfig {
    int resource_set_period_slots = 10;
    int resource_offset_slots = 0;
    int resource_repetition = 1;
    int resource_time_gap_slots = 1;
    std::vector<bool> muting_pattern;  // one bit per occasion, false = muted; empty = never muted
    int comb_size = 2;
    int comb_offset = 0;
    int num_symbols = 12;
    int symbol_start = 0;
    int n_prs_id = 0;
    int rb_start = 0;
    int n_rb_prs = 52;

    /// Throws std::invalid_argument, including comb sizes and symbol counts
    /// that have no frequency-offset pattern.
    void validate() const;
    void validate(const CarrierConfig& carrier) const;
};

/// Whether the slot falls inside a PRS occasion, muting not applied.
bool is_prs_occasion(const PrsResourceConfig& prs, std::int64_t slot_index);
/// Occasion and not muted.
bool is_prs_slot(const PrsResourceConfig& prs, std::int64_t slot_index);

/// Frequency offset k' of PRS symbol l - symbol_start for a comb size.
int comb_symbol_shift(int comb_size, int symbol_offset);

/// PRS-only grid for one slot (no PRS cells when the slot carries none).
ResourceGrid generate_prs_symbols(const CarrierConfig& carrier, const PrsResourceConfig& prs,
                                  std::int64_t slot_index);

/// Seeded QPSK filler on every cell of the slot, except the PRS symbols of
/// a PRS slot when prs is given.
ResourceGrid generate_pdsch_filler(const CarrierConfig& carrier, std::uint64_t seed, std::int64_t slot_index,
                                   const std::optional<PrsResourceConfig>& prs = std::nullopt);

struct GnbSource {
    std::string source_id;
    PrsResourceConfig prs;
    bool pdsch_filler = true;
};

struct PrsGenConfig {
    CarrierConfig carrier;
    std::vector<GnbSource> gnbs;
    double duration_s = 0.010;
    std::uint64_t seed = 0;
    std::optional<double> cn0_dbhz;  // relative to a unit-power path

    /// Slots covering duration_s; throws unless that is a whole number.
    std::size_t slot_count() const;
};

/// PRS plus optional filler grids for one gNB over the configured slots.
std::vector<ResourceGrid> gnb_grids(const PrsGenConfig& cfg, std::size_t gnb_index);

/// Per gNB: grids, OFDM modulation, channel application; summed over gNBs.
dsp::SignalBuffer synthesize_gnb(const PrsGenConfig& cfg, const channel::ChannelSet& channels,
                                 std::optional<double> reference_delay_s = std::nullopt);

struct PrsArrival {
    std::int64_t delay_samples = 0;
    double peak_to_mean_db = 0.0;
};

/// Circular correlation of buf against the PRS-only waveform of the same
/// slots; returns the lag of the strongest peak.
PrsArrival prs_time_of_arrival(const dsp::SignalBuffer& buf, const CarrierConfig& carrier,
                               const PrsResourceConfig& prs, std::int64_t first_slot = 0);

}  // namespace synthrf::nr
