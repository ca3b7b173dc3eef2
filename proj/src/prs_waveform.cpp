#include "synthrf/prs_waveform.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "synthrf/multipath.hpp"
#include "synthrf/nr_sequence.hpp"
#include "synthrf/random.hpp"

namespace synthrf::nr {

namespace {

std::invalid_argument invalid(const std::string& what) { return std::invalid_argument("prs config: " + what); }

bool symbols_allowed(int comb, int n) {
    switch (comb) {
        case 2: return n == 2 || n == 4 || n == 6 || n == 12;
        case 4: return n == 4 || n == 12;
        case 6: return n == 6 || n == 12;
        case 12: return n == 12;
        default: return false;
    }
}

std::int64_t floor_mod(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

}  // namespace

void PrsResourceConfig::validate() const {
    if (resource_set_period_slots < 1) throw invalid("resource set period must be positive");
    if (resource_offset_slots < 0 || resource_offset_slots >= resource_set_period_slots) {
        throw invalid("resource offset must be in [0, period)");
    }
    if (resource_repetition < 1) throw invalid("resource repetition must be positive");
    if (resource_time_gap_slots < 1) throw invalid("resource time gap must be positive");
    if ((resource_repetition - 1) * resource_time_gap_slots >= resource_set_period_slots) {
        throw invalid("repetitions do not fit in one period");
    }
    if (comb_size != 2 && comb_size != 4 && comb_size != 6 && comb_size != 12) {
        throw invalid("comb size must be 2, 4, 6 or 12");
    }
    if (comb_offset < 0 || comb_offset >= comb_size) throw invalid("comb offset must be below comb size");
    if (!symbols_allowed(comb_size, num_symbols)) {
        throw invalid(std::to_string(num_symbols) + " symbols not allowed with comb size " +
                      std::to_string(comb_size));
    }
    if (symbol_start < 0 || symbol_start + num_symbols > 14) throw invalid("PRS symbols exceed the slot");
    if (n_prs_id < 0 || n_prs_id > 4095) throw invalid("n_prs_id must be in 0..4095");
    if (rb_start < 0 || n_rb_prs < 1) throw invalid("PRS resource blocks must be non-empty");
}

void PrsResourceConfig::validate(const CarrierConfig& carrier) const {
    validate();
    carrier.validate();
    if (rb_start + n_rb_prs > carrier.n_rb) throw invalid("PRS resource blocks exceed the carrier");
}

bool is_prs_occasion(const PrsResourceConfig& prs, std::int64_t slot_index) {
    const std::int64_t rel = floor_mod(slot_index - prs.resource_offset_slots, prs.resource_set_period_slots);
    return rel % prs.resource_time_gap_slots == 0 &&
           rel / prs.resource_time_gap_slots < prs.resource_repetition;
}

bool is_prs_slot(const PrsResourceConfig& prs, std::int64_t slot_index) {
    if (!is_prs_occasion(prs, slot_index)) return false;
    if (prs.muting_pattern.empty()) return true;
    const std::int64_t shifted = slot_index - prs.resource_offset_slots;
    const std::int64_t period = prs.resource_set_period_slots;
    const std::int64_t occasion = (shifted - floor_mod(shifted, period)) / period;
    const auto bits = static_cast<std::int64_t>(prs.muting_pattern.size());
    return prs.muting_pattern[static_cast<std::size_t>(floor_mod(occasion, bits))];
}

int comb_symbol_shift(int comb_size, int symbol_offset) {
    static constexpr std::array<int, 2> k2{0, 1};
    static constexpr std::array<int, 4> k4{0, 2, 1, 3};
    static constexpr std::array<int, 6> k6{0, 3, 1, 4, 2, 5};
    static constexpr std::array<int, 12> k12{0, 6, 3, 9, 1, 7, 4, 10, 2, 8, 5, 11};
    if (symbol_offset < 0) throw std::invalid_argument("negative PRS symbol offset");
    switch (comb_size) {
        case 2: return k2[static_cast<std::size_t>(symbol_offset % 2)];
        case 4: return k4[static_cast<std::size_t>(symbol_offset % 4)];
        case 6: return k6[static_cast<std::size_t>(symbol_offset % 6)];
        case 12: return k12[static_cast<std::size_t>(symbol_offset % 12)];
        default: throw std::invalid_argument("comb size must be 2, 4, 6 or 12");
    }
}

ResourceGrid generate_prs_symbols(const CarrierConfig& carrier, const PrsResourceConfig& prs,
                                  std::int64_t slot_index) {
    prs.validate(carrier);
    if (slot_index < 0) throw std::invalid_argument("slot index must be non-negative");
    ResourceGrid grid(carrier.subcarriers(), carrier.symbols_per_slot);
    if (!is_prs_slot(prs, slot_index)) return grid;

    const int slot_in_frame = static_cast<int>(slot_index % carrier.slots_per_frame);
    const int per_symbol = 12 * prs.n_rb_prs / prs.comb_size;
    const int m_start = 12 * prs.rb_start / prs.comb_size;
    for (int l = prs.symbol_start; l < prs.symbol_start + prs.num_symbols; ++l) {
        const auto c_init = prs_c_init(prs.n_prs_id, slot_in_frame, l, carrier.symbols_per_slot);
        const auto r = qpsk_sequence(c_init, static_cast<std::size_t>(m_start + per_symbol));
        const int shift = (prs.comb_offset + comb_symbol_shift(prs.comb_size, l - prs.symbol_start)) % prs.comb_size;
        for (int m = m_start; m < m_start + per_symbol; ++m) {
            grid.set(m * prs.comb_size + shift, l, r[static_cast<std::size_t>(m)], CellLabel::prs);
        }
    }
    return grid;
}

ResourceGrid generate_pdsch_filler(const CarrierConfig& carrier, std::uint64_t seed, std::int64_t slot_index,
                                   const std::optional<PrsResourceConfig>& prs) {
    carrier.validate();
    ResourceGrid grid(carrier.subcarriers(), carrier.symbols_per_slot);
    const bool reserve = prs && is_prs_slot(*prs, slot_index);
    if (prs) prs->validate(carrier);
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(slot_index)));
    const double a = 1.0 / std::sqrt(2.0);
    for (int l = 0; l < carrier.symbols_per_slot; ++l) {
        if (reserve && l >= prs->symbol_start && l < prs->symbol_start + prs->num_symbols) continue;
        for (int k = 0; k < carrier.subcarriers(); ++k) {
            const double i = rng.sign();
            const double q = rng.sign();
            grid.set(k, l, Complex(a * i, a * q), CellLabel::pdsch);
        }
    }
    return grid;
}

std::size_t PrsGenConfig::slot_count() const {
    const double slots = duration_s / carrier.slot_duration_s();
    const double whole = std::round(slots);
    if (!(whole >= 1.0) || std::abs(slots - whole) > 1e-6) {
        throw std::invalid_argument("duration must be a whole number of slots");
    }
    return static_cast<std::size_t>(whole);
}

std::vector<ResourceGrid> gnb_grids(const PrsGenConfig& cfg, std::size_t gnb_index) {
    const auto& gnb = cfg.gnbs.at(gnb_index);
    const std::size_t slots = cfg.slot_count();
    const std::uint64_t filler_seed = derive_seed(cfg.seed, 0x70647363ull, gnb_index);
    std::vector<ResourceGrid> grids;
    grids.reserve(slots);
    for (std::size_t s = 0; s < slots; ++s) {
        const auto slot = static_cast<std::int64_t>(s);
        auto grid = generate_prs_symbols(cfg.carrier, gnb.prs, slot);
        if (gnb.pdsch_filler) grid.overlay(generate_pdsch_filler(cfg.carrier, filler_seed, slot, gnb.prs));
        grids.push_back(std::move(grid));
    }
    return grids;
}

dsp::SignalBuffer synthesize_gnb(const PrsGenConfig& cfg, const channel::ChannelSet& channels,
                                 std::optional<double> reference_delay_s) {
    cfg.carrier.validate();
    if (cfg.gnbs.empty()) throw std::invalid_argument("no gNB sources to synthesize");
    std::vector<std::string> ids;
    for (const auto& g : cfg.gnbs) ids.push_back(g.source_id);
    const double d_min = reference_delay_s.value_or(channel::minimum_initial_delay(channels, ids));

    std::size_t total = 0;
    for (std::size_t s = 0; s < cfg.slot_count(); ++s) {
        total += static_cast<std::size_t>(cfg.carrier.slot_samples(static_cast<std::int64_t>(s)));
    }
    const double fs = cfg.carrier.sample_rate_hz();
    channel::MultipathCombiner combiner(channels, fs, total, d_min);
    for (std::size_t n = 0; n < cfg.gnbs.size(); ++n) {
        const auto grids = gnb_grids(cfg, n);
        const auto clean = ofdm_modulate(grids, cfg.carrier);
        combiner.add(cfg.gnbs[n].source_id, clean.samples());
    }
    auto out = std::move(combiner).finish();
    if (cfg.cn0_dbhz) {
        auto samples = std::move(out).release();
        dsp::add_awgn_in_place(samples, dsp::noise_power_for_cn0(1.0, *cfg.cn0_dbhz, fs),
                               derive_seed(cfg.seed, 0x6e6f697365ull));
        return dsp::SignalBuffer(std::move(samples), fs);
    }
    return out;
}

PrsArrival prs_time_of_arrival(const dsp::SignalBuffer& buf, const CarrierConfig& carrier,
                               const PrsResourceConfig& prs, std::int64_t first_slot) {
    prs.validate(carrier);
    std::vector<ResourceGrid> grids;
    std::size_t covered = 0;
    for (std::int64_t s = first_slot; covered < buf.size(); ++s) {
        grids.push_back(generate_prs_symbols(carrier, prs, s));
        covered += static_cast<std::size_t>(carrier.slot_samples(s));
    }
    if (covered != buf.size()) throw std::invalid_argument("buffer is not a whole number of slots");
    const auto replica = ofdm_modulate(grids, carrier, first_slot);
    if (dsp::mean_power(replica.samples()) == 0.0) {
        throw std::invalid_argument("no PRS occasion inside the buffer");
    }
    const auto corr = dsp::fft_correlate(buf.samples(), replica.samples());
    std::size_t best = 0;
    double best_p = -1.0, sum = 0.0;
    for (std::size_t i = 0; i < corr.size(); ++i) {
        const double p = std::norm(corr[i]);
        sum += p;
        if (p > best_p) {
            best_p = p;
            best = i;
        }
    }
    const double mean = sum / static_cast<double>(corr.size());
    return {static_cast<std::int64_t>(best), 10.0 * std::log10(best_p / mean)};
}

}  // namespace synthrf::nr
