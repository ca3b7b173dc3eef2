#include "synthrf/ofdm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace synthrf::nr {

namespace {

std::size_t bin_of(int k, int subcarriers, int n_fft) {
    const int bin = k - subcarriers / 2;
    return static_cast<std::size_t>((bin % n_fft + n_fft) % n_fft);
}

}  // namespace

void CarrierConfig::validate() const {
    if (n_cell_id < 0 || n_cell_id > 1007) throw std::invalid_argument("n_cell_id must be in 0..1007");
    if (!(scs_hz > 0.0)) throw std::invalid_argument("subcarrier spacing must be positive");
    numerology();
    if (n_rb < 1) throw std::invalid_argument("n_rb must be positive");
    if (n_fft < 12 * n_rb) throw std::invalid_argument("n_fft must be at least 12 * n_rb");
    if (n_fft % 128 != 0) throw std::invalid_argument("n_fft must be a multiple of 128");
    if (symbols_per_slot != 14) throw std::invalid_argument("only the normal cyclic prefix (14 symbols) is supported");
    if (slots_per_frame != 10 * (1 << numerology())) {
        throw std::invalid_argument("slots_per_frame does not match the subcarrier spacing");
    }
    if (std::abs(frame_duration_s - 0.010) > 1e-12) throw std::invalid_argument("frame duration must be 10 ms");
}

int CarrierConfig::numerology() const {
    const double r = scs_hz / 15e3;
    const int mu = static_cast<int>(std::lround(std::log2(r)));
    if (mu < 0 || mu > 6 || std::abs(r - static_cast<double>(1 << mu)) > 1e-9) {
        throw std::invalid_argument("subcarrier spacing must be 15 kHz * 2^mu");
    }
    return mu;
}

int CarrierConfig::cp_length(std::int64_t slot_index, int symbol) const {
    const int mu = numerology();
    const auto per_sf = static_cast<std::int64_t>(slots_per_subframe());
    const std::int64_t l_sf = (slot_index % per_sf) * symbols_per_slot + symbol;
    int cp = 144 * n_fft / 2048;
    if (l_sf % (7 * (1 << mu)) == 0) cp += 16 * (1 << mu) * n_fft / 2048;
    return cp;
}

std::int64_t CarrierConfig::slot_samples(std::int64_t slot_index) const {
    std::int64_t n = 0;
    for (int l = 0; l < symbols_per_slot; ++l) n += n_fft + cp_length(slot_index, l);
    return n;
}

ResourceGrid::ResourceGrid(int subcarriers, int symbols)
    : subcarriers_(subcarriers), symbols_(symbols) {
    if (subcarriers <= 0 || symbols <= 0) throw std::invalid_argument("grid dimensions must be positive");
    cells_.assign(static_cast<std::size_t>(subcarriers) * static_cast<std::size_t>(symbols), Complex{});
    labels_.assign(cells_.size(), CellLabel::empty);
}

std::size_t ResourceGrid::count(CellLabel what) const {
    std::size_t n = 0;
    for (auto l : labels_) n += l == what;
    return n;
}

void ResourceGrid::overlay(const ResourceGrid& other) {
    if (other.subcarriers_ != subcarriers_ || other.symbols_ != symbols_) {
        throw std::invalid_argument("grid dimensions differ");
    }
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (other.labels_[i] == CellLabel::empty) continue;
        if (labels_[i] != CellLabel::empty) throw std::invalid_argument("grids overlap");
        cells_[i] = other.cells_[i];
        labels_[i] = other.labels_[i];
    }
}

dsp::SignalBuffer ofdm_modulate(std::span<const ResourceGrid> grids, const CarrierConfig& carrier,
                                std::int64_t first_slot) {
    carrier.validate();
    const int n_fft = carrier.n_fft;
    std::int64_t total = 0;
    for (std::size_t s = 0; s < grids.size(); ++s) {
        const auto& g = grids[s];
        if (g.subcarriers() > n_fft) {
            throw std::invalid_argument("grid has " + std::to_string(g.subcarriers()) +
                                        " subcarriers, more than n_fft");
        }
        if (g.symbols() != carrier.symbols_per_slot) throw std::invalid_argument("grid symbol count mismatch");
        total += carrier.slot_samples(first_slot + static_cast<std::int64_t>(s));
    }

    std::vector<Complex> out(static_cast<std::size_t>(total));
    std::vector<Complex> body(static_cast<std::size_t>(n_fft));
    const double scale = std::sqrt(static_cast<double>(n_fft));  // ifft already divides by N
    std::size_t pos = 0;
    for (std::size_t s = 0; s < grids.size(); ++s) {
        const auto& g = grids[s];
        const auto slot = first_slot + static_cast<std::int64_t>(s);
        for (int l = 0; l < carrier.symbols_per_slot; ++l) {
            std::fill(body.begin(), body.end(), Complex{});
            for (int k = 0; k < g.subcarriers(); ++k) body[bin_of(k, g.subcarriers(), n_fft)] = g.at(k, l);
            dsp::ifft_in_place(body);
            const auto cp = static_cast<std::size_t>(carrier.cp_length(slot, l));
            for (std::size_t i = 0; i < cp; ++i) out[pos + i] = scale * body[static_cast<std::size_t>(n_fft) - cp + i];
            pos += cp;
            for (int i = 0; i < n_fft; ++i) out[pos + static_cast<std::size_t>(i)] = scale * body[static_cast<std::size_t>(i)];
            pos += static_cast<std::size_t>(n_fft);
        }
    }
    return dsp::SignalBuffer(std::move(out), carrier.sample_rate_hz());
}

namespace {

// Splits a sample count into whole slots starting at first_slot.
std::size_t count_slots(std::size_t n_samples, const CarrierConfig& carrier, std::int64_t first_slot) {
    std::size_t slots = 0;
    std::size_t used = 0;
    while (used < n_samples) {
        used += static_cast<std::size_t>(carrier.slot_samples(first_slot + static_cast<std::int64_t>(slots)));
        ++slots;
    }
    if (used != n_samples) {
        throw std::invalid_argument("buffer of " + std::to_string(n_samples) +
                                    " samples is not a whole number of slots");
    }
    return slots;
}

}  // namespace

double cyclic_prefix_correlation(std::span<const Complex> samples, const CarrierConfig& carrier,
                                 std::int64_t first_slot) {
    carrier.validate();
    const std::size_t slots = count_slots(samples.size(), carrier, first_slot);
    const auto n_fft = static_cast<std::size_t>(carrier.n_fft);
    double sum = 0.0;
    int counted = 0;
    std::size_t pos = 0;
    for (std::size_t s = 0; s < slots; ++s) {
        for (int l = 0; l < carrier.symbols_per_slot; ++l) {
            const auto cp = static_cast<std::size_t>(carrier.cp_length(first_slot + static_cast<std::int64_t>(s), l));
            Complex cross{};
            double ea = 0.0, eb = 0.0;
            for (std::size_t i = 0; i < cp; ++i) {
                const Complex a = samples[pos + i];
                const Complex b = samples[pos + n_fft + i];
                cross += a * std::conj(b);
                ea += std::norm(a);
                eb += std::norm(b);
            }
            if (ea > 0.0 && eb > 0.0) {
                sum += std::abs(cross) / std::sqrt(ea * eb);
                ++counted;
            }
            pos += cp + n_fft;
        }
    }
    return counted == 0 ? 1.0 : sum / counted;
}

DemodulatedSignal ofdm_demodulate(const dsp::SignalBuffer& buf, const CarrierConfig& carrier,
                                  std::int64_t first_slot) {
    carrier.validate();
    const auto x = buf.samples();
    const std::size_t slots = count_slots(x.size(), carrier, first_slot);
    const int n_fft = carrier.n_fft;
    const int k_total = carrier.subcarriers();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_fft));

    DemodulatedSignal out;
    out.grids.reserve(slots);
    std::vector<Complex> body(static_cast<std::size_t>(n_fft));
    std::size_t pos = 0;
    for (std::size_t s = 0; s < slots; ++s) {
        ResourceGrid grid(k_total, carrier.symbols_per_slot);
        for (int l = 0; l < carrier.symbols_per_slot; ++l) {
            pos += static_cast<std::size_t>(carrier.cp_length(first_slot + static_cast<std::int64_t>(s), l));
            std::copy(x.begin() + static_cast<std::ptrdiff_t>(pos),
                      x.begin() + static_cast<std::ptrdiff_t>(pos) + n_fft, body.begin());
            dsp::fft_in_place(body);
            for (int k = 0; k < k_total; ++k) grid.at(k, l) = scale * body[bin_of(k, k_total, n_fft)];
            pos += static_cast<std::size_t>(n_fft);
        }
        out.grids.push_back(std::move(grid));
    }
    out.cp_correlation = cyclic_prefix_correlation(x, carrier, first_slot);
    out.cp_aligned = out.cp_correlation >= kCpAlignedThreshold;
    return out;
}

}  // namespace synthrf::nr
