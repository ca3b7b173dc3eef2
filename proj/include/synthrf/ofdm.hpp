#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "synthrf/dsp.hpp"

namespace synthrf::nr {

using dsp::Complex;

struct CarrierConfig {
    int n_cell_id = 0;
    double scs_hz = 15e3;
    int n_rb = 52;
    int n_fft = 1024;
    int symbols_per_slot = 14;  // normal cyclic prefix
    int slots_per_frame = 10;
    double frame_duration_s = 0.010;
    double carrier_hz = 4e9;  // metadata only

    /// Throws std::invalid_argument.
    void validate() const;

    double sample_rate_hz() const { return static_cast<double>(n_fft) * scs_hz; }
    int subcarriers() const { return 12 * n_rb; }
    int numerology() const;  // mu, scs = 15 kHz * 2^mu
    int slots_per_subframe() const { return slots_per_frame / 10; }
    /// Cyclic prefix of symbol l in slot slot_index, in samples.
    int cp_length(std::int64_t slot_index, int symbol) const;
    std::int64_t slot_samples(std::int64_t slot_index) const;
    double slot_duration_s() const { return frame_duration_s / slots_per_frame; }
};

enum class CellLabel : std::uint8_t { empty, prs, pdsch, dmrs };

/// One slot of resource elements, subcarrier-major within each symbol.
class ResourceGrid {
public:
    ResourceGrid(int subcarriers, int symbols);

    int subcarriers() const { return subcarriers_; }
    int symbols() const { return symbols_; }

    Complex& at(int k, int l) { return cells_[index(k, l)]; }
    Complex at(int k, int l) const { return cells_[index(k, l)]; }
    CellLabel& label(int k, int l) { return labels_[index(k, l)]; }
    CellLabel label(int k, int l) const { return labels_[index(k, l)]; }

    void set(int k, int l, Complex v, CellLabel what) {
        cells_[index(k, l)] = v;
        labels_[index(k, l)] = what;
    }

    std::size_t count(CellLabel what) const;

    /// Copies every non-empty cell of other over this grid. Throws
    /// std::invalid_argument when a cell is occupied in both.
    void overlay(const ResourceGrid& other);

private:
    std::size_t index(int k, int l) const {
        return static_cast<std::size_t>(l) * static_cast<std::size_t>(subcarriers_) + static_cast<std::size_t>(k);
    }

    int subcarriers_;
    int symbols_;
    std::vector<Complex> cells_;
    std::vector<CellLabel> labels_;
};

/// Grid subcarrier k maps to transform bin k - K/2 (K subcarriers), the
/// inverse transform is scaled 1/sqrt(N_fft) and each symbol gets its NR
/// normal cyclic prefix. grids[i] is slot first_slot + i.
dsp::SignalBuffer ofdm_modulate(std::span<const ResourceGrid> grids, const CarrierConfig& carrier,
                                std::int64_t first_slot = 0);

struct DemodulatedSignal {
    std::vector<ResourceGrid> grids;
    double cp_correlation = 1.0;  // mean over symbols carrying energy
    bool cp_aligned = true;
};

inline constexpr double kCpAlignedThreshold = 0.9;

/// Strips cyclic prefixes and transforms each symbol back to a grid. Throws
/// std::invalid_argument unless the buffer holds a whole number of slots.
DemodulatedSignal ofdm_demodulate(const dsp::SignalBuffer& buf, const CarrierConfig& carrier,
                                  std::int64_t first_slot = 0);

/// Normalized correlation between each cyclic prefix and the tail of its
/// symbol, averaged over symbols with energy; 1 when there is none.
double cyclic_prefix_correlation(std::span<const Complex> samples, const CarrierConfig& carrier,
                                 std::int64_t first_slot = 0);

}  // namespace synthrf::nr
