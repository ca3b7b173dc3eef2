#include "synthrf/prn.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <utility>

namespace synthrf::prn {

namespace {

// G2 phase-select taps (1-based register stages), IS-GPS-200 table 3-Ia.
constexpr std::array<std::pair<int, int>, kMaxPrn> kG2Taps = {{
    {2, 6}, {3, 7}, {4, 8}, {5, 9}, {1, 9}, {2, 10}, {1, 8}, {2, 9},
    {3, 10}, {2, 3}, {3, 4}, {5, 6}, {6, 7}, {7, 8}, {8, 9}, {9, 10},
    {1, 4}, {2, 5}, {3, 6}, {4, 7}, {5, 8}, {6, 9}, {1, 3}, {4, 6},
    {5, 7}, {6, 8}, {7, 9}, {8, 10}, {1, 6}, {2, 7}, {3, 8}, {4, 9},
}};

void check_prn(int prn_id) {
    if (prn_id < 1 || prn_id > kMaxPrn) {
        throw std::invalid_argument("prn_id must be in 1..32, got " + std::to_string(prn_id));
    }
}

}  // namespace

SpreadingCode::SpreadingCode(int prn_id, std::vector<double> chips, double chipping_rate_hz)
    : prn_id_(prn_id), chips_(std::move(chips)), chipping_rate_hz_(chipping_rate_hz) {
    check_prn(prn_id);
    if (chips_.size() != kCaCodeLength) {
        throw std::invalid_argument("spreading code must hold 1023 chips, got " +
                                    std::to_string(chips_.size()));
    }
    for (double c : chips_) {
        if (c != 1.0 && c != -1.0) {
            throw std::invalid_argument("spreading code chips must be +1 or -1");
        }
    }
    if (!(chipping_rate_hz_ > 0.0)) {
        throw std::invalid_argument("chipping rate must be positive");
    }
}

double SpreadingCode::chip(long index) const {
    const long n = static_cast<long>(chips_.size());
    long i = index % n;
    if (i < 0) i += n;
    return chips_[static_cast<std::size_t>(i)];
}

SpreadingCode SpreadingCode::with_chipping_rate(double chipping_rate_hz) const {
    return SpreadingCode(prn_id_, chips_, chipping_rate_hz);
}

SpreadingCode generate_ca_code(int prn_id, double chipping_rate_hz) {
    check_prn(prn_id);
    const auto [tap_a, tap_b] = kG2Taps[static_cast<std::size_t>(prn_id - 1)];

    // Stage s (1..10) lives in bit s-1.
    unsigned g1 = 0x3ff;
    unsigned g2 = 0x3ff;
    auto stage = [](unsigned reg, int s) { return (reg >> (s - 1)) & 1u; };

    std::vector<double> chips(kCaCodeLength);
    for (auto& chip : chips) {
        const unsigned bit = stage(g1, 10) ^ stage(g2, tap_a) ^ stage(g2, tap_b);
        chip = bit ? -1.0 : 1.0;

        const unsigned f1 = stage(g1, 3) ^ stage(g1, 10);
        const unsigned f2 = stage(g2, 2) ^ stage(g2, 3) ^ stage(g2, 6) ^ stage(g2, 8) ^
                            stage(g2, 9) ^ stage(g2, 10);
        g1 = ((g1 << 1) | f1) & 0x3ff;
        g2 = ((g2 << 1) | f2) & 0x3ff;
    }
    return SpreadingCode(prn_id, std::move(chips), chipping_rate_hz);
}

double circular_cross_correlation(const SpreadingCode& a, const SpreadingCode& b, long lag) {
    if (a.length() != b.length()) {
        throw std::invalid_argument("codes differ in length");
    }
    const auto ca = a.chips();
    double acc = 0.0;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        acc += ca[i] * b.chip(static_cast<long>(i) + lag);
    }
    return acc / static_cast<double>(ca.size());
}

}  // namespace synthrf::prn
