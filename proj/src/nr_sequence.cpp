#include "synthrf/nr_sequence.hpp"

#include <cmath>
#include <stdexcept>

namespace synthrf::nr {

std::vector<std::uint8_t> gold_sequence(std::uint32_t c_init, std::size_t length) {
    // Bit i of each register holds x(n + i); one shift advances n.
    std::uint32_t x1 = 1;
    std::uint32_t x2 = c_init & 0x7fffffffu;
    std::vector<std::uint8_t> c(length);
    for (std::size_t n = 0; n < length + kGoldDiscard; ++n) {
        if (n >= kGoldDiscard) c[n - kGoldDiscard] = static_cast<std::uint8_t>((x1 ^ x2) & 1u);
        const std::uint32_t f1 = ((x1 >> 3) ^ x1) & 1u;
        const std::uint32_t f2 = ((x2 >> 3) ^ (x2 >> 2) ^ (x2 >> 1) ^ x2) & 1u;
        x1 = (x1 >> 1) | (f1 << 30);
        x2 = (x2 >> 1) | (f2 << 30);
    }
    return c;
}

std::uint32_t prs_c_init(int n_prs_id, int slot_in_frame, int symbol, int symbols_per_slot) {
    if (n_prs_id < 0 || n_prs_id > 4095) throw std::invalid_argument("n_prs_id must be in 0..4095");
    if (slot_in_frame < 0 || symbol < 0 || symbol >= symbols_per_slot) {
        throw std::invalid_argument("slot or symbol index out of range");
    }
    const std::uint64_t hi = static_cast<std::uint64_t>(n_prs_id / 1024);
    const std::uint64_t lo = static_cast<std::uint64_t>(n_prs_id % 1024);
    const std::uint64_t sym = static_cast<std::uint64_t>(symbols_per_slot) * static_cast<std::uint64_t>(slot_in_frame) +
                              static_cast<std::uint64_t>(symbol) + 1;
    const std::uint64_t v = (hi << 22) + (sym << 10) * (2 * lo + 1) + lo;
    return static_cast<std::uint32_t>(v % (std::uint64_t{1} << 31));
}

std::vector<dsp::Complex> qpsk_sequence(std::uint32_t c_init, std::size_t count) {
    const auto c = gold_sequence(c_init, 2 * count);
    const double a = 1.0 / std::sqrt(2.0);
    std::vector<dsp::Complex> r(count);
    for (std::size_t m = 0; m < count; ++m) {
        r[m] = dsp::Complex(a * (1.0 - 2.0 * c[2 * m]), a * (1.0 - 2.0 * c[2 * m + 1]));
    }
    return r;
}

}  // namespace synthrf::nr
