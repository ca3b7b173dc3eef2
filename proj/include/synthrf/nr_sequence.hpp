#pragma once

#include <cstdint>
#include <vector>

#include "synthrf/fft.hpp"

namespace synthrf::nr {

inline constexpr int kGoldDiscard = 1600;  // N_c

/// Length-31 Gold pseudo-random sequence c(n), n = 0..length-1:
/// x1 seeded with x1(0) = 1 and zeros elsewhere, x2 seeded with the bits of
/// c_init, both advanced kGoldDiscard steps before output starts.
std::vector<std::uint8_t> gold_sequence(std::uint32_t c_init, std::size_t length);

/// PRS scrambling seed for symbol l of slot slot_in_frame.
std::uint32_t prs_c_init(int n_prs_id, int slot_in_frame, int symbol, int symbols_per_slot = 14);

/// QPSK symbols r(m) = ((1 - 2c(2m)) + j (1 - 2c(2m+1))) / sqrt(2) for m = 0..count-1.
std::vector<dsp::Complex> qpsk_sequence(std::uint32_t c_init, std::size_t count);

}  // namespace synthrf::nr
