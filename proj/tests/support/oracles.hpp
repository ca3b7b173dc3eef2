#pragma once

// Independent reference implementations used to check the library. They
// follow the textbook definitions directly and favour clarity over speed.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "synthrf/channel.hpp"

namespace oracle {

using Complex = std::complex<double>;

/// C/A code from full G1 and G2 sequences with G2 delayed by the PRN's
/// integer chip delay. Returns bits (0/1), not +-1.
std::vector<int> ca_code_bits_by_delay(int prn);

/// G2 delay in chips for PRN 1..32.
int g2_delay(int prn);

/// First 10 chips of each PRN as the octal number printed in the GPS
/// interface specification (PRN 1 -> 01440).
int first_ten_chips_octal(int prn);

/// sum_i a[i + lag] * conj(b[i]), indices mod N.
std::vector<Complex> direct_circular_correlation(const std::vector<Complex>& a, const std::vector<Complex>& b);

/// Integer cross-correlation sum_i a[i] b[(i + lag) mod N] of +-1 sequences.
long integer_cross_correlation(const std::vector<double>& a, const std::vector<double>& b, long lag);

/// Gold sequence straight from the recurrences on explicit arrays.
std::vector<int> gold_sequence_by_recurrence(std::uint32_t c_init, std::size_t length);

/// Kolmogorov-Smirnov statistic against F(r) = 1 - exp(-r^2) (unit-power
/// Rayleigh envelope) and its asymptotic p-value.
struct KsResult {
    double statistic;
    double p_value;
};
KsResult ks_rayleigh(std::vector<double> envelope);

/// Direct DFT power of x at an arbitrary frequency (cycles per sample).
double tone_power(const std::vector<Complex>& x, double cycles_per_sample);

struct SceneSource {
    std::string id;
    int prn = 1;
    double extra_delay_s = 0.0;
    double doppler_hz = 0.0;
    double power_db = 0.0;
    bool los = true;
    double fading_spread_hz = 100.0;
};

/// Single-path-per-source channel spec; every source's delay is base + extra.
synthrf::channel::ChannelSpec scene_spec(const std::vector<SceneSource>& sources, double duration_s,
                                         std::uint64_t seed, double base_delay_s = 0.0672);

}  // namespace oracle
