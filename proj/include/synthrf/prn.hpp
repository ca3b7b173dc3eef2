#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace synthrf::prn {

inline constexpr int kCaCodeLength = 1023;
inline constexpr double kCaChippingRateHz = 1.023e6;
inline constexpr int kMaxPrn = 32;

/// One period of a +-1 spreading sequence together with the rate it is
/// clocked at. Immutable once built.
class SpreadingCode {
public:
    /// Throws std::invalid_argument unless prn_id is 1..32, chips holds
    /// exactly 1023 values of +1/-1 and the rate is positive.
    SpreadingCode(int prn_id, std::vector<double> chips, double chipping_rate_hz);

    int prn_id() const { return prn_id_; }
    std::span<const double> chips() const { return chips_; }
    double chipping_rate_hz() const { return chipping_rate_hz_; }
    std::size_t length() const { return chips_.size(); }
    double period_s() const { return static_cast<double>(chips_.size()) / chipping_rate_hz_; }

    double chip(long index) const;  // index reduced mod length

    SpreadingCode with_chipping_rate(double chipping_rate_hz) const;

    friend bool operator==(const SpreadingCode&, const SpreadingCode&) = default;

private:
    int prn_id_;
    std::vector<double> chips_;
    double chipping_rate_hz_;
};

/// GPS L1 C/A Gold code. The G2 contribution is taken from the PRN-specific
/// tap pair (phase selector) rather than from a delayed copy of G2.
SpreadingCode generate_ca_code(int prn_id, double chipping_rate_hz = kCaChippingRateHz);

/// (1/N) sum_i a[i] * b[(i + lag) mod N]
double circular_cross_correlation(const SpreadingCode& a, const SpreadingCode& b, long lag);

inline double circular_autocorrelation(const SpreadingCode& code, long lag) {
    return circular_cross_correlation(code, code, lag);
}

}  // namespace synthrf::prn
