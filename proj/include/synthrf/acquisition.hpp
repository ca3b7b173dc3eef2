#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "synthrf/dsp.hpp"
#include "synthrf/prn.hpp"

namespace synthrf::receiver {

using dsp::Complex;

struct AcquisitionConfig {
    double freq_search_min_hz = -5000.0;
    double freq_search_max_hz = 5000.0;
    double freq_step_hz = 500.0;
    double snr_threshold_db = 25.0;
    double coherent_ms = 2.0;
    double fine_freq_ms = 10.0;
    bool keep_surface = false;

    /// Throws std::invalid_argument.
    void validate() const;
    std::vector<double> search_frequencies() const;
};

struct AcquisitionResult {
    int prn_id = 0;
    bool acquired = false;
    std::int64_t code_phase_samples = 0;  // tau, in [0, samples per code period)
    double coarse_freq_hz = 0.0;          // bin centre, relative to the IF
    double fine_freq_hz = 0.0;
    bool fine_freq_valid = false;         // false when the buffer was too short
    double snr_db = 0.0;
    std::size_t noise_samples = 0;        // lags that entered the SNR denominator
    std::vector<double> surface_freqs_hz;
    std::vector<double> surface;          // |R|^2, row-major [frequency][lag]
    std::size_t surface_lags = 0;
};

/// Rectangular local code: sample i carries chip floor(i R_c / f_s) mod N_c.
std::vector<Complex> local_code(const prn::SpreadingCode& code, double sample_rate_hz,
                                std::size_t count, double start_chip = 0.0);

/// Samples in one code period, rounded.
std::size_t code_period_samples(const prn::SpreadingCode& code, double sample_rate_hz);

/// Peak-to-noise ratio of one correlation row: 10 log10(r_max^2 / mean r_i^2)
/// over lags whose circular distance from the peak is at least
/// samples_per_chip. excluded_out receives the number of retained lags.
double peak_to_noise_db(std::span<const double> row, std::size_t peak, double samples_per_chip,
                        std::size_t* retained = nullptr);

/// Parallel code phase search over the first coherent_ms of buf followed by
/// fine frequency estimation when the buffer is long enough. The replica is
/// the band-limited code from cdma::sampled_code, or local_code when the
/// resampler has no ratio for the two rates.
AcquisitionResult acquire(const dsp::SignalBuffer& buf, const prn::SpreadingCode& code,
                          const AcquisitionConfig& cfg);

/// Same search with the carrier wiped in the time domain for every bin; used
/// when bins do not fall on whole transform bins, and as a cross-check.
AcquisitionResult acquire_time_domain(const dsp::SignalBuffer& buf, const prn::SpreadingCode& code,
                                      const AcquisitionConfig& cfg);

/// Code-stripped, carrier-wiped fine_freq_ms starting at tau; transform
/// with 4x zero padding after squaring out the data bits. Returns the
/// Doppler in Hz relative to the IF. Throws std::invalid_argument when tau
/// is outside one code period or the buffer is too short.
double fine_frequency(const dsp::SignalBuffer& buf, const prn::SpreadingCode& code, std::int64_t tau_samples,
                      double coarse_hz, const AcquisitionConfig& cfg);

}  // namespace synthrf::receiver
