#pragma once

#include <cstdint>
#include <vector>

#include "synthrf/acquisition.hpp"
#include "synthrf/dsp.hpp"
#include "synthrf/prn.hpp"

namespace synthrf::receiver {

struct TrackingConfig {
    double dll_bw_hz = 2.0;
    double pll_bw_hz = 10.0;
    double correlator_spacing_chips = 0.5;
    double integration_ms = 1.0;
    double damping = 0.707;
    // Frequency-locked assist on the carrier loop for the first fll_assist_ms.
    double fll_bw_hz = 20.0;
    double fll_assist_ms = 100.0;
    // Steers the code NCO by R_c * (carrier Doppler / carrier_hz).
    bool carrier_aiding = false;
    double carrier_hz = 1575.42e6;
    // Lock is declared lost after lock_loss_epochs consecutive epochs whose
    // prompt power sits lock_loss_db below the mean of the first 10 epochs.
    double lock_loss_db = 10.0;
    int lock_loss_epochs = 50;

    /// Throws std::invalid_argument.
    void validate() const;
};

struct TrackingEpoch {
    double epoch_s = 0.0;
    double code_delay_samples = 0.0;
    double doppler_hz = 0.0;
    double prompt_i = 0.0;
    double prompt_q = 0.0;
    double dll_discriminator = 0.0;  // chips
    double pll_discriminator = 0.0;  // cycles
};

struct TrackingTrace {
    int prn_id = 0;
    std::vector<TrackingEpoch> epochs;
    bool lock_lost = false;
};

/// Second-order loop filter with the usual natural-frequency mapping
/// omega_n = B_n 8 zeta / (4 zeta^2 + 1).
class LoopFilter {
public:
    LoopFilter(double noise_bw_hz, double damping, double update_s, double initial = 0.0);

    double update(double error);
    double integrator() const { return integrator_; }
    void nudge(double delta) { integrator_ += delta; }

private:
    double proportional_;
    double integral_;
    double integrator_;
};

/// Normalized early-minus-late envelope discriminator scaled to chips for
/// a unit triangle correlation: (1 - spacing) (|E| - |L|) / (|E| + |L|).
double dll_discriminator(double ie, double qe, double il, double ql, double spacing_chips);
/// Costas atan(Q/I) in cycles.
double pll_discriminator(double ip, double qp);

/// Conventional DLL/PLL tracking starting from the acquisition estimate.
/// Throws std::invalid_argument when init is not acquired or the buffer is
/// shorter than 10 integration periods past the code phase.
TrackingTrace track(const dsp::SignalBuffer& buf, const prn::SpreadingCode& code, const AcquisitionResult& init,
                    const TrackingConfig& cfg);

}  // namespace synthrf::receiver
