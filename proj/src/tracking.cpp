#include "synthrf/tracking.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace synthrf::receiver {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

void TrackingConfig::validate() const {
    if (!(dll_bw_hz > 0.0) || !(pll_bw_hz > 0.0)) throw std::invalid_argument("loop bandwidths must be positive");
    if (!(correlator_spacing_chips > 0.0) || correlator_spacing_chips > 1.0) {
        throw std::invalid_argument("correlator spacing must be in (0, 1] chip");
    }
    if (!(integration_ms > 0.0)) throw std::invalid_argument("integration_ms must be positive");
    if (!(damping > 0.0)) throw std::invalid_argument("damping must be positive");
    if (!(fll_bw_hz > 0.0) || fll_assist_ms < 0.0) throw std::invalid_argument("invalid FLL assist settings");
    if (carrier_aiding && !(carrier_hz > 0.0)) throw std::invalid_argument("carrier_hz must be positive");
    if (lock_loss_epochs < 1) throw std::invalid_argument("lock_loss_epochs must be positive");
}

LoopFilter::LoopFilter(double noise_bw_hz, double damping, double update_s, double initial)
    : integrator_(initial) {
    const double wn = noise_bw_hz * 8.0 * damping / (4.0 * damping * damping + 1.0);
    proportional_ = 2.0 * damping * wn;
    integral_ = wn * wn * update_s;
}

double LoopFilter::update(double error) {
    integrator_ += integral_ * error;
    return integrator_ + proportional_ * error;
}

double dll_discriminator(double ie, double qe, double il, double ql, double spacing_chips) {
    const double e = std::hypot(ie, qe);
    const double l = std::hypot(il, ql);
    if (e + l == 0.0) return 0.0;
    return (1.0 - spacing_chips) * (e - l) / (e + l);
}

double pll_discriminator(double ip, double qp) {
    if (ip == 0.0) return 0.0;
    return std::atan(qp / ip) / kTwoPi;
}

TrackingTrace track(const dsp::SignalBuffer& buf, const prn::SpreadingCode& code, const AcquisitionResult& init,
                    const TrackingConfig& cfg) {
    cfg.validate();
    if (!init.acquired) throw std::invalid_argument("tracking needs an acquired signal");
    const double fs = buf.sample_rate_hz();
    const double t_int = cfg.integration_ms * 1e-3;
    const double periods = t_int / code.period_s();
    const auto periods_per_block = std::llround(periods);
    if (periods_per_block < 1 || std::abs(periods - static_cast<double>(periods_per_block)) > 1e-6) {
        throw std::invalid_argument("integration time must be a whole number of code periods");
    }
    const double block_chips = static_cast<double>(periods_per_block) * static_cast<double>(code.length());
    const double nominal_block = t_int * fs;
    if (init.code_phase_samples < 0 ||
        static_cast<double>(buf.size()) < static_cast<double>(init.code_phase_samples) + 10.0 * nominal_block) {
        throw std::invalid_argument("buffer shorter than 10 integration periods past the code phase");
    }

    const double f_if = buf.if_offset_hz();
    const double rc = code.chipping_rate_hz();
    const double spacing = cfg.correlator_spacing_chips;
    const double doppler0 = init.fine_freq_valid ? init.fine_freq_hz : init.coarse_freq_hz;

    LoopFilter pll(cfg.pll_bw_hz, cfg.damping, t_int, doppler0);
    LoopFilter dll(cfg.dll_bw_hz, cfg.damping, t_int);
    const double fll_gain = 4.0 * cfg.fll_bw_hz * t_int;

    double code_freq = rc;
    double carr_freq = f_if + doppler0;
    double rem_code = 0.0;   // chips
    double rem_carr = 0.0;   // cycles
    std::size_t pos = static_cast<std::size_t>(init.code_phase_samples);

    TrackingTrace trace;
    trace.prn_id = code.prn_id();
    const auto x = buf.samples();
    double prev_i = 0.0, prev_q = 0.0;
    double ref_power = 0.0;
    int low_run = 0;
    const double floor_ratio = std::pow(10.0, -cfg.lock_loss_db / 10.0);

    for (std::size_t epoch = 0;; ++epoch) {
        const double step = code_freq / fs;
        const auto blk = static_cast<std::size_t>(std::ceil((block_chips - rem_code) / step));
        if (pos + blk > x.size()) break;

        const Complex rot = std::polar(1.0, -kTwoPi * carr_freq / fs);
        Complex ph = std::polar(1.0, -kTwoPi * rem_carr);
        Complex e{}, p{}, l{};
        for (std::size_t i = 0; i < blk; ++i) {
            const double t = rem_code + static_cast<double>(i) * step;
            const Complex v = x[pos + i] * ph;
            e += v * code.chip(static_cast<long>(std::floor(t + spacing)));
            p += v * code.chip(static_cast<long>(std::floor(t)));
            l += v * code.chip(static_cast<long>(std::floor(t - spacing)));
            ph *= rot;
        }

        TrackingEpoch rec;
        rec.epoch_s = buf.epoch_s() + static_cast<double>(pos) / fs;
        rec.code_delay_samples = static_cast<double>(pos) - rem_code / step -
                                 static_cast<double>(epoch) * nominal_block;
        rec.doppler_hz = carr_freq - f_if;
        rec.prompt_i = p.real();
        rec.prompt_q = p.imag();

        double carr_cycles = rem_carr + carr_freq * static_cast<double>(blk) / fs;
        rem_carr = carr_cycles - std::floor(carr_cycles);
        rem_code = rem_code + static_cast<double>(blk) * step - block_chips;
        pos += blk;

        rec.pll_discriminator = pll_discriminator(p.real(), p.imag());
        if (epoch > 0 && static_cast<double>(epoch) * cfg.integration_ms < cfg.fll_assist_ms) {
            const double cross = prev_i * p.imag() - p.real() * prev_q;
            const double dot = prev_i * p.real() + prev_q * p.imag();
            if (dot != 0.0) pll.nudge(fll_gain * std::atan(cross / dot) / (kTwoPi * t_int));
        }
        carr_freq = f_if + pll.update(rec.pll_discriminator);

        rec.dll_discriminator = dll_discriminator(e.real(), e.imag(), l.real(), l.imag(), spacing);
        code_freq = rc + dll.update(rec.dll_discriminator);
        if (cfg.carrier_aiding) code_freq += rc * (carr_freq - f_if) / cfg.carrier_hz;

        prev_i = p.real();
        prev_q = p.imag();
        trace.epochs.push_back(rec);

        const double power = std::norm(p);
        if (epoch < 10) {
            ref_power += power / 10.0;
            continue;
        }
        low_run = power < ref_power * floor_ratio ? low_run + 1 : 0;
        if (low_run >= cfg.lock_loss_epochs) {
            trace.epochs.resize(trace.epochs.size() - static_cast<std::size_t>(low_run));
            trace.lock_lost = true;
            break;
        }
    }
    return trace;
}

}  // namespace synthrf::receiver
