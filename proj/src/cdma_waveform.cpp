#include "synthrf/cdma_waveform.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "synthrf/multipath.hpp"
#include "synthrf/random.hpp"
#include "synthrf/resampler.hpp"

namespace synthrf::cdma {

namespace {

std::invalid_argument invalid(const std::string& what) {
    return std::invalid_argument("cdma config: " + what);
}

}  // namespace

CdmaGenConfig CdmaGenConfig::satellite() { return CdmaGenConfig{}; }

CdmaGenConfig CdmaGenConfig::haps() {
    CdmaGenConfig cfg;
    cfg.if_hz = 15e6;
    cfg.chipping_rate_hz = 10.23e6;
    return cfg;
}

std::size_t CdmaGenConfig::sample_count() const {
    return static_cast<std::size_t>(std::llround(sample_rate_hz * duration_s));
}

void CdmaGenConfig::validate() const {
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) throw invalid("f_s must be positive");
    if (!(chipping_rate_hz > 0.0)) throw invalid("chipping rate must be positive");
    if (sample_rate_hz < 2.0 * chipping_rate_hz) throw invalid("f_s must be at least twice the chipping rate");
    if (!std::isfinite(if_hz) || std::abs(if_hz) >= sample_rate_hz / 2.0) {
        throw invalid("|f_IF| must be below f_s/2");
    }
    if (!(duration_s > 0.0) || sample_count() == 0) throw invalid("duration must cover at least one sample");
    if (!(data_bit_s > 0.0)) throw invalid("data bit duration must be positive");
    const double periods = data_bit_s / code_period_s();
    if (std::abs(periods - std::round(periods)) > 1e-6 || std::round(periods) < 1.0) {
        throw invalid("data bit duration must be an integer number of code periods");
    }
    if (cn0_dbhz && !std::isfinite(*cn0_dbhz)) throw invalid("C/N0 must be finite");
    for (const auto& s : sources) {
        if (s.prn_id < 1 || s.prn_id > prn::kMaxPrn) {
            throw invalid("source '" + s.source_id + "' prn must be in 1..32");
        }
    }
}

std::vector<dsp::Complex> sampled_code(const prn::SpreadingCode& code, double sample_rate_hz,
                                       std::size_t sample_count) {
    const auto ratio = dsp::approximate_ratio(sample_rate_hz, code.chipping_rate_hz());
    const dsp::PolyphaseResampler rs(ratio.up, ratio.down);
    const auto n_c = static_cast<std::int64_t>(code.length());

    // The sampled code repeats every p code periods, where p * N_c * up / down
    // is the first whole number of samples. Generate one repetition and tile.
    const std::int64_t p = ratio.down / std::gcd(n_c * ratio.up, ratio.down);
    const std::int64_t period_samples = p * n_c * ratio.up / ratio.down;
    const bool periodic = static_cast<std::size_t>(period_samples) <= sample_count;
    const std::size_t block_len = periodic ? static_cast<std::size_t>(period_samples) : sample_count;

    const auto guard = static_cast<std::int64_t>(rs.tap_count()) / ratio.up + 2;
    const auto chips_needed =
        static_cast<std::int64_t>(block_len) * ratio.down / ratio.up + 2 * guard + 2;
    std::vector<dsp::Complex> chips(static_cast<std::size_t>(chips_needed));
    for (std::int64_t j = 0; j < chips_needed; ++j) {
        chips[static_cast<std::size_t>(j)] = code.chip(static_cast<long>(j - guard));
    }
    const std::int64_t start = guard * ratio.up - (ratio.up + 1) / 2;
    auto block = rs.process(chips, block_len, start);

    const double scale = 1.0 / std::sqrt(dsp::mean_power(block));
    for (auto& v : block) v *= scale;
    if (!periodic) return block;

    std::vector<dsp::Complex> out(sample_count);
    for (std::size_t i = 0; i < sample_count; ++i) out[i] = block[i % block_len];
    return out;
}

dsp::SignalBuffer generate_clean_signal(const prn::SpreadingCode& code, const CdmaGenConfig& cfg) {
    cfg.validate();
    if (code.chipping_rate_hz() != cfg.chipping_rate_hz) {
        throw std::invalid_argument("code chipping rate does not match the configuration");
    }
    const std::size_t n = cfg.sample_count();
    auto samples = sampled_code(code, cfg.sample_rate_hz, n);

    if (cfg.data_modulation) {
        Rng rng(derive_seed(cfg.data_seed, static_cast<std::uint64_t>(code.prn_id())));
        const double bits_per_sample = 1.0 / (cfg.data_bit_s * cfg.sample_rate_hz);
        std::size_t bit_index = 0;
        double bit = rng.sign();
        for (std::size_t i = 0; i < n; ++i) {
            const auto b = static_cast<std::size_t>(std::floor(static_cast<double>(i) * bits_per_sample + 1e-9));
            while (bit_index < b) {
                bit = rng.sign();
                ++bit_index;
            }
            samples[i] *= bit;
        }
    }
    dsp::mix_in_place(samples, cfg.sample_rate_hz, cfg.if_hz);
    return dsp::SignalBuffer(std::move(samples), cfg.sample_rate_hz, cfg.if_hz);
}

dsp::SignalBuffer synthesize(const CdmaGenConfig& cfg, const channel::ChannelSet& channels,
                             std::optional<double> reference_delay_s) {
    cfg.validate();
    if (cfg.sources.empty()) throw std::invalid_argument("no sources to synthesize");
    std::vector<std::string> ids;
    for (const auto& s : cfg.sources) ids.push_back(s.source_id);
    const double d_min = reference_delay_s.value_or(channel::minimum_initial_delay(channels, ids));

    channel::MultipathCombiner combiner(channels, cfg.sample_rate_hz, cfg.sample_count(), d_min);
    for (const auto& s : cfg.sources) {
        const auto code = prn::generate_ca_code(s.prn_id, cfg.chipping_rate_hz);
        const auto clean = generate_clean_signal(code, cfg);
        combiner.add(s.source_id, clean.samples(), cfg.if_hz);
    }
    auto out = std::move(combiner).finish(cfg.if_hz);
    if (cfg.cn0_dbhz) {
        const double noise_dbw = dsp::noise_power_for_cn0(1.0, *cfg.cn0_dbhz, cfg.sample_rate_hz);
        auto samples = std::move(out).release();
        dsp::add_awgn_in_place(samples, noise_dbw, derive_seed(cfg.noise_seed, 0x6e6f697365ull));
        return dsp::SignalBuffer(std::move(samples), cfg.sample_rate_hz, cfg.if_hz);
    }
    return out;
}

}  // namespace synthrf::cdma
