#include "synthrf/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "synthrf/cdma_waveform.hpp"
#include "synthrf/resampler.hpp"

namespace synthrf::receiver {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// The code as the generator samples it (matched to its band limit); plain
// rectangular chips when no resampling ratio fits the two rates.
std::vector<Complex> replica(const prn::SpreadingCode& code, double fs, std::size_t count) {
    try {
        return cdma::sampled_code(code, fs, count);
    } catch (const dsp::UnsupportedRatioError&) {
        return local_code(code, fs, count);
    }
}

std::size_t coherent_samples(const AcquisitionConfig& cfg, double fs) {
    return static_cast<std::size_t>(std::llround(cfg.coherent_ms * 1e-3 * fs));
}

struct Search {
    std::vector<double> freqs;
    std::vector<double> surface;
    std::size_t lags = 0;
};

AcquisitionResult finish(const dsp::SignalBuffer& buf, const prn::SpreadingCode& code,
                         const AcquisitionConfig& cfg, Search search) {
    AcquisitionResult res;
    res.prn_id = code.prn_id();
    std::size_t best = 0;
    for (std::size_t i = 1; i < search.surface.size(); ++i) {
        if (search.surface[i] > search.surface[best]) best = i;
    }
    const std::size_t row = best / search.lags;
    const std::size_t lag = best % search.lags;
    res.code_phase_samples = static_cast<std::int64_t>(lag);
    res.coarse_freq_hz = search.freqs[row];
    const double samples_per_chip = buf.sample_rate_hz() / code.chipping_rate_hz();
    res.snr_db = peak_to_noise_db(std::span<const double>(search.surface).subspan(row * search.lags, search.lags),
                                  lag, samples_per_chip, &res.noise_samples);
    res.acquired = res.snr_db >= cfg.snr_threshold_db;

    res.fine_freq_hz = res.coarse_freq_hz;
    const auto fine_len = static_cast<std::size_t>(std::llround(cfg.fine_freq_ms * 1e-3 * buf.sample_rate_hz()));
    if (lag + fine_len <= buf.size()) {
        res.fine_freq_hz = fine_frequency(buf, code, res.code_phase_samples, res.coarse_freq_hz, cfg);
        res.fine_freq_valid = true;
    }
    if (cfg.keep_surface) {
        res.surface_freqs_hz = std::move(search.freqs);
        res.surface = std::move(search.surface);
        res.surface_lags = search.lags;
    }
    return res;
}

void check_input(const dsp::SignalBuffer& buf, const AcquisitionConfig& cfg) {
    cfg.validate();
    const std::size_t w = coherent_samples(cfg, buf.sample_rate_hz());
    if (w == 0 || buf.size() < w) {
        throw std::invalid_argument("buffer shorter than the " + std::to_string(cfg.coherent_ms) +
                                    " ms coherent integration");
    }
}

}  // namespace

void AcquisitionConfig::validate() const {
    if (!(freq_step_hz > 0.0)) throw std::invalid_argument("freq_step_hz must be positive");
    if (!(freq_search_min_hz < freq_search_max_hz)) throw std::invalid_argument("freq search min must be below max");
    if (!(coherent_ms > 0.0)) throw std::invalid_argument("coherent_ms must be positive");
    if (!(coherent_ms <= fine_freq_ms)) throw std::invalid_argument("coherent_ms must not exceed fine_freq_ms");
    if (!std::isfinite(snr_threshold_db)) throw std::invalid_argument("snr threshold must be finite");
}

std::vector<double> AcquisitionConfig::search_frequencies() const {
    std::vector<double> f;
    for (int j = 0;; ++j) {
        const double v = freq_search_min_hz + j * freq_step_hz;
        if (v > freq_search_max_hz + 1e-9 * freq_step_hz) break;
        f.push_back(v);
    }
    return f;
}

std::vector<Complex> local_code(const prn::SpreadingCode& code, double sample_rate_hz, std::size_t count,
                                double start_chip) {
    std::vector<Complex> out(count);
    const double step = code.chipping_rate_hz() / sample_rate_hz;
    for (std::size_t i = 0; i < count; ++i) {
        const auto chip = static_cast<long>(std::floor(start_chip + static_cast<double>(i) * step));
        out[i] = code.chip(chip);
    }
    return out;
}

std::size_t code_period_samples(const prn::SpreadingCode& code, double sample_rate_hz) {
    return static_cast<std::size_t>(std::llround(code.period_s() * sample_rate_hz));
}

double peak_to_noise_db(std::span<const double> row, std::size_t peak, double samples_per_chip,
                        std::size_t* retained) {
    const std::size_t n = row.size();
    double acc = 0.0;
    std::size_t kept = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t d = i > peak ? i - peak : peak - i;
        const std::size_t circ = std::min(d, n - d);
        if (static_cast<double>(circ) < samples_per_chip) continue;
        acc += row[i] * row[i];
        ++kept;
    }
    if (retained) *retained = kept;
    if (kept == 0 || acc == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(row[peak] * row[peak] / (acc / static_cast<double>(kept)));
}

AcquisitionResult acquire(const dsp::SignalBuffer& buf, const prn::SpreadingCode& code,
                          const AcquisitionConfig& cfg) {
    check_input(buf, cfg);
    const double fs = buf.sample_rate_hz();
    const std::size_t w = coherent_samples(cfg, fs);
    const auto freqs = cfg.search_frequencies();

    // Mixing by f equals a circular shift of the spectrum by f W / f_s bins.
    std::vector<std::int64_t> shifts;
    for (double f : freqs) {
        const double b = (buf.if_offset_hz() + f) * static_cast<double>(w) / fs;
        if (std::abs(b - std::round(b)) > 1e-6) return acquire_time_domain(buf, code, cfg);
        shifts.push_back(static_cast<std::int64_t>(std::llround(b)));
    }

    std::vector<Complex> x(buf.samples().begin(), buf.samples().begin() + static_cast<std::ptrdiff_t>(w));
    dsp::fft_in_place(x);
    auto c = replica(code, fs, w);
    dsp::fft_in_place(c);

    Search search;
    search.freqs = freqs;
    search.lags = std::min(code_period_samples(code, fs), w);
    search.surface.resize(freqs.size() * search.lags);
    std::vector<Complex> prod(w);
    const auto n = static_cast<std::int64_t>(w);
    for (std::size_t j = 0; j < freqs.size(); ++j) {
        for (std::int64_t k = 0; k < n; ++k) {
            const auto src = static_cast<std::size_t>(((k + shifts[j]) % n + n) % n);
            prod[static_cast<std::size_t>(k)] = x[src] * std::conj(c[static_cast<std::size_t>(k)]);
        }
        dsp::ifft_in_place(prod);
        for (std::size_t i = 0; i < search.lags; ++i) search.surface[j * search.lags + i] = std::norm(prod[i]);
    }
    return finish(buf, code, cfg, std::move(search));
}

AcquisitionResult acquire_time_domain(const dsp::SignalBuffer& buf, const prn::SpreadingCode& code,
                                      const AcquisitionConfig& cfg) {
    check_input(buf, cfg);
    const double fs = buf.sample_rate_hz();
    const std::size_t w = coherent_samples(cfg, fs);
    const auto freqs = cfg.search_frequencies();
    auto c = replica(code, fs, w);
    dsp::fft_in_place(c);

    Search search;
    search.freqs = freqs;
    search.lags = std::min(code_period_samples(code, fs), w);
    search.surface.resize(freqs.size() * search.lags);
    std::vector<Complex> y(w);
    for (std::size_t j = 0; j < freqs.size(); ++j) {
        std::copy_n(buf.samples().begin(), w, y.begin());
        dsp::mix_in_place(y, fs, -(buf.if_offset_hz() + freqs[j]));
        dsp::fft_in_place(y);
        for (std::size_t k = 0; k < w; ++k) y[k] *= std::conj(c[k]);
        dsp::ifft_in_place(y);
        for (std::size_t i = 0; i < search.lags; ++i) search.surface[j * search.lags + i] = std::norm(y[i]);
    }
    return finish(buf, code, cfg, std::move(search));
}

double fine_frequency(const dsp::SignalBuffer& buf, const prn::SpreadingCode& code, std::int64_t tau_samples,
                      double coarse_hz, const AcquisitionConfig& cfg) {
    const double fs = buf.sample_rate_hz();
    const auto period = static_cast<std::int64_t>(code_period_samples(code, fs));
    if (tau_samples < 0 || tau_samples >= period) {
        throw std::invalid_argument("code phase " + std::to_string(tau_samples) + " outside one code period");
    }
    const auto n = static_cast<std::size_t>(std::llround(cfg.fine_freq_ms * 1e-3 * fs));
    const auto start = static_cast<std::size_t>(tau_samples);
    if (n == 0 || start + n > buf.size()) {
        throw std::invalid_argument("buffer shorter than code phase plus fine_freq_ms");
    }
    const auto local = replica(code, fs, n);
    std::vector<Complex> y(n);
    const auto x = buf.samples();
    for (std::size_t i = 0; i < n; ++i) y[i] = x[start + i] * std::conj(local[i]);
    dsp::mix_in_place(y, fs, -(buf.if_offset_hz() + coarse_hz), 0.0, static_cast<std::int64_t>(start));

    // Block sums before squaring: squaring at the raw sample rate buries the
    // line in noise. Blocks of about 0.25 ms keep the doubled residual inside
    // Nyquist, and dividing n exactly leaves the frequency grid untouched.
    auto block = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(fs / 4000.0)));
    while (n % block != 0) --block;
    const std::size_t blocks = n / block;
    const std::size_t nfft = 4 * blocks;
    std::vector<Complex> z(nfft);
    for (std::size_t b = 0; b < blocks; ++b) {
        Complex acc{};
        for (std::size_t i = 0; i < block; ++i) acc += y[b * block + i];
        // Squaring removes the +-1 data bits and doubles the residual frequency.
        z[b] = acc * acc;
    }
    dsp::fft_in_place(z);

    const double df = fs / static_cast<double>(block * nfft);
    const auto reach = std::min(static_cast<std::int64_t>(std::ceil(2.0 * cfg.freq_step_hz / df)),
                                static_cast<std::int64_t>(nfft / 2 - 1));
    const auto size = static_cast<std::int64_t>(nfft);
    std::int64_t best_bin = 0;
    double best = -1.0;
    for (std::int64_t b = -reach; b <= reach; ++b) {
        const double p = std::norm(z[static_cast<std::size_t>((b % size + size) % size)]);
        if (p > best) {
            best = p;
            best_bin = b;
        }
    }
    return coarse_hz + 0.5 * static_cast<double>(best_bin) * df;
}

}  // namespace synthrf::receiver
