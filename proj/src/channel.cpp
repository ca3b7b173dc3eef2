#include "synthrf/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>

#include "synthrf/random.hpp"

namespace synthrf::channel {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::invalid_argument invalid(const std::string& what) {
    return std::invalid_argument("channel: " + what);
}

void normalize_power(std::vector<Complex>& g) {
    const double p = dsp::mean_power(g);
    if (p <= 0.0) return;
    const double scale = 1.0 / std::sqrt(p);
    for (auto& v : g) v *= scale;
}

}  // namespace

std::string_view to_string(SourceKind kind) {
    switch (kind) {
        case SourceKind::satellite: return "satellite";
        case SourceKind::haps: return "haps";
        case SourceKind::gnb: return "gnb";
    }
    return "unknown";
}

SourceKind parse_source_kind(std::string_view name) {
    if (name == "satellite") return SourceKind::satellite;
    if (name == "haps") return SourceKind::haps;
    if (name == "gnb") return SourceKind::gnb;
    throw std::invalid_argument("unknown source kind '" + std::string(name) + "'");
}

std::size_t ChannelSet::snapshot_count() const {
    return static_cast<std::size_t>(std::llround(update_rate_hz * duration_s));
}

const SourceChannel* ChannelSet::find_if_present(std::string_view source_id) const {
    for (const auto& s : sources) {
        if (s.source_id == source_id) return &s;
    }
    return nullptr;
}

const SourceChannel& ChannelSet::find(std::string_view source_id) const {
    if (const auto* s = find_if_present(source_id)) return *s;
    throw std::out_of_range("channel: no source '" + std::string(source_id) + "'");
}

void ChannelSet::validate() const {
    if (!(update_rate_hz > 0.0) || !std::isfinite(update_rate_hz)) {
        throw invalid("update rate must be positive");
    }
    if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
        throw invalid("duration must be positive");
    }
    const std::size_t snapshots = snapshot_count();
    std::set<std::string> ids;
    for (const auto& src : sources) {
        const std::string who = "source '" + src.source_id + "'";
        if (!ids.insert(src.source_id).second) throw invalid("duplicate " + who);
        if (src.paths.empty()) throw invalid(who + " has no paths");
        for (std::size_t k = 0; k < src.paths.size(); ++k) {
            const auto& path = src.paths[k];
            const std::string where = who + " path " + std::to_string(k);
            if (path.coefficients.size() != snapshots || path.delays_s.size() != snapshots) {
                throw invalid(where + " has " + std::to_string(path.coefficients.size()) +
                              " snapshots, expected " + std::to_string(snapshots));
            }
            for (std::size_t t = 0; t < snapshots; ++t) {
                const auto h = path.coefficients[t];
                if (!std::isfinite(h.real()) || !std::isfinite(h.imag())) {
                    throw invalid(where + " snapshot " + std::to_string(t) + " has a non-finite coefficient");
                }
                const double d = path.delays_s[t];
                if (!(d >= 0.0) || !std::isfinite(d)) {
                    throw invalid(where + " snapshot " + std::to_string(t) + " has an invalid delay");
                }
            }
            if (path.delays_s.front() < src.paths.front().delays_s.front()) {
                throw invalid(who + ": path 0 must be the first-arriving path");
            }
        }
    }
}

std::vector<Complex> sum_of_sinusoids(std::size_t snapshots, double update_rate_hz,
                                      double max_doppler_hz, std::uint64_t seed) {
    Rng rng(seed);
    constexpr int m = kFadingOscillators;
    std::vector<double> freq(m), phase(m);
    for (int n = 0; n < m; ++n) {
        const double alpha = kTwoPi * (static_cast<double>(n) + rng.uniform()) / m;
        freq[n] = max_doppler_hz * std::cos(alpha) / update_rate_hz;  // cycles per snapshot
        phase[n] = kTwoPi * rng.uniform();
    }
    std::vector<Complex> g(snapshots);
    for (std::size_t t = 0; t < snapshots; ++t) {
        Complex acc{};
        for (int n = 0; n < m; ++n) {
            double cycles = freq[n] * static_cast<double>(t);
            cycles -= std::floor(cycles);
            acc += std::polar(1.0, kTwoPi * cycles + phase[n]);
        }
        g[t] = acc;
    }
    normalize_power(g);
    return g;
}

ChannelSet generate_synthetic_channel(const ChannelSpec& spec) {
    if (!(spec.update_rate_hz > 0.0)) throw invalid("update rate must be positive");
    if (!(spec.duration_s > 0.0)) throw invalid("duration must be positive");
    if (spec.sources.empty()) throw invalid("no sources");

    ChannelSet set;
    set.update_rate_hz = spec.update_rate_hz;
    set.duration_s = spec.duration_s;
    const std::size_t snapshots = set.snapshot_count();
    if (snapshots == 0) throw invalid("duration shorter than one snapshot");

    for (std::size_t n = 0; n < spec.sources.size(); ++n) {
        const auto& src = spec.sources[n];
        if (src.paths.empty()) throw invalid("source '" + src.source_id + "' has an empty path list");
        SourceChannel out{src.source_id, src.kind, src.los, {}};
        for (std::size_t k = 0; k < src.paths.size(); ++k) {
            const auto& p = src.paths[k];
            if (std::isnan(p.power_db) || (std::isinf(p.power_db) && p.power_db > 0)) {
                throw invalid("source '" + src.source_id + "' path " + std::to_string(k) +
                              " has invalid power");
            }
            if (!(p.initial_delay_s >= 0.0)) throw invalid("negative initial delay");
            if (p.initial_delay_s < src.paths.front().initial_delay_s) {
                throw invalid("source '" + src.source_id + "': path 0 must be the first-arriving path");
            }

            std::vector<Complex> g;
            const bool rician = src.los && k == 0;
            if (rician && std::isinf(p.rician_k_db)) {
                g.assign(snapshots, Complex(1.0, 0.0));
            } else {
                g = sum_of_sinusoids(snapshots, spec.update_rate_hz, src.fading_spread_hz,
                                     derive_seed(spec.seed, n, k));
                if (rician) {
                    const double kf = std::pow(10.0, p.rician_k_db / 10.0);
                    const double a_los = std::sqrt(kf / (kf + 1.0));
                    const double a_diff = std::sqrt(1.0 / (kf + 1.0));
                    for (auto& v : g) v = a_los + a_diff * v;
                    normalize_power(g);
                }
            }

            const double amplitude = std::pow(10.0, p.power_db / 20.0);
            const double doppler_step = p.doppler_hz / spec.update_rate_hz;
            PathSeries series;
            series.coefficients.resize(snapshots);
            series.delays_s.resize(snapshots);
            for (std::size_t t = 0; t < snapshots; ++t) {
                double cycles = doppler_step * static_cast<double>(t);
                cycles -= std::floor(cycles);
                series.coefficients[t] = amplitude * g[t] * std::polar(1.0, kTwoPi * cycles);
                const double d =
                    p.initial_delay_s + p.delay_rate * static_cast<double>(t) / spec.update_rate_hz;
                if (d < 0.0) throw invalid("path delay becomes negative within the window");
                series.delays_s[t] = d;
            }
            out.paths.push_back(std::move(series));
        }
        set.sources.push_back(std::move(out));
    }
    set.validate();
    return set;
}

CoefficientInterpolator::CoefficientInterpolator(const PathSeries& series, double update_rate_hz,
                                                 double target_rate_hz)
    : series_(&series), step_(update_rate_hz / target_rate_hz) {
    if (series.coefficients.empty()) throw invalid("empty path series");
}

CoefficientInterpolator::Position CoefficientInterpolator::locate(std::size_t sample_index) const {
    const double u = static_cast<double>(sample_index) * step_;
    const double whole = std::floor(u);
    const auto idx = static_cast<std::size_t>(whole);
    if (idx + 1 >= series_->size()) return {series_->size() - 1, 0.0};
    return {idx, u - whole};
}

Complex CoefficientInterpolator::coefficient(std::size_t sample_index) const {
    const auto [i, f] = locate(sample_index);
    const auto& h = series_->coefficients;
    if (f == 0.0) return h[i];
    return Complex(h[i].real() + f * (h[i + 1].real() - h[i].real()),
                   h[i].imag() + f * (h[i + 1].imag() - h[i].imag()));
}

double CoefficientInterpolator::delay_s(std::size_t sample_index) const {
    const auto [i, f] = locate(sample_index);
    const auto& d = series_->delays_s;
    if (f == 0.0) return d[i];
    return d[i] + f * (d[i + 1] - d[i]);
}

PathSeries resample_coefficients(const PathSeries& series, double update_rate_hz,
                                 double target_rate_hz, std::size_t n_samples) {
    if (!(update_rate_hz > 0.0)) throw invalid("update rate must be positive");
    if (!(target_rate_hz >= update_rate_hz)) {
        throw invalid("target rate must not be below the channel update rate");
    }
    const double span_s = static_cast<double>(series.size()) / update_rate_hz;
    const double limit = span_s * target_rate_hz + target_rate_hz / update_rate_hz;
    if (static_cast<double>(n_samples) > limit + 1e-9) {
        throw std::out_of_range("channel: " + std::to_string(n_samples) +
                                " samples exceed the coefficient series span");
    }
    CoefficientInterpolator interp(series, update_rate_hz, target_rate_hz);
    PathSeries out;
    out.coefficients.resize(n_samples);
    out.delays_s.resize(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        out.coefficients[i] = interp.coefficient(i);
        out.delays_s[i] = interp.delay_s(i);
    }
    return out;
}

SpectrumResult doppler_spectrum(const SourceChannel& source, double update_rate_hz,
                                std::size_t nfft) {
    if (nfft < 2 || (nfft & (nfft - 1)) != 0) throw invalid("nfft must be a power of two");
    if (source.paths.empty()) throw invalid("source has no paths");
    const std::size_t snapshots = source.paths.front().size();
    if (nfft > snapshots) {
        throw invalid("nfft " + std::to_string(nfft) + " exceeds snapshot count " +
                      std::to_string(snapshots));
    }

    std::vector<Complex> x(nfft);
    double window_sum = 0.0;
    for (std::size_t t = 0; t < nfft; ++t) {
        Complex c{};
        for (const auto& p : source.paths) c += p.coefficients[t];
        const double w = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(t) / static_cast<double>(nfft));
        window_sum += w;
        x[t] = w * c;
    }
    dsp::fft_in_place(x);

    SpectrumResult out;
    out.frequency_hz.resize(nfft);
    out.power_db.resize(nfft);
    const double df = update_rate_hz / static_cast<double>(nfft);
    const auto half = static_cast<std::int64_t>(nfft / 2);
    const double norm = 1.0 / (window_sum * window_sum);
    out.peak_power_db = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nfft; ++j) {
        const std::int64_t bin = static_cast<std::int64_t>(j) - half + 1;
        const auto idx = static_cast<std::size_t>((bin + static_cast<std::int64_t>(nfft)) %
                                                  static_cast<std::int64_t>(nfft));
        const double p = std::norm(x[idx]) * norm;
        out.frequency_hz[j] = static_cast<double>(bin) * df;
        out.power_db[j] = 10.0 * std::log10(std::max(p, 1e-300));
        if (out.power_db[j] > out.peak_power_db) {
            out.peak_power_db = out.power_db[j];
            out.peak_frequency_hz = out.frequency_hz[j];
        }
    }
    return out;
}

double mean_doppler_hz(const SourceChannel& source, double update_rate_hz) {
    if (source.paths.empty()) return 0.0;
    const std::size_t snapshots = source.paths.front().size();
    Complex acc{};
    Complex prev{};
    for (std::size_t t = 0; t < snapshots; ++t) {
        Complex c{};
        for (const auto& p : source.paths) c += p.coefficients[t];
        if (t > 0) acc += c * std::conj(prev);
        prev = c;
    }
    return std::arg(acc) * update_rate_hz / kTwoPi;
}

}  // namespace synthrf::channel
