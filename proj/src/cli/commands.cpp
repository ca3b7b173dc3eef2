#include "cli/commands.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cli/config.hpp"
#include "synthrf/acquisition.hpp"
#include "synthrf/cdma_waveform.hpp"
#include "synthrf/channel.hpp"
#include "synthrf/channel_io.hpp"
#include "synthrf/iq_file.hpp"
#include "synthrf/multipath.hpp"
#include "synthrf/prn.hpp"
#include "synthrf/prs_waveform.hpp"
#include "synthrf/tracking.hpp"

namespace synthrf::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
    std::optional<std::uint64_t> seed;
    std::string config;
    std::string out;
    std::string format = "f32";
    // synthesize
    std::string kind;
    std::string channel;
    double full_scale = 0.0;
    bool real_only = false;
    // spectrum
    std::string source;
    std::size_t nfft = 1024;
    // acquire / track
    std::string iq;
    std::vector<int> prns;
    std::optional<double> snr_threshold;
    std::string surface;
};

std::string num(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json load_config(const Options& o, bool required) {
    if (o.config.empty()) {
        if (required) throw ConfigError("--config is required");
        return json::object();
    }
    try {
        return io::read_json_file(o.config);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

void require_out(const Options& o) {
    if (o.out.empty()) throw ConfigError("--out is required");
}

// CSV goes to --out when given, otherwise to stdout.
class CsvSink {
public:
    CsvSink(const std::string& path, std::ostream& fallback) {
        if (path.empty()) {
            stream_ = &fallback;
            return;
        }
        file_.open(path, std::ios::trunc);
        if (!file_) throw std::runtime_error("cannot open '" + path + "' for writing");
        stream_ = &file_;
    }
    std::ostream& operator*() { return *stream_; }
    void close(const std::string& path) {
        stream_->flush();
        if (!*stream_) throw std::runtime_error("write to '" + path + "' failed");
    }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

double path_power(const channel::PathSeries& p) { return dsp::mean_power(p.coefficients); }

double source_power(const channel::SourceChannel& s) {
    double acc = 0.0;
    for (const auto& p : s.paths) acc += path_power(p);
    return acc;
}

double db(double p) { return 10.0 * std::log10(p); }

int cmd_gen_channel(const Options& o, std::ostream& out) {
    require_out(o);
    const auto spec = parse_channel_spec(load_config(o, true), o.seed);
    const auto set = channel::generate_synthetic_channel(spec);
    channel::store_channel(set, o.out);
    for (const auto& s : set.sources) {
        out << s.source_id << " (" << channel::to_string(s.kind) << (s.los ? ", LOS" : ", NLOS") << "): "
            << s.paths.size() << " path(s), mean power " << num(std::round(db(source_power(s)) * 100.0) / 100.0)
            << " dB\n";
        for (std::size_t k = 0; k < s.paths.size(); ++k) {
            out << "  path " << k << ": delay " << num(s.paths[k].delays_s.front()) << " s, power "
                << num(std::round(db(path_power(s.paths[k])) * 100.0) / 100.0) << " dB\n";
        }
    }
    out << "wrote " << o.out << "\n";
    return kExitOk;
}

json truth_entry(const channel::ChannelSet& channels, const std::string& id, double d_min, double fs) {
    const auto& ch = channels.find(id);
    const double rel = ch.initial_delay_s() - d_min;
    json j;
    j["source_id"] = id;
    j["los"] = ch.los;
    j["initial_delay_s"] = ch.initial_delay_s();
    j["relative_delay_s"] = rel;
    j["relative_delay_samples"] = std::llround(rel * fs);
    j["doppler_hz"] = channels.update_rate_hz > 0 ? channel::mean_doppler_hz(ch, channels.update_rate_hz) : 0.0;
    j["mean_power_db"] = db(source_power(ch));
    return j;
}

int cmd_synthesize(const Options& o, std::ostream& out) {
    require_out(o);
    if (o.channel.empty()) throw ConfigError("--channel is required");
    const auto cfg_json = load_config(o, true);
    io::IqWriteOptions wopts;
    try {
        wopts.format = io::parse_sample_format(o.format);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    wopts.full_scale = o.full_scale;
    wopts.real_only = o.real_only;
    const auto channels = channel::load_channel(o.channel);

    json meta;
    meta["kind"] = o.kind;
    meta["seed"] = resolve_seed(cfg_json, o.seed);
    meta["channel_file"] = fs::path(o.channel).filename().string();
    json truth = json::array();

    std::optional<dsp::SignalBuffer> buf;
    if (o.kind == "cdma") {
        const auto cfg = parse_cdma_config(cfg_json, o.seed);
        if (cfg.sources.empty()) throw ConfigError("config field 'sources' is empty");
        std::vector<std::string> ids;
        for (const auto& s : cfg.sources) ids.push_back(s.source_id);
        const double d_min = channel::minimum_initial_delay(channels, ids);
        buf = cdma::synthesize(cfg, channels, d_min);

        const auto period = static_cast<std::int64_t>(
            std::llround(prn::kCaCodeLength / cfg.chipping_rate_hz * cfg.sample_rate_hz));
        for (const auto& s : cfg.sources) {
            auto j = truth_entry(channels, s.source_id, d_min, cfg.sample_rate_hz);
            j["prn"] = s.prn_id;
            j["expected_code_phase_samples"] = j["relative_delay_samples"].get<std::int64_t>() % period;
            truth.push_back(j);
        }
        meta["profile"] = cfg_json.value("profile", "satellite");
        meta["chipping_rate_hz"] = cfg.chipping_rate_hz;
        meta["data_bit_s"] = cfg.data_bit_s;
        meta["data_modulation"] = cfg.data_modulation;
        meta["data_seed"] = cfg.data_seed;
        meta["noise_seed"] = cfg.noise_seed;
        meta["cn0_dbhz"] = cfg.cn0_dbhz ? json(*cfg.cn0_dbhz) : json(nullptr);
        meta["reference_delay_s"] = d_min;
    } else {
        const auto cfg = parse_prs_config(cfg_json, o.seed);
        if (cfg.gnbs.empty()) throw ConfigError("config field 'gnbs' is empty");
        std::vector<std::string> ids;
        for (const auto& g : cfg.gnbs) ids.push_back(g.source_id);
        const double d_min = channel::minimum_initial_delay(channels, ids);
        buf = nr::synthesize_gnb(cfg, channels, d_min);
        json gnbs = json::array();
        for (const auto& g : cfg.gnbs) {
            truth.push_back(truth_entry(channels, g.source_id, d_min, cfg.carrier.sample_rate_hz()));
            gnbs.push_back({{"source_id", g.source_id},
                            {"pdsch_filler", g.pdsch_filler},
                            {"n_prs_id", g.prs.n_prs_id},
                            {"comb_size", g.prs.comb_size},
                            {"comb_offset", g.prs.comb_offset},
                            {"num_symbols", g.prs.num_symbols},
                            {"symbol_start", g.prs.symbol_start},
                            {"resource_set_period_slots", g.prs.resource_set_period_slots},
                            {"resource_offset_slots", g.prs.resource_offset_slots},
                            {"resource_repetition", g.prs.resource_repetition},
                            {"resource_time_gap_slots", g.prs.resource_time_gap_slots},
                            {"rb_start", g.prs.rb_start},
                            {"n_rb_prs", g.prs.n_rb_prs},
                            {"muting_pattern", g.prs.muting_pattern}});
        }
        const auto& c = cfg.carrier;
        meta["carrier"] = {{"n_cell_id", c.n_cell_id},       {"scs_hz", c.scs_hz},
                           {"n_rb", c.n_rb},                 {"n_fft", c.n_fft},
                           {"symbols_per_slot", c.symbols_per_slot}, {"slots_per_frame", c.slots_per_frame},
                           {"frame_duration_s", c.frame_duration_s}, {"carrier_hz", c.carrier_hz}};
        meta["gnbs"] = gnbs;
        meta["cn0_dbhz"] = cfg.cn0_dbhz ? json(*cfg.cn0_dbhz) : json(nullptr);
        meta["reference_delay_s"] = d_min;
    }
    meta["ground_truth"] = {{"sources", truth}};
    io::write_iq(o.out, *buf, wopts, meta);
    out << "wrote " << buf->size() << " samples at " << num(buf->sample_rate_hz()) << " Hz to " << o.out << " ("
        << io::to_string(wopts.format) << (wopts.real_only ? ", real" : ", complex") << ")\n";
    return kExitOk;
}

int cmd_spectrum(const Options& o, std::ostream& out) {
    if (o.channel.empty()) throw ConfigError("--channel is required");
    if (o.source.empty()) throw ConfigError("--source is required");
    const auto channels = channel::load_channel(o.channel);
    const auto* src = channels.find_if_present(o.source);
    if (!src) throw ConfigError("channel file has no source '" + o.source + "'");
    const auto spec = channel::doppler_spectrum(*src, channels.update_rate_hz, o.nfft);
    CsvSink sink(o.out, out);
    *sink << "frequency_hz,power_db\n";
    for (std::size_t i = 0; i < spec.frequency_hz.size(); ++i) {
        *sink << num(spec.frequency_hz[i]) << ',' << num(spec.power_db[i]) << '\n';
    }
    sink.close(o.out);
    if (!o.out.empty()) {
        out << o.source << ": peak " << num(spec.peak_frequency_hz) << " Hz at "
            << num(std::round(spec.peak_power_db * 100.0) / 100.0) << " dB\n";
    }
    return kExitOk;
}

struct Recording {
    dsp::SignalBuffer buffer;
    json metadata;
    double chipping_rate_hz;
    std::map<int, json> truth;  // by PRN
};

Recording load_recording(const Options& o) {
    if (o.iq.empty()) throw ConfigError("--iq is required");
    auto file = io::read_iq(o.iq);
    if (file.metadata.value("kind", std::string("cdma")) == "prs") {
        throw ConfigError("'" + o.iq + "' holds a PRS waveform; acquisition and tracking need a CDMA recording");
    }
    Recording r{std::move(file.buffer), std::move(file.metadata), 0.0, {}};
    r.chipping_rate_hz = r.metadata.value("chipping_rate_hz", prn::kCaChippingRateHz);
    if (r.metadata.contains("ground_truth")) {
        for (const auto& s : r.metadata["ground_truth"].value("sources", json::array())) {
            if (s.contains("prn")) r.truth[s["prn"].get<int>()] = s;
        }
    }
    return r;
}

std::vector<int> prn_list(const Options& o, const Recording& r) {
    if (!o.prns.empty()) return o.prns;
    std::vector<int> prns;
    for (const auto& [p, t] : r.truth) prns.push_back(p);
    if (prns.empty()) {
        for (int p = 1; p <= prn::kMaxPrn; ++p) prns.push_back(p);
    }
    return prns;
}

std::string surface_path(const std::string& base, int prn, bool many) {
    if (!many) return base;
    fs::path p(base);
    const auto ext = p.extension().string();
    p.replace_extension();
    return p.string() + "_prn" + (prn < 10 ? "0" : "") + std::to_string(prn) + ext;
}

void write_surface(const std::string& path, const receiver::AcquisitionResult& r) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << "freq_hz";
    for (std::size_t i = 0; i < r.surface_lags; ++i) f << ",lag" << i;
    f << '\n';
    for (std::size_t j = 0; j < r.surface_freqs_hz.size(); ++j) {
        f << num(r.surface_freqs_hz[j]);
        for (std::size_t i = 0; i < r.surface_lags; ++i) f << ',' << num(r.surface[j * r.surface_lags + i]);
        f << '\n';
    }
    if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

receiver::AcquisitionConfig acquisition_settings(const Options& o, const json& cfg) {
    auto acq = parse_acquisition_config(cfg);
    if (o.snr_threshold) acq.snr_threshold_db = *o.snr_threshold;
    acq.keep_surface = !o.surface.empty();
    try {
        acq.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return acq;
}

// Code phase difference folded into half a code period either side of zero.
std::int64_t wrapped_error(std::int64_t diff, double fs, const prn::SpreadingCode& code) {
    const auto period = static_cast<std::int64_t>(receiver::code_period_samples(code, fs));
    diff = ((diff % period) + period) % period;
    return diff > period / 2 ? diff - period : diff;
}

int cmd_acquire(const Options& o, std::ostream& out) {
    const auto cfg = load_config(o, false);
    const auto acq = acquisition_settings(o, cfg);
    const auto rec = load_recording(o);
    const auto prns = prn_list(o, rec);
    const bool with_truth = !rec.truth.empty();

    CsvSink sink(o.out, out);
    *sink << "prn,acquired,code_phase_samples,coarse_freq_hz,fine_freq_hz,snr_db";
    if (with_truth) *sink << ",true_code_phase_samples,code_phase_error_samples,true_doppler_hz,fine_freq_error_hz";
    *sink << '\n';
    for (int p : prns) {
        const auto code = prn::generate_ca_code(p, rec.chipping_rate_hz);
        const auto r = receiver::acquire(rec.buffer, code, acq);
        if (!o.surface.empty()) write_surface(surface_path(o.surface, p, prns.size() > 1), r);
        *sink << p << ',' << (r.acquired ? 1 : 0) << ',' << r.code_phase_samples << ',' << num(r.coarse_freq_hz) << ','
              << num(r.fine_freq_hz) << ',' << num(r.snr_db);
        if (with_truth) {
            const auto it = rec.truth.find(p);
            if (it == rec.truth.end()) {
                *sink << ",,,,";
            } else {
                const auto tau = it->second["expected_code_phase_samples"].get<std::int64_t>();
                const double f = it->second["doppler_hz"].get<double>();
                *sink << ',' << tau << ',' << wrapped_error(r.code_phase_samples - tau, rec.buffer.sample_rate_hz(), code) << ',' << num(f) << ','
                      << num(r.fine_freq_hz - f);
            }
        }
        *sink << '\n';
        if (!o.out.empty()) {
            out << "PRN " << p << ": " << (r.acquired ? "acquired" : "not acquired") << ", code phase "
                << r.code_phase_samples << ", Doppler " << num(r.fine_freq_hz) << " Hz, SNR "
                << num(std::round(r.snr_db * 10.0) / 10.0) << " dB\n";
        }
    }
    sink.close(o.out);
    return kExitOk;
}

int cmd_track(const Options& o, std::ostream& out, std::ostream& err) {
    const auto cfg = load_config(o, false);
    const auto acq = acquisition_settings(o, cfg);
    auto trk = parse_tracking_config(cfg);
    try {
        trk.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const auto rec = load_recording(o);
    const auto prns = prn_list(o, rec);
    const bool with_truth = !rec.truth.empty();
    const double period =
        std::round(prn::kCaCodeLength / rec.chipping_rate_hz * rec.buffer.sample_rate_hz());

    CsvSink sink(o.out, out);
    *sink << "prn,epoch_s,code_delay_samples,doppler_hz,prompt_i,prompt_q,dll_discriminator,pll_discriminator";
    if (with_truth) *sink << ",code_delay_error_samples,doppler_error_hz";
    *sink << '\n';
    for (int p : prns) {
        const auto code = prn::generate_ca_code(p, rec.chipping_rate_hz);
        const auto a = receiver::acquire(rec.buffer, code, acq);
        if (!a.acquired) {
            err << "PRN " << p << ": not acquired (SNR " << num(std::round(a.snr_db * 10.0) / 10.0)
                << " dB), skipped\n";
            continue;
        }
        const auto trace = receiver::track(rec.buffer, code, a, trk);
        const auto it = rec.truth.find(p);
        for (const auto& e : trace.epochs) {
            *sink << p << ',' << num(e.epoch_s) << ',' << num(e.code_delay_samples) << ',' << num(e.doppler_hz) << ','
                  << num(e.prompt_i) << ',' << num(e.prompt_q) << ',' << num(e.dll_discriminator) << ','
                  << num(e.pll_discriminator);
            if (with_truth) {
                if (it == rec.truth.end()) {
                    *sink << ",,";
                } else {
                    double d = e.code_delay_samples - it->second["expected_code_phase_samples"].get<double>();
                    d -= period * std::round(d / period);
                    *sink << ',' << num(d) << ',' << num(e.doppler_hz - it->second["doppler_hz"].get<double>());
                }
            }
            *sink << '\n';
        }
        if (trace.lock_lost) err << "PRN " << p << ": lock lost after " << trace.epochs.size() << " epochs\n";
        if (!o.out.empty()) {
            out << "PRN " << p << ": tracked " << trace.epochs.size() << " epochs\n";
        }
    }
    sink.close(o.out);
    return kExitOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Synthetic satellite, HAPS and NR PRS waveform generator with a software receiver", "synthrf"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Seed overriding the config's \"seed\"");
    app.add_option("--config", o.config, "JSON configuration file");
    app.add_option("--out", o.out, "Output file");
    app.add_option("--format", o.format, "I/Q sample format")->check(CLI::IsMember({"f32", "i16"}));

    auto* gen = app.add_subcommand("gen-channel", "Generate a synthetic channel file from a spec");

    auto* syn = app.add_subcommand("synthesize", "Synthesize a CDMA or PRS waveform through a channel");
    syn->add_option("kind", o.kind, "cdma or prs")->required()->check(CLI::IsMember({"cdma", "prs"}));
    syn->add_option("--channel", o.channel, "Channel file")->required();
    syn->add_option("--full-scale", o.full_scale, "i16 full-scale value (default: signal peak)");
    syn->add_flag("--real", o.real_only, "Store only the real part");

    auto* spec = app.add_subcommand("spectrum", "Doppler spectrum of one source of a channel file");
    spec->add_option("--channel", o.channel, "Channel file")->required();
    spec->add_option("--source", o.source, "Source id")->required();
    spec->add_option("--nfft", o.nfft, "Transform length (power of two)")->capture_default_str();

    std::vector<CLI::App*> rx;
    rx.push_back(app.add_subcommand("acquire", "Parallel code phase search on an I/Q recording"));
    rx.push_back(app.add_subcommand("track", "Acquire then track DLL/PLL on an I/Q recording"));
    double snr = 0.0;
    std::vector<CLI::Option*> snr_opts;
    for (auto* sub : rx) {
        sub->add_option("--iq", o.iq, "I/Q file (with JSON sidecar)")->required();
        sub->add_option("--prn", o.prns, "PRN list, e.g. 1,14,19")->delimiter(',')->check(CLI::Range(1, prn::kMaxPrn));
        snr_opts.push_back(sub->add_option("--snr-threshold", snr, "Acquisition SNR gate in dB (default 25)"));
    }
    rx[0]->add_option("--surface", o.surface, "Write the correlation surface as CSV");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    if (seed_opt->count() > 0) o.seed = seed;
    for (auto* s : snr_opts) {
        if (s->count() > 0) o.snr_threshold = snr;
    }

    if (gen->parsed()) return cmd_gen_channel(o, out);
    if (syn->parsed()) return cmd_synthesize(o, out);
    if (spec->parsed()) return cmd_spectrum(o, out);
    if (rx[0]->parsed()) return cmd_acquire(o, out);
    return cmd_track(o, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace synthrf::cli
