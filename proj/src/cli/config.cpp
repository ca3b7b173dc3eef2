#include "cli/config.hpp"

#include <cmath>
#include <limits>

#include "synthrf/random.hpp"

namespace synthrf::cli {

namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& require(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ConfigError("config field '" + (path.empty() ? "<root>" : path) + "' must be an object");
    if (!obj.contains(key)) throw ConfigError("missing config field '" + join(path, key) + "'");
    return obj.at(key);
}

template <typename T>
T as(const json& v, const std::string& where) {
    try {
        if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) throw ConfigError("");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError("");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError("");
            if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError("");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError("");
        }
        return v.get<T>();
    } catch (const std::exception&) {
        throw ConfigError("config field '" + where + "' has the wrong type");
    }
}

template <typename T>
T get(const json& obj, const std::string& key, const std::string& path) {
    return as<T>(require(obj, key, path), join(path, key));
}

template <typename T>
T get_or(const json& obj, const std::string& key, const std::string& path, T fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    return as<T>(obj.at(key), join(path, key));
}

const json& array(const json& obj, const std::string& key, const std::string& path) {
    const auto& v = require(obj, key, path);
    if (!v.is_array()) throw ConfigError("config field '" + join(path, key) + "' must be an array");
    return v;
}

// A number, or "inf" / "-inf" since JSON has no infinities.
double extended(const json& obj, const std::string& key, const std::string& path, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    return as<double>(v, join(path, key));
}

std::optional<double> optional_number(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    return as<double>(obj.at(key), join(path, key));
}

}  // namespace

std::uint64_t resolve_seed(const json& cfg, std::optional<std::uint64_t> seed_override) {
    if (seed_override) return *seed_override;
    return get<std::uint64_t>(cfg, "seed", "");
}

channel::ChannelSpec parse_channel_spec(const json& cfg, std::optional<std::uint64_t> seed_override) {
    channel::ChannelSpec spec;
    spec.seed = resolve_seed(cfg, seed_override);
    spec.update_rate_hz = get_or<double>(cfg, "update_rate_hz", "", spec.update_rate_hz);
    spec.duration_s = get_or<double>(cfg, "duration_s", "", spec.duration_s);
    const auto& sources = array(cfg, "sources", "");
    for (std::size_t n = 0; n < sources.size(); ++n) {
        const auto& s = sources[n];
        const auto sp = index("sources", n);
        channel::SourceSpec src;
        src.source_id = get<std::string>(s, "source_id", sp);
        try {
            src.kind = channel::parse_source_kind(get<std::string>(s, "kind", sp));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("config field '" + join(sp, "kind") + "': " + e.what());
        }
        src.los = get_or<bool>(s, "los", sp, true);
        src.fading_spread_hz = get_or<double>(s, "fading_spread_hz", sp, src.fading_spread_hz);
        const auto& paths = array(s, "paths", sp);
        for (std::size_t k = 0; k < paths.size(); ++k) {
            const auto& p = paths[k];
            const auto pp = index(join(sp, "paths"), k);
            channel::PathSpec path;
            path.initial_delay_s = get<double>(p, "initial_delay_s", pp);
            require(p, "power_db", pp);
            path.power_db = extended(p, "power_db", pp, 0.0);
            path.delay_rate = get_or<double>(p, "delay_rate", pp, 0.0);
            path.doppler_hz = get_or<double>(p, "doppler_hz", pp, 0.0);
            path.rician_k_db = extended(p, "rician_k_db", pp, channel::kPureLos);
            src.paths.push_back(path);
        }
        spec.sources.push_back(std::move(src));
    }
    return spec;
}

cdma::CdmaGenConfig parse_cdma_config(const json& cfg, std::optional<std::uint64_t> seed_override) {
    const auto profile = get_or<std::string>(cfg, "profile", "", "satellite");
    cdma::CdmaGenConfig out;
    if (profile == "satellite") {
        out = cdma::CdmaGenConfig::satellite();
    } else if (profile == "haps") {
        out = cdma::CdmaGenConfig::haps();
    } else {
        throw ConfigError("config field 'profile' must be \"satellite\" or \"haps\"");
    }
    const auto seed = resolve_seed(cfg, seed_override);
    out.sample_rate_hz = get_or<double>(cfg, "sample_rate_hz", "", out.sample_rate_hz);
    out.if_hz = get_or<double>(cfg, "if_hz", "", out.if_hz);
    out.chipping_rate_hz = get_or<double>(cfg, "chipping_rate_hz", "", out.chipping_rate_hz);
    out.data_bit_s = get_or<double>(cfg, "data_bit_s", "", out.data_bit_s);
    out.duration_s = get<double>(cfg, "duration_s", "");
    out.data_modulation = get_or<bool>(cfg, "data_modulation", "", true);
    out.data_seed = get_or<std::uint64_t>(cfg, "data_seed", "", derive_seed(seed, 1));
    out.noise_seed = get_or<std::uint64_t>(cfg, "noise_seed", "", derive_seed(seed, 2));
    out.cn0_dbhz = optional_number(cfg, "cn0_dbhz", "");
    const auto& sources = array(cfg, "sources", "");
    for (std::size_t n = 0; n < sources.size(); ++n) {
        const auto sp = index("sources", n);
        out.sources.push_back({get<std::string>(sources[n], "source_id", sp), get<int>(sources[n], "prn", sp)});
    }
    return out;
}

namespace {

nr::CarrierConfig parse_carrier(const json& c) {
    nr::CarrierConfig out;
    const std::string p = "carrier";
    out.n_cell_id = get_or<int>(c, "n_cell_id", p, out.n_cell_id);
    out.scs_hz = get_or<double>(c, "scs_hz", p, out.scs_hz);
    out.n_rb = get_or<int>(c, "n_rb", p, out.n_rb);
    out.n_fft = get_or<int>(c, "n_fft", p, out.n_fft);
    out.symbols_per_slot = get_or<int>(c, "symbols_per_slot", p, out.symbols_per_slot);
    out.slots_per_frame = get_or<int>(c, "slots_per_frame", p, out.slots_per_frame);
    out.frame_duration_s = get_or<double>(c, "frame_duration_s", p, out.frame_duration_s);
    out.carrier_hz = get_or<double>(c, "carrier_hz", p, out.carrier_hz);
    return out;
}

nr::PrsResourceConfig parse_prs(const json& c, const std::string& p, int default_id) {
    nr::PrsResourceConfig out;
    out.n_prs_id = default_id;
    out.resource_set_period_slots = get_or<int>(c, "resource_set_period_slots", p, out.resource_set_period_slots);
    out.resource_offset_slots = get_or<int>(c, "resource_offset_slots", p, out.resource_offset_slots);
    out.resource_repetition = get_or<int>(c, "resource_repetition", p, out.resource_repetition);
    out.resource_time_gap_slots = get_or<int>(c, "resource_time_gap_slots", p, out.resource_time_gap_slots);
    out.comb_size = get_or<int>(c, "comb_size", p, out.comb_size);
    out.comb_offset = get_or<int>(c, "comb_offset", p, out.comb_offset);
    out.num_symbols = get_or<int>(c, "num_symbols", p, out.num_symbols);
    out.symbol_start = get_or<int>(c, "symbol_start", p, out.symbol_start);
    out.n_prs_id = get_or<int>(c, "n_prs_id", p, out.n_prs_id);
    out.rb_start = get_or<int>(c, "rb_start", p, out.rb_start);
    out.n_rb_prs = get_or<int>(c, "n_rb_prs", p, out.n_rb_prs);
    if (c.is_object() && c.contains("muting_pattern")) {
        const auto& bits = array(c, "muting_pattern", p);
        for (std::size_t i = 0; i < bits.size(); ++i) {
            const auto b = as<int>(bits[i], index(join(p, "muting_pattern"), i));
            if (b != 0 && b != 1) throw ConfigError("config field '" + index(join(p, "muting_pattern"), i) + "' must be 0 or 1");
            out.muting_pattern.push_back(b == 1);
        }
    }
    return out;
}

}  // namespace

nr::PrsGenConfig parse_prs_config(const json& cfg, std::optional<std::uint64_t> seed_override) {
    nr::PrsGenConfig out;
    out.seed = resolve_seed(cfg, seed_override);
    if (cfg.contains("carrier")) out.carrier = parse_carrier(cfg.at("carrier"));
    out.duration_s = get<double>(cfg, "duration_s", "");
    out.cn0_dbhz = optional_number(cfg, "cn0_dbhz", "");
    const auto& gnbs = array(cfg, "gnbs", "");
    for (std::size_t n = 0; n < gnbs.size(); ++n) {
        const auto gp = index("gnbs", n);
        nr::GnbSource g;
        g.source_id = get<std::string>(gnbs[n], "source_id", gp);
        g.pdsch_filler = get_or<bool>(gnbs[n], "pdsch_filler", gp, true);
        const json empty = json::object();
        const auto& prs = gnbs[n].contains("prs") ? gnbs[n].at("prs") : empty;
        g.prs = parse_prs(prs, join(gp, "prs"), static_cast<int>(n));
        out.gnbs.push_back(std::move(g));
    }
    return out;
}

receiver::AcquisitionConfig parse_acquisition_config(const json& cfg) {
    receiver::AcquisitionConfig out;
    if (!cfg.is_object() || !cfg.contains("acquisition")) return out;
    const auto& a = cfg.at("acquisition");
    const std::string p = "acquisition";
    out.freq_search_min_hz = get_or<double>(a, "freq_search_min_hz", p, out.freq_search_min_hz);
    out.freq_search_max_hz = get_or<double>(a, "freq_search_max_hz", p, out.freq_search_max_hz);
    out.freq_step_hz = get_or<double>(a, "freq_step_hz", p, out.freq_step_hz);
    out.snr_threshold_db = get_or<double>(a, "snr_threshold_db", p, out.snr_threshold_db);
    out.coherent_ms = get_or<double>(a, "coherent_ms", p, out.coherent_ms);
    out.fine_freq_ms = get_or<double>(a, "fine_freq_ms", p, out.fine_freq_ms);
    return out;
}

receiver::TrackingConfig parse_tracking_config(const json& cfg) {
    receiver::TrackingConfig out;
    if (!cfg.is_object() || !cfg.contains("tracking")) return out;
    const auto& t = cfg.at("tracking");
    const std::string p = "tracking";
    out.dll_bw_hz = get_or<double>(t, "dll_bw_hz", p, out.dll_bw_hz);
    out.pll_bw_hz = get_or<double>(t, "pll_bw_hz", p, out.pll_bw_hz);
    out.correlator_spacing_chips = get_or<double>(t, "correlator_spacing_chips", p, out.correlator_spacing_chips);
    out.integration_ms = get_or<double>(t, "integration_ms", p, out.integration_ms);
    out.damping = get_or<double>(t, "damping", p, out.damping);
    out.fll_bw_hz = get_or<double>(t, "fll_bw_hz", p, out.fll_bw_hz);
    out.fll_assist_ms = get_or<double>(t, "fll_assist_ms", p, out.fll_assist_ms);
    out.carrier_aiding = get_or<bool>(t, "carrier_aiding", p, out.carrier_aiding);
    out.carrier_hz = get_or<double>(t, "carrier_hz", p, out.carrier_hz);
    out.lock_loss_db = get_or<double>(t, "lock_loss_db", p, out.lock_loss_db);
    out.lock_loss_epochs = get_or<int>(t, "lock_loss_epochs", p, out.lock_loss_epochs);
    return out;
}

}  // namespace synthrf::cli
