#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "synthrf/acquisition.hpp"
#include "synthrf/cdma_waveform.hpp"
#include "synthrf/channel.hpp"
#include "synthrf/prs_waveform.hpp"
#include "synthrf/tracking.hpp"

namespace synthrf::cli {

using nlohmann::json;

/// Missing or ill-typed configuration field; the message carries the JSON
/// path of the field (e.g. "sources[1].paths[0].power_db").
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Seed from --seed when given, otherwise the required "seed" field.
std::uint64_t resolve_seed(const json& cfg, std::optional<std::uint64_t> seed_override);

channel::ChannelSpec parse_channel_spec(const json& cfg, std::optional<std::uint64_t> seed_override);

/// "profile" ("satellite" or "haps") picks the defaults that the other
/// fields override.
cdma::CdmaGenConfig parse_cdma_config(const json& cfg, std::optional<std::uint64_t> seed_override);

nr::PrsGenConfig parse_prs_config(const json& cfg, std::optional<std::uint64_t> seed_override);

/// Reads the optional "acquisition" object.
receiver::AcquisitionConfig parse_acquisition_config(const json& cfg);
/// Reads the optional "tracking" object.
receiver::TrackingConfig parse_tracking_config(const json& cfg);

}  // namespace synthrf::cli
