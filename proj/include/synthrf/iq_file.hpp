#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "synthrf/dsp.hpp"

namespace synthrf::io {

enum class SampleFormat { f32, i16 };

std::string to_string(SampleFormat f);
/// Throws std::invalid_argument for anything but "f32" or "i16".
SampleFormat parse_sample_format(const std::string& name);

struct IqWriteOptions {
    SampleFormat format = SampleFormat::f32;
    // i16 only: value mapped to 32767. Zero picks the largest |I| or |Q|.
    double full_scale = 0.0;
    // Store only the real part (the real IF signal), one value per sample.
    bool real_only = false;
};

class IqFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// <path> with its extension replaced by ".json".
std::filesystem::path sidecar_path(const std::filesystem::path& iq_path);

/// Writes little-endian interleaved samples plus the JSON sidecar. The
/// sidecar holds extra merged with the stream description (format,
/// full_scale, real, sample_rate_hz, if_hz, epoch_s, sample_count).
void write_iq(const std::filesystem::path& path, const dsp::SignalBuffer& buf, const IqWriteOptions& opts,
              const nlohmann::json& extra = nlohmann::json::object());

struct IqFile {
    dsp::SignalBuffer buffer;
    nlohmann::json metadata;
};

/// Reads samples as described by the sidecar. Throws IqFormatError when
/// the sidecar is missing fields or the sample file size disagrees.
IqFile read_iq(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace synthrf::io
