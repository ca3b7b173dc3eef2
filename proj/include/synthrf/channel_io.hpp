#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "synthrf/channel.hpp"

namespace synthrf::channel {

/// Malformed channel file. The message names the offending line (text) or
/// byte offset (binary).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Text layout:
//   SYNTHRF-CHAN v1
//   source <id> <kind> <los 1|0> <n_paths> <f_ch_hz> <n_snapshots>
//   <t_index>,<H_real>,<H_imag>,<delay_s>     (n_snapshots rows per path)
// Numbers are written in shortest round-trip form, so store/load is exact.
// A ".bin" extension selects the packed little-endian variant.

void write_channel_text(const ChannelSet& set, std::ostream& out);
ChannelSet read_channel_text(std::istream& in);

void write_channel_binary(const ChannelSet& set, std::ostream& out);
ChannelSet read_channel_binary(std::istream& in);

/// Dispatches on extension. Throws std::runtime_error on I/O failure.
void store_channel(const ChannelSet& set, const std::filesystem::path& path);
/// Throws FormatError for malformed content, std::runtime_error when the
/// file cannot be opened.
ChannelSet load_channel(const std::filesystem::path& path);

}  // namespace synthrf::channel
