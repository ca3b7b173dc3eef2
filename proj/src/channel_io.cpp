#include "synthrf/channel_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace synthrf::channel {

static_assert(std::endian::native == std::endian::little, "binary channel files assume a little-endian host");

namespace {

constexpr std::string_view kTextMagic = "SYNTHRF-CHAN v1";
constexpr char kBinaryMagic[8] = {'S', 'R', 'F', 'C', 'H', 'A', 'N', '1'};

void append_number(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        parts.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

class TextReader {
public:
    explicit TextReader(std::istream& in) : in_(in) {}

    // Next non-empty line; false at end of input.
    bool next(std::string& line) {
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!trim(line).empty()) return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw FormatError("channel file line " + std::to_string(line_no_) + ": " + what);
    }

    template <typename T>
    T number(std::string_view field, const char* name) const {
        field = trim(field);
        T v{};
        const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
        if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
            fail(std::string("cannot parse ") + name + " '" + std::string(field) + "'");
        }
        return v;
    }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

void check_record(double re, double im, double delay, const auto& fail) {
    if (!std::isfinite(re) || !std::isfinite(im)) fail("non-finite coefficient");
    if (!std::isfinite(delay)) fail("non-finite delay");
    if (delay < 0.0) fail("negative delay");
}

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

class BinaryReader {
public:
    explicit BinaryReader(std::istream& in) : in_(in) {}

    template <typename T>
    T get(const char* what) {
        T v{};
        if (!in_.read(reinterpret_cast<char*>(&v), sizeof v)) fail(std::string("truncated ") + what);
        offset_ += sizeof v;
        return v;
    }

    std::string bytes(std::size_t n, const char* what) {
        std::string s(n, '\0');
        if (n > 0 && !in_.read(s.data(), static_cast<std::streamsize>(n))) {
            fail(std::string("truncated ") + what);
        }
        offset_ += n;
        return s;
    }

    bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

    [[noreturn]] void fail(const std::string& what) const {
        throw FormatError("channel file byte " + std::to_string(offset_) + ": " + what);
    }

private:
    std::istream& in_;
    std::size_t offset_ = 0;
};

void check_writable(const ChannelSet& set) {
    set.validate();
    for (const auto& s : set.sources) {
        if (s.source_id.empty() || s.source_id.find_first_of(" \t\r\n,") != std::string::npos) {
            throw std::invalid_argument("channel: source id '" + s.source_id +
                                        "' must be non-empty without whitespace or commas");
        }
    }
}

// Shared by both readers once a source header is known.
void check_rate(ChannelSet& set, bool first, double f_ch, std::uint64_t snapshots, const auto& fail) {
    if (!(f_ch > 0.0) || !std::isfinite(f_ch)) fail("update rate must be positive");
    if (first) {
        set.update_rate_hz = f_ch;
        set.duration_s = static_cast<double>(snapshots) / f_ch;
        if (set.snapshot_count() != snapshots) fail("snapshot count not representable");
        return;
    }
    if (f_ch != set.update_rate_hz) fail("update rate differs between sources");
    if (snapshots != set.snapshot_count()) fail("snapshot count differs between sources");
}

}  // namespace

void write_channel_text(const ChannelSet& set, std::ostream& out) {
    check_writable(set);
    std::string buf;
    buf.append(kTextMagic).push_back('\n');
    const std::size_t snapshots = set.snapshot_count();
    for (const auto& src : set.sources) {
        buf += "source ";
        buf += src.source_id;
        buf += ' ';
        buf += to_string(src.kind);
        buf += src.los ? " 1 " : " 0 ";
        buf += std::to_string(src.paths.size());
        buf += ' ';
        append_number(buf, set.update_rate_hz);
        buf += ' ';
        buf += std::to_string(snapshots);
        buf += '\n';
        for (const auto& path : src.paths) {
            for (std::size_t t = 0; t < snapshots; ++t) {
                buf += std::to_string(t);
                buf += ',';
                append_number(buf, path.coefficients[t].real());
                buf += ',';
                append_number(buf, path.coefficients[t].imag());
                buf += ',';
                append_number(buf, path.delays_s[t]);
                buf += '\n';
            }
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
            buf.clear();
        }
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        buf.clear();
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

ChannelSet read_channel_text(std::istream& in) {
    TextReader r(in);
    std::string line;
    if (!r.next(line) || trim(line) != kTextMagic) r.fail("missing 'SYNTHRF-CHAN v1' header");

    ChannelSet set;
    const auto fail = [&r](const std::string& what) { r.fail(what); };
    while (r.next(line)) {
        const auto fields = split(trim(line), ' ');
        if (fields.size() != 7 || fields[0] != "source") {
            r.fail("expected 'source <id> <kind> <los> <n_paths> <f_ch_hz> <n_snapshots>'");
        }
        SourceChannel src;
        src.source_id = std::string(fields[1]);
        try {
            src.kind = parse_source_kind(fields[2]);
        } catch (const std::invalid_argument& e) {
            r.fail(e.what());
        }
        if (fields[3] != "0" && fields[3] != "1") r.fail("los flag must be 0 or 1");
        src.los = fields[3] == "1";
        const auto n_paths = r.number<std::size_t>(fields[4], "path count");
        if (n_paths == 0) r.fail("source '" + src.source_id + "' has no paths");
        const auto f_ch = r.number<double>(fields[5], "update rate");
        const auto snapshots = r.number<std::uint64_t>(fields[6], "snapshot count");
        check_rate(set, set.sources.empty(), f_ch, snapshots, fail);
        if (set.find_if_present(src.source_id)) r.fail("duplicate source '" + src.source_id + "'");

        for (std::size_t k = 0; k < n_paths; ++k) {
            PathSeries path;
            path.coefficients.resize(snapshots);
            path.delays_s.resize(snapshots);
            for (std::uint64_t t = 0; t < snapshots; ++t) {
                if (!r.next(line)) {
                    r.fail("truncated: source '" + src.source_id + "' path " + std::to_string(k) +
                           " ends after " + std::to_string(t) + " of " + std::to_string(snapshots) +
                           " snapshots");
                }
                const auto cols = split(line, ',');
                if (cols.size() != 4) r.fail("expected 't_index,H_real,H_imag,delay_s'");
                const auto index = r.number<std::uint64_t>(cols[0], "t_index");
                if (index != t) {
                    r.fail("source '" + src.source_id + "' path " + std::to_string(k) + ": t_index " +
                           std::to_string(index) + " where " + std::to_string(t) + " expected");
                }
                const double re = r.number<double>(cols[1], "H_real");
                const double im = r.number<double>(cols[2], "H_imag");
                const double delay = r.number<double>(cols[3], "delay_s");
                check_record(re, im, delay, fail);
                path.coefficients[t] = Complex(re, im);
                path.delays_s[t] = delay;
            }
            src.paths.push_back(std::move(path));
        }
        set.sources.push_back(std::move(src));
    }
    if (set.sources.empty()) r.fail("no sources");
    try {
        set.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
    return set;
}

void write_channel_binary(const ChannelSet& set, std::ostream& out) {
    check_writable(set);
    out.write(kBinaryMagic, sizeof kBinaryMagic);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(set.sources.size()));
    const std::uint64_t snapshots = set.snapshot_count();
    std::vector<double> rec;
    for (const auto& src : set.sources) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(src.source_id.size()));
        out.write(src.source_id.data(), static_cast<std::streamsize>(src.source_id.size()));
        put<std::uint8_t>(out, static_cast<std::uint8_t>(src.kind));
        put<std::uint8_t>(out, src.los ? 1 : 0);
        put<std::uint32_t>(out, static_cast<std::uint32_t>(src.paths.size()));
        put<double>(out, set.update_rate_hz);
        put<std::uint64_t>(out, snapshots);
        for (const auto& path : src.paths) {
            rec.resize(4 * snapshots);
            for (std::uint64_t t = 0; t < snapshots; ++t) {
                rec[4 * t] = static_cast<double>(t);
                rec[4 * t + 1] = path.coefficients[t].real();
                rec[4 * t + 2] = path.coefficients[t].imag();
                rec[4 * t + 3] = path.delays_s[t];
            }
            out.write(reinterpret_cast<const char*>(rec.data()),
                      static_cast<std::streamsize>(rec.size() * sizeof(double)));
        }
    }
}

ChannelSet read_channel_binary(std::istream& in) {
    BinaryReader r(in);
    if (r.bytes(sizeof kBinaryMagic, "header") != std::string(kBinaryMagic, sizeof kBinaryMagic)) {
        r.fail("bad magic, expected SRFCHAN1");
    }
    const auto fail = [&r](const std::string& what) { r.fail(what); };
    const auto n_sources = r.get<std::uint32_t>("source count");
    if (n_sources == 0) r.fail("no sources");
    ChannelSet set;
    for (std::uint32_t n = 0; n < n_sources; ++n) {
        SourceChannel src;
        const auto id_len = r.get<std::uint32_t>("source id length");
        if (id_len == 0 || id_len > 4096) r.fail("implausible source id length");
        src.source_id = r.bytes(id_len, "source id");
        const auto kind = r.get<std::uint8_t>("source kind");
        if (kind > static_cast<std::uint8_t>(SourceKind::gnb)) r.fail("unknown source kind");
        src.kind = static_cast<SourceKind>(kind);
        const auto los = r.get<std::uint8_t>("los flag");
        if (los > 1) r.fail("los flag must be 0 or 1");
        src.los = los == 1;
        const auto n_paths = r.get<std::uint32_t>("path count");
        if (n_paths == 0) r.fail("source '" + src.source_id + "' has no paths");
        const auto f_ch = r.get<double>("update rate");
        const auto snapshots = r.get<std::uint64_t>("snapshot count");
        check_rate(set, n == 0, f_ch, snapshots, fail);
        if (set.find_if_present(src.source_id)) r.fail("duplicate source '" + src.source_id + "'");
        for (std::uint32_t k = 0; k < n_paths; ++k) {
            PathSeries path;
            path.coefficients.resize(snapshots);
            path.delays_s.resize(snapshots);
            for (std::uint64_t t = 0; t < snapshots; ++t) {
                const auto index = r.get<double>("snapshot record");
                const auto re = r.get<double>("snapshot record");
                const auto im = r.get<double>("snapshot record");
                const auto delay = r.get<double>("snapshot record");
                if (index != static_cast<double>(t)) {
                    r.fail("source '" + src.source_id + "' path " + std::to_string(k) +
                           ": record out of order at snapshot " + std::to_string(t));
                }
                check_record(re, im, delay, fail);
                path.coefficients[t] = Complex(re, im);
                path.delays_s[t] = delay;
            }
            src.paths.push_back(std::move(path));
        }
        set.sources.push_back(std::move(src));
    }
    if (!r.at_end()) r.fail("trailing data after last source");
    try {
        set.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
    return set;
}

namespace {
bool is_binary_path(const std::filesystem::path& path) { return path.extension() == ".bin"; }
}  // namespace

void store_channel(const ChannelSet& set, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    if (is_binary_path(path)) {
        write_channel_binary(set, out);
    } else {
        write_channel_text(set, out);
    }
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

ChannelSet load_channel(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open channel file '" + path.string() + "'");
    return is_binary_path(path) ? read_channel_binary(in) : read_channel_text(in);
}

}  // namespace synthrf::channel
