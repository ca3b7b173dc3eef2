#include "synthrf/iq_file.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

namespace synthrf::io {

static_assert(std::endian::native == std::endian::little, "I/Q files assume a little-endian host");

std::string to_string(SampleFormat f) { return f == SampleFormat::f32 ? "f32" : "i16"; }

SampleFormat parse_sample_format(const std::string& name) {
    if (name == "f32") return SampleFormat::f32;
    if (name == "i16") return SampleFormat::i16;
    throw std::invalid_argument("unknown sample format '" + name + "' (expected f32 or i16)");
}

std::filesystem::path sidecar_path(const std::filesystem::path& iq_path) {
    auto p = iq_path;
    p.replace_extension(".json");
    if (p == iq_path) p += ".meta.json";
    return p;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

void write_iq(const std::filesystem::path& path, const dsp::SignalBuffer& buf, const IqWriteOptions& opts,
              const nlohmann::json& extra) {
    const auto x = buf.samples();
    const std::size_t per_sample = opts.real_only ? 1 : 2;
    double full_scale = opts.full_scale;
    if (opts.format == SampleFormat::i16 && full_scale <= 0.0) {
        for (const auto& v : x) full_scale = std::max({full_scale, std::abs(v.real()), std::abs(v.imag())});
        if (full_scale == 0.0) full_scale = 1.0;
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    constexpr std::size_t kChunk = 1 << 16;
    if (opts.format == SampleFormat::f32) {
        std::vector<float> tmp;
        tmp.reserve(kChunk * per_sample);
        for (std::size_t i = 0; i < x.size(); i += kChunk) {
            tmp.clear();
            for (std::size_t j = i; j < std::min(x.size(), i + kChunk); ++j) {
                tmp.push_back(static_cast<float>(x[j].real()));
                if (!opts.real_only) tmp.push_back(static_cast<float>(x[j].imag()));
            }
            out.write(reinterpret_cast<const char*>(tmp.data()), static_cast<std::streamsize>(tmp.size() * sizeof(float)));
        }
    } else {
        const double scale = 32767.0 / full_scale;
        const auto quantize = [scale](double v) {
            return static_cast<std::int16_t>(std::clamp(std::round(v * scale), -32768.0, 32767.0));
        };
        std::vector<std::int16_t> tmp;
        tmp.reserve(kChunk * per_sample);
        for (std::size_t i = 0; i < x.size(); i += kChunk) {
            tmp.clear();
            for (std::size_t j = i; j < std::min(x.size(), i + kChunk); ++j) {
                tmp.push_back(quantize(x[j].real()));
                if (!opts.real_only) tmp.push_back(quantize(x[j].imag()));
            }
            out.write(reinterpret_cast<const char*>(tmp.data()),
                      static_cast<std::streamsize>(tmp.size() * sizeof(std::int16_t)));
        }
    }
    out.flush();
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");

    nlohmann::json meta = extra;
    meta["format"] = to_string(opts.format);
    if (opts.format == SampleFormat::i16) meta["full_scale"] = full_scale;
    meta["real"] = opts.real_only;
    meta["sample_rate_hz"] = buf.sample_rate_hz();
    meta["if_hz"] = buf.if_offset_hz();
    meta["epoch_s"] = buf.epoch_s();
    meta["sample_count"] = x.size();
    meta["duration_s"] = buf.duration_s();
    write_json_file(sidecar_path(path), meta);
}

IqFile read_iq(const std::filesystem::path& path) {
    const auto side = sidecar_path(path);
    nlohmann::json meta;
    try {
        meta = read_json_file(side);
    } catch (const std::runtime_error&) {
        throw IqFormatError("missing sidecar '" + side.string() + "' for '" + path.string() + "'");
    } catch (const std::invalid_argument& e) {
        throw IqFormatError(e.what());
    }
    const auto need = [&](const char* key) -> const nlohmann::json& {
        if (!meta.contains(key)) throw IqFormatError("sidecar '" + side.string() + "' lacks '" + key + "'");
        return meta.at(key);
    };
    SampleFormat format;
    double fs = 0.0, f_if = 0.0, epoch = 0.0, full_scale = 1.0;
    std::size_t count = 0;
    bool real_only = false;
    try {
        format = parse_sample_format(need("format").get<std::string>());
        fs = need("sample_rate_hz").get<double>();
        f_if = need("if_hz").get<double>();
        count = need("sample_count").get<std::size_t>();
        real_only = meta.value("real", false);
        epoch = meta.value("epoch_s", 0.0);
        if (format == SampleFormat::i16) full_scale = need("full_scale").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw IqFormatError("sidecar '" + side.string() + "': " + e.what());
    } catch (const std::invalid_argument& e) {
        throw IqFormatError(e.what());
    }

    const std::size_t values = count * (real_only ? 1 : 2);
    const std::size_t width = format == SampleFormat::f32 ? sizeof(float) : sizeof(std::int16_t);
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (ec) throw std::runtime_error("cannot open '" + path.string() + "'");
    if (size != values * width) {
        throw IqFormatError("'" + path.string() + "' holds " + std::to_string(size) + " bytes, sidecar implies " +
                            std::to_string(values * width));
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");

    std::vector<dsp::Complex> samples(count);
    const auto load = [&]<typename T>(T, double scale) {
        std::vector<T> raw(values);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(values * sizeof(T)));
        if (!in) throw IqFormatError("short read from '" + path.string() + "'");
        for (std::size_t i = 0; i < count; ++i) {
            if (real_only) {
                samples[i] = dsp::Complex(scale * static_cast<double>(raw[i]), 0.0);
            } else {
                samples[i] = dsp::Complex(scale * static_cast<double>(raw[2 * i]),
                                          scale * static_cast<double>(raw[2 * i + 1]));
            }
        }
    };
    if (format == SampleFormat::f32) {
        load(float{}, 1.0);
    } else {
        load(std::int16_t{}, full_scale / 32767.0);
    }
    return {dsp::SignalBuffer(std::move(samples), fs, f_if, epoch), std::move(meta)};
}

}  // namespace synthrf::io
