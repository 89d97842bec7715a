#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "ftu/core/binary.hpp"
#include "ftu/core/raster.hpp"

namespace ftu {

// "PMAP" | width u32 | height u32 | width*height float32, all little-endian.

inline std::string encode_probmap(const ProbMap& map) {
    std::string out;
    out.reserve(12 + map.pixel_count() * 4);
    binary::put_magic(out, "PMAP");
    binary::put_u32(out, static_cast<std::uint32_t>(map.width()));
    binary::put_u32(out, static_cast<std::uint32_t>(map.height()));
    for (float v : map.data()) binary::put_f32(out, v);
    return out;
}

inline ProbMap decode_probmap(std::string_view bytes) {
    binary::Reader in(bytes, "probmap");
    in.expect_magic("PMAP");
    const std::uint32_t w = in.u32();
    const std::uint32_t h = in.u32();
    if (w == 0 || h == 0) throw FormatError("probmap: zero dimension");
    const std::uint64_t n = static_cast<std::uint64_t>(w) * h;
    if (in.remaining() < n * 4) throw FormatError("probmap: truncated payload");
    std::vector<float> data(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const float v = in.f32();
        if (!(v >= 0.0f && v <= 1.0f)) {
            throw FormatError("probmap: value outside [0,1] at index " + std::to_string(i));
        }
        data[i] = v;
    }
    if (in.remaining() != 0) throw FormatError("probmap: trailing bytes after payload");
    return ProbMap(w, h, 1, std::move(data));
}

inline void write_probmap(const ProbMap& map, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    const std::string bytes = encode_probmap(map);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed: " + path.string());
}

inline ProbMap read_probmap(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return decode_probmap(binary::read_all(in));
}

} // namespace ftu
