#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ftu/core/binary.hpp"
#include "ftu/core/errors.hpp"
#include "ftu/core/raster.hpp"

// Wire format of the external predictor subprocess (stdin/stdout, little-endian):
//
//   request   "PRD1" | count u32 | height u32 | width u32 | channels u32 |
//             count*H*W*C float32 in [0,1], row-major, channel-interleaved
//   response  "PRB1" | count u32 | height u32 | width u32 | count*H*W float32
//   error     "ERR1" | length u32 | UTF-8 message
//
// All tiles of one frame share a shape.

namespace ftu::infer::protocol {

inline constexpr std::string_view kRequestMagic = "PRD1";
inline constexpr std::string_view kResponseMagic = "PRB1";
inline constexpr std::string_view kErrorMagic = "ERR1";

struct FrameShape {
    std::uint32_t count = 0;
    std::uint32_t height = 0;
    std::uint32_t width = 0;
    std::uint32_t channels = 0;
};

inline std::string encode_request(std::span<const ByteImage> tiles) {
    if (tiles.empty()) throw ContractError("predictor request needs at least one tile");
    const std::size_t w = tiles[0].width(), h = tiles[0].height(), c = tiles[0].channels();
    std::string out;
    out.reserve(20 + tiles.size() * w * h * c * 4);
    binary::put_magic(out, kRequestMagic);
    binary::put_u32(out, static_cast<std::uint32_t>(tiles.size()));
    binary::put_u32(out, static_cast<std::uint32_t>(h));
    binary::put_u32(out, static_cast<std::uint32_t>(w));
    binary::put_u32(out, static_cast<std::uint32_t>(c));
    for (const ByteImage& t : tiles) {
        if (t.width() != w || t.height() != h || t.channels() != c) {
            throw ContractError("predictor request tiles must share one shape");
        }
        for (std::uint8_t v : t.data()) binary::put_f32(out, static_cast<float>(v) / 255.0f);
    }
    return out;
}

/// Parses the 20-byte request header.
inline FrameShape decode_request_header(std::string_view header) {
    binary::Reader in(header, "predictor request");
    in.expect_magic(kRequestMagic);
    FrameShape s;
    s.count = in.u32();
    s.height = in.u32();
    s.width = in.u32();
    s.channels = in.u32();
    return s;
}

inline std::string encode_response(std::span<const ProbMap> maps) {
    if (maps.empty()) throw ContractError("predictor response needs at least one map");
    const std::size_t w = maps[0].width(), h = maps[0].height();
    std::string out;
    out.reserve(16 + maps.size() * w * h * 4);
    binary::put_magic(out, kResponseMagic);
    binary::put_u32(out, static_cast<std::uint32_t>(maps.size()));
    binary::put_u32(out, static_cast<std::uint32_t>(h));
    binary::put_u32(out, static_cast<std::uint32_t>(w));
    for (const ProbMap& m : maps) {
        if (!m.same_shape(w, h)) throw ContractError("predictor response maps must share one shape");
        for (float v : m.data()) binary::put_f32(out, v);
    }
    return out;
}

inline std::string encode_error(std::string_view message) {
    std::string out;
    binary::put_magic(out, kErrorMagic);
    binary::put_u32(out, static_cast<std::uint32_t>(message.size()));
    out.append(message);
    return out;
}

/// Decodes a response payload (after the magic and header were read) into maps.
inline std::vector<ProbMap> decode_response_body(const FrameShape& s, std::string_view body) {
    binary::Reader in(body, "predictor response");
    std::vector<ProbMap> maps;
    maps.reserve(s.count);
    const std::size_t n = static_cast<std::size_t>(s.width) * s.height;
    for (std::uint32_t t = 0; t < s.count; ++t) {
        std::vector<float> data(n);
        for (std::size_t i = 0; i < n; ++i) {
            const float v = in.f32();
            if (!(v >= 0.0f && v <= 1.0f)) {
                throw PredictorError("predictor response: value outside [0,1] in tile " + std::to_string(t));
            }
            data[i] = v;
        }
        maps.emplace_back(s.width, s.height, 1, std::move(data));
    }
    return maps;
}

} // namespace ftu::infer::protocol
