#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ftu/core/errors.hpp"

namespace ftu::binary {

// Little-endian encoders independent of host byte order.

inline void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

inline void put_magic(std::string& out, std::string_view magic) { out.append(magic); }

/// Cursor over an in-memory buffer; every read is bounds-checked and throws
/// FormatError naming `what` on truncation.
class Reader {
public:
    Reader(std::string_view bytes, std::string what) : bytes_(bytes), what_(std::move(what)) {}

    std::string_view take(std::size_t n) {
        if (bytes_.size() - pos_ < n) {
            throw FormatError(what_ + ": truncated payload (need " + std::to_string(n) +
                              " bytes at offset " + std::to_string(pos_) + ")");
        }
        std::string_view s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    void expect_magic(std::string_view magic) {
        const std::string_view got = take(magic.size());
        if (got != magic) {
            throw FormatError(what_ + ": bad magic '" + std::string(got) + "', expected '" +
                              std::string(magic) + "'");
        }
    }

    std::uint16_t u16() {
        const auto s = take(2);
        return static_cast<std::uint16_t>(static_cast<unsigned char>(s[0]) |
                                          (static_cast<unsigned char>(s[1]) << 8));
    }

    std::uint32_t u32() {
        const auto s = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[i])) << (8 * i);
        return v;
    }

    float f32() { return std::bit_cast<float>(u32()); }

    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
    std::size_t offset() const noexcept { return pos_; }

private:
    std::string_view bytes_;
    std::string what_;
    std::size_t pos_ = 0;
};

inline std::string read_all(std::istream& in) {
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// Reads exactly n bytes or throws.
inline std::string read_exact(std::istream& in, std::size_t n, const std::string& what) {
    std::string buf(n, '\0');
    in.read(buf.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw FormatError(what + ": truncated stream");
    }
    return buf;
}

} // namespace ftu::binary
