#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ftu/core/errors.hpp"
#include "ftu/core/raster.hpp"

namespace ftu {

/// One run in the column-major, 1-indexed flattening
/// (flat index = column * height + row + 1).
struct Run {
    std::uint64_t start = 0;
    std::uint64_t length = 0;
    friend bool operator==(const Run&, const Run&) = default;
};

struct Rle {
    std::vector<Run> runs;
    friend bool operator==(const Rle&, const Rle&) = default;
};

/// Maximal runs of foreground pixels in column-major order.
inline Rle rle_encode(const BinaryMask& mask) {
    Rle out;
    const std::size_t w = mask.width();
    const std::size_t h = mask.height();
    std::uint64_t flat = 0;
    bool in_run = false;
    for (std::size_t x = 0; x < w; ++x) {
        for (std::size_t y = 0; y < h; ++y, ++flat) {
            if (mask(x, y) != 0) {
                if (in_run) {
                    ++out.runs.back().length;
                } else {
                    out.runs.push_back({flat + 1, 1});
                    in_run = true;
                }
            } else {
                in_run = false;
            }
        }
    }
    return out;
}

inline BinaryMask rle_decode(const Rle& rle, std::size_t width, std::size_t height) {
    BinaryMask mask(width, height);
    const std::uint64_t total = static_cast<std::uint64_t>(width) * height;
    std::uint64_t previous_end = 0;  // one past the last covered 1-indexed position
    for (std::size_t i = 0; i < rle.runs.size(); ++i) {
        const Run& r = rle.runs[i];
        if (r.start < 1 || r.length < 1 || r.start + r.length - 1 > total) {
            throw FormatError("rle run " + std::to_string(i) + " (" + std::to_string(r.start) +
                              " " + std::to_string(r.length) + ") outside mask of " +
                              std::to_string(total) + " pixels");
        }
        if (r.start < previous_end) {
            throw FormatError("rle run " + std::to_string(i) + " overlaps or precedes run " +
                              std::to_string(i - 1));
        }
        for (std::uint64_t p = r.start - 1; p < r.start - 1 + r.length; ++p) {
            const std::size_t x = static_cast<std::size_t>(p / height);
            const std::size_t y = static_cast<std::size_t>(p % height);
            mask(x, y) = 1;
        }
        previous_end = r.start + r.length;
    }
    return mask;
}

/// "start length start length ..." (empty string for an empty mask).
inline std::string rle_to_text(const Rle& rle) {
    std::string s;
    for (const Run& r : rle.runs) {
        if (!s.empty()) s += ' ';
        s += std::to_string(r.start);
        s += ' ';
        s += std::to_string(r.length);
    }
    return s;
}

inline Rle rle_from_text(std::string_view text) {
    std::vector<std::uint64_t> numbers;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r')) ++i;
        if (i >= text.size()) break;
        std::uint64_t value = 0;
        const auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), value);
        if (ec != std::errc{} || ptr == text.data() + i) {
            throw FormatError("rle text: invalid number at offset " + std::to_string(i));
        }
        numbers.push_back(value);
        i = static_cast<std::size_t>(ptr - text.data());
    }
    if (numbers.size() % 2 != 0) {
        throw FormatError("rle text: odd number of values");
    }
    Rle rle;
    for (std::size_t k = 0; k < numbers.size(); k += 2) {
        rle.runs.push_back({numbers[k], numbers[k + 1]});
    }
    return rle;
}

/// Submission line `<id>,<runs>`.
inline std::string rle_line(std::string_view id, const Rle& rle) {
    std::string line(id);
    line += ',';
    line += rle_to_text(rle);
    return line;
}

} // namespace ftu
