#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ftu/core/errors.hpp"

namespace ftu {

struct ImageTag {
    static constexpr const char* name = "ByteImage";
    static bool channels_ok(std::size_t c) { return c == 1 || c == 3; }
    template <typename T>
    static bool value_ok(T) { return true; }
};

struct ProbTag {
    static constexpr const char* name = "ProbMap";
    static bool channels_ok(std::size_t c) { return c == 1; }
    template <typename T>
    static bool value_ok(T v) { return v >= T(0) && v <= T(1); }
};

struct MaskTag {
    static constexpr const char* name = "BinaryMask";
    static bool channels_ok(std::size_t c) { return c == 1; }
    template <typename T>
    static bool value_ok(T v) { return v == T(0) || v == T(1); }
};

/// Row-major, channel-interleaved 2-D raster. The tag fixes the allowed
/// channel counts and value domain; construction from a buffer validates both.
template <typename T, typename Tag>
class Raster {
public:
    using value_type = T;
    using tag_type = Tag;

    Raster() = default;

    Raster(std::size_t width, std::size_t height, std::size_t channels = 1, T fill = T{})
        : width_(width), height_(height), channels_(channels) {
        check_shape();
        if (!Tag::value_ok(fill)) {
            throw ContractError(std::string(Tag::name) + ": fill value outside domain");
        }
        data_.assign(width * height * channels, fill);
    }

    Raster(std::size_t width, std::size_t height, std::size_t channels, std::vector<T> data)
        : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
        check_shape();
        if (data_.size() != width_ * height_ * channels_) {
            throw ContractError(std::string(Tag::name) + ": buffer length " +
                                std::to_string(data_.size()) + " != " +
                                std::to_string(width_ * height_ * channels_));
        }
        for (std::size_t i = 0; i < data_.size(); ++i) {
            if (!Tag::value_ok(data_[i])) {
                throw ContractError(std::string(Tag::name) + ": value out of domain at index " +
                                    std::to_string(i));
            }
        }
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t channels() const noexcept { return channels_; }
    std::size_t pixel_count() const noexcept { return width_ * height_; }
    bool empty() const noexcept { return data_.empty(); }

    std::span<const T> data() const noexcept { return data_; }
    std::span<T> data() noexcept { return data_; }
    const std::vector<T>& buffer() const noexcept { return data_; }

    T operator()(std::size_t x, std::size_t y, std::size_t c = 0) const noexcept {
        return data_[(y * width_ + x) * channels_ + c];
    }
    T& operator()(std::size_t x, std::size_t y, std::size_t c = 0) noexcept {
        return data_[(y * width_ + x) * channels_ + c];
    }

    bool same_shape(std::size_t w, std::size_t h) const noexcept {
        return width_ == w && height_ == h;
    }
    template <typename U, typename G>
    bool same_shape(const Raster<U, G>& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    void check_shape() const {
        if (width_ == 0 || height_ == 0) {
            throw ContractError(std::string(Tag::name) + ": width and height must be >= 1");
        }
        if (!Tag::channels_ok(channels_)) {
            throw ContractError(std::string(Tag::name) + ": unsupported channel count " +
                                std::to_string(channels_));
        }
    }

    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::size_t channels_ = 0;
    std::vector<T> data_;
};

using ByteImage = Raster<std::uint8_t, ImageTag>;
using ProbMap = Raster<float, ProbTag>;
using BinaryMask = Raster<std::uint8_t, MaskTag>;

template <typename R>
R rebuild_like(const R& shape, std::vector<typename R::value_type> data) {
    return R(shape.width(), shape.height(), shape.channels(), std::move(data));
}

inline std::size_t foreground_count(const BinaryMask& mask) {
    return static_cast<std::size_t>(std::count(mask.data().begin(), mask.data().end(), 1));
}

} // namespace ftu
