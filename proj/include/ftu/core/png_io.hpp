#pragma once

#include <png.h>

#include <filesystem>
#include <string>
#include <vector>

#include "ftu/core/errors.hpp"
#include "ftu/core/raster.hpp"

namespace ftu {

namespace detail {

struct PngImage {
    png_image image{};
    PngImage() {
        image.version = PNG_IMAGE_VERSION;
    }
    ~PngImage() { png_image_free(&image); }
    PngImage(const PngImage&) = delete;
    PngImage& operator=(const PngImage&) = delete;
};

inline void write_png_raw(const std::filesystem::path& path, std::size_t w, std::size_t h,
                          std::size_t channels, const std::uint8_t* data) {
    PngImage png;
    png.image.width = static_cast<png_uint_32>(w);
    png.image.height = static_cast<png_uint_32>(h);
    png.image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&png.image, path.c_str(), 0, data, 0, nullptr)) {
        throw DataError("png write " + path.string() + ": " + png.image.message);
    }
}

} // namespace detail

/// Loads a PNG as 1-channel gray (if the file is grayscale) or 3-channel RGB.
/// Alpha is composited away by libpng; 16-bit samples are reduced to 8.
inline ByteImage read_png(const std::filesystem::path& path) {
    detail::PngImage png;
    if (!png_image_begin_read_from_file(&png.image, path.c_str())) {
        throw DataError("png read " + path.string() + ": " + png.image.message);
    }
    const bool color = (png.image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    png.image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const std::size_t channels = color ? 3 : 1;
    std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(png.image));
    if (!png_image_finish_read(&png.image, nullptr, data.data(), 0, nullptr)) {
        throw DataError("png decode " + path.string() + ": " + png.image.message);
    }
    return ByteImage(png.image.width, png.image.height, channels, std::move(data));
}

inline void write_png(const ByteImage& image, const std::filesystem::path& path) {
    detail::write_png_raw(path, image.width(), image.height(), image.channels(), image.data().data());
}

/// Masks are stored as 8-bit gray {0, 255}.
inline void write_mask_png(const BinaryMask& mask, const std::filesystem::path& path) {
    std::vector<std::uint8_t> gray(mask.pixel_count());
    for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = mask.data()[i] ? 255 : 0;
    detail::write_png_raw(path, mask.width(), mask.height(), 1, gray.data());
}

/// Any non-zero gray level (after RGB-to-gray if needed) counts as foreground.
inline BinaryMask read_mask_png(const std::filesystem::path& path) {
    const ByteImage img = read_png(path);
    std::vector<std::uint8_t> bits(img.pixel_count());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        bool on = false;
        for (std::size_t c = 0; c < img.channels(); ++c) on = on || img.data()[i * img.channels() + c] != 0;
        bits[i] = on ? 1 : 0;
    }
    return BinaryMask(img.width(), img.height(), 1, std::move(bits));
}

} // namespace ftu
