#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ftu/augment/dataset.hpp"
#include "ftu/core/png_io.hpp"
#include "ftu/core/rle.hpp"
#include "ftu/pipeline/csv.hpp"

namespace ftu::pipeline {

inline std::size_t parse_size(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw DataError(what + ": expected an unsigned integer, got '" + s + "'");
    }
}

inline double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError(what + ": expected a number, got '" + s + "'");
    }
}

/// Rows of `id,source,organ,pixel_size,width,height,image_path,mask`. Extra
/// columns are ignored; relative paths resolve against the manifest's folder.
struct Manifest {
    std::filesystem::path base_dir;
    std::vector<augment::SampleEntry> entries;

    std::filesystem::path resolve(const std::string& p) const {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    }
};

inline Manifest manifest_from_table(const CsvTable& t, const std::filesystem::path& base_dir,
                                    const std::string& what) {
    t.require({"id", "source", "organ", "pixel_size", "width", "height", "image_path", "mask"}, what);
    Manifest m;
    m.base_dir = base_dir;
    const auto col = [&](std::string_view n) { return static_cast<std::size_t>(t.column(n)); };
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string where = what + " row " + std::to_string(r + 1);
        augment::SampleEntry e;
        e.meta.id = row[col("id")];
        if (e.meta.id.empty()) throw DataError(where + ": empty id");
        e.meta.source = parse_source(row[col("source")]);
        e.meta.organ = parse_organ(row[col("organ")]);
        e.meta.pixel_size = parse_double(row[col("pixel_size")], where + " pixel_size");
        if (!(e.meta.pixel_size > 0.0)) throw DataError(where + ": pixel_size must be > 0");
        e.meta.width = parse_size(row[col("width")], where + " width");
        e.meta.height = parse_size(row[col("height")], where + " height");
        e.image_path = row[col("image_path")];
        e.mask = row[col("mask")];
        m.entries.push_back(std::move(e));
    }
    return m;
}

inline Manifest read_manifest(const std::filesystem::path& path) {
    return manifest_from_table(read_csv(path), path.parent_path(), path.string());
}

/// A mask field is a path when it names a .png file, otherwise inline RLE.
inline bool is_mask_path(const std::string& field) {
    return field.size() > 4 && field.compare(field.size() - 4, 4, ".png") == 0;
}

inline BinaryMask load_mask(const Manifest& m, const augment::SampleEntry& e) {
    if (is_mask_path(e.mask)) {
        BinaryMask mask = read_mask_png(m.resolve(e.mask));
        if (e.meta.width && e.meta.height && !mask.same_shape(e.meta.width, e.meta.height)) {
            throw DataError("sample " + e.meta.id + ": mask dims disagree with manifest");
        }
        return mask;
    }
    if (e.meta.width == 0 || e.meta.height == 0) {
        throw DataError("sample " + e.meta.id + ": inline RLE needs width and height");
    }
    try {
        return rle_decode(rle_from_text(e.mask), e.meta.width, e.meta.height);
    } catch (const FormatError& err) {
        throw FormatError("sample " + e.meta.id + ": " + err.what());
    }
}

inline ByteImage load_image(const Manifest& m, const augment::SampleEntry& e) {
    ByteImage img = read_png(m.resolve(e.image_path));
    if (e.meta.width && e.meta.height && !img.same_shape(e.meta.width, e.meta.height)) {
        throw DataError("sample " + e.meta.id + ": image is " + std::to_string(img.width()) + "x" +
                        std::to_string(img.height()) + ", manifest says " + std::to_string(e.meta.width) + "x" +
                        std::to_string(e.meta.height));
    }
    return img;
}

} // namespace ftu::pipeline
