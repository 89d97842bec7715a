#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ftu/augment/pipeline.hpp"
#include "ftu/color.hpp"
#include "ftu/core/errors.hpp"
#include "ftu/core/meta.hpp"
#include "ftu/post.hpp"
#include "ftu/scale.hpp"

namespace ftu::pipeline {

struct MemberConfig {
    std::string id;
    std::string predictor;  // reference predictor spec, or empty
    std::string command;    // external predictor command, or empty
    double weight = 1.0;
};

struct ColorConfig {
    std::string reference_dir;
    double match_probability = 0.5;
    ColorJitterParams jitter;
};

struct AugmentConfig {
    augment::TilePipelineConfig tiles;
    double pseudo_fraction = 0.3;
    std::vector<std::string> exclusions;
};

struct InferenceConfig {
    std::size_t window = 1024;
    double overlap = 0.75;
    bool tta = true;
    std::size_t batch = 4;
    std::vector<MemberConfig> members;
};

struct IoConfig {
    bool write_probmaps = true;
    bool write_png = true;
};

struct PipelineConfig {
    std::uint64_t seed = 0;
    OrganScaleConfig scale = OrganScaleConfig::defaults();
    OrganPostConfig post = OrganPostConfig::defaults();
    ColorConfig color;
    AugmentConfig augment;
    InferenceConfig inference;
    IoConfig io;
};

namespace detail {

using nlohmann::json;

/// Rejects keys outside `allowed` so typos never pass silently.
inline void check_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) throw ConfigError(std::string(where) + ": expected an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
    }
}

inline double number(const json& obj, std::string_view where, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(std::string(where) + "." + key + ": expected a number");
    return v.get<double>();
}

inline double positive(const json& obj, std::string_view where, const char* key, double fallback) {
    const double v = number(obj, where, key, fallback);
    if (!(v > 0.0)) throw ConfigError(std::string(where) + "." + key + ": must be > 0");
    return v;
}

inline double probability(const json& obj, std::string_view where, const char* key, double fallback) {
    const double v = number(obj, where, key, fallback);
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(where) + "." + key + ": must lie in [0,1]");
    return v;
}

inline std::uint64_t unsigned_int(const json& obj, std::string_view where, const char* key, std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw ConfigError(std::string(where) + "." + key + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

inline bool boolean(const json& obj, std::string_view where, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) throw ConfigError(std::string(where) + "." + key + ": expected a boolean");
    return obj.at(key).get<bool>();
}

inline std::string string(const json& obj, std::string_view where, const char* key, std::string fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_string()) throw ConfigError(std::string(where) + "." + key + ": expected a string");
    return obj.at(key).get<std::string>();
}

inline Range range(const json& obj, std::string_view where, const char* key, Range fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw ConfigError(std::string(where) + "." + key + ": expected [lo, hi]");
    }
    Range r{v[0].get<double>(), v[1].get<double>()};
    if (r.lo > r.hi) throw ConfigError(std::string(where) + "." + key + ": lo > hi");
    return r;
}

inline void parse_organs(const json& j, PipelineConfig& cfg) {
    if (!j.is_object()) throw ConfigError("organs: expected an object");
    for (const auto& [name, entry] : j.items()) {
        const auto organ = try_parse_organ(name);
        if (!organ || name != to_string(*organ)) throw ConfigError("organs: unknown organ '" + name + "'");
        const std::string where = "organs." + name;
        check_keys(entry, where,
                   {"hpa_pixel_size", "hubmap_pixel_size", "n", "m", "min_region_ratio", "threshold", "connectivity"});
        OrganScale& s = cfg.scale.organs[*organ];
        s.hpa_pixel_size = positive(entry, where, "hpa_pixel_size", s.hpa_pixel_size);
        s.hubmap_pixel_size = positive(entry, where, "hubmap_pixel_size", s.hubmap_pixel_size);
        s.n = positive(entry, where, "n", s.n);
        s.m = positive(entry, where, "m", s.m);
        OrganPost& p = cfg.post.organs[*organ];
        p.min_region_ratio = number(entry, where, "min_region_ratio", p.min_region_ratio);
        if (p.min_region_ratio < 0.0) throw ConfigError(where + ".min_region_ratio: must be >= 0");
        p.threshold = probability(entry, where, "threshold", p.threshold);
        const auto conn = unsigned_int(entry, where, "connectivity", static_cast<std::uint64_t>(p.connectivity));
        if (conn != 4 && conn != 8) throw ConfigError(where + ".connectivity: must be 4 or 8");
        p.connectivity = conn == 4 ? Connectivity::four : Connectivity::eight;
    }
}

inline void parse_color(const json& j, PipelineConfig& cfg) {
    check_keys(j, "color", {"reference_dir", "match_probability", "jitter"});
    cfg.color.reference_dir = string(j, "color", "reference_dir", cfg.color.reference_dir);
    cfg.color.match_probability = probability(j, "color", "match_probability", cfg.color.match_probability);
    if (j.contains("jitter")) {
        const json& jj = j.at("jitter");
        check_keys(jj, "color.jitter",
                   {"hue_shift_degrees", "saturation", "value", "contrast", "gamma", "apply_probability"});
        ColorJitterParams& p = cfg.color.jitter;
        p.hue_shift_degrees = number(jj, "color.jitter", "hue_shift_degrees", p.hue_shift_degrees);
        p.saturation = range(jj, "color.jitter", "saturation", p.saturation);
        p.value = range(jj, "color.jitter", "value", p.value);
        p.contrast = range(jj, "color.jitter", "contrast", p.contrast);
        p.gamma = range(jj, "color.jitter", "gamma", p.gamma);
        p.apply_probability = probability(jj, "color.jitter", "apply_probability", p.apply_probability);
    }
    cfg.color.jitter.validate();
}

inline void parse_augment(const json& j, PipelineConfig& cfg) {
    check_keys(j, "augment",
               {"tile_size", "p_nonempty", "cutmix_probability", "pseudo_fraction", "exclusions", "affine", "elastic"});
    auto& t = cfg.augment.tiles;
    t.tile_size = unsigned_int(j, "augment", "tile_size", t.tile_size);
    if (t.tile_size == 0) throw ConfigError("augment.tile_size: must be > 0");
    t.p_nonempty = probability(j, "augment", "p_nonempty", t.p_nonempty);
    t.cutmix_probability = probability(j, "augment", "cutmix_probability", t.cutmix_probability);
    cfg.augment.pseudo_fraction = probability(j, "augment", "pseudo_fraction", cfg.augment.pseudo_fraction);
    if (j.contains("exclusions")) {
        const json& ex = j.at("exclusions");
        if (!ex.is_array()) throw ConfigError("augment.exclusions: expected an array of ids");
        for (const json& id : ex) {
            if (!id.is_string()) throw ConfigError("augment.exclusions: ids must be strings");
            cfg.augment.exclusions.push_back(id.get<std::string>());
        }
    }
    if (j.contains("affine")) {
        const json& a = j.at("affine");
        check_keys(a, "augment.affine", {"scale", "shift", "rotate_degrees", "probability"});
        t.affine.scale = range(a, "augment.affine", "scale", t.affine.scale);
        t.affine.shift = range(a, "augment.affine", "shift", t.affine.shift);
        t.affine.rotate_degrees = range(a, "augment.affine", "rotate_degrees", t.affine.rotate_degrees);
        t.affine_probability = probability(a, "augment.affine", "probability", t.affine_probability);
        if (!(t.affine.scale.lo > 0.0) || !t.affine.scale.contains(1.0) || !t.affine.shift.contains(0.0) ||
            !t.affine.rotate_degrees.contains(0.0)) {
            throw ConfigError("augment.affine: ranges must contain the identity");
        }
    }
    if (j.contains("elastic")) {
        const json& e = j.at("elastic");
        check_keys(e, "augment.elastic", {"alpha", "sigma", "probability"});
        t.elastic_alpha = number(e, "augment.elastic", "alpha", t.elastic_alpha);
        if (t.elastic_alpha < 0.0) throw ConfigError("augment.elastic.alpha: must be >= 0");
        t.elastic_sigma = positive(e, "augment.elastic", "sigma", t.elastic_sigma);
        t.elastic_probability = probability(e, "augment.elastic", "probability", t.elastic_probability);
    }
}

inline void parse_inference(const json& j, PipelineConfig& cfg) {
    check_keys(j, "inference", {"window", "overlap", "tta", "batch", "members"});
    InferenceConfig& inf = cfg.inference;
    inf.window = unsigned_int(j, "inference", "window", inf.window);
    inf.overlap = number(j, "inference", "overlap", inf.overlap);
    if (!(inf.overlap >= 0.0 && inf.overlap < 1.0)) throw ConfigError("inference.overlap: must lie in [0,1)");
    inf.tta = boolean(j, "inference", "tta", inf.tta);
    inf.batch = unsigned_int(j, "inference", "batch", inf.batch);
    if (inf.batch == 0) throw ConfigError("inference.batch: must be > 0");
    if (j.contains("members")) {
        const json& ms = j.at("members");
        if (!ms.is_array()) throw ConfigError("inference.members: expected an array");
        std::set<std::string> seen;
        inf.members.clear();
        for (std::size_t i = 0; i < ms.size(); ++i) {
            const std::string where = "inference.members[" + std::to_string(i) + "]";
            check_keys(ms[i], where, {"id", "predictor", "command", "weight"});
            MemberConfig m;
            m.id = string(ms[i], where, "id", "member" + std::to_string(i));
            m.predictor = string(ms[i], where, "predictor", "");
            m.command = string(ms[i], where, "command", "");
            m.weight = number(ms[i], where, "weight", 1.0);
            if (m.predictor.empty() == m.command.empty()) {
                throw ConfigError(where + ": exactly one of 'predictor' or 'command' is required");
            }
            if (m.weight < 0.0) throw ConfigError(where + ".weight: must be >= 0");
            if (!seen.insert(m.id).second) throw ConfigError(where + ": duplicate id '" + m.id + "'");
            inf.members.push_back(std::move(m));
        }
    }
}

} // namespace detail

inline PipelineConfig parse_config(const nlohmann::json& j) {
    using namespace detail;
    check_keys(j, "config", {"seed", "organs", "color", "augment", "inference", "io"});
    PipelineConfig cfg;
    cfg.seed = unsigned_int(j, "config", "seed", cfg.seed);
    if (j.contains("organs")) parse_organs(j.at("organs"), cfg);
    if (j.contains("color")) parse_color(j.at("color"), cfg);
    if (j.contains("augment")) parse_augment(j.at("augment"), cfg);
    if (j.contains("inference")) parse_inference(j.at("inference"), cfg);
    if (j.contains("io")) {
        const json& io = j.at("io");
        check_keys(io, "io", {"write_probmaps", "write_png"});
        cfg.io.write_probmaps = boolean(io, "io", "write_probmaps", cfg.io.write_probmaps);
        cfg.io.write_png = boolean(io, "io", "write_png", cfg.io.write_png);
    }
    return cfg;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

} // namespace ftu::pipeline
