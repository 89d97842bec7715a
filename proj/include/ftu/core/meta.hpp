#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "ftu/core/errors.hpp"

namespace ftu {

enum class Organ { kidney, large_intestine, lung, prostate, spleen };
enum class Source { HPA, HuBMAP, GTEX };
enum class Sex { female, male };

inline constexpr std::array<Organ, 5> kAllOrgans = {Organ::kidney, Organ::large_intestine,
                                                    Organ::lung, Organ::prostate, Organ::spleen};

inline std::string_view to_string(Organ o) {
    switch (o) {
        case Organ::kidney: return "kidney";
        case Organ::large_intestine: return "large_intestine";
        case Organ::lung: return "lung";
        case Organ::prostate: return "prostate";
        case Organ::spleen: return "spleen";
    }
    return "?";
}

inline std::string_view to_string(Source s) {
    switch (s) {
        case Source::HPA: return "HPA";
        case Source::HuBMAP: return "HuBMAP";
        case Source::GTEX: return "GTEX";
    }
    return "?";
}

namespace detail {
inline std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}
} // namespace detail

inline std::optional<Organ> try_parse_organ(std::string_view text) {
    const std::string s = detail::lower(text);
    if (s == "kidney") return Organ::kidney;
    if (s == "large_intestine" || s == "largeintestine" || s == "large intestine") return Organ::large_intestine;
    if (s == "lung") return Organ::lung;
    if (s == "prostate") return Organ::prostate;
    if (s == "spleen") return Organ::spleen;
    return std::nullopt;
}

inline Organ parse_organ(std::string_view text) {
    if (auto o = try_parse_organ(text)) return *o;
    throw DataError("unknown organ '" + std::string(text) + "'");
}

inline Source parse_source(std::string_view text) {
    const std::string s = detail::lower(text);
    if (s == "hpa") return Source::HPA;
    if (s == "hubmap") return Source::HuBMAP;
    if (s == "gtex") return Source::GTEX;
    throw DataError("unknown source '" + std::string(text) + "'");
}

/// Per-slide metadata record.
struct SampleMeta {
    std::string id;
    Source source = Source::HPA;
    Organ organ = Organ::kidney;
    double pixel_size = 0.4;  // µm per pixel
    std::optional<double> thickness;  // µm
    std::size_t width = 0;
    std::size_t height = 0;
    std::optional<double> age;
    std::optional<Sex> sex;
};

} // namespace ftu
