#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "ftu/core/binary.hpp"
#include "ftu/core/errors.hpp"

namespace ftu::infer {

/// One checkpoint: named flat float arrays in file order.
struct ParameterSet {
    std::vector<std::pair<std::string, std::vector<float>>> entries;

    const std::vector<float>* find(std::string_view name) const {
        for (const auto& [n, v] : entries)
            if (n == name) return &v;
        return nullptr;
    }
    friend bool operator==(const ParameterSet&, const ParameterSet&) = default;
};

/// Elementwise arithmetic mean (accumulated in double) of checkpoints that
/// share names and lengths. Entry order follows the first checkpoint.
inline ParameterSet average_parameters(std::span<const ParameterSet> checkpoints) {
    if (checkpoints.empty()) throw ContractError("average_parameters: no checkpoints");
    const ParameterSet& first = checkpoints[0];
    for (std::size_t c = 1; c < checkpoints.size(); ++c) {
        const ParameterSet& other = checkpoints[c];
        if (other.entries.size() != first.entries.size()) {
            throw ContractError("checkpoint " + std::to_string(c) + ": entry count differs");
        }
        for (const auto& [name, values] : first.entries) {
            const auto* v = other.find(name);
            if (v == nullptr) throw ContractError("checkpoint " + std::to_string(c) + ": missing '" + name + "'");
            if (v->size() != values.size()) {
                throw ContractError("checkpoint " + std::to_string(c) + ": '" + name + "' has length " +
                                    std::to_string(v->size()) + ", expected " + std::to_string(values.size()));
            }
        }
    }
    const double k = static_cast<double>(checkpoints.size());
    ParameterSet out;
    for (const auto& [name, values] : first.entries) {
        std::vector<double> acc(values.begin(), values.end());
        for (std::size_t c = 1; c < checkpoints.size(); ++c) {
            const auto& v = *checkpoints[c].find(name);
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
        }
        std::vector<float> mean(acc.size());
        for (std::size_t i = 0; i < acc.size(); ++i) mean[i] = static_cast<float>(acc[i] / k);
        out.entries.emplace_back(name, std::move(mean));
    }
    return out;
}

// "PSET" | entry count u32 | { name length u16 | UTF-8 name | array length u32 | float32 values }

inline std::string encode_parameter_set(const ParameterSet& ps) {
    std::string out;
    binary::put_magic(out, "PSET");
    binary::put_u32(out, static_cast<std::uint32_t>(ps.entries.size()));
    for (const auto& [name, values] : ps.entries) {
        if (name.size() > 0xffff) throw ContractError("parameter name longer than 65535 bytes");
        binary::put_u16(out, static_cast<std::uint16_t>(name.size()));
        out.append(name);
        binary::put_u32(out, static_cast<std::uint32_t>(values.size()));
        for (float v : values) binary::put_f32(out, v);
    }
    return out;
}

inline ParameterSet decode_parameter_set(std::string_view bytes) {
    binary::Reader in(bytes, "parameter set");
    in.expect_magic("PSET");
    const std::uint32_t n = in.u32();
    ParameterSet ps;
    for (std::uint32_t e = 0; e < n; ++e) {
        const std::uint16_t len = in.u16();
        std::string name(in.take(len));
        const std::uint32_t count = in.u32();
        if (in.remaining() < static_cast<std::size_t>(count) * 4) {
            throw FormatError("parameter set: truncated array '" + name + "'");
        }
        std::vector<float> values(count);
        for (auto& v : values) v = in.f32();
        ps.entries.emplace_back(std::move(name), std::move(values));
    }
    if (in.remaining() != 0) throw FormatError("parameter set: trailing bytes");
    return ps;
}

inline ParameterSet read_parameter_set(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return decode_parameter_set(binary::read_all(in));
}

inline void write_parameter_set(const ParameterSet& ps, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    const std::string bytes = encode_parameter_set(ps);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

} // namespace ftu::infer
