#pragma once

#include "test_support.hpp"

#include "scamhunt/pipeline.hpp"

#include <map>

namespace testing {

inline const std::map<std::string, std::string>& demo_pairs() {
    static const auto pairs = scamhunt::pipeline::parse_key_values(slurp(source_dir() / "demo" / "scamhunt.toml"));
    return pairs;
}

/// The shipped demo config with its output redirected to `out`.
inline scamhunt::pipeline::PipelineConfig demo_config(const std::filesystem::path& out,
                                                      std::map<std::string, std::string> overrides = {}) {
    auto pairs = demo_pairs();
    pairs["out"] = out.string();
    for (auto& [k, v] : overrides) pairs[k] = v;
    return scamhunt::pipeline::PipelineConfig::from_pairs(pairs, source_dir() / "demo");
}

/// Relative path -> bytes for every file under `dir`.
inline std::map<std::string, std::string> snapshot(const std::filesystem::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) files[std::filesystem::relative(e.path(), dir).generic_string()] = slurp(e.path());
    }
    return files;
}

inline scamhunt::pipeline::TransportFactory forbid_network() {
    return []() -> std::unique_ptr<scamhunt::net::HttpTransport> {
        throw scamhunt::Error("network transport requested");
    };
}

}  // namespace testing
