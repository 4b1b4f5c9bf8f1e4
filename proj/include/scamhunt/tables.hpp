#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace scamhunt::tables {

/// Data files compiled into the library (emoji.tsv, slang.tsv,
/// public_suffix.dat, assets.tsv).
std::optional<std::string_view> embedded(std::string_view name);

/// Reads `override_path` when set, otherwise the embedded copy of `name`.
std::string load(std::string_view name, const std::optional<std::filesystem::path>& override_path = {});

}  // namespace scamhunt::tables
