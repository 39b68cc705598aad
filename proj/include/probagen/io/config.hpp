#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

namespace probagen::io {

/// Reads a `.toml` or `.json` file into a JSON value. TOML tables become
/// objects, arrays become arrays, dates/times become strings.
nlohmann::json load_config_file(const std::filesystem::path& path);

}  // namespace probagen::io
