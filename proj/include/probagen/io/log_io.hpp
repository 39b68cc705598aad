#pragma once

#include <filesystem>
#include <optional>

#include <nlohmann/json.hpp>

#include "probagen/io/csv.hpp"
#include "probagen/log_model.hpp"

namespace probagen::io {

enum class LogFormat { Xes, Csv, Json };

/// `.xes`, `.xes.gz` -> XES; `.csv`, `.csv.gz` -> CSV; `.json` -> canonical JSON.
LogFormat format_from_path(const std::filesystem::path& path);

/// CSV input needs a mapping; XES ignores it.
EventLog read_log(const std::filesystem::path& path, const std::optional<CsvMapping>& mapping = {});

/// Text of `log` in the format implied by `path` (uncompressed).
std::string encode_log(const std::filesystem::path& path, const EventLog& log,
                       const std::optional<CsvMapping>& mapping = {});

/// CSV output without a mapping uses the default column names plus resource,
/// lifecycle and every schema attribute.
void write_log(const std::filesystem::path& path, const EventLog& log,
               const std::optional<CsvMapping>& mapping = {});

/// Canonical JSON view of a log, for debugging and golden files.
nlohmann::json to_json(const EventLog& log);
EventLog log_from_json(const nlohmann::json& j);

}  // namespace probagen::io
