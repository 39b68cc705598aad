#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "probagen/log_model.hpp"

namespace probagen::io {

/// Column mapping for CSV ingestion and export.
struct CsvMapping {
  std::string case_column = "case";
  std::string activity_column = "activity";
  std::string timestamp_column = "timestamp";
  std::string timestamp_format = "ISO8601";
  std::optional<std::string> resource_column;
  std::optional<std::string> lifecycle_column;
  /// Attribute columns; an empty type means "numeric if every value parses as a number".
  std::vector<std::pair<std::string, std::optional<AttributeType>>> attributes;
  char delimiter = ',';
};

/// Keys: case, activity, timestamp, timestamp_format, resource, lifecycle,
/// attributes (list of "name" or "name:type"), delimiter.
CsvMapping csv_mapping_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CsvMapping& m);

/// Loads a mapping from a `.toml` or `.json` file.
CsvMapping load_csv_mapping(const std::filesystem::path& path);

/// Throws ConfigError when a mapped column is missing from the header and
/// InputError naming the row for unparseable timestamps or numbers.
EventLog parse_csv(std::string_view bytes, const CsvMapping& mapping);

/// One row per event, grouped by trace. Attributes are the mapped ones, or the
/// whole schema when the mapping lists none.
std::string write_csv(const EventLog& log, const CsvMapping& mapping);

/// RFC 4180 record splitter. Exposed for tests.
std::vector<std::vector<std::string>> read_csv_records(std::string_view bytes, char delimiter,
                                                       std::vector<long>* line_numbers = nullptr);

}  // namespace probagen::io
