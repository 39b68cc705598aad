#include "probagen/io/log_io.hpp"

#include <cctype>

#include "probagen/errors.hpp"
#include "probagen/io/gzip.hpp"
#include "probagen/io/xes.hpp"

namespace probagen::io {

namespace {

std::string stem_extension(const std::filesystem::path& path) {
  auto lower = [](std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  auto p = path;
  if (lower(p.extension().string()) == ".gz") p = p.stem();
  return lower(p.extension().string());
}

CsvMapping default_export_mapping() {
  CsvMapping m;
  m.resource_column = "resource";
  m.lifecycle_column = "lifecycle";
  return m;
}

}  // namespace

LogFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = stem_extension(path);
  if (ext == ".xes") return LogFormat::Xes;
  if (ext == ".csv") return LogFormat::Csv;
  if (ext == ".json") return LogFormat::Json;
  throw ConfigError("cannot infer log format from '" + path.string() + "' (expected .xes, .csv or .json)");
}

EventLog read_log(const std::filesystem::path& path, const std::optional<CsvMapping>& mapping) {
  const auto format = format_from_path(path);
  if (!std::filesystem::exists(path)) throw ConfigError("input log '" + path.string() + "' does not exist");
  const std::string bytes = read_file(path);
  switch (format) {
    case LogFormat::Xes:
      return parse_xes(bytes);
    case LogFormat::Csv:
      if (!mapping) throw ConfigError("CSV input '" + path.string() + "' needs a column mapping");
      return parse_csv(bytes, *mapping);
    case LogFormat::Json:
      try {
        return log_from_json(nlohmann::json::parse(bytes));
      } catch (const nlohmann::json::parse_error& err) {
        throw ParseError(std::string("invalid JSON log: ") + err.what());
      }
  }
  throw ConfigError("unsupported log format");
}

std::string encode_log(const std::filesystem::path& path, const EventLog& log, const std::optional<CsvMapping>& mapping) {
  switch (format_from_path(path)) {
    case LogFormat::Xes:
      return write_xes(log);
    case LogFormat::Csv:
      return write_csv(log, mapping ? *mapping : default_export_mapping());
    case LogFormat::Json:
      return to_json(log).dump(1, '\t') + "\n";
  }
  throw ConfigError("unsupported log format");
}

void write_log(const std::filesystem::path& path, const EventLog& log, const std::optional<CsvMapping>& mapping) {
  write_file(path, encode_log(path, log, mapping));
}

}  // namespace probagen::io
