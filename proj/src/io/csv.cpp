#include "probagen/io/csv.hpp"

#include <map>
#include <sstream>

#include "probagen/errors.hpp"
#include "probagen/io/config.hpp"

namespace probagen::io {

namespace {

std::optional<std::string> optional_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ConfigError("mapped column '" + name + "' not found in CSV header");
}

std::string quote(std::string_view s, char delimiter) {
  if (s.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string_view::npos)
    return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

CsvMapping csv_mapping_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("CSV mapping must be an object");
  CsvMapping m;
  try {
    if (auto v = optional_string(j, "case")) m.case_column = *v;
    if (auto v = optional_string(j, "activity")) m.activity_column = *v;
    if (auto v = optional_string(j, "timestamp")) m.timestamp_column = *v;
    if (auto v = optional_string(j, "timestamp_format")) m.timestamp_format = *v;
    m.resource_column = optional_string(j, "resource");
    m.lifecycle_column = optional_string(j, "lifecycle");
    if (auto v = optional_string(j, "delimiter")) {
      if (v->size() != 1) throw ConfigError("delimiter must be a single character");
      m.delimiter = (*v)[0];
    }
    if (j.contains("attributes")) {
      for (const auto& item : j.at("attributes")) {
        const auto spec = item.get<std::string>();
        const auto colon = spec.rfind(':');
        if (colon == std::string::npos) {
          m.attributes.emplace_back(spec, std::nullopt);
          continue;
        }
        const std::string type = spec.substr(colon + 1);
        m.attributes.emplace_back(spec.substr(0, colon),
                                  type == "auto" ? std::nullopt
                                                 : std::optional{attribute_type_from_string(type)});
      }
    }
  } catch (const nlohmann::json::exception& err) {
    throw ConfigError(std::string("invalid CSV mapping: ") + err.what());
  }
  return m;
}

nlohmann::json to_json(const CsvMapping& m) {
  nlohmann::json j;
  j["case"] = m.case_column;
  j["activity"] = m.activity_column;
  j["timestamp"] = m.timestamp_column;
  j["timestamp_format"] = m.timestamp_format;
  j["resource"] = m.resource_column ? nlohmann::json(*m.resource_column) : nlohmann::json();
  j["lifecycle"] = m.lifecycle_column ? nlohmann::json(*m.lifecycle_column) : nlohmann::json();
  j["delimiter"] = std::string(1, m.delimiter);
  auto attrs = nlohmann::json::array();
  for (const auto& [name, type] : m.attributes)
    attrs.push_back(name + ":" + (type ? std::string(to_string(*type)) : "auto"));
  j["attributes"] = attrs;
  return j;
}

CsvMapping load_csv_mapping(const std::filesystem::path& path) {
  return csv_mapping_from_json(load_config_file(path));
}

std::vector<std::vector<std::string>> read_csv_records(std::string_view bytes, char delimiter,
                                                       std::vector<long>* line_numbers) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  long line = 1;
  long row_line = 1;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    const bool blank = row.size() == 1 && row[0].empty();
    if (!blank) {
      records.push_back(std::move(row));
      if (line_numbers) line_numbers->push_back(row_line);
    }
    row.clear();
  };

  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const char c = bytes[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < bytes.size() && bytes[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == delimiter) {
      end_field();
    } else if (c == '\r') {
      continue;
    } else if (c == '\n') {
      end_row();
      ++line;
      row_line = line;
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted CSV field", row_line);
  if (field_started || !row.empty() || !field.empty()) end_row();
  return records;
}

EventLog parse_csv(std::string_view bytes, const CsvMapping& mapping) {
  std::vector<long> lines;
  const auto records = read_csv_records(bytes, mapping.delimiter, &lines);
  if (records.empty()) throw ParseError("CSV has no header row");
  const auto& header = records.front();

  const std::size_t case_col = column_index(header, mapping.case_column);
  const std::size_t act_col = column_index(header, mapping.activity_column);
  const std::size_t time_col = column_index(header, mapping.timestamp_column);
  std::optional<std::size_t> res_col;
  std::optional<std::size_t> life_col;
  if (mapping.resource_column) res_col = column_index(header, *mapping.resource_column);
  if (mapping.lifecycle_column) life_col = column_index(header, *mapping.lifecycle_column);
  std::vector<std::size_t> attr_cols;
  for (const auto& [name, type] : mapping.attributes) attr_cols.push_back(column_index(header, name));

  // Resolve "auto" attribute types: numeric iff every non-empty cell parses.
  AttributeSchema schema;
  for (std::size_t a = 0; a < mapping.attributes.size(); ++a) {
    const auto& [name, declared] = mapping.attributes[a];
    if (declared) {
      schema[name] = *declared;
      continue;
    }
    bool numeric = true;
    for (std::size_t r = 1; r < records.size() && numeric; ++r) {
      const auto& row = records[r];
      if (attr_cols[a] < row.size() && !row[attr_cols[a]].empty())
        numeric = parse_number(row[attr_cols[a]]).has_value();
    }
    schema[name] = numeric ? AttributeType::Numeric : AttributeType::Categorical;
  }

  std::map<std::string, std::size_t> trace_of_case;
  std::vector<Trace> traces;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& row = records[r];
    const std::string where = "CSV data row " + std::to_string(r) + " (line " + std::to_string(lines[r]) + ")";
    if (row.size() < header.size())
      throw InputError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                       std::to_string(row.size()));
    Event e;
    e.case_id = row[case_col];
    e.activity = row[act_col];
    auto ts = parse_timestamp(row[time_col], mapping.timestamp_format);
    if (!ts)
      throw InputError(where + ": timestamp '" + row[time_col] + "' does not match format '" +
                       mapping.timestamp_format + "'");
    e.timestamp = *ts;
    if (res_col && !row[*res_col].empty()) e.resource = row[*res_col];
    if (life_col && !row[*life_col].empty()) e.lifecycle = Lifecycle::from_label(row[*life_col]);
    for (std::size_t a = 0; a < attr_cols.size(); ++a) {
      const std::string& cell = row[attr_cols[a]];
      if (cell.empty()) continue;
      const auto& name = mapping.attributes[a].first;
      if (schema.at(name) == AttributeType::Numeric) {
        auto num = parse_number(cell);
        if (!num) throw InputError(where + ": attribute '" + name + "' value '" + cell + "' is not numeric");
        e.attributes[name] = *num;
      } else {
        e.attributes[name] = cell;
      }
    }
    auto [it, inserted] = trace_of_case.emplace(e.case_id, traces.size());
    if (inserted) traces.push_back(Trace{e.case_id, {}});
    traces[it->second].events.push_back(std::move(e));
  }
  return EventLog(std::move(traces), std::move(schema));
}

std::string write_csv(const EventLog& log, const CsvMapping& mapping) {
  std::vector<std::string> attr_names;
  for (const auto& [name, type] : mapping.attributes) attr_names.push_back(name);
  if (attr_names.empty())
    for (const auto& [name, type] : log.schema()) attr_names.push_back(name);

  const char d = mapping.delimiter;
  std::ostringstream os;
  os << quote(mapping.case_column, d) << d << quote(mapping.activity_column, d) << d
     << quote(mapping.timestamp_column, d);
  if (mapping.resource_column) os << d << quote(*mapping.resource_column, d);
  if (mapping.lifecycle_column) os << d << quote(*mapping.lifecycle_column, d);
  for (const auto& name : attr_names) os << d << quote(name, d);
  os << '\n';
  for (const auto& trace : log.traces()) {
    for (const auto& e : trace.events) {
      os << quote(trace.case_id, d) << d << quote(e.activity, d) << d
         << quote(format_timestamp(e.timestamp, mapping.timestamp_format), d);
      if (mapping.resource_column) os << d << quote(e.resource.value_or(""), d);
      if (mapping.lifecycle_column) os << d << quote(e.lifecycle.label(), d);
      for (const auto& name : attr_names) {
        os << d;
        if (auto it = e.attributes.find(name); it != e.attributes.end())
          os << quote(attribute_to_string(it->second), d);
      }
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace probagen::io
