#include "probagen/io/config.hpp"

#include <sstream>

#include <toml.hpp>

#include "probagen/errors.hpp"
#include "probagen/io/gzip.hpp"

namespace probagen::io {

namespace {

nlohmann::json convert(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& [key, value] : *t) obj[std::string(key.str())] = convert(value);
    return obj;
  }
  if (const auto* a = node.as_array()) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& value : *a) arr.push_back(convert(value));
    return arr;
  }
  if (const auto* s = node.as_string()) return s->get();
  if (const auto* i = node.as_integer()) return i->get();
  if (const auto* f = node.as_floating_point()) return f->get();
  if (const auto* b = node.as_boolean()) return b->get();
  std::ostringstream os;
  if (const auto* d = node.as_date_time()) os << d->get();
  else if (const auto* dd = node.as_date()) os << dd->get();
  else if (const auto* tt = node.as_time()) os << tt->get();
  return os.str();
}

}  // namespace

nlohmann::json load_config_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (path.extension() == ".toml") {
    try {
      return convert(toml::parse(text, path.string()));
    } catch (const toml::parse_error& err) {
      throw ConfigError("invalid TOML in '" + path.string() + "': " + std::string(err.description()) +
                        " (line " + std::to_string(err.source().begin.line) + ")");
    }
  }
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ConfigError("invalid JSON in '" + path.string() + "': " + err.what());
  }
}

}  // namespace probagen::io
