#include "probagen/io/xes.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <sstream>

#include "probagen/errors.hpp"
#include "probagen/io/gzip.hpp"

namespace probagen::io {

namespace pt = boost::property_tree;

namespace {

constexpr std::string_view kConceptName = "concept:name";
constexpr std::string_view kResource = "org:resource";
constexpr std::string_view kTimestamp = "time:timestamp";
constexpr std::string_view kLifecycle = "lifecycle:transition";

struct XesAttribute {
  std::string tag;
  std::string key;
  std::string value;
};

std::optional<XesAttribute> read_attribute(const std::string& tag, const pt::ptree& node) {
  static const char* const kTypes[] = {"string", "date", "int", "float", "boolean", "id"};
  bool typed = false;
  for (const char* t : kTypes) typed = typed || tag == t;
  if (!typed) return std::nullopt;
  auto key = node.get_optional<std::string>("<xmlattr>.key");
  auto value = node.get_optional<std::string>("<xmlattr>.value");
  if (!key || !value) return std::nullopt;
  return XesAttribute{tag, *key, *value};
}

Event read_event(const pt::ptree& node, const std::string& case_id) {
  Event e;
  e.case_id = case_id;
  bool have_activity = false;
  bool have_time = false;
  for (const auto& [tag, child] : node) {
    auto attr = read_attribute(tag, child);
    if (!attr) continue;
    if (attr->key == kConceptName) {
      e.activity = attr->value;
      have_activity = true;
    } else if (attr->key == kResource) {
      e.resource = attr->value;
    } else if (attr->key == kTimestamp) {
      auto ts = parse_iso8601(attr->value);
      if (!ts) throw InputError("case '" + case_id + "': unparseable timestamp '" + attr->value + "'");
      e.timestamp = *ts;
      have_time = true;
    } else if (attr->key == kLifecycle) {
      e.lifecycle = Lifecycle::from_label(attr->value);
    } else if (attr->tag == "int" || attr->tag == "float") {
      try {
        e.attributes[attr->key] = std::stod(attr->value);
      } catch (const std::exception&) {
        e.attributes[attr->key] = attr->value;
      }
    } else {
      e.attributes[attr->key] = attr->value;
    }
  }
  if (!have_time) throw InputError("case '" + case_id + "': event without time:timestamp");
  if (!have_activity) throw InputError("case '" + case_id + "': event without concept:name");
  return e;
}

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

void put(std::ostringstream& os, int indent, std::string_view tag, std::string_view key,
         std::string_view value) {
  os << std::string(static_cast<std::size_t>(indent), '\t') << '<' << tag << " key=\"" << escape(key)
     << "\" value=\"" << escape(value) << "\"/>\n";
}

}  // namespace

EventLog parse_xes(std::string_view bytes) {
  const std::string text = is_gzip(bytes) ? gzip_decompress(bytes) : std::string(bytes);
  pt::ptree doc;
  try {
    std::istringstream in(text);
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& err) {
    throw ParseError("malformed XES: " + err.message(), static_cast<long>(err.line()));
  }
  const auto log_node = doc.get_child_optional("log");
  if (!log_node) throw ParseError("XES document has no <log> root");

  std::vector<Trace> traces;
  std::size_t index = 0;
  for (const auto& [tag, trace_node] : *log_node) {
    if (tag != "trace") continue;
    ++index;
    Trace trace;
    for (const auto& [ttag, child] : trace_node) {
      auto attr = read_attribute(ttag, child);
      if (attr && attr->key == kConceptName) trace.case_id = attr->value;
    }
    if (trace.case_id.empty()) trace.case_id = "trace_" + std::to_string(index);
    for (const auto& [ttag, child] : trace_node)
      if (ttag == "event") trace.events.push_back(read_event(child, trace.case_id));
    if (!trace.events.empty()) traces.push_back(std::move(trace));
  }
  return EventLog(std::move(traces));
}

std::string write_xes(const EventLog& log) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\" ?>\n"
     << "<log xes.version=\"1.0\" xes.features=\"\">\n"
     << "\t<extension name=\"Concept\" prefix=\"concept\" uri=\"http://www.xes-standard.org/concept.xesext\"/>\n"
     << "\t<extension name=\"Time\" prefix=\"time\" uri=\"http://www.xes-standard.org/time.xesext\"/>\n"
     << "\t<extension name=\"Organizational\" prefix=\"org\" uri=\"http://www.xes-standard.org/org.xesext\"/>\n"
     << "\t<extension name=\"Lifecycle\" prefix=\"lifecycle\" uri=\"http://www.xes-standard.org/lifecycle.xesext\"/>\n";
  for (const auto& trace : log.traces()) {
    os << "\t<trace>\n";
    put(os, 2, "string", kConceptName, trace.case_id);
    for (const auto& e : trace.events) {
      os << "\t\t<event>\n";
      put(os, 3, "string", kConceptName, e.activity);
      if (e.resource) put(os, 3, "string", kResource, *e.resource);
      put(os, 3, "date", kTimestamp, format_iso8601(e.timestamp));
      put(os, 3, "string", kLifecycle, e.lifecycle.label());
      for (const auto& [name, value] : e.attributes) {
        const bool numeric = std::holds_alternative<double>(value);
        put(os, 3, numeric ? "float" : "string", name, attribute_to_string(value));
      }
      os << "\t\t</event>\n";
    }
    os << "\t</trace>\n";
  }
  os << "</log>\n";
  return os.str();
}

}  // namespace probagen::io
