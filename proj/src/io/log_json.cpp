#include "probagen/errors.hpp"
#include "probagen/io/log_io.hpp"

namespace probagen::io {

nlohmann::json to_json(const EventLog& log) {
  nlohmann::json schema = nlohmann::json::object();
  for (const auto& [name, type] : log.schema()) schema[name] = std::string(to_string(type));
  nlohmann::json traces = nlohmann::json::array();
  for (const auto& t : log.traces()) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : t.events) {
      nlohmann::json ev;
      ev["activity"] = e.activity;
      ev["resource"] = e.resource ? nlohmann::json(*e.resource) : nlohmann::json();
      ev["timestamp"] = format_iso8601(e.timestamp);
      ev["lifecycle"] = e.lifecycle.label();
      nlohmann::json attrs = nlohmann::json::object();
      for (const auto& [name, value] : e.attributes) {
        if (const auto* d = std::get_if<double>(&value)) attrs[name] = *d;
        else attrs[name] = std::get<std::string>(value);
      }
      ev["attributes"] = attrs;
      events.push_back(std::move(ev));
    }
    traces.push_back({{"case_id", t.case_id}, {"events", std::move(events)}});
  }
  return {{"schema", schema}, {"traces", traces}};
}

EventLog log_from_json(const nlohmann::json& j) {
  try {
    AttributeSchema schema;
    for (const auto& [name, type] : j.at("schema").items())
      schema[name] = attribute_type_from_string(type.get<std::string>());
    std::vector<Trace> traces;
    for (const auto& jt : j.at("traces")) {
      Trace t;
      t.case_id = jt.at("case_id").get<std::string>();
      for (const auto& je : jt.at("events")) {
        Event e;
        e.case_id = t.case_id;
        e.activity = je.at("activity").get<std::string>();
        if (je.contains("resource") && !je.at("resource").is_null())
          e.resource = je.at("resource").get<std::string>();
        auto ts = parse_iso8601(je.at("timestamp").get<std::string>());
        if (!ts) throw ParseError("bad timestamp in case '" + t.case_id + "'");
        e.timestamp = *ts;
        if (je.contains("lifecycle")) e.lifecycle = Lifecycle::from_label(je.at("lifecycle").get<std::string>());
        if (je.contains("attributes")) {
          for (const auto& [name, v] : je.at("attributes").items()) {
            if (v.is_number()) e.attributes[name] = v.get<double>();
            else e.attributes[name] = v.get<std::string>();
          }
        }
        t.events.push_back(std::move(e));
      }
      traces.push_back(std::move(t));
    }
    return EventLog(std::move(traces), std::move(schema));
  } catch (const nlohmann::json::exception& err) {
    throw ParseError(std::string("invalid event-log JSON: ") + err.what());
  }
}

}  // namespace probagen::io
