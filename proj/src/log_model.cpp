#include "probagen/log_model.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <charconv>
#include <cstdlib>

#include "probagen/errors.hpp"

namespace probagen {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return v;
}

Lifecycle Lifecycle::from_label(std::string_view label) {
  const std::string l = lower(label);
  if (l == "start") return start();
  if (l == "complete") return complete();
  if (l == "schedule") return schedule();
  return Lifecycle(Kind::Other, std::string(label));
}

std::string attribute_to_string(const AttributeValue& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, std::get<double>(v));
  (void)ec;
  return std::string(buf, ptr);
}

std::string_view to_string(AttributeType t) {
  return t == AttributeType::Numeric ? "numeric" : "categorical";
}

AttributeType attribute_type_from_string(std::string_view s) {
  const std::string l = lower(s);
  if (l == "numeric" || l == "number" || l == "float" || l == "int" || l == "continuous")
    return AttributeType::Numeric;
  if (l == "categorical" || l == "string" || l == "category" || l == "discrete")
    return AttributeType::Categorical;
  throw ConfigError("unknown attribute type '" + std::string(s) + "'");
}

std::vector<std::string> Trace::activities() const {
  std::vector<std::string> out;
  out.reserve(events.size());
  for (const auto& e : events) out.push_back(e.activity);
  return out;
}

bool Trace::contains_activity(std::string_view activity) const {
  return std::any_of(events.begin(), events.end(),
                     [&](const Event& e) { return e.activity == activity; });
}

EventLog::EventLog(std::vector<Trace> traces, AttributeSchema declared_schema)
    : traces_(std::move(traces)), schema_(std::move(declared_schema)) {
  // Undeclared attributes are numeric iff every value already holds a number.
  std::map<std::string, bool> all_numeric;
  for (const auto& t : traces_) {
    for (const auto& e : t.events) {
      for (const auto& [name, value] : e.attributes) {
        if (schema_.count(name)) continue;
        auto [it, inserted] = all_numeric.emplace(name, true);
        if (!it->second) continue;
        if (std::holds_alternative<std::string>(value)) it->second = false;
      }
    }
  }
  for (const auto& [name, numeric] : all_numeric)
    schema_.emplace(name, numeric ? AttributeType::Numeric : AttributeType::Categorical);

  bool first = true;
  for (auto& t : traces_) {
    if (t.events.empty()) throw InputError("trace '" + t.case_id + "' has no events");
    for (auto& e : t.events) {
      if (e.case_id.empty()) e.case_id = t.case_id;
      if (e.case_id != t.case_id)
        throw InputError("event of case '" + e.case_id + "' placed in trace '" + t.case_id + "'");
      for (auto& [name, value] : e.attributes) {
        const AttributeType type = schema_.at(name);
        if (type == AttributeType::Numeric) {
          if (const auto* s = std::get_if<std::string>(&value)) {
            auto num = parse_number(*s);
            if (!num)
              throw InputError("attribute '" + name + "' declared numeric but case '" + t.case_id +
                               "' has value '" + *s + "'");
            value = *num;
          }
        } else if (std::holds_alternative<double>(value)) {
          value = attribute_to_string(value);
        }
      }
    }
    std::stable_sort(t.events.begin(), t.events.end(),
                     [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
    if (first || t.start() < epoch_) epoch_ = t.start();
    first = false;
  }
}

std::size_t EventLog::event_count() const {
  std::size_t n = 0;
  for (const auto& t : traces_) n += t.events.size();
  return n;
}

bool EventLog::has_resources() const {
  for (const auto& t : traces_)
    for (const auto& e : t.events)
      if (e.resource) return true;
  return false;
}

bool EventLog::has_start_events() const {
  for (const auto& t : traces_)
    for (const auto& e : t.events)
      if (e.lifecycle.is_start()) return true;
  return false;
}

std::vector<const Trace*> traces_by_start(const EventLog& log) {
  std::vector<const Trace*> order;
  order.reserve(log.size());
  for (const auto& t : log.traces()) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [](const Trace* a, const Trace* b) {
    if (a->start() != b->start()) return a->start() < b->start();
    return a->case_id < b->case_id;
  });
  return order;
}

SplitPair temporal_split(const EventLog& log, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw InputError("train fraction must lie in (0, 1)");
  if (log.size() < 2) throw InputError("temporal split needs at least 2 traces");
  const auto order = traces_by_start(log);
  // The epsilon keeps fractions like 0.7 * 10 from flooring to 6.
  auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(order.size()) + 1e-9));
  n_train = std::clamp<std::size_t>(n_train, 1, order.size() - 1);
  std::vector<Trace> train;
  std::vector<Trace> test;
  for (std::size_t i = 0; i < order.size(); ++i) (i < n_train ? train : test).push_back(*order[i]);
  return {EventLog(std::move(train), log.schema()), EventLog(std::move(test), log.schema())};
}

std::vector<std::span<const Event>> k_prefixes(const Trace& trace, std::size_t k) {
  std::vector<std::span<const Event>> out;
  out.reserve(trace.events.size() + 1);
  const std::span<const Event> all(trace.events);
  out.emplace_back();
  for (std::size_t end = 1; end <= all.size(); ++end) {
    const std::size_t begin = end > k ? end - k : 0;
    out.push_back(all.subspan(begin, end - begin));
  }
  return out;
}

std::optional<Millis> activity_duration(const Trace& trace, std::size_t index) {
  const Event& e = trace.events.at(index);
  const bool is_start = e.lifecycle.is_start();
  if (!is_start && !e.lifecycle.is_complete()) return std::nullopt;
  std::optional<Millis> best;
  for (const auto& other : trace.events) {
    if (other.activity != e.activity) continue;
    if (is_start ? !other.lifecycle.is_complete() : !other.lifecycle.is_start()) continue;
    const Millis gap = is_start ? other.timestamp - e.timestamp : e.timestamp - other.timestamp;
    if (gap < Millis::zero()) continue;
    if (!best || gap < *best) best = gap;
  }
  return best;
}

HandoverCounts handover_counts(const EventLog& log) {
  HandoverCounts counts;
  for (const auto& t : log.traces()) {
    for (std::size_t i = 0; i + 1 < t.events.size(); ++i) {
      const auto& from = t.events[i].resource;
      const auto& to = t.events[i + 1].resource;
      if (from && to) ++counts[{*from, *to}];
    }
  }
  return counts;
}

std::vector<Millis> inter_arrival_times(const EventLog& log) {
  if (log.size() < 2) throw InputError("inter-arrival times need at least 2 traces");
  std::vector<Timestamp> starts;
  starts.reserve(log.size());
  for (const auto& t : log.traces()) starts.push_back(t.start());
  std::sort(starts.begin(), starts.end());
  std::vector<Millis> gaps;
  gaps.reserve(starts.size() - 1);
  for (std::size_t i = 1; i < starts.size(); ++i) gaps.push_back(starts[i] - starts[i - 1]);
  return gaps;
}

}  // namespace probagen
