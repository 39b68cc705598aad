#include "probagen/metrics_entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "probagen/errors.hpp"

namespace probagen {

namespace {

using Variant = std::vector<std::string>;

Variant variant_of(const Trace& t, std::size_t length, const EntropyOptions& opt) {
  Variant v;
  v.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    const Event& e = t.events[i];
    v.push_back(opt.include_lifecycle ? e.activity + "\x1f" + e.lifecycle.label() : e.activity);
  }
  return v;
}

template <typename Key>
double entropy_of_counts(const std::map<Key, std::size_t>& counts) {
  double total = 0.0;
  for (const auto& [k, n] : counts) total += static_cast<double>(n);
  double h = 0.0;
  for (const auto& [k, n] : counts) {
    const double p = static_cast<double>(n) / total;
    h -= p * std::log(p);
  }
  return std::max(0.0, h);
}

void require_non_empty(const EventLog& log) {
  if (log.empty()) throw InputError("entropy of an empty log is undefined");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

double trace_entropy(const EventLog& log, const EntropyOptions& opt) {
  require_non_empty(log);
  std::map<Variant, std::size_t> counts;
  for (const auto& t : log.traces()) ++counts[variant_of(t, t.events.size(), opt)];
  return entropy_of_counts(counts);
}

double normalized_trace_entropy(const EventLog& log, const EntropyOptions& opt) {
  const double h = trace_entropy(log, opt);
  if (log.size() < 2) return 0.0;
  return std::clamp(h / std::log(static_cast<double>(log.size())), 0.0, 1.0);
}

double prefix_entropy(const EventLog& log, const EntropyOptions& opt) {
  require_non_empty(log);
  std::map<Variant, std::size_t> counts;
  for (const auto& t : log.traces())
    for (std::size_t len = 0; len <= t.events.size(); ++len) ++counts[variant_of(t, len, opt)];
  return entropy_of_counts(counts);
}

double scott_bin_width(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : values) ss += (x - mean) * (x - mean);
  const double sigma = std::sqrt(ss / static_cast<double>(n - 1));
  return 3.49 * sigma * std::pow(static_cast<double>(n), -1.0 / 3.0);
}

std::vector<std::size_t> scott_histogram(std::span<const double> values) {
  if (values.empty()) throw InputError("discretized entropy needs at least one value");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  const double h = scott_bin_width(values);
  if (!(range > 0.0) || !(h > 0.0)) return {values.size()};

  const auto bins = static_cast<std::size_t>(std::max(1.0, std::ceil(range / h)));
  const double width = range / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (double x : values) {
    auto b = static_cast<std::size_t>((x - lo) / width);
    ++counts[std::min(b, bins - 1)];
  }
  return counts;
}

double discretized_entropy(std::span<const double> values) {
  const auto counts = scott_histogram(values);
  std::map<std::size_t, std::size_t> occupied;
  for (std::size_t b = 0; b < counts.size(); ++b)
    if (counts[b] > 0) occupied[b] = counts[b];
  return entropy_of_counts(occupied);
}

double cycle_time_entropy(const EventLog& log) {
  require_non_empty(log);
  std::vector<double> durations;
  for (const auto& t : log.traces()) durations.push_back(to_hours(t.duration()));
  return discretized_entropy(durations);
}

std::optional<double> activity_duration_entropy(const EventLog& log) {
  std::map<std::string, std::vector<double>> per_activity;
  for (const auto& t : log.traces())
    for (std::size_t i = 0; i < t.events.size(); ++i) {
      if (!t.events[i].lifecycle.is_start()) continue;
      if (auto d = activity_duration(t, i)) per_activity[t.events[i].activity].push_back(to_hours(*d));
    }
  if (per_activity.empty()) return std::nullopt;
  double total = 0.0;
  for (const auto& [activity, durations] : per_activity) total += discretized_entropy(durations);
  return total / static_cast<double>(per_activity.size());
}

EntropyReport entropy_report(const EventLog& log, const EntropyOptions& opt) {
  EntropyReport r;
  r.trace_entropy = trace_entropy(log, opt);
  r.prefix_entropy = prefix_entropy(log, opt);
  r.normalized_trace_entropy = normalized_trace_entropy(log, opt);
  r.cycle_time_entropy = cycle_time_entropy(log);
  r.activity_duration_entropy = activity_duration_entropy(log);
  return r;
}

nlohmann::json to_json(const EntropyReport& r) {
  return {{"trace_entropy", r.trace_entropy},
          {"prefix_entropy", r.prefix_entropy},
          {"normalized_trace_entropy", r.normalized_trace_entropy},
          {"cycle_time_entropy", r.cycle_time_entropy},
          {"activity_duration_entropy",
           r.activity_duration_entropy ? nlohmann::json(*r.activity_duration_entropy) : nlohmann::json()}};
}

std::string format_entropy_table(const std::vector<std::pair<std::string, EntropyReport>>& rows) {
  std::vector<std::vector<std::string>> cells{{"", "Trace", "Prefix", "Act", "Trace(ct)"}};
  for (const auto& [label, r] : rows)
    cells.push_back({label, fmt(r.trace_entropy), fmt(r.prefix_entropy),
                     r.activity_duration_entropy ? fmt(*r.activity_duration_entropy) : "-",
                     fmt(r.cycle_time_entropy)});
  std::vector<std::size_t> width(5, 0);
  for (const auto& line : cells)
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  std::ostringstream out;
  for (const auto& line : cells) {
    out << line[0] << std::string(width[0] - line[0].size(), ' ');
    for (std::size_t i = 1; i < line.size(); ++i)
      out << (i == 3 ? "   |  " : "  ") << std::string(width[i] - line[i].size(), ' ') << line[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace probagen
