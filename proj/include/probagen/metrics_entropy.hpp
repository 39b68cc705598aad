#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "probagen/log_model.hpp"

namespace probagen {

/// Variant identity used by trace/prefix entropy.
struct EntropyOptions {
  bool include_lifecycle = false;
};

/// -Σ p(σ) ln p(σ) over activity-sequence variants.
double trace_entropy(const EventLog& log, const EntropyOptions& opt = {});

/// trace_entropy / ln |log|; 0 for a single-trace log.
double normalized_trace_entropy(const EventLog& log, const EntropyOptions& opt = {});

/// Entropy of the pooled multiset of all prefixes (⟨⟩ included) of all traces.
double prefix_entropy(const EventLog& log, const EntropyOptions& opt = {});

/// Scott's rule width 3.49 σ n^(-1/3), σ the n-1 sample deviation.
double scott_bin_width(std::span<const double> values);

/// Equal-width histogram over [min, max] with ceil(range / scott_bin_width)
/// bins (last bin closed). A zero range or zero deviation gives one bin.
std::vector<std::size_t> scott_histogram(std::span<const double> values);

/// Entropy of scott_histogram shares; empty bins skipped.
double discretized_entropy(std::span<const double> values);

/// Discretized entropy of trace cycle times (hours).
double cycle_time_entropy(const EventLog& log);

/// Mean over activities of the discretized entropy of their durations
/// (hours, measured on start events). Empty without start/complete pairs.
std::optional<double> activity_duration_entropy(const EventLog& log);

struct EntropyReport {
  double trace_entropy = 0.0;
  double prefix_entropy = 0.0;
  double normalized_trace_entropy = 0.0;
  double cycle_time_entropy = 0.0;
  std::optional<double> activity_duration_entropy;
};

EntropyReport entropy_report(const EventLog& log, const EntropyOptions& opt = {});

nlohmann::json to_json(const EntropyReport& r);

/// Trace / Prefix and Act / Trace (cycle time) columns, one row per log.
std::string format_entropy_table(const std::vector<std::pair<std::string, EntropyReport>>& rows);

}  // namespace probagen
