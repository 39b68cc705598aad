#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "probagen/log_model.hpp"
#include "probagen/roles.hpp"

namespace probagen {

/// Shared knobs for the time-based metrics.
struct MetricOptions {
  /// When set, hour-valued observations are floored to multiples of this bin
  /// before the EMD. Unset means raw values.
  std::optional<double> time_bin_hours;
  double role_threshold = kDefaultRoleThreshold;
  std::size_t workers = 1;
};

/// Normalized-Levenshtein assignment distance between the two variant
/// multisets, in [0, 1]. Unmatched traces of the larger log pair with ⟨⟩.
double cfld(const EventLog& a, const EventLog& b, std::size_t workers = 1);

/// Half the L1 distance between relative n-gram frequencies, with n-1
/// start/end sentinels around every trace.
double ngram_distance(const EventLog& a, const EventLog& b, std::size_t n);

// EMDs over hour-valued observations.
double aed(const EventLog& a, const EventLog& b, const MetricOptions& opt = {});
double red(const EventLog& a, const EventLog& b, const MetricOptions& opt = {});
double ctd(const EventLog& a, const EventLog& b, const MetricOptions& opt = {});
/// Needs at least two traces per log.
double car(const EventLog& a, const EventLog& b, const MetricOptions& opt = {});

inline constexpr double kCircadianPenalty = 24.0;

/// Mean over weekdays of the EMD between hour-of-day values. A weekday with
/// events on one side only costs 24; empty on both sides costs 0.
double ced(const EventLog& a, const EventLog& b, const MetricOptions& opt = {});
double ced(const std::vector<Timestamp>& a, const std::vector<Timestamp>& b, const MetricOptions& opt = {});

/// Mean absolute difference, over the 168 (weekday, hour) buckets, of the
/// weekly average number of distinct active resources.
double cwd(const EventLog& a, const EventLog& b);

/// Mean CED over roles, each computed on the events whose resource maps to
/// that role. Unmapped resources are listed in `notes` when given.
double rbced(const EventLog& a, const EventLog& b, const RoleAssignment& roles, const MetricOptions& opt = {},
             std::vector<std::string>* notes = nullptr);

/// Σ |hw_a(r, s) - hw_b(r, s)| over the union of resource pairs.
double hwd(const EventLog& a, const EventLog& b);

/// Mean over shared attributes of the EMD between their pooled values
/// (Wasserstein-1 for numeric, total variation for categorical). Attributes
/// that cannot be compared are reported in `notes`; nullopt when none remain.
std::optional<double> dad(const EventLog& a, const EventLog& b, std::vector<std::string>* notes = nullptr);

struct MetricReport {
  std::optional<double> cfld, two_gram, three_gram, aed, red, ced, ctd, car, rbced, cwd, hwd, dad;
  std::map<std::string, std::string> notes;
};

/// Every applicable metric for a (real, generated) pair. Roles for RBCED are
/// discovered on `real`. Inapplicable metrics are left empty with a note.
MetricReport evaluate_all(const EventLog& real, const EventLog& gen, const MetricOptions& opt = {});

nlohmann::json to_json(const MetricReport& r);
MetricReport metric_report_from_json(const nlohmann::json& j);

/// Aligned text table, one row per labeled report. DAD is printed after a gap.
std::string format_metric_table(const std::vector<std::pair<std::string, MetricReport>>& rows);

}  // namespace probagen
