#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "probagen/log_model.hpp"
#include "probagen/pts.hpp"
#include "probagen/random.hpp"

namespace probagen {

struct GenerationConfig {
  std::size_t n_traces = 0;
  std::uint64_t seed = 0;
  Timestamp start_time{};
  /// Safety cap on events per trace; 0 means 5 x the longest training trace.
  std::size_t max_trace_length = 0;
  /// Worker threads; 0 means hardware concurrency. Output does not depend on it.
  std::size_t workers = 1;
};

struct BalanceConfig {
  std::string target_activity;
  double target_fraction = 0.5;
  std::size_t max_rejections_per_trace = 1000;
};

/// What happened during generation, for the JSON report next to the log.
struct GenerationReport {
  std::uint64_t seed = 0;
  std::size_t n_traces = 0;
  std::size_t max_trace_length = 0;
  std::vector<std::size_t> truncated;  // trace indices cut at the cap
  std::size_t rejections = 0;          // balanced mode: discarded candidates
  std::size_t replaced = 0;            // balanced mode: real traces swapped out
  std::vector<std::string> notices;
};

nlohmann::json to_json(const GenerationReport& r);

/// One random walk over the model. The first event sits at `arrival`.
/// `truncated` is set when the walk hit `max_length` before ending.
Trace generate_trace(const ProbabilisticTransitionSystem& pts, Rng& rng, Timestamp arrival, std::string case_id,
                     std::size_t max_length, bool* truncated = nullptr);

/// Arrival instants: start_time, then cumulative inter-arrival draws.
std::vector<Timestamp> arrival_times(const ProbabilisticTransitionSystem& pts, const GenerationConfig& config);

/// Synthetic log of config.n_traces traces. Trace i uses its own stream
/// derived from (seed, i), so shorter runs are prefixes of longer ones.
EventLog generate_log(const ProbabilisticTransitionSystem& pts, const GenerationConfig& config,
                      GenerationReport* report = nullptr);

/// Replaces the latest-starting traces without the target activity by
/// generated traces that contain it, until round(target_fraction * |train|)
/// traces contain the activity. Each synthetic trace inherits the arrival
/// instant of the trace it replaces.
///
/// Throws InputError when the activity is absent from train or the model,
/// and Error when a slot exhausts its rejection budget.
EventLog generate_balanced(const ProbabilisticTransitionSystem& pts, const EventLog& train,
                           const GenerationConfig& config, const BalanceConfig& balance,
                           GenerationReport* report = nullptr);

}  // namespace probagen
