#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "probagen/log_model.hpp"

namespace probagen {

struct KSweepPoint {
  std::size_t k = 1;
  double cfld = 0.0;
  double one_minus_norm_entropy = 0.0;
  double distance_from_origin = 0.0;
};

/// Builds a point with distance = hypot(cfld, one_minus_norm_entropy).
KSweepPoint make_sweep_point(std::size_t k, double cfld, double one_minus_norm_entropy);

/// Index of the point with the smallest distance_from_origin; equal
/// distances go to the smaller k. Throws InputError on an empty sweep.
std::size_t select_elbow(const std::vector<KSweepPoint>& sweep);

struct KOptimization {
  std::size_t selected_k = 0;
  std::vector<KSweepPoint> sweep;
  std::vector<std::string> notes;
};

struct KOptimizationConfig {
  std::vector<std::size_t> k_candidates{1, 2, 3, 4, 5, 6};
  std::size_t gen_traces = 0;  // 0 means |validation|
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

/// For each k: discover on `train`, generate, then score the generated log
/// by CFLD against `validation` and by 1 - normalized trace entropy. A k
/// whose discovery or generation fails is dropped with a note.
KOptimization optimize_k(const EventLog& train, const EventLog& validation, const KOptimizationConfig& config);

/// Mean of the per-log axes for each k present in every sweep, then the
/// elbow of the averaged curve.
KOptimization average_sweeps(const std::vector<KOptimization>& runs);

nlohmann::json to_json(const KOptimization& r);

/// "k cfld one_minus_entropy" lines.
std::string plot_data(const std::vector<KSweepPoint>& sweep);

std::string format_sweep_table(const KOptimization& r);

}  // namespace probagen
