#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "probagen/learner.hpp"
#include "probagen/log_model.hpp"
#include "probagen/roles.hpp"

namespace probagen {

/// Fixed feature layout, derived from the training log only.
///
///   [activity counts | unseen] elapsed_hours event_count
///   [role counts | unseen role]   (only when the training log has resources)
///   [last-activity one-hot | unseen] [last value of each numeric attribute]
class FeatureSchema {
 public:
  explicit FeatureSchema(const EventLog& train);

  std::size_t size() const { return size_; }
  std::vector<std::string> names() const;

  /// Features of the first `length` events of `trace`.
  std::vector<double> encode(const Trace& trace, std::size_t length) const;

 private:
  std::size_t activity_slot(const std::string& activity) const;
  std::optional<std::size_t> role_slot(const Event& e) const;

  std::vector<std::string> activities_;
  std::optional<RoleAssignment> roles_;
  std::size_t n_roles_ = 0;
  std::vector<std::string> numeric_attributes_;
  std::size_t size_ = 0;
};

/// Prefix samples of every trace, all lengths 1..n. Regression targets are
/// total cycle times in hours; classification targets mark whether
/// `activity` occurs after the prefix.
Dataset prefix_samples(const EventLog& log, const FeatureSchema& schema, TaskKind kind,
                       const std::string& activity = {});

/// One truncated trace of L^run with its ground truth.
struct RunCase {
  Trace prefix;
  double cycle_time_hours = 0.0;
  std::vector<std::string> remaining_activities;
};

struct RunLog {
  std::vector<RunCase> cases;
  std::vector<std::string> notes;
};

/// Truncates each trace to round(p% of its length) events, p ~ U[25, 75],
/// clamped to [1, length-1]. Length-1 traces are skipped with a note.
RunLog build_run_log(const EventLog& test, std::uint64_t seed);

/// MAE / mean(truth).
double relative_mae(const std::vector<double>& truth, const std::vector<double>& predicted);

struct TstrResult {
  double rmae_real = 0.0;
  double rmae_synthetic = 0.0;
  std::size_t runs = 0;
  std::vector<double> per_run_real;
  std::vector<double> per_run_synthetic;
  std::vector<std::string> notes;
};

/// Φ_train on `train` prefixes and Φ_gen on `gen` prefixes, both scored on a
/// fresh L^run per run (stream derived from (seed, run)).
TstrResult tstr_rmae(const EventLog& train, const EventLog& gen, const EventLog& test, const Learner& learner,
                     std::size_t runs = 10, std::uint64_t seed = 0);

/// Per-class F1 = 2TP / (2TP + FP + FN), 0 when undefined; mean of both classes.
double macro_f1(const std::vector<bool>& truth, const std::vector<bool>& predicted);

struct FscoreResult {
  double fscore_train = 0.0;
  double fscore_balanced = 0.0;
  std::size_t runs = 0;
  std::vector<double> per_run_train;
  std::vector<double> per_run_balanced;
  std::vector<std::string> notes;
};

/// Binary "will `activity` still occur" classifiers trained on `train` and on
/// `balanced`, scored by macro F1 on L^run.
FscoreResult rare_activity_fscore(const EventLog& train, const EventLog& balanced, const EventLog& test,
                                  const std::string& activity, const Learner& learner, std::size_t runs = 10,
                                  std::uint64_t seed = 0);

nlohmann::json to_json(const TstrResult& r);
nlohmann::json to_json(const FscoreResult& r);

/// rMAE as percentages, one row per label.
std::string format_tstr_table(const std::vector<std::pair<std::string, TstrResult>>& rows);

}  // namespace probagen
