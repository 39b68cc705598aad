#pragma once

#include <memory>
#include <string>
#include <vector>

#include "probagen/learner.hpp"

namespace probagen {

class LearnerProcess;

/// Adapter for an external learner speaking newline-delimited JSON on
/// stdin/stdout:
///
///   -> {"op":"fit","kind":"regression"|"classification","seed":N,
///       "samples":[{"x":[...],"y":v}, ...]}
///   <- {"model_id":"..."}
///   -> {"op":"predict","model_id":"...","vector":[...]}
///   <- {"value":v}
///
/// Any reply carrying "error" is raised as an exception. The process is
/// started on first use and stays alive while the learner or one of its
/// predictors exists.
class SubprocessLearner final : public Learner {
 public:
  explicit SubprocessLearner(std::vector<std::string> command);
  ~SubprocessLearner() override;

  std::unique_ptr<Predictor> fit(const Dataset& data, TaskKind kind, std::uint64_t seed) const override;
  std::string name() const override;

 private:
  std::vector<std::string> command_;
  mutable std::shared_ptr<LearnerProcess> process_;
};

}  // namespace probagen
