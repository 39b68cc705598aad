#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace probagen {

enum class TaskKind { Regression, Classification };

/// Row-major samples; classification targets are 0 or 1.
struct Dataset {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
};

class Predictor {
 public:
  virtual ~Predictor() = default;
  /// Regression: the estimate. Classification: score in [0, 1], positive at >= 0.5.
  virtual double predict(std::span<const double> features) const = 0;
};

/// fit() must be deterministic given the seed.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::unique_ptr<Predictor> fit(const Dataset& data, TaskKind kind, std::uint64_t seed) const = 0;
  virtual std::string name() const = 0;
};

}  // namespace probagen
