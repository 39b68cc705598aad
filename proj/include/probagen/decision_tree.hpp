#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <vector>

#include "probagen/learner.hpp"

namespace probagen {

struct TreeParams {
  std::size_t max_depth = 8;
  std::size_t min_leaf = 5;
};

/// Greedy CART tree: variance reduction for regression, Gini for
/// classification. Equal gains go to the lower feature index, then the
/// lower threshold.
class DecisionTree final : public Predictor {
 public:
  struct Node {
    // Leaf when feature == npos.
    std::size_t feature = std::numeric_limits<std::size_t>::max();
    double threshold = 0.0;
    double value = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
  };

  static DecisionTree fit(const Dataset& data, TaskKind kind, const TreeParams& params = {});

  double predict(std::span<const double> features) const override;

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t depth() const;

 private:
  std::vector<Node> nodes_;
};

/// The baseline learner: a DecisionTree with fixed params. The tree is fully
/// deterministic, so the seed is not used.
class TreeLearner final : public Learner {
 public:
  explicit TreeLearner(TreeParams params = {}) : params_(params) {}
  std::unique_ptr<Predictor> fit(const Dataset& data, TaskKind kind, std::uint64_t seed) const override;
  std::string name() const override { return "decision-tree"; }

 private:
  TreeParams params_;
};

}  // namespace probagen
