#include "probagen/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "probagen/errors.hpp"

namespace probagen {

namespace {

constexpr std::size_t kLeaf = std::numeric_limits<std::size_t>::max();
// Gains closer than this fraction of the parent impurity count as equal.
constexpr double kRelativeTolerance = 1e-12;

// Impurity scaled by the sample count: SSE for regression, n * Gini for
// classification.
double impurity(TaskKind kind, double n, double sum, double sumsq) {
  if (n == 0) return 0.0;
  if (kind == TaskKind::Regression) return std::max(0.0, sumsq - sum * sum / n);
  const double pos = sum;
  const double neg = n - sum;
  return n - (pos * pos + neg * neg) / n;
}

struct Builder {
  const Dataset& data;
  TaskKind kind;
  TreeParams params;
  std::vector<DecisionTree::Node>& nodes;

  std::size_t build(std::vector<std::size_t>& idx, std::size_t depth) {
    double sum = 0.0;
    double sumsq = 0.0;
    for (std::size_t i : idx) {
      sum += data.y[i];
      sumsq += data.y[i] * data.y[i];
    }
    const double n = static_cast<double>(idx.size());
    const std::size_t id = nodes.size();
    nodes.push_back({kLeaf, 0.0, sum / n, 0, 0});

    const double parent = impurity(kind, n, sum, sumsq);
    if (depth >= params.max_depth || idx.size() < 2 * params.min_leaf || parent <= 0.0) return id;

    const double tolerance = kRelativeTolerance * parent;
    double best_gain = tolerance;
    std::size_t best_feature = kLeaf;
    double best_threshold = 0.0;
    const std::size_t n_features = data.x[idx.front()].size();
    std::vector<std::size_t> order(idx);
    for (std::size_t f = 0; f < n_features; ++f) {
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return data.x[a][f] < data.x[b][f]; });
      double ls = 0.0;
      double lss = 0.0;
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        const double y = data.y[order[k]];
        ls += y;
        lss += y * y;
        const std::size_t left_n = k + 1;
        const std::size_t right_n = order.size() - left_n;
        const double here = data.x[order[k]][f];
        const double next = data.x[order[k + 1]][f];
        if (!(here < next) || left_n < params.min_leaf || right_n < params.min_leaf) continue;
        const double gain = parent - impurity(kind, static_cast<double>(left_n), ls, lss) -
                            impurity(kind, static_cast<double>(right_n), sum - ls, sumsq - lss);
        if (gain > best_gain + (best_feature == kLeaf ? 0.0 : tolerance)) {
          best_gain = gain;
          best_feature = f;
          best_threshold = here + (next - here) / 2.0;
        }
      }
    }
    if (best_feature == kLeaf) return id;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t i : idx) (data.x[i][best_feature] <= best_threshold ? left : right).push_back(i);
    idx.clear();
    idx.shrink_to_fit();
    const std::size_t l = build(left, depth + 1);
    const std::size_t r = build(right, depth + 1);
    nodes[id].feature = best_feature;
    nodes[id].threshold = best_threshold;
    nodes[id].left = l;
    nodes[id].right = r;
    return id;
  }
};

}  // namespace

DecisionTree DecisionTree::fit(const Dataset& data, TaskKind kind, const TreeParams& params) {
  if (data.x.empty() || data.x.size() != data.y.size()) throw InputError("tree needs a non-empty, aligned dataset");
  const std::size_t width = data.x.front().size();
  for (const auto& row : data.x)
    if (row.size() != width) throw InputError("feature rows have different lengths");
  if (params.min_leaf == 0) throw InputError("min_leaf must be positive");

  DecisionTree tree;
  std::vector<std::size_t> idx(data.x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Builder{data, kind, params, tree.nodes_}.build(idx, 0);
  return tree;
}

double DecisionTree::predict(std::span<const double> features) const {
  std::size_t at = 0;
  while (nodes_[at].feature != kLeaf)
    at = features[nodes_[at].feature] <= nodes_[at].threshold ? nodes_[at].left : nodes_[at].right;
  return nodes_[at].value;
}

std::size_t DecisionTree::depth() const {
  std::function<std::size_t(std::size_t)> walk = [&](std::size_t at) -> std::size_t {
    if (nodes_[at].feature == kLeaf) return 0;
    return 1 + std::max(walk(nodes_[at].left), walk(nodes_[at].right));
  };
  return walk(0);
}

std::unique_ptr<Predictor> TreeLearner::fit(const Dataset& data, TaskKind kind, std::uint64_t) const {
  return std::make_unique<DecisionTree>(DecisionTree::fit(data, kind, params_));
}

}  // namespace probagen
