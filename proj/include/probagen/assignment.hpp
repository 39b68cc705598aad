#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace probagen {

/// Unit-cost insert/delete/substitute edit distance.
std::size_t levenshtein(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

/// levenshtein / max(|a|, |b|); 0 for two empty sequences.
double normalized_levenshtein(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

/// Dense row-major cost matrix.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

struct TransportFlow {
  std::size_t from = 0;
  std::size_t to = 0;
  std::size_t amount = 0;
};

struct TransportPlan {
  double cost = 0.0;
  std::vector<TransportFlow> flows;
};

/// Balanced min-cost transportation with integer supplies and demands
/// (successive shortest paths with potentials). With all supplies and demands
/// equal to 1 this is the linear assignment problem. Costs must be >= 0 and
/// Σ supply must equal Σ demand.
TransportPlan min_cost_transport(std::span<const std::size_t> supply, std::span<const std::size_t> demand,
                                 const CostMatrix& cost);

/// Minimum total cost of a perfect matching on a square matrix.
double assignment_cost(const CostMatrix& cost);

}  // namespace probagen
