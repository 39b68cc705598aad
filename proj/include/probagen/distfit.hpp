#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "probagen/random.hpp"

namespace probagen {

enum class Family { Constant, Normal, Exponential, Uniform, Triangular, Lognormal, Gamma };

inline constexpr Family kAllFamilies[] = {Family::Constant,   Family::Normal,    Family::Exponential,
                                          Family::Uniform,    Family::Triangular, Family::Lognormal,
                                          Family::Gamma};

std::string_view to_string(Family f);
Family family_from_string(std::string_view s);

/// One of the seven duration families with its estimated parameters.
///
/// Parameter layout:
///   Constant    {value}
///   Normal      {mean, stddev}
///   Exponential {mean}
///   Uniform     {min, max}
///   Triangular  {min, mode, max}
///   Lognormal   {mu, sigma}        (of the log)
///   Gamma       {shape, scale}
struct FittedDistribution {
  Family family = Family::Constant;
  std::vector<double> params{0.0};
  double fit_distance = 0.0;

  static FittedDistribution constant(double value);

  /// Quantile of the family clamped at zero (the distribution actually sampled).
  double quantile(double p) const;
  double mean() const;

  friend bool operator==(const FittedDistribution&, const FittedDistribution&) = default;
};

/// Throws InputError when params violate the family's constraints.
void validate(const FittedDistribution& d);

/// Fits every applicable family and scores each by the Wasserstein-1 distance
/// between the sorted sample and the candidate's quantiles at the n midpoint
/// probabilities (i + 0.5) / n. Among fits within 10% of the smallest
/// distance, the one with fewest parameters wins, then the smaller distance,
/// then the earlier family in kAllFamilies order.
FittedDistribution fit_best(std::span<const double> samples);

/// Estimates the parameters of one family; nullopt when the family does not
/// apply to the sample (e.g. lognormal on an all-zero sample).
std::optional<FittedDistribution> fit_family(Family family, std::span<const double> samples);

/// Inverse-transform draw, clamped to >= 0.
double sample(const FittedDistribution& d, Rng& rng);

/// Exact 1-D earth mover's distance between two empirical distributions.
double wasserstein_1d(std::span<const double> a, std::span<const double> b);

nlohmann::json to_json(const FittedDistribution& d);
FittedDistribution distribution_from_json(const nlohmann::json& j);

}  // namespace probagen
