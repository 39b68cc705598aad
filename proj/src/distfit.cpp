#include "probagen/distfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/triangular.hpp>

#include "probagen/errors.hpp"

namespace probagen {

namespace {

constexpr double kConstantRelativeVariance = 1e-9;
constexpr double kParsimonyTolerance = 0.10;

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // population
};

Moments moments(std::span<const double> xs) {
  Moments m;
  const double n = static_cast<double>(xs.size());
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.variance = ss / n;
  return m;
}

double median_of_sorted(std::span<const double> sorted) {
  const std::size_t n = sorted.size();
  return n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

// Center of the tallest of ceil(sqrt(n)) equal-width bins; first bin wins ties.
double histogram_mode(std::span<const double> sorted) {
  const double lo = sorted.front();
  const double hi = sorted.back();
  const auto bins = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(sorted.size()))));
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (double x : sorted) {
    auto b = static_cast<std::size_t>((x - lo) / width);
    ++counts[std::min(b, bins - 1)];
  }
  const auto peak = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  return std::clamp(lo + (static_cast<double>(peak) + 0.5) * width, lo, hi);
}

// Distance between a sorted sample and the candidate's midpoint quantiles.
double quantile_distance(const FittedDistribution& d, std::span<const double> sorted) {
  const double n = static_cast<double>(sorted.size());
  double total = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i)
    total += std::abs(sorted[i] - d.quantile((static_cast<double>(i) + 0.5) / n));
  return total / n;
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::Constant: return "constant";
    case Family::Normal: return "normal";
    case Family::Exponential: return "exponential";
    case Family::Uniform: return "uniform";
    case Family::Triangular: return "triangular";
    case Family::Lognormal: return "lognormal";
    case Family::Gamma: return "gamma";
  }
  return "constant";
}

Family family_from_string(std::string_view s) {
  for (Family f : kAllFamilies)
    if (to_string(f) == s) return f;
  throw ParseError("unknown distribution family '" + std::string(s) + "'");
}

FittedDistribution FittedDistribution::constant(double value) {
  return FittedDistribution{Family::Constant, {value}, 0.0};
}

double FittedDistribution::quantile(double p) const {
  double q = 0.0;
  switch (family) {
    case Family::Constant:
      q = params[0];
      break;
    case Family::Normal:
      q = boost::math::quantile(boost::math::normal_distribution<>(params[0], params[1]), p);
      break;
    case Family::Exponential:
      q = -params[0] * std::log1p(-p);
      break;
    case Family::Uniform:
      q = params[0] + p * (params[1] - params[0]);
      break;
    case Family::Triangular:
      q = boost::math::quantile(boost::math::triangular_distribution<>(params[0], params[1], params[2]), p);
      break;
    case Family::Lognormal:
      q = boost::math::quantile(boost::math::lognormal_distribution<>(params[0], params[1]), p);
      break;
    case Family::Gamma:
      q = boost::math::quantile(boost::math::gamma_distribution<>(params[0], params[1]), p);
      break;
  }
  return std::max(q, 0.0);
}

double FittedDistribution::mean() const {
  switch (family) {
    case Family::Constant: return params[0];
    case Family::Normal: return params[0];
    case Family::Exponential: return params[0];
    case Family::Uniform: return 0.5 * (params[0] + params[1]);
    case Family::Triangular: return (params[0] + params[1] + params[2]) / 3.0;
    case Family::Lognormal: return std::exp(params[0] + 0.5 * params[1] * params[1]);
    case Family::Gamma: return params[0] * params[1];
  }
  return 0.0;
}

void validate(const FittedDistribution& d) {
  static constexpr std::size_t kArity[] = {1, 2, 1, 2, 3, 2, 2};
  const auto& p = d.params;
  auto fail = [&](const char* why) {
    throw InputError(std::string(to_string(d.family)) + " distribution: " + why);
  };
  if (p.size() != kArity[static_cast<int>(d.family)]) fail("wrong number of parameters");
  for (double v : p)
    if (!std::isfinite(v)) fail("non-finite parameter");
  if (!(d.fit_distance >= 0.0)) fail("negative fit distance");
  switch (d.family) {
    case Family::Normal: if (!(p[1] > 0)) fail("stddev must be positive"); break;
    case Family::Exponential: if (!(p[0] > 0)) fail("mean must be positive"); break;
    case Family::Uniform: if (!(p[0] < p[1])) fail("need min < max"); break;
    case Family::Triangular: if (!(p[0] <= p[1] && p[1] <= p[2] && p[0] < p[2])) fail("need min <= mode <= max"); break;
    case Family::Lognormal: if (!(p[1] > 0)) fail("sigma must be positive"); break;
    case Family::Gamma: if (!(p[0] > 0 && p[1] > 0)) fail("shape and scale must be positive"); break;
    case Family::Constant: break;
  }
}

std::optional<FittedDistribution> fit_family(Family family, std::span<const double> samples) {
  if (samples.empty()) return std::nullopt;
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const Moments m = moments(sorted);
  const double sd = std::sqrt(m.variance);
  const double lo = sorted.front();
  const double hi = sorted.back();

  FittedDistribution d;
  d.family = family;
  switch (family) {
    case Family::Constant:
      d.params = {median_of_sorted(sorted)};
      break;
    case Family::Normal:
      if (!(sd > 0)) return std::nullopt;
      d.params = {m.mean, sd};
      break;
    case Family::Exponential:
      if (!(m.mean > 0)) return std::nullopt;
      d.params = {m.mean};
      break;
    case Family::Uniform:
      if (!(hi > lo)) return std::nullopt;
      d.params = {lo, hi};
      break;
    case Family::Triangular:
      if (!(hi > lo)) return std::nullopt;
      d.params = {lo, histogram_mode(sorted), hi};
      break;
    case Family::Lognormal: {
      const auto first_positive = std::upper_bound(sorted.begin(), sorted.end(), 0.0);
      if (first_positive == sorted.end()) return std::nullopt;
      const double zero_stand_in = *first_positive / 2.0;
      std::vector<double> logs;
      logs.reserve(sorted.size());
      for (double x : sorted) logs.push_back(std::log(x > 0 ? x : zero_stand_in));
      const Moments lm = moments(logs);
      if (!(lm.variance > 0)) return std::nullopt;
      d.params = {lm.mean, std::sqrt(lm.variance)};
      break;
    }
    case Family::Gamma:
      if (!(m.mean > 0 && m.variance > 0)) return std::nullopt;
      d.params = {m.mean * m.mean / m.variance, m.variance / m.mean};
      break;
  }
  d.fit_distance = quantile_distance(d, sorted);
  return d;
}

FittedDistribution fit_best(std::span<const double> samples) {
  if (samples.empty()) throw InputError("cannot fit a distribution to an empty sample");
  for (double x : samples)
    if (!std::isfinite(x) || x < 0) throw InputError("duration samples must be finite and non-negative");

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const Moments m = moments(sorted);
  if (m.variance <= kConstantRelativeVariance * m.mean * m.mean) return *fit_family(Family::Constant, sorted);

  std::vector<FittedDistribution> fits;
  double min_distance = std::numeric_limits<double>::infinity();
  for (Family f : kAllFamilies) {
    if (auto candidate = fit_family(f, sorted)) {
      min_distance = std::min(min_distance, candidate->fit_distance);
      fits.push_back(std::move(*candidate));
    }
  }
  // Fewest parameters among the near-best fits; then distance; then family order.
  const FittedDistribution* best = nullptr;
  for (const auto& d : fits) {
    if (d.fit_distance > (1.0 + kParsimonyTolerance) * min_distance) continue;
    if (!best || d.params.size() < best->params.size() ||
        (d.params.size() == best->params.size() && d.fit_distance < best->fit_distance))
      best = &d;
  }
  return *best;
}

double sample(const FittedDistribution& d, Rng& rng) {
  const double u = rng.uniform_open01();
  return d.family == Family::Constant ? std::max(d.params[0], 0.0) : d.quantile(u);
}

double wasserstein_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InputError("wasserstein distance needs two non-empty samples");
  std::vector<double> xa(a.begin(), a.end());
  std::vector<double> xb(b.begin(), b.end());
  std::sort(xa.begin(), xa.end());
  std::sort(xb.begin(), xb.end());
  const double na = static_cast<double>(xa.size());
  const double nb = static_cast<double>(xb.size());

  // Integrate |F_a - F_b| over the merged breakpoints.
  std::size_t i = 0;
  std::size_t j = 0;
  double prev = std::min(xa.front(), xb.front());
  double total = 0.0;
  while (i < xa.size() || j < xb.size()) {
    const double x = j == xb.size() || (i < xa.size() && xa[i] <= xb[j]) ? xa[i] : xb[j];
    const double fa = static_cast<double>(i) / na;
    const double fb = static_cast<double>(j) / nb;
    total += std::abs(fa - fb) * (x - prev);
    while (i < xa.size() && xa[i] == x) ++i;
    while (j < xb.size() && xb[j] == x) ++j;
    prev = x;
  }
  return total;
}

nlohmann::json to_json(const FittedDistribution& d) {
  return {{"family", std::string(to_string(d.family))}, {"params", d.params}, {"fit_distance", d.fit_distance}};
}

FittedDistribution distribution_from_json(const nlohmann::json& j) {
  FittedDistribution d;
  try {
    d.family = family_from_string(j.at("family").get<std::string>());
    d.params = j.at("params").get<std::vector<double>>();
    d.fit_distance = j.at("fit_distance").get<double>();
  } catch (const nlohmann::json::exception& err) {
    throw ParseError(std::string("invalid distribution: ") + err.what());
  }
  validate(d);
  return d;
}

}  // namespace probagen
