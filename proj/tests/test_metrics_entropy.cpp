#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "probagen/errors.hpp"
#include "probagen/metrics_entropy.hpp"
#include "test_support.hpp"

using namespace probagen;
using namespace probagen::testing;

namespace {

// Bins values the long way: explicit bin edges, linear scan per value.
double histogram_entropy_oracle(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const double lo = *std::min_element(xs.begin(), xs.end());
  const double hi = *std::max_element(xs.begin(), xs.end());
  if (sd == 0.0 || lo == hi) return 0.0;
  const double h = 3.49 * sd / std::cbrt(n);
  const auto k = static_cast<std::size_t>(std::ceil((hi - lo) / h));
  std::vector<double> edges;
  for (std::size_t i = 0; i <= k; ++i) edges.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k));
  std::vector<double> counts(k, 0.0);
  for (double x : xs) {
    std::size_t b = k - 1;
    for (std::size_t i = 0; i < k; ++i)
      if (x < edges[i + 1]) {
        b = i;
        break;
      }
    counts[b] += 1.0;
  }
  double e = 0.0;
  for (double c : counts)
    if (c > 0) e -= c / n * std::log(c / n);
  return e;
}

// One trace per duration (hours), each ⟨A⟩ from hour 10*i.
EventLog durations(const std::vector<double>& hours) {
  std::vector<Trace> traces;
  for (std::size_t i = 0; i < hours.size(); ++i) {
    const double s = 1000.0 * static_cast<double>(i);
    traces.push_back(trace_of("t" + std::to_string(i), {event("", "A", s), event("", "B", s + hours[i])}));
  }
  return EventLog(traces);
}

// Start/complete pairs for activity `act`, one per duration.
std::vector<Trace> paired(const std::string& act, const std::vector<double>& hours, std::size_t offset) {
  std::vector<Trace> traces;
  for (std::size_t i = 0; i < hours.size(); ++i) {
    const double s = 1000.0 * static_cast<double>(i + offset);
    traces.push_back(trace_of(act + std::to_string(i),
                              {event("", act, s, {}, Lifecycle::start()), event("", act, s + hours[i])}));
  }
  return traces;
}

std::vector<double> repeat(std::vector<std::pair<double, int>> spec) {
  std::vector<double> out;
  for (auto [v, n] : spec) out.insert(out.end(), static_cast<std::size_t>(n), v);
  return out;
}

}  // namespace

TEST(TraceEntropy, Examples) {
  EXPECT_EQ(trace_entropy(log_of({{"A", "B"}, {"A", "B"}})), 0.0);
  EXPECT_DOUBLE_EQ(trace_entropy(log_of({{"A"}, {"B"}})), std::log(2.0));
  EXPECT_NEAR(trace_entropy(log_of({{"A"}, {"A"}, {"B"}, {"C"}})), 1.5 * std::log(2.0), 1e-12);
  EXPECT_THROW(trace_entropy(EventLog{}), InputError);
}

TEST(TraceEntropy, LifecycleOnlyWhenAsked) {
  auto log = EventLog({trace_of("1", {event("", "A", 0, {}, Lifecycle::start()), event("", "A", 1)}),
                       trace_of("2", {event("", "A", 2), event("", "A", 3)})});
  EXPECT_EQ(trace_entropy(log), 0.0);
  EXPECT_DOUBLE_EQ(trace_entropy(log, {true}), std::log(2.0));
}

TEST(TraceEntropy, Normalized) {
  const auto distinct = log_of({{"A"}, {"B"}, {"C"}, {"D"}});
  EXPECT_DOUBLE_EQ(normalized_trace_entropy(distinct), 1.0);
  EXPECT_EQ(normalized_trace_entropy(log_of({{"A"}})), 0.0);
  std::mt19937 g(1);
  for (int i = 0; i < 30; ++i) {
    std::vector<std::vector<std::string>> seqs(2 + g() % 10);
    for (auto& s : seqs) s = {std::string(1, static_cast<char>('A' + g() % 3))};
    const auto log = log_of(seqs);
    const double h = trace_entropy(log);
    EXPECT_GE(normalized_trace_entropy(log), 0.0);
    EXPECT_LE(normalized_trace_entropy(log), 1.0);
    EXPECT_NEAR(normalized_trace_entropy(log), h / std::log(static_cast<double>(log.size())), 1e-12);
  }
}

TEST(PrefixEntropy, Examples) {
  EXPECT_DOUBLE_EQ(prefix_entropy(log_of({{"A"}})), std::log(2.0));
  for (std::size_t n : {1u, 3u, 6u})
    EXPECT_NEAR(prefix_entropy(log_of(std::vector<std::vector<std::string>>(4, std::vector<std::string>(n, "A")))),
                std::log(static_cast<double>(n + 1)), 1e-12);
  EXPECT_DOUBLE_EQ(prefix_entropy(log_of({{"A", "B"}, {"C"}})), prefix_entropy(log_of({{"C"}, {"A", "B"}}, 3.0)));
}

TEST(Discretized, ScottWidth) {
  std::vector<double> xs(100);
  // Symmetric ±1 sample with n-1 deviation exactly 1.
  const double a = std::sqrt(99.0 / 100.0);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = i % 2 ? a : -a;
  EXPECT_NEAR(scott_bin_width(xs), 0.7519, 1e-4);
  EXPECT_NEAR(scott_bin_width(xs), 3.49 * std::pow(100.0, -1.0 / 3.0), 1e-12);
}

TEST(Discretized, ConstantAndEmpty) {
  EXPECT_EQ(discretized_entropy(std::vector<double>(10, 3.0)), 0.0);
  EXPECT_EQ(scott_histogram(std::vector<double>(10, 3.0)).size(), 1u);
  EXPECT_EQ(discretized_entropy(std::vector<double>{5.0}), 0.0);
  EXPECT_THROW(discretized_entropy(std::vector<double>{}), InputError);
}

TEST(Discretized, MatchesBruteForceHistogram) {
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::lognormal_distribution<double> ln(0.0, 1.0);
  for (std::size_t n : {2u, 7u, 100u, 5000u}) {
    std::vector<double> xs(n);
    for (auto& x : xs) x = u(g);
    EXPECT_NEAR(discretized_entropy(xs), histogram_entropy_oracle(xs), 1e-12) << n;
    for (auto& x : xs) x = ln(g);
    EXPECT_NEAR(discretized_entropy(xs), histogram_entropy_oracle(xs), 1e-12) << n;
  }
  std::vector<double> xs(20000);
  for (auto& x : xs) x = u(g);
  const auto bins = scott_histogram(xs);
  EXPECT_NEAR(discretized_entropy(xs), std::log(static_cast<double>(bins.size())), 0.01);
}

TEST(CycleTimeEntropy, Examples) {
  EXPECT_EQ(cycle_time_entropy(durations(std::vector<double>(8, 3.0))), 0.0);
  EXPECT_EQ(cycle_time_entropy(durations({4.0})), 0.0);
  EXPECT_NEAR(cycle_time_entropy(durations(repeat({{1.0, 50}, {100.0, 50}}))), std::log(2.0), 1e-12);
}

TEST(ActivityDurationEntropy, Examples) {
  EXPECT_FALSE(activity_duration_entropy(log_of({{"A", "B"}})));

  auto constant = paired("A", std::vector<double>(6, 2.0), 0);
  auto more = paired("B", std::vector<double>(6, 0.5), 100);
  constant.insert(constant.end(), more.begin(), more.end());
  EXPECT_EQ(*activity_duration_entropy(EventLog(constant)), 0.0);

  auto mixed = paired("A", std::vector<double>(100, 2.0), 0);
  auto varying = paired("B", repeat({{1.0, 50}, {100.0, 50}}), 200);
  mixed.insert(mixed.end(), varying.begin(), varying.end());
  EXPECT_NEAR(*activity_duration_entropy(EventLog(mixed)), std::log(2.0) / 2.0, 1e-12);
}

TEST(Properties, ReorderAndTranslationInvariance) {
  std::mt19937 g(3);
  std::vector<Trace> traces;
  for (int i = 0; i < 30; ++i) {
    std::vector<Event> evs;
    double h = static_cast<double>(g() % 100);
    for (std::size_t j = 0; j < 1 + g() % 4; ++j) {
      const std::string act(1, static_cast<char>('A' + g() % 3));
      evs.push_back(event("", act, h, {}, Lifecycle::start()));
      h += 0.1 * static_cast<double>(1 + g() % 30);
      evs.push_back(event("", act, h));
      h += 0.5;
    }
    traces.push_back(trace_of("t" + std::to_string(i), evs));
  }
  const EventLog log(traces);
  auto shuffled = traces;
  std::shuffle(shuffled.begin(), shuffled.end(), g);
  for (auto& t : shuffled)
    for (auto& e : t.events) e.timestamp += std::chrono::hours(37);
  const auto a = entropy_report(log);
  const auto b = entropy_report(EventLog(shuffled));
  EXPECT_EQ(to_json(a), to_json(b));
  EXPECT_TRUE(a.activity_duration_entropy);
  EXPECT_LE(a.trace_entropy, std::log(static_cast<double>(log.size())) + 1e-12);
  const std::string table = format_entropy_table({{"log", a}});
  EXPECT_NE(table.find("Prefix"), std::string::npos);
}
