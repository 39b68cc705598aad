#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "probagen/errors.hpp"
#include "probagen/generator.hpp"
#include "probagen/io/xes.hpp"
#include "test_support.hpp"

using namespace probagen;
using namespace probagen::testing;

namespace {

GenerationConfig config(std::size_t n, std::uint64_t seed = 1) {
  GenerationConfig c;
  c.n_traces = n;
  c.seed = seed;
  c.start_time = monday();
  return c;
}

// Traces with resources, attributes and loops, so every table is exercised.
EventLog rich_log() {
  std::vector<Trace> traces;
  const std::vector<std::vector<std::string>> shapes{
      {"S", "A", "B", "E"}, {"S", "A", "A", "B", "E"}, {"S", "C", "E"}, {"S", "A", "C", "B", "E"}};
  const std::vector<std::string> people{"ann", "bob", "cat"};
  for (std::size_t i = 0; i < 24; ++i) {
    const auto& shape = shapes[i % shapes.size()];
    std::vector<Event> evs;
    double h = static_cast<double>(i) * 2.0 + 0.1 * static_cast<double>(i % 5);
    for (std::size_t j = 0; j < shape.size(); ++j) {
      Event e = event("", shape[j], h, people[(i + j) % people.size()]);
      e.attributes["amount"] = static_cast<double>((i * 7 + j) % 4);
      evs.push_back(e);
      h += 0.5 + 0.25 * static_cast<double>((i + 3 * j) % 3);
    }
    traces.push_back(trace_of("r" + std::to_string(i), evs));
  }
  return EventLog(traces);
}

std::vector<std::string> names(const Trace& t) { return t.activities(); }

}  // namespace

TEST(GenerateLog, DeterministicModelReproducesTheTrace) {
  const auto pts = discover(log_of({{"A", "B"}}), 1);
  const auto log = generate_log(pts, config(25));
  ASSERT_EQ(log.size(), 25u);
  for (const auto& t : log.traces()) {
    EXPECT_EQ(names(t), (std::vector<std::string>{"A", "B"}));
    EXPECT_EQ(t.events[0].timestamp, monday());
    EXPECT_EQ(t.events[1].timestamp - t.events[0].timestamp, Millis(3'600'000));
  }
}

TEST(GenerateLog, ZeroTracesGiveEmptyLog) {
  const auto pts = discover(log_of({{"A", "B"}, {"A"}}), 1);
  EXPECT_TRUE(generate_log(pts, config(0)).empty());
}

TEST(GenerateLog, BranchFrequenciesFollowTheModel) {
  const auto pts = discover(log_of({{"A", "B"}, {"A", "B"}, {"A", "C"}}), 1);
  auto c = config(30000, 77);
  c.workers = 0;
  const auto log = generate_log(pts, c);
  std::size_t b = 0;
  for (const auto& t : log.traces()) {
    ASSERT_EQ(t.events.size(), 2u);
    b += t.events[1].activity == "B";
  }
  // Binomial sd at n = 30000 is about 0.0027; 1.5% of 2/3 is 0.01.
  EXPECT_NEAR(static_cast<double>(b) / 30000.0, 2.0 / 3.0, 0.015 * 2.0 / 3.0);
}

TEST(GenerateLog, ShorterRunIsPrefixOfLongerRun) {
  const auto pts = discover(rich_log(), 2);
  const auto ten = generate_log(pts, config(10, 5));
  const auto twenty = generate_log(pts, config(20, 5));
  auto by_id = [](const EventLog& log) {
    std::map<std::string, Trace> m;
    for (const auto& t : log.traces()) m[t.case_id] = t;
    return m;
  };
  const auto a = by_id(ten);
  const auto b = by_id(twenty);
  for (std::size_t i = 0; i < 10; ++i) {
    const std::string id = "gen_" + std::to_string(i);
    EXPECT_EQ(a.at(id), b.at(id));
  }
}

TEST(GenerateLog, OutputIndependentOfWorkerCount) {
  const auto pts = discover(rich_log(), 2);
  auto c = config(200, 9);
  const std::string one = io::write_xes(generate_log(pts, c));
  c.workers = 4;
  EXPECT_EQ(io::write_xes(generate_log(pts, c)), one);
  c.seed = 10;
  EXPECT_NE(io::write_xes(generate_log(pts, c)), one);
}

TEST(GenerateLog, TimestampsAndArrivalsNonDecreasing) {
  const auto pts = discover(rich_log(), 1);
  const auto c = config(300, 3);
  const auto arrivals = arrival_times(pts, c);
  ASSERT_EQ(arrivals.size(), 300u);
  EXPECT_EQ(arrivals.front(), monday());
  EXPECT_TRUE(std::is_sorted(arrivals.begin(), arrivals.end()));
  const auto log = generate_log(pts, c);
  std::multiset<Timestamp> starts;
  for (const auto& t : log.traces()) {
    starts.insert(t.start());
    for (std::size_t i = 1; i < t.events.size(); ++i) EXPECT_LE(t.events[i - 1].timestamp, t.events[i].timestamp);
  }
  EXPECT_EQ(starts, std::multiset<Timestamp>(arrivals.begin(), arrivals.end()));
}

TEST(GenerateLog, EveryStepExistsInTheTrainingTables) {
  const auto train = rich_log();
  const auto pts = discover(train, 1);
  std::set<std::pair<std::string, std::string>> seen_steps;
  std::set<std::pair<std::string, std::string>> seen_resources;
  for (const auto& t : train.traces())
    for (std::size_t i = 0; i < t.events.size(); ++i) {
      seen_steps.insert({i ? t.events[i - 1].activity : "", t.events[i].activity});
      seen_resources.insert({t.events[i].activity, *t.events[i].resource});
    }
  const auto generated = generate_log(pts, config(300, 4));
  for (const auto& t : generated.traces())
    for (std::size_t i = 0; i < t.events.size(); ++i) {
      EXPECT_TRUE(seen_steps.contains({i ? t.events[i - 1].activity : "", t.events[i].activity}));
      ASSERT_TRUE(t.events[i].resource);
      EXPECT_TRUE(seen_resources.contains({t.events[i].activity, *t.events[i].resource}));
      EXPECT_TRUE(t.events[i].attributes.contains("amount"));
    }
}

TEST(GenerateLog, LoopsAreCutAtTheCapAndReported) {
  const auto pts = discover(log_of({{"A", "A", "A", "A", "A", "A"}}), 1);
  EXPECT_EQ(pts.longest_trace, 6u);
  auto c = config(50, 2);
  c.max_trace_length = 3;
  GenerationReport report;
  const auto log = generate_log(pts, c, &report);
  EXPECT_FALSE(report.truncated.empty());
  EXPECT_EQ(report.max_trace_length, 3u);
  for (const auto& t : log.traces()) EXPECT_LE(t.events.size(), 3u);

  GenerationReport defaults;
  generate_log(pts, config(5), &defaults);
  EXPECT_EQ(defaults.max_trace_length, 30u);
  EXPECT_EQ(to_json(report)["truncated"].size(), report.truncated.size());
}

namespace {

// c0, c1 contain "a"; c2..c9 do not. Trace i starts at hour i.
EventLog rare_log(std::size_t with_a) {
  std::vector<std::vector<std::string>> seqs;
  for (std::size_t i = 0; i < 10; ++i)
    seqs.push_back(i < with_a ? std::vector<std::string>{"S", "a", "E"} : std::vector<std::string>{"S", "b", "E"});
  return log_of(seqs);
}

}  // namespace

TEST(GenerateBalanced, ReplacesLatestTracesWithoutTheActivity) {
  const auto train = rare_log(2);
  const auto pts = discover(train, 1);
  BalanceConfig b;
  b.target_activity = "a";
  GenerationReport report;
  const auto out = generate_balanced(pts, train, config(0, 8), b, &report);
  ASSERT_EQ(out.size(), 10u);
  std::set<std::string> ids;
  std::size_t with_a = 0;
  for (const auto& t : out.traces()) {
    ids.insert(t.case_id);
    with_a += t.contains_activity("a");
  }
  EXPECT_EQ(with_a, 5u);
  EXPECT_EQ(report.replaced, 3u);
  for (const char* gone : {"c7", "c8", "c9"}) EXPECT_FALSE(ids.contains(gone));
  for (const char* kept : {"c0", "c1", "c2", "c6"}) EXPECT_TRUE(ids.contains(kept));
  std::multiset<Timestamp> syn_starts;
  for (const auto& t : out.traces())
    if (t.case_id.starts_with("syn_")) syn_starts.insert(t.start());
  EXPECT_EQ(syn_starts, (std::multiset<Timestamp>{at_hours(7), at_hours(8), at_hours(9)}));

  auto c4 = config(0, 8);
  c4.workers = 3;
  EXPECT_EQ(io::write_xes(generate_balanced(pts, train, c4, b)), io::write_xes(out));
}

TEST(GenerateBalanced, FractionWithinOneTrace) {
  const auto train = rare_log(1);
  const auto pts = discover(train, 1);
  for (double f : {0.3, 0.45, 0.5, 0.75}) {
    BalanceConfig b;
    b.target_activity = "a";
    b.target_fraction = f;
    const auto out = generate_balanced(pts, train, config(0, 1), b);
    std::size_t with_a = 0;
    for (const auto& t : out.traces()) with_a += t.contains_activity("a");
    EXPECT_LE(std::abs(static_cast<double>(with_a) / 10.0 - f), 1.0 / 10.0 + 1e-12);
  }
}

TEST(GenerateBalanced, AlreadyBalancedLogUnchanged) {
  const auto train = rare_log(5);
  BalanceConfig b;
  b.target_activity = "a";
  GenerationReport report;
  const auto out = generate_balanced(discover(train, 1), train, config(0), b, &report);
  EXPECT_EQ(out.traces(), train.traces());
  ASSERT_EQ(report.notices.size(), 1u);
  EXPECT_NE(report.notices[0].find("unchanged"), std::string::npos);
}

TEST(GenerateBalanced, AbsentActivityRejected) {
  const auto train = rare_log(2);
  BalanceConfig b;
  b.target_activity = "zzz";
  EXPECT_THROW(generate_balanced(discover(train, 1), train, config(0), b), InputError);
  b.target_activity = "a";
  b.target_fraction = 1.0;
  EXPECT_THROW(generate_balanced(discover(train, 1), train, config(0), b), InputError);
}

TEST(GenerateBalanced, ExhaustedBudgetReportsAchievedFraction) {
  const auto train = rare_log(2);
  auto pts = discover(train, 1);
  // Make "a" unreachable while keeping it in the alphabet.
  const SymbolId a = *pts.activity_id({"a", Lifecycle::complete()});
  pts.cf.rows.at({}).next.clear();
  pts.cf.rows.at({}).next[*pts.activity_id({"S", Lifecycle::complete()})] = 1;
  for (auto& [state, row] : pts.cf.rows)
    if (row.next.erase(a) && row.next.empty() && row.end == 0) row.end = 1;
  BalanceConfig b;
  b.target_activity = "a";
  b.max_rejections_per_trace = 5;
  try {
    generate_balanced(pts, train, config(0), b);
    FAIL() << "expected Error";
  } catch (const InputError&) {
    FAIL() << "budget exhaustion is not an input error";
  } catch (const Error& err) {
    EXPECT_NE(std::string(err.what()).find("achieved fraction 0.2"), std::string::npos) << err.what();
  }
}
