#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>

#include "probagen/errors.hpp"
#include "probagen/io/gzip.hpp"
#include "probagen/pts.hpp"
#include "test_support.hpp"

using namespace probagen;
using namespace probagen::testing;

namespace {

SymbolId id(const ProbabilisticTransitionSystem& pts, const std::string& activity) {
  return *pts.activity_id({activity, Lifecycle::complete()});
}

double prob(const NextActivityDistribution& d, SymbolId s) {
  for (const auto& [sym, p] : d.next)
    if (sym == s) return p;
  return 0.0;
}

EventLog abc_log() { return log_of({{"A", "B"}, {"A", "B"}, {"A", "C"}}); }

EventLog random_log(std::uint32_t seed, std::size_t n_traces) {
  std::mt19937 g(seed);
  std::vector<Trace> traces;
  const std::vector<std::string> acts{"a", "b", "c", "d"};
  const std::vector<std::string> people{"p", "q", "r"};
  for (std::size_t i = 0; i < n_traces; ++i) {
    std::vector<Event> evs;
    double h = static_cast<double>(i) * 1.5;
    const std::size_t len = 1 + g() % 6;
    for (std::size_t j = 0; j < len; ++j) {
      Event e = event("", acts[g() % acts.size()], h, g() % 4 == 0 ? std::nullopt
                                                                     : std::optional<std::string>(people[g() % 3]));
      if (g() % 2) e.attributes["amount"] = static_cast<double>(g() % 3);
      if (g() % 3 == 0) e.lifecycle = Lifecycle::start();
      evs.push_back(e);
      h += 0.25 * static_cast<double>(1 + g() % 8);
    }
    traces.push_back(trace_of("t" + std::to_string(i), evs));
  }
  return EventLog(traces);
}

void expect_rows_normalized(const PerspectiveTable& table) {
  for (const auto& [state, by_next] : table.rows)
    for (const auto& [next, counts] : by_next) {
      Count total = 0;
      for (const auto& [v, c] : counts) {
        EXPECT_GT(c, 0u);
        total += c;
      }
      EXPECT_GT(total, 0u);
    }
}

}  // namespace

TEST(Discover, FrequencyCountsGiveTransitionProbabilities) {
  const auto pts = discover(abc_log(), 1);
  const auto d = next_activity_distribution(pts, {id(pts, "A")});
  EXPECT_NEAR(prob(d, id(pts, "B")), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(prob(d, id(pts, "C")), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(d.end_probability, 0.0);
  EXPECT_EQ(d.backoff_steps, 0u);

  const auto start = next_activity_distribution(pts, {});
  EXPECT_DOUBLE_EQ(prob(start, id(pts, "A")), 1.0);
}

TEST(Discover, SingleTraceLog) {
  const auto pts = discover(log_of({{"A", "B"}}), 1);
  EXPECT_DOUBLE_EQ(prob(next_activity_distribution(pts, {id(pts, "A")}), id(pts, "B")), 1.0);
  EXPECT_EQ(pts.cf.final_states, (std::set<CfState>{{id(pts, "B")}}));
  EXPECT_DOUBLE_EQ(next_activity_distribution(pts, {id(pts, "B")}).end_probability, 1.0);
  EXPECT_EQ(pts.temporal.inter_arrival, FittedDistribution::constant(0.0));
  ASSERT_EQ(pts.warnings.size(), 1u);
  EXPECT_NE(pts.warnings[0].find("single trace"), std::string::npos);
}

TEST(Discover, ConstantGapsFitConstant) {
  // gap = 1/60 h = 60 s between every pair of consecutive events
  const auto pts = discover(log_of({{"A", "B"}, {"A", "B"}, {"A", "B", "B"}}, 1.0 / 60.0, 5.0), 1);
  EXPECT_EQ(pts.temporal.per_activity.at(id(pts, "B")), FittedDistribution::constant(60.0));
  EXPECT_FALSE(pts.temporal.per_activity.contains(id(pts, "A")));
  EXPECT_EQ(pts.temporal.inter_arrival, FittedDistribution::constant(5.0 * 3600.0));
}

TEST(Discover, EmptyLogAndZeroKRejected) {
  EXPECT_THROW(discover(EventLog{}, 1), InputError);
  EXPECT_THROW(discover(abc_log(), 0), InputError);
}

TEST(Discover, LifecycleIsPartOfTheSymbol) {
  auto log = EventLog({trace_of("x", {event("", "A", 0, {}, Lifecycle::start()), event("", "A", 1)})});
  const auto pts = discover(log, 1);
  EXPECT_EQ(pts.activities.size(), 2u);
  EXPECT_TRUE(pts.activity_id({"A", Lifecycle::start()}));
  EXPECT_TRUE(pts.activity_id({"A", Lifecycle::complete()}));
}

TEST(NextActivity, BacksOffToLongestSeenSuffix) {
  const auto pts = discover(log_of({{"X", "Z"}, {"Y", "W"}}), 2);
  const CfState unseen{id(pts, "X"), id(pts, "Y")};
  ASSERT_FALSE(pts.cf.rows.contains(unseen));
  const auto d = next_activity_distribution(pts, unseen);
  EXPECT_EQ(d.matched_state, (CfState{id(pts, "Y")}));
  EXPECT_EQ(d.backoff_steps, 1u);
  EXPECT_DOUBLE_EQ(prob(d, id(pts, "W")), 1.0);
}

TEST(NextActivity, NoBackoffWhenKCoversLongestTrace) {
  const auto log = random_log(3, 40);
  std::size_t longest = 0;
  for (const auto& t : log.traces()) longest = std::max(longest, t.events.size());
  const auto pts = discover(log, longest);
  EXPECT_EQ(pts.longest_trace, longest);
  for (const auto& t : log.traces()) {
    CfState state;
    for (const auto& e : t.events) {
      const auto d = next_activity_distribution(pts, state);
      EXPECT_EQ(d.backoff_steps, 0u);
      const SymbolId s = *pts.activity_id({e.activity, e.lifecycle});
      EXPECT_GT(prob(d, s), 0.0);
      state.push_back(s);
    }
    EXPECT_GT(next_activity_distribution(pts, state).end_probability, 0.0);
  }
}

TEST(Invariants, ProbabilitiesSumToOneAndArePositive) {
  for (std::size_t k : {1u, 2u, 3u}) {
    const auto pts = discover(random_log(5, 60), k);
    for (const auto& [state, row] : pts.cf.rows) {
      EXPECT_LE(state.size(), k);
      const auto d = next_activity_distribution(pts, state);
      double total = d.end_probability;
      for (const auto& [sym, p] : d.next) {
        EXPECT_GT(p, 0.0);
        total += p;
      }
      EXPECT_NEAR(total, 1.0, 1e-9);
      EXPECT_EQ(row.end > 0, pts.cf.final_states.contains(state));
    }
    expect_rows_normalized(pts.res);
    expect_rows_normalized(pts.attr);
    for (std::size_t s = 0; s < pts.activities.size(); ++s) {
      bool non_initial = false;
      for (const auto& [state, row] : pts.cf.rows)
        if (!state.empty() && row.next.contains(static_cast<SymbolId>(s))) non_initial = true;
      if (non_initial) EXPECT_TRUE(pts.temporal.per_activity.contains(static_cast<SymbolId>(s)));
    }
  }
}

TEST(Lookup, ResourceConditionedOnWindowThenActivity) {
  auto log = EventLog({trace_of("a", {event("", "A", 0, "ann"), event("", "B", 1, "bob")}),
                       trace_of("b", {event("", "A", 2, "cat"), event("", "B", 3, "dan")})});
  const auto pts = discover(log, 1);
  auto res_id = [&](const std::string& r) {
    return static_cast<SymbolId>(std::find(pts.resources.begin(), pts.resources.end(), std::optional(r)) -
                                 pts.resources.begin());
  };
  const PerspectiveState after_ann{{id(pts, "A"), res_id("ann")}};
  const auto hit = lookup_values(pts.res, after_ann, id(pts, "B"), "B");
  ASSERT_TRUE(hit.counts);
  EXPECT_EQ(hit.window_length, 1u);
  EXPECT_EQ(*hit.counts, (Counts{{res_id("bob"), 1}}));

  const PerspectiveState unseen{{id(pts, "B"), res_id("ann")}};
  const auto fallback = lookup_values(pts.res, unseen, id(pts, "B"), "B");
  ASSERT_TRUE(fallback.counts);
  EXPECT_EQ(*fallback.counts, (Counts{{res_id("bob"), 1}, {res_id("dan"), 1}}));
}

TEST(Serialization, RoundTripAndByteStability) {
  const auto pts = discover(random_log(9, 30), 2);
  const std::string bytes = serialize(pts);
  EXPECT_EQ(deserialize(bytes), pts);
  EXPECT_EQ(serialize(deserialize(bytes)), bytes);
  EXPECT_EQ(serialize(discover(random_log(9, 30), 2)), bytes);
  EXPECT_EQ(deserialize(io::gzip_compress(bytes)), pts);

  const auto abc = discover(abc_log(), 1);
  EXPECT_EQ(deserialize(serialize(abc)), abc);
}

TEST(Serialization, TruncatedOrWrongVersionRejected) {
  const std::string bytes = serialize(discover(abc_log(), 1));
  EXPECT_THROW(deserialize(bytes.substr(0, bytes.size() / 2)), ParseError);
  auto j = nlohmann::json::parse(bytes);
  j["version"] = kModelFormatVersion + 1;
  EXPECT_THROW(pts_from_json(j), ParseError);
  j["version"] = kModelFormatVersion;
  j["format"] = "something-else";
  EXPECT_THROW(pts_from_json(j), ParseError);
}

TEST(Serialization, ModelFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "probagen_pts";
  std::filesystem::create_directories(dir);
  const auto pts = discover(random_log(2, 10), 1);
  save_model(dir / "m.pts.json.gz", pts);
  std::ifstream raw(dir / "m.pts.json.gz", std::ios::binary);
  const std::string bytes{std::istreambuf_iterator<char>(raw), {}};
  EXPECT_TRUE(io::is_gzip(bytes));
  EXPECT_EQ(load_model(dir / "m.pts.json.gz"), pts);
}
