#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "probagen/assignment.hpp"
#include "probagen/errors.hpp"
#include "probagen/metrics_similarity.hpp"
#include "probagen/roles.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace probagen;
using namespace probagen::testing;

namespace {

EventLog reversed_order(const EventLog& log) {
  auto traces = log.traces();
  std::reverse(traces.begin(), traces.end());
  return EventLog(traces);
}

// Events at the given (hour offset from Monday 00:00, resource) pairs, one trace each.
EventLog at(const std::vector<std::pair<double, std::string>>& points) {
  std::vector<Trace> traces;
  for (std::size_t i = 0; i < points.size(); ++i)
    traces.push_back(trace_of("e" + std::to_string(i), {event("", "A", points[i].first, points[i].second)}));
  return EventLog(traces);
}

}  // namespace

TEST(Assignment, LevenshteinMatchesOracle) {
  std::mt19937 g(1);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::uint32_t> a(g() % 7);
    std::vector<std::uint32_t> b(g() % 7);
    std::vector<std::string> sa;
    std::vector<std::string> sb;
    for (auto& x : a) sa.push_back(std::to_string(x = g() % 3));
    for (auto& x : b) sb.push_back(std::to_string(x = g() % 3));
    EXPECT_EQ(levenshtein(a, b), edit_distance_oracle(sa, sb));
  }
  EXPECT_EQ(normalized_levenshtein(std::vector<std::uint32_t>{}, std::vector<std::uint32_t>{}), 0.0);
}

TEST(Assignment, TransportMatchesPermutationSearch) {
  std::mt19937 g(2);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + g() % 6;
    CostMatrix c{n, n, std::vector<double>(n * n)};
    for (auto& v : c.values) v = static_cast<double>(g() % 100) / 10.0;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = 1e300;
    do {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += c(i, perm[i]);
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_NEAR(assignment_cost(c), best, 1e-9);
  }
  CostMatrix bad{1, 1, {-1.0}};
  EXPECT_THROW(assignment_cost(bad), InputError);
  const std::vector<std::size_t> s{2};
  const std::vector<std::size_t> d{1};
  EXPECT_THROW(min_cost_transport(s, d, CostMatrix{1, 1, {0.0}}), InputError);
}

TEST(Cfld, Examples) {
  const auto a = log_of({{"A", "B"}, {"A", "C"}});
  EXPECT_EQ(cfld(a, a), 0.0);
  EXPECT_DOUBLE_EQ(cfld(log_of({{"A"}}), log_of({{"B"}})), 1.0);
  EXPECT_DOUBLE_EQ(cfld_oracle(a, log_of({{"A", "B"}, {"A", "B"}})), 0.25);
  EXPECT_DOUBLE_EQ(cfld(a, log_of({{"A", "B"}, {"A", "B"}})), 0.25);
  EXPECT_THROW(cfld(EventLog{}, a), InputError);
}

TEST(Cfld, UnequalSizesPadWithEmptyTraces) {
  const auto a = log_of({{"A", "B"}, {"A", "B"}, {"C"}});
  const auto b = log_of({{"A", "B"}});
  EXPECT_DOUBLE_EQ(cfld(a, b), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(cfld(a, b), cfld_oracle(a, b));
}

TEST(Cfld, MatchesBruteForceOnRandomLogs) {
  std::mt19937 g(3);
  for (int trial = 0; trial < 60; ++trial) {
    const auto a = random_log(g, 6);
    const auto b = random_log(g, 6);
    const double expected = cfld_oracle(a, b);
    EXPECT_NEAR(cfld(a, b), expected, 1e-12);
    EXPECT_NEAR(cfld(b, a, 3), expected, 1e-12);
  }
}

TEST(Ngram, Examples) {
  const auto a = log_of({{"A", "B"}, {"B", "C", "A"}});
  EXPECT_EQ(ngram_distance(a, a, 2), 0.0);
  EXPECT_EQ(ngram_distance(a, a, 3), 0.0);
  EXPECT_DOUBLE_EQ(ngram_distance(log_of({{"A", "B"}}), log_of({{"X", "Y"}}), 2), 1.0);
  // Padded 2-grams: {▷A, AB, B◁} vs {▷A, AC, C◁}, each at 1/3; half L1 = (4 * 1/3) / 2.
  EXPECT_DOUBLE_EQ(ngram_distance(log_of({{"A", "B"}}), log_of({{"A", "C"}}), 2), 2.0 / 3.0);
  // 3-grams: {▷▷A, ▷AB, AB◁, B◁◁} vs {▷▷A, ▷AC, AC◁, C◁◁}: 3 of 4 differ.
  EXPECT_DOUBLE_EQ(ngram_distance(log_of({{"A", "B"}}), log_of({{"A", "C"}}), 3), 0.75);
  EXPECT_THROW(ngram_distance(a, a, 0), InputError);
}

TEST(Ngram, MatchesEnumeration) {
  std::mt19937 g(12);
  for (int i = 0; i < 40; ++i) {
    const auto a = random_log(g, 6);
    const auto b = random_log(g, 6);
    for (std::size_t n : {1u, 2u, 3u}) EXPECT_NEAR(ngram_distance(a, b, n), ngram_oracle(a, b, n), 1e-12);
  }
}

TEST(TimeMetrics, ShiftInvariance) {
  std::mt19937 g(4);
  const auto a = random_log(g, 8);
  std::vector<Trace> shifted = a.traces();
  for (auto& t : shifted)
    for (auto& e : t.events) e.timestamp += std::chrono::hours(1);
  const EventLog b(shifted);
  EXPECT_EQ(aed(a, b), 0.0);
  EXPECT_EQ(red(a, b), 0.0);
  EXPECT_EQ(ctd(a, b), 0.0);
  EXPECT_EQ(car(a, b), 0.0);
}

TEST(TimeMetrics, CycleTimePointMasses) {
  EXPECT_DOUBLE_EQ(ctd(log_of({{"A", "B"}}, 2.0), log_of({{"A", "B"}}, 4.0)), 2.0);
  // RED: relative times {0,2} vs {0,4}.
  EXPECT_DOUBLE_EQ(red(log_of({{"A", "B"}}, 2.0), log_of({{"A", "B"}}, 4.0)), 1.0);
  EXPECT_THROW(car(log_of({{"A"}}), log_of({{"A"}, {"B"}})), InputError);
}

TEST(TimeMetrics, BinningFloorsHours) {
  MetricOptions opt;
  opt.time_bin_hours = 1.0;
  EXPECT_DOUBLE_EQ(ctd(log_of({{"A", "B"}}, 2.2), log_of({{"A", "B"}}, 2.9)), 0.7);
  EXPECT_DOUBLE_EQ(ctd(log_of({{"A", "B"}}, 2.2), log_of({{"A", "B"}}, 2.9), opt), 0.0);
}

TEST(Ced, Examples) {
  const auto mon9 = at({{9, "p"}});
  EXPECT_EQ(ced(mon9, mon9), 0.0);
  EXPECT_DOUBLE_EQ(ced(mon9, at({{17, "p"}})), 8.0 / 7.0);
  EXPECT_DOUBLE_EQ(ced(mon9, at({{24 + 9, "p"}})), 48.0 / 7.0);
  // Two weeks apart, same weekday and hour.
  EXPECT_EQ(ced(mon9, at({{24 * 14 + 9, "p"}})), 0.0);
}

TEST(Cwd, Examples) {
  const auto a = at({{9, "r1"}, {9.5, "r2"}, {24 + 10, "r3"}});
  EXPECT_EQ(cwd(a, a), 0.0);
  EXPECT_DOUBLE_EQ(cwd(a, at({{24 + 10, "r3"}})), 2.0 / 168.0);
  // Two resources every Monday 09:00 for two weeks averages to 2 per week.
  const auto two_weeks = at({{9, "r1"}, {9, "r2"}, {24 * 7 + 9, "r1"}, {24 * 7 + 9.2, "r2"}, {24 * 7 + 24 + 10, "r3"}});
  EXPECT_DOUBLE_EQ(cwd(two_weeks, at({{24 + 10, "r3"}})), (2.0 + 0.5) / 168.0);
  const auto renamed = at({{9, "x"}, {9.5, "y"}, {24 + 10, "z"}});
  EXPECT_EQ(cwd(a, renamed), 0.0);
}

TEST(Hwd, Examples) {
  auto xy = [](const std::string& id, double h) {
    return trace_of(id, {event("", "A", h, "x"), event("", "B", h + 1, "y")});
  };
  const EventLog a({xy("1", 0), xy("2", 5), xy("3", 10)});
  const EventLog b({xy("1", 0)});
  EXPECT_EQ(hwd(a, a), 0.0);
  EXPECT_EQ(hwd(a, b), 2.0);
}

TEST(Hwd, ReversalCountsAsymmetry) {
  std::mt19937 g(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_log(g, 8);
    std::vector<Trace> rev;
    for (const auto& t : a.traces()) {
      Trace r = t;
      const auto last = t.events.back().timestamp;
      const auto first = t.events.front().timestamp;
      for (std::size_t i = 0; i < t.events.size(); ++i) {
        r.events[i] = t.events[t.events.size() - 1 - i];
        r.events[i].timestamp = first + (last - t.events[t.events.size() - 1 - i].timestamp);
      }
      rev.push_back(r);
    }
    const auto hw = handover_counts(a);
    double expected = 0.0;
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& [p, n] : hw) pairs.insert(p), pairs.insert({p.second, p.first});
    for (const auto& p : pairs) {
      const auto f = hw.find(p);
      const auto r = hw.find({p.second, p.first});
      const double fwd = f == hw.end() ? 0.0 : static_cast<double>(f->second);
      const double bwd = r == hw.end() ? 0.0 : static_cast<double>(r->second);
      expected += std::abs(fwd - bwd);
    }
    EXPECT_EQ(hwd(a, EventLog(rev)), expected);
  }
}

TEST(Dad, Examples) {
  auto with = [](const std::string& key, std::vector<AttributeValue> values) {
    std::vector<Trace> traces;
    for (std::size_t i = 0; i < values.size(); ++i) {
      Event e = event("", "A", static_cast<double>(i));
      e.attributes[key] = values[i];
      traces.push_back(trace_of("t" + std::to_string(i), {e}));
    }
    return EventLog(traces);
  };
  EXPECT_DOUBLE_EQ(*dad(with("x", {0.0, 0.0}), with("x", {5.0, 5.0})), 5.0);
  const std::string g = "gold";
  const std::string s = "silver";
  const auto a = with("tier", {g, g, g, s, s});
  const auto b = with("tier", {g, g, s, s, s});
  EXPECT_EQ(*dad(a, a), 0.0);
  EXPECT_NEAR(*dad(a, b), 0.2, 1e-12);

  std::vector<std::string> notes;
  EXPECT_FALSE(dad(with("x", {1.0}), with("y", {1.0}), &notes));
  EXPECT_FALSE(notes.empty());
  notes.clear();
  EXPECT_FALSE(dad(with("x", {1.0}), with("x", {g}), &notes));
  EXPECT_FALSE(notes.empty());
}

TEST(Roles, MergesIdenticalAndSeparatesDisjoint) {
  auto log = EventLog({trace_of("1", {event("", "A", 0, "p"), event("", "B", 1, "p"), event("", "C", 2, "z")}),
                       trace_of("2", {event("", "A", 3, "q"), event("", "B", 4, "q"), event("", "C", 5, "z")})});
  const auto roles = discover_roles(log);
  ASSERT_EQ(roles.roles.size(), 2u);
  EXPECT_EQ(roles.activity_role.at("A"), roles.activity_role.at("B"));
  EXPECT_NE(roles.activity_role.at("A"), roles.activity_role.at("C"));
  EXPECT_EQ(roles.resource_role.at("p"), roles.activity_role.at("A"));
  EXPECT_EQ(roles.resource_role.at("z"), roles.activity_role.at("C"));
  EXPECT_EQ(roles.roles[0].name, "role_1");
}

TEST(Roles, MostSimilarPairMergesFirst) {
  // Originators: X = {a:9, b:1}, Y = {a:9, c:1}, Z = {a:5, d:5}.
  // cos(X,Y) = 81/82 ≈ 0.988, cos(X,Z) = cos(Y,Z) = 45/sqrt(82*50) ≈ 0.703,
  // cos(X+Y, Z) = 90/sqrt(326*50) ≈ 0.705.
  std::vector<Trace> traces;
  int n = 0;
  auto add = [&](const std::string& act, const std::string& res, int times) {
    for (int i = 0; i < times; ++i, ++n)
      traces.push_back(trace_of("t" + std::to_string(n), {event("", act, n, res)}));
  };
  add("X", "a", 9), add("X", "b", 1), add("Y", "a", 9), add("Y", "c", 1), add("Z", "a", 5), add("Z", "d", 5);
  const EventLog log(traces);
  EXPECT_NEAR(cosine_similarity({{"a", 9}, {"b", 1}}, {{"a", 9}, {"c", 1}}), 81.0 / 82.0, 1e-12);

  const auto strict = discover_roles(log, 0.8);
  ASSERT_EQ(strict.roles.size(), 2u);
  EXPECT_EQ(strict.activity_role.at("X"), strict.activity_role.at("Y"));
  EXPECT_NE(strict.activity_role.at("X"), strict.activity_role.at("Z"));

  // At 0.7 the merged X+Y (0.705) then absorbs Z, although X and Z alone (0.703) would too.
  EXPECT_EQ(discover_roles(log, 0.7).roles.size(), 1u);
  EXPECT_EQ(discover_roles(log, 0.99).roles.size(), 3u);
}

TEST(Rbced, Examples) {
  RoleAssignment roles;
  roles.roles = {{"role_1", {"A"}, {"p"}}, {"role_2", {"B"}, {"q"}}};
  roles.activity_role = {{"A", 0}, {"B", 1}};
  roles.resource_role = {{"p", 0}, {"q", 1}};
  auto log = [](double q_hour) {
    return EventLog({trace_of("1", {event("", "A", 9, "p"), event("", "B", q_hour, "q")})});
  };
  EXPECT_EQ(rbced(log(10), log(10), roles), 0.0);
  const double x = ced(at({{10, "q"}}), at({{14, "q"}}));
  EXPECT_DOUBLE_EQ(x, 4.0 / 7.0);
  EXPECT_DOUBLE_EQ(rbced(log(10), log(14), roles), x / 2.0);

  RoleAssignment single;
  single.roles = {{"role_1", {"A", "B"}, {"p", "q"}}};
  single.activity_role = {{"A", 0}, {"B", 0}};
  single.resource_role = {{"p", 0}, {"q", 0}};
  EXPECT_DOUBLE_EQ(rbced(log(10), log(14), single), ced(log(10), log(14)));
}

TEST(Rbced, UnseenResourcesMapByActivity) {
  RoleAssignment roles;
  roles.roles = {{"role_1", {"A"}, {"p"}}, {"role_2", {"B"}, {"q"}}};
  roles.activity_role = {{"A", 0}, {"B", 1}};
  roles.resource_role = {{"p", 0}, {"q", 1}};
  auto log = EventLog({trace_of("1", {event("", "B", 1, "new"), event("", "B", 2, "new"), event("", "A", 3, "new"),
                                      event("", "C", 4, "ghost")})});
  std::vector<std::string> unmapped;
  const auto m = map_resources_to_roles(log, roles, &unmapped);
  EXPECT_EQ(m.at("new"), 1u);
  EXPECT_FALSE(m.contains("ghost"));
  EXPECT_EQ(unmapped, std::vector<std::string>{"ghost"});
}

TEST(Properties, IdentitySymmetryAndReorderInvariance) {
  std::mt19937 g(6);
  for (int trial = 0; trial < 15; ++trial) {
    const auto a = random_log(g, 7);
    const auto b = random_log(g, 7);
    const auto roles = discover_roles(a);
    using Metric = std::function<double(const EventLog&, const EventLog&)>;
    const std::vector<std::pair<std::string, Metric>> metrics{
        {"cfld", [](auto& x, auto& y) { return cfld(x, y); }},
        {"2gram", [](auto& x, auto& y) { return ngram_distance(x, y, 2); }},
        {"3gram", [](auto& x, auto& y) { return ngram_distance(x, y, 3); }},
        {"aed", [](auto& x, auto& y) { return aed(x, y); }},
        {"red", [](auto& x, auto& y) { return red(x, y); }},
        {"ced", [](auto& x, auto& y) { return ced(x, y); }},
        {"ctd", [](auto& x, auto& y) { return ctd(x, y); }},
        {"car", [](auto& x, auto& y) { return car(x, y); }},
        {"cwd", [](auto& x, auto& y) { return cwd(x, y); }},
        {"hwd", [](auto& x, auto& y) { return hwd(x, y); }},
        {"dad", [](auto& x, auto& y) { return *dad(x, y); }},
        {"rbced", [&](auto& x, auto& y) { return rbced(x, y, roles); }},
    };
    for (const auto& [name, m] : metrics) {
      EXPECT_EQ(m(a, a), 0.0) << name;
      const double ab = m(a, b);
      EXPECT_GE(ab, 0.0) << name;
      EXPECT_NEAR(ab, m(b, a), 1e-9) << name;
      EXPECT_NEAR(ab, m(reversed_order(a), b), 1e-9) << name;
    }
    EXPECT_LE(cfld(a, b), 1.0);
    EXPECT_LE(ngram_distance(a, b, 2), 1.0);
  }
}

TEST(EvaluateAll, SelfComparisonAndInapplicableMetrics) {
  std::mt19937 g(7);
  const auto real = random_log(g, 8);
  const auto self = evaluate_all(real, real);
  for (const auto* v : {&self.cfld, &self.two_gram, &self.three_gram, &self.aed, &self.red, &self.ced, &self.ctd,
                        &self.car, &self.rbced, &self.cwd, &self.hwd, &self.dad}) {
    ASSERT_TRUE(*v);
    EXPECT_EQ(**v, 0.0);
  }

  const auto bare = random_log(g, 8, false);
  const auto r = evaluate_all(real, bare);
  EXPECT_FALSE(r.rbced);
  EXPECT_FALSE(r.cwd);
  EXPECT_FALSE(r.hwd);
  EXPECT_TRUE(r.notes.contains("hwd"));
  ASSERT_TRUE(r.cfld);
  EXPECT_DOUBLE_EQ(*r.cfld, cfld(real, bare));
  EXPECT_DOUBLE_EQ(*r.ced, ced(real, bare));
  EXPECT_DOUBLE_EQ(*r.three_gram, ngram_distance(real, bare, 3));

  const auto back = metric_report_from_json(to_json(r));
  EXPECT_EQ(to_json(back), to_json(r));
  const std::string table = format_metric_table({{"bare", r}});
  EXPECT_NE(table.find("CFLD"), std::string::npos);
  EXPECT_NE(table.find("DAD"), std::string::npos);
}
