#include "probagen/metrics_similarity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "probagen/assignment.hpp"
#include "probagen/distfit.hpp"
#include "probagen/errors.hpp"
#include "probagen/parallel.hpp"

namespace probagen {

namespace {

void require_non_empty(const EventLog& a, const EventLog& b, const char* metric) {
  if (a.empty() || b.empty()) throw InputError(std::string(metric) + " needs two non-empty logs");
}

/// Activity labels of both logs mapped to ids starting at `first_id`.
class Alphabet {
 public:
  explicit Alphabet(std::uint32_t first_id) : next_(first_id) {}

  std::vector<std::uint32_t> encode(const Trace& t) {
    std::vector<std::uint32_t> out;
    out.reserve(t.events.size());
    for (const auto& e : t.events) {
      auto [it, inserted] = ids_.try_emplace(e.activity, next_);
      if (inserted) ++next_;
      out.push_back(it->second);
    }
    return out;
  }

 private:
  std::map<std::string, std::uint32_t> ids_;
  std::uint32_t next_;
};

using Variants = std::map<std::vector<std::uint32_t>, std::size_t>;

Variants variants(const EventLog& log, Alphabet& alphabet) {
  Variants v;
  for (const auto& t : log.traces()) ++v[alphabet.encode(t)];
  return v;
}

double bin(double hours, const MetricOptions& opt) {
  if (!opt.time_bin_hours) return hours;
  return std::floor(hours / *opt.time_bin_hours) * *opt.time_bin_hours;
}

std::vector<double> binned(std::vector<double> xs, const MetricOptions& opt) {
  for (double& x : xs) x = bin(x, opt);
  return xs;
}

std::vector<double> log_relative_hours(const EventLog& log) {
  std::vector<double> out;
  for (const auto& t : log.traces())
    for (const auto& e : t.events) out.push_back(to_hours(e.timestamp - log.epoch()));
  return out;
}

std::vector<double> case_relative_hours(const EventLog& log) {
  std::vector<double> out;
  for (const auto& t : log.traces())
    for (const auto& e : t.events) out.push_back(to_hours(e.timestamp - t.start()));
  return out;
}

std::vector<double> cycle_hours(const EventLog& log) {
  std::vector<double> out;
  for (const auto& t : log.traces()) out.push_back(to_hours(t.duration()));
  return out;
}

std::vector<double> arrival_hours(const EventLog& log) {
  std::vector<double> out;
  for (Millis gap : inter_arrival_times(log)) out.push_back(to_hours(gap));
  return out;
}

std::vector<Timestamp> all_timestamps(const EventLog& log) {
  std::vector<Timestamp> out;
  for (const auto& t : log.traces())
    for (const auto& e : t.events) out.push_back(e.timestamp);
  return out;
}

constexpr std::size_t kWeekBuckets = 7 * 24;

std::array<double, kWeekBuckets> weekly_active_resources(const EventLog& log) {
  std::map<std::int64_t, std::set<std::string>> by_hour;
  std::optional<Timestamp> first;
  std::optional<Timestamp> last;
  for (const auto& t : log.traces())
    for (const auto& e : t.events) {
      if (!e.resource) continue;
      by_hour[std::chrono::floor<std::chrono::hours>(e.timestamp).time_since_epoch().count()].insert(*e.resource);
      if (!first || e.timestamp < *first) first = e.timestamp;
      if (!last || e.timestamp > *last) last = e.timestamp;
    }
  std::array<double, kWeekBuckets> buckets{};
  if (!first) return buckets;
  for (const auto& [hour, resources] : by_hour) {
    const Timestamp slot{Millis(hour * kMillisPerHour)};
    const std::size_t b = weekday_index(slot) * 24 + static_cast<std::size_t>(hour_of_day(slot));
    buckets[b] += static_cast<double>(resources.size());
  }
  const auto weeks = static_cast<double>(week_index(*last) - week_index(*first) + 1);
  for (double& v : buckets) v /= weeks;
  return buckets;
}

std::string format_value(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace

double cfld(const EventLog& a, const EventLog& b, std::size_t workers) {
  require_non_empty(a, b, "CFLD");
  Alphabet alphabet(0);
  Variants va = variants(a, alphabet);
  Variants vb = variants(b, alphabet);

  // Pad the smaller side with empty sequences so the problem is balanced.
  if (a.size() < b.size()) va[{}] += b.size() - a.size();
  if (b.size() < a.size()) vb[{}] += a.size() - b.size();

  std::vector<const std::vector<std::uint32_t>*> rows;
  std::vector<const std::vector<std::uint32_t>*> cols;
  std::vector<std::size_t> supply;
  std::vector<std::size_t> demand;
  for (const auto& [seq, n] : va) {
    rows.push_back(&seq);
    supply.push_back(n);
  }
  for (const auto& [seq, n] : vb) {
    cols.push_back(&seq);
    demand.push_back(n);
  }

  CostMatrix cost{rows.size(), cols.size(), std::vector<double>(rows.size() * cols.size())};
  parallel_for(rows.size(), workers, [&](std::size_t i) {
    for (std::size_t j = 0; j < cols.size(); ++j)
      cost.values[i * cols.size() + j] = normalized_levenshtein(*rows[i], *cols[j]);
  });
  const double total = min_cost_transport(supply, demand, cost).cost;
  return total / static_cast<double>(std::max(a.size(), b.size()));
}

double ngram_distance(const EventLog& a, const EventLog& b, std::size_t n) {
  require_non_empty(a, b, "n-gram distance");
  if (n == 0) throw InputError("n-gram size must be positive");
  constexpr std::uint32_t kStart = 0;
  constexpr std::uint32_t kEnd = 1;
  Alphabet alphabet(2);

  auto count = [&](const EventLog& log) {
    std::map<std::vector<std::uint32_t>, double> grams;
    double total = 0.0;
    for (const auto& t : log.traces()) {
      std::vector<std::uint32_t> padded(n - 1, kStart);
      const auto body = alphabet.encode(t);
      padded.insert(padded.end(), body.begin(), body.end());
      padded.insert(padded.end(), n - 1, kEnd);
      for (std::size_t i = 0; i + n <= padded.size(); ++i) {
        grams[std::vector<std::uint32_t>(padded.begin() + static_cast<std::ptrdiff_t>(i),
                                         padded.begin() + static_cast<std::ptrdiff_t>(i + n))] += 1.0;
        total += 1.0;
      }
    }
    for (auto& [g, c] : grams) c /= total;
    return grams;
  };
  const auto fa = count(a);
  const auto fb = count(b);

  double l1 = 0.0;
  for (const auto& [g, p] : fa) {
    auto it = fb.find(g);
    l1 += std::abs(p - (it == fb.end() ? 0.0 : it->second));
  }
  for (const auto& [g, p] : fb)
    if (!fa.count(g)) l1 += p;
  return std::min(1.0, 0.5 * l1);
}

double aed(const EventLog& a, const EventLog& b, const MetricOptions& opt) {
  require_non_empty(a, b, "AED");
  return wasserstein_1d(binned(log_relative_hours(a), opt), binned(log_relative_hours(b), opt));
}

double red(const EventLog& a, const EventLog& b, const MetricOptions& opt) {
  require_non_empty(a, b, "RED");
  return wasserstein_1d(binned(case_relative_hours(a), opt), binned(case_relative_hours(b), opt));
}

double ctd(const EventLog& a, const EventLog& b, const MetricOptions& opt) {
  require_non_empty(a, b, "CTD");
  return wasserstein_1d(binned(cycle_hours(a), opt), binned(cycle_hours(b), opt));
}

double car(const EventLog& a, const EventLog& b, const MetricOptions& opt) {
  if (a.size() < 2 || b.size() < 2) throw InputError("CAR needs at least two traces in each log");
  return wasserstein_1d(binned(arrival_hours(a), opt), binned(arrival_hours(b), opt));
}

double ced(const std::vector<Timestamp>& a, const std::vector<Timestamp>& b, const MetricOptions& opt) {
  std::array<std::vector<double>, 7> ha;
  std::array<std::vector<double>, 7> hb;
  for (Timestamp t : a) ha[weekday_index(t)].push_back(bin(hour_of_day(t), opt));
  for (Timestamp t : b) hb[weekday_index(t)].push_back(bin(hour_of_day(t), opt));
  double total = 0.0;
  for (std::size_t d = 0; d < 7; ++d) {
    if (ha[d].empty() && hb[d].empty()) continue;
    if (ha[d].empty() || hb[d].empty())
      total += kCircadianPenalty;
    else
      total += wasserstein_1d(ha[d], hb[d]);
  }
  return total / 7.0;
}

double ced(const EventLog& a, const EventLog& b, const MetricOptions& opt) {
  require_non_empty(a, b, "CED");
  return ced(all_timestamps(a), all_timestamps(b), opt);
}

double cwd(const EventLog& a, const EventLog& b) {
  if (!a.has_resources() || !b.has_resources()) throw InputError("CWD needs resources in both logs");
  const auto wa = weekly_active_resources(a);
  const auto wb = weekly_active_resources(b);
  double total = 0.0;
  for (std::size_t i = 0; i < kWeekBuckets; ++i) total += std::abs(wa[i] - wb[i]);
  return total / static_cast<double>(kWeekBuckets);
}

double rbced(const EventLog& a, const EventLog& b, const RoleAssignment& roles, const MetricOptions& opt,
             std::vector<std::string>* notes) {
  if (roles.roles.empty()) throw InputError("RBCED needs at least one role");
  std::vector<std::string> unmapped;
  const auto ra = map_resources_to_roles(a, roles, &unmapped);
  const auto rb = map_resources_to_roles(b, roles, &unmapped);
  if (notes && !unmapped.empty()) {
    std::sort(unmapped.begin(), unmapped.end());
    unmapped.erase(std::unique(unmapped.begin(), unmapped.end()), unmapped.end());
    std::string msg = "resources without a role were ignored:";
    for (const auto& r : unmapped) msg += " " + r;
    notes->push_back(msg);
  }

  auto split = [&](const EventLog& log, const std::map<std::string, std::size_t>& mapping) {
    std::vector<std::vector<Timestamp>> per_role(roles.roles.size());
    for (const auto& t : log.traces())
      for (const auto& e : t.events) {
        if (!e.resource) continue;
        if (auto it = mapping.find(*e.resource); it != mapping.end()) per_role[it->second].push_back(e.timestamp);
      }
    return per_role;
  };
  const auto sa = split(a, ra);
  const auto sb = split(b, rb);
  double total = 0.0;
  for (std::size_t r = 0; r < roles.roles.size(); ++r) total += ced(sa[r], sb[r], opt);
  return total / static_cast<double>(roles.roles.size());
}

double hwd(const EventLog& a, const EventLog& b) {
  if (!a.has_resources() || !b.has_resources()) throw InputError("HWD needs resources in both logs");
  const auto ha = handover_counts(a);
  const auto hb = handover_counts(b);
  double total = 0.0;
  for (const auto& [pair, n] : ha) {
    auto it = hb.find(pair);
    const std::size_t m = it == hb.end() ? 0 : it->second;
    total += static_cast<double>(n > m ? n - m : m - n);
  }
  for (const auto& [pair, m] : hb)
    if (!ha.count(pair)) total += static_cast<double>(m);
  return total;
}

std::optional<double> dad(const EventLog& a, const EventLog& b, std::vector<std::string>* notes) {
  auto note = [&](std::string s) {
    if (notes) notes->push_back(std::move(s));
  };
  double total = 0.0;
  std::size_t used = 0;
  for (const auto& [name, type] : a.schema()) {
    auto other = b.schema().find(name);
    if (other == b.schema().end()) {
      note("attribute '" + name + "' missing from the second log");
      continue;
    }
    if (other->second != type) {
      note("attribute '" + name + "' has different types in the two logs");
      continue;
    }
    auto pool = [&](const EventLog& log) {
      std::vector<AttributeValue> out;
      for (const auto& t : log.traces())
        for (const auto& e : t.events)
          if (auto it = e.attributes.find(name); it != e.attributes.end()) out.push_back(it->second);
      return out;
    };
    const auto va = pool(a);
    const auto vb = pool(b);
    if (va.empty() || vb.empty()) {
      note("attribute '" + name + "' has no values in one of the logs");
      continue;
    }
    if (type == AttributeType::Numeric) {
      std::vector<double> xa;
      std::vector<double> xb;
      for (const auto& v : va) xa.push_back(std::get<double>(v));
      for (const auto& v : vb) xb.push_back(std::get<double>(v));
      total += wasserstein_1d(xa, xb);
    } else {
      std::map<std::string, double> pa;
      std::map<std::string, double> pb;
      for (const auto& v : va) pa[std::get<std::string>(v)] += 1.0 / static_cast<double>(va.size());
      for (const auto& v : vb) pb[std::get<std::string>(v)] += 1.0 / static_cast<double>(vb.size());
      double l1 = 0.0;
      for (const auto& [k, p] : pa) l1 += std::abs(p - (pb.count(k) ? pb.at(k) : 0.0));
      for (const auto& [k, p] : pb)
        if (!pa.count(k)) l1 += p;
      total += 0.5 * l1;
    }
    ++used;
  }
  for (const auto& [name, type] : b.schema())
    if (!a.schema().count(name)) note("attribute '" + name + "' missing from the first log");
  if (used == 0) return std::nullopt;
  return total / static_cast<double>(used);
}

MetricReport evaluate_all(const EventLog& real, const EventLog& gen, const MetricOptions& opt) {
  require_non_empty(real, gen, "evaluation");
  MetricReport r;
  r.cfld = cfld(real, gen, opt.workers);
  r.two_gram = ngram_distance(real, gen, 2);
  r.three_gram = ngram_distance(real, gen, 3);
  r.aed = aed(real, gen, opt);
  r.red = red(real, gen, opt);
  r.ced = ced(real, gen, opt);
  r.ctd = ctd(real, gen, opt);
  if (real.size() >= 2 && gen.size() >= 2)
    r.car = car(real, gen, opt);
  else
    r.notes["car"] = "needs at least two traces in each log";

  if (real.has_resources() && gen.has_resources()) {
    std::vector<std::string> notes;
    r.rbced = rbced(real, gen, discover_roles(real, opt.role_threshold), opt, &notes);
    if (!notes.empty()) r.notes["rbced"] = notes.front();
    r.cwd = cwd(real, gen);
    r.hwd = hwd(real, gen);
  } else {
    const std::string why = real.has_resources() ? "generated log has no resources" : "real log has no resources";
    r.notes["rbced"] = r.notes["cwd"] = r.notes["hwd"] = why;
  }

  std::vector<std::string> notes;
  r.dad = dad(real, gen, &notes);
  if (!r.dad) notes.insert(notes.begin(), "no attribute shared by both logs");
  if (!notes.empty()) {
    std::string joined;
    for (const auto& n : notes) joined += (joined.empty() ? "" : "; ") + n;
    r.notes["dad"] = joined;
  }
  return r;
}

namespace {

struct Column {
  const char* key;
  const char* header;
  std::optional<double> MetricReport::*field;
};

constexpr Column kColumns[] = {
    {"cfld", "CFLD", &MetricReport::cfld},     {"two_gram", "2-Gram", &MetricReport::two_gram},
    {"three_gram", "3-Gram", &MetricReport::three_gram}, {"aed", "AED", &MetricReport::aed},
    {"red", "RED", &MetricReport::red},        {"ced", "CED", &MetricReport::ced},
    {"ctd", "CTD", &MetricReport::ctd},        {"car", "CAR", &MetricReport::car},
    {"rbced", "RBCED", &MetricReport::rbced},  {"cwd", "CWD", &MetricReport::cwd},
    {"hwd", "HWD", &MetricReport::hwd},        {"dad", "DAD", &MetricReport::dad},
};

}  // namespace

nlohmann::json to_json(const MetricReport& r) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& c : kColumns) j[c.key] = r.*c.field ? nlohmann::json(*(r.*c.field)) : nlohmann::json();
  j["notes"] = r.notes;
  return j;
}

MetricReport metric_report_from_json(const nlohmann::json& j) {
  MetricReport r;
  for (const auto& c : kColumns)
    if (j.contains(c.key) && !j.at(c.key).is_null()) r.*c.field = j.at(c.key).get<double>();
  if (j.contains("notes")) r.notes = j.at("notes").get<std::map<std::string, std::string>>();
  return r;
}

std::string format_metric_table(const std::vector<std::pair<std::string, MetricReport>>& rows) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{""};
  for (const auto& c : kColumns) header.push_back(c.header);
  cells.push_back(header);
  for (const auto& [label, r] : rows) {
    std::vector<std::string> line{label};
    for (const auto& c : kColumns) line.push_back(format_value(r.*c.field));
    cells.push_back(line);
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells)
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());

  std::ostringstream out;
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i > 0) out << (i + 1 == line.size() ? "   |  " : "  ");
      if (i == 0)
        out << line[i] << std::string(width[i] - line[i].size(), ' ');
      else
        out << std::string(width[i] - line[i].size(), ' ') << line[i];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace probagen
