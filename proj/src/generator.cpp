#include "probagen/generator.hpp"

#include <algorithm>
#include <cmath>

#include "probagen/errors.hpp"
#include "probagen/parallel.hpp"

namespace probagen {

namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kArrivalStream = 1;
constexpr std::uint64_t kTraceStream = 2;
constexpr std::uint64_t kBalanceStream = 3;

// Draws a key with probability count / total.
SymbolId draw(const Counts& counts, Rng& rng) {
  Count total = 0;
  for (const auto& [id, n] : counts) total += n;
  std::uint64_t r = rng.below(total);
  for (const auto& [id, n] : counts) {
    if (r < n) return id;
    r -= n;
  }
  return counts.rbegin()->first;
}

template <typename Window, typename Item>
void push_window(Window& w, Item item, std::size_t k) {
  w.push_back(std::move(item));
  if (w.size() > k) w.erase(w.begin());
}

std::size_t effective_cap(const ProbabilisticTransitionSystem& pts, const GenerationConfig& config) {
  if (config.max_trace_length > 0) return config.max_trace_length;
  return std::max<std::size_t>(1, 5 * pts.longest_trace);
}

}  // namespace

nlohmann::json to_json(const GenerationReport& r) {
  return {{"seed", r.seed},
          {"n_traces", r.n_traces},
          {"max_trace_length", r.max_trace_length},
          {"truncated", r.truncated},
          {"rejections", r.rejections},
          {"replaced", r.replaced},
          {"notices", r.notices}};
}

Trace generate_trace(const ProbabilisticTransitionSystem& pts, Rng& rng, Timestamp arrival, std::string case_id,
                     std::size_t max_length, bool* truncated) {
  Trace trace;
  trace.case_id = std::move(case_id);
  if (truncated) *truncated = false;

  CfState cf_window;
  PerspectiveState res_window;
  PerspectiveState attr_window;
  Timestamp now = arrival;

  while (true) {
    const auto it = pts.cf.rows.find(next_activity_distribution(pts, cf_window).matched_state);
    const CfRow& row = it->second;
    std::uint64_t r = rng.below(row.total());
    std::optional<SymbolId> next;
    for (const auto& [id, n] : row.next) {
      if (r < n) {
        next = id;
        break;
      }
      r -= n;
    }
    if (!next) break;  // landed in the end mass
    if (trace.events.size() == max_length) {
      if (truncated) *truncated = true;
      break;
    }

    const ActivityLifecycle& al = pts.activities[*next];
    Event e;
    e.case_id = trace.case_id;
    e.activity = al.activity;
    e.lifecycle = al.lifecycle;

    SymbolId res_id = 0;
    if (const auto hit = lookup_values(pts.res, res_window, *next, al.activity); hit.counts) {
      res_id = draw(*hit.counts, rng);
      e.resource = pts.resources[res_id];
    }
    SymbolId attr_id = 0;
    if (const auto hit = lookup_values(pts.attr, attr_window, *next, al.activity); hit.counts) {
      attr_id = draw(*hit.counts, rng);
      const AttributeVector& values = pts.attribute_vectors[attr_id];
      for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i]) e.attributes.emplace(pts.attribute_names[i], *values[i]);
    }

    if (!trace.events.empty()) {
      auto dist = pts.temporal.per_activity.find(*next);
      if (dist != pts.temporal.per_activity.end()) now += from_seconds(sample(dist->second, rng));
    }
    e.timestamp = now;
    trace.events.push_back(std::move(e));

    push_window(cf_window, *next, pts.k);
    push_window(res_window, std::pair{*next, res_id}, pts.k);
    push_window(attr_window, std::pair{*next, attr_id}, pts.k);
  }
  return trace;
}

std::vector<Timestamp> arrival_times(const ProbabilisticTransitionSystem& pts, const GenerationConfig& config) {
  std::vector<Timestamp> out;
  out.reserve(config.n_traces);
  Rng rng(derive_seed(config.seed, {kArrivalStream}));
  Timestamp t = config.start_time;
  for (std::size_t i = 0; i < config.n_traces; ++i) {
    if (i > 0) t += from_seconds(sample(pts.temporal.inter_arrival, rng));
    out.push_back(t);
  }
  return out;
}

EventLog generate_log(const ProbabilisticTransitionSystem& pts, const GenerationConfig& config,
                      GenerationReport* report) {
  const std::size_t cap = effective_cap(pts, config);
  const auto arrivals = arrival_times(pts, config);

  std::vector<Trace> traces(config.n_traces);
  std::vector<char> cut(config.n_traces, 0);
  parallel_for(config.n_traces, config.workers, [&](std::size_t i) {
    Rng rng(derive_seed(config.seed, {kTraceStream, i}));
    bool truncated = false;
    traces[i] = generate_trace(pts, rng, arrivals[i], "gen_" + std::to_string(i), cap, &truncated);
    cut[i] = truncated;
  });

  if (report) {
    report->seed = config.seed;
    report->n_traces = config.n_traces;
    report->max_trace_length = cap;
    for (std::size_t i = 0; i < cut.size(); ++i)
      if (cut[i]) report->truncated.push_back(i);
    report->notices.insert(report->notices.end(), pts.warnings.begin(), pts.warnings.end());
  }
  return EventLog(std::move(traces), pts.schema);
}

EventLog generate_balanced(const ProbabilisticTransitionSystem& pts, const EventLog& train,
                           const GenerationConfig& config, const BalanceConfig& balance, GenerationReport* report) {
  const std::string& target = balance.target_activity;
  if (!(balance.target_fraction > 0.0 && balance.target_fraction < 1.0))
    throw InputError("target fraction must lie strictly between 0 and 1");
  if (balance.max_rejections_per_trace == 0) throw InputError("rejection budget must be positive");
  if (train.empty()) throw InputError("cannot balance an empty log");

  const auto& traces = train.traces();
  const std::size_t have = static_cast<std::size_t>(
      std::count_if(traces.begin(), traces.end(), [&](const Trace& t) { return t.contains_activity(target); }));
  if (have == 0) throw InputError("activity '" + target + "' does not occur in the training log");
  if (std::none_of(pts.activities.begin(), pts.activities.end(),
                   [&](const ActivityLifecycle& al) { return al.activity == target; }))
    throw InputError("activity '" + target + "' is unknown to the model");

  const std::size_t n = train.size();
  const auto wanted = static_cast<std::size_t>(std::lround(balance.target_fraction * static_cast<double>(n)));
  const std::size_t cap = effective_cap(pts, config);
  if (report) {
    report->seed = config.seed;
    report->n_traces = n;
    report->max_trace_length = cap;
  }
  if (have >= wanted) {
    if (report)
      report->notices.push_back("activity '" + target + "' already occurs in " + std::to_string(have) + " of " +
                                std::to_string(n) + " traces; log returned unchanged");
    return train;
  }

  // Latest-starting traces without the activity are replaced first.
  const std::size_t need = wanted - have;
  std::vector<const Trace*> removed;
  const auto ordered = traces_by_start(train);
  for (auto it = ordered.rbegin(); it != ordered.rend() && removed.size() < need; ++it)
    if (!(*it)->contains_activity(target)) removed.push_back(*it);

  std::vector<Trace> synthetic(need);
  std::vector<std::size_t> attempts(need, 0);
  std::vector<char> cut(need, 0);
  parallel_for(need, config.workers, [&](std::size_t slot) {
    for (std::size_t attempt = 0; attempt < balance.max_rejections_per_trace; ++attempt) {
      Rng rng(derive_seed(config.seed, {kBalanceStream, slot, attempt}));
      bool truncated = false;
      Trace t = generate_trace(pts, rng, removed[slot]->start(), "syn_" + std::to_string(slot), cap, &truncated);
      attempts[slot] = attempt + 1;
      if (!t.events.empty() && t.contains_activity(target)) {
        synthetic[slot] = std::move(t);
        cut[slot] = truncated;
        return;
      }
    }
  });

  const auto failed = static_cast<std::size_t>(
      std::count_if(synthetic.begin(), synthetic.end(), [](const Trace& t) { return t.events.empty(); }));
  if (failed > 0) {
    const double achieved = static_cast<double>(have + need - failed) / static_cast<double>(n);
    throw Error("rejection budget of " + std::to_string(balance.max_rejections_per_trace) +
                " exhausted while generating traces with '" + target + "' (" + std::to_string(failed) + " of " +
                std::to_string(need) + " slots failed); achieved fraction " + std::to_string(achieved));
  }

  std::vector<Trace> out;
  out.reserve(n);
  for (const Trace* t : ordered)
    if (std::find(removed.begin(), removed.end(), t) == removed.end()) out.push_back(*t);
  for (auto& t : synthetic) out.push_back(std::move(t));

  if (report) {
    report->replaced = need;
    for (std::size_t s = 0; s < need; ++s) {
      report->rejections += attempts[s] - 1;
      if (cut[s]) report->truncated.push_back(s);
    }
  }
  return EventLog(std::move(out), train.schema());
}

}  // namespace probagen
