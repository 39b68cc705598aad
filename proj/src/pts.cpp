#include "probagen/pts.hpp"

#include <algorithm>
#include <numeric>

#include "probagen/errors.hpp"
#include "probagen/io/gzip.hpp"

namespace probagen {

namespace {

constexpr const char* kFormatName = "probagen.pts";

template <typename T>
std::vector<T> sorted_unique(std::set<T> values) {
  return std::vector<T>(values.begin(), values.end());
}

template <typename T>
SymbolId index_of(const std::vector<T>& sorted, const T& value) {
  return static_cast<SymbolId>(std::lower_bound(sorted.begin(), sorted.end(), value) - sorted.begin());
}

AttributeVector attribute_vector(const Event& e, const std::vector<std::string>& names) {
  AttributeVector v;
  v.reserve(names.size());
  for (const auto& name : names) {
    auto it = e.attributes.find(name);
    v.push_back(it == e.attributes.end() ? std::nullopt : std::optional<AttributeValue>(it->second));
  }
  return v;
}

template <typename State>
State window_before(const std::vector<typename State::value_type>& seq, std::size_t pos, std::size_t k) {
  const std::size_t begin = pos > k ? pos - k : 0;
  return State(seq.begin() + static_cast<std::ptrdiff_t>(begin), seq.begin() + static_cast<std::ptrdiff_t>(pos));
}

// --- JSON helpers -----------------------------------------------------------

nlohmann::json counts_to_json(const Counts& c) {
  auto arr = nlohmann::json::array();
  for (const auto& [id, n] : c) arr.push_back({id, n});
  return arr;
}

Counts counts_from_json(const nlohmann::json& j, std::size_t alphabet_size) {
  Counts c;
  for (const auto& pair : j) {
    const auto id = pair.at(0).get<SymbolId>();
    const auto n = pair.at(1).get<Count>();
    if (id >= alphabet_size) throw ParseError("model symbol id out of range");
    if (n == 0) throw ParseError("model contains a zero count");
    c[id] = n;
  }
  return c;
}

nlohmann::json value_to_json(const std::optional<AttributeValue>& v) {
  if (!v) return nullptr;
  if (const auto* d = std::get_if<double>(&*v)) return *d;
  return std::get<std::string>(*v);
}

std::optional<AttributeValue> value_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.is_number()) return AttributeValue(j.get<double>());
  return AttributeValue(j.get<std::string>());
}

nlohmann::json perspective_to_json(const PerspectiveTable& t) {
  auto rows = nlohmann::json::array();
  for (const auto& [state, by_next] : t.rows) {
    auto st = nlohmann::json::array();
    for (const auto& [al, v] : state) st.push_back({al, v});
    auto next = nlohmann::json::array();
    for (const auto& [al, counts] : by_next) next.push_back({al, counts_to_json(counts)});
    rows.push_back({{"state", st}, {"next", next}});
  }
  nlohmann::json global = nlohmann::json::object();
  for (const auto& [activity, counts] : t.by_activity) global[activity] = counts_to_json(counts);
  return {{"k", t.k}, {"rows", rows}, {"by_activity", global}};
}

PerspectiveTable perspective_from_json(const nlohmann::json& j, std::size_t n_activities, std::size_t n_values) {
  PerspectiveTable t;
  t.k = j.at("k").get<std::size_t>();
  for (const auto& row : j.at("rows")) {
    PerspectiveState state;
    for (const auto& p : row.at("state")) {
      const auto al = p.at(0).get<SymbolId>();
      const auto v = p.at(1).get<SymbolId>();
      if (al >= n_activities || v >= n_values) throw ParseError("model state symbol out of range");
      state.emplace_back(al, v);
    }
    if (state.size() > t.k) throw ParseError("model state longer than k");
    auto& by_next = t.rows[state];
    for (const auto& n : row.at("next")) {
      const auto al = n.at(0).get<SymbolId>();
      if (al >= n_activities) throw ParseError("model symbol id out of range");
      by_next[al] = counts_from_json(n.at(1), n_values);
    }
  }
  for (const auto& [activity, counts] : j.at("by_activity").items())
    t.by_activity[activity] = counts_from_json(counts, n_values);
  return t;
}

}  // namespace

Count CfRow::total() const {
  Count t = end;
  for (const auto& [id, n] : next) t += n;
  return t;
}

std::optional<SymbolId> ProbabilisticTransitionSystem::activity_id(const ActivityLifecycle& al) const {
  auto it = std::lower_bound(activities.begin(), activities.end(), al);
  if (it == activities.end() || *it != al) return std::nullopt;
  return static_cast<SymbolId>(it - activities.begin());
}

ProbabilisticTransitionSystem discover(const EventLog& train, std::size_t k) {
  if (train.empty()) throw InputError("cannot discover a model from an empty log");
  if (k == 0) throw InputError("history length k must be at least 1");

  ProbabilisticTransitionSystem pts;
  pts.k = k;
  pts.schema = train.schema();
  for (const auto& [name, type] : train.schema()) pts.attribute_names.push_back(name);

  std::set<ActivityLifecycle> al_set;
  std::set<std::optional<std::string>> res_set;
  std::set<AttributeVector> av_set;
  for (const auto& t : train.traces()) {
    pts.longest_trace = std::max(pts.longest_trace, t.events.size());
    for (const auto& e : t.events) {
      al_set.insert({e.activity, e.lifecycle});
      res_set.insert(e.resource);
      av_set.insert(attribute_vector(e, pts.attribute_names));
    }
  }
  pts.activities = sorted_unique(std::move(al_set));
  pts.resources = sorted_unique(std::move(res_set));
  pts.attribute_vectors = sorted_unique(std::move(av_set));

  pts.cf.k = pts.res.k = pts.attr.k = k;
  std::map<SymbolId, std::vector<double>> gaps;

  for (const auto& t : train.traces()) {
    const std::size_t n = t.events.size();
    std::vector<SymbolId> al(n);
    std::vector<std::pair<SymbolId, SymbolId>> res(n);
    std::vector<std::pair<SymbolId, SymbolId>> av(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Event& e = t.events[i];
      al[i] = index_of(pts.activities, ActivityLifecycle{e.activity, e.lifecycle});
      res[i] = {al[i], index_of(pts.resources, e.resource)};
      av[i] = {al[i], index_of(pts.attribute_vectors, attribute_vector(e, pts.attribute_names))};
      if (i > 0) gaps[al[i]].push_back(to_seconds(e.timestamp - t.events[i - 1].timestamp));
    }
    for (std::size_t i = 0; i <= n; ++i) {
      auto& row = pts.cf.rows[window_before<CfState>(al, i, k)];
      if (i == n) {
        ++row.end;
        pts.cf.final_states.insert(window_before<CfState>(al, i, k));
        continue;
      }
      ++row.next[al[i]];
      ++pts.res.rows[window_before<PerspectiveState>(res, i, k)][al[i]][res[i].second];
      ++pts.attr.rows[window_before<PerspectiveState>(av, i, k)][al[i]][av[i].second];
      ++pts.res.by_activity[t.events[i].activity][res[i].second];
      ++pts.attr.by_activity[t.events[i].activity][av[i].second];
    }
  }

  for (const auto& [id, samples] : gaps) pts.temporal.per_activity[id] = fit_best(samples);

  if (train.size() < 2) {
    pts.temporal.inter_arrival = FittedDistribution::constant(0.0);
    pts.warnings.push_back("training log has a single trace; inter-arrival time fixed at 0");
  } else {
    std::vector<double> arrivals;
    for (Millis gap : inter_arrival_times(train)) arrivals.push_back(to_seconds(gap));
    pts.temporal.inter_arrival = fit_best(arrivals);
  }
  return pts;
}

NextActivityDistribution next_activity_distribution(const ProbabilisticTransitionSystem& pts, const CfState& state) {
  NextActivityDistribution out;
  for (std::size_t drop = 0; drop <= state.size(); ++drop) {
    CfState suffix(state.begin() + static_cast<std::ptrdiff_t>(drop), state.end());
    auto it = pts.cf.rows.find(suffix);
    if (it == pts.cf.rows.end()) continue;
    const CfRow& row = it->second;
    const double total = static_cast<double>(row.total());
    for (const auto& [id, n] : row.next) out.next.emplace_back(id, static_cast<double>(n) / total);
    out.end_probability = static_cast<double>(row.end) / total;
    out.matched_state = std::move(suffix);
    out.backoff_steps = drop;
    return out;
  }
  throw Error("control-flow back-off exhausted: model has no initial state");
}

PerspectiveLookup lookup_values(const PerspectiveTable& table, const PerspectiveState& window, SymbolId next,
                                const std::string& activity) {
  for (std::size_t drop = 0; drop <= window.size(); ++drop) {
    PerspectiveState suffix(window.begin() + static_cast<std::ptrdiff_t>(drop), window.end());
    auto it = table.rows.find(suffix);
    if (it == table.rows.end()) continue;
    auto jt = it->second.find(next);
    if (jt == it->second.end()) continue;
    return {&jt->second, suffix.size()};
  }
  auto gt = table.by_activity.find(activity);
  if (gt == table.by_activity.end()) return {};
  return {&gt->second, std::nullopt};
}

nlohmann::json to_json(const ProbabilisticTransitionSystem& pts) {
  nlohmann::json j;
  j["format"] = kFormatName;
  j["version"] = kModelFormatVersion;
  j["k"] = pts.k;
  j["longest_trace"] = pts.longest_trace;
  j["warnings"] = pts.warnings;

  nlohmann::json schema = nlohmann::json::object();
  for (const auto& [name, type] : pts.schema) schema[name] = std::string(to_string(type));
  j["schema"] = schema;

  auto acts = nlohmann::json::array();
  for (const auto& al : pts.activities) acts.push_back({al.activity, al.lifecycle.label()});
  auto res = nlohmann::json::array();
  for (const auto& r : pts.resources) res.push_back(r ? nlohmann::json(*r) : nlohmann::json());
  auto avs = nlohmann::json::array();
  for (const auto& v : pts.attribute_vectors) {
    auto arr = nlohmann::json::array();
    for (const auto& x : v) arr.push_back(value_to_json(x));
    avs.push_back(arr);
  }
  j["alphabet"] = {{"activities", acts},
                   {"resources", res},
                   {"attribute_names", pts.attribute_names},
                   {"attribute_vectors", avs}};

  auto rows = nlohmann::json::array();
  for (const auto& [state, row] : pts.cf.rows)
    rows.push_back({{"state", state}, {"next", counts_to_json(row.next)}, {"end", row.end}});
  auto finals = nlohmann::json::array();
  for (const auto& s : pts.cf.final_states) finals.push_back(s);
  j["control_flow"] = {{"k", pts.cf.k}, {"rows", rows}, {"final_states", finals}};
  j["resource"] = perspective_to_json(pts.res);
  j["attribute"] = perspective_to_json(pts.attr);

  auto per_activity = nlohmann::json::array();
  for (const auto& [id, d] : pts.temporal.per_activity) per_activity.push_back({id, to_json(d)});
  j["temporal"] = {{"per_activity", per_activity}, {"inter_arrival", to_json(pts.temporal.inter_arrival)}};
  return j;
}

ProbabilisticTransitionSystem pts_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kFormatName) throw ParseError("not a probagen model file");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw ParseError("model format version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kModelFormatVersion) + ")");
    ProbabilisticTransitionSystem pts;
    pts.k = j.at("k").get<std::size_t>();
    if (pts.k == 0) throw ParseError("model k must be positive");
    pts.longest_trace = j.at("longest_trace").get<std::size_t>();
    pts.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& [name, type] : j.at("schema").items())
      pts.schema[name] = attribute_type_from_string(type.get<std::string>());

    const auto& alphabet = j.at("alphabet");
    for (const auto& al : alphabet.at("activities"))
      pts.activities.push_back({al.at(0).get<std::string>(), Lifecycle::from_label(al.at(1).get<std::string>())});
    for (const auto& r : alphabet.at("resources"))
      pts.resources.push_back(r.is_null() ? std::nullopt : std::optional<std::string>(r.get<std::string>()));
    pts.attribute_names = alphabet.at("attribute_names").get<std::vector<std::string>>();
    for (const auto& v : alphabet.at("attribute_vectors")) {
      AttributeVector vec;
      for (const auto& x : v) vec.push_back(value_from_json(x));
      if (vec.size() != pts.attribute_names.size()) throw ParseError("attribute vector arity mismatch");
      pts.attribute_vectors.push_back(std::move(vec));
    }
    if (!std::is_sorted(pts.activities.begin(), pts.activities.end()) ||
        !std::is_sorted(pts.resources.begin(), pts.resources.end()) ||
        !std::is_sorted(pts.attribute_vectors.begin(), pts.attribute_vectors.end()))
      throw ParseError("model alphabets are not in canonical order");

    const std::size_t n_act = pts.activities.size();
    const auto& cf = j.at("control_flow");
    pts.cf.k = cf.at("k").get<std::size_t>();
    for (const auto& row : cf.at("rows")) {
      auto state = row.at("state").get<CfState>();
      for (SymbolId id : state)
        if (id >= n_act) throw ParseError("model state symbol out of range");
      CfRow r;
      r.next = counts_from_json(row.at("next"), n_act);
      r.end = row.at("end").get<Count>();
      if (r.total() == 0) throw ParseError("model state without observations");
      pts.cf.rows[std::move(state)] = std::move(r);
    }
    for (const auto& s : cf.at("final_states")) pts.cf.final_states.insert(s.get<CfState>());
    if (!pts.cf.rows.count(CfState{})) throw ParseError("model has no initial state");

    pts.res = perspective_from_json(j.at("resource"), n_act, pts.resources.size());
    pts.attr = perspective_from_json(j.at("attribute"), n_act, pts.attribute_vectors.size());
    if (pts.cf.k != pts.k || pts.res.k != pts.k || pts.attr.k != pts.k)
      throw ParseError("model component k values disagree");

    const auto& temporal = j.at("temporal");
    for (const auto& entry : temporal.at("per_activity")) {
      const auto id = entry.at(0).get<SymbolId>();
      if (id >= n_act) throw ParseError("temporal entry for unknown activity");
      pts.temporal.per_activity[id] = distribution_from_json(entry.at(1));
    }
    pts.temporal.inter_arrival = distribution_from_json(temporal.at("inter_arrival"));
    return pts;
  } catch (const nlohmann::json::exception& err) {
    throw ParseError(std::string("invalid model file: ") + err.what());
  } catch (const InputError& err) {
    throw ParseError(std::string("invalid model file: ") + err.what());
  }
}

std::string serialize(const ProbabilisticTransitionSystem& pts) { return to_json(pts).dump() + "\n"; }

ProbabilisticTransitionSystem deserialize(std::string_view bytes) {
  const std::string text = io::is_gzip(bytes) ? io::gzip_decompress(bytes) : std::string(bytes);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ParseError(std::string("model file is not valid JSON: ") + err.what());
  }
  return pts_from_json(j);
}

void save_model(const std::filesystem::path& path, const ProbabilisticTransitionSystem& pts) {
  io::write_file(path, serialize(pts));
}

ProbabilisticTransitionSystem load_model(const std::filesystem::path& path) {
  return deserialize(io::read_file(path));
}

}  // namespace probagen
