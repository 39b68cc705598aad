#include "probagen/tstr.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "probagen/errors.hpp"
#include "probagen/random.hpp"

namespace probagen {

FeatureSchema::FeatureSchema(const EventLog& train) {
  std::set<std::string> acts;
  for (const auto& t : train.traces())
    for (const auto& e : t.events) acts.insert(e.activity);
  activities_.assign(acts.begin(), acts.end());
  if (train.has_resources()) {
    roles_ = discover_roles(train);
    n_roles_ = roles_->roles.size() + 1;
  }
  for (const auto& [name, type] : train.schema())
    if (type == AttributeType::Numeric) numeric_attributes_.push_back(name);
  const std::size_t a = activities_.size() + 1;
  size_ = a + 2 + n_roles_ + a + numeric_attributes_.size();
}

std::size_t FeatureSchema::activity_slot(const std::string& activity) const {
  auto it = std::lower_bound(activities_.begin(), activities_.end(), activity);
  if (it == activities_.end() || *it != activity) return activities_.size();
  return static_cast<std::size_t>(it - activities_.begin());
}

std::optional<std::size_t> FeatureSchema::role_slot(const Event& e) const {
  if (!roles_ || !e.resource) return std::nullopt;
  if (auto it = roles_->resource_role.find(*e.resource); it != roles_->resource_role.end()) return it->second;
  if (auto it = roles_->activity_role.find(e.activity); it != roles_->activity_role.end()) return it->second;
  return roles_->roles.size();
}

std::vector<std::string> FeatureSchema::names() const {
  std::vector<std::string> out;
  for (const auto& a : activities_) out.push_back("count:" + a);
  out.push_back("count:<unseen>");
  out.push_back("elapsed_hours");
  out.push_back("event_count");
  if (roles_) {
    for (const auto& r : roles_->roles) out.push_back("role:" + r.name);
    out.push_back("role:<unseen>");
  }
  for (const auto& a : activities_) out.push_back("last:" + a);
  out.push_back("last:<unseen>");
  for (const auto& n : numeric_attributes_) out.push_back("attr:" + n);
  return out;
}

std::vector<double> FeatureSchema::encode(const Trace& trace, std::size_t length) const {
  if (length == 0 || length > trace.events.size()) throw InputError("prefix length out of range");
  std::vector<double> f(size_, 0.0);
  const std::size_t a = activities_.size() + 1;
  const std::size_t role_base = a + 2;
  const std::size_t last_base = role_base + n_roles_;
  const std::size_t attr_base = last_base + a;

  for (std::size_t i = 0; i < length; ++i) {
    const Event& e = trace.events[i];
    f[activity_slot(e.activity)] += 1.0;
    if (auto r = role_slot(e)) f[role_base + *r] += 1.0;
    for (std::size_t k = 0; k < numeric_attributes_.size(); ++k)
      if (auto it = e.attributes.find(numeric_attributes_[k]); it != e.attributes.end())
        if (const double* v = std::get_if<double>(&it->second)) f[attr_base + k] = *v;
  }
  f[a] = to_hours(trace.events[length - 1].timestamp - trace.start());
  f[a + 1] = static_cast<double>(length);
  f[last_base + activity_slot(trace.events[length - 1].activity)] = 1.0;
  return f;
}

Dataset prefix_samples(const EventLog& log, const FeatureSchema& schema, TaskKind kind, const std::string& activity) {
  Dataset d;
  for (const auto& t : log.traces()) {
    const double cycle = to_hours(t.duration());
    for (std::size_t len = 1; len <= t.events.size(); ++len) {
      d.x.push_back(schema.encode(t, len));
      if (kind == TaskKind::Regression) {
        d.y.push_back(cycle);
      } else {
        const bool later = std::any_of(t.events.begin() + static_cast<std::ptrdiff_t>(len), t.events.end(),
                                       [&](const Event& e) { return e.activity == activity; });
        d.y.push_back(later ? 1.0 : 0.0);
      }
    }
  }
  return d;
}

RunLog build_run_log(const EventLog& test, std::uint64_t seed) {
  if (test.empty()) throw InputError("cannot build a run log from an empty test log");
  RunLog out;
  std::size_t skipped = 0;
  const auto& traces = test.traces();
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const Trace& t = traces[i];
    const std::size_t n = t.events.size();
    if (n < 2) {
      ++skipped;
      continue;
    }
    Rng rng(derive_seed(seed, {i}));
    const double p = rng.uniform(25.0, 75.0);
    const auto keep = static_cast<std::size_t>(
        std::clamp<long>(std::lround(p / 100.0 * static_cast<double>(n)), 1, static_cast<long>(n) - 1));
    RunCase c;
    c.prefix.case_id = t.case_id;
    c.prefix.events.assign(t.events.begin(), t.events.begin() + static_cast<std::ptrdiff_t>(keep));
    c.cycle_time_hours = to_hours(t.duration());
    for (std::size_t k = keep; k < n; ++k) c.remaining_activities.push_back(t.events[k].activity);
    out.cases.push_back(std::move(c));
  }
  if (skipped > 0) out.notes.push_back(std::to_string(skipped) + " single-event traces skipped");
  if (out.cases.empty()) throw InputError("test log has no trace with at least two events");
  return out;
}

double relative_mae(const std::vector<double>& truth, const std::vector<double>& predicted) {
  if (truth.empty() || truth.size() != predicted.size()) throw InputError("rMAE needs aligned, non-empty vectors");
  double err = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    err += std::abs(truth[i] - predicted[i]);
    sum += truth[i];
  }
  if (err == 0.0) return 0.0;
  if (sum == 0.0) throw InputError("rMAE is undefined when the mean true value is zero");
  return err / sum;
}

namespace {

std::unique_ptr<Predictor> fit_or_explain(const Learner& learner, const Dataset& data, TaskKind kind,
                                          std::uint64_t seed, std::size_t run, const char* which) {
  try {
    return learner.fit(data, kind, seed);
  } catch (const std::exception& err) {
    throw Error(std::string("learner failed on the ") + which + " set in run " + std::to_string(run) + ": " +
                err.what());
  }
}

}  // namespace

TstrResult tstr_rmae(const EventLog& train, const EventLog& gen, const EventLog& test, const Learner& learner,
                     std::size_t runs, std::uint64_t seed) {
  if (train.empty() || gen.empty() || test.empty()) throw InputError("TSTR needs non-empty logs");
  if (runs == 0) throw InputError("TSTR needs at least one run");
  const FeatureSchema schema(train);
  const Dataset train_data = prefix_samples(train, schema, TaskKind::Regression);
  const Dataset gen_data = prefix_samples(gen, schema, TaskKind::Regression);

  TstrResult out;
  out.runs = runs;
  for (std::size_t r = 0; r < runs; ++r) {
    const std::uint64_t run_seed = derive_seed(seed, {r});
    const RunLog run = build_run_log(test, run_seed);
    if (r == 0) out.notes = run.notes;
    const auto phi_train = fit_or_explain(learner, train_data, TaskKind::Regression, run_seed, r, "training");
    const auto phi_gen = fit_or_explain(learner, gen_data, TaskKind::Regression, run_seed, r, "generated");

    std::vector<double> truth;
    std::vector<double> p_train;
    std::vector<double> p_gen;
    for (const auto& c : run.cases) {
      const auto x = schema.encode(c.prefix, c.prefix.events.size());
      truth.push_back(c.cycle_time_hours);
      p_train.push_back(phi_train->predict(x));
      p_gen.push_back(phi_gen->predict(x));
    }
    out.per_run_real.push_back(relative_mae(truth, p_train));
    out.per_run_synthetic.push_back(relative_mae(truth, p_gen));
  }
  for (std::size_t r = 0; r < runs; ++r) {
    out.rmae_real += out.per_run_real[r];
    out.rmae_synthetic += out.per_run_synthetic[r];
  }
  out.rmae_real /= static_cast<double>(runs);
  out.rmae_synthetic /= static_cast<double>(runs);
  return out;
}

double macro_f1(const std::vector<bool>& truth, const std::vector<bool>& predicted) {
  if (truth.empty() || truth.size() != predicted.size()) throw InputError("F-score needs aligned, non-empty vectors");
  double total = 0.0;
  for (bool positive : {true, false}) {
    double tp = 0.0;
    double fp = 0.0;
    double fn = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const bool t = truth[i] == positive;
      const bool p = predicted[i] == positive;
      tp += t && p;
      fp += !t && p;
      fn += t && !p;
    }
    const double denom = 2.0 * tp + fp + fn;
    total += denom == 0.0 ? 0.0 : 2.0 * tp / denom;
  }
  return total / 2.0;
}

FscoreResult rare_activity_fscore(const EventLog& train, const EventLog& balanced, const EventLog& test,
                                  const std::string& activity, const Learner& learner, std::size_t runs,
                                  std::uint64_t seed) {
  if (train.empty() || balanced.empty() || test.empty()) throw InputError("F-score protocol needs non-empty logs");
  if (runs == 0) throw InputError("F-score protocol needs at least one run");
  if (std::none_of(test.traces().begin(), test.traces().end(),
                   [&](const Trace& t) { return t.contains_activity(activity); }))
    throw InputError("activity '" + activity + "' does not occur in the test log");

  const FeatureSchema schema(train);
  const Dataset train_data = prefix_samples(train, schema, TaskKind::Classification, activity);
  const Dataset balanced_data = prefix_samples(balanced, schema, TaskKind::Classification, activity);
  for (const auto& [data, which] : {std::pair{&train_data, "training"}, std::pair{&balanced_data, "balanced"}}) {
    const bool any_pos = std::any_of(data->y.begin(), data->y.end(), [](double v) { return v > 0.5; });
    const bool any_neg = std::any_of(data->y.begin(), data->y.end(), [](double v) { return v < 0.5; });
    if (!any_pos || !any_neg)
      throw InputError(std::string("the ") + which + " set has a single-class target for '" + activity + "'");
  }

  FscoreResult out;
  out.runs = runs;
  for (std::size_t r = 0; r < runs; ++r) {
    const std::uint64_t run_seed = derive_seed(seed, {r});
    const RunLog run = build_run_log(test, run_seed);
    const auto phi_train = fit_or_explain(learner, train_data, TaskKind::Classification, run_seed, r, "training");
    const auto phi_bal = fit_or_explain(learner, balanced_data, TaskKind::Classification, run_seed, r, "balanced");
    std::vector<bool> truth;
    std::vector<bool> p_train;
    std::vector<bool> p_bal;
    for (const auto& c : run.cases) {
      const auto x = schema.encode(c.prefix, c.prefix.events.size());
      truth.push_back(std::find(c.remaining_activities.begin(), c.remaining_activities.end(), activity) !=
                      c.remaining_activities.end());
      p_train.push_back(phi_train->predict(x) >= 0.5);
      p_bal.push_back(phi_bal->predict(x) >= 0.5);
    }
    if (std::all_of(truth.begin(), truth.end(), [](bool b) { return b; }))
      out.notes.push_back("run " + std::to_string(r) + ": every running trace still contains '" + activity + "'");
    else if (std::none_of(truth.begin(), truth.end(), [](bool b) { return b; }))
      out.notes.push_back("run " + std::to_string(r) + ": no running trace still contains '" + activity + "'");
    out.per_run_train.push_back(macro_f1(truth, p_train));
    out.per_run_balanced.push_back(macro_f1(truth, p_bal));
  }
  for (std::size_t r = 0; r < runs; ++r) {
    out.fscore_train += out.per_run_train[r];
    out.fscore_balanced += out.per_run_balanced[r];
  }
  out.fscore_train /= static_cast<double>(runs);
  out.fscore_balanced /= static_cast<double>(runs);
  return out;
}

nlohmann::json to_json(const TstrResult& r) {
  return {{"rmae_real", r.rmae_real},
          {"rmae_synthetic", r.rmae_synthetic},
          {"runs", r.runs},
          {"per_run_real", r.per_run_real},
          {"per_run_synthetic", r.per_run_synthetic},
          {"notes", r.notes}};
}

nlohmann::json to_json(const FscoreResult& r) {
  return {{"fscore_train", r.fscore_train},
          {"fscore_balanced", r.fscore_balanced},
          {"runs", r.runs},
          {"per_run_train", r.per_run_train},
          {"per_run_balanced", r.per_run_balanced},
          {"notes", r.notes}};
}

std::string format_tstr_table(const std::vector<std::pair<std::string, TstrResult>>& rows) {
  std::size_t w = 0;
  for (const auto& [label, r] : rows) w = std::max(w, label.size());
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << std::left << std::setw(static_cast<int>(w)) << "" << std::right << "  " << std::setw(12) << "rMAE real %"
      << "  " << std::setw(12) << "rMAE gen %" << '\n';
  for (const auto& [label, r] : rows)
    out << std::left << std::setw(static_cast<int>(w)) << label << std::right << "  " << std::setw(12)
        << 100.0 * r.rmae_real << "  " << std::setw(12) << 100.0 * r.rmae_synthetic << '\n';
  return out.str();
}

}  // namespace probagen
