#include "probagen/hyperopt.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include "probagen/errors.hpp"
#include "probagen/generator.hpp"
#include "probagen/metrics_entropy.hpp"
#include "probagen/metrics_similarity.hpp"
#include "probagen/pts.hpp"

namespace probagen {

KSweepPoint make_sweep_point(std::size_t k, double cfld, double one_minus_norm_entropy) {
  return {k, cfld, one_minus_norm_entropy, std::hypot(cfld, one_minus_norm_entropy)};
}

std::size_t select_elbow(const std::vector<KSweepPoint>& sweep) {
  if (sweep.empty()) throw InputError("cannot select k from an empty sweep");
  std::size_t best = 0;
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    const auto& p = sweep[i];
    const auto& b = sweep[best];
    if (p.distance_from_origin < b.distance_from_origin ||
        (p.distance_from_origin == b.distance_from_origin && p.k < b.k))
      best = i;
  }
  return best;
}

KOptimization optimize_k(const EventLog& train, const EventLog& validation, const KOptimizationConfig& config) {
  if (config.k_candidates.empty()) throw InputError("no k candidates given");
  if (validation.empty()) throw InputError("validation log is empty");
  KOptimization out;
  std::vector<std::size_t> ks = config.k_candidates;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  for (std::size_t k : ks) {
    try {
      const auto pts = discover(train, k);
      GenerationConfig gen;
      gen.n_traces = config.gen_traces > 0 ? config.gen_traces : validation.size();
      gen.seed = config.seed;
      gen.start_time = validation.epoch();
      gen.workers = config.workers;
      const EventLog log = generate_log(pts, gen);
      out.sweep.push_back(
          make_sweep_point(k, cfld(validation, log, config.workers), 1.0 - normalized_trace_entropy(log)));
    } catch (const Error& err) {
      out.notes.push_back("k=" + std::to_string(k) + " excluded: " + err.what());
    }
  }
  if (out.sweep.empty()) throw Error("every k candidate failed");
  out.selected_k = out.sweep[select_elbow(out.sweep)].k;
  return out;
}

KOptimization average_sweeps(const std::vector<KOptimization>& runs) {
  if (runs.empty()) throw InputError("nothing to average");
  std::map<std::size_t, std::pair<std::size_t, std::pair<double, double>>> acc;
  KOptimization out;
  for (const auto& r : runs) {
    for (const auto& p : r.sweep) {
      auto& [count, sums] = acc[p.k];
      ++count;
      sums.first += p.cfld;
      sums.second += p.one_minus_norm_entropy;
    }
    out.notes.insert(out.notes.end(), r.notes.begin(), r.notes.end());
  }
  for (const auto& [k, entry] : acc) {
    const auto& [count, sums] = entry;
    if (count != runs.size()) {
      out.notes.push_back("k=" + std::to_string(k) + " missing from some sweeps; left out of the average");
      continue;
    }
    const double n = static_cast<double>(count);
    out.sweep.push_back(make_sweep_point(k, sums.first / n, sums.second / n));
  }
  if (out.sweep.empty()) throw Error("no k value is present in every sweep");
  out.selected_k = out.sweep[select_elbow(out.sweep)].k;
  return out;
}

nlohmann::json to_json(const KOptimization& r) {
  auto sweep = nlohmann::json::array();
  for (const auto& p : r.sweep)
    sweep.push_back({{"k", p.k},
                     {"cfld", p.cfld},
                     {"one_minus_norm_entropy", p.one_minus_norm_entropy},
                     {"distance_from_origin", p.distance_from_origin}});
  return {{"selected_k", r.selected_k}, {"sweep", sweep}, {"notes", r.notes}};
}

std::string plot_data(const std::vector<KSweepPoint>& sweep) {
  std::ostringstream out;
  out << std::setprecision(17) << "# k cfld one_minus_norm_entropy\n";
  for (const auto& p : sweep) out << p.k << ' ' << p.cfld << ' ' << p.one_minus_norm_entropy << '\n';
  return out.str();
}

std::string format_sweep_table(const KOptimization& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3);
  out << std::setw(3) << "k" << std::setw(10) << "CFLD" << std::setw(14) << "1-entropy" << std::setw(12)
      << "distance" << '\n';
  for (const auto& p : r.sweep)
    out << std::setw(3) << p.k << std::setw(10) << p.cfld << std::setw(14) << p.one_minus_norm_entropy
        << std::setw(12) << p.distance_from_origin << (p.k == r.selected_k ? "  <-" : "") << '\n';
  return out.str();
}

}  // namespace probagen
