#include <CLI11.hpp>

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "probagen/decision_tree.hpp"
#include "probagen/errors.hpp"
#include "probagen/generator.hpp"
#include "probagen/hyperopt.hpp"
#include "probagen/io/config.hpp"
#include "probagen/io/csv.hpp"
#include "probagen/io/gzip.hpp"
#include "probagen/io/log_io.hpp"
#include "probagen/metrics_entropy.hpp"
#include "probagen/metrics_similarity.hpp"
#include "probagen/parallel.hpp"
#include "probagen/pts.hpp"
#include "probagen/subprocess_learner.hpp"
#include "probagen/tstr.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace probagen;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

bool g_quiet = false;

void info(const std::string& msg) {
  if (!g_quiet) std::cerr << "probagen: " << msg << '\n';
}

// Options shared by every subcommand.
struct Common {
  std::string config_path;
  bool json_out = false;
  std::size_t workers = 0;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* workers_opt = nullptr;

  json file;  // whole config file, or null
  fs::path base;
};

// Looks up `key` in the subcommand's table, then at the top level.
const json* config_value(const Common& c, const std::string& section, const std::string& key) {
  if (!c.file.is_object()) return nullptr;
  if (auto it = c.file.find(section); it != c.file.end() && it->is_object())
    if (auto jt = it->find(key); jt != it->end()) return &*jt;
  if (auto it = c.file.find(key); it != c.file.end() && !it->is_object()) return &*it;
  return nullptr;
}

// Fills `value` from the config file unless the flag was given.
template <typename T>
void fill(const Common& c, const std::string& section, const std::string& key, CLI::Option* opt, T& value) {
  if (opt && opt->count() > 0) return;
  if (const json* v = config_value(c, section, key)) {
    try {
      value = v->get<T>();
    } catch (const json::exception& err) {
      throw ConfigError("config key '" + section + "." + key + "': " + err.what());
    }
  }
}

// Like fill(), but relative paths from the config file are anchored at its directory.
void fill_path(const Common& c, const std::string& section, const std::string& key, CLI::Option* opt,
               std::string& value) {
  if (opt && opt->count() > 0) return;
  if (const json* v = config_value(c, section, key)) {
    if (!v->is_string()) throw ConfigError("config key '" + section + "." + key + "' must be a path string");
    fs::path p = v->get<std::string>();
    value = (p.is_relative() ? c.base / p : p).lexically_normal().string();
  }
}

void load_common(Common& c, const std::string& section) {
  if (!c.config_path.empty()) {
    c.file = io::load_config_file(c.config_path);
    c.base = fs::path(c.config_path).parent_path();
  }
  fill(c, section, "workers", c.workers_opt, c.workers);
  if (c.seed_opt->count() == 0) {
    if (const json* v = config_value(c, section, "seed")) {
      c.seed = v->get<std::uint64_t>();
    } else if (const char* env = std::getenv("PROBAGEN_SEED"); env && *env) {
      try {
        std::size_t used = 0;
        c.seed = std::stoull(env, &used);
        if (used != std::string(env).size()) throw std::invalid_argument(env);
      } catch (const std::exception&) {
        throw ConfigError(std::string("PROBAGEN_SEED must be a non-negative integer, got '") + env + "'");
      }
    }
  }
}

std::optional<io::CsvMapping> csv_mapping(const Common& c, const std::string& mapping_path) {
  if (!mapping_path.empty()) return io::load_csv_mapping(mapping_path);
  if (c.file.is_object())
    if (auto it = c.file.find("csv"); it != c.file.end()) return io::csv_mapping_from_json(*it);
  return std::nullopt;
}

// CSV input without an explicit mapping uses the default column names.
EventLog read_input(const std::string& path, const std::optional<io::CsvMapping>& mapping) {
  return io::read_log(path, mapping ? mapping : io::CsvMapping{});
}

void require_input(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError("missing " + what);
  if (!fs::is_regular_file(path)) throw ConfigError(what + " '" + path + "' does not exist");
}

void require_output(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError("missing " + what);
  const fs::path dir = fs::path(path).parent_path();
  if (!dir.empty() && !fs::is_directory(dir))
    throw ConfigError("directory of " + what + " '" + path + "' does not exist");
}

bool gz_path(const fs::path& p) {
  std::string ext = p.extension().string();
  for (char& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return ext == ".gz";
}

// Outputs are buffered and written together once all work has succeeded.
class Outputs {
 public:
  void add(const std::string& path, std::string text) {
    if (!path.empty()) pending_.emplace_back(path, gz_path(path) ? io::gzip_compress(text) : std::move(text));
  }

  void commit() {
    std::vector<fs::path> written;
    try {
      for (const auto& [path, bytes] : pending_) {
        const fs::path tmp = path + ".partial";
        {
          std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
          out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
          if (!out) throw Error("cannot write '" + tmp.string() + "'");
        }
        written.push_back(tmp);
      }
      for (const auto& [path, bytes] : pending_) fs::rename(path + ".partial", path);
    } catch (...) {
      std::error_code ignored;
      for (const auto& p : written) fs::remove(p, ignored);
      throw;
    }
    for (const auto& [path, bytes] : pending_) info("wrote " + path);
  }

 private:
  std::vector<std::pair<std::string, std::string>> pending_;
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void emit(const Common& c, const json& report, const std::string& table) {
  if (c.json_out)
    std::cout << dump(report);
  else
    std::cout << table;
}

Timestamp parse_start(const std::string& text) {
  auto t = parse_iso8601(text);
  if (!t) throw ConfigError("start time '" + text + "' is not an ISO 8601 timestamp");
  return *t;
}

std::vector<std::size_t> parse_k_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    try {
      if (dash != std::string::npos) {
        const auto lo = std::stoul(item.substr(0, dash));
        const auto hi = std::stoul(item.substr(dash + 1));
        for (auto k = lo; k <= hi; ++k) out.push_back(k);
      } else {
        out.push_back(std::stoul(item));
      }
    } catch (const std::exception&) {
      throw ConfigError("bad k list '" + text + "' (expected e.g. 1-6 or 1,2,4)");
    }
  }
  if (out.empty()) throw ConfigError("empty k list");
  return out;
}

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

json discovery_summary(const ProbabilisticTransitionSystem& pts) {
  json per_activity = json::object();
  for (const auto& [id, d] : pts.temporal.per_activity) {
    const auto& al = pts.activities[id];
    per_activity[al.activity + "/" + al.lifecycle.label()] = to_json(d);
  }
  return {{"k", pts.k},
          {"activities", pts.activities.size()},
          {"resources", pts.resources.size()},
          {"cf_states", pts.cf.rows.size()},
          {"final_states", pts.cf.final_states.size()},
          {"resource_states", pts.res.rows.size()},
          {"attribute_states", pts.attr.rows.size()},
          {"longest_trace", pts.longest_trace},
          {"inter_arrival", to_json(pts.temporal.inter_arrival)},
          {"durations", per_activity},
          {"warnings", pts.warnings}};
}

std::string summary_table(const json& s) {
  std::ostringstream out;
  out << "k                 " << s["k"] << "\n"
      << "activities        " << s["activities"] << "\n"
      << "resources         " << s["resources"] << "\n"
      << "control states    " << s["cf_states"] << "\n"
      << "resource states   " << s["resource_states"] << "\n"
      << "attribute states  " << s["attribute_states"] << "\n"
      << "inter-arrival     " << s["inter_arrival"]["family"].get<std::string>() << "\n";
  return out.str();
}

std::unique_ptr<Learner> make_learner(const std::string& kind, const std::string& command, std::size_t depth,
                                      std::size_t min_leaf) {
  if (!command.empty()) return std::make_unique<SubprocessLearner>(split_words(command));
  if (kind != "tree") throw ConfigError("unknown learner '" + kind + "' (use 'tree' or --learner-cmd)");
  return std::make_unique<TreeLearner>(TreeParams{depth, min_leaf});
}

// ---- discover -------------------------------------------------------------

struct DiscoverArgs {
  std::string input, output, report, csv_map, k = "3", k_candidates = "1-6";
  std::size_t gen_traces = 0;
  CLI::Option *input_opt, *output_opt, *report_opt, *csv_opt, *k_opt, *cand_opt, *gen_opt;
};

int run_discover(Common& c, DiscoverArgs& a) {
  const std::string s = "discover";
  load_common(c, s);
  fill_path(c, s, "input", a.input_opt, a.input);
  fill_path(c, s, "output", a.output_opt, a.output);
  fill_path(c, s, "report", a.report_opt, a.report);
  fill_path(c, s, "csv_mapping", a.csv_opt, a.csv_map);
  if (a.k_opt->count() == 0)
    if (const json* v = config_value(c, s, "k")) a.k = v->is_string() ? v->get<std::string>() : v->dump();
  fill(c, s, "k_candidates", a.cand_opt, a.k_candidates);
  fill(c, s, "gen_traces", a.gen_opt, a.gen_traces);
  require_input(a.input, "input log");
  require_output(a.output, "model output");
  if (a.report.empty()) a.report = a.output + ".report.json";
  require_output(a.report, "report output");

  json config{{"command", s}, {"input", a.input}, {"output", a.output}, {"k", a.k}, {"seed", c.seed}};
  const EventLog log = read_input(a.input, csv_mapping(c, a.csv_map));
  info("read " + std::to_string(log.size()) + " traces from " + a.input);

  json report{{"config", config}};
  std::string table;
  std::size_t k = 0;
  if (a.k == "auto") {
    KOptimizationConfig kc;
    kc.k_candidates = parse_k_list(a.k_candidates);
    kc.gen_traces = a.gen_traces;
    kc.seed = c.seed;
    kc.workers = c.workers;
    report["config"]["k_candidates"] = kc.k_candidates;
    const auto split = temporal_split(log, 0.8);
    const auto opt = optimize_k(split.train, split.test, kc);
    k = opt.selected_k;
    report["k_optimization"] = to_json(opt);
    table += format_sweep_table(opt) + "\n";
    info("selected k = " + std::to_string(k));
  } else {
    try {
      k = std::stoul(a.k);
    } catch (const std::exception&) {
      throw ConfigError("k must be a positive integer or 'auto', got '" + a.k + "'");
    }
  }
  const auto pts = discover(log, k);
  report["model"] = discovery_summary(pts);
  table += summary_table(report["model"]);

  Outputs out;
  out.add(a.output, serialize(pts));
  out.add(a.report, dump(report));
  out.commit();
  emit(c, report, table);
  return kExitOk;
}

// ---- generate / balance ---------------------------------------------------

struct GenerateArgs {
  std::string model, output, report, csv_map, start_time, start_from;
  std::size_t n = 0, max_length = 0;
  // Balancing.
  std::string train, activity;
  double fraction = 0.5;
  std::size_t max_rejections = 1000;
  CLI::Option *model_opt, *output_opt, *report_opt, *csv_opt, *start_opt, *from_opt, *n_opt, *max_opt, *train_opt,
      *activity_opt, *fraction_opt, *rej_opt;
};

int run_generate(Common& c, GenerateArgs& a, const std::string& s, bool balance) {
  load_common(c, s);
  fill_path(c, s, "model", a.model_opt, a.model);
  fill_path(c, s, "output", a.output_opt, a.output);
  fill_path(c, s, "report", a.report_opt, a.report);
  fill_path(c, s, "csv_mapping", a.csv_opt, a.csv_map);
  fill(c, s, "start_time", a.start_opt, a.start_time);
  fill_path(c, s, "start_from", a.from_opt, a.start_from);
  fill(c, s, "n_traces", a.n_opt, a.n);
  fill(c, s, "max_trace_length", a.max_opt, a.max_length);
  fill_path(c, s, "train", a.train_opt, a.train);
  fill(c, s, "activity", a.activity_opt, a.activity);
  fill(c, s, "fraction", a.fraction_opt, a.fraction);
  fill(c, s, "max_rejections", a.rej_opt, a.max_rejections);
  balance = balance || !a.activity.empty();

  require_input(a.model, "model");
  if (!a.start_from.empty()) require_input(a.start_from, "start reference log");
  if (balance) {
    require_input(a.train, "training log for balancing");
    if (a.activity.empty()) throw ConfigError("balancing needs --activity");
  } else if (a.n == 0 && a.n_opt->count() == 0 && !config_value(c, s, "n_traces")) {
    throw ConfigError("missing --n (number of traces)");
  }
  require_output(a.output, "log output");
  io::format_from_path(a.output);
  if (a.report.empty()) a.report = a.output + ".report.json";
  require_output(a.report, "report output");

  const auto mapping = csv_mapping(c, a.csv_map);
  const auto pts = load_model(a.model);
  std::optional<EventLog> train;
  if (balance) train = read_input(a.train, mapping);

  GenerationConfig gc;
  gc.n_traces = a.n;
  gc.seed = c.seed;
  gc.max_trace_length = a.max_length;
  gc.workers = c.workers;
  if (!a.start_time.empty())
    gc.start_time = parse_start(a.start_time);
  else if (!a.start_from.empty())
    gc.start_time = read_input(a.start_from, mapping).epoch();
  else if (train)
    gc.start_time = train->epoch();

  json config{{"command", s},
              {"model", a.model},
              {"output", a.output},
              {"seed", c.seed},
              {"start_time", format_iso8601(gc.start_time)},
              {"max_trace_length", a.max_length}};
  GenerationReport rep;
  EventLog log;
  if (balance) {
    BalanceConfig bc;
    bc.target_activity = a.activity;
    bc.target_fraction = a.fraction;
    bc.max_rejections_per_trace = a.max_rejections;
    config["train"] = a.train;
    config["activity"] = a.activity;
    config["fraction"] = a.fraction;
    config["max_rejections"] = a.max_rejections;
    log = generate_balanced(pts, *train, gc, bc, &rep);
  } else {
    config["n_traces"] = a.n;
    log = generate_log(pts, gc, &rep);
  }
  for (const auto& n : rep.notices) info(n);
  if (!rep.truncated.empty()) info(std::to_string(rep.truncated.size()) + " traces cut at the length cap");

  json report{{"config", config}, {"generation", to_json(rep)}, {"traces", log.size()}, {"events", log.event_count()}};
  Outputs out;
  out.add(a.output, io::encode_log(a.output, log, mapping));
  out.add(a.report, dump(report));
  out.commit();
  emit(c, report,
       "generated " + std::to_string(log.size()) + " traces (" + std::to_string(log.event_count()) + " events)\n");
  return kExitOk;
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::string real, generated, output, csv_map, test, learner = "tree", learner_cmd;
  std::vector<std::string> skip;
  double time_bin = 0.0, role_threshold = kDefaultRoleThreshold;
  std::size_t runs = 10, depth = 8, min_leaf = 5;
  CLI::Option *real_opt, *gen_opt, *output_opt, *csv_opt, *test_opt, *learner_opt, *cmd_opt, *skip_opt, *bin_opt,
      *role_opt, *runs_opt, *depth_opt, *leaf_opt;
};

int run_evaluate(Common& c, EvaluateArgs& a) {
  const std::string s = "evaluate";
  load_common(c, s);
  fill_path(c, s, "real", a.real_opt, a.real);
  fill_path(c, s, "generated", a.gen_opt, a.generated);
  fill_path(c, s, "output", a.output_opt, a.output);
  fill_path(c, s, "csv_mapping", a.csv_opt, a.csv_map);
  fill_path(c, s, "test", a.test_opt, a.test);
  fill(c, s, "learner", a.learner_opt, a.learner);
  fill(c, s, "learner_cmd", a.cmd_opt, a.learner_cmd);
  fill(c, s, "skip", a.skip_opt, a.skip);
  fill(c, s, "time_bin_hours", a.bin_opt, a.time_bin);
  fill(c, s, "role_threshold", a.role_opt, a.role_threshold);
  fill(c, s, "runs", a.runs_opt, a.runs);
  fill(c, s, "tree_depth", a.depth_opt, a.depth);
  fill(c, s, "tree_min_leaf", a.leaf_opt, a.min_leaf);
  require_input(a.real, "real log");
  require_input(a.generated, "generated log");
  if (!a.test.empty()) require_input(a.test, "test log");
  if (!a.output.empty()) require_output(a.output, "report output");
  static const std::vector<std::string> kMetricNames{"cfld", "two_gram", "three_gram", "aed", "red", "ced",
                                                     "ctd",  "car",      "rbced",      "cwd", "hwd", "dad"};
  for (const auto& m : a.skip)
    if (std::find(kMetricNames.begin(), kMetricNames.end(), m) == kMetricNames.end())
      throw ConfigError("unknown metric '" + m + "' in --skip");

  const auto mapping = csv_mapping(c, a.csv_map);
  const EventLog real = read_input(a.real, mapping);
  const EventLog gen = read_input(a.generated, mapping);

  MetricOptions mo;
  if (a.time_bin > 0.0) mo.time_bin_hours = a.time_bin;
  mo.role_threshold = a.role_threshold;
  mo.workers = c.workers;
  MetricReport metrics = evaluate_all(real, gen, mo);
  json sim = to_json(metrics);
  for (const auto& m : a.skip) {
    sim[m] = nullptr;
    sim["notes"][m] = "skipped on request";
  }
  metrics = metric_report_from_json(sim);

  const auto e_real = entropy_report(real);
  const auto e_gen = entropy_report(gen);
  json config{{"command", s},      {"real", a.real},           {"generated", a.generated},
              {"skip", a.skip},    {"time_bin_hours", a.time_bin}, {"role_threshold", a.role_threshold},
              {"seed", c.seed}};
  json report{{"config", config},
              {"similarity", sim},
              {"entropy", {{"real", to_json(e_real)}, {"generated", to_json(e_gen)}}}};
  std::string table = format_metric_table({{"generated", metrics}}) + "\n" +
                      format_entropy_table({{"real", e_real}, {"generated", e_gen}});

  if (!a.test.empty()) {
    const EventLog test = read_input(a.test, mapping);
    const auto learner = make_learner(a.learner, a.learner_cmd, a.depth, a.min_leaf);
    const auto r = tstr_rmae(real, gen, test, *learner, a.runs, c.seed);
    report["config"]["test"] = a.test;
    report["config"]["learner"] = learner->name();
    report["config"]["runs"] = a.runs;
    report["tstr"] = to_json(r);
    table += "\n" + format_tstr_table({{"generated", r}});
  }

  Outputs out;
  out.add(a.output, dump(report));
  out.commit();
  emit(c, report, table);
  return kExitOk;
}

// ---- optimize-k -----------------------------------------------------------

struct OptimizeArgs {
  std::vector<std::string> inputs;
  std::string validation, output, plot, csv_map, k_candidates = "1-6";
  std::size_t gen_traces = 0;
  CLI::Option *input_opt, *val_opt, *output_opt, *plot_opt, *csv_opt, *cand_opt, *gen_opt;
};

int run_optimize(Common& c, OptimizeArgs& a) {
  const std::string s = "optimize-k";
  load_common(c, s);
  if (a.input_opt->count() == 0)
    if (const json* v = config_value(c, s, "input")) {
      a.inputs.clear();
      for (const auto& p : v->is_array() ? *v : json::array({*v})) {
        fs::path path = p.get<std::string>();
        a.inputs.push_back((path.is_relative() ? c.base / path : path).lexically_normal().string());
      }
    }
  fill_path(c, s, "validation", a.val_opt, a.validation);
  fill_path(c, s, "output", a.output_opt, a.output);
  fill_path(c, s, "plot_data", a.plot_opt, a.plot);
  fill_path(c, s, "csv_mapping", a.csv_opt, a.csv_map);
  fill(c, s, "k_candidates", a.cand_opt, a.k_candidates);
  fill(c, s, "gen_traces", a.gen_opt, a.gen_traces);
  if (a.inputs.empty()) throw ConfigError("missing input log");
  for (const auto& p : a.inputs) require_input(p, "input log");
  if (!a.validation.empty()) {
    require_input(a.validation, "validation log");
    if (a.inputs.size() != 1) throw ConfigError("--validation needs exactly one input log");
  }
  if (!a.output.empty()) require_output(a.output, "report output");
  if (!a.plot.empty()) require_output(a.plot, "plot data output");

  KOptimizationConfig kc;
  kc.k_candidates = parse_k_list(a.k_candidates);
  kc.gen_traces = a.gen_traces;
  kc.seed = c.seed;
  kc.workers = c.workers;
  const auto mapping = csv_mapping(c, a.csv_map);
  std::vector<KOptimization> runs;
  json per_log = json::array();
  for (const auto& p : a.inputs) {
    const EventLog log = read_input(p, mapping);
    KOptimization r;
    if (!a.validation.empty()) {
      r = optimize_k(log, read_input(a.validation, mapping), kc);
    } else {
      const auto split = temporal_split(log, 0.8);
      r = optimize_k(split.train, split.test, kc);
    }
    info(p + ": k = " + std::to_string(r.selected_k));
    per_log.push_back({{"input", p}, {"result", to_json(r)}});
    runs.push_back(std::move(r));
  }
  const KOptimization result = runs.size() == 1 ? runs.front() : average_sweeps(runs);

  json config{{"command", s},
              {"inputs", a.inputs},
              {"validation", a.validation},
              {"k_candidates", kc.k_candidates},
              {"gen_traces", a.gen_traces},
              {"seed", c.seed}};
  json report{{"config", config}, {"result", to_json(result)}};
  if (runs.size() > 1) report["per_log"] = per_log;
  Outputs out;
  out.add(a.output, dump(report));
  out.add(a.plot, plot_data(result.sweep));
  out.commit();
  emit(c, report, format_sweep_table(result));
  return kExitOk;
}

// ---- tstr -----------------------------------------------------------------

struct TstrArgs {
  std::string train, generated, test, output, csv_map, activity, learner = "tree", learner_cmd;
  std::size_t runs = 10, depth = 8, min_leaf = 5;
  CLI::Option *train_opt, *gen_opt, *test_opt, *output_opt, *csv_opt, *activity_opt, *learner_opt, *cmd_opt,
      *runs_opt, *depth_opt, *leaf_opt;
};

int run_tstr(Common& c, TstrArgs& a) {
  const std::string s = "tstr";
  load_common(c, s);
  fill_path(c, s, "train", a.train_opt, a.train);
  fill_path(c, s, "generated", a.gen_opt, a.generated);
  fill_path(c, s, "test", a.test_opt, a.test);
  fill_path(c, s, "output", a.output_opt, a.output);
  fill_path(c, s, "csv_mapping", a.csv_opt, a.csv_map);
  fill(c, s, "activity", a.activity_opt, a.activity);
  fill(c, s, "learner", a.learner_opt, a.learner);
  fill(c, s, "learner_cmd", a.cmd_opt, a.learner_cmd);
  fill(c, s, "runs", a.runs_opt, a.runs);
  fill(c, s, "tree_depth", a.depth_opt, a.depth);
  fill(c, s, "tree_min_leaf", a.leaf_opt, a.min_leaf);
  require_input(a.train, "training log");
  require_input(a.generated, "generated log");
  require_input(a.test, "test log");
  if (!a.output.empty()) require_output(a.output, "report output");

  const auto mapping = csv_mapping(c, a.csv_map);
  const EventLog train = read_input(a.train, mapping);
  const EventLog gen = read_input(a.generated, mapping);
  const EventLog test = read_input(a.test, mapping);
  const auto learner = make_learner(a.learner, a.learner_cmd, a.depth, a.min_leaf);

  json config{{"command", s},   {"train", a.train}, {"generated", a.generated}, {"test", a.test},
              {"runs", a.runs}, {"seed", c.seed},   {"learner", learner->name()}};
  json report{{"config", config}};
  std::string table;
  if (a.activity.empty()) {
    const auto r = tstr_rmae(train, gen, test, *learner, a.runs, c.seed);
    report["tstr"] = to_json(r);
    table = format_tstr_table({{"generated", r}});
  } else {
    report["config"]["activity"] = a.activity;
    const auto r = rare_activity_fscore(train, gen, test, a.activity, *learner, a.runs, c.seed);
    for (const auto& n : r.notes) info(n);
    report["fscore"] = to_json(r);
    std::ostringstream t;
    t.setf(std::ios::fixed);
    t.precision(4);
    t << "macro F1 train     " << r.fscore_train << "\nmacro F1 balanced  " << r.fscore_balanced << "\n";
    table = t.str();
  }
  Outputs out;
  out.add(a.output, dump(report));
  out.commit();
  emit(c, report, table);
  return kExitOk;
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "TOML or JSON config file")->check(CLI::ExistingFile);
  cmd->add_flag("--json", c.json_out, "Print the JSON report to stdout");
  c.seed_opt = cmd->add_option("--seed", c.seed, "Random seed (default: $PROBAGEN_SEED, else 0)");
  c.workers_opt = cmd->add_option("-j,--workers", c.workers, "Worker threads (0 = all cores)");
  cmd->add_flag("-q,--quiet", g_quiet, "No progress messages");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"probagen: learn, generate and evaluate event logs with probabilistic transition systems"};
  app.require_subcommand(1);
  // One Common per subcommand so the option handles belong to the parsed one.
  Common dc, gc, bc, ec, oc, tc;

  DiscoverArgs da;
  auto* discover_cmd = app.add_subcommand("discover", "Learn a model from an event log");
  add_common(discover_cmd, dc);
  da.input_opt = discover_cmd->add_option("-i,--input", da.input, "Event log (.xes, .csv, .json, optionally .gz)");
  da.output_opt = discover_cmd->add_option("-o,--output", da.output, "Model file (.pts.json.gz)");
  da.report_opt = discover_cmd->add_option("--report", da.report, "Discovery report (default: <output>.report.json)");
  da.csv_opt = discover_cmd->add_option("--csv-mapping", da.csv_map, "CSV column mapping file");
  da.k_opt = discover_cmd->add_option("-k,--k", da.k, "History length, or 'auto'")->capture_default_str();
  da.cand_opt = discover_cmd->add_option("--k-candidates", da.k_candidates, "Candidates for k=auto, e.g. 1-6")
                    ->capture_default_str();
  da.gen_opt = discover_cmd->add_option("--gen-traces", da.gen_traces, "Traces per candidate (0 = validation size)");

  GenerateArgs ga, ba;
  auto* generate_cmd = app.add_subcommand("generate", "Generate a synthetic log from a model");
  auto* balance_cmd = app.add_subcommand("balance", "Augment a log so a rare activity reaches a target share");
  for (auto [cmd, c, g] : {std::tuple{generate_cmd, &gc, &ga}, std::tuple{balance_cmd, &bc, &ba}}) {
    GenerateArgs& a = *g;
    add_common(cmd, *c);
    a.model_opt = cmd->add_option("-m,--model", a.model, "Model file");
    a.output_opt = cmd->add_option("-o,--output", a.output, "Output log (.xes, .csv, .json, optionally .gz)");
    a.report_opt = cmd->add_option("--report", a.report, "Generation report (default: <output>.report.json)");
    a.csv_opt = cmd->add_option("--csv-mapping", a.csv_map, "CSV column mapping file");
    a.start_opt = cmd->add_option("--start-time", a.start_time, "First arrival, ISO 8601");
    a.from_opt = cmd->add_option("--start-from", a.start_from, "Take the first arrival from this log's epoch");
    a.max_opt = cmd->add_option("--max-trace-length", a.max_length, "Event cap per trace (0 = 5 x longest)");
    a.train_opt = cmd->add_option("--train", a.train, "Training log to balance");
    a.activity_opt = cmd->add_option("--activity", a.activity, "Rare activity to balance");
    a.fraction_opt =
        cmd->add_option("--fraction", a.fraction, "Target share of traces with the activity")->capture_default_str();
    a.rej_opt = cmd->add_option("--max-rejections", a.max_rejections, "Rejection budget per synthetic trace")
                     ->capture_default_str();
  }
  ga.n_opt = generate_cmd->add_option("-n,--n", ga.n, "Number of traces");
  // balance has no -n; a hidden option keeps lookups uniform.
  ba.n_opt = balance_cmd->add_option("--n-unused", ba.n)->group("");

  EvaluateArgs ea;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Compare a generated log with a real one");
  add_common(evaluate_cmd, ec);
  ea.real_opt = evaluate_cmd->add_option("-r,--real", ea.real, "Real log");
  ea.gen_opt = evaluate_cmd->add_option("-g,--generated", ea.generated, "Generated log");
  ea.output_opt = evaluate_cmd->add_option("-o,--output", ea.output, "JSON report file");
  ea.csv_opt = evaluate_cmd->add_option("--csv-mapping", ea.csv_map, "CSV column mapping file");
  ea.test_opt = evaluate_cmd->add_option("--test", ea.test, "Test log; enables TSTR with the real log as training set");
  ea.learner_opt = evaluate_cmd->add_option("--learner", ea.learner, "Built-in learner")->capture_default_str();
  ea.cmd_opt = evaluate_cmd->add_option("--learner-cmd", ea.learner_cmd, "External learner command line");
  ea.skip_opt = evaluate_cmd->add_option("--skip", ea.skip, "Metrics to leave out")->delimiter(',');
  ea.bin_opt = evaluate_cmd->add_option("--time-bin-hours", ea.time_bin, "Floor hour values to this bin (0 = raw)");
  ea.role_opt =
      evaluate_cmd->add_option("--role-threshold", ea.role_threshold, "Role merge threshold")->capture_default_str();
  ea.runs_opt = evaluate_cmd->add_option("--runs", ea.runs, "TSTR runs")->capture_default_str();
  ea.depth_opt = evaluate_cmd->add_option("--tree-depth", ea.depth, "Tree depth")->capture_default_str();
  ea.leaf_opt = evaluate_cmd->add_option("--tree-min-leaf", ea.min_leaf, "Tree leaf size")->capture_default_str();

  OptimizeArgs oa;
  auto* optimize_cmd = app.add_subcommand("optimize-k", "Choose the history length k by the elbow method");
  add_common(optimize_cmd, oc);
  oa.input_opt = optimize_cmd->add_option("-i,--input", oa.inputs, "Log(s); several logs average their sweeps");
  oa.val_opt = optimize_cmd->add_option("--validation", oa.validation, "Validation log (default: last 20% of input)");
  oa.output_opt = optimize_cmd->add_option("-o,--output", oa.output, "JSON report file");
  oa.plot_opt = optimize_cmd->add_option("--plot-data", oa.plot, "Whitespace-separated k/CFLD/1-entropy file");
  oa.csv_opt = optimize_cmd->add_option("--csv-mapping", oa.csv_map, "CSV column mapping file");
  oa.cand_opt = optimize_cmd->add_option("--k-candidates", oa.k_candidates, "e.g. 1-6 or 1,2,4")->capture_default_str();
  oa.gen_opt = optimize_cmd->add_option("--gen-traces", oa.gen_traces, "Traces per candidate (0 = validation size)");

  TstrArgs ta;
  auto* tstr_cmd = app.add_subcommand("tstr", "Train on synthetic, test on real");
  add_common(tstr_cmd, tc);
  ta.train_opt = tstr_cmd->add_option("--train", ta.train, "Real training log");
  ta.gen_opt = tstr_cmd->add_option("-g,--generated", ta.generated, "Generated (or balanced) log");
  ta.test_opt = tstr_cmd->add_option("--test", ta.test, "Real test log");
  ta.output_opt = tstr_cmd->add_option("-o,--output", ta.output, "JSON report file");
  ta.csv_opt = tstr_cmd->add_option("--csv-mapping", ta.csv_map, "CSV column mapping file");
  ta.activity_opt = tstr_cmd->add_option("--activity", ta.activity, "Rare activity: run the F-score protocol instead");
  ta.learner_opt = tstr_cmd->add_option("--learner", ta.learner, "Built-in learner")->capture_default_str();
  ta.cmd_opt = tstr_cmd->add_option("--learner-cmd", ta.learner_cmd, "External learner command line");
  ta.runs_opt = tstr_cmd->add_option("--runs", ta.runs, "Runs")->capture_default_str();
  ta.depth_opt = tstr_cmd->add_option("--tree-depth", ta.depth, "Tree depth")->capture_default_str();
  ta.leaf_opt = tstr_cmd->add_option("--tree-min-leaf", ta.min_leaf, "Tree leaf size")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*discover_cmd) return run_discover(dc, da);
    if (*generate_cmd) return run_generate(gc, ga, "generate", false);
    if (*balance_cmd) return run_generate(bc, ba, "balance", true);
    if (*evaluate_cmd) return run_evaluate(ec, ea);
    if (*optimize_cmd) return run_optimize(oc, oa);
    if (*tstr_cmd) return run_tstr(tc, ta);
  } catch (const ConfigError& e) {
    std::cerr << "probagen: error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "probagen: error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
