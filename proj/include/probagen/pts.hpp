#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "probagen/distfit.hpp"
#include "probagen/log_model.hpp"

namespace probagen {

/// (activity, lifecycle) pair: the control-flow symbol.
struct ActivityLifecycle {
  std::string activity;
  Lifecycle lifecycle;

  friend bool operator==(const ActivityLifecycle&, const ActivityLifecycle&) = default;
  friend auto operator<=>(const ActivityLifecycle&, const ActivityLifecycle&) = default;
};

/// Index into one of the model's alphabets.
using SymbolId = std::uint32_t;
using Count = std::uint64_t;
using Counts = std::map<SymbolId, Count>;

/// Attribute values of one event, aligned with the model's attribute names;
/// nullopt marks a missing value.
using AttributeVector = std::vector<std::optional<AttributeValue>>;

/// Window of at most k (activity, lifecycle) ids; the empty window is s0.
using CfState = std::vector<SymbolId>;

/// Successor counts of one control-flow state. `end` counts windows that were
/// trace-final, so P(end | state) = end / total().
struct CfRow {
  Counts next;
  Count end = 0;

  Count total() const;
  friend bool operator==(const CfRow&, const CfRow&) = default;
};

struct CfTransitionTable {
  std::size_t k = 1;
  std::map<CfState, CfRow> rows;
  std::set<CfState> final_states;

  friend bool operator==(const CfTransitionTable&, const CfTransitionTable&) = default;
};

/// Window over (activity-lifecycle id, value id) pairs, where the value is a
/// resource or an attribute vector.
using PerspectiveState = std::vector<std::pair<SymbolId, SymbolId>>;

/// For each perspective-aware window and next (activity, lifecycle): counts of
/// the value that accompanied it. `by_activity` holds the global per-activity
/// value counts used when back-off finds no matching window.
struct PerspectiveTable {
  std::size_t k = 1;
  std::map<PerspectiveState, std::map<SymbolId, Counts>> rows;
  std::map<std::string, Counts> by_activity;

  friend bool operator==(const PerspectiveTable&, const PerspectiveTable&) = default;
};

using ResourceTransitionTable = PerspectiveTable;
using AttributeTransitionTable = PerspectiveTable;

struct TemporalModel {
  /// Keyed by activity-lifecycle id; gaps to the predecessor event, in seconds.
  std::map<SymbolId, FittedDistribution> per_activity;
  /// Seconds between consecutive case arrivals.
  FittedDistribution inter_arrival;

  friend bool operator==(const TemporalModel&, const TemporalModel&) = default;
};

/// The learned generative model.
struct ProbabilisticTransitionSystem {
  std::size_t k = 1;
  AttributeSchema schema;

  std::vector<ActivityLifecycle> activities;
  /// Resource alphabet; nullopt is the "no resource" symbol.
  std::vector<std::optional<std::string>> resources;
  std::vector<std::string> attribute_names;
  std::vector<AttributeVector> attribute_vectors;

  CfTransitionTable cf;
  ResourceTransitionTable res;
  AttributeTransitionTable attr;
  TemporalModel temporal;

  std::size_t longest_trace = 0;
  std::vector<std::string> warnings;

  std::optional<SymbolId> activity_id(const ActivityLifecycle& al) const;

  friend bool operator==(const ProbabilisticTransitionSystem&, const ProbabilisticTransitionSystem&) = default;
};

/// Learns the model from a training log with history length k.
ProbabilisticTransitionSystem discover(const EventLog& train, std::size_t k);

/// Successor distribution of a control-flow state.
struct NextActivityDistribution {
  std::vector<std::pair<SymbolId, double>> next;
  double end_probability = 0.0;
  /// The state whose row was used (a suffix of the query after back-off).
  CfState matched_state;
  std::size_t backoff_steps = 0;
};

/// Looks up `state`, dropping its oldest element until a learned row is found.
NextActivityDistribution next_activity_distribution(const ProbabilisticTransitionSystem& pts, const CfState& state);

/// Result of a back-off lookup in a resource/attribute table.
struct PerspectiveLookup {
  const Counts* counts = nullptr;
  /// Length of the matched window, or nullopt when the per-activity fallback was used.
  std::optional<std::size_t> window_length;
};

/// Finds the value counts for `next` given a perspective-aware window:
/// longest matching suffix first, then the per-activity fallback.
PerspectiveLookup lookup_values(const PerspectiveTable& table, const PerspectiveState& window, SymbolId next,
                                const std::string& activity);

// Serialization: versioned JSON envelope, canonical key order.
inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const ProbabilisticTransitionSystem& pts);
/// Throws ParseError on version mismatch or structural problems.
ProbabilisticTransitionSystem pts_from_json(const nlohmann::json& j);

std::string serialize(const ProbabilisticTransitionSystem& pts);
ProbabilisticTransitionSystem deserialize(std::string_view bytes);

/// `.pts.json.gz` model files (gzip-compressed serialize()).
void save_model(const std::filesystem::path& path, const ProbabilisticTransitionSystem& pts);
ProbabilisticTransitionSystem load_model(const std::filesystem::path& path);

}  // namespace probagen
