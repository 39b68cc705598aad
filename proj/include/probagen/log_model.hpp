#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "probagen/time.hpp"

namespace probagen {

/// Lifecycle transition of an event. Unknown labels are kept verbatim as `Other`.
class Lifecycle {
 public:
  enum class Kind { Start, Complete, Schedule, Other };

  Lifecycle() = default;
  static Lifecycle start() { return Lifecycle(Kind::Start, "start"); }
  static Lifecycle complete() { return Lifecycle(Kind::Complete, "complete"); }
  static Lifecycle schedule() { return Lifecycle(Kind::Schedule, "schedule"); }
  /// Case-insensitive match on start / complete / schedule; anything else is Other.
  static Lifecycle from_label(std::string_view label);

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  bool is_start() const { return kind_ == Kind::Start; }
  bool is_complete() const { return kind_ == Kind::Complete; }

  friend bool operator==(const Lifecycle&, const Lifecycle&) = default;
  friend auto operator<=>(const Lifecycle&, const Lifecycle&) = default;

 private:
  Lifecycle(Kind k, std::string label) : kind_(k), label_(std::move(label)) {}

  Kind kind_ = Kind::Complete;
  std::string label_ = "complete";
};

enum class AttributeType { Categorical, Numeric };

using AttributeValue = std::variant<std::string, double>;
using AttributeMap = std::map<std::string, AttributeValue>;
using AttributeSchema = std::map<std::string, AttributeType>;

/// Shortest round-trip text for numbers.
std::string attribute_to_string(const AttributeValue& v);
/// Whole-string decimal parse; nullopt on trailing garbage.
std::optional<double> parse_number(std::string_view s);
std::string_view to_string(AttributeType t);
AttributeType attribute_type_from_string(std::string_view s);

struct Event {
  std::string case_id;
  std::string activity;
  std::optional<std::string> resource;
  Timestamp timestamp{};
  Lifecycle lifecycle;
  AttributeMap attributes;

  friend bool operator==(const Event&, const Event&) = default;
};

struct Trace {
  std::string case_id;
  std::vector<Event> events;

  Timestamp start() const { return events.front().timestamp; }
  Timestamp end() const { return events.back().timestamp; }
  /// time(e_n) - time(e_1)
  Millis duration() const { return end() - start(); }
  std::vector<std::string> activities() const;
  bool contains_activity(std::string_view activity) const;

  friend bool operator==(const Trace&, const Trace&) = default;
};

/// Immutable multiset of traces.
///
/// Construction normalizes the input: events inside each trace are stably
/// sorted by timestamp (source order breaks ties), the attribute schema is
/// completed for every attribute name that occurs, and values are coerced to
/// the schema type. Empty traces and traces mixing case ids are rejected.
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(std::vector<Trace> traces, AttributeSchema declared_schema = {});

  const std::vector<Trace>& traces() const { return traces_; }
  const AttributeSchema& schema() const { return schema_; }
  std::size_t size() const { return traces_.size(); }
  bool empty() const { return traces_.empty(); }
  std::size_t event_count() const;
  /// Earliest timestamp in the log; the Unix epoch for an empty log.
  Timestamp epoch() const { return epoch_; }

  bool has_resources() const;
  bool has_start_events() const;

 private:
  std::vector<Trace> traces_;
  AttributeSchema schema_;
  Timestamp epoch_{};
};

/// L^train / L^test
struct SplitPair {
  EventLog train;
  EventLog test;
};

/// Traces ordered by (first-event timestamp, case id). The returned pointers
/// refer into `log`.
std::vector<const Trace*> traces_by_start(const EventLog& log);

/// Temporal split: the floor(train_fraction * |log|) earliest-starting traces
/// go to train, the rest to test. Both sides keep at least one trace.
SplitPair temporal_split(const EventLog& log, double train_fraction);

/// ⟨⟩ followed by, for each position i, the window of at most k events ending
/// at i. Always |trace| + 1 entries.
std::vector<std::span<const Event>> k_prefixes(const Trace& trace, std::size_t k);

/// Duration of the event at `index`, paired with the closest-in-time
/// counterpart of the same activity (start -> later complete, complete ->
/// earlier start). Empty when no counterpart exists.
std::optional<Millis> activity_duration(const Trace& trace, std::size_t index);

using ResourcePair = std::pair<std::string, std::string>;
using HandoverCounts = std::map<ResourcePair, std::size_t>;

/// hw(r_i, r_j) over consecutive event pairs; pairs touching an event without
/// a resource are skipped.
HandoverCounts handover_counts(const EventLog& log);

/// Gaps between consecutive trace arrivals (first-event timestamps sorted).
std::vector<Millis> inter_arrival_times(const EventLog& log);

}  // namespace probagen
