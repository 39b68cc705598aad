#pragma once

#include <string>
#include <string_view>

#include "probagen/log_model.hpp"

namespace probagen::io {

/// Parses an XES 1.0 document (plain or gzip-compressed bytes).
///
/// Standard keys map onto Event fields: concept:name (activity, and case id on
/// traces), org:resource, time:timestamp, lifecycle:transition. All other
/// event-level attributes land in Event::attributes; int/float values are
/// numeric. Throws ParseError with a line number on malformed XML and
/// InputError naming the case when an event lacks a timestamp or activity.
EventLog parse_xes(std::string_view bytes);

/// Serializes to XES 1.0. Output is deterministic for a given log.
std::string write_xes(const EventLog& log);

}  // namespace probagen::io
